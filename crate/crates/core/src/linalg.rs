//! 2x2 complex matrices for single-qubit gates.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::circuit::GateKind;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Row-major 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

pub(crate) fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    /// Product `self · rhs`, i.e. `rhs` acts first.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn dagger(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    /// True when `self = e^{iφ}·other` for some φ, up to `tol` in max-norm.
    pub fn equal_up_to_phase(&self, other: &Mat2, tol: f64) -> bool {
        let (mut bi, mut bj, mut best) = (0, 0, -1.0);
        for i in 0..2 {
            for j in 0..2 {
                let m = other.0[i][j].norm();
                if m > best {
                    best = m;
                    bi = i;
                    bj = j;
                }
            }
        }
        if best < 1e-300 {
            return false;
        }
        let ratio = self.0[bi][bj] / other.0[bi][bj];
        let phase = ratio / ratio.norm();
        (0..2).all(|i| (0..2).all(|j| (self.0[i][j] - phase * other.0[i][j]).norm() <= tol))
    }
}

/// Unitary of a single-qubit gate kind, or `None` for other kinds.
pub fn gate_matrix(kind: GateKind, theta: f64) -> Option<Mat2> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let (c, s) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
    Some(match kind {
        GateKind::H => Mat2([
            [C64::new(h, 0.0), C64::new(h, 0.0)],
            [C64::new(h, 0.0), C64::new(-h, 0.0)],
        ]),
        GateKind::X => Mat2([[ZERO, ONE], [ONE, ZERO]]),
        GateKind::Sx => {
            let p = C64::new(0.5, 0.5);
            let m = C64::new(0.5, -0.5);
            Mat2([[p, m], [m, p]])
        }
        GateKind::Rx => Mat2([
            [C64::new(c, 0.0), C64::new(0.0, -s)],
            [C64::new(0.0, -s), C64::new(c, 0.0)],
        ]),
        GateKind::Ry => Mat2([
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ]),
        GateKind::Rz => Mat2([[cis(-theta / 2.0), ZERO], [ZERO, cis(theta / 2.0)]]),
        GateKind::P | GateKind::U1 => Mat2([[ONE, ZERO], [ZERO, cis(theta)]]),
        _ => return None,
    })
}

/// Angles with `U = e^{iγ}·RZ(φ)·RY(θ)·RZ(λ)`, θ in [0, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zyz {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
    pub gamma: f64,
}

pub fn zyz(u: &Mat2) -> Zyz {
    let m = &u.0;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let gamma = det.arg() / 2.0;
    let g = cis(-gamma);
    // V = e^{-iγ}U has unit determinant: V = [[a, -b*], [b, a*]].
    let a = m[0][0] * g;
    let b = m[1][0] * g;
    let theta = 2.0 * libm::atan2(b.norm(), a.norm());
    // a = cos(θ/2)·e^{-i(φ+λ)/2}, b = sin(θ/2)·e^{i(φ-λ)/2}
    let (sum, diff) = if a.norm() < 1e-12 {
        (0.0, 2.0 * b.arg())
    } else if b.norm() < 1e-12 {
        (-2.0 * a.arg(), 0.0)
    } else {
        (-2.0 * a.arg(), 2.0 * b.arg())
    };
    Zyz {
        theta,
        phi: (sum + diff) / 2.0,
        lambda: (sum - diff) / 2.0,
        gamma,
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = libm::fmod(x, two_pi);
    if y <= -PI {
        y += two_pi;
    } else if y > PI {
        y -= two_pi;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rebuild(z: &Zyz) -> Mat2 {
        let rz = |t| gate_matrix(GateKind::Rz, t).unwrap();
        let ry = gate_matrix(GateKind::Ry, z.theta).unwrap();
        rz(z.phi).mul(&ry).mul(&rz(z.lambda))
    }

    #[test]
    fn zyz_round_trips() {
        let kinds = [
            GateKind::H,
            GateKind::X,
            GateKind::Sx,
            GateKind::Rx,
            GateKind::Ry,
            GateKind::Rz,
            GateKind::P,
        ];
        let mut u = Mat2::IDENTITY;
        for (i, k) in kinds.iter().cycle().take(40).enumerate() {
            u = gate_matrix(*k, 0.37 * i as f64 - 2.0).unwrap().mul(&u);
            let z = zyz(&u);
            assert!(rebuild(&z).equal_up_to_phase(&u, 1e-10), "step {i}");
            assert!((0.0..=PI + 1e-12).contains(&z.theta));
        }
        for k in kinds {
            let u = gate_matrix(k, 1.1).unwrap();
            assert!(rebuild(&zyz(&u)).equal_up_to_phase(&u, 1e-12));
        }
    }

    #[test]
    fn sx_squares_to_x() {
        let sx = gate_matrix(GateKind::Sx, 0.0).unwrap();
        let x = gate_matrix(GateKind::X, 0.0).unwrap();
        assert!(sx.mul(&sx).equal_up_to_phase(&x, 1e-15));
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
    }
}
