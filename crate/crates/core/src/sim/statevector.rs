use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Gate, GateKind};
use crate::linalg::{cis, gate_matrix, Mat2, C64, I, ONE, ZERO};

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Dense state over `n_qubits`; qubit q is bit q of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> StateVector {
        let mut amps = vec![ZERO; 1usize << n_qubits];
        amps[0] = ONE;
        StateVector { n_qubits, amps }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Squared overlap `|⟨self|other⟩|²`; insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let bit = 1usize << q;
        let [[a, b], [c, d]] = m.0;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (x, y) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = a * x + b * y;
                self.amps[i | bit] = c * x + d * y;
            }
        }
    }

    pub fn apply_pauli(&mut self, p: Pauli, q: usize) {
        let bit = 1usize << q;
        match p {
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::Y => {
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let (x, y) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = -I * y;
                        self.amps[i | bit] = I * x;
                    }
                }
            }
        }
    }

    fn phase_where<F: Fn(usize) -> Option<C64>>(&mut self, f: F) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if let Some(ph) = f(i) {
                *a *= ph;
            }
        }
    }

    /// `exp(-i θ/2 · P⊗P)` for P in {X, Y}; `yy` selects Y.
    fn apply_pp(&mut self, theta: f64, a: usize, b: usize, yy: bool) {
        let (ba, bb) = (1usize << a, 1usize << b);
        let c = C64::new(libm::cos(theta / 2.0), 0.0);
        let s = C64::new(0.0, -libm::sin(theta / 2.0));
        for i in 0..self.amps.len() {
            if i & ba != 0 || i & bb != 0 {
                continue;
            }
            let (i00, i01, i10, i11) = (i, i | bb, i | ba, i | ba | bb);
            let (v00, v01, v10, v11) = (
                self.amps[i00],
                self.amps[i01],
                self.amps[i10],
                self.amps[i11],
            );
            // YY|00> = -|11>, YY|01> = |10>; XX has all signs +.
            let sgn = if yy { -ONE } else { ONE };
            self.amps[i00] = c * v00 + s * sgn * v11;
            self.amps[i11] = c * v11 + s * sgn * v00;
            self.amps[i01] = c * v01 + s * v10;
            self.amps[i10] = c * v10 + s * v01;
        }
    }

    /// Applies a unitary gate. Measurements and barriers are no-ops here.
    pub fn apply(&mut self, g: &Gate) {
        let q = &g.qubits;
        let theta = g.theta();
        match g.kind {
            GateKind::Measure | GateKind::Barrier => {}
            GateKind::GlobalPhase => {
                let ph = cis(theta);
                for a in &mut self.amps {
                    *a *= ph;
                }
            }
            GateKind::Cx => {
                let (c, t) = (1usize << q[0], 1usize << q[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::Swap => {
                let (a, b) = (1usize << q[0], 1usize << q[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amps.swap(i, (i & !a) | b);
                    }
                }
            }
            GateKind::Cz => {
                let m = (1usize << q[0]) | (1usize << q[1]);
                self.phase_where(|i| (i & m == m).then_some(-ONE));
            }
            GateKind::Cp => {
                let m = (1usize << q[0]) | (1usize << q[1]);
                let ph = cis(theta);
                self.phase_where(|i| (i & m == m).then_some(ph));
            }
            GateKind::Crz => {
                let (c, t) = (1usize << q[0], 1usize << q[1]);
                let (p0, p1) = (cis(-theta / 2.0), cis(theta / 2.0));
                self.phase_where(|i| (i & c != 0).then_some(if i & t == 0 { p0 } else { p1 }));
            }
            GateKind::Rzz => {
                let (a, b) = (1usize << q[0], 1usize << q[1]);
                let (even, odd) = (cis(-theta / 2.0), cis(theta / 2.0));
                self.phase_where(|i| {
                    Some(if (i & a != 0) ^ (i & b != 0) {
                        odd
                    } else {
                        even
                    })
                });
            }
            GateKind::Rxx => self.apply_pp(theta, q[0], q[1], false),
            GateKind::Ryy => self.apply_pp(theta, q[0], q[1], true),
            GateKind::Ms => self.apply_pp(core::f64::consts::FRAC_PI_2, q[0], q[1], false),
            GateKind::Mcz => {
                let m = q.iter().fold(0usize, |m, &x| m | (1 << x));
                self.phase_where(|i| (i & m == m).then_some(-ONE));
            }
            GateKind::Mcx => {
                let (controls, target) = q.split_at(q.len() - 1);
                let m = controls.iter().fold(0usize, |m, &x| m | (1 << x));
                let t = 1usize << target[0];
                for i in 0..self.amps.len() {
                    if i & m == m && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            kind => {
                let m = gate_matrix(kind, theta).expect("single-qubit kind");
                self.apply_1q(&m, q[0]);
            }
        }
    }
}
