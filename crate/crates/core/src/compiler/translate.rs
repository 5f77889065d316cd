//! B stage: rewrites into a device's native gate set and fuses 1Q runs.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::synthesis::lower_two_qubit;
use super::CompileError;
use crate::circuit::{Circuit, Gate, GateClass, GateKind};
use crate::linalg::{gate_matrix, wrap_angle, zyz, Mat2};

/// Angles closer than this to a special value are treated as equal to it.
const ANGLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NativeGateSet {
    /// {CZ, SX, X, RZ}.
    IbmHeron,
    /// {MS, RX, RY, RZ}.
    IonqForte,
}

impl NativeGateSet {
    pub fn name(self) -> &'static str {
        match self {
            NativeGateSet::IbmHeron => "ibm_heron",
            NativeGateSet::IonqForte => "ionq_forte",
        }
    }

    pub fn from_name(s: &str) -> Option<NativeGateSet> {
        [NativeGateSet::IbmHeron, NativeGateSet::IonqForte]
            .into_iter()
            .find(|b| {
                b.name().eq_ignore_ascii_case(s)
                    || b.name().replace('_', "-").eq_ignore_ascii_case(s)
            })
    }

    pub fn two_q(self) -> GateKind {
        match self {
            NativeGateSet::IbmHeron => GateKind::Cz,
            NativeGateSet::IonqForte => GateKind::Ms,
        }
    }

    pub fn contains(self, kind: GateKind) -> bool {
        match kind {
            GateKind::Rz | GateKind::Measure | GateKind::Barrier => true,
            GateKind::Cz | GateKind::Sx | GateKind::X => self == NativeGateSet::IbmHeron,
            GateKind::Ms | GateKind::Rx | GateKind::Ry => self == NativeGateSet::IonqForte,
            _ => false,
        }
    }
}

/// Accumulated single-qubit unitaries awaiting emission.
struct Fuser {
    basis: NativeGateSet,
    pending: Vec<Option<Mat2>>,
    out: Circuit,
}

impl Fuser {
    fn new(n: usize, basis: NativeGateSet) -> Fuser {
        Fuser {
            basis,
            pending: alloc::vec![None; n],
            out: Circuit::new(n),
        }
    }

    fn absorb(&mut self, q: usize, m: Mat2) {
        let acc = self.pending[q].unwrap_or(Mat2::IDENTITY);
        self.pending[q] = Some(m.mul(&acc));
    }

    fn one(&mut self, kind: GateKind, theta: f64, q: usize) {
        let m = gate_matrix(kind, theta).expect("single-qubit kind");
        self.absorb(q, m);
    }

    fn rz(&mut self, theta: f64, q: usize) {
        let t = wrap_angle(theta);
        if t.abs() > ANGLE_TOL {
            self.out.add(Gate::rz(t, q));
        }
    }

    fn flush(&mut self, q: usize) {
        let Some(u) = self.pending[q].take() else {
            return;
        };
        let z = zyz(&u);
        // Emission order is time order: RZ(λ) first.
        if z.theta.abs() <= ANGLE_TOL {
            self.rz(z.phi + z.lambda, q);
            return;
        }
        match self.basis {
            NativeGateSet::IbmHeron => {
                if (z.theta - PI).abs() <= ANGLE_TOL {
                    self.rz(z.lambda - FRAC_PI_2, q);
                    self.out.add(Gate::x(q));
                    self.rz(z.phi + FRAC_PI_2, q);
                } else if (z.theta - FRAC_PI_2).abs() <= ANGLE_TOL {
                    self.rz(z.lambda - FRAC_PI_2, q);
                    self.out.add(Gate::sx(q));
                    self.rz(z.phi + FRAC_PI_2, q);
                } else {
                    self.rz(z.lambda, q);
                    self.out.add(Gate::sx(q));
                    self.rz(z.theta + PI, q);
                    self.out.add(Gate::sx(q));
                    self.rz(z.phi + PI, q);
                }
            }
            NativeGateSet::IonqForte => {
                self.rz(z.lambda, q);
                self.out.add(Gate::ry(z.theta, q));
                self.rz(z.phi, q);
            }
        }
    }

    fn two(&mut self, g: Gate) {
        for &q in &g.qubits {
            self.flush(q);
        }
        self.out.add(g);
    }

    /// Native rendering of CZ(a, b).
    fn cz(&mut self, a: usize, b: usize) {
        match self.basis {
            NativeGateSet::IbmHeron => self.two(Gate::cz(a, b)),
            NativeGateSet::IonqForte => {
                // CZ ∝ (RZ(π/2) ⊗ RZ(π/2))·RZZ(−π/2), RZZ(−π/2) = (H⊗H)·MS·(X⊗X)·(H⊗H) up to phase.
                for q in [a, b] {
                    self.one(GateKind::H, 0.0, q);
                    self.one(GateKind::X, 0.0, q);
                }
                self.two(Gate::ms(a, b));
                for q in [a, b] {
                    self.one(GateKind::H, 0.0, q);
                    self.one(GateKind::Rz, FRAC_PI_2, q);
                }
            }
        }
    }

    fn cx(&mut self, c: usize, t: usize) {
        self.one(GateKind::H, 0.0, t);
        self.cz(c, t);
        self.one(GateKind::H, 0.0, t);
    }

    fn ms(&mut self, a: usize, b: usize) {
        match self.basis {
            NativeGateSet::IonqForte => self.two(Gate::ms(a, b)),
            NativeGateSet::IbmHeron => {
                // MS = (H⊗H)·(RZ(π/2) ⊗ RZ(π/2))·CZ·(H⊗H) up to phase.
                for q in [a, b] {
                    self.one(GateKind::H, 0.0, q);
                }
                self.two(Gate::cz(a, b));
                for q in [a, b] {
                    self.one(GateKind::Rz, FRAC_PI_2, q);
                    self.one(GateKind::H, 0.0, q);
                }
            }
        }
    }

    fn gate(&mut self, g: &Gate) -> Result<(), CompileError> {
        match g.class() {
            GateClass::PhysicalOneQubit | GateClass::VirtualOneQubit => {
                if g.kind != GateKind::GlobalPhase {
                    self.one(g.kind, g.theta(), g.qubits[0]);
                }
            }
            GateClass::Measure | GateClass::Barrier => {
                for &q in &g.qubits {
                    self.flush(q);
                }
                self.out.add(g.clone());
            }
            GateClass::MultiQubit => return Err(CompileError::NotTwoLocal(g.kind)),
            GateClass::TwoQubit => match g.kind {
                GateKind::Cx => self.cx(g.qubits[0], g.qubits[1]),
                GateKind::Cz => self.cz(g.qubits[0], g.qubits[1]),
                GateKind::Ms => self.ms(g.qubits[0], g.qubits[1]),
                _ => {
                    let mut tmp = Circuit::new(self.out.n_qubits);
                    let lowered = lower_two_qubit(g, &mut tmp);
                    debug_assert!(lowered, "{:?} has no two-qubit rule", g.kind);
                    for h in &tmp.gates {
                        self.gate(h)?;
                    }
                }
            },
        }
        Ok(())
    }

    fn finish(mut self) -> Circuit {
        for q in 0..self.pending.len() {
            self.flush(q);
        }
        self.out
    }
}

/// B stage. Every output gate is a member of `basis`.
pub fn translate(c: &Circuit, basis: NativeGateSet) -> Result<Circuit, CompileError> {
    let mut f = Fuser::new(c.n_qubits, basis);
    for g in &c.gates {
        f.gate(g)?;
    }
    Ok(f.finish())
}

/// Replaces every SWAP with its native three-gate form, leaving all other
/// gates untouched.
pub fn lower_swaps(c: &Circuit, basis: NativeGateSet) -> Circuit {
    let mut template = Circuit::new(2);
    template.add(Gate::swap(0, 1));
    let native = translate(&template, basis).expect("swap is two-local");
    let mut out = Circuit::new(c.n_qubits);
    for g in &c.gates {
        if g.kind == GateKind::Swap {
            let map = [g.qubits[0], g.qubits[1]];
            for h in &native.gates {
                let mut h = h.clone();
                for q in &mut h.qubits {
                    *q = map[*q];
                }
                out.add(h);
            }
        } else {
            out.add(g.clone());
        }
    }
    out
}
