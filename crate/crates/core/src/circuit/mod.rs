//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over `n_qubits` qubits.
//! Measurements are ordinary gates; the i-th `measure` in program order
//! writes classical bit i, so measured bitstrings list measured qubits in
//! that order.

mod metrics;
mod qasm;

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use metrics::{count_gates, depth, DepthMetrics, GateCounts};
pub use qasm::{emit_qasm, parse_qasm, QasmError, QasmErrorKind};

/// Closed set of gate kinds understood by every stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Sx,
    Rx,
    Ry,
    Rz,
    P,
    U1,
    Cx,
    Cz,
    Cp,
    Crz,
    Rxx,
    Ryy,
    Rzz,
    Ms,
    Swap,
    Mcx,
    Mcz,
    Measure,
    Barrier,
    #[serde(rename = "gphase")]
    GlobalPhase,
}

/// Number of qubits a gate kind acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Fixed(usize),
    /// Variable width with the given minimum.
    AtLeast(usize),
}

/// Coarse gate category used by the metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateClass {
    TwoQubit,
    PhysicalOneQubit,
    /// Frame changes with zero duration and zero error (RZ, P, U1, global phase).
    VirtualOneQubit,
    MultiQubit,
    Measure,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 22] = [
        GateKind::H,
        GateKind::X,
        GateKind::Sx,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::P,
        GateKind::U1,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Cp,
        GateKind::Crz,
        GateKind::Rxx,
        GateKind::Ryy,
        GateKind::Rzz,
        GateKind::Ms,
        GateKind::Swap,
        GateKind::Mcx,
        GateKind::Mcz,
        GateKind::Measure,
        GateKind::Barrier,
        GateKind::GlobalPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Sx => "sx",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::P => "p",
            GateKind::U1 => "u1",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Cp => "cp",
            GateKind::Crz => "crz",
            GateKind::Rxx => "rxx",
            GateKind::Ryy => "ryy",
            GateKind::Rzz => "rzz",
            GateKind::Ms => "ms",
            GateKind::Swap => "swap",
            GateKind::Mcx => "mcx",
            GateKind::Mcz => "mcz",
            GateKind::Measure => "measure",
            GateKind::Barrier => "barrier",
            GateKind::GlobalPhase => "gphase",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn arity(self) -> Arity {
        match self {
            GateKind::GlobalPhase => Arity::Fixed(0),
            GateKind::H
            | GateKind::X
            | GateKind::Sx
            | GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::P
            | GateKind::U1
            | GateKind::Measure => Arity::Fixed(1),
            GateKind::Cx
            | GateKind::Cz
            | GateKind::Cp
            | GateKind::Crz
            | GateKind::Rxx
            | GateKind::Ryy
            | GateKind::Rzz
            | GateKind::Ms
            | GateKind::Swap => Arity::Fixed(2),
            GateKind::Mcx | GateKind::Mcz => Arity::AtLeast(3),
            GateKind::Barrier => Arity::AtLeast(1),
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::P
            | GateKind::U1
            | GateKind::Cp
            | GateKind::Crz
            | GateKind::Rxx
            | GateKind::Ryy
            | GateKind::Rzz
            | GateKind::GlobalPhase => 1,
            _ => 0,
        }
    }

    pub fn class(self) -> GateClass {
        match self {
            GateKind::Rz | GateKind::P | GateKind::U1 | GateKind::GlobalPhase => {
                GateClass::VirtualOneQubit
            }
            GateKind::H | GateKind::X | GateKind::Sx | GateKind::Rx | GateKind::Ry => {
                GateClass::PhysicalOneQubit
            }
            GateKind::Mcx | GateKind::Mcz => GateClass::MultiQubit,
            GateKind::Measure => GateClass::Measure,
            GateKind::Barrier => GateClass::Barrier,
            _ => GateClass::TwoQubit,
        }
    }

    pub fn is_virtual(self) -> bool {
        self.class() == GateClass::VirtualOneQubit
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Structural errors raised when building gates and circuits.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("{kind} expects {expected} qubit(s), got {got}")]
    WrongArity {
        kind: GateKind,
        expected: &'static str,
        got: usize,
    },
    #[error("{kind} expects {expected} parameter(s), got {got}")]
    WrongParamCount {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} acts on qubit {qubit} more than once")]
    RepeatedQubit { kind: GateKind, qubit: usize },
    #[error("{kind} has a non-finite parameter")]
    NonFiniteParam { kind: GateKind },
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
}

/// One gate application. For controlled kinds the target is the last qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Result<Gate, CircuitError> {
        let got = qubits.len();
        match kind.arity() {
            Arity::Fixed(n) if n != got => {
                return Err(CircuitError::WrongArity {
                    kind,
                    expected: arity_word(n),
                    got,
                })
            }
            Arity::AtLeast(n) if got < n => {
                return Err(CircuitError::WrongArity {
                    kind,
                    expected: if n == 3 { "at least 3" } else { "at least 1" },
                    got,
                })
            }
            _ => {}
        }
        if params.len() != kind.n_params() {
            return Err(CircuitError::WrongParamCount {
                kind,
                expected: kind.n_params(),
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(CircuitError::NonFiniteParam { kind });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if qubits[..i].contains(&q) {
                return Err(CircuitError::RepeatedQubit { kind, qubit: q });
            }
        }
        Ok(Gate {
            kind,
            qubits,
            params,
        })
    }

    fn raw(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Gate {
        debug_assert!(Gate::new(kind, qubits.clone(), params.clone()).is_ok());
        Gate {
            kind,
            qubits,
            params,
        }
    }

    pub fn one(kind: GateKind, q: usize) -> Gate {
        Gate::raw(kind, alloc::vec![q], Vec::new())
    }

    pub fn rot(kind: GateKind, theta: f64, q: usize) -> Gate {
        Gate::raw(kind, alloc::vec![q], alloc::vec![theta])
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Gate {
        Gate::raw(kind, alloc::vec![a, b], Vec::new())
    }

    pub fn rot2(kind: GateKind, theta: f64, a: usize, b: usize) -> Gate {
        Gate::raw(kind, alloc::vec![a, b], alloc::vec![theta])
    }

    pub fn h(q: usize) -> Gate {
        Gate::one(GateKind::H, q)
    }
    pub fn x(q: usize) -> Gate {
        Gate::one(GateKind::X, q)
    }
    pub fn sx(q: usize) -> Gate {
        Gate::one(GateKind::Sx, q)
    }
    pub fn rx(theta: f64, q: usize) -> Gate {
        Gate::rot(GateKind::Rx, theta, q)
    }
    pub fn ry(theta: f64, q: usize) -> Gate {
        Gate::rot(GateKind::Ry, theta, q)
    }
    pub fn rz(theta: f64, q: usize) -> Gate {
        Gate::rot(GateKind::Rz, theta, q)
    }
    pub fn p(theta: f64, q: usize) -> Gate {
        Gate::rot(GateKind::P, theta, q)
    }
    pub fn cx(c: usize, t: usize) -> Gate {
        Gate::two(GateKind::Cx, c, t)
    }
    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::two(GateKind::Cz, a, b)
    }
    pub fn cp(theta: f64, c: usize, t: usize) -> Gate {
        Gate::rot2(GateKind::Cp, theta, c, t)
    }
    pub fn crz(theta: f64, c: usize, t: usize) -> Gate {
        Gate::rot2(GateKind::Crz, theta, c, t)
    }
    pub fn rzz(theta: f64, a: usize, b: usize) -> Gate {
        Gate::rot2(GateKind::Rzz, theta, a, b)
    }
    pub fn ms(a: usize, b: usize) -> Gate {
        Gate::two(GateKind::Ms, a, b)
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::two(GateKind::Swap, a, b)
    }
    pub fn measure(q: usize) -> Gate {
        Gate::one(GateKind::Measure, q)
    }
    pub fn mcz(qubits: Vec<usize>) -> Gate {
        Gate::raw(GateKind::Mcz, qubits, Vec::new())
    }
    pub fn mcx(controls: &[usize], target: usize) -> Gate {
        let mut qubits = controls.to_vec();
        qubits.push(target);
        Gate::raw(GateKind::Mcx, qubits, Vec::new())
    }

    /// First parameter, or 0 for parameterless kinds.
    pub fn theta(&self) -> f64 {
        self.params.first().copied().unwrap_or(0.0)
    }

    pub fn class(&self) -> GateClass {
        self.kind.class()
    }
}

fn arity_word(n: usize) -> &'static str {
    match n {
        0 => "0",
        1 => "1",
        _ => "2",
    }
}

/// Ordered gate list over a fixed register.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    /// Appends a gate after checking its qubits against the register.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a gate built by this crate; qubit range is asserted in debug builds.
    pub(crate) fn add(&mut self, gate: Gate) {
        debug_assert!(gate.qubits.iter().all(|&q| q < self.n_qubits));
        self.gates.push(gate);
    }

    /// Measured qubits in classical-bit order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Measure)
            .map(|g| g.qubits[0])
            .collect()
    }

    /// Qubits touched by at least one gate other than a barrier, ascending.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut used = alloc::vec![false; self.n_qubits];
        for g in &self.gates {
            if g.kind != GateKind::Barrier {
                for &q in &g.qubits {
                    used[q] = true;
                }
            }
        }
        (0..self.n_qubits).filter(|&q| used[q]).collect()
    }

    /// Same circuit without its measurements.
    pub fn without_measurements(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self
                .gates
                .iter()
                .filter(|g| g.kind != GateKind::Measure)
                .cloned()
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Relabels qubit q as `map[q]` on a register of `n_qubits`.
    pub fn remap(&self, map: &[usize], n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    kind: g.kind,
                    qubits: g.qubits.iter().map(|&q| map[q]).collect(),
                    params: g.params.clone(),
                })
                .collect(),
        }
    }
}
