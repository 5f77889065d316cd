//! CX-equivalent cost model and stage-to-stage deltas.

use serde::{Deserialize, Serialize};

use crate::circuit::{count_gates, Circuit, Gate, GateKind};

/// Tolerance for recognising `CP(π)` as a CZ.
pub const CP_PI_TOL: f64 = 1e-9;

/// CX-equivalent cost of one gate.
///
/// MCX/MCZ cost nothing here; they only exist before synthesis and their
/// cost shows up in the synthesis delta.
pub fn cxeq_cost(g: &Gate) -> u64 {
    match g.kind {
        GateKind::Cx | GateKind::Cz | GateKind::Ms => 1,
        GateKind::Cp => {
            if (g.theta() - core::f64::consts::PI).abs() <= CP_PI_TOL {
                1
            } else {
                2
            }
        }
        GateKind::Crz | GateKind::Rxx | GateKind::Ryy | GateKind::Rzz => 2,
        GateKind::Swap => 3,
        _ => 0,
    }
}

pub fn circuit_cxeq(c: &Circuit) -> u64 {
    c.gates.iter().map(cxeq_cost).sum()
}

/// Change in the error-bearing gate counts across one stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDelta {
    pub d_n2q: i64,
    pub d_n1q_phys: i64,
    pub d_cxeq: i64,
}

impl StageDelta {
    pub fn between(prev: &Circuit, next: &Circuit) -> StageDelta {
        let (a, b) = (count_gates(prev), count_gates(next));
        StageDelta {
            d_n2q: b.n_2q as i64 - a.n_2q as i64,
            d_n1q_phys: b.n_1q_phys as i64 - a.n_1q_phys as i64,
            d_cxeq: circuit_cxeq(next) as i64 - circuit_cxeq(prev) as i64,
        }
    }
}
