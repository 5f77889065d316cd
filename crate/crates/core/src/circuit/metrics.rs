use alloc::collections::BTreeMap;
use alloc::vec;

use serde::{Deserialize, Serialize};

use super::{Circuit, GateClass, GateKind};

/// Gate tallies by category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub n_2q: usize,
    pub n_1q_phys: usize,
    pub n_1q_virtual: usize,
    /// MCX/MCZ gates still awaiting synthesis.
    pub n_multi: usize,
    pub n_measure: usize,
    pub n_barrier: usize,
    pub per_kind: BTreeMap<GateKind, usize>,
}

/// ASAP layer counts. Virtual gates, measurements and barriers add no depth.
///
/// `d_2q` is the depth of the two-qubit-only subcircuit and `d_1q = d_tot - d_2q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthMetrics {
    pub d_tot: usize,
    pub d_2q: usize,
    pub d_1q: usize,
}

pub fn count_gates(c: &Circuit) -> GateCounts {
    let mut out = GateCounts::default();
    for g in &c.gates {
        match g.class() {
            GateClass::TwoQubit => out.n_2q += 1,
            GateClass::PhysicalOneQubit => out.n_1q_phys += 1,
            GateClass::VirtualOneQubit => out.n_1q_virtual += 1,
            GateClass::MultiQubit => out.n_multi += 1,
            GateClass::Measure => out.n_measure += 1,
            GateClass::Barrier => out.n_barrier += 1,
        }
        if g.kind != GateKind::Barrier {
            *out.per_kind.entry(g.kind).or_insert(0) += 1;
        }
    }
    out
}

pub fn depth(c: &Circuit) -> DepthMetrics {
    let mut all = vec![0usize; c.n_qubits];
    let mut two = vec![0usize; c.n_qubits];
    for g in &c.gates {
        let class = g.class();
        let layered = matches!(
            class,
            GateClass::TwoQubit | GateClass::PhysicalOneQubit | GateClass::MultiQubit
        );
        if !layered {
            continue;
        }
        bump(&mut all, &g.qubits);
        if class == GateClass::TwoQubit {
            bump(&mut two, &g.qubits);
        }
    }
    let max = |v: &[usize]| v.iter().copied().max().unwrap_or(0);
    let (d_tot, d_2q) = (max(&all), max(&two));
    DepthMetrics {
        d_tot,
        d_2q,
        d_1q: d_tot - d_2q,
    }
}

fn bump(levels: &mut [usize], qubits: &[usize]) {
    let layer = qubits.iter().map(|&q| levels[q]).max().unwrap_or(0) + 1;
    for &q in qubits {
        levels[q] = layer;
    }
}
