//! Dense statevector simulation and a Monte Carlo depolarizing sampler.

mod sampler;
mod statevector;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::noise::NoiseError;

pub use sampler::{noisy_sample, NoisySampler};
pub use statevector::{Pauli, StateVector};

/// Width guard for [`statevector`] and [`ideal_distribution`].
pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("{width} qubits exceed the simulator limit of {limit}")]
    TooWide { width: usize, limit: usize },
    #[error("qubit {qubit} is acted on after being measured")]
    MidCircuitMeasurement { qubit: usize },
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Shot histogram keyed by measured bitstrings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl Counts {
    pub fn record(&mut self, bits: &str) {
        *self.counts.entry(String::from(bits)).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn merge(&mut self, other: &Counts) {
        for (k, &v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.shots += other.shots;
    }

    pub fn get(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    /// True when the histogram sums to `shots`.
    pub fn is_consistent(&self) -> bool {
        self.counts.values().sum::<u64>() == self.shots
    }

    pub fn distribution(&self) -> BTreeMap<String, f64> {
        let total = self.shots.max(1) as f64;
        self.counts
            .iter()
            .map(|(k, &v)| (k.clone(), v as f64 / total))
            .collect()
    }
}

/// Checks for gates acting on already-measured qubits.
pub(crate) fn check_terminal_measurements(c: &Circuit) -> Result<(), SimError> {
    let mut measured = vec![false; c.n_qubits];
    for g in &c.gates {
        match g.kind {
            GateKind::Measure => measured[g.qubits[0]] = true,
            GateKind::Barrier => {}
            _ => {
                if let Some(&q) = g.qubits.iter().find(|&&q| measured[q]) {
                    return Err(SimError::MidCircuitMeasurement { qubit: q });
                }
            }
        }
    }
    Ok(())
}

/// Restricts a circuit to the qubits it touches or measures.
///
/// Returns the compacted circuit and, for each compact index, the original
/// qubit.
pub fn compact(c: &Circuit) -> (Circuit, Vec<usize>) {
    let used = c.active_qubits();
    let mut map = vec![usize::MAX; c.n_qubits];
    for (i, &q) in used.iter().enumerate() {
        map[q] = i;
    }
    let gates = c
        .gates
        .iter()
        .filter(|g| g.kind != GateKind::Barrier)
        .map(|g| {
            let mut g = g.clone();
            for q in &mut g.qubits {
                *q = map[*q];
            }
            g
        })
        .collect();
    (
        Circuit {
            n_qubits: used.len(),
            gates,
        },
        used,
    )
}

/// Exact final state of `c` on its full register, up to `limit` qubits.
pub fn statevector_with_limit(c: &Circuit, limit: usize) -> Result<StateVector, SimError> {
    if c.n_qubits > limit {
        return Err(SimError::TooWide {
            width: c.n_qubits,
            limit,
        });
    }
    check_terminal_measurements(c)?;
    let mut s = StateVector::zero(c.n_qubits);
    for g in &c.gates {
        s.apply(g);
    }
    Ok(s)
}

/// Exact final state of `c`; at most [`MAX_QUBITS`] qubits.
pub fn statevector(c: &Circuit) -> Result<StateVector, SimError> {
    statevector_with_limit(c, MAX_QUBITS)
}

/// Bitstring for basis index `idx`: character j is the bit of `measured[j]`.
pub(crate) fn bitstring(idx: usize, measured: &[usize]) -> String {
    measured
        .iter()
        .map(|&q| if (idx >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Born-rule distribution over measured bitstrings.
///
/// Idle qubits are dropped first, so routed circuits on a large register
/// are fine as long as they touch at most [`MAX_QUBITS`] qubits.
pub fn ideal_distribution(c: &Circuit) -> Result<BTreeMap<String, f64>, SimError> {
    check_terminal_measurements(c)?;
    let (small, _) = compact(c);
    let s = statevector(&small)?;
    let measured = small.measured_qubits();
    let mut out = BTreeMap::new();
    for (idx, p) in s.probabilities().into_iter().enumerate() {
        if p > 1e-15 {
            *out.entry(bitstring(idx, &measured)).or_insert(0.0) += p;
        }
    }
    Ok(out)
}

/// Fidelity between the state of `logical` and that of `physical` once the
/// physical register is read through `final_layout` (logical → physical).
///
/// Physical qubits outside the layout must end in |0⟩ for a perfect score.
pub fn layout_fidelity(
    logical: &Circuit,
    physical: &Circuit,
    final_layout: &[usize],
) -> Result<f64, SimError> {
    let a = statevector(&logical.without_measurements())?;
    let (small, phys) = compact(&physical.without_measurements());
    let b = statevector(&small)?;
    let mut pos = vec![usize::MAX; physical.n_qubits];
    for (i, &p) in phys.iter().enumerate() {
        pos[p] = i;
    }
    let mut overlap = crate::linalg::ZERO;
    for (x, amp) in a.amps.iter().enumerate() {
        let mut y = 0usize;
        let mut inside = true;
        for (l, &p) in final_layout.iter().enumerate() {
            if (x >> l) & 1 == 1 {
                if pos[p] == usize::MAX {
                    inside = false;
                    break;
                }
                y |= 1 << pos[p];
            }
        }
        if inside {
            overlap += amp.conj() * b.amps[y];
        }
    }
    Ok(overlap.norm_sqr())
}
