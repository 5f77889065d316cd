use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    bitstring, check_terminal_measurements, compact, Counts, Pauli, SimError, StateVector,
};
use crate::circuit::{Circuit, GateClass};
use crate::noise::CalibrationModel;

/// Compacted registers wider than this are rejected by the sampler.
pub const MAX_SAMPLER_QUBITS: usize = 20;

/// Number of stored ideal states used to skip the error-free prefix of a trajectory.
const CHECKPOINTS: usize = 32;

#[derive(Clone, Copy, Debug)]
enum Support {
    One,
    Two,
}

#[derive(Clone, Copy, Debug)]
struct Location {
    /// Index of the gate the error follows.
    gate: usize,
    support: Support,
    p: f64,
}

/// Prepared depolarizing sampler for one physical circuit.
///
/// Each shot draws from its own ChaCha stream keyed by `(seed, shot)`, so any
/// split of the shot range yields the same merged counts.
#[derive(Clone, Debug)]
pub struct NoisySampler {
    circuit: Circuit,
    measured: Vec<usize>,
    locations: Vec<Location>,
    readout: Vec<f64>,
    ideal_cdf: Vec<f64>,
    checkpoints: Vec<(usize, StateVector)>,
}

fn cdf(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    let total = cdf.last().copied().unwrap_or(1.0);
    let idx = cdf.partition_point(|&c| c <= u * total);
    idx.min(cdf.len() - 1)
}

const PAULIS: [Option<Pauli>; 4] = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];

impl NoisySampler {
    /// Prepares `c`, whose qubit indices are physical qubits in `cal`.
    pub fn new(c: &Circuit, cal: &CalibrationModel) -> Result<NoisySampler, SimError> {
        cal.validate()?;
        check_terminal_measurements(c)?;
        let (small, phys) = compact(c);
        if small.n_qubits > MAX_SAMPLER_QUBITS {
            return Err(SimError::TooWide {
                width: small.n_qubits,
                limit: MAX_SAMPLER_QUBITS,
            });
        }
        let measured = small.measured_qubits();
        let readout = measured.iter().map(|&q| cal.pro(phys[q])).collect();
        let circuit = small.without_measurements();
        let mut locations = Vec::new();
        for (i, g) in circuit.gates.iter().enumerate() {
            let (support, p) = match g.class() {
                GateClass::TwoQubit => {
                    (Support::Two, cal.p2q(phys[g.qubits[0]], phys[g.qubits[1]]))
                }
                GateClass::PhysicalOneQubit => (Support::One, cal.p1q(phys[g.qubits[0]])),
                _ => continue,
            };
            if p > 0.0 {
                locations.push(Location {
                    gate: i,
                    support,
                    p,
                });
            }
        }
        let stride = circuit.gates.len().div_ceil(CHECKPOINTS).max(1);
        let mut checkpoints = Vec::new();
        let mut s = StateVector::zero(circuit.n_qubits);
        for (i, g) in circuit.gates.iter().enumerate() {
            if i % stride == 0 {
                checkpoints.push((i, s.clone()));
            }
            s.apply(g);
        }
        if checkpoints.is_empty() {
            checkpoints.push((0, s.clone()));
        }
        let ideal_cdf = cdf(&s.probabilities());
        Ok(NoisySampler {
            circuit,
            measured,
            locations,
            readout,
            ideal_cdf,
            checkpoints,
        })
    }

    pub fn n_measured(&self) -> usize {
        self.measured.len()
    }

    fn shot(&self, seed: u64, shot: u64) -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        let mut errors: Vec<(usize, Option<Pauli>, Option<Pauli>)> = Vec::new();
        for loc in &self.locations {
            if rng.random::<f64>() < loc.p {
                match loc.support {
                    Support::One => {
                        let k = rng.random_range(1..4);
                        errors.push((loc.gate, PAULIS[k], None));
                    }
                    Support::Two => {
                        let k = rng.random_range(1..16);
                        errors.push((loc.gate, PAULIS[k / 4], PAULIS[k % 4]));
                    }
                }
            }
        }
        let u = rng.random::<f64>();
        let idx = if errors.is_empty() {
            draw(&self.ideal_cdf, u)
        } else {
            let first = errors[0].0;
            let cp = self.checkpoints.partition_point(|(i, _)| *i <= first) - 1;
            let (start, ref state) = self.checkpoints[cp];
            let mut s = state.clone();
            let mut next = 0;
            for (i, g) in self.circuit.gates.iter().enumerate().skip(start) {
                s.apply(g);
                while next < errors.len() && errors[next].0 == i {
                    let (pa, pb) = (errors[next].1, errors[next].2);
                    if let Some(p) = pa {
                        s.apply_pauli(p, g.qubits[0]);
                    }
                    if let Some(p) = pb {
                        s.apply_pauli(p, g.qubits[1]);
                    }
                    next += 1;
                }
            }
            draw(&cdf(&s.probabilities()), u)
        };
        let mut bits: Vec<u8> = bitstring(idx, &self.measured).into_bytes();
        for (b, &p) in bits.iter_mut().zip(&self.readout) {
            if p > 0.0 && rng.random::<f64>() < p {
                *b = if *b == b'0' { b'1' } else { b'0' };
            }
        }
        String::from_utf8(bits).expect("ascii bits")
    }

    /// Counts for the shots with indices in `shots`.
    pub fn sample_range(&self, shots: Range<u64>, seed: u64) -> Counts {
        let mut out = Counts::default();
        for shot in shots {
            out.record(&self.shot(seed, shot));
        }
        out
    }
}

/// Samples `shots` noisy executions of a physical circuit.
pub fn noisy_sample(
    c: &Circuit,
    cal: &CalibrationModel,
    shots: u64,
    seed: u64,
) -> Result<Counts, SimError> {
    Ok(NoisySampler::new(c, cal)?.sample_range(0..shots, seed))
}
