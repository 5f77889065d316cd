//! Calibration data and the analytic fidelity engine.

mod fidelity;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use fidelity::{
    per_edge_log10, per_edge_prediction, phase_fidelity, phase_percentages, readout_penalty,
    t2_penalty, timing, total_fidelity, FidelityBreakdown, FinalMetrics, ModelConfig, ModelMode,
    QubitBusy, T2Source, TimingBreakdown,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NoiseError {
    #[error("{name} = {value} is not a probability in [0, 1)")]
    BadProbability { name: &'static str, value: f64 },
    #[error("{name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("edge ({0}, {1}) has no calibration entry")]
    UncalibratedEdge(usize, usize),
}

/// Median hardware rates and durations. Times are in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p2q: f64,
    pub p1q: f64,
    pub pro: f64,
    pub tau2q: f64,
    pub tau1q: f64,
    pub t2: f64,
}

impl NoiseParams {
    /// Superconducting heavy-hex class device.
    pub const IBM_HERON: NoiseParams = NoiseParams {
        p2q: 3e-3,
        p1q: 3e-4,
        pro: 1.6e-2,
        tau2q: 68e-9,
        tau1q: 32e-9,
        t2: 79e-6,
    };

    /// Trapped-ion all-to-all class device. T2 is an operational estimate.
    pub const IONQ_FORTE: NoiseParams = NoiseParams {
        p2q: 4e-3,
        p1q: 2e-4,
        pro: 7e-3,
        tau2q: 600e-6,
        tau1q: 10e-6,
        t2: 0.2,
    };

    /// Error-free rates with the given durations.
    pub fn noiseless(&self) -> NoiseParams {
        NoiseParams {
            p2q: 0.0,
            p1q: 0.0,
            pro: 0.0,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        check_prob("p2q", self.p2q)?;
        check_prob("p1q", self.p1q)?;
        check_prob("pro", self.pro)?;
        check_pos("tau2q", self.tau2q)?;
        check_pos("tau1q", self.tau1q)?;
        check_pos("t2", self.t2)
    }
}

fn check_prob(name: &'static str, value: f64) -> Result<(), NoiseError> {
    if (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(NoiseError::BadProbability { name, value })
    }
}

/// Like [`check_prob`] but admits 1, which the sampler accepts as saturation.
fn check_prob_closed(name: &'static str, value: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(NoiseError::BadProbability { name, value })
    }
}

fn check_pos(name: &'static str, value: f64) -> Result<(), NoiseError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(NoiseError::NonPositive { name, value })
    }
}

/// Per-qubit calibration entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    pub p1q: f64,
    pub pro: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    pub t2: f64,
}

/// Per-edge and per-qubit rates with median fallbacks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CalibrationFile", into = "CalibrationFile")]
pub struct CalibrationModel {
    pub medians: NoiseParams,
    /// Keyed by `(min, max)` of the edge endpoints.
    pub edges: BTreeMap<(usize, usize), f64>,
    pub qubits: BTreeMap<usize, QubitCalibration>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CalibrationModel {
    /// Uniform model: every lookup returns the medians.
    pub fn uniform(medians: NoiseParams) -> CalibrationModel {
        CalibrationModel {
            medians,
            edges: BTreeMap::new(),
            qubits: BTreeMap::new(),
        }
    }

    pub fn p2q(&self, a: usize, b: usize) -> f64 {
        self.edges
            .get(&key(a, b))
            .copied()
            .unwrap_or(self.medians.p2q)
    }

    pub fn p1q(&self, q: usize) -> f64 {
        self.qubits.get(&q).map_or(self.medians.p1q, |c| c.p1q)
    }

    pub fn pro(&self, q: usize) -> f64 {
        self.qubits.get(&q).map_or(self.medians.pro, |c| c.pro)
    }

    pub fn t2(&self, q: usize) -> f64 {
        self.qubits.get(&q).map_or(self.medians.t2, |c| c.t2)
    }

    pub fn set_p2q(&mut self, a: usize, b: usize, p: f64) {
        self.edges.insert(key(a, b), p);
    }

    /// Strict lookup used where a missing edge is a contract violation.
    pub fn edge_p2q(&self, a: usize, b: usize) -> Result<f64, NoiseError> {
        self.edges
            .get(&key(a, b))
            .copied()
            .ok_or(NoiseError::UncalibratedEdge(a.min(b), a.max(b)))
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        self.medians.validate()?;
        for &p in self.edges.values() {
            check_prob_closed("edge p2q", p)?;
        }
        for c in self.qubits.values() {
            check_prob_closed("qubit p1q", c.p1q)?;
            check_prob_closed("qubit pro", c.pro)?;
            check_pos("qubit t2", c.t2)?;
        }
        Ok(())
    }

    /// Same calibration with every error probability multiplied by `scale`
    /// (capped at 1).
    pub fn scaled(&self, scale: f64) -> CalibrationModel {
        let s = |p: f64| (p * scale).min(1.0);
        CalibrationModel {
            medians: NoiseParams {
                p2q: s(self.medians.p2q).min(0.999_999),
                p1q: s(self.medians.p1q).min(0.999_999),
                pro: s(self.medians.pro).min(0.999_999),
                ..self.medians
            },
            edges: self.edges.iter().map(|(&k, &p)| (k, s(p))).collect(),
            qubits: self
                .qubits
                .iter()
                .map(|(&q, c)| {
                    (
                        q,
                        QubitCalibration {
                            p1q: s(c.p1q),
                            pro: s(c.pro),
                            ..*c
                        },
                    )
                })
                .collect(),
        }
    }

    /// Seeded heterogeneous calibration over `edges`: each 2Q error is drawn
    /// log-uniformly between `median/spread` and `median·spread`.
    pub fn synthetic(
        medians: NoiseParams,
        edges: &[(usize, usize)],
        n_qubits: usize,
        spread: f64,
        seed: u64,
    ) -> CalibrationModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ln_s = libm::log(spread.max(1.0));
        let mut draw = |m: f64| m * libm::exp(ln_s * (2.0 * rng.random::<f64>() - 1.0));
        let mut cal = CalibrationModel::uniform(medians);
        let mut sorted: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| key(a, b)).collect();
        sorted.sort_unstable();
        sorted.dedup();
        for (a, b) in sorted {
            let p = draw(medians.p2q);
            cal.edges.insert((a, b), p);
        }
        for q in 0..n_qubits {
            let c = QubitCalibration {
                p1q: draw(medians.p1q),
                pro: draw(medians.pro),
                t1: None,
                t2: draw(medians.t2),
            };
            cal.qubits.insert(q, c);
        }
        cal
    }
}

/// Calibration JSON layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub qubits: Vec<QubitEntry>,
    pub medians: NoiseParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub a: usize,
    pub b: usize,
    pub p2q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitEntry {
    pub q: usize,
    pub p1q: f64,
    pub pro: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    pub t2: f64,
}

impl TryFrom<CalibrationFile> for CalibrationModel {
    type Error = NoiseError;

    fn try_from(f: CalibrationFile) -> Result<Self, Self::Error> {
        let mut cal = CalibrationModel::uniform(f.medians);
        for e in f.edges {
            cal.edges.insert(key(e.a, e.b), e.p2q);
        }
        for q in f.qubits {
            cal.qubits.insert(
                q.q,
                QubitCalibration {
                    p1q: q.p1q,
                    pro: q.pro,
                    t1: q.t1,
                    t2: q.t2,
                },
            );
        }
        cal.validate()?;
        Ok(cal)
    }
}

impl From<CalibrationModel> for CalibrationFile {
    fn from(c: CalibrationModel) -> Self {
        CalibrationFile {
            edges: c
                .edges
                .iter()
                .map(|(&(a, b), &p2q)| EdgeEntry { a, b, p2q })
                .collect(),
            qubits: c
                .qubits
                .iter()
                .map(|(&q, e)| QubitEntry {
                    q,
                    p1q: e.p1q,
                    pro: e.pro,
                    t1: e.t1,
                    t2: e.t2,
                })
                .collect(),
            medians: c.medians,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_valid() {
        NoiseParams::IBM_HERON.validate().unwrap();
        NoiseParams::IONQ_FORTE.validate().unwrap();
        let bad = NoiseParams {
            p2q: 1.0,
            ..NoiseParams::IBM_HERON
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn lookups_fall_back_to_medians() {
        let mut cal = CalibrationModel::uniform(NoiseParams::IBM_HERON);
        assert_eq!(cal.p2q(3, 4), 3e-3);
        cal.set_p2q(4, 3, 0.02);
        assert_eq!(cal.p2q(3, 4), 0.02);
        assert_eq!(cal.edge_p2q(3, 4), Ok(0.02));
        assert!(cal.edge_p2q(0, 1).is_err());
        assert_eq!(cal.pro(7), 1.6e-2);
    }

    #[test]
    fn synthetic_is_seeded_and_bounded() {
        let edges = [(0, 1), (1, 2), (2, 3)];
        let a = CalibrationModel::synthetic(NoiseParams::IBM_HERON, &edges, 4, 2.0, 7);
        let b = CalibrationModel::synthetic(NoiseParams::IBM_HERON, &edges, 4, 2.0, 7);
        assert_eq!(a, b);
        for &p in a.edges.values() {
            assert!((1.5e-3..=6e-3).contains(&p));
        }
    }
}
