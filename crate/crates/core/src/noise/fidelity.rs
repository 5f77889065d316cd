use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LOG10_E;

use serde::{Deserialize, Serialize};

use super::{CalibrationModel, NoiseError, NoiseParams};
use crate::circuit::{count_gates, depth, Circuit, DepthMetrics, GateClass, GateCounts, GateKind};
use crate::costing::StageDelta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelMode {
    /// Uniform median rates; used for stage attribution.
    Attribution,
    /// Per-edge rates; used to predict sampled or measured outcomes.
    Validation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T2Source {
    Scalar,
    PerQubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub mode: ModelMode,
    pub include_t2_idle: bool,
    pub t2_source: T2Source,
}

impl ModelConfig {
    pub const ATTRIBUTION: ModelConfig = ModelConfig {
        mode: ModelMode::Attribution,
        include_t2_idle: true,
        t2_source: T2Source::Scalar,
    };

    /// Matches the Monte Carlo sampler, which does not sample idle dephasing.
    pub const VALIDATION: ModelConfig = ModelConfig {
        mode: ModelMode::Validation,
        include_t2_idle: false,
        t2_source: T2Source::PerQubit,
    };
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::ATTRIBUTION
    }
}

/// Decades contributed by one stage's gate-count changes.
pub fn phase_fidelity(delta: &StageDelta, p: &NoiseParams) -> f64 {
    // `+ 0.0` turns a -0.0 from an empty delta into 0.0.
    delta.d_n2q as f64 * libm::log10(1.0 - p.p2q)
        + delta.d_n1q_phys as f64 * libm::log10(1.0 - p.p1q)
        + 0.0
}

pub fn readout_penalty(n_measured: usize, pro: f64) -> f64 {
    n_measured as f64 * libm::log10(1.0 - pro)
}

/// Wall time, busy qubit-time and idle qubit-time, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingBreakdown {
    pub t_circuit: f64,
    pub t_active: f64,
    pub t_idle: f64,
    /// Set when `n_qubits·t_circuit < t_active` and `t_idle` was clamped to 0.
    pub clamped: bool,
}

pub fn timing(
    counts: &GateCounts,
    depth: &DepthMetrics,
    n_qubits: usize,
    p: &NoiseParams,
) -> TimingBreakdown {
    let t_circuit = depth.d_2q as f64 * p.tau2q + depth.d_1q as f64 * p.tau1q;
    let t_active = counts.n_2q as f64 * p.tau2q * 2.0 + counts.n_1q_phys as f64 * p.tau1q;
    let raw = n_qubits as f64 * t_circuit - t_active;
    // Relative slack so that exactly-busy circuits do not trip the flag on rounding.
    let slack = 1e-12 * t_active.max(n_qubits as f64 * t_circuit);
    let clamped = raw < -slack;
    TimingBreakdown {
        t_circuit,
        t_active,
        t_idle: if raw > 0.0 { raw } else { 0.0 },
        clamped,
    }
}

pub fn t2_penalty(t: &TimingBreakdown, t2: f64) -> f64 {
    -(t.t_idle / t2) * LOG10_E
}

/// Gate occupancy of one qubit in the final circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitBusy {
    pub qubit: usize,
    pub n_2q: usize,
    pub n_1q_phys: usize,
}

/// Metrics of the final (routed) circuit consumed by the fidelity engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub counts: GateCounts,
    pub depth: DepthMetrics,
    /// Qubits charged for idle time.
    pub qubits: Vec<usize>,
    pub measured: Vec<usize>,
    pub busy: Vec<QubitBusy>,
}

impl FinalMetrics {
    /// Metrics with idle time charged to `qubits`.
    pub fn with_qubits(c: &Circuit, qubits: &[usize]) -> FinalMetrics {
        let mut n2 = vec![0usize; c.n_qubits];
        let mut n1 = vec![0usize; c.n_qubits];
        for g in &c.gates {
            match g.class() {
                GateClass::TwoQubit => g.qubits.iter().for_each(|&q| n2[q] += 1),
                GateClass::PhysicalOneQubit => n1[g.qubits[0]] += 1,
                _ => {}
            }
        }
        FinalMetrics {
            counts: count_gates(c),
            depth: depth(c),
            qubits: qubits.to_vec(),
            measured: c.measured_qubits(),
            busy: qubits
                .iter()
                .map(|&q| QubitBusy {
                    qubit: q,
                    n_2q: n2[q],
                    n_1q_phys: n1[q],
                })
                .collect(),
        }
    }

    /// Metrics with idle time charged to every qubit the circuit touches.
    pub fn of(c: &Circuit) -> FinalMetrics {
        FinalMetrics::with_qubits(c, &c.active_qubits())
    }

    pub fn timing(&self, p: &NoiseParams) -> TimingBreakdown {
        timing(&self.counts, &self.depth, self.qubits.len(), p)
    }

    /// Per-qubit idle times `t_circuit − busy_q`, clamped at 0.
    pub fn idle_per_qubit(&self, p: &NoiseParams) -> Vec<(usize, f64)> {
        let t_circuit = self.timing(p).t_circuit;
        self.busy
            .iter()
            .map(|b| {
                let busy = b.n_2q as f64 * p.tau2q + b.n_1q_phys as f64 * p.tau1q;
                (b.qubit, (t_circuit - busy).max(0.0))
            })
            .collect()
    }
}

/// Stage attribution plus compiler-agnostic terms, all in decades.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FidelityBreakdown {
    pub df_h: f64,
    pub df_b: f64,
    pub df_r: f64,
    pub df_hb: f64,
    pub df_hbr: f64,
    pub df_readout: f64,
    pub df_t2: f64,
    pub total: f64,
    pub pct_h: f64,
    pub pct_b: f64,
    pub pct_r: f64,
    pub timing: TimingBreakdown,
}

/// Stage shares `|ΔF_X| / (|ΔF_H| + |ΔF_B| + |ΔF_R|)` in percent; all zero
/// when no stage contributes.
pub fn phase_percentages(df_h: f64, df_b: f64, df_r: f64) -> (f64, f64, f64) {
    let denom = df_h.abs() + df_b.abs() + df_r.abs();
    if denom == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    (
        100.0 * df_h.abs() / denom,
        100.0 * df_b.abs() / denom,
        100.0 * df_r.abs() / denom,
    )
}

/// Total decades from the three stage deltas and the final circuit.
///
/// Stage terms always use the median rates (the H-stage term is a counting
/// proxy); `cal` contributes per-qubit T2 values when `cfg.t2_source` asks
/// for them.
pub fn total_fidelity(
    deltas: &[StageDelta; 3],
    fin: &FinalMetrics,
    cfg: &ModelConfig,
    cal: &CalibrationModel,
) -> FidelityBreakdown {
    let p = &cal.medians;
    let df_h = phase_fidelity(&deltas[0], p);
    let df_b = phase_fidelity(&deltas[1], p);
    let df_r = phase_fidelity(&deltas[2], p);
    let df_readout = readout_penalty(fin.measured.len(), p.pro);
    let timing = fin.timing(p);
    let df_t2 = if !cfg.include_t2_idle {
        0.0
    } else {
        match cfg.t2_source {
            T2Source::Scalar => t2_penalty(&timing, p.t2),
            T2Source::PerQubit => fin
                .idle_per_qubit(p)
                .iter()
                .map(|&(q, idle)| -(idle / cal.t2(q)) * LOG10_E)
                .sum(),
        }
    };
    let (pct_h, pct_b, pct_r) = phase_percentages(df_h, df_b, df_r);
    let df_hb = df_h + df_b;
    let df_hbr = df_hb + df_r;
    FidelityBreakdown {
        df_h,
        df_b,
        df_r,
        df_hb,
        df_hbr,
        df_readout,
        df_t2,
        total: df_hbr + df_readout + df_t2,
        pct_h,
        pct_b,
        pct_r,
        timing,
    }
}

/// Per-edge predicted fidelity of a routed circuit, in decades.
///
/// Every 2Q gate must sit on a calibrated edge unless the calibration has
/// no per-edge entries at all, in which case the median applies.
pub fn per_edge_log10(
    c: &Circuit,
    cal: &CalibrationModel,
    cfg: &ModelConfig,
) -> Result<f64, NoiseError> {
    let strict = !cal.edges.is_empty();
    let mut acc = 0.0;
    for g in &c.gates {
        match g.class() {
            GateClass::TwoQubit => {
                let (a, b) = (g.qubits[0], g.qubits[1]);
                let p = if strict {
                    cal.edge_p2q(a, b)?
                } else {
                    cal.p2q(a, b)
                };
                let cost = if g.kind == GateKind::Swap { 3.0 } else { 1.0 };
                acc += cost * libm::log10(1.0 - p);
            }
            GateClass::PhysicalOneQubit => acc += libm::log10(1.0 - cal.p1q(g.qubits[0])),
            GateClass::Measure => acc += libm::log10(1.0 - cal.pro(g.qubits[0])),
            _ => {}
        }
    }
    if cfg.include_t2_idle {
        let fin = FinalMetrics::of(c);
        for (q, idle) in fin.idle_per_qubit(&cal.medians) {
            let t2 = match cfg.t2_source {
                T2Source::Scalar => cal.medians.t2,
                T2Source::PerQubit => cal.t2(q),
            };
            acc -= idle / t2 * LOG10_E;
        }
    }
    Ok(acc)
}

/// Linear per-edge predicted fidelity in [0, 1].
pub fn per_edge_prediction(
    c: &Circuit,
    cal: &CalibrationModel,
    cfg: &ModelConfig,
) -> Result<f64, NoiseError> {
    Ok(libm::pow(10.0, per_edge_log10(c, cal, cfg)?))
}
