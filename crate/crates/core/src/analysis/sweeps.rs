//! Analyses that drive the compilation pipeline.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{
    binomial_sigma, bootstrap_sigma, hellinger_fidelity, seed_stats, success_probability,
    AnalysisError, Measured, SeedStats, VariantResult, BOOTSTRAP_RESAMPLES,
};
use crate::benchmarks::{expected_bitstring, generate, BenchmarkSpec};
use crate::circuit::{Circuit, GateClass};
use crate::compiler::{compile, run_pipeline, CouplingGraph, PipelineConfig, PipelineRun};
use crate::noise::{per_edge_prediction, total_fidelity, CalibrationModel, ModelConfig};
use crate::sim::{ideal_distribution, noisy_sample, Counts};

/// A labelled compilation configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub id: String,
    pub config: PipelineConfig,
}

impl VariantResult {
    /// Attribution-mode breakdown of a finished run.
    pub fn from_run(variant_id: &str, run: &PipelineRun, cal: &CalibrationModel) -> VariantResult {
        VariantResult {
            variant_id: variant_id.into(),
            breakdown: total_fidelity(
                &run.deltas(),
                &run.final_metrics(),
                &ModelConfig::ATTRIBUTION,
                cal,
            ),
            snapshots: run.snapshots.clone(),
            f_pred: None,
            measured: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffPoint {
    pub n: usize,
    /// Total decades; `None` marks a gap.
    pub total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
}

impl CliffPoint {
    pub fn gap(n: usize, reason: String) -> CliffPoint {
        CliffPoint {
            n,
            total: None,
            gap: Some(reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffProjection {
    pub threshold: f64,
    pub points: Vec<CliffPoint>,
    pub first_crossing: Option<usize>,
}

impl CliffProjection {
    pub fn from_points(mut points: Vec<CliffPoint>, threshold: f64) -> CliffProjection {
        points.sort_by_key(|p| p.n);
        CliffProjection {
            threshold,
            first_crossing: first_crossing(&points, threshold),
            points,
        }
    }
}

/// Smallest n whose total falls below `threshold`.
pub fn first_crossing(points: &[CliffPoint], threshold: f64) -> Option<usize> {
    points
        .iter()
        .filter(|p| p.total.is_some_and(|t| t < threshold))
        .map(|p| p.n)
        .min()
}

/// Total attribution-mode decades of the benchmark at width `n`.
pub fn cliff_point(
    template: &BenchmarkSpec,
    cfg: &PipelineConfig,
    graph: &CouplingGraph,
    cal: &CalibrationModel,
    n: usize,
) -> CliffPoint {
    let spec = BenchmarkSpec {
        n,
        ..template.clone()
    };
    match run_pipeline(&spec, cfg, graph) {
        Ok(run) => CliffPoint {
            n,
            total: Some(VariantResult::from_run("", &run, cal).breakdown.total),
            gap: None,
        },
        Err(e) => CliffPoint::gap(n, e.to_string()),
    }
}

pub fn cliff_projection<I>(
    template: &BenchmarkSpec,
    cfg: &PipelineConfig,
    graph: &CouplingGraph,
    cal: &CalibrationModel,
    ns: I,
    threshold: f64,
) -> CliffProjection
where
    I: IntoIterator<Item = usize>,
{
    let points = ns
        .into_iter()
        .map(|n| cliff_point(template, cfg, graph, cal, n))
        .collect();
    CliffProjection::from_points(points, threshold)
}

/// The 25 router seeds 16, 18, …, 64.
pub fn router_seeds() -> Vec<u64> {
    (16..=64).step_by(2).collect()
}

/// H+B+R decades of every variant under every router seed.
pub fn seed_variance(
    spec: &BenchmarkSpec,
    variants: &[Variant],
    graph: &CouplingGraph,
    cal: &CalibrationModel,
    seeds: &[u64],
) -> Result<SeedStats, AnalysisError> {
    let input = generate(spec)?;
    let mut per_variant = Vec::with_capacity(variants.len());
    for v in variants {
        let mut totals = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let mut cfg = v.config.clone();
            cfg.router.seed = seed;
            let run = compile(&input, &cfg, graph)?;
            totals.push(VariantResult::from_run(&v.id, &run, cal).breakdown.df_hbr);
        }
        per_variant.push((v.id.clone(), totals));
    }
    seed_stats(seeds, per_variant)
}

/// How sampled outcomes of a benchmark are scored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Score {
    /// Fraction of shots on the correct bitstring.
    Success(String),
    /// Hellinger fidelity against the ideal output distribution.
    Hellinger(BTreeMap<String, f64>),
}

impl Score {
    pub fn measure(&self, counts: &Counts, bootstrap_seed: u64) -> Result<Measured, AnalysisError> {
        match self {
            Score::Success(target) => {
                let value = success_probability(counts, target)?;
                Ok(Measured {
                    value,
                    sigma: binomial_sigma(value, counts.shots),
                })
            }
            Score::Hellinger(ideal) => {
                let value = hellinger_fidelity(&counts.distribution(), ideal)?;
                let sigma = bootstrap_sigma(counts, ideal, BOOTSTRAP_RESAMPLES, bootstrap_seed)?;
                Ok(Measured { value, sigma })
            }
        }
    }
}

pub fn reference_score(spec: &BenchmarkSpec, input: &Circuit) -> Result<Score, AnalysisError> {
    if spec.algorithm.has_point_output() {
        if let Some(t) = expected_bitstring(spec) {
            return Ok(Score::Success(t));
        }
    }
    Ok(Score::Hellinger(ideal_distribution(input)?))
}

/// Per-edge predicted fidelity and sampled score of a compiled circuit.
pub fn evaluate_variant(
    run: &PipelineRun,
    cal: &CalibrationModel,
    score: &Score,
    shots: u64,
    seed: u64,
) -> Result<(f64, Measured), AnalysisError> {
    let c = run.final_circuit();
    let f_pred = per_edge_prediction(c, cal, &ModelConfig::VALIDATION)?;
    let counts = noisy_sample(c, cal, shots, seed)?;
    Ok((f_pred, score.measure(&counts, seed)?))
}

/// Coupling edges used by two-qubit gates.
pub fn touched_edges(c: &Circuit) -> BTreeSet<(usize, usize)> {
    c.gates
        .iter()
        .filter(|g| g.class() == GateClass::TwoQubit)
        .map(|g| (g.qubits[0].min(g.qubits[1]), g.qubits[0].max(g.qubits[1])))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub variant_id: String,
    pub f_before: f64,
    pub f_after: f64,
    /// Relative change in percent.
    pub delta_pct: f64,
    pub touches_perturbed: bool,
}

/// Change in per-edge predicted fidelity of `c` between two calibrations.
pub fn sensitivity(
    variant_id: &str,
    c: &Circuit,
    before: &CalibrationModel,
    after: &CalibrationModel,
) -> Result<SensitivityRow, AnalysisError> {
    let changed: BTreeSet<(usize, usize)> =
        super::changed_edges(before, after).into_iter().collect();
    let f_before = per_edge_prediction(c, before, &ModelConfig::VALIDATION)?;
    let f_after = per_edge_prediction(c, after, &ModelConfig::VALIDATION)?;
    if f_before <= 0.0 {
        return Err(AnalysisError::InvalidParameter("zero baseline fidelity"));
    }
    Ok(SensitivityRow {
        variant_id: variant_id.into(),
        f_before,
        f_after,
        delta_pct: 100.0 * (f_after - f_before) / f_before,
        touches_perturbed: touched_edges(c).iter().any(|e| changed.contains(e)),
    })
}

/// Label for a gap caused by a sweep-level limit rather than a failure.
pub fn budget_gap(n: usize, seconds: u64) -> CliffPoint {
    CliffPoint::gap(n, format!("skipped: time budget of {seconds} s exceeded"))
}
