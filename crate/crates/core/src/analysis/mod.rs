//! Result surfaces: attribution tables, routing amplification, seed
//! statistics, calibration perturbation and rank agreement.

mod sweeps;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{Algorithm, BenchmarkError};
use crate::compiler::{CompileError, StageSnapshot};
use crate::noise::{phase_percentages, CalibrationModel, FidelityBreakdown, NoiseError};
use crate::sim::{Counts, SimError};

pub use sweeps::{
    budget_gap, cliff_point, cliff_projection, evaluate_variant, first_crossing, reference_score,
    router_seeds, seed_variance, sensitivity, touched_edges, CliffPoint, CliffProjection, Score,
    SensitivityRow, Variant,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("amplification factor undefined: pre-routing gap is zero")]
    UndefinedRho,
    #[error("need at least {0} samples")]
    TooFewSamples(usize),
    #[error("correlation undefined: zero variance")]
    ZeroVariance,
    #[error("lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("distribution sums to {0}, not 1")]
    Unnormalized(f64),
    #[error("target has {target} bits but counts have {counts}")]
    WidthMismatch { target: usize, counts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("predicted and measured variant sets differ")]
    VariantMismatch,
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
}

/// A success metric with its shot-noise uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

/// One compilation variant's outcome on one circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub variant_id: String,
    pub breakdown: FidelityBreakdown,
    pub snapshots: Vec<StageSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_pred: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<Measured>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributionRow {
    pub variant_id: String,
    pub df_h: f64,
    pub df_b: f64,
    pub df_hb: f64,
    pub df_r: f64,
    pub pct_h: f64,
    pub pct_b: f64,
    pub pct_r: f64,
    /// H/B split depends on where a toolchain draws the stage boundary, so
    /// H% and B% are not comparable across variants.
    pub boundary_sensitive: bool,
}

/// Algorithms whose H/B split is not comparable across toolchains.
pub fn is_boundary_sensitive(alg: Algorithm) -> bool {
    matches!(alg, Algorithm::Qdrift | Algorithm::Trotter)
}

pub fn attribution_row(
    variant_id: &str,
    b: &FidelityBreakdown,
    boundary_sensitive: bool,
) -> AttributionRow {
    let (pct_h, pct_b, pct_r) = phase_percentages(b.df_h, b.df_b, b.df_r);
    AttributionRow {
        variant_id: variant_id.into(),
        df_h: b.df_h,
        df_b: b.df_b,
        df_hb: b.df_h + b.df_b,
        df_r: b.df_r,
        pct_h,
        pct_b,
        pct_r,
        boundary_sensitive,
    }
}

pub fn attribution_table(alg: Algorithm, results: &[VariantResult]) -> Vec<AttributionRow> {
    let flag = is_boundary_sensitive(alg);
    results
        .iter()
        .map(|r| attribution_row(&r.variant_id, &r.breakdown, flag))
        .collect()
}

/// Routing amplification `ρ = |ΔF_HBR(a) − ΔF_HBR(b)| / |ΔF_HB(a) − ΔF_HB(b)|`.
pub fn amplification_factor(
    a: &FidelityBreakdown,
    b: &FidelityBreakdown,
) -> Result<f64, AnalysisError> {
    let hb = |x: &FidelityBreakdown| x.df_h + x.df_b;
    let denom = (hb(a) - hb(b)).abs();
    if denom <= 1e-12 {
        return Err(AnalysisError::UndefinedRho);
    }
    Ok((hb(a) + a.df_r - hb(b) - b.df_r).abs() / denom)
}

/// A winning gap counts only if it exceeds half a decade and twice the noise.
pub fn is_significant(gap: f64, sigma: f64) -> bool {
    gap > 0.5 && gap > 2.0 * sigma
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    // Shifted by the first sample so identical inputs give exactly zero.
    let shifted: Vec<f64> = xs.iter().map(|x| x - xs[0]).collect();
    let m = mean(&shifted);
    let ss: f64 = shifted.iter().map(|x| (x - m) * (x - m)).sum();
    libm::sqrt(ss / (xs.len() - 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSeedStats {
    pub variant_id: String,
    /// H+B+R decades per seed, in seed order.
    pub totals: Vec<f64>,
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedStats {
    pub seeds: Vec<u64>,
    pub variants: Vec<VariantSeedStats>,
    /// Highest mean; ties broken by variant id.
    pub leader: String,
    /// The leader if its margin is significant, otherwise `None` (a tie).
    pub winner: Option<String>,
    /// Leader mean minus runner-up mean, in decades.
    pub gap: f64,
    /// Root-sum-square of the two leading variants' σ.
    pub sigma: f64,
    pub significant: bool,
}

/// Aggregates per-seed totals for each variant.
pub fn seed_stats(
    seeds: &[u64],
    per_variant: Vec<(String, Vec<f64>)>,
) -> Result<SeedStats, AnalysisError> {
    if seeds.len() < 2 {
        return Err(AnalysisError::TooFewSamples(2));
    }
    if per_variant.is_empty() {
        return Err(AnalysisError::InvalidParameter("no variants"));
    }
    let mut variants = Vec::with_capacity(per_variant.len());
    for (id, totals) in per_variant {
        if totals.len() != seeds.len() {
            return Err(AnalysisError::LengthMismatch(totals.len(), seeds.len()));
        }
        variants.push(VariantSeedStats {
            variant_id: id,
            mean: mean(&totals),
            sigma: std_dev(&totals),
            totals,
        });
    }
    let mut order: Vec<&VariantSeedStats> = variants.iter().collect();
    order.sort_by(|a, b| {
        b.mean
            .partial_cmp(&a.mean)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.variant_id.cmp(&b.variant_id))
    });
    let leader = order[0];
    let (gap, sigma) = match order.get(1) {
        Some(second) => (
            leader.mean - second.mean,
            libm::sqrt(leader.sigma * leader.sigma + second.sigma * second.sigma),
        ),
        None => (0.0, leader.sigma),
    };
    let significant = order.len() > 1 && is_significant(gap, sigma);
    let leader_id = leader.variant_id.clone();
    Ok(SeedStats {
        seeds: seeds.to_vec(),
        winner: significant.then(|| leader_id.clone()),
        leader: leader_id,
        gap,
        sigma,
        significant,
        variants,
    })
}

/// Number of edges a fraction selects, rounding up but tolerating
/// floating-point noise just above an integer.
pub fn worst_edge_count(n_edges: usize, worst_fraction: f64) -> usize {
    let x = worst_fraction * n_edges as f64;
    let floor = libm::floor(x);
    let k = if x - floor <= 1e-9 * x.max(1.0) {
        floor
    } else {
        libm::ceil(x)
    };
    (k as usize).min(n_edges)
}

/// Raises the 2Q error of the worst `worst_fraction` of calibrated edges by
/// `factor` (0.2 = +20%), capped at 1. Ties in error rate break by edge.
pub fn perturb_calibration(
    cal: &CalibrationModel,
    worst_fraction: f64,
    factor: f64,
) -> Result<CalibrationModel, AnalysisError> {
    if !(worst_fraction > 0.0 && worst_fraction <= 1.0) {
        return Err(AnalysisError::InvalidParameter(
            "worst_fraction must be in (0, 1]",
        ));
    }
    if !factor.is_finite() || factor < 0.0 {
        return Err(AnalysisError::InvalidParameter(
            "factor must be non-negative",
        ));
    }
    let mut ranked: Vec<((usize, usize), f64)> = cal.edges.iter().map(|(&e, &p)| (e, p)).collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    let k = worst_edge_count(ranked.len(), worst_fraction);
    let mut out = cal.clone();
    if factor == 0.0 {
        return Ok(out);
    }
    for &((a, b), p) in &ranked[..k] {
        out.edges.insert((a, b), (p * (1.0 + factor)).min(1.0));
    }
    Ok(out)
}

/// Edges whose 2Q error differs between two calibrations.
pub fn changed_edges(before: &CalibrationModel, after: &CalibrationModel) -> Vec<(usize, usize)> {
    after
        .edges
        .iter()
        .filter(|(e, p)| before.edges.get(e) != Some(p))
        .map(|(&e, _)| e)
        .collect()
}

/// Fraction of shots on `target`.
pub fn success_probability(counts: &Counts, target: &str) -> Result<f64, AnalysisError> {
    if counts.shots == 0 {
        return Err(AnalysisError::InvalidParameter("no shots"));
    }
    if let Some(k) = counts.counts.keys().next() {
        if k.len() != target.len() {
            return Err(AnalysisError::WidthMismatch {
                target: target.len(),
                counts: k.len(),
            });
        }
    }
    Ok(counts.get(target) as f64 / counts.shots as f64)
}

const NORM_TOL: f64 = 1e-6;

fn check_normalized(p: &BTreeMap<String, f64>) -> Result<(), AnalysisError> {
    let s: f64 = p.values().sum();
    if (s - 1.0).abs() > NORM_TOL || p.values().any(|&x| x < -NORM_TOL) {
        return Err(AnalysisError::Unnormalized(s));
    }
    Ok(())
}

/// `(Σ √(p_i q_i))²` over the union of outcomes.
pub fn hellinger_fidelity(
    p: &BTreeMap<String, f64>,
    q: &BTreeMap<String, f64>,
) -> Result<f64, AnalysisError> {
    check_normalized(p)?;
    check_normalized(q)?;
    let bc: f64 = p
        .iter()
        .filter_map(|(k, &pk)| q.get(k).map(|&qk| libm::sqrt(pk.max(0.0) * qk.max(0.0))))
        .sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}

/// Binomial shot-noise σ of a success probability.
pub fn binomial_sigma(p: f64, shots: u64) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    libm::sqrt((p * (1.0 - p)).max(0.0) / shots as f64)
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Bootstrap σ of the Hellinger fidelity between `counts` and `ideal`,
/// resampling the observed shots with replacement.
pub fn bootstrap_sigma(
    counts: &Counts,
    ideal: &BTreeMap<String, f64>,
    resamples: usize,
    seed: u64,
) -> Result<f64, AnalysisError> {
    if counts.shots == 0 {
        return Err(AnalysisError::InvalidParameter("no shots"));
    }
    let keys: Vec<&String> = counts.counts.keys().collect();
    let mut cdf = Vec::with_capacity(keys.len());
    let mut acc = 0u64;
    for k in &keys {
        acc += counts.counts[*k];
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(resamples);
    let mut tally = alloc::vec![0u64; keys.len()];
    for _ in 0..resamples {
        tally.iter_mut().for_each(|t| *t = 0);
        for _ in 0..counts.shots {
            let u = rng.random_range(0..acc);
            tally[cdf.partition_point(|&c| c <= u)] += 1;
        }
        let dist: BTreeMap<String, f64> = keys
            .iter()
            .zip(&tally)
            .filter(|(_, &t)| t > 0)
            .map(|(k, &t)| ((*k).clone(), t as f64 / counts.shots as f64))
            .collect();
        values.push(hellinger_fidelity(&dist, ideal)?);
    }
    Ok(std_dev(&values))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRuleConfig {
    /// Predicted values within this (linear fidelity) tie.
    pub epsilon_pred: f64,
    /// Measured values within this many combined σ tie.
    pub measured_tie_sigmas: f64,
}

impl Default for RankRuleConfig {
    fn default() -> Self {
        RankRuleConfig {
            epsilon_pred: 0.01,
            measured_tie_sigmas: 2.0,
        }
    }
}

impl RankRuleConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.epsilon_pred > 0.0 && self.measured_tie_sigmas > 0.0 {
            Ok(())
        } else {
            Err(AnalysisError::InvalidParameter(
                "tie thresholds must be positive",
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank {
    Above,
    Tie,
    Below,
}

fn rank(delta: f64, tie: f64) -> Rank {
    if delta.abs() <= tie {
        Rank::Tie
    } else if delta > 0.0 {
        Rank::Above
    } else {
        Rank::Below
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDetail {
    pub a: String,
    pub b: String,
    /// Where `a` sits relative to `b`.
    pub predicted: Rank,
    pub measured: Rank,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankVerdict {
    pub agree: bool,
    pub pairs: Vec<PairDetail>,
}

/// Compares the weak orderings induced by predictions and measurements.
/// Pairs tie under either view when within its threshold; the verdict is
/// "agree" unless some pair is strictly ordered oppositely.
pub fn rank_agreement(
    predicted: &BTreeMap<String, f64>,
    measured: &BTreeMap<String, Measured>,
    rule: &RankRuleConfig,
) -> Result<RankVerdict, AnalysisError> {
    rule.validate()?;
    if predicted.len() != measured.len() || predicted.keys().any(|k| !measured.contains_key(k)) {
        return Err(AnalysisError::VariantMismatch);
    }
    let ids: Vec<&String> = predicted.keys().collect();
    let mut pairs = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let p = rank(predicted[*a] - predicted[*b], rule.epsilon_pred);
            let (ma, mb) = (measured[*a], measured[*b]);
            let tie =
                rule.measured_tie_sigmas * libm::sqrt(ma.sigma * ma.sigma + mb.sigma * mb.sigma);
            let m = rank(ma.value - mb.value, tie);
            let consistent = !matches!(
                (p, m),
                (Rank::Above, Rank::Below) | (Rank::Below, Rank::Above)
            );
            pairs.push(PairDetail {
                a: (*a).clone(),
                b: (*b).clone(),
                predicted: p,
                measured: m,
                consistent,
            });
        }
    }
    Ok(RankVerdict {
        agree: pairs.iter().all(|p| p.consistent),
        pairs,
    })
}

/// Sample Pearson correlation.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64, AnalysisError> {
    if xs.len() != ys.len() {
        return Err(AnalysisError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(AnalysisError::TooFewSamples(2));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(AnalysisError::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseParams;
    use alloc::string::ToString;
    use alloc::vec;

    fn bd(h: f64, b: f64, r: f64) -> FidelityBreakdown {
        FidelityBreakdown {
            df_h: h,
            df_b: b,
            df_r: r,
            ..Default::default()
        }
    }

    fn dist(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    fn vr(id: &str, b: FidelityBreakdown) -> VariantResult {
        VariantResult {
            variant_id: id.into(),
            breakdown: b,
            snapshots: Vec::new(),
            f_pred: None,
            measured: None,
        }
    }

    #[test]
    fn attribution_rows() {
        let rows = attribution_table(
            Algorithm::Grover,
            &[vr("a", bd(-1.0, -1.0, -2.0)), vr("b", bd(-3.0, 0.5, 0.0))],
        );
        assert_eq!(
            (rows[0].pct_h, rows[0].pct_b, rows[0].pct_r),
            (25.0, 25.0, 50.0)
        );
        assert_eq!(rows[0].df_hb, -2.0);
        assert_eq!(rows[1].pct_r, 0.0);
        assert!(!rows[0].boundary_sensitive);
        assert!(
            attribution_table(Algorithm::Qdrift, &[vr("a", bd(-1.0, 0.0, 0.0))])[0]
                .boundary_sensitive
        );
        assert!(
            attribution_table(Algorithm::Trotter, &[vr("a", bd(-1.0, 0.0, 0.0))])[0]
                .boundary_sensitive
        );
    }

    #[test]
    fn rho_values() {
        let a = bd(-3.0, -1.0, -6.0);
        let b = bd(-1.0, -1.0, -3.0);
        assert!((amplification_factor(&a, &b).unwrap() - 2.5).abs() < 1e-12);
        assert!(
            (amplification_factor(&bd(-3.0, 0.0, -1.0), &bd(-1.0, 0.0, -1.0)).unwrap() - 1.0).abs()
                < 1e-12
        );
        assert_eq!(
            amplification_factor(&a, &a),
            Err(AnalysisError::UndefinedRho)
        );
    }

    #[test]
    fn seed_stats_significance() {
        let seeds = [1, 2, 3];
        let s = seed_stats(
            &seeds,
            vec![
                ("x".into(), vec![-1.0, -1.0, -1.0]),
                ("y".into(), vec![-1.3, -1.3, -1.3]),
            ],
        )
        .unwrap();
        assert_eq!(s.leader, "x");
        assert!((s.gap - 0.3).abs() < 1e-12);
        assert_eq!(s.sigma, 0.0);
        assert!(!s.significant && s.winner.is_none());
        let s = seed_stats(
            &seeds,
            vec![
                ("x".into(), vec![-1.0, -1.2, -0.8]),
                ("y".into(), vec![-3.0, -3.0, -3.0]),
            ],
        )
        .unwrap();
        assert!((s.variants[0].sigma - 0.2).abs() < 1e-12);
        assert_eq!(s.winner.as_deref(), Some("x"));
        assert!(seed_stats(&[1], vec![("x".into(), vec![0.0])]).is_err());
        assert!(!is_significant(0.3, 0.01));
        assert!(!is_significant(0.8, 0.5));
        assert!(is_significant(0.8, 0.3));
    }

    #[test]
    fn perturbation() {
        let mut cal = CalibrationModel::uniform(NoiseParams::IBM_HERON);
        for i in 0..20 {
            cal.set_p2q(i, i + 1, 0.001 * (i + 1) as f64);
        }
        let p = perturb_calibration(&cal, 0.1, 0.2).unwrap();
        let changed = changed_edges(&cal, &p);
        assert_eq!(changed, vec![(18, 19), (19, 20)]);
        assert!((p.edges[&(19, 20)] - 0.024).abs() < 1e-15);
        assert_eq!(perturb_calibration(&cal, 0.1, 0.0).unwrap(), cal);
        assert!(perturb_calibration(&cal, 0.0, 0.2).is_err());
        assert!(perturb_calibration(&cal, 0.1, -1.0).is_err());
        assert_eq!(worst_edge_count(176, 0.1), 18);
        assert_eq!(worst_edge_count(160, 0.1), 16);
        assert_eq!(worst_edge_count(10, 0.3), 3);
    }

    #[test]
    fn success_values() {
        let mut c = Counts::default();
        for _ in 0..4915 {
            c.record("101");
        }
        for _ in 0..(8192 - 4915) {
            c.record("000");
        }
        assert!((success_probability(&c, "101").unwrap() - 4915.0 / 8192.0).abs() < 1e-15);
        assert_eq!(success_probability(&c, "111").unwrap(), 0.0);
        assert!(success_probability(&c, "10").is_err());
        assert!((binomial_sigma(0.5, 8192) - 0.005_524_271_728).abs() < 1e-11);
    }

    #[test]
    fn hellinger_values() {
        let p = dist(&[("0", 1.0)]);
        let q = dist(&[("0", 0.5), ("1", 0.5)]);
        assert!((hellinger_fidelity(&p, &q).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(hellinger_fidelity(&p, &dist(&[("1", 1.0)])).unwrap(), 0.0);
        assert!((hellinger_fidelity(&q, &q).unwrap() - 1.0).abs() < 1e-12);
        assert!(hellinger_fidelity(&dist(&[("0", 0.9)]), &q).is_err());
    }

    #[test]
    fn bootstrap_shrinks_with_shots() {
        let ideal = dist(&[("0", 0.5), ("1", 0.5)]);
        let mut small = Counts::default();
        let mut big = Counts::default();
        for i in 0..200 {
            small.record(if i % 3 == 0 { "1" } else { "0" });
        }
        for i in 0..5000 {
            big.record(if i % 3 == 0 { "1" } else { "0" });
        }
        let s = bootstrap_sigma(&small, &ideal, 200, 1).unwrap();
        let b = bootstrap_sigma(&big, &ideal, 200, 1).unwrap();
        assert!(s > b && b > 0.0);
        assert_eq!(s, bootstrap_sigma(&small, &ideal, 200, 1).unwrap());
    }

    fn meas(pairs: &[(&str, f64, f64)]) -> BTreeMap<String, Measured> {
        pairs
            .iter()
            .map(|&(k, value, sigma)| (k.to_string(), Measured { value, sigma }))
            .collect()
    }

    #[test]
    fn rank_rules() {
        let rule = RankRuleConfig::default();
        let same = dist(&[("a", 0.9), ("b", 0.9)]);
        let v = rank_agreement(
            &same,
            &meas(&[("a", 0.95, 0.005), ("b", 0.5, 0.005)]),
            &rule,
        )
        .unwrap();
        assert!(v.agree);
        let pred = dist(&[("a", 0.8), ("b", 0.6)]);
        let v =
            rank_agreement(&pred, &meas(&[("a", 0.5, 0.005), ("b", 0.6, 0.005)]), &rule).unwrap();
        assert!(!v.agree);
        let pred = dist(&[("a", 0.8), ("b", 0.6), ("c", 0.4)]);
        let v = rank_agreement(
            &pred,
            &meas(&[("a", 0.7, 0.01), ("b", 0.5, 0.01), ("c", 0.3, 0.01)]),
            &rule,
        )
        .unwrap();
        assert!(v.agree && v.pairs.len() == 3);
        assert!(v
            .pairs
            .iter()
            .all(|p| p.predicted == Rank::Above && p.measured == Rank::Above));
        assert!(rank_agreement(&pred, &meas(&[("a", 0.7, 0.01)]), &rule).is_err());
    }

    #[test]
    fn pearson_values() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((pearson_r(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson_r(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!((pearson_r(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            pearson_r(&[1.0, 1.0], &[1.0, 2.0]),
            Err(AnalysisError::ZeroVariance)
        );
    }
}
