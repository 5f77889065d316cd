//! Subcommand bodies. Each returns the analyses that failed; I/O and
//! manifest errors abort the run instead.

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use anyhow::{Context, Result};
use hbr_core::analysis::{
    amplification_factor, attribution_row, budget_gap, cliff_point, evaluate_variant,
    is_boundary_sensitive, pearson_r, perturb_calibration, rank_agreement, reference_score,
    seed_variance, sensitivity, AttributionRow, CliffPoint, CliffProjection, Measured,
    RankRuleConfig, RankVerdict, SeedStats, SensitivityRow, Variant,
};
use hbr_core::benchmarks::{generate, BenchmarkSpec};
use hbr_core::circuit::emit_qasm;
use hbr_core::compiler::{
    compile, route, synthesize, translate, CouplingGraph, PipelineConfig, PipelineRun,
    StageSnapshot,
};
use hbr_core::noise::{
    per_edge_prediction, phase_percentages, total_fidelity, CalibrationModel, FidelityBreakdown,
    ModelConfig, TimingBreakdown,
};
use hbr_core::sim::Counts;
use serde::{Deserialize, Serialize};

use crate::manifest::{Command, RunManifest, MANIFEST_FILE};
use crate::report::OutDir;

pub struct Outcome {
    pub failures: Vec<String>,
    pub written: Vec<std::path::PathBuf>,
}

pub fn run(m: &RunManifest) -> Result<Outcome> {
    m.validate()?;
    let mut out = OutDir::create(&m.out)?;
    out.json(MANIFEST_FILE, m)?;
    let mut failures = Vec::new();
    match m.command {
        Command::Generate => cmd_generate(m, &mut out, &mut failures)?,
        Command::Attribute => cmd_attribute(m, &mut out, &mut failures)?,
        Command::Cliff => cmd_cliff(m, &mut out, &mut failures)?,
        Command::Seeds => cmd_seeds(m, &mut out, &mut failures)?,
        Command::Sensitivity => cmd_sensitivity(m, &mut out, &mut failures)?,
        Command::Validate => cmd_validate(m, &mut out, &mut failures)?,
    }
    Ok(Outcome {
        failures,
        written: out.written,
    })
}

fn cmd_generate(m: &RunManifest, out: &mut OutDir, failures: &mut Vec<String>) -> Result<()> {
    for &n in &m.ns {
        for &seed in &m.seeds.circuit {
            let spec = m.cell_spec(n, seed);
            match generate(&spec) {
                Ok(c) => out.text(
                    &format!("{}_n{n}_seed{seed}.qasm", spec.algorithm.name()),
                    &emit_qasm(&c),
                )?,
                Err(e) => failures.push(format!("generate n={n} seed={seed}: {e}")),
            }
        }
    }
    Ok(())
}

/// Compiles and, on failure, names the stage that failed.
fn compile_cell(
    spec: &BenchmarkSpec,
    cfg: &PipelineConfig,
    graph: &CouplingGraph,
) -> Result<PipelineRun, String> {
    let input = generate(spec).map_err(|e| format!("INPUT: {e}"))?;
    match compile(&input, cfg, graph) {
        Ok(run) => Ok(run),
        Err(e) => {
            let stage = match synthesize(&input, &cfg.policy) {
                Err(_) => "H",
                Ok(h) => match translate(&h, cfg.basis) {
                    Err(_) => "B",
                    Ok(b) => match route(&b, graph, &cfg.router) {
                        Err(_) => "R",
                        Ok(_) => "pipeline",
                    },
                },
            };
            Err(format!("{stage}: {e}"))
        }
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    variant_id: &'a str,
    n: usize,
    seed: u64,
    swap_count: usize,
    initial_layout: &'a [usize],
    final_layout: &'a [usize],
    snapshots: &'a [StageSnapshot],
    breakdown: &'a FidelityBreakdown,
}

/// Table row; columns follow H, B, H+B, R, then the shares.
#[derive(Serialize)]
struct AttributionCsv {
    variant: String,
    n: usize,
    /// Circuit seed, or `mean` for the average over seeds.
    seed: String,
    df_h: f64,
    df_b: f64,
    df_hb: f64,
    df_r: f64,
    pct_h: f64,
    pct_b: f64,
    pct_r: f64,
    df_hbr: f64,
    df_readout: f64,
    df_t2: f64,
    total: f64,
    boundary_sensitive: bool,
}

impl AttributionCsv {
    fn new(
        variant: &str,
        n: usize,
        seed: String,
        b: &FidelityBreakdown,
        boundary_sensitive: bool,
    ) -> Self {
        AttributionCsv {
            variant: variant.into(),
            n,
            seed,
            df_h: b.df_h,
            df_b: b.df_b,
            df_hb: b.df_hb,
            df_r: b.df_r,
            pct_h: b.pct_h,
            pct_b: b.pct_b,
            pct_r: b.pct_r,
            df_hbr: b.df_hbr,
            df_readout: b.df_readout,
            df_t2: b.df_t2,
            total: b.total,
            boundary_sensitive,
        }
    }
}

#[derive(Serialize)]
struct WaterfallCsv {
    variant: String,
    n: usize,
    term: &'static str,
    decades: f64,
    cumulative: f64,
}

#[derive(Serialize)]
struct RhoEntry {
    a: String,
    b: String,
    rho: f64,
}

#[derive(Serialize)]
struct AttributionBlock {
    n: usize,
    seeds: Vec<u64>,
    rows: Vec<AttributionRow>,
    rho: Vec<RhoEntry>,
}

#[derive(Serialize)]
struct AttributionReport {
    algorithm: String,
    boundary_sensitive: bool,
    widths: Vec<AttributionBlock>,
}

/// Field-wise mean; derived sums and shares are recomputed from the means.
fn mean_breakdown(bs: &[FidelityBreakdown]) -> FidelityBreakdown {
    let k = bs.len() as f64;
    let avg = |f: fn(&FidelityBreakdown) -> f64| bs.iter().map(f).sum::<f64>() / k;
    let (df_h, df_b, df_r) = (avg(|b| b.df_h), avg(|b| b.df_b), avg(|b| b.df_r));
    let (df_readout, df_t2) = (avg(|b| b.df_readout), avg(|b| b.df_t2));
    let (pct_h, pct_b, pct_r) = phase_percentages(df_h, df_b, df_r);
    FidelityBreakdown {
        df_h,
        df_b,
        df_r,
        df_hb: df_h + df_b,
        df_hbr: df_h + df_b + df_r,
        df_readout,
        df_t2,
        total: df_h + df_b + df_r + df_readout + df_t2,
        pct_h,
        pct_b,
        pct_r,
        timing: TimingBreakdown {
            t_circuit: avg(|b| b.timing.t_circuit),
            t_active: avg(|b| b.timing.t_active),
            t_idle: avg(|b| b.timing.t_idle),
            clamped: bs.iter().any(|b| b.timing.clamped),
        },
    }
}

fn cmd_attribute(m: &RunManifest, out: &mut OutDir, failures: &mut Vec<String>) -> Result<()> {
    let graph = m.topology.graph();
    let cal = m.profile.load(m.basis, &graph)?;
    let flag = is_boundary_sensitive(m.algorithm());
    let mut records = Vec::new();
    let mut csv = Vec::new();
    let mut waterfall = Vec::new();
    let mut blocks = Vec::new();
    for &n in &m.ns {
        let mut means: Vec<(String, FidelityBreakdown)> = Vec::new();
        for v in &m.variants {
            let mut per_seed = Vec::new();
            for &seed in &m.seeds.circuit {
                match compile_cell(&m.cell_spec(n, seed), &v.config, &graph) {
                    Ok(run) => {
                        let b = total_fidelity(&run.deltas(), &run.final_metrics(), &m.model, &cal);
                        csv.push(AttributionCsv::new(&v.id, n, seed.to_string(), &b, flag));
                        records.push((v.id.clone(), n, seed, run, b.clone()));
                        per_seed.push(b);
                    }
                    Err(e) => failures.push(format!("attribute {} n={n} seed={seed}: {e}", v.id)),
                }
            }
            if per_seed.len() != m.seeds.circuit.len() {
                continue;
            }
            let mean = mean_breakdown(&per_seed);
            if per_seed.len() > 1 {
                csv.push(AttributionCsv::new(&v.id, n, "mean".into(), &mean, flag));
            }
            let terms = [
                ("H", mean.df_h),
                ("B", mean.df_b),
                ("R", mean.df_r),
                ("readout", mean.df_readout),
                ("T2", mean.df_t2),
            ];
            let mut acc = 0.0;
            for (term, decades) in terms {
                acc += decades;
                waterfall.push(WaterfallCsv {
                    variant: v.id.clone(),
                    n,
                    term,
                    decades,
                    cumulative: acc,
                });
            }
            means.push((v.id.clone(), mean));
        }
        let mut rho = Vec::new();
        for (i, (a, ba)) in means.iter().enumerate() {
            for (b, bb) in &means[i + 1..] {
                if let Ok(r) = amplification_factor(ba, bb) {
                    rho.push(RhoEntry {
                        a: a.clone(),
                        b: b.clone(),
                        rho: r,
                    });
                }
            }
        }
        blocks.push(AttributionBlock {
            n,
            seeds: m.seeds.circuit.clone(),
            rows: means
                .iter()
                .map(|(id, b)| attribution_row(id, b, flag))
                .collect(),
            rho,
        });
    }
    let runs: Vec<RunRecord> = records
        .iter()
        .map(|(id, n, seed, run, b)| RunRecord {
            variant_id: id,
            n: *n,
            seed: *seed,
            swap_count: run.swap_count,
            initial_layout: &run.initial_layout,
            final_layout: &run.final_layout,
            snapshots: &run.snapshots,
            breakdown: b,
        })
        .collect();
    out.json("runs.json", &runs)?;
    out.csv("attribution.csv", &csv)?;
    out.json(
        "attribution.json",
        &AttributionReport {
            algorithm: m.algorithm().name().into(),
            boundary_sensitive: flag,
            widths: blocks,
        },
    )?;
    out.csv("waterfall.csv", &waterfall)?;
    Ok(())
}

#[derive(Serialize)]
struct CliffCsv {
    variant: String,
    n: usize,
    total: Option<f64>,
    gap: String,
}

#[derive(Serialize)]
struct CliffEntry {
    variant_id: String,
    projection: CliffProjection,
}

/// Runs one width on a worker thread, giving up after `budget`.
fn timed_point(
    spec: &BenchmarkSpec,
    v: &Variant,
    graph: &CouplingGraph,
    cal: &CalibrationModel,
    n: usize,
    budget: Duration,
) -> Option<CliffPoint> {
    let (tx, rx) = mpsc::channel();
    let (spec, cfg, graph, cal) = (spec.clone(), v.config.clone(), graph.clone(), cal.clone());
    thread::spawn(move || {
        let _ = tx.send(cliff_point(&spec, &cfg, &graph, &cal, n));
    });
    rx.recv_timeout(budget).ok()
}

fn cmd_cliff(m: &RunManifest, out: &mut OutDir, failures: &mut Vec<String>) -> Result<()> {
    let graph = m.topology.graph();
    let cal = m.profile.load(m.basis, &graph)?;
    let budget = Duration::from_secs(m.sweep.budget_secs);
    let template = m.cell_spec(m.ns[0], m.seeds.circuit[0]);
    let mut entries = Vec::new();
    let mut csv = Vec::new();
    for v in &m.variants {
        let mut points = Vec::new();
        let mut over_budget = false;
        for &n in &m.ns {
            // Cost grows with n, so once a width times out the rest are skipped.
            let p = if over_budget {
                budget_gap(n, m.sweep.budget_secs)
            } else {
                match timed_point(&template, v, &graph, &cal, n, budget) {
                    Some(p) => p,
                    None => {
                        over_budget = true;
                        budget_gap(n, m.sweep.budget_secs)
                    }
                }
            };
            if let (None, Some(reason)) = (p.total, &p.gap) {
                if !over_budget {
                    failures.push(format!("cliff {} n={n}: {reason}", v.id));
                }
            }
            csv.push(CliffCsv {
                variant: v.id.clone(),
                n,
                total: p.total,
                gap: p.gap.clone().unwrap_or_default(),
            });
            points.push(p);
        }
        entries.push(CliffEntry {
            variant_id: v.id.clone(),
            projection: CliffProjection::from_points(points, m.sweep.threshold),
        });
    }
    out.csv("cliff.csv", &csv)?;
    out.json("cliff.json", &entries)?;
    Ok(())
}

#[derive(Serialize)]
struct SeedCsv {
    variant: String,
    n: usize,
    router_seed: u64,
    df_hbr: f64,
}

#[derive(Serialize)]
struct SeedSummaryCsv {
    variant: String,
    n: usize,
    mean: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct SeedBlock {
    n: usize,
    stats: SeedStats,
}

fn cmd_seeds(m: &RunManifest, out: &mut OutDir, failures: &mut Vec<String>) -> Result<()> {
    let graph = m.topology.graph();
    let cal = m.profile.load(m.basis, &graph)?;
    let (mut rows, mut summary, mut blocks) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &m.ns {
        let spec = m.cell_spec(n, m.seeds.circuit[0]);
        match seed_variance(&spec, &m.variants, &graph, &cal, &m.seeds.router) {
            Ok(stats) => {
                for v in &stats.variants {
                    for (&seed, &t) in stats.seeds.iter().zip(&v.totals) {
                        rows.push(SeedCsv {
                            variant: v.variant_id.clone(),
                            n,
                            router_seed: seed,
                            df_hbr: t,
                        });
                    }
                    summary.push(SeedSummaryCsv {
                        variant: v.variant_id.clone(),
                        n,
                        mean: v.mean,
                        sigma: v.sigma,
                    });
                }
                blocks.push(SeedBlock { n, stats });
            }
            Err(e) => failures.push(format!("seeds n={n}: {e}")),
        }
    }
    out.csv("seeds.csv", &rows)?;
    out.csv("seeds_summary.csv", &summary)?;
    out.json("seeds.json", &blocks)?;
    Ok(())
}

#[derive(Serialize)]
struct SensitivityCsv {
    variant: String,
    n: usize,
    f_before: f64,
    f_after: f64,
    delta_pct: f64,
    touches_perturbed: bool,
}

#[derive(Serialize)]
struct SensitivityBlock {
    n: usize,
    rows: Vec<SensitivityRow>,
}

fn cmd_sensitivity(m: &RunManifest, out: &mut OutDir, failures: &mut Vec<String>) -> Result<()> {
    let graph = m.topology.graph();
    let cal = m.profile.load(m.basis, &graph)?;
    let after = perturb_calibration(&cal, m.perturbation.worst_fraction, m.perturbation.factor)
        .context("perturbing calibration")?;
    out.json("calibration_perturbed.json", &after)?;
    let (mut csv, mut blocks) = (Vec::new(), Vec::new());
    for &n in &m.ns {
        let spec = m.cell_spec(n, m.seeds.circuit[0]);
        let mut rows = Vec::new();
        for v in &m.variants {
            let row = compile_cell(&spec, &v.config, &graph).and_then(|run| {
                sensitivity(&v.id, run.final_circuit(), &cal, &after).map_err(|e| e.to_string())
            });
            match row {
                Ok(row) => {
                    csv.push(SensitivityCsv {
                        variant: row.variant_id.clone(),
                        n,
                        f_before: row.f_before,
                        f_after: row.f_after,
                        delta_pct: row.delta_pct,
                        touches_perturbed: row.touches_perturbed,
                    });
                    rows.push(row);
                }
                Err(e) => failures.push(format!("sensitivity {} n={n}: {e}", v.id)),
            }
        }
        blocks.push(SensitivityBlock { n, rows });
    }
    out.csv("sensitivity.csv", &csv)?;
    out.json("sensitivity.json", &blocks)?;
    Ok(())
}

#[derive(Serialize)]
struct ValidateCsv {
    variant: String,
    n: usize,
    noise_scale: f64,
    f_pred: f64,
    measured: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct ScaleVerdict {
    noise_scale: f64,
    verdict: RankVerdict,
}

#[derive(Serialize)]
struct ValidateBlock {
    n: usize,
    /// `success` or `hellinger`.
    score: &'static str,
    verdicts: Vec<ScaleVerdict>,
    all_agree: bool,
    pearson_r: Option<f64>,
}

/// Counts keyed by variant id.
#[derive(Deserialize)]
#[serde(transparent)]
struct ExternalCounts(BTreeMap<String, Counts>);

fn cmd_validate(m: &RunManifest, out: &mut OutDir, failures: &mut Vec<String>) -> Result<()> {
    let graph = m.topology.graph();
    let cal = m.profile.load(m.basis, &graph)?;
    let external = match &m.counts {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading counts {}", p.display()))?;
            let c: ExternalCounts = serde_json::from_str(&text)
                .with_context(|| format!("parsing counts {}", p.display()))?;
            Some(c.0)
        }
        None => None,
    };
    let rule = RankRuleConfig::default();
    let (mut csv, mut blocks) = (Vec::new(), Vec::new());
    for &n in &m.ns {
        let spec = m.cell_spec(n, m.seeds.circuit[0]);
        let input = match generate(&spec) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("validate n={n}: {e}"));
                continue;
            }
        };
        let score = match reference_score(&spec, &input) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("validate n={n}: reference: {e}"));
                continue;
            }
        };
        let mut runs = Vec::new();
        for v in &m.variants {
            match compile(&input, &v.config, &graph) {
                Ok(run) => runs.push((v.id.as_str(), run)),
                Err(e) => failures.push(format!("validate {} n={n}: {e}", v.id)),
            }
        }
        if runs.len() != m.variants.len() {
            continue;
        }
        let (mut xs, mut ys, mut verdicts) = (Vec::new(), Vec::new(), Vec::new());
        let mut complete = true;
        for &scale in &m.noise_scales {
            let scaled = cal.scaled(scale);
            let mut pred = BTreeMap::new();
            let mut meas: BTreeMap<String, Measured> = BTreeMap::new();
            for (id, run) in &runs {
                let cell = match &external {
                    Some(ext) => match ext.get(*id) {
                        Some(counts) => per_edge_prediction(
                            run.final_circuit(),
                            &scaled,
                            &ModelConfig::VALIDATION,
                        )
                        .map_err(|e| e.to_string())
                        .and_then(|f| {
                            score
                                .measure(counts, m.seeds.sampler)
                                .map(|x| (f, x))
                                .map_err(|e| e.to_string())
                        }),
                        None => Err("missing counts".to_string()),
                    },
                    None => evaluate_variant(run, &scaled, &score, m.shots, m.seeds.sampler)
                        .map_err(|e| e.to_string()),
                };
                match cell {
                    Ok((f, x)) => {
                        csv.push(ValidateCsv {
                            variant: id.to_string(),
                            n,
                            noise_scale: scale,
                            f_pred: f,
                            measured: x.value,
                            sigma: x.sigma,
                        });
                        xs.push(f);
                        ys.push(x.value);
                        pred.insert(id.to_string(), f);
                        meas.insert(id.to_string(), x);
                    }
                    Err(e) => {
                        complete = false;
                        failures.push(format!("validate {id} n={n} scale={scale}: {e}"));
                    }
                }
            }
            if !complete {
                break;
            }
            match rank_agreement(&pred, &meas, &rule) {
                Ok(verdict) => verdicts.push(ScaleVerdict {
                    noise_scale: scale,
                    verdict,
                }),
                Err(e) => failures.push(format!("validate n={n} scale={scale}: rank: {e}")),
            }
        }
        if !complete {
            continue;
        }
        let pearson = match pearson_r(&xs, &ys) {
            Ok(r) => Some(r),
            Err(e) => {
                failures.push(format!("validate n={n}: pearson: {e}"));
                None
            }
        };
        blocks.push(ValidateBlock {
            n,
            score: match score {
                hbr_core::analysis::Score::Success(_) => "success",
                hbr_core::analysis::Score::Hellinger(_) => "hellinger",
            },
            all_agree: verdicts.iter().all(|v| v.verdict.agree),
            verdicts,
            pearson_r: pearson,
        });
    }
    out.csv("validate.csv", &csv)?;
    out.json("validate.json", &blocks)?;
    Ok(())
}
