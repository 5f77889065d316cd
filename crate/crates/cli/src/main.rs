//! `hbr`: generate benchmarks, attribute fidelity loss to compilation
//! stages, and run the cliff, seed, sensitivity and validation analyses.
//!
//! Every run writes `manifest.json` into its output directory;
//! `hbr run <manifest>` reproduces the run's files byte for byte.

mod commands;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hbr_core::analysis::Variant;
use hbr_core::benchmarks::{Algorithm, BenchmarkSpec};
use hbr_core::compiler::{NativeGateSet, PipelineConfig, RouterConfig, SynthesisPolicy};
use hbr_core::noise::ModelConfig;

use manifest::{
    default_circuit_seeds, default_router_seeds, parse_ns, Command, Perturbation, Profile,
    RunManifest, Seeds, Sweep, Topology,
};

#[derive(Parser)]
#[command(
    name = "hbr",
    version,
    about = "Per-stage fidelity attribution for compiled quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the uncompiled benchmark circuit as OpenQASM.
    Generate(RunArgs),
    /// Compile each variant and attribute decades to H, B and R.
    Attribute(RunArgs),
    /// Sweep n and report where total fidelity first drops below the threshold.
    Cliff(RunArgs),
    /// Spread of H+B+R decades across router seeds.
    Seeds(RunArgs),
    /// Change in predicted fidelity after degrading the worst edges.
    Sensitivity(RunArgs),
    /// Compare predicted and sampled (or supplied) rankings.
    Validate(RunArgs),
    /// Replay a manifest written by an earlier run.
    Run {
        manifest: PathBuf,
        /// Write to this directory instead of the manifest's.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Compact,
    Recursive,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    IbmHeron,
    IonqForte,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouterArg {
    Stochastic,
    Deterministic,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    HeavyHex,
    AllToAll,
    Line,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Attribution,
    Validation,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_alg, required_unless_present = "spec")]
    alg: Option<Algorithm>,
    /// Benchmark spec JSON; --alg and the tuning flags override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Width or width list: `8`, `3-20`, `4-20/2`, `4,6,8`.
    #[arg(long)]
    n: Option<String>,
    /// Circuit seed; repeat to sweep.
    #[arg(long)]
    seed: Vec<u64>,
    /// Repeat to compare policies.
    #[arg(long, value_enum)]
    policy: Vec<PolicyArg>,
    #[arg(long, value_enum, default_value = "ibm-heron")]
    basis: BasisArg,
    /// Repeat to compare routers.
    #[arg(long, value_enum)]
    router: Vec<RouterArg>,
    /// Router seed for the variants; repeat to give the seeds sweep its list.
    #[arg(long)]
    router_seed: Vec<u64>,
    /// Coupling graph; defaults to the basis's device.
    #[arg(long, value_enum)]
    topology: Option<TopologyArg>,
    /// Physical qubits for --topology.
    #[arg(long)]
    qubits: Option<usize>,
    /// `uniform`, `synthetic`, or a calibration JSON path.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, value_enum, default_value = "attribution")]
    mode: ModeArg,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    sampler_seed: u64,
    /// Cliff threshold in decades.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    threshold: f64,
    /// Per-width time limit for cliff sweeps.
    #[arg(long, default_value_t = 300)]
    budget_secs: u64,
    #[arg(long, default_value_t = 0.1)]
    perturb_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    perturb_factor: f64,
    /// Calibration scale for validation; repeat for several.
    #[arg(long)]
    noise_scale: Vec<f64>,
    /// Counts JSON (`{variant_id: {counts, shots}}`) used instead of the sampler.
    #[arg(long)]
    counts: Option<PathBuf>,
    #[arg(long)]
    trotter_steps: Option<u32>,
    #[arg(long)]
    qdrift_samples: Option<u64>,
    #[arg(long)]
    qpe_ancilla: Option<usize>,
    #[arg(long)]
    qpe_reps: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_alg(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        format!(
            "unknown algorithm {s:?}; expected one of {}",
            names.join(", ")
        )
    })
}

fn policy_name(p: PolicyArg) -> (&'static str, SynthesisPolicy) {
    match p {
        PolicyArg::Compact => ("compact", SynthesisPolicy::COMPACT),
        PolicyArg::Recursive => ("recursive", SynthesisPolicy::RECURSIVE),
    }
}

fn manifest_from(command: Command, a: RunArgs) -> Result<RunManifest> {
    let mut spec = match &a.spec {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<BenchmarkSpec>(&text)
                .with_context(|| format!("parsing spec {}", p.display()))?
        }
        None => BenchmarkSpec::new(a.alg.expect("clap enforces --alg"), 0),
    };
    if let Some(alg) = a.alg {
        spec.algorithm = alg;
    }
    if a.trotter_steps.is_some() {
        spec.trotter_steps = a.trotter_steps;
    }
    if a.qdrift_samples.is_some() {
        spec.qdrift_samples = a.qdrift_samples;
    }
    if let Some(k) = a.qpe_ancilla {
        spec.qpe_ancilla = k;
    }
    if let Some(r) = a.qpe_reps {
        spec.qpe_reps = r;
    }
    let ns = match (&a.n, command, a.spec.is_some()) {
        (Some(s), _, _) => parse_ns(s)?,
        (None, Command::Cliff, _) => parse_ns("3-20")?,
        (None, _, true) if spec.n > 0 => vec![spec.n],
        _ => bail!("--n is required"),
    };

    let basis = match a.basis {
        BasisArg::IbmHeron => NativeGateSet::IbmHeron,
        BasisArg::IonqForte => NativeGateSet::IonqForte,
    };
    let topology = match (a.topology, a.qubits) {
        (None, None) => Topology::default_for(basis),
        (None, Some(_)) => bail!("--qubits needs --topology"),
        (Some(t), q) => {
            let qubits = q.unwrap_or(156);
            match t {
                TopologyArg::HeavyHex if q.is_none() => Topology::HeavyHex156,
                TopologyArg::HeavyHex => Topology::HeavyHex { qubits },
                TopologyArg::AllToAll => Topology::AllToAll { qubits },
                TopologyArg::Line => Topology::Line { qubits },
            }
        }
    };
    let comparative = matches!(command, Command::Seeds | Command::Validate);
    let policies = match (a.policy.is_empty(), comparative) {
        (false, _) => a.policy.clone(),
        (true, true) => vec![PolicyArg::Compact, PolicyArg::Recursive],
        (true, false) => vec![PolicyArg::Compact],
    };
    let all_to_all = matches!(topology, Topology::AllToAll { .. });
    let routers = match (a.router.is_empty(), comparative && !all_to_all, all_to_all) {
        (false, _, _) => a.router.clone(),
        (true, true, _) => vec![RouterArg::Stochastic, RouterArg::Deterministic],
        (true, false, true) => vec![RouterArg::Deterministic],
        (true, false, false) => vec![RouterArg::Stochastic],
    };
    let router_seed = a.router_seed.first().copied().unwrap_or(42);
    let mut variants = Vec::new();
    for &p in &policies {
        let (pname, policy) = policy_name(p);
        for &r in &routers {
            let (rname, router) = match r {
                RouterArg::Stochastic => ("stochastic", RouterConfig::stochastic(router_seed)),
                RouterArg::Deterministic => ("deterministic", RouterConfig::deterministic()),
            };
            variants.push(Variant {
                id: format!("{pname}-{rname}"),
                config: PipelineConfig {
                    policy,
                    basis,
                    router,
                },
            });
        }
    }

    let profile = match (&a.profile, command) {
        (Some(s), _) => Profile::parse(s),
        (None, Command::Sensitivity | Command::Validate) => Profile::parse("synthetic"),
        (None, _) => Profile::Uniform,
    };
    let noise_scales = match (
        a.noise_scale.is_empty(),
        command == Command::Validate && a.counts.is_none(),
    ) {
        (false, _) => a.noise_scale.clone(),
        (true, true) => vec![1.0, 2.0, 4.0],
        (true, false) => vec![1.0],
    };
    let circuit_seeds = if a.seed.is_empty() {
        if a.spec.is_some() {
            vec![spec.seed]
        } else {
            default_circuit_seeds(command, spec.algorithm)
        }
    } else {
        a.seed.clone()
    };
    Ok(RunManifest {
        command,
        spec,
        ns,
        basis,
        topology,
        profile,
        model: match a.mode {
            ModeArg::Attribution => ModelConfig::ATTRIBUTION,
            ModeArg::Validation => ModelConfig::VALIDATION,
        },
        variants,
        seeds: Seeds {
            circuit: circuit_seeds,
            router: if a.router_seed.len() >= 2 {
                a.router_seed.clone()
            } else {
                default_router_seeds()
            },
            sampler: a.sampler_seed,
        },
        shots: a.shots,
        sweep: Sweep {
            threshold: a.threshold,
            budget_secs: a.budget_secs,
        },
        perturbation: Perturbation {
            worst_fraction: a.perturb_fraction,
            factor: a.perturb_factor,
        },
        noise_scales,
        counts: a.counts,
        out: a.out,
    })
}

fn execute(cli: Cli) -> Result<commands::Outcome> {
    let m = match cli.cmd {
        Cmd::Generate(a) => manifest_from(Command::Generate, a)?,
        Cmd::Attribute(a) => manifest_from(Command::Attribute, a)?,
        Cmd::Cliff(a) => manifest_from(Command::Cliff, a)?,
        Cmd::Seeds(a) => manifest_from(Command::Seeds, a)?,
        Cmd::Sensitivity(a) => manifest_from(Command::Sensitivity, a)?,
        Cmd::Validate(a) => manifest_from(Command::Validate, a)?,
        Cmd::Run { manifest, out } => {
            let mut m = RunManifest::load(&manifest)?;
            if let Some(o) = out {
                m.out = o;
            }
            m
        }
    };
    commands::run(&m)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(outcome) => {
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            for f in &outcome.failures {
                eprintln!("failed: {f}");
            }
            if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
