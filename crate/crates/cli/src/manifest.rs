//! Run manifests: everything needed to reproduce a run's output files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hbr_core::analysis::{router_seeds, Variant};
use hbr_core::benchmarks::{Algorithm, BenchmarkSpec};
use hbr_core::compiler::{CouplingGraph, NativeGateSet};
use hbr_core::noise::{CalibrationModel, ModelConfig, NoiseParams};
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Generate,
    Attribute,
    Cliff,
    Seeds,
    Sensitivity,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Topology {
    /// The 156-qubit heavy-hex device.
    HeavyHex156,
    HeavyHex {
        qubits: usize,
    },
    AllToAll {
        qubits: usize,
    },
    Line {
        qubits: usize,
    },
}

impl Topology {
    pub fn default_for(basis: NativeGateSet) -> Topology {
        match basis {
            NativeGateSet::IbmHeron => Topology::HeavyHex156,
            NativeGateSet::IonqForte => Topology::AllToAll { qubits: 36 },
        }
    }

    pub fn graph(self) -> CouplingGraph {
        match self {
            Topology::HeavyHex156 => CouplingGraph::heavy_hex_156(),
            Topology::HeavyHex { qubits } => CouplingGraph::heavy_hex(qubits),
            Topology::AllToAll { qubits } => CouplingGraph::all_to_all(qubits),
            Topology::Line { qubits } => CouplingGraph::line(qubits),
        }
    }
}

/// Where the calibration comes from. Medians always follow the basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Profile {
    /// Every lookup returns the backend medians.
    Uniform,
    /// Log-uniform per-edge and per-qubit spread around the medians.
    Synthetic { spread: f64, seed: u64 },
    /// Calibration JSON on disk.
    File { path: PathBuf },
}

impl Profile {
    pub fn parse(s: &str) -> Profile {
        match s {
            "uniform" => Profile::Uniform,
            "synthetic" => Profile::Synthetic {
                spread: 3.0,
                seed: 7,
            },
            path => Profile::File { path: path.into() },
        }
    }

    pub fn load(&self, basis: NativeGateSet, graph: &CouplingGraph) -> Result<CalibrationModel> {
        let medians = medians(basis);
        Ok(match self {
            Profile::Uniform => CalibrationModel::uniform(medians),
            Profile::Synthetic { spread, seed } => {
                let edges: Vec<_> = graph.edges().collect();
                CalibrationModel::synthetic(medians, &edges, graph.n, *spread, *seed)
            }
            Profile::File { path } => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading calibration {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing calibration {}", path.display()))?
            }
        })
    }
}

pub fn medians(basis: NativeGateSet) -> NoiseParams {
    match basis {
        NativeGateSet::IbmHeron => NoiseParams::IBM_HERON,
        NativeGateSet::IonqForte => NoiseParams::IONQ_FORTE,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub threshold: f64,
    /// Wall-clock limit per width; widths past it become gap markers.
    pub budget_secs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub worst_fraction: f64,
    pub factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    /// Circuit seeds; for QDRIFT these are the channel seeds averaged over.
    pub circuit: Vec<u64>,
    /// Router seeds swept by the seeds command.
    pub router: Vec<u64>,
    pub sampler: u64,
}

/// Fully determines a run; written next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    /// Template; `n` and `seed` are overridden per cell.
    pub spec: BenchmarkSpec,
    pub ns: Vec<usize>,
    pub basis: NativeGateSet,
    pub topology: Topology,
    pub profile: Profile,
    pub model: ModelConfig,
    pub variants: Vec<Variant>,
    pub seeds: Seeds,
    pub shots: u64,
    pub sweep: Sweep,
    pub perturbation: Perturbation,
    /// Calibration scales applied in validation; more than one gives the
    /// within-circuit correlation something to span.
    pub noise_scales: Vec<f64>,
    /// External counts replacing the sampler in validation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<PathBuf>,
    pub out: PathBuf,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<RunManifest> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            bail!("no circuit widths given");
        }
        if self.command != Command::Generate && self.variants.is_empty() {
            bail!("no variants given");
        }
        if self.seeds.circuit.is_empty() {
            bail!("no circuit seeds given");
        }
        if self.command == Command::Seeds && self.seeds.router.len() < 2 {
            bail!("seed sweeps need at least two router seeds");
        }
        if self.shots == 0 && self.command == Command::Validate && self.counts.is_none() {
            bail!("validation needs shots > 0");
        }
        if self
            .noise_scales
            .iter()
            .any(|s| !(s.is_finite() && *s > 0.0))
        {
            bail!("noise scales must be positive");
        }
        if self.counts.is_some() && (self.ns.len() != 1 || self.noise_scales != [1.0]) {
            bail!("external counts apply to a single width at noise scale 1");
        }
        Ok(())
    }

    pub fn cell_spec(&self, n: usize, seed: u64) -> BenchmarkSpec {
        BenchmarkSpec {
            n,
            seed,
            ..self.spec.clone()
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.spec.algorithm
    }
}

/// Circuit seeds when none are given: the five QDRIFT channel seeds for
/// attribution, otherwise the single default seed.
pub fn default_circuit_seeds(command: Command, alg: Algorithm) -> Vec<u64> {
    if command == Command::Attribute && alg == Algorithm::Qdrift {
        (42..=46).collect()
    } else {
        vec![42]
    }
}

pub fn default_router_seeds() -> Vec<u64> {
    router_seeds()
}

/// Parses width lists such as `8`, `3-20`, `4-20/2` or `4,6,10-12`.
pub fn parse_ns(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (range, step) = match part.split_once('/') {
            Some((r, st)) => (r, st.parse::<usize>().context("step")?),
            None => (part, 1),
        };
        if step == 0 {
            bail!("zero step in {part:?}");
        }
        match range.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (
                    a.parse().context("range start")?,
                    b.parse().context("range end")?,
                );
                if a > b {
                    bail!("empty range {part:?}");
                }
                out.extend((a..=b).step_by(step));
            }
            None => out.push(range.parse().with_context(|| format!("width {range:?}"))?),
        }
    }
    if out.is_empty() {
        bail!("no widths in {s:?}");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_lists() {
        assert_eq!(parse_ns("8").unwrap(), [8]);
        assert_eq!(parse_ns("3-6").unwrap(), [3, 4, 5, 6]);
        assert_eq!(parse_ns("4-10/2").unwrap(), [4, 6, 8, 10]);
        assert_eq!(parse_ns("12,4,6-7").unwrap(), [4, 6, 7, 12]);
        assert!(parse_ns("6-3").is_err());
        assert!(parse_ns("x").is_err());
        assert!(parse_ns("2-4/0").is_err());
    }

    #[test]
    fn profile_names() {
        assert_eq!(Profile::parse("uniform"), Profile::Uniform);
        assert!(matches!(
            Profile::parse("synthetic"),
            Profile::Synthetic { .. }
        ));
        assert!(matches!(Profile::parse("cal.json"), Profile::File { .. }));
    }
}
