//! The H (synthesis), B (basis translation) and R (routing) stages.

mod routing;
mod synthesis;
mod topology;
mod translate;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{generate, BenchmarkError, BenchmarkSpec};
use crate::circuit::{count_gates, depth, Circuit, DepthMetrics, GateCounts, GateKind};
use crate::costing::{circuit_cxeq, StageDelta};
use crate::noise::{FinalMetrics, NoiseError};

pub use routing::{chain_layout, route, RoutedCircuit, RouterAlgorithm, RouterConfig};
pub use synthesis::{
    cancel_inverse_pairs, synthesize, McxStrategy, PauliEvolution, SynthesisPolicy,
};
pub use topology::{CouplingGraph, GraphKind};
pub use translate::{lower_swaps, translate, NativeGateSet};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("{0} acts on more than two qubits; run synthesis first")]
    NotTwoLocal(GateKind),
    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),
    #[error("coupling graph is disconnected")]
    Disconnected,
    #[error("{logical} logical qubits do not fit on {physical} usable physical qubits")]
    TooWide { logical: usize, physical: usize },
    #[error("initial layout is not an injective map onto usable qubits")]
    InvalidLayout,
    #[error("qubit {0} is used after measurement")]
    MidCircuitMeasurement(usize),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Input,
    PostH,
    PostB,
    PostR,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Input, Stage::PostH, Stage::PostB, Stage::PostR];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Input => "input",
            Stage::PostH => "post_h",
            Stage::PostB => "post_b",
            Stage::PostR => "post_r",
        }
    }
}

/// Metrics of one stage boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSnapshot {
    pub stage: Stage,
    pub counts: GateCounts,
    pub depth: DepthMetrics,
    pub cxeq_total: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap_count: Option<usize>,
}

impl StageSnapshot {
    pub fn of(stage: Stage, c: &Circuit, swap_count: Option<usize>) -> StageSnapshot {
        StageSnapshot {
            stage,
            counts: count_gates(c),
            depth: depth(c),
            cxeq_total: circuit_cxeq(c),
            swap_count,
        }
    }
}

/// One compilation variant: how to synthesize, which device, how to route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub policy: SynthesisPolicy,
    pub basis: NativeGateSet,
    pub router: RouterConfig,
}

/// Circuits and snapshots at every stage boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    /// INPUT, POST_H, POST_B, POST_R.
    pub circuits: Vec<Circuit>,
    pub snapshots: Vec<StageSnapshot>,
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub swap_count: usize,
}

impl PipelineRun {
    pub fn circuit(&self, stage: Stage) -> &Circuit {
        &self.circuits[stage as usize]
    }

    pub fn snapshot(&self, stage: Stage) -> &StageSnapshot {
        &self.snapshots[stage as usize]
    }

    /// H, B and R deltas against the preceding boundary.
    pub fn deltas(&self) -> [StageDelta; 3] {
        let c = &self.circuits;
        [
            StageDelta::between(&c[0], &c[1]),
            StageDelta::between(&c[1], &c[2]),
            StageDelta::between(&c[2], &c[3]),
        ]
    }

    pub fn final_circuit(&self) -> &Circuit {
        &self.circuits[3]
    }

    pub fn final_metrics(&self) -> FinalMetrics {
        FinalMetrics::of(self.final_circuit())
    }
}

/// Runs H, B and R on an already generated circuit.
pub fn compile(
    input: &Circuit,
    cfg: &PipelineConfig,
    graph: &CouplingGraph,
) -> Result<PipelineRun, CompileError> {
    let post_h = synthesize(input, &cfg.policy)?;
    let post_b = translate(&post_h, cfg.basis)?;
    let routed = route(&post_b, graph, &cfg.router)?;
    let mut post_r = lower_swaps(&routed.circuit, cfg.basis);
    if cfg.router.post_route_cleanup {
        post_r = cancel_inverse_pairs(&post_r);
    }
    let circuits = alloc::vec![input.clone(), post_h, post_b, post_r];
    let snapshots = Stage::ALL
        .iter()
        .zip(&circuits)
        .map(|(&s, c)| StageSnapshot::of(s, c, (s == Stage::PostR).then_some(routed.swap_count)))
        .collect();
    Ok(PipelineRun {
        circuits,
        snapshots,
        initial_layout: routed.initial_layout,
        final_layout: routed.final_layout,
        swap_count: routed.swap_count,
    })
}

/// Generates the benchmark and compiles it.
pub fn run_pipeline(
    spec: &BenchmarkSpec,
    cfg: &PipelineConfig,
    graph: &CouplingGraph,
) -> Result<PipelineRun, CompileError> {
    let input = generate(spec)?;
    compile(&input, cfg, graph)
}
