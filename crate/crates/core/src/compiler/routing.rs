//! R stage: SWAP insertion onto a coupling graph.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::topology::CouplingGraph;
use super::CompileError;
use crate::circuit::{Circuit, Gate, GateKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RouterAlgorithm {
    /// SABRE-style front layer plus lookahead with decay; seeded.
    StochasticLookahead,
    /// Greedy placement and lowest-index tie breaking; ignores the seed.
    DeterministicGreedy,
}

fn default_window() -> usize {
    20
}

fn default_trials() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouterConfig {
    pub algorithm: RouterAlgorithm,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_window")]
    pub lookahead_window: usize,
    /// Random starting layouts tried by the stochastic router; the one
    /// needing the fewest SWAPs wins.
    #[serde(default = "default_trials")]
    pub layout_trials: usize,
    #[serde(default)]
    pub post_route_cleanup: bool,
    /// Logical → physical placement overriding the algorithm's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_layout: Option<Vec<usize>>,
}

impl RouterConfig {
    pub fn stochastic(seed: u64) -> RouterConfig {
        RouterConfig {
            algorithm: RouterAlgorithm::StochasticLookahead,
            seed,
            lookahead_window: default_window(),
            layout_trials: default_trials(),
            post_route_cleanup: false,
            initial_layout: None,
        }
    }

    pub fn deterministic() -> RouterConfig {
        RouterConfig {
            algorithm: RouterAlgorithm::DeterministicGreedy,
            ..RouterConfig::stochastic(0)
        }
    }
}

/// Routed circuit on the physical register plus its layouts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    /// `initial_layout[l]` is the physical qubit logical `l` starts on.
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub swap_count: usize,
}

const EXTENDED_WEIGHT: f64 = 0.5;
const DECAY_STEP: f64 = 0.001;
const DECAY_RESET: usize = 5;

struct Dag {
    preds: Vec<usize>,
    succs: Vec<Vec<usize>>,
}

impl Dag {
    fn new(gates: &[Gate], n: usize) -> Dag {
        let mut last: Vec<Option<usize>> = vec![None; n];
        let mut preds = vec![0; gates.len()];
        let mut succs = vec![Vec::new(); gates.len()];
        for (i, g) in gates.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &q in &g.qubits {
                if let Some(p) = last[q] {
                    if seen.insert(p) {
                        succs[p].push(i);
                        preds[i] += 1;
                    }
                }
                last[q] = Some(i);
            }
        }
        Dag { preds, succs }
    }
}

struct Layout {
    l2p: Vec<usize>,
    p2l: Vec<Option<usize>>,
}

impl Layout {
    fn new(l2p: &[usize], n_phys: usize) -> Layout {
        let mut p2l = vec![None; n_phys];
        for (l, &p) in l2p.iter().enumerate() {
            p2l[p] = Some(l);
        }
        Layout {
            l2p: l2p.to_vec(),
            p2l,
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.p2l[a], self.p2l[b]);
        self.p2l[a] = lb;
        self.p2l[b] = la;
        if let Some(l) = la {
            self.l2p[l] = b;
        }
        if let Some(l) = lb {
            self.l2p[l] = a;
        }
    }
}

struct Router<'a> {
    g: &'a CouplingGraph,
    dist: &'a [Vec<usize>],
    window: usize,
    rng: Option<ChaCha8Rng>,
}

struct Pass {
    gates: Vec<Gate>,
    final_layout: Vec<usize>,
    swaps: usize,
}

fn is_two(g: &Gate) -> bool {
    g.qubits.len() == 2 && g.kind != GateKind::Barrier
}

impl Router<'_> {
    fn pass(&mut self, gates: &[Gate], start: &[usize]) -> Pass {
        let n_phys = self.g.n;
        let n_log = start.len();
        let dag = Dag::new(gates, n_log);
        let mut remaining = dag.preds.clone();
        let mut front: BTreeSet<usize> = (0..gates.len()).filter(|&i| remaining[i] == 0).collect();
        let mut layout = Layout::new(start, n_phys);
        let mut out = Vec::with_capacity(gates.len());
        let mut decay = vec![1.0; n_phys];
        let mut swaps = 0;
        let mut since_progress = 0usize;
        let release = 3 * n_phys.max(10);

        while !front.is_empty() {
            let mut progressed = false;
            loop {
                let ready: Vec<usize> = front
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let g = &gates[i];
                        !is_two(g)
                            || self
                                .g
                                .has_edge(layout.l2p[g.qubits[0]], layout.l2p[g.qubits[1]])
                    })
                    .collect();
                if ready.is_empty() {
                    break;
                }
                for i in ready {
                    front.remove(&i);
                    let mut g = gates[i].clone();
                    for q in &mut g.qubits {
                        *q = layout.l2p[*q];
                    }
                    out.push(g);
                    for &s in &dag.succs[i] {
                        remaining[s] -= 1;
                        if remaining[s] == 0 {
                            front.insert(s);
                        }
                    }
                }
                progressed = true;
            }
            if front.is_empty() {
                break;
            }
            if progressed {
                since_progress = 0;
                decay.iter_mut().for_each(|d| *d = 1.0);
            }
            if since_progress >= release {
                swaps += self.release_valve(gates, &front, &mut layout, &mut out);
                since_progress = 0;
                continue;
            }
            let (a, b) = self.choose_swap(gates, &dag, &remaining, &front, &layout, &decay);
            out.push(Gate::swap(a, b));
            layout.swap(a, b);
            swaps += 1;
            since_progress += 1;
            decay[a] += DECAY_STEP;
            decay[b] += DECAY_STEP;
            if since_progress % DECAY_RESET == 0 {
                decay.iter_mut().for_each(|d| *d = 1.0);
            }
        }
        Pass {
            gates: out,
            final_layout: layout.l2p,
            swaps,
        }
    }

    /// Next `window` two-qubit gates beyond the front layer.
    fn extended_set(
        &self,
        gates: &[Gate],
        dag: &Dag,
        remaining: &[usize],
        front: &BTreeSet<usize>,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        let mut released: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue: VecDeque<usize> = front.iter().copied().collect();
        let mut budget = 50 * self.window.max(1);
        while let Some(i) = queue.pop_front() {
            if budget == 0 {
                break;
            }
            budget -= 1;
            for &s in &dag.succs[i] {
                let r = released.entry(s).or_insert(0);
                *r += 1;
                if *r == remaining[s] {
                    if is_two(&gates[s]) {
                        out.push(s);
                        if out.len() >= self.window {
                            return out;
                        }
                    }
                    queue.push_back(s);
                }
            }
        }
        out
    }

    fn choose_swap(
        &mut self,
        gates: &[Gate],
        dag: &Dag,
        remaining: &[usize],
        front: &BTreeSet<usize>,
        layout: &Layout,
        decay: &[f64],
    ) -> (usize, usize) {
        let front2: Vec<usize> = front
            .iter()
            .copied()
            .filter(|&i| is_two(&gates[i]))
            .collect();
        let ext = self.extended_set(gates, dag, remaining, front);
        let mut candidates = BTreeSet::new();
        for &i in &front2 {
            for &l in &gates[i].qubits {
                let p = layout.l2p[l];
                for &nb in self.g.neighbors(p) {
                    candidates.insert((p.min(nb), p.max(nb)));
                }
            }
        }
        let pair_dist = |set: &[usize], a: usize, b: usize| -> f64 {
            let moved = |p: usize| {
                if p == a {
                    b
                } else if p == b {
                    a
                } else {
                    p
                }
            };
            set.iter()
                .map(|&i| {
                    let q = &gates[i].qubits;
                    self.dist[moved(layout.l2p[q[0]])][moved(layout.l2p[q[1]])] as f64
                })
                .sum::<f64>()
        };
        let mut best: Vec<(usize, usize)> = Vec::new();
        let mut best_score = f64::INFINITY;
        for &(a, b) in &candidates {
            let mut h = pair_dist(&front2, a, b) / front2.len().max(1) as f64;
            if !ext.is_empty() {
                h += EXTENDED_WEIGHT * pair_dist(&ext, a, b) / ext.len() as f64;
            }
            h *= decay[a].max(decay[b]);
            if h < best_score - 1e-12 {
                best_score = h;
                best.clear();
                best.push((a, b));
            } else if h <= best_score + 1e-12 {
                best.push((a, b));
            }
        }
        match &mut self.rng {
            Some(rng) => best[rng.random_range(0..best.len())],
            None => best[0],
        }
    }

    /// Walks the closest front gate's first qubit toward its partner.
    fn release_valve(
        &self,
        gates: &[Gate],
        front: &BTreeSet<usize>,
        layout: &mut Layout,
        out: &mut Vec<Gate>,
    ) -> usize {
        let target = front
            .iter()
            .copied()
            .filter(|&i| is_two(&gates[i]))
            .min_by_key(|&i| {
                let q = &gates[i].qubits;
                (self.dist[layout.l2p[q[0]]][layout.l2p[q[1]]], i)
            })
            .expect("blocked front has a two-qubit gate");
        let q = &gates[target].qubits;
        let goal = layout.l2p[q[1]];
        let mut swaps = 0;
        loop {
            let p = layout.l2p[q[0]];
            if self.dist[p][goal] <= 1 {
                return swaps;
            }
            let step = self
                .g
                .neighbors(p)
                .iter()
                .copied()
                .find(|&nb| self.dist[nb][goal] + 1 == self.dist[p][goal])
                .expect("connected graph");
            out.push(Gate::swap(p, step));
            layout.swap(p, step);
            swaps += 1;
        }
    }
}

/// Seeded random placement on a connected region grown from a random start.
fn random_layout(g: &CouplingGraph, n_log: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let usable = g.usable();
    let start = usable[rng.random_range(0..usable.len())];
    let mut seen = vec![false; g.n];
    let mut region = vec![start];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if region.len() >= n_log {
            break;
        }
        let mut nbs: Vec<usize> = g.neighbors(u).to_vec();
        nbs.shuffle(rng);
        for v in nbs {
            if !seen[v] {
                seen[v] = true;
                region.push(v);
                queue.push_back(v);
            }
        }
    }
    region.truncate(n_log);
    region.shuffle(rng);
    region
}

/// Backtracking steps allowed when searching for a SWAP-free placement.
const PERFECT_LAYOUT_BUDGET: usize = 200_000;

/// A placement putting every interacting pair on an edge, found by bounded
/// backtracking over the interaction graph in BFS order.
fn perfect_layout(gates: &[Gate], g: &CouplingGraph, n_log: usize) -> Option<Vec<usize>> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_log];
    for gate in gates.iter().filter(|x| is_two(x)) {
        let (a, b) = (gate.qubits[0], gate.qubits[1]);
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let usable = g.usable();
    let max_deg = usable.iter().map(|&p| g.degree(p)).max().unwrap_or(0);
    if adj.iter().any(|a| a.len() > max_deg) {
        return None;
    }
    let mut order = Vec::with_capacity(n_log);
    let mut seen = vec![false; n_log];
    let mut by_degree: Vec<usize> = (0..n_log).collect();
    by_degree.sort_by_key(|&l| (core::cmp::Reverse(adj[l].len()), l));
    for root in by_degree {
        if seen[root] || adj[root].is_empty() {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut layout = vec![usize::MAX; n_log];
    let mut used = vec![false; g.n];
    let mut budget = PERFECT_LAYOUT_BUDGET;
    if !place(
        0,
        &order,
        &adj,
        g,
        &usable,
        &mut layout,
        &mut used,
        &mut budget,
    ) {
        return None;
    }
    let mut spare = usable.iter().copied().filter(|&p| !used[p]);
    for slot in layout.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = spare.next()?;
    }
    Some(layout)
}

#[allow(clippy::too_many_arguments)]
fn place(
    i: usize,
    order: &[usize],
    adj: &[BTreeSet<usize>],
    g: &CouplingGraph,
    usable: &[usize],
    layout: &mut [usize],
    used: &mut [bool],
    budget: &mut usize,
) -> bool {
    let Some(&l) = order.get(i) else {
        return true;
    };
    let placed: Vec<usize> = adj[l]
        .iter()
        .filter(|&&m| layout[m] != usize::MAX)
        .map(|&m| layout[m])
        .collect();
    let candidates: Vec<usize> = match placed.first() {
        Some(&anchor) => g.neighbors(anchor).to_vec(),
        None => usable.to_vec(),
    };
    for p in candidates {
        if used[p] || g.degree(p) < adj[l].len() || !placed.iter().all(|&q| g.has_edge(p, q)) {
            continue;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        layout[l] = p;
        used[p] = true;
        if place(i + 1, order, adj, g, usable, layout, used, budget) {
            return true;
        }
        layout[l] = usize::MAX;
        used[p] = false;
    }
    false
}

/// Places logical qubits in order of first two-qubit use, each next to its
/// already-placed partners where possible.
fn greedy_layout(
    gates: &[Gate],
    g: &CouplingGraph,
    dist: &[Vec<usize>],
    n_log: usize,
) -> Vec<usize> {
    let mut weight = vec![vec![0usize; n_log]; n_log];
    let mut order = Vec::new();
    let mut listed = vec![false; n_log];
    for gate in gates.iter().filter(|g| is_two(g)) {
        let (a, b) = (gate.qubits[0], gate.qubits[1]);
        weight[a][b] += 1;
        weight[b][a] += 1;
        for q in [a, b] {
            if !listed[q] {
                listed[q] = true;
                order.push(q);
            }
        }
    }
    order.extend((0..n_log).filter(|&q| !listed[q]));

    let usable = g.usable();
    let mut free = vec![false; g.n];
    for &p in &usable {
        free[p] = true;
    }
    let mut layout = vec![usize::MAX; n_log];
    let mut placed: Vec<usize> = Vec::new();
    for &l in &order {
        let pick = if placed.is_empty() {
            *usable
                .iter()
                .max_by_key(|&&p| (g.degree(p), core::cmp::Reverse(p)))
                .expect("nonempty device")
        } else {
            let cost = |p: usize| -> (usize, usize, usize) {
                let partner: usize = placed
                    .iter()
                    .map(|&m| weight[l][m] * dist[p][layout[m]])
                    .sum();
                let near = placed
                    .iter()
                    .map(|&m| dist[p][layout[m]])
                    .min()
                    .unwrap_or(0);
                (partner, near, p)
            };
            usable
                .iter()
                .copied()
                .filter(|&p| free[p])
                .min_by_key(|&p| cost(p))
                .expect("device wide enough")
        };
        layout[l] = pick;
        free[pick] = false;
        placed.push(l);
    }
    layout
}

fn check_terminal_measurements(c: &Circuit) -> Result<(), CompileError> {
    let mut measured = vec![false; c.n_qubits];
    for g in &c.gates {
        if g.kind == GateKind::Measure {
            measured[g.qubits[0]] = true;
        } else if let Some(&q) = g.qubits.iter().find(|&&q| measured[q]) {
            return Err(CompileError::MidCircuitMeasurement(q));
        }
    }
    Ok(())
}

fn validate_layout(layout: &[usize], n_log: usize, g: &CouplingGraph) -> Result<(), CompileError> {
    let usable: BTreeSet<usize> = g.usable().into_iter().collect();
    let distinct: BTreeSet<usize> = layout.iter().copied().collect();
    if layout.len() != n_log
        || distinct.len() != n_log
        || !layout.iter().all(|p| usable.contains(p))
    {
        return Err(CompileError::InvalidLayout);
    }
    Ok(())
}

fn reversed(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().cloned().collect()
}

/// R stage. Output qubits are physical; SWAPs appear as `swap` gates.
pub fn route(
    c: &Circuit,
    g: &CouplingGraph,
    cfg: &RouterConfig,
) -> Result<RoutedCircuit, CompileError> {
    if let Some(gate) = c
        .gates
        .iter()
        .find(|x| x.qubits.len() > 2 && x.kind != GateKind::Barrier)
    {
        return Err(CompileError::NotTwoLocal(gate.kind));
    }
    check_terminal_measurements(c)?;
    if !g.is_connected() {
        return Err(CompileError::Disconnected);
    }
    let n_log = c.n_qubits;
    let n_usable = g.usable().len();
    if n_log > n_usable {
        return Err(CompileError::TooWide {
            logical: n_log,
            physical: n_usable,
        });
    }
    if let Some(l) = &cfg.initial_layout {
        validate_layout(l, n_log, g)?;
    }
    let measures: Vec<usize> = c.measured_qubits();
    let body: Vec<Gate> = c
        .gates
        .iter()
        .filter(|x| x.kind != GateKind::Measure)
        .cloned()
        .collect();

    let (gates, initial_layout, final_layout, swap_count) = if g.is_all_to_all() {
        let layout = cfg
            .initial_layout
            .clone()
            .unwrap_or_else(|| (0..n_log).collect());
        let gates = body
            .iter()
            .map(|x| {
                let mut x = x.clone();
                for q in &mut x.qubits {
                    *q = layout[*q];
                }
                x
            })
            .collect();
        (gates, layout.clone(), layout, 0)
    } else {
        let dist = g.distance_matrix();
        let stochastic = cfg.algorithm == RouterAlgorithm::StochasticLookahead;
        let mut router = Router {
            g,
            dist: &dist,
            window: cfg.lookahead_window,
            rng: stochastic.then(|| ChaCha8Rng::seed_from_u64(cfg.seed)),
        };
        let mut starts = Vec::new();
        let perfect = match cfg.initial_layout {
            Some(_) => None,
            None => perfect_layout(&body, g, n_log),
        };
        match (cfg.initial_layout.as_ref().or(perfect.as_ref()), stochastic) {
            (Some(l), _) => starts.push(l.clone()),
            (None, false) => starts.push(greedy_layout(&body, g, &dist, n_log)),
            (None, true) => {
                for _ in 0..cfg.layout_trials.max(1) {
                    let rng = router.rng.as_mut().expect("stochastic router is seeded");
                    let seed_layout = random_layout(g, n_log, rng);
                    let forward = router.pass(&body, &seed_layout);
                    starts.push(
                        router
                            .pass(&reversed(&body), &forward.final_layout)
                            .final_layout,
                    );
                }
            }
        }
        let mut best: Option<(Vec<usize>, Pass)> = None;
        for start in starts {
            let p = router.pass(&body, &start);
            if best.as_ref().is_none_or(|(_, b)| p.swaps < b.swaps) {
                best = Some((start, p));
            }
        }
        let (start, p) = best.expect("at least one trial");
        (p.gates, start, p.final_layout, p.swaps)
    };

    let mut circuit = Circuit::new(g.n);
    circuit.gates = gates;
    for l in measures {
        circuit.add(Gate::measure(final_layout[l]));
    }
    Ok(RoutedCircuit {
        circuit,
        initial_layout,
        final_layout,
        swap_count,
    })
}

/// Layout that maps logical qubit i to the i-th qubit of a simple path, when
/// the device has one that long.
pub fn chain_layout(g: &CouplingGraph, n: usize) -> Option<Vec<usize>> {
    g.find_path(n)
}
