//! Coupling graphs.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::CompileError;
use crate::noise::CalibrationModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GraphKind {
    HeavyHex,
    AllToAll,
    Custom,
}

/// Undirected device connectivity. Qubits without any edge are unusable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct CouplingGraph {
    pub n: usize,
    edges: BTreeSet<(usize, usize)>,
    pub kind: GraphKind,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    kind: GraphKind,
}

impl TryFrom<GraphFile> for CouplingGraph {
    type Error = CompileError;

    fn try_from(f: GraphFile) -> Result<Self, Self::Error> {
        CouplingGraph::new(f.n, f.edges.iter().map(|e| (e[0], e[1])), f.kind)
    }
}

impl From<CouplingGraph> for GraphFile {
    fn from(g: CouplingGraph) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            kind: g.kind,
        }
    }
}

/// Heavy-hex row width and the bridge columns below even and odd rows.
const HEAVY_HEX_WIDTH: usize = 16;
const BRIDGES_EVEN: [usize; 4] = [3, 7, 11, 15];
const BRIDGES_ODD: [usize; 4] = [1, 5, 9, 13];

impl CouplingGraph {
    pub fn new<I>(n: usize, edges: I, kind: GraphKind) -> Result<CouplingGraph, CompileError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(CompileError::BadEdge(a, b));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(CouplingGraph {
            n,
            edges: set,
            kind,
            adjacency,
        })
    }

    pub fn all_to_all(n: usize) -> CouplingGraph {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        CouplingGraph::new(n, edges, GraphKind::AllToAll).expect("valid edges")
    }

    /// Path 0–1–…–(n−1).
    pub fn line(n: usize) -> CouplingGraph {
        let edges = (1..n).map(|b| (b - 1, b));
        CouplingGraph::new(n, edges, GraphKind::Custom).expect("valid edges")
    }

    /// Heavy-hex lattice of 16-qubit rows joined by 4 bridge qubits per gap,
    /// with enough rows to hold `target_qubits`. 8 rows give 156 qubits.
    pub fn heavy_hex(target_qubits: usize) -> CouplingGraph {
        let per_row = HEAVY_HEX_WIDTH + BRIDGES_EVEN.len();
        let rows = (target_qubits + BRIDGES_EVEN.len())
            .div_ceil(per_row)
            .max(1);
        let mut edges = Vec::new();
        let mut row_start = Vec::with_capacity(rows);
        let mut next = 0;
        for r in 0..rows {
            row_start.push(next);
            next += HEAVY_HEX_WIDTH;
            if r + 1 < rows {
                next += BRIDGES_EVEN.len();
            }
        }
        for r in 0..rows {
            let s = row_start[r];
            for c in 1..HEAVY_HEX_WIDTH {
                edges.push((s + c - 1, s + c));
            }
            if r + 1 < rows {
                let cols = if r % 2 == 0 {
                    BRIDGES_EVEN
                } else {
                    BRIDGES_ODD
                };
                for (i, &c) in cols.iter().enumerate() {
                    let bridge = s + HEAVY_HEX_WIDTH + i;
                    edges.push((s + c, bridge));
                    edges.push((bridge, row_start[r + 1] + c));
                }
            }
        }
        CouplingGraph::new(next, edges, GraphKind::HeavyHex).expect("valid edges")
    }

    /// The default 156-qubit superconducting device.
    pub fn heavy_hex_156() -> CouplingGraph {
        CouplingGraph::heavy_hex(156)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn is_all_to_all(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Qubits with at least one edge; every qubit when there are no edges.
    pub fn usable(&self) -> Vec<usize> {
        if self.edges.is_empty() {
            return (0..self.n).collect();
        }
        (0..self.n).filter(|&q| self.degree(q) > 0).collect()
    }

    /// True when the usable qubits form one component.
    pub fn is_connected(&self) -> bool {
        let usable = self.usable();
        let Some(&start) = usable.first() else {
            return true;
        };
        let d = self.bfs(start);
        usable.iter().all(|&q| d[q] != usize::MAX)
    }

    /// Hop distances from `src`; `usize::MAX` where unreachable.
    pub fn bfs(&self, src: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        d[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if d[v] == usize::MAX {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        d
    }

    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|q| self.bfs(q)).collect()
    }

    /// A simple path through `len` qubits, found by depth-first search from
    /// each start qubit in index order.
    pub fn find_path(&self, len: usize) -> Option<Vec<usize>> {
        if len == 0 {
            return Some(Vec::new());
        }
        let mut budget = 200_000usize;
        for start in self.usable() {
            let mut path = vec![start];
            let mut on_path = vec![false; self.n];
            on_path[start] = true;
            if self.extend_path(&mut path, &mut on_path, len, &mut budget) {
                return Some(path);
            }
            if budget == 0 {
                break;
            }
        }
        None
    }

    fn extend_path(
        &self,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        len: usize,
        budget: &mut usize,
    ) -> bool {
        if path.len() == len {
            return true;
        }
        let last = *path.last().expect("nonempty");
        for &v in &self.adjacency[last] {
            if on_path[v] {
                continue;
            }
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            on_path[v] = true;
            path.push(v);
            if self.extend_path(path, on_path, len, budget) {
                return true;
            }
            path.pop();
            on_path[v] = false;
        }
        false
    }

    /// Graph without the edges whose calibrated 2Q error exceeds `threshold`.
    pub fn filter_edges(
        &self,
        cal: &CalibrationModel,
        threshold: f64,
    ) -> Result<CouplingGraph, CompileError> {
        let mut kept = Vec::new();
        for (a, b) in self.edges() {
            if cal.edge_p2q(a, b)? <= threshold {
                kept.push((a, b));
            }
        }
        let kind = if kept.len() == self.edges.len() {
            self.kind
        } else {
            GraphKind::Custom
        };
        let g = CouplingGraph::new(self.n, kept, kind)?;
        if !g.is_connected() {
            return Err(CompileError::Disconnected);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseParams;

    #[test]
    fn heavy_hex_default() {
        let g = CouplingGraph::heavy_hex_156();
        assert_eq!(g.n, 156);
        assert_eq!(g.n_edges(), 176);
        assert!((0..g.n).all(|q| g.degree(q) <= 3 && g.degree(q) >= 1));
        assert!(g.is_connected());
        assert_eq!(g.usable().len(), 156);
        for t in [5, 16, 17, 40, 100] {
            let h = CouplingGraph::heavy_hex(t);
            assert!(h.n >= t && h.is_connected());
            assert!((0..h.n).all(|q| h.degree(q) <= 3));
        }
    }

    #[test]
    fn bridge_distances() {
        let g = CouplingGraph::heavy_hex(36);
        let d = g.distance_matrix();
        assert_eq!(d[3][7], 4);
        assert_eq!(d[3][23], 2);
        assert_eq!(d[16][17], 6);
    }

    #[test]
    fn filtering() {
        let g = CouplingGraph::line(4);
        let mut cal = CalibrationModel::uniform(NoiseParams::IBM_HERON);
        for (a, b) in g.edges() {
            cal.set_p2q(a, b, 0.003);
        }
        assert_eq!(g.filter_edges(&cal, 0.10).unwrap(), g);
        cal.set_p2q(2, 3, 0.8);
        let f = g.filter_edges(&cal, 0.10).unwrap();
        assert!(!f.has_edge(2, 3));
        assert_eq!(f.usable(), vec![0, 1, 2]);
        cal.set_p2q(2, 3, 0.003);
        cal.set_p2q(1, 2, 0.8);
        assert_eq!(g.filter_edges(&cal, 0.10), Err(CompileError::Disconnected));
        let bare = CalibrationModel::uniform(NoiseParams::IBM_HERON);
        assert!(g.filter_edges(&bare, 0.10).is_err());
    }

    #[test]
    fn paths() {
        let g = CouplingGraph::heavy_hex_156();
        let p = g.find_path(10).unwrap();
        assert_eq!(p.len(), 10);
        assert!(p.windows(2).all(|w| g.has_edge(w[0], w[1])));
        assert!(CouplingGraph::line(3).find_path(4).is_none());
    }

    #[test]
    fn json_shape() {
        let g = CouplingGraph::line(3);
        let f: GraphFile = g.clone().into();
        assert_eq!(f.edges, vec![[0, 1], [1, 2]]);
        assert_eq!(CouplingGraph::try_from(f).unwrap(), g);
        let bad = GraphFile {
            n: 2,
            edges: vec![[0, 2]],
            kind: GraphKind::Custom,
        };
        assert!(CouplingGraph::try_from(bad).is_err());
    }
}
