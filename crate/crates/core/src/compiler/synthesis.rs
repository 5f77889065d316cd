//! H stage: lowers multi-controlled and composite gates to {CX, 1Q}.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::CompileError;
use crate::circuit::{Circuit, Gate, GateKind};
use crate::costing::CP_PI_TOL;

/// Decomposition used for MCX/MCZ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum McxStrategy {
    /// Gray-code phase polynomial up to five qubits, borrowed-ancilla
    /// splitting above that.
    Compact,
    /// Controlled square-root splitting all the way down to CP.
    Recursive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PauliEvolution {
    CxLadder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SynthesisPolicy {
    pub mcx_strategy: McxStrategy,
    #[serde(default = "default_evolution")]
    pub pauli_evolution: PauliEvolution,
    #[serde(default)]
    pub local_cleanup: bool,
}

fn default_evolution() -> PauliEvolution {
    PauliEvolution::CxLadder
}

impl SynthesisPolicy {
    pub const COMPACT: SynthesisPolicy = SynthesisPolicy {
        mcx_strategy: McxStrategy::Compact,
        pauli_evolution: PauliEvolution::CxLadder,
        local_cleanup: false,
    };
    pub const RECURSIVE: SynthesisPolicy = SynthesisPolicy {
        mcx_strategy: McxStrategy::Recursive,
        pauli_evolution: PauliEvolution::CxLadder,
        local_cleanup: false,
    };
}

/// Largest MCZ handled by the gray-code construction (2^m − 2 CX).
const GRAY_CODE_MAX: usize = 5;

struct Emitter {
    out: Circuit,
    strategy: McxStrategy,
}

impl Emitter {
    fn push(&mut self, g: Gate) {
        self.out.add(g);
    }

    fn cx(&mut self, c: usize, t: usize) {
        self.push(Gate::cx(c, t));
    }

    fn h(&mut self, q: usize) {
        self.push(Gate::h(q));
    }

    fn p(&mut self, theta: f64, q: usize) {
        self.push(Gate::p(theta, q));
    }

    /// Toffoli with 6 CX.
    fn ccx(&mut self, a: usize, b: usize, t: usize) {
        self.h(t);
        self.cx(b, t);
        self.p(-FRAC_PI_4, t);
        self.cx(a, t);
        self.p(FRAC_PI_4, t);
        self.cx(b, t);
        self.p(-FRAC_PI_4, t);
        self.cx(a, t);
        self.p(FRAC_PI_4, b);
        self.p(FRAC_PI_4, t);
        self.h(t);
        self.cx(a, b);
        self.p(FRAC_PI_4, a);
        self.p(-FRAC_PI_4, b);
        self.cx(a, b);
    }

    /// Toffoli up to a diagonal relative phase, 3 CX. Self-inverse.
    fn rccx(&mut self, a: usize, b: usize, t: usize) {
        self.h(t);
        self.p(FRAC_PI_4, t);
        self.cx(b, t);
        self.p(-FRAC_PI_4, t);
        self.cx(a, t);
        self.p(FRAC_PI_4, t);
        self.cx(b, t);
        self.p(-FRAC_PI_4, t);
        self.h(t);
    }

    /// Multi-controlled X; `dirty` qubits may hold any state and are restored.
    fn mcx(&mut self, controls: &[usize], t: usize, dirty: &[usize]) {
        let k = controls.len();
        match k {
            0 => self.push(Gate::x(t)),
            1 => self.cx(controls[0], t),
            2 => self.ccx(controls[0], controls[1], t),
            _ if dirty.len() >= k - 2 => self.v_chain(controls, t, &dirty[..k - 2]),
            _ if !dirty.is_empty() => {
                let a = dirty[0];
                let k1 = k.div_ceil(2);
                let (c1, c2) = controls.split_at(k1);
                let mut spare1: Vec<usize> = c2.to_vec();
                spare1.push(t);
                let mut c2a: Vec<usize> = c2.to_vec();
                c2a.push(a);
                for _ in 0..2 {
                    self.mcx(c1, a, &spare1);
                    self.mcx(&c2a, t, c1);
                }
            }
            _ => {
                self.h(t);
                let mut all = controls.to_vec();
                all.push(t);
                self.mc_phase(PI, &all);
                self.h(t);
            }
        }
    }

    /// k ≥ 3 controls with k − 2 borrowed ancillas, 4(k − 2) Toffolis of
    /// which only the two acting on `t` need to be exact.
    fn v_chain(&mut self, c: &[usize], t: usize, a: &[usize]) {
        let k = c.len();
        for _ in 0..2 {
            self.ccx(c[k - 1], a[k - 3], t);
            for i in (0..k - 3).rev() {
                self.rccx(c[i + 2], a[i], a[i + 1]);
            }
            self.rccx(c[0], c[1], a[0]);
            for i in 0..k - 3 {
                self.rccx(c[i + 2], a[i], a[i + 1]);
            }
        }
    }

    /// Phase `e^{iθ}` on the all-ones state of `qs`.
    fn mc_phase(&mut self, theta: f64, qs: &[usize]) {
        let m = qs.len();
        match m {
            0 => {}
            1 => self.p(theta, qs[0]),
            _ if self.strategy == McxStrategy::Compact && m <= GRAY_CODE_MAX => {
                self.gray_code_phase(theta, qs)
            }
            2 => self.cp(theta, qs[0], qs[1]),
            _ => {
                // θ/2 on (c, t) when c is set, flip c on the rest, −θ/2, unflip,
                // then θ/2 on the rest together with t.
                let t = qs[m - 1];
                let c = qs[m - 2];
                let rest = &qs[..m - 2];
                self.cp(theta / 2.0, c, t);
                self.mcx(rest, c, &[t]);
                self.cp(-theta / 2.0, c, t);
                self.mcx(rest, c, &[t]);
                let mut sub: Vec<usize> = rest.to_vec();
                sub.push(t);
                self.mc_phase(theta / 2.0, &sub);
            }
        }
    }

    /// Phase polynomial `θ·x_1⋯x_m = Σ_S w_S·parity_S(x)` over all nonempty S,
    /// each parity accumulated on the last qubit along a gray code.
    fn gray_code_phase(&mut self, theta: f64, qs: &[usize]) {
        let m_total = qs.len();
        let scale = theta / libm::pow(2.0, (m_total - 1) as f64);
        let weight = |size: u32| if size % 2 == 1 { scale } else { -scale };
        let mut m = m_total;
        while m > 0 {
            let t = qs[m - 1];
            self.p(weight(1), t);
            let words = 1usize << (m - 1);
            for k in 1..words {
                let bit = k.trailing_zeros() as usize;
                let gray = k ^ (k >> 1);
                self.cx(qs[bit], t);
                self.p(weight(gray.count_ones() + 1), t);
            }
            if m > 1 {
                self.cx(qs[m - 2], t);
            }
            m -= 1;
        }
    }

    fn cp(&mut self, theta: f64, c: usize, t: usize) {
        lower_cp(theta, c, t, &mut self.out);
    }
}

/// `CP(θ)` as CX + phase gates; `CP(π)` becomes H·CX·H.
fn lower_cp(theta: f64, c: usize, t: usize, out: &mut Circuit) {
    if (theta.abs() - PI).abs() <= CP_PI_TOL {
        out.add(Gate::h(t));
        out.add(Gate::cx(c, t));
        out.add(Gate::h(t));
        return;
    }
    out.add(Gate::p(theta / 2.0, c));
    out.add(Gate::cx(c, t));
    out.add(Gate::p(-theta / 2.0, t));
    out.add(Gate::cx(c, t));
    out.add(Gate::p(theta / 2.0, t));
}

fn zz_ladder(theta: f64, a: usize, b: usize, out: &mut Circuit) {
    out.add(Gate::cx(a, b));
    out.add(Gate::rz(theta, b));
    out.add(Gate::cx(a, b));
}

/// Rewrites a non-CX two-qubit gate into CX and single-qubit gates.
/// Returns false for kinds it leaves alone.
pub(crate) fn lower_two_qubit(g: &Gate, out: &mut Circuit) -> bool {
    let theta = g.theta();
    let (a, b) = match g.qubits.as_slice() {
        [a, b] => (*a, *b),
        _ => return false,
    };
    match g.kind {
        GateKind::Cp => lower_cp(theta, a, b, out),
        GateKind::Crz => {
            out.add(Gate::rz(theta / 2.0, b));
            out.add(Gate::cx(a, b));
            out.add(Gate::rz(-theta / 2.0, b));
            out.add(Gate::cx(a, b));
        }
        GateKind::Rzz => zz_ladder(theta, a, b, out),
        GateKind::Rxx => {
            out.add(Gate::h(a));
            out.add(Gate::h(b));
            zz_ladder(theta, a, b, out);
            out.add(Gate::h(a));
            out.add(Gate::h(b));
        }
        GateKind::Ryy => {
            out.add(Gate::rx(FRAC_PI_2, a));
            out.add(Gate::rx(FRAC_PI_2, b));
            zz_ladder(theta, a, b, out);
            out.add(Gate::rx(-FRAC_PI_2, a));
            out.add(Gate::rx(-FRAC_PI_2, b));
        }
        GateKind::Swap => {
            out.add(Gate::cx(a, b));
            out.add(Gate::cx(b, a));
            out.add(Gate::cx(a, b));
        }
        _ => return false,
    }
    true
}

/// H stage. CX, CZ, MS and single-qubit gates pass through.
pub fn synthesize(c: &Circuit, policy: &SynthesisPolicy) -> Result<Circuit, CompileError> {
    let mut e = Emitter {
        out: Circuit::new(c.n_qubits),
        strategy: policy.mcx_strategy,
    };
    for g in &c.gates {
        match g.kind {
            GateKind::Mcz => e.mc_phase(PI, &g.qubits),
            GateKind::Mcx => {
                let (controls, t) = g.qubits.split_at(g.qubits.len() - 1);
                let t = t[0];
                let dirty: Vec<usize> = (0..c.n_qubits).filter(|q| !g.qubits.contains(q)).collect();
                e.mcx(controls, t, &dirty);
            }
            GateKind::GlobalPhase => {}
            _ => {
                if !lower_two_qubit(g, &mut e.out) {
                    e.push(g.clone());
                }
            }
        }
    }
    Ok(if policy.local_cleanup {
        cancel_inverse_pairs(&e.out)
    } else {
        e.out
    })
}

fn symmetric(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::Cz
            | GateKind::Swap
            | GateKind::Rzz
            | GateKind::Rxx
            | GateKind::Ryy
            | GateKind::Ms
            | GateKind::Cp
    )
}

fn same_support(a: &Gate, b: &Gate) -> bool {
    if a.qubits == b.qubits {
        return true;
    }
    symmetric(a.kind)
        && a.qubits.len() == 2
        && a.qubits[0] == b.qubits[1]
        && a.qubits[1] == b.qubits[0]
}

/// True when `b` directly after `a` is the identity.
fn is_inverse_pair(a: &Gate, b: &Gate) -> bool {
    if a.kind != b.kind || !same_support(a, b) {
        return false;
    }
    match a.kind {
        GateKind::H | GateKind::X | GateKind::Cx | GateKind::Cz | GateKind::Swap => true,
        GateKind::Rx
        | GateKind::Ry
        | GateKind::Rz
        | GateKind::P
        | GateKind::U1
        | GateKind::Cp
        | GateKind::Crz
        | GateKind::Rxx
        | GateKind::Ryy
        | GateKind::Rzz => (a.theta() + b.theta()).abs() <= 1e-12,
        _ => false,
    }
}

/// Removes gate pairs that are adjacent on all their qubits and multiply to
/// the identity, repeating until none remain.
pub fn cancel_inverse_pairs(c: &Circuit) -> Circuit {
    let mut kept: Vec<Option<Gate>> = Vec::with_capacity(c.gates.len());
    let mut last: Vec<Vec<usize>> = alloc::vec![Vec::new(); c.n_qubits];
    for g in &c.gates {
        let top = g.qubits.first().and_then(|&q| last[q].last().copied());
        let cancel = match top {
            Some(i) if g.qubits.iter().all(|&q| last[q].last() == Some(&i)) => {
                let prev = kept[i].as_ref().expect("live gate");
                prev.qubits.len() == g.qubits.len() && is_inverse_pair(prev, g)
            }
            _ => false,
        };
        if cancel {
            let i = top.expect("checked above");
            kept[i] = None;
            for &q in &g.qubits {
                last[q].pop();
            }
        } else {
            let i = kept.len();
            kept.push(Some(g.clone()));
            for &q in &g.qubits {
                last[q].push(i);
            }
        }
    }
    Circuit {
        n_qubits: c.n_qubits,
        gates: kept.into_iter().flatten().collect(),
    }
}
