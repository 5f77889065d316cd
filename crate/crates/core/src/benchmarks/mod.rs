//! Seeded generators for the eight benchmark circuits.

mod hamiltonian;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};

pub use hamiltonian::{qdrift_sample_count, sample_qdrift_terms, HamiltonianSpec, PauliTerm};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BenchmarkError {
    #[error("{algorithm} is not defined for n = {n}: {reason}")]
    Unsupported {
        algorithm: Algorithm,
        n: usize,
        reason: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ghz,
    Grover,
    Qdrift,
    Qft,
    Qpe,
    Trotter,
    Bv,
    Qaoa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Ghz,
        Algorithm::Grover,
        Algorithm::Qdrift,
        Algorithm::Qft,
        Algorithm::Qpe,
        Algorithm::Trotter,
        Algorithm::Bv,
        Algorithm::Qaoa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ghz => "ghz",
            Algorithm::Grover => "grover",
            Algorithm::Qdrift => "qdrift",
            Algorithm::Qft => "qft",
            Algorithm::Qpe => "qpe",
            Algorithm::Trotter => "trotter",
            Algorithm::Bv => "bv",
            Algorithm::Qaoa => "qaoa",
        }
    }

    /// Case-insensitive lookup by name.
    pub fn from_name(s: &str) -> Option<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
    }

    /// Whether the circuit's output is a single basis state, scored by
    /// success probability rather than Hellinger fidelity.
    pub fn has_point_output(self) -> bool {
        matches!(self, Algorithm::Grover | Algorithm::Bv | Algorithm::Qft)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const TROTTER_STEP_CHOICES: [u32; 6] = [1, 2, 4, 6, 8, 10];

fn default_seed() -> u64 {
    42
}
fn default_lambda() -> f64 {
    14.0
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_four() -> usize {
    4
}
fn default_one() -> usize {
    1
}
fn default_angle() -> f64 {
    0.5
}
fn default_j() -> f64 {
    1.0
}
fn default_h() -> f64 {
    0.5
}

/// TFIM coefficients shared by the Hamiltonian-simulation benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    #[serde(rename = "J", default = "default_j")]
    pub j: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_j")]
    pub t: f64,
}

impl Default for TfimParams {
    fn default() -> Self {
        TfimParams {
            j: 1.0,
            h: 0.5,
            t: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub algorithm: Algorithm,
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// First-order Trotter steps; 4 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trotter_steps: Option<u32>,
    #[serde(default = "default_lambda")]
    pub qdrift_lambda: f64,
    #[serde(default = "default_epsilon")]
    pub qdrift_epsilon: f64,
    /// Overrides the sample count derived from λ and ε.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qdrift_samples: Option<u64>,
    #[serde(default = "default_four")]
    pub qpe_ancilla: usize,
    #[serde(default = "default_four")]
    pub qpe_reps: usize,
    #[serde(default = "default_one")]
    pub qaoa_p: usize,
    #[serde(default = "default_angle")]
    pub qaoa_gamma: f64,
    #[serde(default = "default_angle")]
    pub qaoa_beta: f64,
    #[serde(default)]
    pub tfim: TfimParams,
}

impl BenchmarkSpec {
    pub fn new(algorithm: Algorithm, n: usize) -> BenchmarkSpec {
        BenchmarkSpec {
            algorithm,
            n,
            seed: 42,
            trotter_steps: None,
            qdrift_lambda: 14.0,
            qdrift_epsilon: 0.05,
            qdrift_samples: None,
            qpe_ancilla: 4,
            qpe_reps: 4,
            qaoa_p: 1,
            qaoa_gamma: 0.5,
            qaoa_beta: 0.5,
            tfim: TfimParams::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> BenchmarkSpec {
        self.seed = seed;
        self
    }

    pub fn hamiltonian(&self, n: usize) -> HamiltonianSpec {
        HamiltonianSpec {
            n,
            j: self.tfim.j,
            h: self.tfim.h,
            t: self.tfim.t,
        }
    }

    pub fn steps(&self) -> u32 {
        self.trotter_steps.unwrap_or(4)
    }

    pub fn validate(&self) -> Result<(), BenchmarkError> {
        let unsupported = |reason| BenchmarkError::Unsupported {
            algorithm: self.algorithm,
            n: self.n,
            reason,
        };
        if self.n == 0 {
            return Err(unsupported("at least one qubit is required"));
        }
        if let Some(s) = self.trotter_steps {
            if !TROTTER_STEP_CHOICES.contains(&s) {
                return Err(BenchmarkError::InvalidParameter(
                    "trotter_steps must be one of 1, 2, 4, 6, 8, 10",
                ));
            }
        }
        let finite = [
            self.qdrift_lambda,
            self.qdrift_epsilon,
            self.qaoa_gamma,
            self.qaoa_beta,
            self.tfim.j,
            self.tfim.h,
            self.tfim.t,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(BenchmarkError::InvalidParameter(
                "parameters must be finite",
            ));
        }
        match self.algorithm {
            Algorithm::Grover if self.n < 2 => {
                Err(unsupported("the oracle needs at least 2 qubits"))
            }
            Algorithm::Qaoa if self.n < 4 || self.n % 2 == 1 => Err(unsupported(
                "a 3-regular graph needs an even n of at least 4",
            )),
            Algorithm::Qpe if self.qpe_ancilla == 0 || self.n <= self.qpe_ancilla => Err(
                unsupported("n must exceed qpe_ancilla, which must be positive"),
            ),
            Algorithm::Qpe if self.qpe_reps == 0 => Err(BenchmarkError::InvalidParameter(
                "qpe_reps must be positive",
            )),
            Algorithm::Qaoa if self.qaoa_p == 0 => {
                Err(BenchmarkError::InvalidParameter("qaoa_p must be positive"))
            }
            Algorithm::Qdrift if self.qdrift_samples == Some(0) => Err(
                BenchmarkError::InvalidParameter("qdrift_samples must be positive"),
            ),
            _ => Ok(()),
        }
    }
}

/// `round(π/4 · √(2^n))`, halves rounded up.
pub fn grover_iterations(n: usize) -> usize {
    let x = PI / 4.0 * libm::pow(2.0, n as f64 / 2.0);
    libm::floor(x + 0.5) as usize
}

/// Grover's marked basis state.
pub fn grover_marked(n: usize) -> u64 {
    if n >= 6 {
        42
    } else {
        (1u64 << n) - 1
    }
}

const BV12_SECRET: &str = "110010100110";

/// Bernstein–Vazirani secret; bit i belongs to input qubit i.
pub fn bv_secret(n: usize, seed: u64) -> Vec<bool> {
    if n == 12 && seed == 42 {
        return BV12_SECRET.bytes().map(|b| b == b'1').collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// Seeded simple 3-regular graph on `n` vertices, edges as sorted `(a, b)`
/// pairs in sorted order.
pub fn regular3_graph(n: usize, seed: u64) -> Result<Vec<(usize, usize)>, BenchmarkError> {
    if n < 4 || n % 2 == 1 {
        return Err(BenchmarkError::Unsupported {
            algorithm: Algorithm::Qaoa,
            n,
            reason: "a 3-regular graph needs an even n of at least 4",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    'attempt: for _ in 0..10_000 {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = stubs
            .chunks_exact(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                continue 'attempt;
            }
        }
        if edges.iter().any(|&(a, b)| a == b) {
            continue;
        }
        return Ok(edges);
    }
    Err(BenchmarkError::InvalidParameter(
        "no simple 3-regular pairing found",
    ))
}

/// Builds the pre-synthesis circuit for `spec`, terminal measurements included.
pub fn generate(spec: &BenchmarkSpec) -> Result<Circuit, BenchmarkError> {
    spec.validate()?;
    let n = spec.n;
    let c = match spec.algorithm {
        Algorithm::Ghz => ghz(n),
        Algorithm::Grover => grover(n),
        Algorithm::Bv => bv(&bv_secret(n, spec.seed)),
        Algorithm::Qft => qft_benchmark(n),
        Algorithm::Trotter => trotter(&spec.hamiltonian(n), spec.steps()),
        Algorithm::Qdrift => qdrift(spec)?,
        Algorithm::Qaoa => qaoa(spec)?,
        Algorithm::Qpe => qpe(spec),
    };
    Ok(c)
}

fn measure_all(c: &mut Circuit, qubits: core::ops::Range<usize>) {
    for q in qubits {
        c.add(Gate::measure(q));
    }
}

fn ghz(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    c.add(Gate::h(0));
    for q in 1..n {
        c.add(Gate::cx(q - 1, q));
    }
    measure_all(&mut c, 0..n);
    c
}

/// Phase flip on every qubit being 1, as MCZ, CZ or Z depending on width.
fn all_ones_phase(c: &mut Circuit, n: usize) {
    match n {
        1 => c.add(Gate::p(PI, 0)),
        2 => c.add(Gate::cz(0, 1)),
        _ => c.add(Gate::mcz((0..n).collect())),
    }
}

fn grover(n: usize) -> Circuit {
    let marked = grover_marked(n);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.add(Gate::h(q));
    }
    let zeros: Vec<usize> = (0..n).filter(|&q| (marked >> q) & 1 == 0).collect();
    for _ in 0..grover_iterations(n) {
        for &q in &zeros {
            c.add(Gate::x(q));
        }
        all_ones_phase(&mut c, n);
        for &q in &zeros {
            c.add(Gate::x(q));
        }
        for q in 0..n {
            c.add(Gate::h(q));
            c.add(Gate::x(q));
        }
        all_ones_phase(&mut c, n);
        for q in 0..n {
            c.add(Gate::x(q));
            c.add(Gate::h(q));
        }
    }
    measure_all(&mut c, 0..n);
    c
}

/// Inputs are qubits `0..n`, the shared target is qubit `n`.
fn bv(secret: &[bool]) -> Circuit {
    let n = secret.len();
    let mut c = Circuit::new(n + 1);
    c.add(Gate::x(n));
    for q in 0..=n {
        c.add(Gate::h(q));
    }
    for (q, &bit) in secret.iter().enumerate() {
        if bit {
            c.add(Gate::cx(q, n));
        }
    }
    for q in 0..n {
        c.add(Gate::h(q));
    }
    measure_all(&mut c, 0..n);
    c
}

/// QFT on `qubits` (first entry most significant), with terminal swaps.
fn qft_gates(c: &mut Circuit, qubits: &[usize]) {
    let n = qubits.len();
    for j in 0..n {
        c.add(Gate::h(qubits[j]));
        for k in j + 1..n {
            let angle = PI / libm::pow(2.0, (k - j) as f64);
            c.add(Gate::cp(angle, qubits[k], qubits[j]));
        }
    }
    for j in 0..n / 2 {
        c.add(Gate::swap(qubits[j], qubits[n - 1 - j]));
    }
}

/// Exact inverse of [`qft_gates`].
fn inverse_qft_gates(c: &mut Circuit, qubits: &[usize]) {
    let n = qubits.len();
    for j in (0..n / 2).rev() {
        c.add(Gate::swap(qubits[j], qubits[n - 1 - j]));
    }
    for j in (0..n).rev() {
        for k in (j + 1..n).rev() {
            let angle = PI / libm::pow(2.0, (k - j) as f64);
            c.add(Gate::cp(-angle, qubits[k], qubits[j]));
        }
        c.add(Gate::h(qubits[j]));
    }
}

/// Bit pattern the QFT benchmark maps to: qubit j reads 1 for even j.
pub fn qft_target(n: usize) -> Vec<bool> {
    (0..n).map(|j| j % 2 == 0).collect()
}

/// Correct output of a point-output benchmark, character i belonging to the
/// i-th measured qubit. Grover's is only the most likely outcome.
pub fn expected_bitstring(spec: &BenchmarkSpec) -> Option<String> {
    let bits: Vec<bool> = match spec.algorithm {
        Algorithm::Grover => {
            let m = grover_marked(spec.n);
            (0..spec.n).map(|i| (m >> i) & 1 == 1).collect()
        }
        Algorithm::Bv => bv_secret(spec.n, spec.seed),
        Algorithm::Qft => qft_target(spec.n),
        _ => return None,
    };
    Some(bits.iter().map(|&b| if b { '1' } else { '0' }).collect())
}

/// QFT applied to the Fourier state of [`qft_target`], so the ideal output
/// is a single bitstring while the transform itself is unchanged.
fn qft_benchmark(n: usize) -> Circuit {
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n);
    for (q, phase) in fourier_phases(&qft_target(n)).into_iter().enumerate() {
        c.add(Gate::h(q));
        c.add(Gate::p(phase, q));
    }
    qft_gates(&mut c, &qubits);
    measure_all(&mut c, 0..n);
    c
}

/// Per-qubit phases φ_q with `QFT† |target⟩ = ⊗_q (|0⟩ + e^{iφ_q}|1⟩)/√2`.
fn fourier_phases(target: &[bool]) -> Vec<f64> {
    let n = target.len();
    // With qubit 0 the most significant input bit, the transform sends
    // |s⟩ to ⊗_j (|0⟩ + e^{2πi s / 2^{j+1}} |1⟩) on qubit j after the
    // terminal swaps, so the inverse needs the conjugate phase.
    let s = target
        .iter()
        .fold(0u128, |acc, &b| (acc << 1) | u128::from(b));
    (0..n)
        .map(|j| {
            let denom = libm::pow(2.0, (j + 1) as f64);
            let frac = libm::fmod(s as f64, denom) / denom;
            -2.0 * PI * frac
        })
        .collect()
}

fn trotter_layer(c: &mut Circuit, sites: &[usize], j: f64, h: f64, dt: f64) {
    for w in sites.windows(2) {
        c.add(Gate::rzz(2.0 * j * dt, w[0], w[1]));
    }
    for &q in sites {
        c.add(Gate::rx(2.0 * h * dt, q));
    }
}

fn trotter(ham: &HamiltonianSpec, steps: u32) -> Circuit {
    let n = ham.n;
    let sites: Vec<usize> = (0..n).collect();
    let dt = ham.t / f64::from(steps);
    let mut c = Circuit::new(n);
    for _ in 0..steps {
        trotter_layer(&mut c, &sites, ham.j, ham.h, dt);
    }
    measure_all(&mut c, 0..n);
    c
}

fn qdrift(spec: &BenchmarkSpec) -> Result<Circuit, BenchmarkError> {
    let ham = spec.hamiltonian(spec.n);
    let lambda = ham.one_norm();
    let samples = match spec.qdrift_samples {
        Some(s) => s,
        None => qdrift_sample_count(spec.qdrift_lambda, ham.t, spec.qdrift_epsilon)?,
    };
    let terms = sample_qdrift_terms(&ham, samples, spec.seed)?;
    let tau = lambda * ham.t / samples as f64;
    let mut c = Circuit::new(spec.n);
    for term in terms {
        match term {
            PauliTerm::Zz(i) => c.add(Gate::rzz(2.0 * tau * ham.j.signum(), i, i + 1)),
            PauliTerm::X(i) => c.add(Gate::rx(2.0 * tau * ham.h.signum(), i)),
        }
    }
    measure_all(&mut c, 0..spec.n);
    Ok(c)
}

fn qaoa(spec: &BenchmarkSpec) -> Result<Circuit, BenchmarkError> {
    let n = spec.n;
    let edges = regular3_graph(n, spec.seed)?;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.add(Gate::h(q));
    }
    for _ in 0..spec.qaoa_p {
        for &(a, b) in &edges {
            c.add(Gate::rzz(2.0 * spec.qaoa_gamma, a, b));
        }
        for q in 0..n {
            c.add(Gate::rx(2.0 * spec.qaoa_beta, q));
        }
    }
    measure_all(&mut c, 0..n);
    Ok(c)
}

/// Ancillas are qubits `0..a`, the TFIM chain occupies `a..n`.
fn qpe(spec: &BenchmarkSpec) -> Circuit {
    let n = spec.n;
    let a = spec.qpe_ancilla;
    let ham = spec.hamiltonian(n - a);
    let sites: Vec<usize> = (a..n).collect();
    let dt = ham.t / spec.qpe_reps as f64;
    let mut c = Circuit::new(n);
    for q in 0..a {
        c.add(Gate::h(q));
    }
    for ctrl in 0..a {
        for _ in 0..1usize << ctrl {
            for _ in 0..spec.qpe_reps {
                for w in sites.windows(2) {
                    c.add(Gate::cx(w[0], w[1]));
                    c.add(Gate::crz(2.0 * ham.j * dt, ctrl, w[1]));
                    c.add(Gate::cx(w[0], w[1]));
                }
                for &q in &sites {
                    c.add(Gate::h(q));
                    c.add(Gate::crz(2.0 * ham.h * dt, ctrl, q));
                    c.add(Gate::h(q));
                }
            }
        }
    }
    let anc: Vec<usize> = (0..a).collect();
    inverse_qft_gates(&mut c, &anc);
    measure_all(&mut c, 0..a);
    c
}

#[cfg(test)]
fn degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut d = alloc::vec![0; n];
    for &(a, b) in edges {
        d[a] += 1;
        d[b] += 1;
    }
    d
}
