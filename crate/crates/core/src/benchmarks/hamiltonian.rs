use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BenchmarkError;

/// Transverse-field Ising chain `H = J·Σ Z_i Z_{i+1} + h·Σ X_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub h: f64,
    pub t: f64,
}

impl HamiltonianSpec {
    pub fn tfim(n: usize) -> HamiltonianSpec {
        HamiltonianSpec {
            n,
            j: 1.0,
            h: 0.5,
            t: 1.0,
        }
    }

    /// Terms with their coefficients: ZZ bonds first, then X fields.
    pub fn terms(&self) -> Vec<(PauliTerm, f64)> {
        let mut out = Vec::with_capacity(2 * self.n);
        for i in 0..self.n.saturating_sub(1) {
            out.push((PauliTerm::Zz(i), self.j));
        }
        for i in 0..self.n {
            out.push((PauliTerm::X(i), self.h));
        }
        out
    }

    pub fn one_norm(&self) -> f64 {
        self.terms().iter().map(|(_, c)| c.abs()).sum()
    }
}

/// One TFIM term; `Zz(i)` couples sites i and i+1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliTerm {
    Zz(usize),
    X(usize),
}

/// Number of QDRIFT samples, `ceil((λt)²/(2ε))`.
///
/// Values within 1e-9 (relative) of an integer are taken as that integer so
/// that e.g. (14, 1, 0.05) gives 1960 despite rounding in the division.
pub fn qdrift_sample_count(lambda: f64, t: f64, epsilon: f64) -> Result<u64, BenchmarkError> {
    if !(lambda > 0.0 && t > 0.0 && epsilon > 0.0) {
        return Err(BenchmarkError::InvalidParameter(
            "qdrift λ, t and ε must be positive",
        ));
    }
    let x = (lambda * t) * (lambda * t) / (2.0 * epsilon);
    let r = libm::round(x);
    let n = if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r
    } else {
        libm::ceil(x)
    };
    Ok(n.max(1.0) as u64)
}

/// Draws `n_samples` terms i.i.d. with probability proportional to |coefficient|.
pub fn sample_qdrift_terms(
    spec: &HamiltonianSpec,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<PauliTerm>, BenchmarkError> {
    let terms: Vec<(PauliTerm, f64)> = spec
        .terms()
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .collect();
    if terms.is_empty() {
        return Err(BenchmarkError::InvalidParameter(
            "Hamiltonian has no nonzero terms",
        ));
    }
    let mut cumulative = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for (_, c) in &terms {
        acc += c.abs();
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples as usize);
    for _ in 0..n_samples {
        let u = rng.random::<f64>() * acc;
        let k = cumulative.partition_point(|&c| c <= u).min(terms.len() - 1);
        out.push(terms[k].0);
    }
    Ok(out)
}
