//! q-exponential weights, Tsallis entropy and the escort (q-) expectation.
//!
//! The q-exponential weight `[1 - (1-q) x]^(1/(1-q))` with `x = beta E` has
//! logarithm `ln(1 - (1-q) x) / (1-q) = -sum_n (1-q)^(n-1) x^n / n`, so it is
//! exactly an [`ExponentSeries`] with `alpha_(n-1) = (1-q)^(n-1) / n`.
//! [`series_vs_q_residual`] measures how fast the truncated series closes in
//! on the closed form.

use serde::Serialize;

use crate::distributions::{DiscreteDistribution, ExponentSeries};
use crate::error::{Error, Result};

/// Entropic index, inverse temperature and entropy unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParams {
    q: f64,
    beta: f64,
    k: f64,
}

impl QParams {
    pub fn new(q: f64, beta: f64, k: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::invalid(format!("q must be finite, got {q}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!("beta must be finite and positive, got {beta}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("k must be finite and positive, got {k}")));
        }
        Ok(QParams { q, beta, k })
    }

    /// `k = 1`.
    pub fn with_unit_k(q: f64, beta: f64) -> Result<Self> {
        Self::new(q, beta, 1.0)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn is_boltzmann_gibbs(&self) -> bool {
        self.q == 1.0
    }
}

/// Coefficient `c_n` of `(beta E)^n` in the exponent of the q-exponential:
/// `c_1 = 1`, `c_n = (1-q)^(n-1) / n`.
pub fn q_series_coefficient(n: u32, q: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("series coefficients start at n = 1"));
    }
    Ok((1.0 - q).powi(n as i32 - 1) / f64::from(n))
}

/// Exponent series truncated after `(beta E)^order` that approximates the
/// q-exponential weight.
pub fn q_exponent_series(p: &QParams, order: u32) -> Result<ExponentSeries> {
    if order == 0 {
        return Err(Error::invalid("series order must be at least 1"));
    }
    let alphas = (2..=order)
        .map(|n| q_series_coefficient(n, p.q))
        .collect::<Result<Vec<_>>>()?;
    ExponentSeries::new(p.beta, alphas)
}

/// `[1 - (1-q) beta E]^(1/(1-q))`, or `exp(-beta E)` at `q = 1`.
///
/// Fails outside the support `1 - (1-q) beta E > 0`.
pub fn q_exponential_weight(energy: f64, p: &QParams) -> Result<f64> {
    let x = p.beta * energy;
    if p.is_boltzmann_gibbs() {
        return Ok((-x).exp());
    }
    let one_minus_q = 1.0 - p.q;
    let base = 1.0 - one_minus_q * x;
    if !(base > 0.0) {
        return Err(Error::domain(format!(
            "q-exponential is cut off: 1 - (1-q) beta E = {base} <= 0 at q = {}, beta E = {x}",
            p.q
        )));
    }
    // ln_1p keeps the q -> 1 neighbourhood accurate
    Ok(((-one_minus_q * x).ln_1p() / one_minus_q).exp())
}

/// Like [`q_exponential_weight`] but returns zero beyond the cutoff.
/// Meant for tabulating curves, not for computation.
pub fn q_exponential_weight_clamped(energy: f64, p: &QParams) -> f64 {
    q_exponential_weight(energy, p).unwrap_or(0.0)
}

/// Gap between the truncated exponent series and the closed-form
/// q-exponential at `energy`. Needs `|(1-q) beta E| < 1`.
pub fn series_vs_q_residual(energy: f64, p: &QParams, order: u32) -> Result<f64> {
    let x = p.beta * energy;
    let ratio = ((1.0 - p.q) * x).abs();
    if !(ratio < 1.0) {
        return Err(Error::domain(format!(
            "logarithm series diverges: |(1-q) beta E| = {ratio} >= 1"
        )));
    }
    let series = q_exponent_series(p, order)?;
    let truncated = crate::distributions::modified_boltzmann_weight(energy, &series)?;
    Ok((truncated - q_exponential_weight(energy, p)?).abs())
}

/// `S_q = k (1 - sum p^q) / (q - 1)`; Boltzmann-Gibbs `-k sum p ln p` at `q = 1`.
pub fn tsallis_entropy(dist: &DiscreteDistribution, p: &QParams) -> f64 {
    if p.is_boltzmann_gibbs() {
        return p.k * dist.shannon_entropy();
    }
    let sum_pq: f64 = occupied(dist).map(|(pj, _)| pj.powf(p.q)).sum();
    p.k * (1.0 - sum_pq) / (p.q - 1.0)
}

/// Escort expectation `sum p^q E / sum p^q`; the ordinary mean at `q = 1`.
pub fn q_expectation(dist: &DiscreteDistribution, p: &QParams) -> f64 {
    let (num, den) = occupied(dist).fold((0.0, 0.0), |(num, den), (pj, e)| {
        let w = if p.is_boltzmann_gibbs() { pj } else { pj.powf(p.q) };
        (num + w * e, den + w)
    });
    num / den
}

/// `S_q(A x B) - S_q(A) - S_q(B)` for independent systems.
/// Analytically `(1-q) S_q(A) S_q(B) / k`.
pub fn nonadditivity_gap(a: &DiscreteDistribution, b: &DiscreteDistribution, p: &QParams) -> f64 {
    tsallis_entropy(&a.product(b), p) - tsallis_entropy(a, p) - tsallis_entropy(b, p)
}

// Zero-probability states carry no weight (0^q = 0 for q > 0).
fn occupied(dist: &DiscreteDistribution) -> impl Iterator<Item = (f64, f64)> + '_ {
    dist.probabilities()
        .iter()
        .zip(dist.energies())
        .filter(|(pj, _)| **pj > 0.0)
        .map(|(&pj, &e)| (pj, e))
}
