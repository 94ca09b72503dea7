//! Corrected exponents, occupation laws and partition functions on finite
//! spectra.
//!
//! Away from equilibrium the Boltzmann exponent `eps = beta * E` is replaced by
//! a power series `eps* = eps + alpha_1 eps^2 + alpha_2 eps^3 + ...` whose
//! constant term is zero and whose linear coefficient is one, so that
//! `eps* -> eps` as the corrections vanish. Weights are `exp(-eps*)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `sum p_j = 1` for [`DiscreteDistribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Inverse temperature plus the correction coefficients of the exponent.
///
/// `alphas[i]` multiplies `(beta E)^(i + 2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSeries {
    beta: f64,
    alphas: Vec<f64>,
}

impl ExponentSeries {
    pub fn new(beta: f64, alphas: Vec<f64>) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!("beta must be finite and positive, got {beta}")));
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("series coefficients must be finite, got {a}")));
        }
        Ok(ExponentSeries { beta, alphas })
    }

    /// No corrections: plain Boltzmann statistics.
    pub fn equilibrium(beta: f64) -> Result<Self> {
        Self::new(beta, Vec::new())
    }

    /// Lowest-order correction, `eps* = eps + alpha_1 eps^2`.
    pub fn first_order(beta: f64, alpha1: f64) -> Result<Self> {
        Self::new(beta, vec![alpha1])
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Highest power of `beta E` in the exponent.
    pub fn order(&self) -> usize {
        self.alphas.len() + 1
    }

    pub fn is_equilibrium(&self) -> bool {
        self.alphas.iter().all(|&a| a == 0.0)
    }

    /// Coefficients `c_1, c_2, ..` of `(beta E)^n`, with `c_1 = 1`.
    pub fn coefficients(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.alphas.iter().copied()).collect()
    }
}

/// Corrected dimensionless exponent for `eps = beta E`.
pub fn epsilon_star(eps: f64, series: &ExponentSeries) -> f64 {
    // Horner on eps * (1 + alpha_1 eps + alpha_2 eps^2 + ...)
    let inner = series
        .alphas
        .iter()
        .rev()
        .fold(0.0, |acc, &a| (acc + a) * eps);
    eps * (1.0 + inner)
}

/// Mean occupation per coherent state, `N*/G = 1 / (exp(eps*) - 1)`.
pub fn modified_bose_einstein(eps_star: f64) -> Result<f64> {
    if eps_star.is_nan() || eps_star <= 0.0 {
        return Err(Error::domain(format!(
            "Bose-Einstein occupation needs eps* > 0, got {eps_star}"
        )));
    }
    Ok(1.0 / eps_star.exp_m1())
}

/// Occupation at `eps = beta E` with the first-order corrected exponent.
pub fn first_order_bose_einstein(beta_e: f64, alpha1: f64) -> Result<f64> {
    modified_bose_einstein(beta_e + alpha1 * beta_e * beta_e)
}

/// Whether `eps + alpha_1 eps^2` is still increasing at `eps`
/// (`1 + 2 alpha_1 eps > 0`). Outside this region the first-order
/// correction is no longer a small perturbation.
pub fn first_order_is_monotone(beta_e: f64, alpha1: f64) -> bool {
    1.0 + 2.0 * alpha1 * beta_e > 0.0
}

/// Unnormalized weight `exp(-eps*(beta E))`.
pub fn modified_boltzmann_weight(energy: f64, series: &ExponentSeries) -> Result<f64> {
    let exponent = epsilon_star(series.beta * energy, series);
    let w = (-exponent).exp();
    if !w.is_finite() {
        return Err(Error::Range(format!(
            "weight exp({}) overflows at E = {energy}",
            -exponent
        )));
    }
    Ok(w)
}

/// `Z = sum_j exp(-eps*(beta E_j))`.
pub fn partition_function(energies: &[f64], series: &ExponentSeries) -> Result<f64> {
    if energies.is_empty() {
        return Err(Error::invalid("partition function needs a nonempty spectrum"));
    }
    let mut z = 0.0;
    for &e in energies {
        z += modified_boltzmann_weight(e, series)?;
    }
    if !z.is_finite() {
        return Err(Error::Range("partition function overflows".into()));
    }
    Ok(z)
}

/// Probabilities `p_j = exp(-eps*_j) / Z` over the given spectrum.
///
/// Exponents are shifted by their minimum before exponentiating, so spectra
/// whose raw weights under- or overflow still normalize correctly.
pub fn normalize(energies: &[f64], series: &ExponentSeries) -> Result<DiscreteDistribution> {
    if energies.is_empty() {
        return Err(Error::invalid("cannot normalize an empty spectrum"));
    }
    let exponents: Vec<f64> = energies
        .iter()
        .map(|&e| epsilon_star(series.beta * e, series))
        .collect();
    if exponents.iter().any(|x| !x.is_finite()) {
        return Err(Error::Range("exponent is not finite on this spectrum".into()));
    }
    Ok(DiscreteDistribution::from_exponents(energies.to_vec(), &exponents))
}

/// `|w(E_A + E_B) - w(E_A) w(E_B)|` for the unnormalized weight `w`.
///
/// Zero for the pure Boltzmann factor; any nonzero correction coefficient
/// makes the weight stop factorizing over additive energies.
pub fn factorization_residual(ea: f64, eb: f64, series: &ExponentSeries) -> Result<f64> {
    let joint = modified_boltzmann_weight(ea + eb, series)?;
    let product = modified_boltzmann_weight(ea, series)? * modified_boltzmann_weight(eb, series)?;
    Ok((joint - product).abs())
}

/// Finite energy grid with a probability on each point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    energies: Vec<f64>,
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(energies: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::invalid("distribution needs at least one point"));
        }
        if energies.len() != probabilities.len() {
            return Err(Error::invalid(format!(
                "{} energies but {} probabilities",
                energies.len(),
                probabilities.len()
            )));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("energies must be finite"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::invalid(format!("probabilities must be nonnegative, got {p}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteDistribution { energies, probabilities })
    }

    /// Uniform distribution over the given energies.
    pub fn uniform(energies: Vec<f64>) -> Result<Self> {
        let w = 1.0 / energies.len() as f64;
        let probabilities = vec![w; energies.len()];
        Self::new(energies, probabilities)
    }

    /// Unit mass at a single energy.
    pub fn point_mass(energy: f64) -> Result<Self> {
        Self::new(vec![energy], vec![1.0])
    }

    /// `p_j proportional to exp(-x_j)`, computed with a max-shift.
    /// Caller guarantees finite exponents and a nonempty grid.
    pub(crate) fn from_exponents(energies: Vec<f64>, exponents: &[f64]) -> Self {
        let shift = exponents.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = exponents.iter().map(|x| (shift - x).exp()).collect();
        let total: f64 = weights.iter().sum();
        let probabilities = weights.into_iter().map(|w| w / total).collect();
        DiscreteDistribution { energies, probabilities }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Joint distribution of two independent systems: energies add,
    /// probabilities multiply. Row-major in `(self, other)`.
    pub fn product(&self, other: &DiscreteDistribution) -> DiscreteDistribution {
        let mut energies = Vec::with_capacity(self.len() * other.len());
        let mut probabilities = Vec::with_capacity(self.len() * other.len());
        for (ea, pa) in self.energies.iter().zip(&self.probabilities) {
            for (eb, pb) in other.energies.iter().zip(&other.probabilities) {
                energies.push(ea + eb);
                probabilities.push(pa * pb);
            }
        }
        DiscreteDistribution { energies, probabilities }
    }

    /// Boltzmann-Gibbs entropy `-sum p ln p` (with `0 ln 0 = 0`), in units of k.
    pub fn shannon_entropy(&self) -> f64 {
        self.probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }
}
