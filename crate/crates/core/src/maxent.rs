//! Maximum-entropy distributions under raw-moment constraints.
//!
//! Maximizing `-sum p ln p` on a finite grid subject to `<E^n> = t_n` for
//! `n = 1..m` gives `p_j proportional to exp(-sum_n beta_n E_j^n)`. The
//! multipliers minimize the convex dual
//!
//! ```text
//! D(beta) = ln Z(beta) + sum_n beta_n t_n
//! ```
//!
//! whose gradient is `t - <E^n>` and whose Hessian is the covariance matrix
//! `Cov(E^n, E^k)`. [`solve_multipliers`] runs damped Newton on `D` starting
//! from `beta = 0`, halving the step while the moment residual grows.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::distributions::{DiscreteDistribution, ExponentSeries};
use crate::error::{Error, Result};

/// Highest moment order accepted. Beyond this the covariance matrix of
/// `E, E^2, ..` is too ill-conditioned in double precision.
pub const MAX_MOMENT_ORDER: usize = 6;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

const MAX_HALVINGS: usize = 60;

/// Target raw moments `<E^1> .. <E^m>` on a finite energy grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentConstraints {
    grid: Vec<f64>,
    targets: Vec<f64>,
}

impl MomentConstraints {
    pub fn new(grid: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        let m = targets.len();
        if m == 0 {
            return Err(Error::invalid("at least one moment target is required"));
        }
        if m > MAX_MOMENT_ORDER {
            return Err(Error::invalid(format!(
                "at most {MAX_MOMENT_ORDER} moment constraints are supported, got {m}"
            )));
        }
        if grid.iter().chain(&targets).any(|x| !x.is_finite()) {
            return Err(Error::invalid("grid and targets must be finite"));
        }
        let mut distinct = grid.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        if distinct.len() <= m {
            return Err(Error::invalid(format!(
                "{m} moment constraints need more than {m} distinct grid points, got {}",
                distinct.len()
            )));
        }
        Ok(MomentConstraints { grid, targets })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn order(&self) -> usize {
        self.targets.len()
    }

    /// Rejects targets that no distribution on the grid can reach: each
    /// `<E^n>` must lie strictly between the extremes of `E^n`, and the
    /// second moment must exceed the squared mean.
    pub fn check_feasible(&self) -> Result<()> {
        for (i, &target) in self.targets.iter().enumerate() {
            let order = i + 1;
            let powers = self.grid.iter().map(|e| e.powi(order as i32));
            let (mut lower, upper) = powers.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
            if order == 2 {
                lower = lower.max(self.targets[0] * self.targets[0]);
            }
            if !(target > lower && target < upper) {
                return Err(Error::Infeasible { order, target, lower, upper });
            }
        }
        Ok(())
    }
}

/// Converged multipliers together with the distribution they generate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierSolution {
    pub betas: Vec<f64>,
    pub distribution: DiscreteDistribution,
    /// Max-norm moment mismatch at the returned multipliers.
    pub residual: f64,
    /// Newton steps taken.
    pub iterations: usize,
    /// Residual before the first step and after every step.
    pub trace: Vec<f64>,
}

impl MultiplierSolution {
    /// Re-expresses the multipliers as an exponent series in `beta E` with
    /// `beta = beta_1` and `alpha_(n-1) = beta_n / beta_1^n`.
    pub fn to_series(&self) -> Result<ExponentSeries> {
        let beta = self.betas[0];
        if !(beta > 0.0) {
            return Err(Error::domain(format!(
                "mapping to an exponent series needs beta_1 > 0, got {beta}"
            )));
        }
        let alphas = self.betas[1..]
            .iter()
            .enumerate()
            .map(|(i, b)| b / beta.powi(i as i32 + 2))
            .collect();
        ExponentSeries::new(beta, alphas)
    }
}

/// Raw moments `<E^n> = sum_j p_j E_j^n` for `n = 1..=m`.
pub fn moments(dist: &DiscreteDistribution, m: usize) -> Vec<f64> {
    (1..=m as i32)
        .map(|n| {
            dist.energies()
                .iter()
                .zip(dist.probabilities())
                .map(|(e, p)| p * e.powi(n))
                .sum()
        })
        .collect()
}

/// Central moments `<(E - <E>)^n>` for `n = 1..=m`. The first is zero.
pub fn central_moments(dist: &DiscreteDistribution, m: usize) -> Vec<f64> {
    let mean = moments(dist, 1)[0];
    (1..=m as i32)
        .map(|n| {
            dist.energies()
                .iter()
                .zip(dist.probabilities())
                .map(|(e, p)| p * (e - mean).powi(n))
                .sum()
        })
        .collect()
}

fn exponents(grid: &[f64], betas: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&e| {
            let mut power = 1.0;
            betas
                .iter()
                .map(|b| {
                    power *= e;
                    b * power
                })
                .sum()
        })
        .collect()
}

/// `p_j proportional to exp(-sum_n beta_n E_j^n)` on `grid`.
pub fn distribution_for(grid: &[f64], betas: &[f64]) -> Result<DiscreteDistribution> {
    if grid.is_empty() {
        return Err(Error::invalid("grid must be nonempty"));
    }
    let x = exponents(grid, betas);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range("exponent is not finite on this grid".into()));
    }
    Ok(DiscreteDistribution::from_exponents(grid.to_vec(), &x))
}

/// `ln Z = ln sum_j exp(-sum_n beta_n E_j^n)`.
pub fn log_partition(grid: &[f64], betas: &[f64]) -> f64 {
    let x = exponents(grid, betas);
    let shift = x.iter().copied().fold(f64::INFINITY, f64::min);
    -shift + x.iter().map(|v| (shift - v).exp()).sum::<f64>().ln()
}

/// `d<E^n>/d beta_k = -Cov(E^n, E^k)` for `n, k = 1..=m`, row `n-1`, column `k-1`.
pub fn moment_jacobian(grid: &[f64], betas: &[f64]) -> Result<Vec<Vec<f64>>> {
    let dist = distribution_for(grid, betas)?;
    let cov = covariance(&dist, betas.len());
    Ok((0..betas.len())
        .map(|i| (0..betas.len()).map(|j| -cov[(i, j)]).collect())
        .collect())
}

fn covariance(dist: &DiscreteDistribution, m: usize) -> DMatrix<f64> {
    let mu = moments(dist, m);
    let mut cov = DMatrix::zeros(m, m);
    for (e, p) in dist.energies().iter().zip(dist.probabilities()) {
        let centered: Vec<f64> = (0..m).map(|n| e.powi(n as i32 + 1) - mu[n]).collect();
        for i in 0..m {
            for j in 0..=i {
                cov[(i, j)] += p * centered[i] * centered[j];
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            cov[(j, i)] = cov[(i, j)];
        }
    }
    cov
}

fn residual_of(dist: &DiscreteDistribution, targets: &[f64]) -> (Vec<f64>, f64) {
    let mu = moments(dist, targets.len());
    let worst = mu
        .iter()
        .zip(targets)
        .map(|(a, t)| (a - t).abs())
        .fold(0.0, f64::max);
    (mu, worst)
}

/// Finds `beta_1..beta_m` whose distribution matches every target moment to
/// within `tol` (max norm).
pub fn solve_multipliers(
    constraints: &MomentConstraints,
    tol: f64,
    max_iter: usize,
) -> Result<MultiplierSolution> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    constraints.check_feasible()?;

    let grid = constraints.grid();
    let targets = constraints.targets();
    let m = constraints.order();

    let mut betas = vec![0.0; m];
    let mut dist = distribution_for(grid, &betas)?;
    let (mut mu, mut residual) = residual_of(&dist, targets);
    let mut trace = vec![residual];
    let mut iterations = 0;

    while residual > tol {
        if iterations == max_iter {
            return Err(Error::NotConverged { iterations, residual });
        }
        iterations += 1;

        let cov = covariance(&dist, m);
        let rhs = DVector::from_iterator(m, mu.iter().zip(targets).map(|(a, t)| a - t));
        let step = match cov.clone().cholesky() {
            Some(chol) => chol.solve(&rhs),
            None => cov
                .lu()
                .solve(&rhs)
                .ok_or(Error::NotConverged { iterations, residual })?,
        };

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = betas.iter().zip(step.iter()).map(|(b, d)| b + scale * d).collect();
            if let Ok(trial_dist) = distribution_for(grid, &trial) {
                let (trial_mu, trial_residual) = residual_of(&trial_dist, targets);
                if trial_residual <= residual {
                    accepted = Some((trial, trial_dist, trial_mu, trial_residual));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((b, d, u, r)) = accepted else {
            return Err(Error::NotConverged { iterations, residual });
        };
        betas = b;
        dist = d;
        mu = u;
        residual = r;
        trace.push(residual);
    }

    Ok(MultiplierSolution {
        betas,
        distribution: dist,
        residual,
        iterations,
        trace,
    })
}

/// Largest pointwise gap between the solution's distribution and the one
/// generated on the same grid by `series`.
pub fn crosscheck_series(sol: &MultiplierSolution, series: &ExponentSeries) -> Result<f64> {
    if series.order() != sol.betas.len() {
        return Err(Error::invalid(format!(
            "series of order {} cannot be compared with {} multipliers",
            series.order(),
            sol.betas.len()
        )));
    }
    let other = crate::distributions::normalize(sol.distribution.energies(), series)?;
    Ok(sol
        .distribution
        .probabilities()
        .iter()
        .zip(other.probabilities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
