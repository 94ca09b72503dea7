//! Python bindings for `coherent_access`.

use std::collections::BTreeMap;

use coherent_access::{counting, distributions, maxent, tsallis, Error};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pycoherent, DomainError, PyValueError, "Input outside a formula's domain.");
create_exception!(pycoherent, InfeasibleError, PyValueError, "Moment targets cannot be reached on the grid.");
create_exception!(pycoherent, ConvergenceError, PyRuntimeError, "The multiplier solver did not converge.");

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::InvalidArgument(_) | Error::EnumerationTooLarge { .. } => PyValueError::new_err(msg),
        Error::Domain(_) => DomainError::new_err(msg),
        Error::Range(_) => PyOverflowError::new_err(msg),
        Error::Infeasible { .. } => InfeasibleError::new_err(msg),
        Error::NotConverged { .. } => ConvergenceError::new_err(msg),
    }
}

trait IntoPyResult<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for Result<T, Error> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn count_arg(states: BigUint) -> counting::BigCount {
    counting::BigCount::from(states)
}

#[pyfunction]
fn binomial(n: u64, k: u64) -> BigUint {
    counting::binomial(n, k).into_biguint()
}

#[pyfunction]
fn coherent_degeneracy(g: u32) -> PyResult<BigUint> {
    Ok(counting::coherent_degeneracy(g).py_err()?.into_biguint())
}

#[pyfunction]
fn microstate_count(states: BigUint, n: u64) -> PyResult<BigUint> {
    Ok(counting::microstate_count(&count_arg(states), n).py_err()?.into_biguint())
}

#[pyfunction]
fn distinguishable_count(states: BigUint, n: u64) -> PyResult<BigUint> {
    Ok(counting::distinguishable_count(&count_arg(states), n).py_err()?.into_biguint())
}

/// `levels` is a list of `(g, occupancy)` pairs.
#[pyfunction]
fn macrostate_weight(levels: Vec<(u32, u64)>) -> PyResult<BigUint> {
    let levels = levels
        .into_iter()
        .map(|(g, n)| counting::LevelSpec::new(g, n))
        .collect::<Result<Vec<_>, _>>()
        .py_err()?;
    let m = counting::MacrostateSpec::new(levels).py_err()?;
    Ok(counting::macrostate_weight(&m).into_biguint())
}

#[pyfunction]
fn total_omega(levels: Vec<u32>, n_total: u64) -> PyResult<BigUint> {
    Ok(counting::total_omega(&levels, n_total).py_err()?.into_biguint())
}

/// Each microstate as `{subset_label: count}` over occupied subsets only.
#[pyfunction]
fn enumerate_coherent_sequences(g: u32, n: u32) -> PyResult<Vec<BTreeMap<String, u32>>> {
    let maps = counting::enumerate_coherent_sequences(g, n).py_err()?;
    Ok(maps
        .iter()
        .map(|m| m.entries().iter().map(|(s, c)| (s.label(), *c)).collect())
        .collect())
}

/// Sequence notation such as `(1)(2)(12)aa`, one string per microstate.
#[pyfunction]
fn sequence_notations(g: u32, n: u32) -> PyResult<Vec<String>> {
    let maps = counting::enumerate_coherent_sequences(g, n).py_err()?;
    Ok(maps.iter().map(counting::OccupationMap::notation).collect())
}

#[pyclass(name = "ExponentSeries", frozen, from_py_object)]
#[derive(Clone)]
struct PyExponentSeries(distributions::ExponentSeries);

#[pymethods]
impl PyExponentSeries {
    #[new]
    #[pyo3(signature = (beta, alphas = Vec::new()))]
    fn new(beta: f64, alphas: Vec<f64>) -> PyResult<Self> {
        Ok(Self(distributions::ExponentSeries::new(beta, alphas).py_err()?))
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.0.alphas().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("ExponentSeries(beta={}, alphas={:?})", self.0.beta(), self.0.alphas())
    }
}

#[pyclass(name = "DiscreteDistribution", frozen, from_py_object)]
#[derive(Clone)]
struct PyDistribution(distributions::DiscreteDistribution);

#[pymethods]
impl PyDistribution {
    #[new]
    fn new(energies: Vec<f64>, probabilities: Vec<f64>) -> PyResult<Self> {
        Ok(Self(distributions::DiscreteDistribution::new(energies, probabilities).py_err()?))
    }

    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.0.energies().to_vec()
    }

    #[getter]
    fn probabilities(&self) -> Vec<f64> {
        self.0.probabilities().to_vec()
    }

    fn product(&self, other: &PyDistribution) -> Self {
        Self(self.0.product(&other.0))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "QParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyQParams(tsallis::QParams);

#[pymethods]
impl PyQParams {
    #[new]
    #[pyo3(signature = (q, beta = 1.0, k = 1.0))]
    fn new(q: f64, beta: f64, k: f64) -> PyResult<Self> {
        Ok(Self(tsallis::QParams::new(q, beta, k).py_err()?))
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }
}

#[pyclass(name = "MultiplierSolution", frozen, from_py_object)]
#[derive(Clone)]
struct PySolution(maxent::MultiplierSolution);

#[pymethods]
impl PySolution {
    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.0.betas.clone()
    }

    #[getter]
    fn distribution(&self) -> PyDistribution {
        PyDistribution(self.0.distribution.clone())
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn trace(&self) -> Vec<f64> {
        self.0.trace.clone()
    }

    fn to_series(&self) -> PyResult<PyExponentSeries> {
        Ok(PyExponentSeries(self.0.to_series().py_err()?))
    }
}

#[pyfunction]
fn epsilon_star(eps: f64, series: &PyExponentSeries) -> f64 {
    distributions::epsilon_star(eps, &series.0)
}

#[pyfunction]
fn modified_bose_einstein(eps_star: f64) -> PyResult<f64> {
    distributions::modified_bose_einstein(eps_star).py_err()
}

#[pyfunction]
fn modified_boltzmann_weight(energy: f64, series: &PyExponentSeries) -> PyResult<f64> {
    distributions::modified_boltzmann_weight(energy, &series.0).py_err()
}

#[pyfunction]
fn partition_function(energies: Vec<f64>, series: &PyExponentSeries) -> PyResult<f64> {
    distributions::partition_function(&energies, &series.0).py_err()
}

#[pyfunction]
fn normalize(energies: Vec<f64>, series: &PyExponentSeries) -> PyResult<PyDistribution> {
    Ok(PyDistribution(distributions::normalize(&energies, &series.0).py_err()?))
}

#[pyfunction]
fn factorization_residual(ea: f64, eb: f64, series: &PyExponentSeries) -> PyResult<f64> {
    distributions::factorization_residual(ea, eb, &series.0).py_err()
}

#[pyfunction]
fn moments(dist: &PyDistribution, m: usize) -> Vec<f64> {
    maxent::moments(&dist.0, m)
}

#[pyfunction]
#[pyo3(signature = (grid, targets, tol = maxent::DEFAULT_TOLERANCE, max_iter = maxent::DEFAULT_MAX_ITER))]
fn solve_multipliers(grid: Vec<f64>, targets: Vec<f64>, tol: f64, max_iter: usize) -> PyResult<PySolution> {
    let c = maxent::MomentConstraints::new(grid, targets).py_err()?;
    Ok(PySolution(maxent::solve_multipliers(&c, tol, max_iter).py_err()?))
}

#[pyfunction]
fn moment_jacobian(grid: Vec<f64>, betas: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    maxent::moment_jacobian(&grid, &betas).py_err()
}

#[pyfunction]
fn crosscheck_series(sol: &PySolution, series: &PyExponentSeries) -> PyResult<f64> {
    maxent::crosscheck_series(&sol.0, &series.0).py_err()
}

#[pyfunction]
fn q_series_coefficient(n: u32, q: f64) -> PyResult<f64> {
    tsallis::q_series_coefficient(n, q).py_err()
}

#[pyfunction]
fn q_exponential_weight(energy: f64, params: &PyQParams) -> PyResult<f64> {
    tsallis::q_exponential_weight(energy, &params.0).py_err()
}

#[pyfunction]
fn series_vs_q_residual(energy: f64, params: &PyQParams, order: u32) -> PyResult<f64> {
    tsallis::series_vs_q_residual(energy, &params.0, order).py_err()
}

#[pyfunction]
fn tsallis_entropy(dist: &PyDistribution, params: &PyQParams) -> f64 {
    tsallis::tsallis_entropy(&dist.0, &params.0)
}

#[pyfunction]
fn q_expectation(dist: &PyDistribution, params: &PyQParams) -> f64 {
    tsallis::q_expectation(&dist.0, &params.0)
}

#[pyfunction]
fn nonadditivity_gap(a: &PyDistribution, b: &PyDistribution, params: &PyQParams) -> f64 {
    tsallis::nonadditivity_gap(&a.0, &b.0, &params.0)
}

#[pymodule]
fn pycoherent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("InfeasibleError", py.get_type::<InfeasibleError>())?;
    m.add("ConvergenceError", py.get_type::<ConvergenceError>())?;

    m.add_class::<PyExponentSeries>()?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyQParams>()?;
    m.add_class::<PySolution>()?;

    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_degeneracy, m)?)?;
    m.add_function(wrap_pyfunction!(microstate_count, m)?)?;
    m.add_function(wrap_pyfunction!(distinguishable_count, m)?)?;
    m.add_function(wrap_pyfunction!(macrostate_weight, m)?)?;
    m.add_function(wrap_pyfunction!(total_omega, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_coherent_sequences, m)?)?;
    m.add_function(wrap_pyfunction!(sequence_notations, m)?)?;

    m.add_function(wrap_pyfunction!(epsilon_star, m)?)?;
    m.add_function(wrap_pyfunction!(modified_bose_einstein, m)?)?;
    m.add_function(wrap_pyfunction!(modified_boltzmann_weight, m)?)?;
    m.add_function(wrap_pyfunction!(partition_function, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(factorization_residual, m)?)?;

    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(solve_multipliers, m)?)?;
    m.add_function(wrap_pyfunction!(moment_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(crosscheck_series, m)?)?;

    m.add_function(wrap_pyfunction!(q_series_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(q_exponential_weight, m)?)?;
    m.add_function(wrap_pyfunction!(series_vs_q_residual, m)?)?;
    m.add_function(wrap_pyfunction!(tsallis_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(q_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(nonadditivity_gap, m)?)?;
    Ok(())
}
