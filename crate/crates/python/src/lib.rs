//! Python bindings: parse, partition, encode and solve.

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use upmax::bench::{apply_strategy, solve_config, Strategy};
use upmax::encoders::{Problem, SchemeChoice};
use upmax::formats::{parse_auto, write_pwcnf, write_solution, Input};
use upmax::graphs::DEFAULT_PAIR_CAP;
use upmax::maxsat::{AlgorithmKind, Budget, SolveResult, Status};
use upmax::PartitionedInstance;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A wcnf or pwcnf formula.
#[pyclass(name = "Instance", module = "upmax_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyInstance {
    input: Input,
}

impl PyInstance {
    fn labelled(&self) -> Option<&PartitionedInstance> {
        match &self.input {
            Input::Pwcnf(p) => Some(p),
            Input::Wcnf(_) => None,
        }
    }

    fn partitioned(&self, strategy: &str, seed: u64) -> PyResult<PartitionedInstance> {
        let s: Strategy = strategy.parse().map_err(value_error)?;
        apply_strategy(&self.input, s, seed, DEFAULT_PAIR_CAP)
            .map(|(p, _)| p)
            .map_err(value_error)
    }
}

#[pymethods]
impl PyInstance {
    /// Parses wcnf or pwcnf text, chosen by its header.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyInstance> {
        let parsed = parse_auto(text.as_bytes()).map_err(value_error)?;
        Ok(PyInstance { input: parsed.value })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<PyInstance> {
        let text = std::fs::read_to_string(path).map_err(value_error)?;
        PyInstance::parse(&text)
    }

    #[getter]
    fn n_vars(&self) -> u32 {
        self.input.instance().n_vars
    }

    #[getter]
    fn n_hard(&self) -> usize {
        self.input.instance().hard.len()
    }

    #[getter]
    fn n_soft(&self) -> usize {
        self.input.instance().soft.len()
    }

    #[getter]
    fn top(&self) -> u64 {
        self.input.instance().top
    }

    /// Number of partitions, or None for a wcnf formula.
    #[getter]
    fn n_part(&self) -> Option<u32> {
        self.labelled().map(|p| p.n_part)
    }

    /// Soft clause indices per partition label.
    fn blocks(&self) -> Vec<Vec<usize>> {
        self.labelled().map(|p| p.blocks()).unwrap_or_default()
    }

    /// A labelled copy split by `vig`, `cvig`, `res`, `random:<k>` or `none`.
    #[pyo3(signature = (strategy, seed = 0))]
    fn partition(&self, strategy: &str, seed: u64) -> PyResult<PyInstance> {
        Ok(PyInstance {
            input: Input::Pwcnf(self.partitioned(strategy, seed)?),
        })
    }

    /// pwcnf text; a wcnf formula is written as a single partition.
    fn to_pwcnf(&self) -> PyResult<String> {
        let p = match &self.input {
            Input::Pwcnf(p) => p.clone(),
            Input::Wcnf(i) => PartitionedInstance::single(i.clone()),
        };
        write_pwcnf(&p).map_err(value_error)
    }

    /// Solves under an algorithm and partition strategy. The default strategy
    /// uses the file's labels when present.
    #[pyo3(signature = (alg = "oll", strategy = None, timeout = None, seed = 0))]
    fn solve(
        &self,
        py: Python<'_>,
        alg: &str,
        strategy: Option<&str>,
        timeout: Option<f64>,
        seed: u64,
    ) -> PyResult<PySolveResult> {
        let alg: AlgorithmKind = alg.parse().map_err(value_error)?;
        let strategy = strategy.unwrap_or(if self.labelled().is_some() { "user" } else { "none" });
        let pinst = self.partitioned(strategy, seed)?;
        let budget = match timeout {
            Some(t) if t.is_finite() && t >= 0.0 => Budget::with_timeout(Duration::from_secs_f64(t)),
            Some(t) => return Err(value_error(format!("invalid timeout {t}"))),
            None => Budget::unlimited(),
        };
        let result = py
            .detach(|| solve_config(&pinst, alg, budget))
            .map_err(value_error)?;
        Ok(PySolveResult { result })
    }

    fn __repr__(&self) -> String {
        let i = self.input.instance();
        format!(
            "Instance(n_vars={}, n_hard={}, n_soft={}, n_part={:?})",
            i.n_vars,
            i.hard.len(),
            i.soft.len(),
            self.n_part()
        )
    }
}

#[pyclass(name = "SolveResult", module = "upmax_py", frozen)]
pub struct PySolveResult {
    result: SolveResult,
}

#[pymethods]
impl PySolveResult {
    /// `optimum`, `timeout` or `hard-unsat`.
    #[getter]
    fn status(&self) -> &'static str {
        match self.result.status {
            Status::Optimum => "optimum",
            Status::Timeout => "timeout",
            Status::HardUnsat => "hard-unsat",
        }
    }

    #[getter]
    fn cost(&self) -> Option<u64> {
        self.result.cost
    }

    #[getter]
    fn lower_bound(&self) -> u64 {
        self.result.lower_bound
    }

    /// Signed DIMACS literals of the best model.
    #[getter]
    fn model(&self) -> Option<Vec<i32>> {
        self.result
            .model
            .as_ref()
            .map(|m| m.lits().map(|l| l.to_dimacs()).collect())
    }

    #[getter]
    fn sat_calls(&self) -> u64 {
        self.result.stats.sat_calls
    }

    #[getter]
    fn cores(&self) -> u64 {
        self.result.stats.cores
    }

    #[getter]
    fn partitions(&self) -> usize {
        self.result.stats.partitions
    }

    /// `o`, `s` and `v` lines.
    fn solution_text(&self) -> String {
        write_solution(&self.result)
    }

    fn __repr__(&self) -> String {
        format!("SolveResult(status={:?}, cost={:?})", self.status(), self.result.cost)
    }
}

/// Encodes a `p msc` or `p seating` problem text with a user partition scheme.
#[pyfunction]
#[pyo3(signature = (problem, scheme = "none"))]
fn encode(problem: &str, scheme: &str) -> PyResult<PyInstance> {
    let problem = Problem::parse(problem).map_err(value_error)?;
    let scheme = SchemeChoice::parse(scheme).map_err(value_error)?;
    let p = problem.encode(scheme).map_err(value_error)?;
    Ok(PyInstance { input: Input::Pwcnf(p) })
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyInstance> {
    PyInstance::parse(text)
}

#[pymodule]
fn upmax_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    Ok(())
}
