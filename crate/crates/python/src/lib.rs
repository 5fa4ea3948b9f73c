//! Python bindings. Integers cross the boundary as Python ints of any size.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lsimplex::cli::{solve as solve_inner, Solved};
use lsimplex::oracle::PivotRule;
use lsimplex::paths::Algorithm;
use lsimplex::polytope::{self, Instance};
use lsimplex::preprocess;
use lsimplex::trace::{Trace, Verification};
use lsimplex::verify;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Instance", module = "lattice_simplex")]
#[derive(Clone)]
struct PyInstance {
    inner: Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (a, b, c, k, x0, equalities=None))]
    fn new(
        a: Vec<Vec<BigInt>>,
        b: Vec<BigInt>,
        c: Vec<BigInt>,
        k: u64,
        x0: Vec<BigInt>,
        equalities: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        let eq: BTreeSet<usize> = equalities.unwrap_or_default().into_iter().collect();
        Ok(PyInstance { inner: Instance::new(a, b, c, k, eq, x0).map_err(value_err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: Instance::parse(text).map_err(value_err)? })
    }

    #[staticmethod]
    fn hypercube(n: usize, k: u64) -> PyResult<Self> {
        Ok(PyInstance { inner: polytope::gen_hypercube(n, k).map_err(value_err)? })
    }

    #[staticmethod]
    fn degenerate_hypercube(n: usize, k: u64) -> PyResult<Self> {
        Ok(PyInstance { inner: polytope::gen_degenerate_hypercube(n, k).map_err(value_err)? })
    }

    #[staticmethod]
    fn odd_cycle(n: usize) -> PyResult<Self> {
        Ok(PyInstance { inner: polytope::gen_odd_cycle_stable_set(n).map_err(value_err)? })
    }

    #[staticmethod]
    fn transportation(supplies: Vec<u64>, demands: Vec<u64>, cap: u64) -> PyResult<Self> {
        Ok(PyInstance { inner: polytope::gen_transportation(&supplies, &demands, cap).map_err(value_err)? })
    }

    fn with_cost(&self, c: Vec<BigInt>) -> PyResult<Self> {
        Ok(PyInstance { inner: self.inner.with_cost(c).map_err(value_err)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn k(&self) -> u64 {
        self.inner.k()
    }

    #[getter]
    fn alpha(&self) -> BigInt {
        self.inner.alpha().clone()
    }

    #[getter]
    fn cost(&self) -> Vec<BigInt> {
        self.inner.cost().to_vec()
    }

    #[getter]
    fn x0(&self) -> Vec<BigInt> {
        self.inner.x0().to_vec()
    }

    fn is_vertex(&self, x: Vec<BigInt>) -> bool {
        self.inner.is_vertex(&x)
    }

    fn value(&self, x: Vec<BigInt>) -> BigInt {
        self.inner.cost_value(self.inner.cost(), &x)
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={}, k={})", self.inner.n(), self.inner.m(), self.inner.k())
    }
}

/// Result of one algorithm run.
#[pyclass(name = "Path", module = "lattice_simplex")]
struct PyPath {
    inst: Instance,
    solved: Solved,
}

#[pymethods]
impl PyPath {
    #[getter]
    fn vertices(&self) -> Vec<Vec<BigInt>> {
        self.solved.path.vertices.iter().map(|v| v.coords.clone()).collect()
    }

    #[getter]
    fn length(&self) -> usize {
        self.solved.path.length()
    }

    #[getter]
    fn final_vertex(&self) -> Vec<BigInt> {
        self.solved.vertex.coords.clone()
    }

    #[getter]
    fn value(&self) -> BigInt {
        self.inst.cost_value(self.inst.cost(), &self.solved.vertex.coords)
    }

    #[getter]
    fn oracle_calls(&self) -> usize {
        self.solved.path.oracle_calls
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.solved.iterations.len()
    }

    #[getter]
    fn exact_stop(&self) -> Option<usize> {
        self.solved.exact_stop
    }

    /// Checks adjacency, monotonicity and the length bounds; returns a dict
    /// mapping bound name to `(bound, observed, satisfied)`.
    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rep = verify::check_path(&self.inst, self.inst.cost(), &self.solved.path).map_err(value_err)?;
        let d = PyDict::new_bound(py);
        for b in rep.bounds {
            d.set_item(b.name, (b.bound, b.observed, b.satisfied))?;
        }
        Ok(d)
    }

    #[pyo3(signature = (verify=false))]
    fn trace_json(&self, verify: bool) -> PyResult<String> {
        let mut t = Trace::new(&self.inst, &self.solved.path).with_iterations(&self.solved.iterations);
        t.exact_stop = self.solved.exact_stop;
        t.bound_report = verify::check_path(&self.inst, self.inst.cost(), &self.solved.path).ok();
        if verify {
            let bf = verify::brute_force_optimum(&self.inst, self.inst.cost()).map_err(value_err)?;
            t.verification = Some(Verification::new(&bf, &t.final_value.0));
        }
        Ok(t.to_json())
    }
}

#[pyfunction]
#[pyo3(signature = (instance, algorithm="basic", pivot="first"))]
fn solve(instance: &PyInstance, algorithm: &str, pivot: &str) -> PyResult<PyPath> {
    let alg: Algorithm = algorithm.parse().map_err(value_err)?;
    let rule: PivotRule = pivot.parse().map_err(value_err)?;
    let solved = solve_inner(&instance.inner, alg, rule).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyPath { inst: instance.inner.clone(), solved })
}

/// Returns `(rounded_cost, within_bound)`.
#[pyfunction]
fn frank_tardos(cost: Vec<BigInt>, big_n: BigInt) -> PyResult<(Vec<BigInt>, bool)> {
    if big_n < BigInt::from(1) {
        return Err(PyValueError::new_err("N must be positive"));
    }
    let r = preprocess::frank_tardos_int(&cost, &big_n);
    let ok = r.within_bound();
    Ok((r.cbreve, ok))
}

/// Returns `(optimal_value, maximizing_vertices)`.
#[pyfunction]
fn brute_force(instance: &PyInstance) -> PyResult<(BigInt, Vec<Vec<BigInt>>)> {
    let bf = verify::brute_force_optimum(&instance.inner, instance.inner.cost()).map_err(value_err)?;
    Ok((bf.value, bf.witnesses))
}

#[pyfunction]
fn adjacent(instance: &PyInstance, x: Vec<BigInt>, y: Vec<BigInt>) -> PyResult<bool> {
    verify::check_adjacent(&instance.inner, &x, &y).map_err(value_err)
}

#[pymodule]
fn lattice_simplex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyPath>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(frank_tardos, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(adjacent, m)?)?;
    Ok(())
}
