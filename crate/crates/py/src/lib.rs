//! Python module `hadalg_py`: elements, matrices and the main operations.
//!
//! Complex values cross the boundary as Python `complex`. Errors raise
//! `hadalg_py.HadalgError` with the library message.

use hadalg::algebra::{self, Element};
use hadalg::ideals::{self, ChainKind, Order};
use hadalg::json;
use hadalg::matalg::{self, LogOptions, MatElement, SlOptions};
use hadalg::{EpSeq, Weight, WeightRegistry, C64};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(hadalg_py, HadalgError, PyException);

fn err(e: hadalg::Error) -> PyErr {
    HadalgError::new_err(e.to_string())
}

fn weight(name: &str) -> PyResult<Weight> {
    WeightRegistry::new().resolve(name).map_err(|e| err(e.into()))
}

/// Element of the algebra in normalized coordinates `u(n) = p(n) f^(n)`.
#[pyclass(name = "Element", module = "hadalg_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyElement {
    inner: Element,
}

impl From<Element> for PyElement {
    fn from(inner: Element) -> Self {
        PyElement { inner }
    }
}

fn wrap_all(es: Vec<Element>) -> Vec<PyElement> {
    es.into_iter().map(PyElement::from).collect()
}

fn unwrap_all(es: &[PyRef<'_, PyElement>]) -> Vec<Element> {
    es.iter().map(|e| e.inner.clone()).collect()
}

#[pymethods]
impl PyElement {
    /// `Element(prefix, cycle, weight="factorial")` from normalized values.
    #[new]
    #[pyo3(signature = (prefix, cycle, weight = "factorial"))]
    fn new(prefix: Vec<C64>, cycle: Vec<C64>, weight: &str) -> PyResult<Self> {
        let w = self::weight(weight)?;
        let u = EpSeq::new(prefix, cycle).map_err(|e| err(e.into()))?;
        Ok(Element::from_normalized(w, u).into())
    }

    /// Polynomial with the given raw Taylor coefficients.
    #[staticmethod]
    #[pyo3(signature = (coefficients, weight = "factorial"))]
    fn from_raw(coefficients: Vec<C64>, weight: &str) -> PyResult<Self> {
        Ok(Element::from_raw_prefix(self::weight(weight)?, &coefficients).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (weight = "factorial"))]
    fn unit(weight: &str) -> PyResult<Self> {
        Ok(Element::unit(self::weight(weight)?).into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(json::element_from_str(text, &WeightRegistry::new()).map_err(err)?.into())
    }

    fn to_json(&self) -> PyResult<String> {
        Ok(json::element_to_value(&self.inner).map_err(err)?.to_string())
    }

    #[getter]
    fn weight(&self) -> String {
        self.inner.weight().name().to_string()
    }

    #[getter]
    fn prefix(&self) -> PyResult<Vec<C64>> {
        Ok(self.inner.u().map_err(err)?.prefix().to_vec())
    }

    #[getter]
    fn cycle(&self) -> PyResult<Vec<C64>> {
        Ok(self.inner.u().map_err(err)?.cycle().to_vec())
    }

    /// Normalized value `u(n)`.
    fn __getitem__(&self, n: usize) -> PyResult<C64> {
        self.inner.normalized_at(n).map_err(err)
    }

    /// Raw Taylor coefficient `u(n) / p(n)`.
    fn coefficient(&self, n: usize) -> PyResult<C64> {
        self.inner.raw_coefficient(n).map_err(err)
    }

    fn norm(&self) -> f64 {
        self.inner.norm().value
    }

    fn __add__(&self, other: &PyElement) -> PyResult<Self> {
        Ok(self.inner.add(&other.inner).map_err(err)?.into())
    }

    fn __sub__(&self, other: &PyElement) -> PyResult<Self> {
        Ok(self.inner.sub(&other.inner).map_err(err)?.into())
    }

    fn __neg__(&self) -> PyResult<Self> {
        Ok(self.inner.neg().map_err(err)?.into())
    }

    /// Weighted Hadamard product.
    fn __mul__(&self, other: &PyElement) -> PyResult<Self> {
        self.star(other)
    }

    fn star(&self, other: &PyElement) -> PyResult<Self> {
        Ok(self.inner.star(&other.inner).map_err(err)?.into())
    }

    fn scale(&self, c: C64) -> PyResult<Self> {
        Ok(self.inner.scalar_mul(c).map_err(err)?.into())
    }

    /// `(value, error_bound)` of the series at `z`.
    #[pyo3(signature = (z, tol = 1e-12))]
    fn eval(&self, z: C64, tol: f64) -> PyResult<(C64, f64)> {
        let e = self.inner.eval_at(z, tol).map_err(err)?;
        Ok((e.value, e.error_bound))
    }

    fn is_invertible(&self) -> PyResult<bool> {
        Ok(self.inner.invertible().map_err(err)?.is_some())
    }

    /// `(delta, inverse)`; raises when some `u(n)` vanishes.
    fn inverse(&self) -> PyResult<(f64, PyElement)> {
        let inv = self.inner.inverse().map_err(err)?;
        Ok((inv.delta, inv.inverse.into()))
    }

    /// `(C, h)` with `divisor * h = self`.
    fn divide(&self, divisor: &PyElement) -> PyResult<(f64, PyElement)> {
        let q = self.inner.divide(&divisor.inner).map_err(err)?;
        Ok((q.constant, q.quotient.into()))
    }

    /// `(C, [h_i])` with `sum h_i * g_i = self`.
    fn in_ideal(&self, generators: Vec<PyRef<'_, PyElement>>) -> PyResult<(f64, Vec<PyElement>)> {
        let m = self.inner.in_ideal(&unwrap_all(&generators)).map_err(err)?;
        Ok((m.constant, wrap_all(m.coefficients)))
    }

    fn approx_invertible(&self, eps: f64) -> PyResult<Self> {
        Ok(self.inner.approx_invertible(eps).map_err(err)?.into())
    }

    fn is_idempotent(&self) -> PyResult<bool> {
        self.inner.is_idempotent().map_err(err)
    }

    fn exp(&self) -> PyResult<Self> {
        Ok(self.inner.exp_el().map_err(err)?.into())
    }

    fn log(&self) -> PyResult<Self> {
        Ok(self.inner.log_el().map_err(err)?.into())
    }

    fn __repr__(&self) -> String {
        match self.inner.u() {
            Ok(u) => format!("Element(prefix={:?}, cycle={:?}, weight={:?})", u.prefix(), u.cycle(), self.inner.weight().name()),
            Err(_) => format!("Element(<generated>, weight={:?})", self.inner.weight().name()),
        }
    }
}

/// Matrix over the algebra.
#[pyclass(name = "Matrix", module = "hadalg_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMatrix {
    inner: MatElement,
}

impl From<MatElement> for PyMatrix {
    fn from(inner: MatElement) -> Self {
        PyMatrix { inner }
    }
}

#[pymethods]
impl PyMatrix {
    /// `Matrix(rows)` from a list of rows of elements.
    #[new]
    fn new(rows: Vec<Vec<PyRef<'_, PyElement>>>) -> PyResult<Self> {
        let w = rows
            .first()
            .and_then(|r| r.first())
            .map(|e| e.inner.weight().clone())
            .ok_or_else(|| err(hadalg::Error::EmptyInput))?;
        let rows = rows.iter().map(|r| unwrap_all(r)).collect();
        Ok(MatElement::from_rows(w, rows).map_err(err)?.into())
    }

    /// Matrix whose normalized coefficient matrix is `values` at every index.
    #[staticmethod]
    #[pyo3(signature = (values, weight = "factorial"))]
    fn constant(values: Vec<Vec<C64>>, weight: &str) -> PyResult<Self> {
        let rows = values.len();
        let cols = values.first().map_or(0, |r| r.len());
        if values.iter().any(|r| r.len() != cols) {
            return Err(err(hadalg::Error::DimensionMismatch("ragged rows".into())));
        }
        let m = hadalg::dense::CMat::from_row_iterator(rows, cols, values.into_iter().flatten());
        Ok(MatElement::constant(self::weight(weight)?, &m).map_err(err)?.into())
    }

    #[staticmethod]
    fn identity(n: usize, weight: &str) -> PyResult<Self> {
        Ok(MatElement::identity(self::weight(weight)?, n).into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(json::matrix_from_str(text, &WeightRegistry::new()).map_err(err)?.into())
    }

    fn to_json(&self) -> PyResult<String> {
        Ok(json::matrix_to_value(&self.inner).map_err(err)?.to_string())
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    fn __getitem__(&self, index: (usize, usize)) -> PyResult<PyElement> {
        let (i, j) = index;
        if i >= self.inner.rows() || j >= self.inner.cols() {
            return Err(pyo3::exceptions::PyIndexError::new_err("matrix index out of range"));
        }
        Ok(self.inner.get(i, j).clone().into())
    }

    /// Normalized coefficient matrix `U(k)` as nested lists.
    fn u_at(&self, k: usize) -> PyResult<Vec<Vec<C64>>> {
        let m = self.inner.u_at(k).map_err(err)?;
        Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(self.inner.mul(&other.inner).map_err(err)?.into())
    }

    fn __add__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(self.inner.add(&other.inner).map_err(err)?.into())
    }

    fn det(&self) -> PyResult<PyElement> {
        Ok(self.inner.det().map_err(err)?.into())
    }

    /// `(sup_k ||U(k)||_2, n * max ||a_ij||)`.
    fn norm_bounds(&self) -> PyResult<(f64, f64)> {
        let b = self.inner.norm_bounds().map_err(err)?;
        Ok((b.spectral_sup, b.upper))
    }

    /// Largest entrywise gap between the coefficient matrices.
    fn max_deviation(&self, other: &PyMatrix) -> PyResult<f64> {
        self.inner.max_deviation(&other.inner).map_err(err)
    }
}

#[pyfunction]
fn gcd(elements: Vec<PyRef<'_, PyElement>>) -> PyResult<PyElement> {
    Ok(algebra::gcd(&unwrap_all(&elements)).map_err(err)?.into())
}

/// `(delta, [g_i])` with `sum g_i * f_i = eps`.
#[pyfunction]
fn corona_solve(elements: Vec<PyRef<'_, PyElement>>) -> PyResult<(f64, Vec<PyElement>)> {
    let s = algebra::corona_solve(&unwrap_all(&elements)).map_err(err)?;
    Ok((s.delta, wrap_all(s.solutions)))
}

/// `(h, witness, delta)` with `witness = f1 + h * f2` invertible.
#[pyfunction]
#[pyo3(signature = (f1, f2, g1, g2, threshold = algebra::BASS_EPSILON))]
fn bass_reduce(f1: &PyElement, f2: &PyElement, g1: &PyElement, g2: &PyElement, threshold: f64) -> PyResult<(PyElement, PyElement, f64)> {
    let r = algebra::bass_reduce_with(&f1.inner, &f2.inner, &g1.inner, &g2.inner, threshold).map_err(err)?;
    Ok((r.h.into(), r.witness.into(), r.delta))
}

#[pyfunction]
fn idempotent_from_mask(prefix: Vec<C64>, cycle: Vec<C64>, weight: &str) -> PyResult<PyElement> {
    let mask = EpSeq::new(prefix, cycle).map_err(|e| err(e.into()))?;
    Ok(algebra::idempotent_from_mask(self::weight(weight)?, mask).map_err(err)?.into())
}

#[pyfunction]
fn mat_exp(a: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(matalg::mat_exp(&a.inner).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (a, nodes = 2048, agreement_tol = 1e-6))]
fn mat_log(a: &PyMatrix, nodes: usize, agreement_tol: f64) -> PyResult<PyMatrix> {
    let l = matalg::mat_log_with(&a.inner, &LogOptions { nodes, agreement_tol }).map_err(err)?;
    Ok(l.log.into())
}

/// `(delta, x)` with `a @ x = b`; `delta` is `inf` when `x = 0`.
#[pyfunction]
#[pyo3(signature = (a, b, rtol = matalg::DEFAULT_RTOL))]
fn mat_solve(a: &PyMatrix, b: &PyMatrix, rtol: f64) -> PyResult<(f64, PyMatrix)> {
    let s = matalg::mat_solve(&a.inner, &b.inner, rtol).map_err(err)?;
    Ok((s.delta, s.x.into()))
}

/// Elementary factors `[(i, j, alpha)]` whose ordered product is `a`.
#[pyfunction]
#[pyo3(signature = (a, step_norm = 0.5, tol = 1e-9))]
fn sl_factor(a: &PyMatrix, step_norm: f64, tol: f64) -> PyResult<Vec<(usize, usize, PyElement)>> {
    let f = matalg::sl_factor_with(&a.inner, &SlOptions { step_norm, tol }).map_err(err)?;
    Ok(f.factors.into_iter().map(|x| (x.i, x.j, x.alpha.into())).collect())
}

/// Matrix of the elementary factor `I + alpha e_ij`.
#[pyfunction]
fn elementary(n: usize, i: usize, j: usize, alpha: &PyElement) -> PyResult<PyMatrix> {
    let f = matalg::ElementaryFactor { i, j, alpha: alpha.inner.clone() };
    Ok(f.to_matrix(n).map_err(err)?.into())
}

/// `(m, exact)` with `m = None` for an infinite run.
#[pyfunction]
#[pyo3(signature = (f, k, horizon = ideals::DEFAULT_HORIZON))]
fn index_order(f: &PyElement, k: usize, horizon: usize) -> PyResult<(Option<usize>, bool)> {
    let r = ideals::index_order(&f.inner, k, horizon).map_err(err)?;
    let m = match r.m {
        Order::Finite(m) => Some(m),
        Order::Infinite => None,
    };
    Ok((m, r.certainty == hadalg::Certainty::Exact))
}

#[pyfunction]
#[pyo3(signature = (n, horizon = ideals::DEFAULT_HORIZON, weight = "factorial"))]
fn krull_family(n: u32, horizon: usize, weight: &str) -> PyResult<PyElement> {
    Ok(ideals::krull_family(self::weight(weight)?, n, horizon).map_err(err)?.into())
}

/// `[(k, ratio)]` with `ratio = m(f, 2^k) / k^n`.
#[pyfunction]
#[pyo3(signature = (f, n, horizon = ideals::DEFAULT_HORIZON))]
fn growth_trajectory(f: &PyElement, n: u32, horizon: usize) -> PyResult<Vec<(usize, f64)>> {
    let t = ideals::growth_trajectory(&f.inner, n, horizon).map_err(err)?;
    Ok(t.into_iter().map(|p| (p.k, p.ratio)).collect())
}

#[pyfunction]
fn annihilator(f: &PyElement) -> PyResult<PyElement> {
    Ok(ideals::annihilator_generator(&f.inner).map_err(err)?.into())
}

/// `(witness, pass)` for `kind` in `{"noetherian", "artinian"}`.
#[pyfunction]
#[pyo3(signature = (kind, n, weight = "factorial"))]
fn chain_witness(kind: &str, n: usize, weight: &str) -> PyResult<(PyElement, bool)> {
    let kind = match kind {
        "noetherian" => ChainKind::Noetherian,
        "artinian" => ChainKind::Artinian,
        other => return Err(pyo3::exceptions::PyValueError::new_err(format!("unknown chain kind `{other}`"))),
    };
    let (f, report) = ideals::chain_witness(kind, n, self::weight(weight)?).map_err(err)?;
    Ok((f.into(), report.pass))
}

#[pymodule]
fn hadalg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HadalgError", m.py().get_type::<HadalgError>())?;
    m.add_class::<PyElement>()?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(gcd, m)?)?;
    m.add_function(wrap_pyfunction!(corona_solve, m)?)?;
    m.add_function(wrap_pyfunction!(bass_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(idempotent_from_mask, m)?)?;
    m.add_function(wrap_pyfunction!(mat_exp, m)?)?;
    m.add_function(wrap_pyfunction!(mat_log, m)?)?;
    m.add_function(wrap_pyfunction!(mat_solve, m)?)?;
    m.add_function(wrap_pyfunction!(sl_factor, m)?)?;
    m.add_function(wrap_pyfunction!(elementary, m)?)?;
    m.add_function(wrap_pyfunction!(index_order, m)?)?;
    m.add_function(wrap_pyfunction!(krull_family, m)?)?;
    m.add_function(wrap_pyfunction!(growth_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(annihilator, m)?)?;
    m.add_function(wrap_pyfunction!(chain_witness, m)?)?;
    Ok(())
}
