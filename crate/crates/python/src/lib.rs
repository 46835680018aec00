//! Python module `charsum`: characters, spectra, the random model and the
//! explicit constants.

use charsum::randmodel::{self, ArithmeticModel};
use charsum::spectrum::{self, GMode};
use charsum::theory::{self, EnvelopeKind, PredictionEnvelope};
use charsum::{RandomModel, RandomModelConfig};
use num_complex::Complex64;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

fn err(e: charsum::Error) -> PyErr {
    match e {
        charsum::Error::Overflow(msg) => PyOverflowError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Converts any serializable record into plain Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_bound_py_any(py),
            (_, Some(u)) => u.into_bound_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(xs) => {
            let list = PyList::empty(py);
            for x in xs {
                list.append(value_to_py(py, x)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, value_to_py(py, x)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn parse_kind(kind: &str) -> PyResult<EnvelopeKind> {
    kind.parse().map_err(err)
}

/// A primitive Dirichlet character of order `d` modulo the prime `p`,
/// `χ(g^k) = e(m k / d)` for the least primitive root `g`.
#[pyclass(name = "DirichletCharacter", module = "charsum", frozen)]
pub struct PyCharacter {
    inner: charsum::DirichletCharacter,
}

#[pymethods]
impl PyCharacter {
    #[new]
    #[pyo3(signature = (p, d, m = 1))]
    fn new(p: u64, d: u64, m: u64) -> PyResult<Self> {
        Ok(Self { inner: charsum::DirichletCharacter::from_prime(p, d, m).map_err(err)? })
    }

    #[staticmethod]
    fn legendre(p: u64) -> PyResult<Self> {
        Ok(Self { inner: charsum::DirichletCharacter::legendre(p).map_err(err)? })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }

    #[getter]
    fn index(&self) -> u32 {
        self.inner.index()
    }

    #[getter]
    fn generator(&self) -> u64 {
        self.inner.generator()
    }

    /// `χ(n)` for any integer `n` (0 when `p | n`).
    fn __call__(&self, n: i64) -> Complex64 {
        self.inner.value_at(n)
    }

    fn exponent(&self, n: i64) -> Option<u32> {
        self.inner.exponent_at(n)
    }

    fn gauss_sum(&self) -> Complex64 {
        self.inner.gauss_sum()
    }

    #[pyo3(signature = (shift = 0))]
    fn coefficients(&self, shift: i64) -> Vec<Complex64> {
        self.inner.coefficients(shift)
    }

    /// Direct O(p) evaluation of `f(e(θ)) = Σ χ(n + shift) e(nθ)`.
    #[pyo3(signature = (theta, shift = 0))]
    fn eval_f(&self, theta: f64, shift: i64) -> Complex64 {
        self.inner.eval_f_direct(theta, shift)
    }

    /// Frequencies of exponent patterns over consecutive windows of length `len`.
    fn pattern_frequencies<'py>(&self, py: Python<'py>, len: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.pattern_frequencies(len))
    }

    fn __repr__(&self) -> String {
        format!("DirichletCharacter(p={}, d={}, m={})", self.inner.p(), self.inner.order(), self.inner.index())
    }
}

/// `|f(e_p(K + 1/2))| / √p` for every residue `K`.
#[pyfunction]
#[pyo3(signature = (chi, shift = 0))]
fn midpoint_spectrum(py: Python<'_>, chi: &PyCharacter, shift: i64) -> Vec<f64> {
    py.detach(|| spectrum::midpoint_spectrum(&chi.inner, shift).values)
}

/// Estimated maximum of `|f|/√p` over each arc between consecutive p-th roots of unity.
#[pyfunction]
#[pyo3(signature = (chi, shift = 0, grid = spectrum::DEFAULT_GRID, refine_tol = spectrum::DEFAULT_REFINE_TOL))]
fn arc_max_spectrum(py: Python<'_>, chi: &PyCharacter, shift: i64, grid: usize, refine_tol: f64) -> PyResult<Vec<f64>> {
    py.detach(|| spectrum::arc_max_spectrum(&chi.inner, shift, grid, refine_tol))
        .map(|s| s.values)
        .map_err(err)
}

/// `g_{χ,K}(1/2)` for every `K`.
#[pyfunction]
#[pyo3(signature = (chi, shift = 0))]
fn midpoint_g(py: Python<'_>, chi: &PyCharacter, shift: i64) -> Vec<Complex64> {
    py.detach(|| spectrum::midpoint_g(&chi.inner, shift))
}

/// `g_{χ,K}(x)`; with `window` set, the truncated interpolation sum and its tail bound.
#[pyfunction]
#[pyo3(signature = (chi, k, x, shift = 0, window = None))]
fn g_aux(chi: &PyCharacter, k: i64, x: f64, shift: i64, window: Option<u64>) -> PyResult<(Complex64, f64)> {
    let mode = window.map_or(GMode::Exact, |w| GMode::Truncated { window: w });
    let g = spectrum::g_aux(&chi.inner, k, x, shift, mode).map_err(err)?;
    Ok((g.value, g.tail_bound))
}

/// `(phi, counts)` with `phi[i] = #{K : values[K] ≥ v_grid[i]} / len(values)`.
#[pyfunction]
fn tail(values: Vec<f64>, v_grid: Vec<f64>) -> PyResult<(Vec<f64>, Vec<u64>)> {
    let spec = charsum::Spectrum {
        p: values.len() as u64,
        order: 0,
        index: 0,
        shift: 0,
        kind: charsum::SpectrumKind::Midpoint,
        values,
    };
    let c = spectrum::tail_curve(&spec, &v_grid).map_err(err)?;
    Ok((c.phi, c.counts))
}

#[pyfunction]
#[pyo3(signature = (chi, members = false))]
fn exceptional_set<'py>(py: Python<'py>, chi: &PyCharacter, members: bool) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| spectrum::exceptional_set(&chi.inner, members));
    to_py(py, &r)
}

/// Constant record for order `d` as a dict.
#[pyfunction]
fn constants(py: Python<'_>, d: u32) -> PyResult<Bound<'_, PyAny>> {
    if d < 2 {
        return Err(PyValueError::new_err("order must be at least 2"));
    }
    let c = py.detach(|| theory::constants(d));
    to_py(py, &c)
}

#[pyfunction]
fn limit_constant(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let c = py.detach(theory::limit_constant);
    let dict = PyDict::new(py);
    dict.set_item("value", c.value)?;
    dict.set_item("error", c.error)?;
    dict.set_item("head_integral", c.head_integral)?;
    dict.set_item("tail_integral", c.tail_integral)?;
    dict.set_item("lower", c.lower)?;
    Ok(dict.into_any())
}

/// `α_d(u) = log E exp(u Re ω)` for `ω` uniform among the d-th roots of unity.
#[pyfunction]
fn alpha(d: u32, u: f64) -> f64 {
    theory::alpha(d, u)
}

/// Envelope `(constant, rate)` with `Φ(V) ≈ exp(−constant · exp(rate · V))`.
#[pyfunction]
#[pyo3(signature = (d, kind = "lower"))]
fn envelope(d: u32, kind: &str) -> PyResult<(f64, f64)> {
    let e = PredictionEnvelope::new(d, parse_kind(kind)?).map_err(err)?;
    Ok((e.constant, e.rate))
}

#[pyfunction]
#[pyo3(signature = (v, d, kind = "lower"))]
fn predict_tail(v: f64, d: u32, kind: &str) -> PyResult<f64> {
    theory::predict_tail(v, d, parse_kind(kind)?).map_err(err)
}

#[pyfunction]
fn saddle_s(v: f64, d: u32) -> f64 {
    theory::saddle_s(v, d)
}

fn config(p: u64, d: u32, samples: usize, seed: u64) -> PyResult<RandomModelConfig> {
    RandomModelConfig::new(p, d, samples, seed).map_err(err)
}

/// Monte Carlo samples of the random model `G`.
#[pyfunction]
#[pyo3(signature = (p, d, samples, seed = 0))]
fn random_model_samples(py: Python<'_>, p: u64, d: u32, samples: usize, seed: u64) -> PyResult<Vec<Complex64>> {
    let cfg = config(p, d, samples, seed)?;
    Ok(py.detach(|| RandomModel::new(cfg).samples().values))
}

/// Monte Carlo estimate of `E exp(2s Re G)` with its jackknife standard error.
#[pyfunction]
#[pyo3(signature = (p, d, s, samples, seed = 0))]
fn empirical_laplace(py: Python<'_>, p: u64, d: u32, s: f64, samples: usize, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = config(p, d, samples, seed)?;
    let e = py.detach(|| randmodel::empirical_laplace(&cfg, s)).map_err(err)?;
    to_py(py, &e)
}

#[pyfunction]
fn theoretical_laplace(py: Python<'_>, p: u64, d: u32, s: f64) -> PyResult<Bound<'_, PyAny>> {
    if p < 3 || p % 2 == 0 {
        return Err(PyValueError::new_err("p must be odd and at least 3"));
    }
    to_py(py, &randmodel::theoretical_laplace(p, d, s))
}

/// `log E exp(2s Re G)` from the full product over every coefficient.
#[pyfunction]
fn exact_log_laplace(p: u64, d: u32, s: f64) -> PyResult<f64> {
    Ok(randmodel::exact_log_laplace(&config(p, d, 1, 0)?, s))
}

/// `[E (Re G)^n for n in 0..=n_max]`.
#[pyfunction]
fn exact_moments(p: u64, d: u32, n_max: usize) -> PyResult<Vec<f64>> {
    Ok(randmodel::exact_moments(&config(p, d, 1, 0)?, n_max))
}

/// `(1/p) Σ_{K ∉ E_p} exp(2s Re g_K(1/2))` for each `s`.
#[pyfunction]
fn arithmetic_laplace(py: Python<'_>, chi: &PyCharacter, s: Vec<f64>) -> Vec<f64> {
    py.detach(|| {
        let model = ArithmeticModel::new(&chi.inner);
        s.iter().map(|&t| model.laplace(t).value).collect()
    })
}

#[pymodule]
#[pyo3(name = "charsum")]
fn charsum_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyCharacter>()?;
    m.add_function(wrap_pyfunction!(midpoint_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(arc_max_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(midpoint_g, m)?)?;
    m.add_function(wrap_pyfunction!(g_aux, m)?)?;
    m.add_function(wrap_pyfunction!(tail, m)?)?;
    m.add_function(wrap_pyfunction!(exceptional_set, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(limit_constant, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(envelope, m)?)?;
    m.add_function(wrap_pyfunction!(predict_tail, m)?)?;
    m.add_function(wrap_pyfunction!(saddle_s, m)?)?;
    m.add_function(wrap_pyfunction!(random_model_samples, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(exact_log_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(exact_moments, m)?)?;
    m.add_function(wrap_pyfunction!(arithmetic_laplace, m)?)?;
    Ok(())
}
