//! Python bindings: `import noonsim`.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use noonsim::analysis::{self, AlphaPolicy, LossModel, Vary};
use noonsim::elements::{apply_element, apply_fsf, Element};
use noonsim::error::NoonError;
use noonsim::fock::{FockState, OccupationVector};
use noonsim::pipelines::{self, Method, MethodConfig};

fn py_err(e: NoonError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn method(index: u8) -> PyResult<Method> {
    index.to_string().parse().map_err(py_err)
}

/// Sparse multi-mode Fock state with complex amplitudes.
#[pyclass(name = "FockState", module = "noonsim", frozen)]
struct PyFockState {
    inner: FockState,
}

impl From<FockState> for PyFockState {
    fn from(inner: FockState) -> Self {
        PyFockState { inner }
    }
}

#[pymethods]
impl PyFockState {
    /// `terms` is a dict or a list of `(occupation, amplitude)` pairs.
    #[new]
    #[pyo3(signature = (mode_count, terms=None))]
    fn new(mode_count: usize, terms: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let pairs: Vec<(Vec<u32>, Complex64)> = match terms {
            None => Vec::new(),
            Some(t) => {
                if let Ok(list) = t.extract::<Vec<(Vec<u32>, Complex64)>>() {
                    list
                } else if let Ok(map) = t.extract::<HashMap<Vec<u32>, Complex64>>() {
                    map.into_iter().collect()
                } else {
                    return Err(PyValueError::new_err(
                        "terms must map occupation tuples to complex amplitudes",
                    ));
                }
            }
        };
        FockState::from_terms(
            mode_count,
            pairs
                .into_iter()
                .map(|(o, a)| (OccupationVector::new(o), a)),
            false,
        )
        .map(Self::from)
        .map_err(py_err)
    }

    #[staticmethod]
    fn fock(mode_count: usize, occupation: Vec<u32>) -> PyResult<Self> {
        FockState::fock(mode_count, occupation)
            .map(Self::from)
            .map_err(py_err)
    }

    #[staticmethod]
    fn vacuum(mode_count: usize) -> Self {
        FockState::vacuum(mode_count).into()
    }

    /// Single-mode coherent state truncated at `cutoff` photons (not renormalized).
    #[staticmethod]
    fn coherent(alpha: Complex64, cutoff: u32) -> Self {
        FockState::coherent_truncated(alpha, cutoff).into()
    }

    #[getter]
    fn mode_count(&self) -> usize {
        self.inner.mode_count()
    }

    fn norm_sq(&self) -> f64 {
        self.inner.norm_sq()
    }

    fn amplitude(&self, occupation: Vec<u32>) -> PyResult<Complex64> {
        self.inner
            .amplitude(&OccupationVector::new(occupation))
            .map_err(py_err)
    }

    /// Terms in canonical (lexicographic) order.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Bound<'py, PyTuple>, Complex64)>> {
        self.inner
            .terms()
            .map(|(o, a)| Ok((PyTuple::new(py, o.counts())?, *a)))
            .collect()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (o, a) in self.inner.terms() {
            d.set_item(PyTuple::new(py, o.counts())?, *a)?;
        }
        Ok(d)
    }

    fn tensor(&self, other: PyRef<'_, PyFockState>) -> Self {
        self.inner.tensor(&other.inner).into()
    }

    fn restrict_total_photons(&self, n_total: u32) -> Self {
        self.inner.restrict_total_photons(n_total).into()
    }

    fn beam_splitter(&self, i: usize, j: usize, theta: f64) -> PyResult<Self> {
        self.apply(Element::BeamSplitter { i, j, theta })
    }

    fn phase_shifter(&self, mode: usize, phi: f64) -> PyResult<Self> {
        self.apply(Element::PhaseShifter { mode, phi })
    }

    fn cross_kerr(&self, i: usize, j: usize, chi: f64) -> PyResult<Self> {
        self.apply(Element::CrossKerr { i, j, chi })
    }

    /// Removes the `k`-photon component of `mode`; returns
    /// `(state, herald_probability)`.
    fn fock_state_filter(&self, mode: usize, k: u32) -> PyResult<(Self, f64)> {
        let out = apply_fsf(&self.inner, mode, k).map_err(py_err)?;
        Ok((out.state.into(), out.herald_probability))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("FockState({})", self.inner)
    }
}

impl PyFockState {
    fn apply(&self, e: Element) -> PyResult<Self> {
        apply_element(&self.inner, &e)
            .map(Self::from)
            .map_err(py_err)
    }
}

/// Runs one generation scheme and returns its NOON report as a dict.
#[pyfunction]
#[pyo3(signature = (method_index, d, n_photons, alpha_sq=None, cutoff=None, tolerance=None))]
fn run_method<'py>(
    py: Python<'py>,
    method_index: u8,
    d: usize,
    n_photons: u32,
    alpha_sq: Option<f64>,
    cutoff: Option<u32>,
    tolerance: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = MethodConfig::new(method(method_index)?, d, n_photons);
    if let Some(a) = alpha_sq {
        cfg = cfg.with_alpha_sq(a);
    }
    if let Some(c) = cutoff {
        cfg = cfg.with_cutoff(c);
    }
    if let Some(t) = tolerance {
        cfg = cfg.with_tolerance(t);
    }
    let r = py.detach(|| pipelines::run(&cfg)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("method", method_index)?;
    out.set_item("d", r.d)?;
    out.set_item("N", r.n_photons)?;
    out.set_item("component_amplitudes", r.component_amplitudes)?;
    out.set_item("generation_probability", r.generation_probability)?;
    out.set_item("sign_pattern", r.sign_pattern)?;
    out.set_item("global_phase", r.global_phase)?;
    out.set_item("balanced", r.balanced)?;
    out.set_item("residual_norm", r.residual_norm)?;
    out.set_item("degenerate", r.degenerate)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (method_index, d, n_photons, alpha_sq=None))]
fn closed_form_probability(
    method_index: u8,
    d: usize,
    n_photons: u32,
    alpha_sq: Option<f64>,
) -> PyResult<f64> {
    analysis::closed_form_probability(method(method_index)?, d, n_photons, alpha_sq).map_err(py_err)
}

#[pyfunction]
fn optimal_alpha_sq(d: usize, n_photons: u32) -> f64 {
    analysis::optimal_alpha_sq(d, n_photons)
}

/// `(p2 / p1_opt, sqrt(2 pi N))`.
#[pyfunction]
fn asymptotic_ratio(n_photons: u32) -> PyResult<(f64, f64)> {
    let r = analysis::asymptotic_ratio(n_photons).map_err(py_err)?;
    Ok((r.ratio, r.stirling))
}

#[pyfunction]
fn resource_counts<'py>(
    py: Python<'py>,
    method_index: u8,
    d: usize,
    n_photons: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let rc = analysis::resource_counts(method(method_index)?, d, n_photons).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("beam_splitters", rc.beam_splitters)?;
    out.set_item("phase_shifters", rc.phase_shifters)?;
    out.set_item("spcd_detectors", rc.spcd_detectors)?;
    out.set_item("fock_inputs", rc.fock_inputs)?;
    out.set_item("single_photon_inputs", rc.single_photon_inputs)?;
    out.set_item("polarization_variant", rc.polarization_variant)?;
    Ok(out)
}

/// Closed-form probability scaled by detector and source efficiencies.
#[pyfunction]
#[pyo3(signature = (method_index, d, n_photons, eta_detector=1.0, eta_single_photon=1.0, alpha_sq=None))]
fn loss_adjusted_probability(
    method_index: u8,
    d: usize,
    n_photons: u32,
    eta_detector: f64,
    eta_single_photon: f64,
    alpha_sq: Option<f64>,
) -> PyResult<f64> {
    let m = method(method_index)?;
    let p = analysis::closed_form_probability(m, d, n_photons, alpha_sq).map_err(py_err)?;
    let rc = analysis::resource_counts(m, d, n_photons).map_err(py_err)?;
    let lm = LossModel::new(eta_detector, eta_single_photon).map_err(py_err)?;
    Ok(analysis::loss_adjusted_probability(p, &rc, &lm))
}

/// Sweep over `d` (`vary="d"`, `fixed` is N) or over N (`vary="N"`, `fixed`
/// is d) from `lo` to `hi` inclusive. Returns a list of row dicts.
#[pyfunction]
#[pyo3(signature = (methods, vary, fixed, lo, hi, alpha_sq=None))]
fn sweep<'py>(
    py: Python<'py>,
    methods: Vec<u8>,
    vary: &str,
    fixed: usize,
    lo: usize,
    hi: usize,
    alpha_sq: Option<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let methods = methods
        .into_iter()
        .map(method)
        .collect::<PyResult<Vec<_>>>()?;
    let as_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| PyValueError::new_err(format!("photon number {v} too large")))
    };
    let spec = match vary {
        "d" => Vary::OverD {
            n_photons: as_u32(fixed)?,
            d: lo..=hi,
        },
        "N" => Vary::OverN {
            d: fixed,
            n_photons: as_u32(lo)?..=as_u32(hi)?,
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "vary must be 'd' or 'N' (got '{other}')"
            )))
        }
    };
    let policy = alpha_sq.map_or(AlphaPolicy::Optimal, AlphaPolicy::Fixed);
    let rows = py
        .detach(|| analysis::sweep(&methods, &spec, policy))
        .map_err(py_err)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("method", r.method.index())?;
            d.set_item("d", r.d)?;
            d.set_item("N", r.n_photons)?;
            d.set_item("alpha_sq", r.alpha_sq)?;
            d.set_item("p_closed", r.p_closed)?;
            d.set_item("p_sim", r.p_sim)?;
            d.set_item("rel_err", r.rel_err)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "noonsim")]
fn noonsim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFockState>()?;
    m.add_function(wrap_pyfunction!(run_method, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_probability, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_alpha_sq, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(resource_counts, m)?)?;
    m.add_function(wrap_pyfunction!(loss_adjusted_probability, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
