//! Python bindings for `ppbell`.
//!
//! Build with the `extension-module` feature (e.g. `maturin develop
//! --features extension-module`) and `import ppbell_py`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ppbell::cli::default_workers;
use ppbell::fock;
use ppbell::observables;
use ppbell::phase::{self, ModeVector, Site};
use ppbell::rng::RandomStream;
use ppbell::sampler::{self, PairNumber, SamplerKind};
use ppbell::sim::{self, SampleSource};
use ppbell::stats::CorrelationEstimate;

fn value_err(e: ppbell::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pairs(n: u32) -> PyResult<PairNumber> {
    PairNumber::new(n).map_err(value_err)
}

fn kind(name: &str) -> PyResult<SamplerKind> {
    name.parse().map_err(value_err)
}

fn site(name: &str) -> PyResult<Site> {
    match name {
        "A" | "a" => Ok(Site::A),
        "B" | "b" => Ok(Site::B),
        other => Err(PyValueError::new_err(format!("unknown site {other:?}"))),
    }
}

fn mode_vector(v: Vec<Complex64>) -> PyResult<ModeVector> {
    v.try_into()
        .map_err(|v: Vec<Complex64>| PyValueError::new_err(format!("expected 4 amplitudes, got {}", v.len())))
}

/// One sample of the doubled phase space: `alpha` and `beta`, four complex
/// amplitudes each, modes ordered A+, A-, B+, B-.
#[pyclass(name = "PhasePoint", frozen, from_py_object)]
#[derive(Clone)]
struct PyPhasePoint {
    inner: phase::PhasePoint,
}

#[pymethods]
impl PyPhasePoint {
    #[new]
    fn new(alpha: Vec<Complex64>, beta: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyPhasePoint {
            inner: phase::PhasePoint::new(mode_vector(alpha)?, mode_vector(beta)?),
        })
    }

    #[getter]
    fn alpha(&self) -> Vec<Complex64> {
        self.inner.alpha.to_vec()
    }

    #[getter]
    fn beta(&self) -> Vec<Complex64> {
        self.inner.beta.to_vec()
    }

    /// `(plus, minus)` sum/difference coordinates.
    fn to_sum_diff(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let s = phase::to_sum_diff(&self.inner);
        (s.plus.to_vec(), s.minus.to_vec())
    }

    #[staticmethod]
    fn from_sum_diff(plus: Vec<Complex64>, minus: Vec<Complex64>) -> PyResult<Self> {
        let s = phase::SumDiffPoint::new(mode_vector(plus)?, mode_vector(minus)?);
        Ok(PyPhasePoint {
            inner: phase::from_sum_diff(&s),
        })
    }

    /// Phase-space photon numbers `alpha_i * beta_i`.
    fn numbers(&self) -> Vec<Complex64> {
        phase::ModeIndex::ALL.iter().map(|&m| self.inner.number(m)).collect()
    }

    fn spin(&self, site_name: &str, theta: f64) -> PyResult<Complex64> {
        Ok(observables::spin_variable(&self.inner, site(site_name)?, theta))
    }

    fn chsh(&self, theta: f64) -> Complex64 {
        observables::chsh_sample(&self.inner, theta, observables::AngleConvention::Symmetric)
    }

    fn __repr__(&self) -> String {
        format!("PhasePoint(alpha={:?}, beta={:?})", self.inner.alpha, self.inner.beta)
    }
}

/// Draw sample `index` of the stream keyed by `seed`.
#[pyfunction]
#[pyo3(signature = (seed, index, pairs_n = 1, sampler_kind = "exact"))]
fn sample_bell(seed: u64, index: u64, pairs_n: u32, sampler_kind: &str) -> PyResult<PyPhasePoint> {
    let mut rng = RandomStream::new(seed, index);
    Ok(PyPhasePoint {
        inner: sampler::sample_bell(&mut rng, pairs(pairs_n)?, kind(sampler_kind)?),
    })
}

#[pyfunction]
#[pyo3(signature = (plus, minus, pairs_n = 1))]
fn density(plus: Vec<Complex64>, minus: Vec<Complex64>, pairs_n: u32) -> PyResult<f64> {
    let s = phase::SumDiffPoint::new(mode_vector(plus)?, mode_vector(minus)?);
    Ok(sampler::bell_density(&s, pairs(pairs_n)?))
}

/// Canonical positive-P function of the Bell state at `point`.
#[pyfunction]
#[pyo3(signature = (point, pairs_n = 1))]
fn canonical_p(point: &PyPhasePoint, pairs_n: u32) -> PyResult<f64> {
    let state = fock::build_bell_state(pairs(pairs_n)?);
    Ok(fock::canonical_p(&state, &point.inner))
}

#[pyfunction]
#[pyo3(signature = (theta_a, theta_b, pairs_n = 1))]
fn exact_correlation(theta_a: f64, theta_b: f64, pairs_n: u32) -> PyResult<f64> {
    let state = fock::build_bell_state(pairs(pairs_n)?);
    Ok(fock::exact_correlation(&state, theta_a, theta_b))
}

#[pyfunction]
fn theoretical_delta(theta: f64) -> f64 {
    observables::theoretical_delta(theta)
}

fn estimate_dict<'py>(py: Python<'py>, e: &CorrelationEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("count", e.count)?;
    d.set_item("mean", e.mean)?;
    d.set_item("stderr_real", e.stderr_real)?;
    d.set_item("stderr_imag", e.stderr_imag)?;
    Ok(d)
}

/// CHSH sweep; returns one dict per grid point.
#[pyfunction]
#[pyo3(signature = (seed = 1, samples = 100_000, pairs_n = 1, sampler_kind = "exact",
                    theta_min = 0.0, theta_max = std::f64::consts::FRAC_PI_2, theta_steps = 25,
                    workers = None))]
#[allow(clippy::too_many_arguments)]
fn chsh_sweep<'py>(
    py: Python<'py>,
    seed: u64,
    samples: u64,
    pairs_n: u32,
    sampler_kind: &str,
    theta_min: f64,
    theta_max: f64,
    theta_steps: usize,
    workers: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let source = SampleSource::new(seed, pairs(pairs_n)?, kind(sampler_kind)?);
    let grid = sim::theta_grid(theta_min, theta_max, theta_steps).map_err(value_err)?;
    let pool = sim::thread_pool(workers.unwrap_or_else(default_workers)).map_err(value_err)?;
    let points = py.detach(|| sim::chsh_sweep(&pool, &source, &grid, samples));
    points
        .iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("theta", p.theta)?;
            d.set_item("delta_mean", p.delta_mean())?;
            d.set_item("delta_stderr", p.delta_stderr())?;
            d.set_item("delta_imag_mean", p.delta_imag_mean())?;
            d.set_item("delta_theory", p.delta_theory)?;
            let corr = p
                .correlations
                .iter()
                .map(|e| estimate_dict(py, e))
                .collect::<PyResult<Vec<_>>>()?;
            d.set_item("correlations", corr)?;
            let numbers = p
                .numbers
                .iter()
                .map(|e| estimate_dict(py, e))
                .collect::<PyResult<Vec<_>>>()?;
            d.set_item("mode_numbers", numbers)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn ppbell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhasePoint>()?;
    m.add_function(wrap_pyfunction!(sample_bell, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_p, m)?)?;
    m.add_function(wrap_pyfunction!(exact_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_delta, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_sweep, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
