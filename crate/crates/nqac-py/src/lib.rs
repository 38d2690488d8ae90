//! Python bindings: parameter types, solvers, phase analysis, gap estimates, metastability and
//! the exact oracle.

use nqac::{Coupling, Error, HamiltonianForm, Subspace};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_coupling(s: &str) -> PyResult<Coupling> {
    match s {
        "ferro" => Ok(Coupling::Ferro),
        "antiferro" => Ok(Coupling::Antiferro),
        _ => Err(PyValueError::new_err(format!(
            "coupling must be 'ferro' or 'antiferro', got {s:?}"
        ))),
    }
}

fn coupling_name(c: Coupling) -> &'static str {
    match c {
        Coupling::Ferro => "ferro",
        Coupling::Antiferro => "antiferro",
    }
}

type Taylor = (Option<f64>, Option<f64>, Option<f64>, Option<f64>);

#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone)]
pub struct PyModelParams {
    inner: nqac::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (p=2, q=2, j=1.0, lam=0.0, *, coupling="ferro", eta=0.0, gamma=0.0, temperature=0.0, nesting=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        p: u32,
        q: u32,
        j: f64,
        lam: f64,
        coupling: &str,
        eta: f64,
        gamma: f64,
        temperature: f64,
        nesting: f64,
    ) -> PyResult<Self> {
        let inner = nqac::ModelParams::new(p, q, j, lam)
            .with_coupling(parse_coupling(coupling)?)
            .with_eta(eta)
            .with_gamma(gamma)
            .with_temperature(temperature)
            .with_nesting(nesting);
        inner.validate().map_err(py_err)?;
        Ok(PyModelParams { inner })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p
    }
    #[getter]
    fn q(&self) -> u32 {
        self.inner.q
    }
    #[getter]
    fn j(&self) -> f64 {
        self.inner.j
    }
    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }
    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.temperature
    }
    #[getter]
    fn nesting(&self) -> f64 {
        self.inner.nesting
    }
    #[getter]
    fn coupling(&self) -> &'static str {
        coupling_name(self.inner.coupling)
    }
    #[getter]
    fn energy_scale(&self) -> f64 {
        self.inner.energy_scale()
    }
    #[getter]
    fn scaled_gamma(&self) -> f64 {
        self.inner.scaled_gamma()
    }
    #[getter]
    fn scaled_lambda(&self) -> f64 {
        self.inner.scaled_lambda()
    }

    /// Copy with the given fields replaced.
    #[pyo3(signature = (*, j=None, lam=None, eta=None, gamma=None, temperature=None, nesting=None, coupling=None))]
    #[allow(clippy::too_many_arguments)]
    fn replace(
        &self,
        j: Option<f64>,
        lam: Option<f64>,
        eta: Option<f64>,
        gamma: Option<f64>,
        temperature: Option<f64>,
        nesting: Option<f64>,
        coupling: Option<&str>,
    ) -> PyResult<Self> {
        let mut p = self.inner;
        p.j = j.unwrap_or(p.j);
        p.lambda = lam.unwrap_or(p.lambda);
        p.eta = eta.unwrap_or(p.eta);
        p.gamma = gamma.unwrap_or(p.gamma);
        p.temperature = temperature.unwrap_or(p.temperature);
        p.nesting = nesting.unwrap_or(p.nesting);
        if let Some(c) = coupling {
            p.coupling = parse_coupling(c)?;
        }
        p.validate().map_err(py_err)?;
        Ok(PyModelParams { inner: p })
    }

    /// Equivalent parameters at nesting `target` under `convention` ("saddle", "low_t_free_energy",
    /// "low_t_partition").
    fn scaled_to(&self, target: f64, convention: &str) -> PyResult<Self> {
        let conv = match convention {
            "saddle" => nqac::ScalingConvention::Saddle,
            "low_t_free_energy" => nqac::ScalingConvention::LowTFreeEnergy,
            "low_t_partition" => nqac::ScalingConvention::LowTPartition,
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown scaling convention {convention:?}"
                )))
            }
        };
        Ok(PyModelParams {
            inner: nqac::scale_params(&self.inner, target, conv),
        })
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(p={}, q={}, j={}, lam={}, coupling='{}', eta={}, gamma={}, temperature={}, nesting={})",
            p.p,
            p.q,
            p.j,
            p.lambda,
            coupling_name(p.coupling),
            p.eta,
            p.gamma,
            p.temperature,
            p.nesting
        )
    }
}

#[pyclass(name = "SolverSettings", from_py_object)]
#[derive(Clone)]
pub struct PySolverSettings {
    inner: nqac::SolverSettings,
}

#[pymethods]
impl PySolverSettings {
    #[new]
    #[pyo3(signature = (grid_points=2001, fp_tolerance=1e-12, max_iterations=10_000, damping=0.5))]
    fn new(
        grid_points: usize,
        fp_tolerance: f64,
        max_iterations: usize,
        damping: f64,
    ) -> PyResult<Self> {
        let inner = nqac::SolverSettings {
            grid_points,
            fp_tolerance,
            max_iterations,
            damping,
        };
        inner.validate().map_err(py_err)?;
        Ok(PySolverSettings { inner })
    }
}

fn settings_or_default(s: Option<PySolverSettings>) -> nqac::SolverSettings {
    s.map(|s| s.inner).unwrap_or_default()
}

#[pyclass(name = "SaddleSolution", get_all, frozen, skip_from_py_object)]
pub struct PySaddleSolution {
    fractions: Vec<f64>,
    ws: Vec<f64>,
    residual: f64,
    stability: &'static str,
    free_energy: f64,
    multiplicity: u32,
}

impl From<nqac::SaddleSolution> for PySaddleSolution {
    fn from(s: nqac::SaddleSolution) -> Self {
        PySaddleSolution {
            fractions: s.config.fractions(),
            ws: s.config.ws(),
            residual: s.residual,
            stability: s.stability.as_str(),
            free_energy: s.free_energy,
            multiplicity: s.multiplicity,
        }
    }
}

#[pymethods]
impl PySaddleSolution {
    fn __repr__(&self) -> String {
        format!(
            "SaddleSolution(ws={:?}, stability='{}', free_energy={})",
            self.ws, self.stability, self.free_energy
        )
    }
}

#[pyclass(name = "TransitionReport", get_all, frozen, skip_from_py_object)]
pub struct PyTransitionReport {
    gamma_c1: Option<f64>,
    gamma_c2: Option<f64>,
    order: &'static str,
    barrier_height: Option<f64>,
    barrier_width: Option<f64>,
}

#[pymethods]
impl PyTransitionReport {
    fn __repr__(&self) -> String {
        format!(
            "TransitionReport(order='{}', gamma_c1={:?}, gamma_c2={:?}, barrier_height={:?}, barrier_width={:?})",
            self.order, self.gamma_c1, self.gamma_c2, self.barrier_height, self.barrier_width
        )
    }
}

#[pyclass(name = "Spectrum", get_all, frozen, skip_from_py_object)]
pub struct PySpectrum {
    energies: Vec<f64>,
    degeneracies: Vec<u64>,
    gap: Option<f64>,
}

#[pyclass(name = "Occupancy", get_all, frozen, skip_from_py_object)]
pub struct PyOccupancy {
    levels: Vec<usize>,
    energies: Vec<f64>,
    log_degeneracies: Vec<f64>,
    log_weights: Vec<f64>,
    probabilities: Vec<f64>,
}

impl From<nqac::OccupancySpectrum> for PyOccupancy {
    fn from(o: nqac::OccupancySpectrum) -> Self {
        PyOccupancy {
            levels: o.levels,
            energies: o.energies,
            log_degeneracies: o.log_degeneracies,
            log_weights: o.log_weights,
            probabilities: o.probabilities,
        }
    }
}

#[pyclass(name = "EncodedInstance", from_py_object)]
#[derive(Clone)]
pub struct PyEncodedInstance {
    inner: nqac::EncodedInstance,
}

#[pymethods]
impl PyEncodedInstance {
    /// Nested encoding of logical fields `h` and symmetric couplings `j` with C copies and penalty.
    #[new]
    fn new(h: Vec<f64>, j: Vec<Vec<f64>>, c: usize, penalty: f64) -> PyResult<Self> {
        Ok(PyEncodedInstance {
            inner: nqac::encode(&h, &j, c, penalty).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_triplets(text: &str) -> PyResult<Self> {
        Ok(PyEncodedInstance {
            inner: nqac::EncodedInstance::from_triplets(text).map_err(py_err)?,
        })
    }

    fn to_triplets(&self) -> String {
        self.inner.to_triplets()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn c(&self) -> usize {
        self.inner.c
    }

    #[getter]
    fn total_spins(&self) -> usize {
        self.inner.total_spins()
    }
}

fn form(params: Option<&PyModelParams>) -> HamiltonianForm {
    match params {
        Some(p) => HamiltonianForm::Pspin {
            p: p.inner.p,
            q: p.inner.q,
            j: p.inner.j,
            lambda: p.inner.lambda,
            coupling: p.inner.coupling,
        },
        None => HamiltonianForm::Pairwise,
    }
}

/// Free energy per logical qubit of a sectored configuration.
#[pyfunction]
fn free_energy(params: &PyModelParams, fractions: Vec<f64>, ws: Vec<f64>) -> PyResult<f64> {
    let cfg = nqac::SectorConfig::from_parts(&fractions, &ws).map_err(py_err)?;
    nqac::free_energy(&params.inner, &cfg).map_err(py_err)
}

#[pyfunction]
fn free_energy_gradient(
    params: &PyModelParams,
    fractions: Vec<f64>,
    ws: Vec<f64>,
) -> PyResult<Vec<f64>> {
    let cfg = nqac::SectorConfig::from_parts(&fractions, &ws).map_err(py_err)?;
    nqac::free_energy_gradient(&params.inner, &cfg).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (params, settings=None))]
fn solve_symmetric(
    py: Python<'_>,
    params: &PyModelParams,
    settings: Option<PySolverSettings>,
) -> PyResult<Vec<PySaddleSolution>> {
    let (p, s) = (params.inner, settings_or_default(settings));
    let sols = py
        .detach(|| nqac::solve_symmetric(&p, &s))
        .map_err(py_err)?;
    Ok(sols.into_iter().map(Into::into).collect())
}

#[pyfunction]
#[pyo3(signature = (params, fractions, settings=None))]
fn solve_sectored(
    py: Python<'_>,
    params: &PyModelParams,
    fractions: Vec<f64>,
    settings: Option<PySolverSettings>,
) -> PyResult<Vec<PySaddleSolution>> {
    let (p, s) = (params.inner, settings_or_default(settings));
    let r = py
        .detach(|| nqac::solve_sectored(&p, &fractions, &s))
        .map_err(py_err)?;
    Ok(r.solutions.into_iter().map(Into::into).collect())
}

#[pyfunction]
#[pyo3(signature = (params, fractions=vec![1.0], settings=None))]
fn global_minimum(
    py: Python<'_>,
    params: &PyModelParams,
    fractions: Vec<f64>,
    settings: Option<PySolverSettings>,
) -> PyResult<PySaddleSolution> {
    let (p, s) = (params.inner, settings_or_default(settings));
    Ok(py
        .detach(|| nqac::global_minimum(&p, &fractions, &s))
        .map_err(py_err)?
        .into())
}

/// Scaled Γ_c2 = Γ/C^(p-1) where the quadratic coefficient at m = 0 vanishes.
#[pyfunction]
fn gamma_c2(params: &PyModelParams) -> PyResult<Option<f64>> {
    nqac::gamma_c2(&params.inner).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (params, settings=None))]
fn locate_gamma_c1(
    py: Python<'_>,
    params: &PyModelParams,
    settings: Option<PySolverSettings>,
) -> PyResult<Option<f64>> {
    let (p, s) = (params.inner, settings_or_default(settings));
    py.detach(|| nqac::locate_gamma_c1(&p, &s)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (params, settings=None))]
fn classify_transition(
    py: Python<'_>,
    params: &PyModelParams,
    settings: Option<PySolverSettings>,
) -> PyResult<PyTransitionReport> {
    let (p, s) = (params.inner, settings_or_default(settings));
    let r = py
        .detach(|| nqac::classify_transition(&p, &s))
        .map_err(py_err)?;
    Ok(PyTransitionReport {
        gamma_c1: r.gamma_c1,
        gamma_c2: r.gamma_c2,
        order: r.order.as_str(),
        barrier_height: r.barrier_height,
        barrier_width: r.barrier_width,
    })
}

/// p=q=2 critical line. `axis` is "t_of_gamma" or "gamma_of_t"; returns (Γ/C, T/C) pairs.
#[pyfunction]
fn critical_line(
    params: &PyModelParams,
    axis: &str,
    abscissae: Vec<f64>,
) -> PyResult<Vec<(Option<f64>, Option<f64>)>> {
    let axis = match axis {
        "t_of_gamma" => nqac::CriticalAxis::TOfGamma,
        "gamma_of_t" => nqac::CriticalAxis::GammaOfT,
        _ => return Err(PyValueError::new_err(format!("unknown axis {axis:?}"))),
    };
    let pts = nqac::critical_line_p2(&params.inner, axis, &abscissae).map_err(py_err)?;
    Ok(pts
        .into_iter()
        .map(|p| (p.gamma_over_c, p.t_over_c))
        .collect())
}

/// (c2, c3, c4, c6) of F/C^max(p,q) around m = 0; `method` is "analytic" or "numeric".
#[pyfunction]
#[pyo3(signature = (params, method="numeric"))]
fn taylor_coefficients(params: &PyModelParams, method: &str) -> PyResult<Taylor> {
    let m = match method {
        "analytic" => nqac::TaylorMethod::AnalyticT0,
        "numeric" => nqac::TaylorMethod::Numeric,
        _ => return Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    };
    let t = nqac::taylor_coefficients(&params.inner, m).map_err(py_err)?;
    Ok((t.c2, t.c3, t.c4, t.c6))
}

#[pyfunction]
fn lambda_critical(
    py: Python<'_>,
    params: &PyModelParams,
    temperature: f64,
) -> PyResult<Option<f64>> {
    let p = params.inner;
    py.detach(|| nqac::lambda_critical(&p, temperature))
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (params, etas_scaled, settings=None))]
fn hybrid_critical_line(
    py: Python<'_>,
    params: &PyModelParams,
    etas_scaled: Vec<f64>,
    settings: Option<PySolverSettings>,
) -> PyResult<Vec<(f64, Option<f64>)>> {
    let (p, s) = (params.inner, settings_or_default(settings));
    py.detach(|| nqac::hybrid_critical_line(&p, &etas_scaled, &s))
        .map_err(py_err)
}

/// Returns (overlap, log gap per spin).
#[pyfunction]
fn instanton_overlap(params: &PyModelParams, m0: f64, mc: f64) -> PyResult<(f64, f64)> {
    let g = nqac::instanton_overlap(&params.inner, m0, mc).map_err(py_err)?;
    Ok((g.overlap, g.log_gap_per_spin))
}

/// Returns (theta, omega0, omega1).
#[pyfunction]
fn spinwave_spectrum(j: f64, c: f64, lam: f64, gamma: f64) -> PyResult<(f64, f64, f64)> {
    let s = nqac::spinwave_spectrum(j, c, lam, gamma).map_err(py_err)?;
    Ok((s.theta, s.omega0, s.omega1))
}

#[pyfunction]
fn fm_metastable_exists(py: Python<'_>, params: &PyModelParams, k_over_n: f64) -> PyResult<bool> {
    let p = params.inner;
    py.detach(|| nqac::fm_metastable_exists(&p, k_over_n))
        .map_err(py_err)
}

#[pyfunction]
fn af_metastable_exists(
    py: Python<'_>,
    params: &PyModelParams,
    k: usize,
    n: usize,
) -> PyResult<bool> {
    let p = params.inner;
    py.detach(|| nqac::af_metastable_exists(&p, k, n))
        .map_err(py_err)
}

#[pyfunction]
fn af_occupancy(j: f64, c: f64, lam: f64, beta: f64, n: usize) -> PyResult<PyOccupancy> {
    Ok(nqac::af_occupancy(j, c, lam, beta, n)
        .map_err(py_err)?
        .into())
}

#[pyfunction]
fn fm_occupancy(params: &PyModelParams, n: usize) -> PyResult<PyOccupancy> {
    Ok(nqac::fm_occupancy(&params.inner, n).map_err(py_err)?.into())
}

/// Exact classical spectrum. With `params` the p-spin form is used, otherwise the pairwise form.
#[pyfunction]
#[pyo3(signature = (instance, params=None, codewords=false))]
fn classical_spectrum(
    py: Python<'_>,
    instance: &PyEncodedInstance,
    params: Option<PyModelParams>,
    codewords: bool,
) -> PyResult<PySpectrum> {
    let f = form(params.as_ref());
    let sub = if codewords {
        Subspace::Codewords
    } else {
        Subspace::All
    };
    let inst = instance.inner.clone();
    let s = py
        .detach(|| nqac::classical_spectrum(&inst, &f, sub))
        .map_err(py_err)?;
    Ok(PySpectrum {
        energies: s.energies,
        degeneracies: s.degeneracies,
        gap: s.gap,
    })
}

#[pyfunction]
#[pyo3(signature = (instance, gamma, params=None))]
fn quantum_gap(
    py: Python<'_>,
    instance: &PyEncodedInstance,
    gamma: f64,
    params: Option<PyModelParams>,
) -> PyResult<f64> {
    let f = form(params.as_ref());
    let inst = instance.inner.clone();
    py.detach(|| nqac::quantum_gap(&inst, &f, gamma))
        .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "nqac")]
fn nqac_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PySolverSettings>()?;
    m.add_class::<PySaddleSolution>()?;
    m.add_class::<PyTransitionReport>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyOccupancy>()?;
    m.add_class::<PyEncodedInstance>()?;
    m.add_function(wrap_pyfunction!(free_energy, m)?)?;
    m.add_function(wrap_pyfunction!(free_energy_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(solve_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sectored, m)?)?;
    m.add_function(wrap_pyfunction!(global_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_c2, m)?)?;
    m.add_function(wrap_pyfunction!(locate_gamma_c1, m)?)?;
    m.add_function(wrap_pyfunction!(classify_transition, m)?)?;
    m.add_function(wrap_pyfunction!(critical_line, m)?)?;
    m.add_function(wrap_pyfunction!(taylor_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_critical, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_critical_line, m)?)?;
    m.add_function(wrap_pyfunction!(instanton_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(spinwave_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(fm_metastable_exists, m)?)?;
    m.add_function(wrap_pyfunction!(af_metastable_exists, m)?)?;
    m.add_function(wrap_pyfunction!(af_occupancy, m)?)?;
    m.add_function(wrap_pyfunction!(fm_occupancy, m)?)?;
    m.add_function(wrap_pyfunction!(classical_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_gap, m)?)?;
    Ok(())
}
