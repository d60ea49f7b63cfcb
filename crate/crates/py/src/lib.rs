//! Python bindings for `qst_core`, importable as `qst_chain`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qst_core::chain::{self, ChainConfig, ChainSpec, PotentialSpec};
use qst_core::eigen::{self, EigenDecomposition};
use qst_core::experiments::{self, LatticeParams};
use qst_core::{dynamics, metrics, QstError};

fn to_py(err: QstError) -> PyErr {
    if err.is_numerical() {
        PyArithmeticError::new_err(err.to_string())
    } else {
        PyValueError::new_err(err.to_string())
    }
}

/// Spin chain: couplings J_1..J_{N-1} and on-site fields B_1..B_N.
#[pyclass(name = "Chain", module = "qst_chain", frozen)]
struct PyChain {
    inner: ChainSpec,
}

#[pymethods]
impl PyChain {
    #[new]
    fn new(couplings: Vec<f64>, fields: Vec<f64>) -> PyResult<Self> {
        ChainSpec::new(couplings, fields).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Power-law chain with edge couplings `j_edge` and bulk couplings `j_bulk`.
    #[staticmethod]
    #[pyo3(signature = (n_sites, a, p, j_edge = 1.0, j_bulk = 1.0))]
    fn power_law(n_sites: usize, a: f64, p: f64, j_edge: f64, j_bulk: f64) -> PyResult<Self> {
        ChainConfig::power_law(n_sites, a, p, j_edge, j_bulk)
            .to_chain()
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    #[getter]
    fn couplings(&self) -> Vec<f64> {
        self.inner.couplings().to_vec()
    }

    #[getter]
    fn fields(&self) -> Vec<f64> {
        self.inner.fields().to_vec()
    }

    #[pyo3(signature = (tol = 0.0))]
    fn is_mirror_symmetric(&self, tol: f64) -> bool {
        self.inner.is_mirror_symmetric(tol)
    }

    /// Diagonal and off-diagonal of the single-excitation Hamiltonian.
    fn hamiltonian(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.inner.to_single_excitation();
        (h.diag().to_vec(), h.offdiag().to_vec())
    }

    fn decompose(&self) -> PyResult<PySpectrum> {
        eigen::decompose(&self.inner.to_single_excitation())
            .map(|inner| PySpectrum { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Chain(n_sites={})", self.inner.n_sites())
    }
}

/// Eigendecomposition in ascending eigenvalue order.
#[pyclass(name = "Spectrum", module = "qst_chain", frozen)]
struct PySpectrum {
    inner: EigenDecomposition,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    /// Eigenvectors as rows: `vectors[i][site - 1]`.
    #[getter]
    fn vectors(&self) -> Vec<Vec<f64>> {
        self.inner.vectors().to_vec()
    }

    /// "even", "odd" or "none" per eigenvector; None when no labels were assigned.
    #[getter]
    fn parity(&self) -> Option<Vec<&'static str>> {
        self.inner.parity().map(|p| p.iter().map(|x| x.as_str()).collect())
    }

    fn qst_drop(&self) -> f64 {
        metrics::qst_drop(&self.inner)
    }

    fn dimer_modes<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = metrics::identify_dimer_modes(&self.inner);
        let out = PyDict::new(py);
        out.set_item("index_plus", d.index_plus)?;
        out.set_item("index_minus", d.index_minus)?;
        out.set_item("e_plus", d.e_plus)?;
        out.set_item("e_minus", d.e_minus)?;
        out.set_item("overlap_plus", d.overlap_plus)?;
        out.set_item("overlap_minus", d.overlap_minus)?;
        out.set_item("status", format!("{:?}", d.status).to_lowercase())?;
        Ok(out)
    }

    /// Site populations at each time; returns (times, populations[t][site - 1]).
    #[pyo3(signature = (times, source = 1))]
    fn evolve(&self, times: Vec<f64>, source: usize) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
        let traj = dynamics::evolve(&self.inner, source, &times).map_err(to_py)?;
        Ok((traj.times().to_vec(), traj.populations().to_vec()))
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }
}

#[pyfunction]
fn build_fields(n_sites: usize, a: f64, p: f64) -> PyResult<Vec<f64>> {
    let pot = PotentialSpec::new(a, p).map_err(to_py)?;
    chain::build_fields(n_sites, &pot).map_err(to_py)
}

#[pyfunction]
fn t_star_estimate(e_plus: f64, e_minus: f64) -> PyResult<f64> {
    metrics::t_star_estimate(e_plus, e_minus).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n_sites, a, j, m))]
fn p_threshold(n_sites: usize, a: f64, j: f64, m: usize) -> PyResult<f64> {
    metrics::p_threshold(n_sites, a, j, m).map_err(to_py)
}

/// Full transfer report for a chain, as a dict. Absent quantities are None.
#[pyfunction]
#[pyo3(signature = (chain, source = 1, threshold = 0.95, horizon = None, window = None, time_metrics = true))]
fn transfer_report<'py>(
    py: Python<'py>,
    chain: &PyChain,
    source: usize,
    threshold: f64,
    horizon: Option<f64>,
    window: Option<f64>,
    time_metrics: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = metrics::TransferOptions {
        source,
        threshold,
        horizon,
        window,
        time_metrics,
        ..Default::default()
    };
    let r = metrics::report_for_chain(&chain.inner, &opts).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("drop", r.drop)?;
    out.set_item("e_plus", r.e_plus)?;
    out.set_item("e_minus", r.e_minus)?;
    out.set_item("overlap_plus", r.overlap_plus)?;
    out.set_item("overlap_minus", r.overlap_minus)?;
    out.set_item("t_est", r.t_est)?;
    out.set_item("t_threshold", r.t_threshold)?;
    out.set_item("t_smoothed", r.t_smoothed)?;
    out.set_item("p_max", r.p_max)?;
    out.set_item("horizon", r.horizon)?;
    out.set_item("status", r.status.to_string())?;
    Ok(out)
}

/// Trap potential over hopping; defaults are the Rb-87 reference lattice.
#[pyfunction]
#[pyo3(signature = (mass = None, trap_angular_frequency = None, lattice_spacing = None, hopping_over_hbar = None))]
fn experimental_ratio(
    mass: Option<f64>,
    trap_angular_frequency: Option<f64>,
    lattice_spacing: Option<f64>,
    hopping_over_hbar: Option<f64>,
) -> PyResult<f64> {
    let r = LatticeParams::rubidium_reference();
    let params = LatticeParams {
        mass: mass.unwrap_or(r.mass),
        trap_angular_frequency: trap_angular_frequency.unwrap_or(r.trap_angular_frequency),
        lattice_spacing: lattice_spacing.unwrap_or(r.lattice_spacing),
        hopping_over_hbar: hopping_over_hbar.unwrap_or(r.hopping_over_hbar),
    };
    experiments::experimental_ratio(&params).map_err(to_py)
}

#[pymodule]
fn qst_chain(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChain>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(build_fields, m)?)?;
    m.add_function(wrap_pyfunction!(t_star_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(p_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_report, m)?)?;
    m.add_function(wrap_pyfunction!(experimental_ratio, m)?)?;
    Ok(())
}
