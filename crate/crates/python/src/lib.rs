use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use purephoton::dispersion::{group_index, refractive_index};
use purephoton::gvm::{degenerate_poling_period, solve_gvm_asymmetric_all, solve_gvm_symmetric};
use purephoton::hom::{hom_heralded_auto, hom_signal_idler_auto, DEFAULT_DELAY_POINTS};
use purephoton::jsa::{build_jsa_auto, JointAmplitude, DEFAULT_GRID_POINTS};
use purephoton::schmidt::schmidt_decompose;
use purephoton::tuning::{optimize_pump_bandwidth, purity_scan as scan, PumpPolicy, DEFAULT_BANDWIDTH_RANGE_NM};
use purephoton::{Axis, CrystalRecord, Error, Herald, HomTrace, PhaseMatchSpec, ProcessConvention, PumpSpec, Registry};

fn to_py(e: Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

#[pyclass(name = "Registry", frozen, module = "purephoton_py")]
struct PyRegistry(Registry);

#[pymethods]
impl PyRegistry {
    /// Registry shipped with the library.
    #[staticmethod]
    fn shipped() -> Self {
        PyRegistry(Registry::shipped())
    }

    /// Alternate Sellmeier records shipped with the library.
    #[staticmethod]
    fn alternates() -> Self {
        PyRegistry(Registry::shipped_alternates())
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Registry::load(path).map(PyRegistry).map_err(to_py)
    }

    fn names(&self) -> Vec<String> {
        self.0.names()
    }

    fn get(&self, name: &str) -> PyResult<PyCrystal> {
        self.0.get(name).cloned().map(PyCrystal).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Registry({})", self.0.names().join(", "))
    }
}

#[pyclass(name = "Crystal", frozen, module = "purephoton_py")]
struct PyCrystal(CrystalRecord);

#[pymethods]
impl PyCrystal {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn composition(&self) -> String {
        self.0.composition.clone()
    }

    #[getter]
    fn d_eff_pm_per_v(&self) -> f64 {
        self.0.d_eff_pm_per_v
    }

    #[getter]
    fn validity_um(&self) -> (f64, f64) {
        self.0.validity_um
    }

    /// Refractive index along `axis` ("x", "y" or "z") at a vacuum wavelength in μm.
    fn refractive_index(&self, axis: &str, lambda_um: f64) -> PyResult<f64> {
        refractive_index(&self.0, parse::<Axis>(axis)?, lambda_um).map_err(to_py)
    }

    fn group_index(&self, axis: &str, lambda_um: f64) -> PyResult<f64> {
        group_index(&self.0, parse::<Axis>(axis)?, lambda_um).map_err(to_py)
    }

    /// Degenerate wavelength (nm) of the symmetric group-velocity match.
    fn gvm_symmetric(&self) -> PyResult<f64> {
        solve_gvm_symmetric(&self.0, &ProcessConvention::type_ii())
            .map(|s| s.lambda_nm)
            .map_err(to_py)
    }

    /// (wavelength nm, condition) for every asymmetric match.
    fn gvm_asymmetric(&self) -> PyResult<Vec<(f64, String)>> {
        solve_gvm_asymmetric_all(&self.0, &ProcessConvention::type_ii())
            .map(|v| v.into_iter().map(|s| (s.lambda_nm, s.condition.to_string())).collect())
            .map_err(to_py)
    }

    /// First-order poling period (μm) for degenerate pairs at `lambda_nm`.
    fn poling_period(&self, lambda_nm: f64) -> PyResult<f64> {
        degenerate_poling_period(&self.0, &ProcessConvention::type_ii(), lambda_nm)
            .map(|p| p.period_um)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Crystal({})", self.0.name)
    }
}

fn phase_match(crystal: &PyCrystal, lambda_nm: f64, length_mm: f64, pm_phase: bool) -> PyResult<PhaseMatchSpec> {
    PhaseMatchSpec::degenerate(crystal.0.clone(), ProcessConvention::type_ii(), lambda_nm, length_mm)
        .map(|pm| pm.pm_phase(pm_phase))
        .map_err(to_py)
}

#[pyclass(name = "HomTrace", frozen, get_all, module = "purephoton_py")]
struct PyHomTrace {
    tau_ps: Vec<f64>,
    probability: Vec<f64>,
    baseline: f64,
    visibility: f64,
    width_ps: Option<f64>,
}

impl From<HomTrace> for PyHomTrace {
    fn from(t: HomTrace) -> Self {
        PyHomTrace {
            tau_ps: t.tau_ps,
            probability: t.probability,
            baseline: t.baseline,
            visibility: t.visibility,
            width_ps: t.width_ps,
        }
    }
}

/// Degenerate joint spectral amplitude pumped at λ/2 on an auto-sized grid.
#[pyclass(name = "JointSpectrum", frozen, module = "purephoton_py")]
struct PyJointSpectrum {
    jsa: JointAmplitude,
    period_um: f64,
}

#[pymethods]
impl PyJointSpectrum {
    #[new]
    #[pyo3(signature = (crystal, lambda_nm, pump_fwhm_nm, length_mm = 30.0, n = DEFAULT_GRID_POINTS, pm_phase = true))]
    fn new(
        py: Python<'_>,
        crystal: &PyCrystal,
        lambda_nm: f64,
        pump_fwhm_nm: f64,
        length_mm: f64,
        n: usize,
        pm_phase: bool,
    ) -> PyResult<Self> {
        let pm = phase_match(crystal, lambda_nm, length_mm, pm_phase)?;
        let pump = PumpSpec::new(lambda_nm / 2.0, pump_fwhm_nm).map_err(to_py)?;
        let jsa = py.detach(|| build_jsa_auto(&pump, &pm, lambda_nm, n)).map_err(to_py)?;
        Ok(PyJointSpectrum {
            jsa,
            period_um: pm.period_um,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.jsa.n()
    }

    #[getter]
    fn period_um(&self) -> f64 {
        self.period_um
    }

    #[getter]
    fn signal_nm(&self) -> Vec<f64> {
        self.jsa.grid().signal_wavelengths_nm()
    }

    #[getter]
    fn idler_nm(&self) -> Vec<f64> {
        self.jsa.grid().idler_wavelengths_nm()
    }

    /// |f|² as rows of signal, columns of idler; sums to 1.
    fn intensity(&self) -> Vec<Vec<f64>> {
        self.jsa.intensity().chunks(self.jsa.n()).map(<[f64]>::to_vec).collect()
    }

    /// (Schmidt coefficients, purity, Schmidt number).
    fn schmidt(&self, py: Python<'_>) -> PyResult<(Vec<f64>, f64, f64)> {
        let r = py.detach(|| schmidt_decompose(&self.jsa, false)).map_err(to_py)?;
        Ok((r.coefficients, r.purity, r.schmidt_number))
    }

    fn purity(&self, py: Python<'_>) -> PyResult<f64> {
        Ok(self.schmidt(py)?.1)
    }

    /// Two-source HOM with `herald` ("idler" or "signal") detected, or the
    /// signal against the idler of this source when `herald` is None.
    #[pyo3(signature = (herald = None, points = DEFAULT_DELAY_POINTS))]
    fn hom(&self, py: Python<'_>, herald: Option<&str>, points: usize) -> PyResult<PyHomTrace> {
        let herald = herald.map(parse::<Herald>).transpose()?;
        let trace = py.detach(|| match herald {
            Some(h) => hom_heralded_auto(&self.jsa, &self.jsa, h, points),
            None => hom_signal_idler_auto(&self.jsa, points),
        });
        trace.map(Into::into).map_err(to_py)
    }
}

/// Pump FWHM (nm) that maximizes purity at `lambda_nm`, and that purity.
#[pyfunction]
#[pyo3(signature = (crystal, lambda_nm, length_mm = 30.0, n = DEFAULT_GRID_POINTS, lo_nm = DEFAULT_BANDWIDTH_RANGE_NM.0, hi_nm = DEFAULT_BANDWIDTH_RANGE_NM.1))]
fn optimize_bandwidth(
    py: Python<'_>,
    crystal: &PyCrystal,
    lambda_nm: f64,
    length_mm: f64,
    n: usize,
    lo_nm: f64,
    hi_nm: f64,
) -> PyResult<(f64, f64)> {
    let pm = phase_match(crystal, lambda_nm, length_mm, true)?;
    py.detach(|| optimize_pump_bandwidth(&pm, lambda_nm, (lo_nm, hi_nm), n))
        .map(|o| (o.fwhm_nm, o.purity))
        .map_err(to_py)
}

/// Rows of (wavelength nm, period μm, pump FWHM nm, purity, error). The pump
/// is optimized per row unless `pump_fwhm_nm` is given.
#[pyfunction]
#[pyo3(signature = (crystal, from_nm, to_nm, step_nm = 50.0, length_mm = 30.0, pump_fwhm_nm = None, n = DEFAULT_GRID_POINTS))]
#[allow(clippy::type_complexity, clippy::too_many_arguments)]
fn purity_scan(
    py: Python<'_>,
    crystal: &PyCrystal,
    from_nm: f64,
    to_nm: f64,
    step_nm: f64,
    length_mm: f64,
    pump_fwhm_nm: Option<f64>,
    n: usize,
) -> PyResult<Vec<(f64, Option<f64>, Option<f64>, Option<f64>, Option<String>)>> {
    let policy = match pump_fwhm_nm {
        Some(fwhm_nm) => PumpPolicy::Fixed { fwhm_nm },
        None => PumpPolicy::optimized(),
    };
    let rows = py
        .detach(|| {
            scan(
                &crystal.0,
                &ProcessConvention::type_ii(),
                from_nm,
                to_nm,
                step_nm,
                length_mm,
                policy,
                n,
            )
        })
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.lambda_nm, r.period_um, r.pump_fwhm_nm, r.purity, r.error))
        .collect())
}

#[pymodule]
pub fn purephoton_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRegistry>()?;
    m.add_class::<PyCrystal>()?;
    m.add_class::<PyJointSpectrum>()?;
    m.add_class::<PyHomTrace>()?;
    m.add_function(wrap_pyfunction!(optimize_bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(purity_scan, m)?)?;
    Ok(())
}
