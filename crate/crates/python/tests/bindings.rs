use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &std::ffi::CStr) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(purephoton_py::purephoton_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("pp", module).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.display(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn registry_and_crystal() {
    run(c"
reg = pp.Registry.shipped()
assert len(reg) == 5
assert reg.names() == ['PPCTA', 'PPKTA', 'PPKTP', 'PPRTA', 'PPRTP']
ktp = reg.get('ppktp')
assert ktp.name == 'PPKTP' and ktp.d_eff_pm_per_v == 2.4
assert abs(ktp.refractive_index('y', 1.584) - 1.733430532130412) < 1e-12
assert abs(ktp.gvm_symmetric() - 1582.2) < 0.1
assert abs(ktp.poling_period(1582.18) - 46.15) < 0.01
try:
    reg.get('nope')
    raise AssertionError('expected ValueError')
except ValueError as e:
    assert 'PPKTP' in str(e)
");
}

#[test]
fn spectrum_purity_and_hom() {
    run(c"
cta = pp.Registry.shipped().get('PPCTA')
lams = [l for l, c in cta.gvm_asymmetric() if c == 'pump_matches_idler']
assert len(lams) == 1 and abs(lams[0] - 1505.7) < 0.1
js = pp.JointSpectrum(cta, 1506.0, 5.0, n=256)
assert js.n == 256 and len(js.signal_nm) == 256
assert abs(sum(map(sum, js.intensity())) - 1.0) < 1e-12
coeffs, p, k = js.schmidt()
assert abs(p - sum(c ** 4 for c in coeffs)) < 1e-12 and abs(k * p - 1.0) < 1e-12
t = js.hom('idler')
assert abs(t.visibility - p) < 1e-3, (t.visibility, p, t.baseline, min(t.probability))
assert js.hom().visibility < 0.5 * t.visibility
");
}

#[test]
fn scan_rows_carry_errors() {
    run(c"
ktp = pp.Registry.shipped().get('PPKTP')
rows = pp.purity_scan(ktp, 1600.0, 3200.0, 1600.0, pump_fwhm_nm=0.4, n=32)
assert rows[0][3] is not None and rows[0][4] is None
assert rows[1][3] is None and 'validity' in rows[1][4]
");
}

#[test]
fn coarse_grid_hom_raises() {
    run(c"
js = pp.JointSpectrum(pp.Registry.shipped().get('PPCTA'), 1506.0, 5.0, n=64)
try:
    js.hom('idler')
    raise AssertionError('expected RuntimeError')
except RuntimeError as e:
    assert 'too coarse' in str(e)
");
}
