use purephoton::gvm::{degenerate_poling_period, solve_gvm_symmetric};
use purephoton::hom::{hom_heralded, hom_heralded_auto, DEFAULT_DELAY_POINTS};
use purephoton::jsa::build_jsa_auto;
use purephoton::reproduce::{self, Figure, ReproduceConfig};
use purephoton::schmidt::{purity_oracle, schmidt_decompose};
use purephoton::{Error, Herald, PhaseMatchSpec, ProcessConvention, PumpSpec, Registry};

const CONV: ProcessConvention = ProcessConvention::type_ii();

#[test]
fn registry_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("crystals.toml");
    std::fs::write(&path, Registry::shipped_toml()).unwrap();
    assert_eq!(Registry::load(&path).unwrap(), Registry::shipped());
}

#[test]
fn registry_rejects_pole_inside_validity_range() {
    let text = Registry::shipped_toml();
    let start = text.find("[[crystal]]").unwrap();
    let end = text[start + 1..]
        .find("[[crystal]]")
        .map(|k| k + start + 1)
        .unwrap_or(text.len());
    let mut record = text[..end].to_string();
    let pole = record.find("pole = ").unwrap();
    let stop = pole + record[pole..].find([',', '}']).unwrap();
    record.replace_range(pole..stop, "pole = 1.0");
    match Registry::from_toml_str(&record, "edited") {
        Err(Error::Validation { field, .. }) => assert!(field.contains("pole"), "{field}"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn missing_registry_is_io_error() {
    let err = Registry::load("/no/such/registry.toml").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.is_usage());
}

#[test]
fn rtp_pipeline_end_to_end() {
    let reg = Registry::shipped();
    let rtp = reg.get("PPRTP").unwrap();
    let s = solve_gvm_symmetric(rtp, &CONV).unwrap();
    let period = degenerate_poling_period(rtp, &CONV, s.lambda_nm).unwrap();
    let pm = PhaseMatchSpec::degenerate(rtp.clone(), CONV, s.lambda_nm, 30.0).unwrap();
    assert_eq!(pm.period_um, period.period_um);
    let pump = PumpSpec::new(s.lambda_nm / 2.0, 0.41).unwrap();
    let jsa = build_jsa_auto(&pump, &pm, s.lambda_nm, 256).unwrap();
    let svd = schmidt_decompose(&jsa, false).unwrap();
    assert!((svd.purity - purity_oracle(&jsa)).abs() < 1e-9);
    assert!((svd.purity - 0.815).abs() < 0.005, "{}", svd.purity);
    let t = schmidt_decompose(&jsa.transposed(), false).unwrap();
    assert!((t.purity - svd.purity).abs() < 1e-10);

    let trace = hom_heralded(&jsa, &jsa, Herald::Idler, &[-1e4, 0.0, 1e4]).unwrap();
    assert!(((1.0 - 2.0 * trace.probability[1]) - svd.purity).abs() < 1e-6);
}

#[test]
fn dispersionless_crystal_has_no_gvm_point() {
    let flat = purephoton::CrystalRecord::dispersionless("FLAT", 1.8, (0.4, 3.0)).unwrap();
    assert!(matches!(
        solve_gvm_symmetric(&flat, &CONV),
        Err(Error::NoGvmPoint { .. })
    ));
}

#[test]
fn heralded_traces_settle_at_half() {
    let reg = Registry::shipped();
    let pm = PhaseMatchSpec::degenerate(reg.get("PPCTA").unwrap().clone(), CONV, 1506.0, 30.0).unwrap();
    let pump = PumpSpec::new(753.0, 5.0).unwrap();
    let jsa = build_jsa_auto(&pump, &pm, 1506.0, 256).unwrap();
    for herald in [Herald::Idler, Herald::Signal] {
        let t = hom_heralded_auto(&jsa, &jsa, herald, DEFAULT_DELAY_POINTS).unwrap();
        assert!((t.baseline - 0.5).abs() < 1e-3);
        assert!(t.width_ps.is_some());
    }
}

#[test]
fn table1_artifacts_are_deterministic() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ReproduceConfig {
            out_dir: dir.path().to_path_buf(),
            grid_points: 64,
            ..Default::default()
        };
        let report = reproduce::run(Figure::Table1, &Registry::shipped(), &cfg).unwrap();
        let files: Vec<(String, Vec<u8>)> = report
            .artifacts
            .iter()
            .map(|f| (f.clone(), std::fs::read(dir.path().join(f)).unwrap()))
            .collect();
        files
    };
    let a = run();
    assert_eq!(a.len(), 2);
    assert_eq!(a, run());
}
