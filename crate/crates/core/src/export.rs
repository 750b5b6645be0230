//! CSV, JSON and PNG writers. Numbers use Rust's shortest round-trip float
//! formatting, so identical results give byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom::HomTrace;
use crate::jsa::{JointAmplitude, PhaseMatchSpec, PumpSpec};
use crate::schmidt::SchmidtResult;
use crate::tuning::PurityScanRow;

fn io(e: std::io::Error) -> Error {
    Error::Export(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `# key: value` lines.
pub fn write_comments<W: Write>(w: &mut W, meta: &[(&str, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}: {v}").map_err(io)?;
    }
    Ok(())
}

/// JSI matrix: one row per signal wavelength, one column per idler
/// wavelength.
pub fn write_jsi_csv<W: Write>(w: &mut W, jsa: &JointAmplitude, meta: &[(&str, String)]) -> Result<()> {
    write_comments(w, meta)?;
    write!(w, "signal_nm\\idler_nm").map_err(io)?;
    for l in jsa.grid().idler_wavelengths_nm() {
        write!(w, ",{l}").map_err(io)?;
    }
    writeln!(w).map_err(io)?;
    let n = jsa.n();
    let intensity = jsa.intensity();
    for (i, l) in jsa.grid().signal_wavelengths_nm().into_iter().enumerate() {
        write!(w, "{l}").map_err(io)?;
        for v in &intensity[i * n..(i + 1) * n] {
            write!(w, ",{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct JsaMetadata {
    pub crystal: String,
    pub length_mm: f64,
    pub period_um: f64,
    pub grating_sign: f64,
    pub include_pm_phase: bool,
    pub pump: PumpSpec,
    pub points: usize,
    pub signal_nm: Vec<f64>,
    pub idler_nm: Vec<f64>,
    pub purity: f64,
    pub schmidt_number: f64,
    pub leading_coefficients: Vec<f64>,
}

impl JsaMetadata {
    pub fn new(jsa: &JointAmplitude, pump: &PumpSpec, pm: &PhaseMatchSpec, schmidt: &SchmidtResult) -> Self {
        JsaMetadata {
            crystal: pm.crystal.name.clone(),
            length_mm: pm.length_mm,
            period_um: pm.period_um,
            grating_sign: pm.grating_sign,
            include_pm_phase: pm.include_pm_phase,
            pump: *pump,
            points: jsa.n(),
            signal_nm: jsa.grid().signal_wavelengths_nm(),
            idler_nm: jsa.grid().idler_wavelengths_nm(),
            purity: schmidt.purity,
            schmidt_number: schmidt.schmidt_number,
            leading_coefficients: schmidt.coefficients.iter().take(10).copied().collect(),
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Export(e.to_string()))?;
    writeln!(w).map_err(io)
}

/// Grayscale JSI image, peak white. Row 0 is the lowest signal frequency.
pub fn write_jsi_png(path: &Path, jsa: &JointAmplitude) -> Result<()> {
    let n = jsa.n() as u32;
    let intensity = jsa.intensity();
    let peak = intensity.iter().copied().fold(0.0, f64::max);
    let pixels: Vec<u8> = intensity
        .iter()
        .map(|v| (255.0 * v / peak).round().clamp(0.0, 255.0) as u8)
        .collect();
    let img = image::GrayImage::from_raw(n, n, pixels).expect("buffer matches image size");
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Export(format!("{}: {e}", path.display())))
}

pub fn write_hom_csv<W: Write>(w: &mut W, trace: &HomTrace, meta: &[(&str, String)]) -> Result<()> {
    write_comments(w, meta)?;
    writeln!(w, "tau_ps,coincidence_probability").map_err(io)?;
    for (t, p) in trace.tau_ps.iter().zip(&trace.probability) {
        writeln!(w, "{t},{p}").map_err(io)?;
    }
    writeln!(
        w,
        "# summary: visibility={}, width_ps={}, baseline={}",
        trace.visibility,
        opt(trace.width_ps),
        trace.baseline
    )
    .map_err(io)
}

pub const SCAN_HEADER: &str = "lambda_nm,period_um,pump_fwhm_nm,purity";

/// Failed rows keep their wavelength with empty fields and are followed by a
/// comment carrying the error.
pub fn write_scan_csv<W: Write>(w: &mut W, rows: &[PurityScanRow], meta: &[(&str, String)]) -> Result<()> {
    write_comments(w, meta)?;
    writeln!(w, "{SCAN_HEADER}").map_err(io)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.lambda_nm,
            opt(r.period_um),
            opt(r.pump_fwhm_nm),
            opt(r.purity)
        )
        .map_err(io)?;
        if let Some(e) = &r.error {
            writeln!(w, "# error at {} nm: {e}", r.lambda_nm).map_err(io)?;
        }
    }
    Ok(())
}

pub fn create_file(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Export(format!("{}: {e}", dir.display())))?;
    }
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::Export(format!("{}: {e}", path.display())))
}
