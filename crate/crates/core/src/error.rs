use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("registry parse error in {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid crystal record {record}: {field}: {message}")]
    Validation {
        record: String,
        field: String,
        message: String,
    },

    #[error("unknown crystal {name:?} (known: {})", known.join(", "))]
    UnknownCrystal { name: String, known: Vec<String> },

    #[error("wavelength {lambda_um} um is outside the validity range [{lo}, {hi}] um of {record}")]
    OutOfRange {
        record: String,
        lambda_um: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no GVM point for {record} in [{lo_nm:.1}, {hi_nm:.1}] nm (g = {g_lo:.4e} s/m at the low edge, {g_hi:.4e} s/m at the high edge)")]
    NoGvmPoint {
        record: String,
        lo_nm: f64,
        hi_nm: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("energy conservation violated: 1/lambda_p - 1/lambda_s - 1/lambda_i = {relative_error:.3e} (relative)")]
    EnergyConservation { relative_error: f64 },

    #[error("grid does not fit the validity range: {0}")]
    GridOutOfRange(String),

    #[error("frequency grids do not match: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("delay trace is not resolved: {0}")]
    Unresolved(String),

    #[error("dip width is undefined: {0}")]
    UndefinedWidth(String),

    #[error("purity maximum not bracketed: best bandwidth {best_nm} nm lies at the edge of [{lo_nm}, {hi_nm}] nm")]
    NotBracketed { best_nm: f64, lo_nm: f64, hi_nm: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("export failed: {0}")]
    Export(String),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed
    /// computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::Validation { .. }
                | Error::UnknownCrystal { .. }
                | Error::OutOfRange { .. }
                | Error::EnergyConservation { .. }
                | Error::InvalidInput(_)
        )
    }
}
