use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("target frequency {0} rad/fs is not on the output grid")]
    OffGridTarget(f64),
    #[error("kernel fwhm {fwhm} rad/fs exceeds the output span {span} rad/fs")]
    KernelTooWide { fwhm: f64, span: f64 },
    #[error("Fock truncation too small: norm deficit {deficit:e} exceeds {threshold:e}")]
    TruncationTooSmall { deficit: f64, threshold: f64 },
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("config error at `{field}`{}: {reason}", line_suffix(*.line))]
    Config {
        field: String,
        line: Option<usize>,
        reason: String,
    },
    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the user's configuration rather than the run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::ConfigSyntax { .. }
                | Error::InvalidParameter { .. }
                | Error::KernelTooWide { .. }
        )
    }
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
