use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Malformed arguments and files are separated from genuine mathematical
/// failures (see [`Error::is_mathematical`]); the CLI maps the two
/// families onto exit codes 2 and 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1, got {0}")]
    ZeroDimension(usize),

    #[error("dimension mismatch: {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation requires a periodic grid")]
    NotPeriodic,

    #[error("trigonometric map period {map:?} does not match grid period {grid:?}")]
    PeriodMismatch { map: Vec<f64>, grid: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "ambient dimension N = {n_ambient} is below the genericity bound {bound} for n = {n}"
    )]
    BelowDimensionBound {
        n: usize,
        n_ambient: usize,
        bound: usize,
    },

    #[error(
        "rank deficient system: rank {rank} < {rows} rows (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})"
    )]
    RankDeficient {
        rank: usize,
        rows: usize,
        sigma_min: f64,
        sigma_max: f64,
    },

    #[error("map is not free statistical at point #{index} (x = {x:?}): sigma ratio {ratio:e}")]
    NotFree { index: usize, x: Vec<f64>, ratio: f64 },

    #[error("no free perturbation found after {attempts} attempts; offending probe points: {offending:?}")]
    PerturbationBudgetExhausted {
        attempts: usize,
        offending: Vec<usize>,
    },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the mathematics rather than of the input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. }
                | Error::NotFree { .. }
                | Error::PerturbationBudgetExhausted { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
