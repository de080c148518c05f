use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown warp family `{0}`")]
    UnknownFamily(String),
    #[error("parameters {params:?} do not give a monotone `{family}` warp: {reason}")]
    NonMonotoneParameters {
        family: String,
        params: Vec<f64>,
        reason: String,
    },
    #[error("g must be strictly positive, found g({t}) = {g}")]
    NonPositiveG { t: f64, g: f64 },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("warp is not monotone on the grid (min g = {min_g} at t = {t})")]
    NonMonotoneWarp { min_g: f64, t: f64 },
    #[error("resampling grid [{lo}, {hi}] leaves the range of h [{range_lo}, {range_hi}]")]
    ResampleOutOfRange {
        lo: f64,
        hi: f64,
        range_lo: f64,
        range_hi: f64,
    },
    #[error("Nyquist violation: {0}")]
    NyquistViolation(String),
    #[error("range of h too narrow: {0}")]
    RangeTooNarrow(String),
    #[error("bad potential: {0}")]
    BadPotential(String),
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient runs for a convergence fit: {0}")]
    InsufficientRuns(String),
    #[error("config error: {0}")]
    ConfigParse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Module-qualified code, stable across releases; used in reports and by the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownFamily(_) => "warp.unknown_family",
            Error::NonMonotoneParameters { .. } => "warp.non_monotone_parameters",
            Error::NonPositiveG { .. } => "warp.non_positive_g",
            Error::GridTooCoarse(_) => "numeric.grid_too_coarse",
            Error::GridMismatch(_) => "transforms.grid_mismatch",
            Error::NonMonotoneWarp { .. } => "transforms.non_monotone_warp",
            Error::ResampleOutOfRange { .. } => "transforms.resample_out_of_range",
            Error::NyquistViolation(_) => "distributions.nyquist_violation",
            Error::RangeTooNarrow(_) => "distributions.range_too_narrow",
            Error::BadPotential(_) => "schrodinger.bad_potential",
            Error::ConvergenceFailure(_) => "schrodinger.convergence_failure",
            Error::LinearSolveFailure(_) => "schrodinger.linear_solve_failure",
            Error::InvalidGrid(_) => "grid.invalid",
            Error::InvalidInput(_) => "input.invalid",
            Error::InsufficientRuns(_) => "cli.insufficient_runs",
            Error::ConfigParse(_) => "cli.config_parse",
            Error::Io(_) => "cli.io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
