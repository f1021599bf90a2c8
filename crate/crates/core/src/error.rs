use thiserror::Error;

/// Errors raised by the samplers, the least-squares solver and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point coordinate {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The lower barrier caught up with the smallest eigenvalue of the Gram matrix.
    #[error("barrier violation at iteration {iteration}: shift {shift} >= lambda_min {lambda_min}")]
    BarrierViolation {
        iteration: usize,
        shift: f64,
        lambda_min: f64,
    },

    #[error("degenerate W matrix: Tr(Z) - Tr(Y) = {gap}")]
    DegenerateWMatrix { gap: f64 },

    #[error("rejection cap of {cap} candidates exceeded at iteration {iteration}")]
    RejectionOverflow { iteration: usize, cap: u64 },

    #[error("spectral event not realized after {restarts} restarts")]
    RestartOverflow { restarts: usize },

    #[error("all candidate densities vanish at iteration {iteration}")]
    EmptySupport { iteration: usize },

    #[error("frame is rank deficient (lambda_min = {lambda_min:e})")]
    RankDeficient { lambda_min: f64 },

    #[error("singular Gram matrix: lambda_min = {lambda_min:e}, lambda_max = {lambda_max:e}")]
    SingularGram { lambda_min: f64, lambda_max: f64 },

    #[error("tensor grid of {size} points exceeds the limit of {limit}")]
    GridTooLarge { size: f64, limit: usize },

    /// A run ended below the almost-sure spectral floor of its sampler.
    #[error("run {run}: lambda_min {lambda_min} below the guaranteed floor {floor}")]
    FloorViolation {
        run: usize,
        lambda_min: f64,
        floor: f64,
    },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BarrierViolation { .. }
                | Error::DegenerateWMatrix { .. }
                | Error::RejectionOverflow { .. }
                | Error::RestartOverflow { .. }
                | Error::EmptySupport { .. }
                | Error::RankDeficient { .. }
                | Error::SingularGram { .. }
                | Error::FloorViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
