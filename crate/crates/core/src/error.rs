use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("symbol `{name}` is not finite at xi = ({xi1}, {xi2})")]
    NonFiniteSymbol { name: String, xi1: f64, xi2: f64 },

    #[error("velocity is not divergence-free: |div u|_2 = {residual:e}")]
    DivergenceViolation { residual: f64 },

    #[error("vorticity has nonzero mean {mean:e}")]
    NonzeroMean { mean: f64 },

    #[error("Hölder exponents mismatch: {0}")]
    HolderMismatch(String),

    #[error("CFL violated: dt = {dt:e} exceeds limit {limit:e} (max |u| = {max_velocity:e})")]
    CflViolation {
        dt: f64,
        limit: f64,
        max_velocity: f64,
    },

    #[error("operation expects the {expected} formulation")]
    FormulationMismatch { expected: &'static str },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CflViolation { .. }
                | Error::NonFinite(_)
                | Error::DivergenceViolation { .. }
                | Error::NonzeroMean { .. }
                | Error::NonFiniteSymbol { .. }
        )
    }
}
