use thiserror::Error;

/// Failures raised by state construction, evolution and estimation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid state: {0}")]
    InvalidSpec(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("boundary guard tripped at step {step}: probability {probability:e} within {cells} cells of the domain edge")]
    BoundaryGuard {
        step: usize,
        probability: f64,
        cells: usize,
    },

    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("target velocity {target} unreachable; family maximum |v| is {v_max}")]
    Infeasible { target: f64, v_max: f64 },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// Short machine-readable tag used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::Degenerate(_) => "degenerate",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::BoundaryGuard { .. } => "boundary_guard",
            Error::NoCrossing(_) => "no_crossing",
            Error::Infeasible { .. } => "infeasible",
            Error::Unsupported(_) => "unsupported",
        }
    }

    /// True for errors that come from bad inputs rather than the solver.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidSpec(_)
                | Error::Degenerate(_)
                | Error::Unsupported(_)
                | Error::Infeasible { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
