use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("potential evaluated at non-positive radius r = {0}")]
    NonPositiveRadius(f64),

    #[error("potential evaluated inside the hard core (r = {r} <= {core})")]
    InsideHardCore { r: f64, core: f64 },

    #[error("integral diverges: {0}")]
    Divergent(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("temple gap condition violated: e1_floor ({e1}) <= <H> ({mean})")]
    TempleGap { e1: f64, mean: f64 },

    #[error("cell constraints violated: {0}")]
    Constraint(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("monte carlo failure: {0}")]
    MonteCarlo(String),

    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
