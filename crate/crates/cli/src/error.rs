use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("outside the physical domain: {0}")]
    Domain(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Oracle(_) => 4,
        }
    }
}

impl From<dilute_bose::Error> for CliError {
    fn from(e: dilute_bose::Error) -> Self {
        use dilute_bose::Error as E;
        match e {
            E::Parse { .. } | E::InvalidPotential(_) => CliError::Config(e.to_string()),
            E::MonteCarlo(_) | E::NoConvergence(_) => CliError::Oracle(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}
