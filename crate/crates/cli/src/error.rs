use dnkit::dn::{DnError, MatrixError};
use dnkit::monodromy::MonodromyError;
use dnkit::spectral::SpectralError;
use dnkit::weyl::WeylError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Dn(#[from] DnError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Input(_) | CliError::Matrix(_) | CliError::Weyl(_) => EXIT_INPUT,
            CliError::Dn(DnError::Weyl(_) | DnError::WrongOrder { .. }) => EXIT_INPUT,
            CliError::Dn(_) | CliError::Spectral(_) | CliError::Monodromy(_) => EXIT_NUMERICAL,
        }
    }
}
