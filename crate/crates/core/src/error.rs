use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("activation is not differentiable: {0}")]
    NonDifferentiable(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("spectrum is not conjugate-symmetric (defect {0:e})")]
    SymmetryViolation(f64),
    #[error("wavenumber {0} is not on the lattice")]
    OffLattice(f64),
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
