use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("parameters out of domain: {0}")]
    OutOfDomain(String),
    #[error("degenerate lattice basis (determinant {0:e})")]
    DegenerateBasis(f64),
    #[error("degenerate spectrum: lambda1 = {0}")]
    DegenerateSpectrum(f64),
    #[error("degenerate operator: {0}")]
    DegenerateOperator(String),
    #[error("map is not centered: mean of component {component} is {mean:e}")]
    NonzeroMean { component: usize, mean: f64 },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::IterationLimit { .. } | Error::DegenerateSpectrum(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
