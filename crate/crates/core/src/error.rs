use thiserror::Error;

use crate::population::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid population: {}", join(.0))]
    InvalidPopulation(Vec<Violation>),

    #[error("degenerate population: {0}")]
    DegeneratePopulation(String),

    #[error("invalid summary: {0}")]
    InvalidSummary(String),

    #[error("population mean is zero; coefficients of variation are undefined")]
    ZeroMean,

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("division by zero evaluating {estimator}: {detail}")]
    DivisionByZero {
        estimator: String,
        detail: &'static str,
    },

    #[error("{estimator} is a {expected} estimator and cannot be evaluated on {got} data")]
    WrongPhase {
        estimator: String,
        expected: &'static str,
        got: &'static str,
    },

    #[error("{0} uses optimal weights that have not been resolved against population coefficients")]
    UnresolvedWeights(String),

    #[error("weights must sum to one, got {0}")]
    WeightSum(f64),

    #[error("{0} needs two-phase factors f2 and f3, but the design has no first-phase size")]
    MissingTwoPhaseFactors(String),

    #[error("quadratic form is singular or not positive definite (4*Q1*Q2 - Q5^2 = {determinant})")]
    SingularSystem { determinant: f64 },

    #[error("mean squared error must be positive, got {0}")]
    NonpositiveMse(f64),

    #[error("cannot parse estimator spec at `{token}`: {reason}")]
    SpecParse { token: String, reason: String },

    #[error("invalid generator spec: {0}")]
    InvalidGeneratorSpec(String),

    #[error("every replicate failed for {0}")]
    AllReplicatesFailed(String),

    #[error("exact enumeration needs {count} samples, above the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("simulation and theory estimator lists differ: {0}")]
    MismatchedSpecs(String),

    #[error("{0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
