//! Estimation of a finite-population mean with help from two binary
//! auxiliary attributes.
//!
//! The crate covers the whole loop:
//!
//! * [`population`]: raw populations, their summary statistics and the
//!   derived coefficients (`C`, `K`, finite-population factors).
//! * [`estimators`]: ratio, product, exponential, power-family and
//!   composite estimators, in single-phase and two-phase designs.
//! * [`theory`]: first-order bias and MSE, optimal composite weights,
//!   PRE tables and the corrections ledger.
//! * [`simulation`]: population synthesis, SRSWOR and nested two-phase
//!   draws, Monte Carlo and exhaustive enumeration.
//! * [`cli`]: the `attrmean` command-line front end.

pub mod cli;
pub mod datasets;
pub mod error;
pub mod estimators;
pub mod format;
pub mod io;
pub mod population;
pub mod simulation;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{EstimatorSpec, KnownTruth, Phase, SampleData, TwoPhaseSampleData, Weights};
pub use population::{
    derived_coefficients, summarize_population, validate_population, Coefficients,
    FinitePopulation, PopulationSummary, SamplingDesign, Unit,
};
