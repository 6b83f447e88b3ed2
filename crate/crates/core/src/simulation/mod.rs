//! Ground truth by brute force: synthetic populations, seeded SRSWOR and
//! nested two-phase draws, Monte Carlo, exact enumeration and comparison
//! with first-order theory.
//!
//! Empirical bias and MSE are measured against the realized population
//! mean. Samples on which an estimator is undefined (a zero proportion in a
//! denominator) are excluded from that estimator's moments and counted as
//! failures.

pub mod compare;
pub mod draw;
pub mod enumerate;
mod evaluate;
pub mod generate;
pub mod monte_carlo;
pub mod report;

pub use compare::{compare_theory_empirical, ComparisonRow};
pub use draw::{draw_srswor, draw_two_phase, replicate_seed, splitmix64, SampleDraw};
pub use enumerate::{enumerate_exact, enumerate_exact_with_cap, sample_count, DEFAULT_ENUMERATION_CAP};
pub use generate::{generate_population, GeneratorSpec, NoiseShape};
pub use monte_carlo::{run_monte_carlo, ReplicationPlan};
pub use report::{AuxiliaryMeans, EstimatorOutcome, Method, SimulationReport};
