use itertools::Itertools;

use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::population::{FinitePopulation, SamplingDesign};

use super::evaluate::{Evaluator, Tally};
use super::report::{Method, SimulationReport};

pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        // r * (n - i) is divisible by i + 1 at every step
        r = r.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(r)
}

/// Number of equally likely samples under `design`: `C(N, n)`, or
/// `C(N, n') C(n', n)` nested pairs for two-phase designs. Saturates at
/// `u128::MAX`.
pub fn sample_count(design: &SamplingDesign) -> u128 {
    let big = |n: usize, k: usize| binomial(n as u64, k as u64).unwrap_or(u128::MAX);
    match design.n_prime {
        None => big(design.population_size, design.n),
        Some(np) => big(design.population_size, np).saturating_mul(big(np, design.n)),
    }
}

pub fn enumerate_exact(pop: &FinitePopulation, design: &SamplingDesign, specs: &[EstimatorSpec]) -> Result<SimulationReport> {
    enumerate_exact_with_cap(pop, design, specs, DEFAULT_ENUMERATION_CAP)
}

/// Visits every sample once, in lexicographic order of unit indices, so
/// the empirical moments are exact design expectations.
pub fn enumerate_exact_with_cap(
    pop: &FinitePopulation,
    design: &SamplingDesign,
    specs: &[EstimatorSpec],
    cap: u128,
) -> Result<SimulationReport> {
    let count = sample_count(design);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let eval = Evaluator::new(pop, design, specs)?;
    let mut tally = Tally::new(&eval);
    let n_total = design.population_size;
    match design.n_prime {
        None => {
            for second in (0..n_total).combinations(design.n) {
                tally.push(&eval.evaluate(&second, None));
            }
        }
        Some(np) => {
            for first in (0..n_total).combinations(np) {
                for pick in (0..np).combinations(design.n) {
                    let second: Vec<usize> = pick.iter().map(|&i| first[i]).collect();
                    tally.push(&eval.evaluate(&second, Some(&first)));
                }
            }
        }
    }
    tally.finish(Method::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::{summarize_population, Unit};

    fn pop5() -> FinitePopulation {
        FinitePopulation::new(vec![
            Unit::new(3.0, 1, 0),
            Unit::new(7.5, 0, 1),
            Unit::new(1.0, 0, 0),
            Unit::new(4.0, 1, 1),
            Unit::new(9.0, 1, 0),
        ])
        .unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(12, 6), Some(924));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(100, 50), Some(100_891_344_545_564_193_334_812_497_256));
        assert_eq!(binomial(200, 100), None);
        assert_eq!(sample_count(&SamplingDesign::two_phase(6, 4, 2).unwrap()), 15 * 6);
    }

    #[test]
    fn srswor_identities_n5_n2() {
        let pop = pop5();
        let s = summarize_population(&pop).unwrap();
        let design = SamplingDesign::single(5, 2).unwrap();
        let r = enumerate_exact(&pop, &design, &[EstimatorSpec::SampleMean]).unwrap();
        assert_eq!(r.replicates, 10);
        let var = r.rows[0].emp_mse;
        let f1 = 0.5 - 0.2;
        assert!((var - f1 * s.var_y).abs() < 1e-12 * var);
        assert!((r.auxiliary.p1 - s.p1).abs() < 1e-12 * s.p1);
        assert!((r.auxiliary.ybar - s.mean_y).abs() < 1e-12 * s.mean_y);
        assert!(r.rows[0].rel_gap().abs() < 1e-12);
    }

    #[test]
    fn nested_enumeration_n6() {
        let mut units = pop5().units().to_vec();
        units.push(Unit::new(5.0, 0, 1));
        let pop = FinitePopulation::new(units).unwrap();
        let s = summarize_population(&pop).unwrap();
        let design = SamplingDesign::two_phase(6, 4, 2).unwrap();
        let r = enumerate_exact(&pop, &design, &[EstimatorSpec::SampleMean]).unwrap();
        assert_eq!(r.replicates, 90);
        assert!((r.auxiliary.p1_prime.unwrap() - s.p1).abs() < 1e-12);
        assert!((r.auxiliary.p2_prime.unwrap() - s.p2).abs() < 1e-12);
        // the second phase is itself an SRSWOR of size 2
        assert!((r.rows[0].emp_mse - (0.5 - 1.0 / 6.0) * s.var_y).abs() < 1e-12 * s.var_y);
    }

    #[test]
    fn cap_is_enforced() {
        let pop = pop5();
        let design = SamplingDesign::single(5, 2).unwrap();
        let e = enumerate_exact_with_cap(&pop, &design, &[EstimatorSpec::SampleMean], 9).unwrap_err();
        assert_eq!(e, Error::EnumerationTooLarge { count: 10, cap: 9 });
    }
}
