use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::theory::TheoryReport;

use super::report::SimulationReport;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub spec: EstimatorSpec,
    pub emp_bias: f64,
    pub emp_mse: f64,
    pub theory_bias: f64,
    pub theory_mse: f64,
    /// `(emp_mse - theory_mse) / theory_mse`
    pub mse_gap: f64,
    /// `emp_bias - theory_bias`
    pub bias_gap: f64,
    /// `|mse_gap| <= tolerance`
    pub pass: bool,
}

/// Pairs simulation rows with theory rows, which must list the same specs
/// in the same order.
pub fn compare_theory_empirical(sim: &SimulationReport, theory: &TheoryReport, tolerance: f64) -> Result<Vec<ComparisonRow>> {
    let s: Vec<_> = sim.rows.iter().map(|r| r.spec).collect();
    let t: Vec<_> = theory.rows.iter().map(|r| r.spec).collect();
    if s != t {
        let show = |v: &[EstimatorSpec]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        return Err(Error::MismatchedSpecs(format!("simulation [{}] vs theory [{}]", show(&s), show(&t))));
    }
    Ok(sim
        .rows
        .iter()
        .zip(&theory.rows)
        .map(|(e, th)| {
            let mse_gap = (e.emp_mse - th.mse) / th.mse;
            ComparisonRow {
                spec: e.spec,
                emp_bias: e.emp_bias,
                emp_mse: e.emp_mse,
                theory_bias: th.bias,
                theory_mse: th.mse,
                mse_gap,
                bias_gap: e.emp_bias - th.bias,
                pass: mse_gap.abs() <= tolerance,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::{summarize_population, derived_coefficients, FinitePopulation, SamplingDesign, Unit};
    use crate::simulation::{enumerate_exact, EstimatorOutcome};
    use crate::theory::{theory_table, TableOptions};

    fn setup(specs: &[EstimatorSpec], n: usize) -> (SimulationReport, TheoryReport) {
        let units = (0..9).map(|i| Unit::new(2.0 + (i * i % 7) as f64 + 3.0 * (i % 2) as f64, (i % 2) as u8, (i % 3 == 0) as u8)).collect();
        let pop = FinitePopulation::new(units).unwrap();
        let design = SamplingDesign::single(9, n).unwrap();
        let sim = enumerate_exact(&pop, &design, specs).unwrap();
        let s = summarize_population(&pop).unwrap();
        let c = derived_coefficients(&s, &design).unwrap();
        let th = theory_table(&c, s.mean_y, specs, &TableOptions::default()).unwrap();
        (sim, th)
    }

    #[test]
    fn sample_mean_exact_gap_is_zero() {
        let (sim, th) = setup(&[EstimatorSpec::SampleMean], 4);
        let rows = compare_theory_empirical(&sim, &th, 1e-12).unwrap();
        assert!(rows[0].mse_gap.abs() < 1e-12 && rows[0].bias_gap.abs() < 1e-12 && rows[0].pass);
    }

    #[test]
    fn identical_inputs_give_zero_gaps() {
        let (mut sim, th) = setup(&[EstimatorSpec::SampleMean, EstimatorSpec::Ratio1], 4);
        for (e, t) in sim.rows.iter_mut().zip(&th.rows) {
            *e = EstimatorOutcome { emp_bias: t.bias, emp_mse: t.mse, ..e.clone() };
        }
        for r in compare_theory_empirical(&sim, &th, 0.0).unwrap() {
            assert_eq!((r.mse_gap, r.bias_gap, r.pass), (0.0, 0.0, true));
        }
    }

    #[test]
    fn small_n_ratio_gap_passes_with_matching_tolerance() {
        let (sim, th) = setup(&[EstimatorSpec::Ratio1], 3);
        let gap = compare_theory_empirical(&sim, &th, 0.0).unwrap()[0].mse_gap;
        assert!(gap != 0.0);
        assert!(compare_theory_empirical(&sim, &th, gap.abs() * 1.01).unwrap()[0].pass);
    }

    #[test]
    fn mismatched_lists() {
        let (sim, _) = setup(&[EstimatorSpec::SampleMean], 4);
        let (_, th) = setup(&[EstimatorSpec::Ratio1], 4);
        assert!(matches!(compare_theory_empirical(&sim, &th, 1.0), Err(Error::MismatchedSpecs(_))));
    }
}
