//! First-order bias and MSE of every estimator, optimal composite
//! weights, PRE tables and the corrections ledger.
//!
//! Bias and MSE come from a single generic route: each estimator is
//! expanded to second order in the relative errors of `ybar`, `p1`, `p2`,
//! `p1'`, `p2'` ([`expansion`]) and contracted against the design's second
//! moments ([`MomentSet`]). Composite MSE is evaluated through the
//! [`ATerms`]/[`BTerms`] quadratic forms.

pub mod expansion;
pub mod ledger;
pub mod report;
pub mod weights;

pub use expansion::{ErrorTerm, Expansion, MomentSet};
pub use report::{theory_table, Flag, TableOptions, TheoryReport, TheoryRow};
pub use weights::{a_terms, b_terms, optimal_weights_double, optimal_weights_single, ATerms, BTerms};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorSpec, Phase, Weights};
use crate::population::Coefficients;

fn check_phase(spec: &EstimatorSpec, c: &Coefficients) -> Result<()> {
    if spec.phase() == Some(Phase::Two) && c.two_phase_factors().is_none() {
        return Err(Error::MissingTwoPhaseFactors(spec.to_string()));
    }
    Ok(())
}

/// Replaces [`Weights::Optimal`] with the minimizing weights for `c`.
pub fn resolve_weights(spec: &EstimatorSpec, c: &Coefficients) -> Result<EstimatorSpec> {
    check_phase(spec, c)?;
    Ok(match *spec {
        EstimatorSpec::Composite { weights: Weights::Optimal, a1, a2, b1, b2 } => {
            let (w1, w2) = optimal_weights_single(&a_terms(c, a1, a2, b1, b2))?;
            spec.with_weights(Weights::Fixed { w1, w2 })
        }
        EstimatorSpec::TwoPhaseComposite { weights: Weights::Optimal, m1, m2, n1, n2 } => {
            let (h1, h2) = optimal_weights_double(&b_terms(c, m1, m2, n1, n2)?)?;
            spec.with_weights(Weights::Fixed { w1: h1, w2: h2 })
        }
        other => other,
    })
}

fn expansion(spec: &EstimatorSpec) -> Expansion {
    expansion::expand(spec).expect("weights resolved before expansion")
}

/// First-order bias. Composite weights marked `auto` are resolved first.
pub fn first_order_bias(spec: &EstimatorSpec, c: &Coefficients, ybar: f64) -> Result<f64> {
    let spec = resolve_weights(spec, c)?;
    let rel = expansion(&spec)
        .relative_bias(&MomentSet::new(c))
        .ok_or_else(|| Error::MissingTwoPhaseFactors(spec.to_string()))?;
    Ok(ybar * rel)
}

/// First-order MSE. Composite weights marked `auto` are resolved first.
pub fn first_order_mse(spec: &EstimatorSpec, c: &Coefficients, ybar: f64) -> Result<f64> {
    let spec = resolve_weights(spec, c)?;
    let y2 = ybar * ybar;
    match spec {
        EstimatorSpec::SampleMean => Ok(sample_mean_mse(c, ybar)),
        EstimatorSpec::Composite { weights, a1, a2, b1, b2 } => {
            let (_, w1, w2) = weights.triple().expect("resolved");
            Ok(y2 * c.f1 * (c.cy2() + a_terms(c, a1, a2, b1, b2).form(w1, w2)))
        }
        EstimatorSpec::TwoPhaseComposite { weights, m1, m2, n1, n2 } => {
            let (_, h1, h2) = weights.triple().expect("resolved");
            Ok(y2 * (c.f1 * c.cy2() + b_terms(c, m1, m2, n1, n2)?.form(h1, h2)))
        }
        _ => {
            let rel = expansion(&spec)
                .relative_mse(&MomentSet::new(c))
                .ok_or_else(|| Error::MissingTwoPhaseFactors(spec.to_string()))?;
            Ok(y2 * rel)
        }
    }
}

/// `Ybar^2 f1 C_y^2`, the exact variance of the sample mean.
pub fn sample_mean_mse(c: &Coefficients, ybar: f64) -> f64 {
    ybar * ybar * c.f1 * c.cy2()
}

/// MSE under the published tabulation convention, where it differs from
/// the canonical derivation. Only the two-phase exponential product
/// estimator has such a variant: its attribute-2 term carries `f3`
/// instead of `f2`.
pub fn tabulated_mse(spec: &EstimatorSpec, c: &Coefficients, ybar: f64) -> Result<Option<f64>> {
    match spec {
        EstimatorSpec::TwoPhaseExpProduct2 => {
            let (_, f3) = c.two_phase_factors().ok_or_else(|| Error::MissingTwoPhaseFactors(spec.to_string()))?;
            Ok(Some(ybar * ybar * (c.f1 * c.cy2() + f3 * c.cp2_2() / 4.0 * (1.0 + 4.0 * c.k_pb2))))
        }
        _ => Ok(None),
    }
}

/// Percent relative efficiency `100 mse_base / mse`.
pub fn pre_value(mse_base: f64, mse: f64) -> Result<f64> {
    if mse.is_nan() || mse <= 0.0 {
        return Err(Error::NonpositiveMse(mse));
    }
    Ok(100.0 * mse_base / mse)
}
