//! Point estimators of the population mean.
//!
//! Single-phase estimators see `(ybar, p1, p2)` and know `P1`, `P2`.
//! Two-phase estimators see `(ybar, p1, p1', p2')`, where the primed
//! proportions come from the first-phase sample, and know only `P2`.
//!
//! Canonical forms, with `E(x) = exp(x)`:
//!
//! | spec | value |
//! |------|-------|
//! | `ratio1` | `ybar P1/p1` |
//! | `product2` | `ybar p2/P2` |
//! | `expratio1` | `ybar E((P1-p1)/(P1+p1))` |
//! | `expproduct2` | `ybar E((p2-P2)/(p2+P2))` |
//! | `power(a1,a2)` | `ybar (P1/p1)^a1 (P2/p2)^a2` |
//! | `expfam(b1,b2)` | `ybar E(b1 (P1-p1)/(P1+p1)) E(b2 (p2-P2)/(p2+P2))` |
//! | `composite` | `w0 ybar + w1 power(a1,a2) + w2 expfam(b1,b2)` |
//! | `d-ratio1` | `ybar p1'/p1` |
//! | `d-product2` | `ybar P2/p2'` |
//! | `d-expratio1` | `ybar E((p1'-p1)/(p1'+p1))` |
//! | `d-expproduct2` | `ybar E((p2'-P2)/(p2'+P2))` |
//! | `d-power(m1,m2)` | `ybar (p1'/p1)^m1 (P2/p2')^m2` |
//! | `d-expfam(n1,n2)` | `ybar E(n1 (p1'-p1)/(p1'+p1)) E(n2 (p2'-P2)/(p2'+P2))` |
//! | `d-composite` | `h0 ybar + h1 d-power(m1,m2) + h2 d-expfam(n1,n2)` |
//!
//! so `ratio1 = power(1,0)`, `product2 = power(0,-1)`,
//! `expratio1 = expfam(1,0)`, `expproduct2 = expfam(0,1)`, and likewise
//! `d-ratio1 = d-power(1,0)`, `d-product2 = d-power(0,1)`,
//! `d-expratio1 = d-expfam(1,0)`, `d-expproduct2 = d-expfam(0,1)`.
//!
//! Composite weights always satisfy `w0 + w1 + w2 = 1`; only `w1`, `w2`
//! are stored. Estimates are never clamped.

mod parse;

pub use parse::parse_spec_list;

use crate::error::{Error, Result};

/// Sampling phase an estimator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Single,
    Two,
}

impl Phase {
    fn name(self) -> &'static str {
        match self {
            Phase::Single => "single-phase",
            Phase::Two => "two-phase",
        }
    }
}

/// Composite weights. `w0 = 1 - w1 - w2` is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    /// Minimize first-order MSE; resolved against population coefficients.
    Optimal,
    Fixed { w1: f64, w2: f64 },
}

impl Weights {
    /// Accepts an explicit triple, which must sum to one.
    pub fn from_triple(w0: f64, w1: f64, w2: f64) -> Result<Self> {
        let sum = w0 + w1 + w2;
        if (sum - 1.0).abs() > 1e-12 * w0.abs().max(w1.abs()).max(w2.abs()).max(1.0) {
            return Err(Error::WeightSum(sum));
        }
        Ok(Weights::Fixed { w1, w2 })
    }

    /// `(w0, w1, w2)`, or `None` while unresolved.
    pub fn triple(&self) -> Option<(f64, f64, f64)> {
        match *self {
            Weights::Optimal => None,
            Weights::Fixed { w1, w2 } => Some((1.0 - w1 - w2, w1, w2)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorSpec {
    SampleMean,
    Ratio1,
    Product2,
    ExpRatio1,
    ExpProduct2,
    Power { a1: f64, a2: f64 },
    ExpFamily { b1: f64, b2: f64 },
    Composite { weights: Weights, a1: f64, a2: f64, b1: f64, b2: f64 },
    TwoPhaseRatio1,
    TwoPhaseProduct2,
    TwoPhaseExpRatio1,
    TwoPhaseExpProduct2,
    TwoPhasePower { m1: f64, m2: f64 },
    TwoPhaseExpFamily { n1: f64, n2: f64 },
    TwoPhaseComposite { weights: Weights, m1: f64, m2: f64, n1: f64, n2: f64 },
}

impl EstimatorSpec {
    /// `None` for the sample mean, which belongs to both phases.
    pub fn phase(&self) -> Option<Phase> {
        use EstimatorSpec::*;
        match self {
            SampleMean => None,
            Ratio1 | Product2 | ExpRatio1 | ExpProduct2 | Power { .. } | ExpFamily { .. } | Composite { .. } => {
                Some(Phase::Single)
            }
            _ => Some(Phase::Two),
        }
    }

    pub fn label(&self) -> &'static str {
        use EstimatorSpec::*;
        match self {
            SampleMean => "ybar",
            Ratio1 => "t1",
            Product2 => "t2",
            ExpRatio1 => "t3",
            ExpProduct2 => "t4",
            Power { .. } => "t5",
            ExpFamily { .. } => "t6",
            Composite { .. } => "tp",
            TwoPhaseRatio1 => "td1",
            TwoPhaseProduct2 => "td2",
            TwoPhaseExpRatio1 => "td3",
            TwoPhaseExpProduct2 => "td4",
            TwoPhasePower { .. } => "td5",
            TwoPhaseExpFamily { .. } => "td6",
            TwoPhaseComposite { .. } => "tpd",
        }
    }

    /// Rewrites the named classical estimators as members of the power or
    /// exponential families. Other specs are returned unchanged.
    pub fn as_family_member(&self) -> EstimatorSpec {
        use EstimatorSpec::*;
        match *self {
            Ratio1 => Power { a1: 1.0, a2: 0.0 },
            Product2 => Power { a1: 0.0, a2: -1.0 },
            ExpRatio1 => ExpFamily { b1: 1.0, b2: 0.0 },
            ExpProduct2 => ExpFamily { b1: 0.0, b2: 1.0 },
            TwoPhaseRatio1 => TwoPhasePower { m1: 1.0, m2: 0.0 },
            TwoPhaseProduct2 => TwoPhasePower { m1: 0.0, m2: 1.0 },
            TwoPhaseExpRatio1 => TwoPhaseExpFamily { n1: 1.0, n2: 0.0 },
            TwoPhaseExpProduct2 => TwoPhaseExpFamily { n1: 0.0, n2: 1.0 },
            other => other,
        }
    }

    pub fn weights(&self) -> Option<Weights> {
        match *self {
            EstimatorSpec::Composite { weights, .. } | EstimatorSpec::TwoPhaseComposite { weights, .. } => {
                Some(weights)
            }
            _ => None,
        }
    }

    /// Copy with the composite weights replaced; other specs unchanged.
    pub fn with_weights(&self, w: Weights) -> EstimatorSpec {
        let mut out = *self;
        match &mut out {
            EstimatorSpec::Composite { weights, .. } | EstimatorSpec::TwoPhaseComposite { weights, .. } => {
                *weights = w
            }
            _ => {}
        }
        out
    }

    fn wrong_phase(&self, got: Phase) -> Error {
        let expected = self.phase().unwrap_or(got);
        Error::WrongPhase { estimator: self.to_string(), expected: expected.name(), got: got.name() }
    }

    fn div_zero(&self, detail: &'static str) -> Error {
        Error::DivisionByZero { estimator: self.to_string(), detail }
    }
}

/// Single-phase sample statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleData {
    pub mean_y: f64,
    pub p1: f64,
    pub p2: f64,
}

impl SampleData {
    pub fn new(mean_y: f64, p1: f64, p2: f64) -> Result<Self> {
        check_proportions(&[("p1", p1), ("p2", p2)])?;
        Ok(Self { mean_y, p1, p2 })
    }
}

/// Two-phase sample statistics: `p1` from the second phase, `p1_prime`
/// and `p2_prime` from the first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhaseSampleData {
    pub mean_y: f64,
    pub p1: f64,
    pub p1_prime: f64,
    pub p2_prime: f64,
}

impl TwoPhaseSampleData {
    pub fn new(mean_y: f64, p1: f64, p1_prime: f64, p2_prime: f64) -> Result<Self> {
        check_proportions(&[("p1", p1), ("p1'", p1_prime), ("p2'", p2_prime)])?;
        Ok(Self { mean_y, p1, p1_prime, p2_prime })
    }
}

/// Known population proportions. `P1` is only used by single-phase
/// estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownTruth {
    pub p1: f64,
    pub p2: f64,
}

impl KnownTruth {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (k, p) in [("P1", p1), ("P2", p2)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Parse(format!("{k} = {p} must lie strictly between 0 and 1")));
            }
        }
        Ok(Self { p1, p2 })
    }
}

fn check_proportions(ps: &[(&str, f64)]) -> Result<()> {
    for &(k, p) in ps {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parse(format!("sample proportion {k} = {p} outside [0, 1]")));
        }
    }
    Ok(())
}

fn exp_contrast(beta: f64, plus: f64, minus: f64) -> f64 {
    (beta * (plus - minus) / (plus + minus)).exp()
}

/// Evaluates a single-phase estimator (or the sample mean).
pub fn point_estimate(spec: &EstimatorSpec, s: &SampleData, k: &KnownTruth) -> Result<f64> {
    use EstimatorSpec::*;
    let y = s.mean_y;
    Ok(match *spec {
        SampleMean => y,
        Ratio1 => {
            if s.p1 == 0.0 {
                return Err(spec.div_zero("p1 = 0"));
            }
            y * (k.p1 / s.p1)
        }
        Product2 => y * (s.p2 / k.p2),
        ExpRatio1 => y * ((k.p1 - s.p1) / (k.p1 + s.p1)).exp(),
        ExpProduct2 => y * ((s.p2 - k.p2) / (s.p2 + k.p2)).exp(),
        Power { a1, a2 } => y * power_factor(spec, a1, a2, s, k)?,
        ExpFamily { b1, b2 } => y * exp_factor(b1, b2, s, k),
        Composite { weights, a1, a2, b1, b2 } => {
            let (w0, w1, w2) = weights.triple().ok_or_else(|| Error::UnresolvedWeights(spec.to_string()))?;
            let mut v = w0 * y;
            if w1 != 0.0 {
                v += w1 * y * power_factor(spec, a1, a2, s, k)?;
            }
            if w2 != 0.0 {
                v += w2 * y * exp_factor(b1, b2, s, k);
            }
            v
        }
        _ => return Err(spec.wrong_phase(Phase::Single)),
    })
}

fn power_factor(spec: &EstimatorSpec, a1: f64, a2: f64, s: &SampleData, k: &KnownTruth) -> Result<f64> {
    let mut f = 1.0;
    if a1 != 0.0 {
        if s.p1 == 0.0 {
            return Err(spec.div_zero("p1 = 0"));
        }
        f *= (k.p1 / s.p1).powf(a1);
    }
    if a2 != 0.0 {
        if s.p2 == 0.0 {
            return Err(spec.div_zero("p2 = 0"));
        }
        f *= (k.p2 / s.p2).powf(a2);
    }
    Ok(f)
}

fn exp_factor(b1: f64, b2: f64, s: &SampleData, k: &KnownTruth) -> f64 {
    // P_j > 0, so neither denominator can vanish
    exp_contrast(b1, k.p1, s.p1) * exp_contrast(b2, s.p2, k.p2)
}

/// Evaluates a two-phase estimator (or the sample mean).
pub fn two_phase_estimate(spec: &EstimatorSpec, s: &TwoPhaseSampleData, k: &KnownTruth) -> Result<f64> {
    use EstimatorSpec::*;
    let y = s.mean_y;
    Ok(match *spec {
        SampleMean => y,
        TwoPhaseRatio1 => {
            if s.p1 == 0.0 {
                return Err(spec.div_zero("p1 = 0"));
            }
            y * (s.p1_prime / s.p1)
        }
        TwoPhaseProduct2 => {
            if s.p2_prime == 0.0 {
                return Err(spec.div_zero("p2' = 0"));
            }
            y * (k.p2 / s.p2_prime)
        }
        TwoPhaseExpRatio1 => {
            if s.p1_prime + s.p1 == 0.0 {
                return Err(spec.div_zero("p1' + p1 = 0"));
            }
            y * ((s.p1_prime - s.p1) / (s.p1_prime + s.p1)).exp()
        }
        TwoPhaseExpProduct2 => y * ((s.p2_prime - k.p2) / (s.p2_prime + k.p2)).exp(),
        TwoPhasePower { m1, m2 } => y * d_power_factor(spec, m1, m2, s, k)?,
        TwoPhaseExpFamily { n1, n2 } => y * d_exp_factor(spec, n1, n2, s, k)?,
        TwoPhaseComposite { weights, m1, m2, n1, n2 } => {
            let (h0, h1, h2) = weights.triple().ok_or_else(|| Error::UnresolvedWeights(spec.to_string()))?;
            let mut v = h0 * y;
            if h1 != 0.0 {
                v += h1 * y * d_power_factor(spec, m1, m2, s, k)?;
            }
            if h2 != 0.0 {
                v += h2 * y * d_exp_factor(spec, n1, n2, s, k)?;
            }
            v
        }
        _ => return Err(spec.wrong_phase(Phase::Two)),
    })
}

fn d_power_factor(spec: &EstimatorSpec, m1: f64, m2: f64, s: &TwoPhaseSampleData, k: &KnownTruth) -> Result<f64> {
    let mut f = 1.0;
    if m1 != 0.0 {
        if s.p1 == 0.0 || s.p1_prime == 0.0 {
            return Err(spec.div_zero("p1 = 0"));
        }
        f *= (s.p1_prime / s.p1).powf(m1);
    }
    if m2 != 0.0 {
        if s.p2_prime == 0.0 {
            return Err(spec.div_zero("p2' = 0"));
        }
        f *= (k.p2 / s.p2_prime).powf(m2);
    }
    Ok(f)
}

fn d_exp_factor(spec: &EstimatorSpec, n1: f64, n2: f64, s: &TwoPhaseSampleData, k: &KnownTruth) -> Result<f64> {
    let mut f = 1.0;
    if n1 != 0.0 {
        if s.p1_prime + s.p1 == 0.0 {
            return Err(spec.div_zero("p1' + p1 = 0"));
        }
        f *= exp_contrast(n1, s.p1_prime, s.p1);
    }
    if n2 != 0.0 {
        f *= exp_contrast(n2, s.p2_prime, k.p2);
    }
    Ok(f)
}
