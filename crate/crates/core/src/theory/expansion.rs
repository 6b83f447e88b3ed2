//! Second-order expansions of estimators in relative sampling errors.
//!
//! Every estimator divided by the true mean is written as
//! `1 + sum l_i e_i + sum q_ij e_i e_j + o(e^2)`, where the `e` are the
//! relative errors of the sample statistics. First-order bias is then
//! `Ybar * sum q_ij E(e_i e_j)` and first-order MSE is
//! `Ybar^2 * sum l_i l_j E(e_i e_j)`.

use crate::estimators::EstimatorSpec;
use crate::population::Coefficients;

/// Relative sampling errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorTerm {
    /// `(ybar - Ybar) / Ybar`
    Mean = 0,
    /// `(p1 - P1) / P1`, second phase (or the only phase)
    P1 = 1,
    /// `(p2 - P2) / P2`, second phase (or the only phase)
    P2 = 2,
    /// `(p1' - P1) / P1`, first phase
    P1First = 3,
    /// `(p2' - P2) / P2`, first phase
    P2First = 4,
}

const TERMS: usize = 5;

impl ErrorTerm {
    pub const ALL: [ErrorTerm; TERMS] =
        [ErrorTerm::Mean, ErrorTerm::P1, ErrorTerm::P2, ErrorTerm::P1First, ErrorTerm::P2First];

    fn variable(self) -> usize {
        match self {
            ErrorTerm::Mean => 0,
            ErrorTerm::P1 | ErrorTerm::P1First => 1,
            ErrorTerm::P2 | ErrorTerm::P2First => 2,
        }
    }

    fn first_phase(self) -> bool {
        matches!(self, ErrorTerm::P1First | ErrorTerm::P2First)
    }
}

/// Second moments `E(e_a e_b)` under SRSWOR or nested two-phase SRSWOR.
///
/// Two second-phase means have covariance `f1 S_ab`; any pair involving a
/// first-phase mean has covariance `f2 S_ab`. Scaled to relative errors,
/// `S_ab / (mean_a mean_b)` is one of `C_y^2`, `C_p1^2`, `C_p2^2`,
/// `K_pb1 C_p1^2`, `K_pb2 C_p2^2`, `K_phi C_p2^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    relative: [[f64; 3]; 3],
    f1: f64,
    f2: Option<f64>,
}

impl MomentSet {
    pub fn new(c: &Coefficients) -> Self {
        let (cy2, cp1, cp2) = (c.cy2(), c.cp1_2(), c.cp2_2());
        let y1 = c.k_pb1 * cp1;
        let y2 = c.k_pb2 * cp2;
        let p12 = c.k_phi * cp2;
        Self { relative: [[cy2, y1, y2], [y1, cp1, p12], [y2, p12, cp2]], f1: c.f1, f2: c.f2 }
    }

    /// `E(e_a e_b)`; `None` for first-phase terms in a single-phase design.
    pub fn get(&self, a: ErrorTerm, b: ErrorTerm) -> Option<f64> {
        let f = if a.first_phase() || b.first_phase() { self.f2? } else { self.f1 };
        Some(f * self.relative[a.variable()][b.variable()])
    }

    pub fn is_two_phase(&self) -> bool {
        self.f2.is_some()
    }
}

/// Relative expansion `1 + l.e + e'Qe` with `Q` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    linear: [f64; TERMS],
    quadratic: [[f64; TERMS]; TERMS],
}

impl Expansion {
    fn one() -> Self {
        Self { linear: [0.0; TERMS], quadratic: [[0.0; TERMS]; TERMS] }
    }

    /// `(1 + e)^k`
    fn power(t: ErrorTerm, k: f64) -> Self {
        let mut x = Self::one();
        let i = t as usize;
        x.linear[i] = k;
        x.quadratic[i][i] = k * (k - 1.0) / 2.0;
        x
    }

    /// `exp(beta (a - b) / (a + b))` where `a = P(1 + x)` and `b = P(1 + y)`
    /// estimate the same proportion; `None` stands for the known `P`.
    ///
    /// `(x - y) / (2 + x + y) = (x - y)/2 - (x^2 - y^2)/4 + ...`
    fn exp_contrast(beta: f64, plus: Option<ErrorTerm>, minus: Option<ErrorTerm>) -> Self {
        let mut u = Self::one();
        if let Some(x) = plus {
            u.linear[x as usize] += 0.5;
            u.quadratic[x as usize][x as usize] -= 0.25;
        }
        if let Some(y) = minus {
            u.linear[y as usize] -= 0.5;
            u.quadratic[y as usize][y as usize] += 0.25;
        }
        // exp(beta u) = 1 + beta u + beta^2 u^2 / 2, u^2 keeps only the linear part
        let mut out = Self::one();
        for i in 0..TERMS {
            out.linear[i] = beta * u.linear[i];
            for j in 0..TERMS {
                out.quadratic[i][j] = beta * u.quadratic[i][j] + beta * beta * u.linear[i] * u.linear[j] / 2.0;
            }
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::one();
        for i in 0..TERMS {
            out.linear[i] = self.linear[i] + other.linear[i];
            for j in 0..TERMS {
                out.quadratic[i][j] = self.quadratic[i][j]
                    + other.quadratic[i][j]
                    + (self.linear[i] * other.linear[j] + self.linear[j] * other.linear[i]) / 2.0;
            }
        }
        out
    }

    /// Weighted sum of expansions whose weights add to one.
    fn blend(parts: &[(f64, Self)]) -> Self {
        let mut out = Self::one();
        for (w, x) in parts {
            for i in 0..TERMS {
                out.linear[i] += w * x.linear[i];
                for j in 0..TERMS {
                    out.quadratic[i][j] += w * x.quadratic[i][j];
                }
            }
        }
        out
    }

    pub fn linear(&self, t: ErrorTerm) -> f64 {
        self.linear[t as usize]
    }

    pub fn quadratic(&self, a: ErrorTerm, b: ErrorTerm) -> f64 {
        self.quadratic[a as usize][b as usize]
    }

    fn contract(&self, m: &MomentSet, coef: impl Fn(usize, usize) -> f64) -> Option<f64> {
        let mut acc = 0.0;
        for a in ErrorTerm::ALL {
            for b in ErrorTerm::ALL {
                let c = coef(a as usize, b as usize);
                if c != 0.0 {
                    acc += c * m.get(a, b)?;
                }
            }
        }
        Some(acc)
    }

    /// `E(sum q_ij e_i e_j)`: relative first-order bias.
    pub fn relative_bias(&self, m: &MomentSet) -> Option<f64> {
        self.contract(m, |i, j| self.quadratic[i][j])
    }

    /// `E((l.e)^2)`: relative first-order MSE.
    pub fn relative_mse(&self, m: &MomentSet) -> Option<f64> {
        self.contract(m, |i, j| self.linear[i] * self.linear[j])
    }
}

fn power_family(a1: f64, a2: f64) -> Expansion {
    Expansion::power(ErrorTerm::Mean, 1.0)
        .mul(&Expansion::power(ErrorTerm::P1, -a1))
        .mul(&Expansion::power(ErrorTerm::P2, -a2))
}

fn exp_family(b1: f64, b2: f64) -> Expansion {
    Expansion::power(ErrorTerm::Mean, 1.0)
        .mul(&Expansion::exp_contrast(b1, None, Some(ErrorTerm::P1)))
        .mul(&Expansion::exp_contrast(b2, Some(ErrorTerm::P2), None))
}

fn d_power_family(m1: f64, m2: f64) -> Expansion {
    Expansion::power(ErrorTerm::Mean, 1.0)
        .mul(&Expansion::power(ErrorTerm::P1First, m1))
        .mul(&Expansion::power(ErrorTerm::P1, -m1))
        .mul(&Expansion::power(ErrorTerm::P2First, -m2))
}

fn d_exp_family(n1: f64, n2: f64) -> Expansion {
    Expansion::power(ErrorTerm::Mean, 1.0)
        .mul(&Expansion::exp_contrast(n1, Some(ErrorTerm::P1First), Some(ErrorTerm::P1)))
        .mul(&Expansion::exp_contrast(n2, Some(ErrorTerm::P2First), None))
}

/// Expansion of an estimator; `None` when composite weights are unresolved.
pub fn expand(spec: &EstimatorSpec) -> Option<Expansion> {
    use EstimatorSpec::*;
    Some(match spec.as_family_member() {
        SampleMean => Expansion::power(ErrorTerm::Mean, 1.0),
        Power { a1, a2 } => power_family(a1, a2),
        ExpFamily { b1, b2 } => exp_family(b1, b2),
        Composite { weights, a1, a2, b1, b2 } => {
            let (w0, w1, w2) = weights.triple()?;
            Expansion::blend(&[
                (w0, Expansion::power(ErrorTerm::Mean, 1.0)),
                (w1, power_family(a1, a2)),
                (w2, exp_family(b1, b2)),
            ])
        }
        TwoPhasePower { m1, m2 } => d_power_family(m1, m2),
        TwoPhaseExpFamily { n1, n2 } => d_exp_family(n1, n2),
        TwoPhaseComposite { weights, m1, m2, n1, n2 } => {
            let (h0, h1, h2) = weights.triple()?;
            Expansion::blend(&[
                (h0, Expansion::power(ErrorTerm::Mean, 1.0)),
                (h1, d_power_family(m1, m2)),
                (h2, d_exp_family(n1, n2)),
            ])
        }
        // as_family_member removed the named classical forms
        Ratio1 | Product2 | ExpRatio1 | ExpProduct2 | TwoPhaseRatio1 | TwoPhaseProduct2 | TwoPhaseExpRatio1
        | TwoPhaseExpProduct2 => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ErrorTerm::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn power_expansion_coefficients() {
        // (1+e0)(1+e1)^-a1(1+e2)^-a2 with a = (2, -1)
        let x = power_family(2.0, -1.0);
        assert!(close(x.linear(Mean), 1.0));
        assert!(close(x.linear(P1), -2.0));
        assert!(close(x.linear(P2), 1.0));
        assert!(close(x.quadratic(P1, P1), 3.0)); // a1(a1+1)/2
        assert!(close(x.quadratic(P2, P2), 0.0));
        // cross terms are split symmetrically
        assert!(close(2.0 * x.quadratic(Mean, P1), -2.0));
        assert!(close(2.0 * x.quadratic(P1, P2), -2.0)); // a1 a2
    }

    #[test]
    fn exponential_ratio_expansion() {
        // exp((P - p)/(P + p)) = 1 - e/2 + 3e^2/8
        let x = Expansion::exp_contrast(1.0, None, Some(P1));
        assert!(close(x.linear(P1), -0.5));
        assert!(close(x.quadratic(P1, P1), 0.375));
        // exp((p - P)/(p + P)) = 1 + e/2 - e^2/8
        let x = Expansion::exp_contrast(1.0, Some(P2), None);
        assert!(close(x.linear(P2), 0.5));
        assert!(close(x.quadratic(P2, P2), -0.125));
    }

    #[test]
    fn exponential_expansion_matches_finite_differences() {
        // independent check of the quadratic coefficients by central differences
        let beta = 1.7;
        let f = |x: f64, y: f64| (beta * (x - y) / (2.0 + x + y)).exp();
        let h = 1e-4;
        let d2 = |fx: &dyn Fn(f64) -> f64| (fx(h) - 2.0 * fx(0.0) + fx(-h)) / (h * h) / 2.0;
        let x = Expansion::exp_contrast(beta, Some(P1First), Some(P1));
        assert!((x.quadratic(P1First, P1First) - d2(&|t| f(t, 0.0))).abs() < 1e-6);
        assert!((x.quadratic(P1, P1) - d2(&|t| f(0.0, t))).abs() < 1e-6);
        let mixed = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        assert!((2.0 * x.quadratic(P1First, P1) - mixed).abs() < 1e-6);
    }

    #[test]
    fn moment_set_entries() {
        let c = Coefficients {
            c_y: 0.5,
            c_p1: 1.2,
            c_p2: 0.8,
            k_pb1: 0.3,
            k_pb2: 0.4,
            k_phi: 0.6,
            f1: 0.1,
            f2: Some(0.02),
            f3: Some(0.08),
        };
        let m = MomentSet::new(&c);
        assert!(close(m.get(Mean, Mean).unwrap(), 0.1 * 0.25));
        assert!(close(m.get(Mean, P1).unwrap(), 0.1 * 0.3 * 1.44));
        assert!(close(m.get(P1, P2).unwrap(), 0.1 * 0.6 * 0.64));
        assert!(close(m.get(P1, P1First).unwrap(), 0.02 * 1.44));
        assert!(close(m.get(P1First, P1First).unwrap(), 0.02 * 1.44));
        assert!(close(m.get(Mean, P2First).unwrap(), 0.02 * 0.4 * 0.64));
        assert!(close(m.get(P1, P2First).unwrap(), m.get(P1First, P2First).unwrap()));
        for a in ErrorTerm::ALL {
            for b in ErrorTerm::ALL {
                assert_eq!(m.get(a, b), m.get(b, a));
            }
        }
        // E(e1^2) - E(e1 e1') = f3 Cp1^2
        let gap = m.get(P1, P1).unwrap() - m.get(P1, P1First).unwrap();
        assert!(close(gap, 0.08 * 1.44));

        let single = MomentSet::new(&Coefficients { f2: None, f3: None, ..c });
        assert!(single.get(P1First, Mean).is_none());
        assert!(single.get(P1, Mean).is_some());
    }
}
