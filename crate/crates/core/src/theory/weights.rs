//! Composite-estimator quadratic forms and their minimizers.
//!
//! Both composites have first-order MSE of the shape
//! `const + w1^2 Q1 + w2^2 Q2 - 2 w1 Q3 - w2 Q4 + w1 w2 Q5`.
//! Setting the gradient to zero gives
//!
//! ```text
//! [2 Q1   Q5] [w1]   [2 Q3]
//! [ Q5  2 Q2] [w2] = [  Q4]
//! ```
//!
//! so `w1 = (4 Q2 Q3 - Q4 Q5) / D`, `w2 = (2 Q1 Q4 - 2 Q3 Q5) / D` with
//! `D = 4 Q1 Q2 - Q5^2`, a minimum when `D > 0`.

use crate::error::{Error, Result};
use crate::population::Coefficients;

/// Single-phase composite terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ATerms {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

/// Two-phase composite terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BTerms {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
}

fn form(q: [f64; 5], w1: f64, w2: f64) -> f64 {
    w1 * w1 * q[0] + w2 * w2 * q[1] - 2.0 * w1 * q[2] - w2 * q[3] + w1 * w2 * q[4]
}

fn solve(q: [f64; 5]) -> Result<(f64, f64)> {
    let [q1, q2, q3, q4, q5] = q;
    let det = 4.0 * q1 * q2 - q5 * q5;
    let scale = (4.0 * q1 * q2).abs().max(q5 * q5);
    if det <= 1e-12 * scale || !det.is_finite() {
        return Err(Error::SingularSystem { determinant: det });
    }
    Ok(((4.0 * q2 * q3 - q4 * q5) / det, (2.0 * q1 * q4 - 2.0 * q3 * q5) / det))
}

impl ATerms {
    fn as_array(&self) -> [f64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a5]
    }

    /// `w1^2 A1 + w2^2 A2 - 2 w1 A3 - w2 A4 + w1 w2 A5`
    pub fn form(&self, w1: f64, w2: f64) -> f64 {
        form(self.as_array(), w1, w2)
    }

    /// `4 A1 A2 - A5^2`
    pub fn determinant(&self) -> f64 {
        4.0 * self.a1 * self.a2 - self.a5 * self.a5
    }
}

impl BTerms {
    fn as_array(&self) -> [f64; 5] {
        [self.b1, self.b2, self.b3, self.b4, self.b5]
    }

    /// `h1^2 B1 + h2^2 B2 - 2 h1 B3 - h2 B4 + h1 h2 B5`
    pub fn form(&self, h1: f64, h2: f64) -> f64 {
        form(self.as_array(), h1, h2)
    }

    /// `4 B1 B2 - B5^2`
    pub fn determinant(&self) -> f64 {
        4.0 * self.b1 * self.b2 - self.b5 * self.b5
    }
}

pub fn a_terms(c: &Coefficients, alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> ATerms {
    let (cp1, cp2) = (c.cp1_2(), c.cp2_2());
    let kphi = c.k_phi;
    ATerms {
        a1: alpha1 * alpha1 * cp1 + alpha2 * alpha2 * cp2 + 2.0 * alpha1 * alpha2 * kphi * cp2,
        a2: 0.25 * (beta1 * beta1 * cp1 + beta2 * beta2 * cp2 - 2.0 * beta1 * beta2 * kphi * cp2),
        a3: alpha1 * c.k_pb1 * cp1 + alpha2 * c.k_pb2 * cp2,
        a4: beta1 * c.k_pb1 * cp1 - beta2 * c.k_pb2 * cp2,
        a5: alpha1 * beta1 * cp1 - alpha2 * beta2 * cp2 + alpha2 * beta1 * kphi * cp2 - alpha1 * beta2 * kphi * cp2,
    }
}

pub fn b_terms(c: &Coefficients, m1: f64, m2: f64, n1: f64, n2: f64) -> Result<BTerms> {
    let (f2, f3) = c
        .two_phase_factors()
        .ok_or_else(|| Error::MissingTwoPhaseFactors("two-phase composite".into()))?;
    let (cp1, cp2) = (c.cp1_2(), c.cp2_2());
    Ok(BTerms {
        b1: f2 * m2 * m2 * cp2 + f3 * m1 * m1 * cp1,
        b2: 0.25 * (f2 * n2 * n2 * cp2 + f3 * n1 * n1 * cp1),
        b3: f3 * m1 * c.k_pb1 * cp1 + f2 * m2 * c.k_pb2 * cp2,
        b4: f3 * n1 * c.k_pb1 * cp1 - f2 * n2 * c.k_pb2 * cp2,
        b5: f3 * n1 * m1 * cp1 - f2 * n2 * m2 * cp2,
    })
}

/// `(w1, w2)` minimizing the single-phase composite MSE.
pub fn optimal_weights_single(a: &ATerms) -> Result<(f64, f64)> {
    solve(a.as_array())
}

/// `(h1, h2)` minimizing the two-phase composite MSE.
pub fn optimal_weights_double(b: &BTerms) -> Result<(f64, f64)> {
    solve(b.as_array())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs() -> Coefficients {
        Coefficients {
            c_y: 0.7,
            c_p1: 1.1,
            c_p2: 0.9,
            k_pb1: 0.4,
            k_pb2: 0.35,
            k_phi: 0.5,
            f1: 0.05,
            f2: Some(0.01),
            f3: Some(0.04),
        }
    }

    #[test]
    fn zero_exponents_give_zero_terms() {
        let a = a_terms(&coeffs(), 0.0, 0.0, 0.0, 0.0);
        assert_eq!(a.as_array(), [0.0; 5]);
        let b = b_terms(&coeffs(), 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(b.as_array(), [0.0; 5]);
    }

    #[test]
    fn single_term_reductions() {
        let c = coeffs();
        let a = a_terms(&c, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(a.a1, c.cp1_2());
        assert_eq!(a.a3, c.k_pb1 * c.cp1_2());
        assert_eq!([a.a2, a.a4, a.a5], [0.0; 3]);

        let b = b_terms(&c, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(b.b1, 0.04 * c.cp1_2());
        assert_eq!(b.b3, 0.04 * c.k_pb1 * c.cp1_2());
        assert_eq!([b.b2, b.b4, b.b5], [0.0; 3]);
    }

    #[test]
    fn decoupled_system() {
        let a = ATerms { a1: 2.0, a2: 3.0, a3: 0.5, a4: 0.0, a5: 0.0 };
        assert_eq!(optimal_weights_single(&a).unwrap(), (0.25, 0.0));
        let b = BTerms { b1: 4.0, b2: 1.0, b3: 1.0, b4: 0.0, b5: 0.0 };
        assert_eq!(optimal_weights_double(&b).unwrap(), (0.25, 0.0));
    }

    #[test]
    fn singular_guard() {
        // 4 A1 A2 = A5^2
        let a = ATerms { a1: 1.0, a2: 1.0, a3: 0.5, a4: 0.2, a5: 2.0 };
        assert!(matches!(optimal_weights_single(&a), Err(Error::SingularSystem { .. })));
        assert!(matches!(optimal_weights_single(&ATerms { a1: 0.0, a2: 0.0, a3: 0.0, a4: 0.0, a5: 0.0 }), Err(Error::SingularSystem { .. })));
        let b = BTerms { b1: 0.25, b2: 1.0, b3: 1.0, b4: 1.0, b5: -1.0 };
        assert!(matches!(optimal_weights_double(&b), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn b_terms_need_two_phase_factors() {
        let c = Coefficients { f2: None, f3: None, ..coeffs() };
        assert!(matches!(b_terms(&c, 1.0, 1.0, 1.0, 1.0), Err(Error::MissingTwoPhaseFactors(_))));
    }

    #[test]
    fn stationary_point_zeroes_the_gradient() {
        let a = a_terms(&coeffs(), 1.0, 1.0, 1.0, 1.0);
        let (w1, w2) = optimal_weights_single(&a).unwrap();
        let g1 = 2.0 * w1 * a.a1 - 2.0 * a.a3 + w2 * a.a5;
        let g2 = 2.0 * w2 * a.a2 - a.a4 + w1 * a.a5;
        assert!(g1.abs() < 1e-12 && g2.abs() < 1e-12);
    }
}
