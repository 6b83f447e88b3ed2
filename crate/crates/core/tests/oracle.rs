//! Closed-form first-order bias and MSE, written out per estimator and
//! checked against the generic expansion route. Composite forms use an
//! explicit covariance matrix of the relative errors rather than the
//! A/B-term quadratic forms.

use attrmean::datasets;
use attrmean::theory::{first_order_bias, first_order_mse};
use attrmean::{derived_coefficients, Coefficients, EstimatorSpec, Weights};
use proptest::prelude::*;

/// Relative covariance of (e0, e1, e2, e1', e2').
fn sigma(c: &Coefficients) -> [[f64; 5]; 5] {
    let f1 = c.f1;
    let f2 = c.f2.unwrap_or(0.0);
    let (cy2, cp1, cp2) = (c.cy2(), c.cp1_2(), c.cp2_2());
    let (k1, k2, kf) = (c.k_pb1, c.k_pb2, c.k_phi);
    // unscaled second-phase block over (y, phi1, phi2)
    let base = [[cy2, k1 * cp1, k2 * cp2], [k1 * cp1, cp1, kf * cp2], [k2 * cp2, kf * cp2, cp2]];
    let map = [0usize, 1, 2, 1, 2];
    let mut s = [[0.0; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            let f = if i < 3 && j < 3 { f1 } else { f2 };
            s[i][j] = f * base[map[i]][map[j]];
        }
    }
    s
}

fn quad(l: [f64; 5], s: &[[f64; 5]; 5]) -> f64 {
    (0..5).map(|i| (0..5).map(|j| l[i] * l[j] * s[i][j]).sum::<f64>()).sum()
}

fn power_bias(c: &Coefficients, a1: f64, a2: f64) -> f64 {
    c.f1 * (a1 * (a1 + 1.0) / 2.0 * c.cp1_2() + a2 * (a2 + 1.0) / 2.0 * c.cp2_2() + a1 * a2 * c.k_phi * c.cp2_2()
        - a1 * c.k_pb1 * c.cp1_2()
        - a2 * c.k_pb2 * c.cp2_2())
}

fn exp_bias(c: &Coefficients, b1: f64, b2: f64) -> f64 {
    c.f1 * (c.cp1_2() * (b1 * b1 / 8.0 + b1 / 4.0 - b1 * c.k_pb1 / 2.0)
        + c.cp2_2() * (b2 * b2 / 8.0 - b2 / 4.0 + b2 * c.k_pb2 / 2.0 - b1 * b2 * c.k_phi / 4.0))
}

fn d_power_bias(c: &Coefficients, m1: f64, m2: f64) -> f64 {
    let (f2, f3) = c.two_phase_factors().unwrap();
    f3 * c.cp1_2() * (m1 * m1 / 2.0 + m1 / 2.0 - m1 * c.k_pb1) + f2 * c.cp2_2() * (m2 * m2 / 2.0 + m2 / 2.0 - m2 * c.k_pb2)
}

fn d_exp_bias(c: &Coefficients, n1: f64, n2: f64) -> f64 {
    let (f2, f3) = c.two_phase_factors().unwrap();
    f3 * c.cp1_2() * (n1 * n1 / 8.0 + n1 / 4.0 - n1 * c.k_pb1 / 2.0)
        + f2 * c.cp2_2() * (n2 * n2 / 8.0 - n2 / 4.0 + n2 * c.k_pb2 / 2.0)
}

/// (relative bias, relative MSE) of `spec` by closed form.
fn closed_form(spec: &EstimatorSpec, c: &Coefficients) -> (f64, f64) {
    use EstimatorSpec::*;
    let f1 = c.f1;
    let (f2, f3) = c.two_phase_factors().unwrap_or((f64::NAN, f64::NAN));
    let (cy2, cp1, cp2) = (c.cy2(), c.cp1_2(), c.cp2_2());
    let (k1, k2, kf) = (c.k_pb1, c.k_pb2, c.k_phi);
    match *spec {
        SampleMean => (0.0, f1 * cy2),
        Ratio1 => (f1 * cp1 * (1.0 - k1), f1 * (cy2 + cp1 * (1.0 - 2.0 * k1))),
        Product2 => (f1 * k2 * cp2, f1 * (cy2 + cp2 * (1.0 + 2.0 * k2))),
        ExpRatio1 => (f1 * cp1 * (3.0 / 8.0 - k1 / 2.0), f1 * (cy2 + cp1 * (0.25 - k1))),
        ExpProduct2 => (f1 * cp2 * (k2 / 2.0 - 1.0 / 8.0), f1 * (cy2 + cp2 * (0.25 + k2))),
        Power { a1, a2 } => (
            power_bias(c, a1, a2),
            f1 * (cy2 + cp1 * (a1 * a1 - 2.0 * a1 * k1) + cp2 * (a2 * a2 - 2.0 * a2 * k2 + 2.0 * a1 * a2 * kf)),
        ),
        ExpFamily { b1, b2 } => (
            exp_bias(c, b1, b2),
            f1 * (cy2 + cp1 * (b1 * b1 / 4.0 - b1 * k1) + cp2 * (b2 * b2 / 4.0 + b2 * k2 - b1 * b2 * kf / 2.0)),
        ),
        Composite { weights, a1, a2, b1, b2 } => {
            let (_, w1, w2) = weights.triple().unwrap();
            let l = [1.0, -w1 * a1 - w2 * b1 / 2.0, -w1 * a2 + w2 * b2 / 2.0, 0.0, 0.0];
            (w1 * power_bias(c, a1, a2) + w2 * exp_bias(c, b1, b2), quad(l, &sigma(c)))
        }
        TwoPhaseRatio1 => (f3 * cp1 * (1.0 - k1), f1 * cy2 + f3 * cp1 * (1.0 - 2.0 * k1)),
        TwoPhaseProduct2 => (f2 * cp2 * (1.0 - k2), f1 * cy2 + f2 * cp2 * (1.0 - 2.0 * k2)),
        TwoPhaseExpRatio1 => (f3 * cp1 * (3.0 / 8.0 - k1 / 2.0), f1 * cy2 + f3 * cp1 * (0.25 - k1)),
        TwoPhaseExpProduct2 => (f2 * cp2 * (k2 / 2.0 - 1.0 / 8.0), f1 * cy2 + f2 * cp2 * (0.25 + k2)),
        TwoPhasePower { m1, m2 } => (
            d_power_bias(c, m1, m2),
            f1 * cy2 + f3 * cp1 * (m1 * m1 - 2.0 * m1 * k1) + f2 * cp2 * (m2 * m2 - 2.0 * m2 * k2),
        ),
        TwoPhaseExpFamily { n1, n2 } => (
            d_exp_bias(c, n1, n2),
            f1 * cy2 + f3 * cp1 * (n1 * n1 / 4.0 - n1 * k1) + f2 * cp2 * (n2 * n2 / 4.0 + n2 * k2),
        ),
        TwoPhaseComposite { weights, m1, m2, n1, n2 } => {
            let (_, h1, h2) = weights.triple().unwrap();
            let l = [1.0, -h1 * m1 - h2 * n1 / 2.0, 0.0, h1 * m1 + h2 * n1 / 2.0, -h1 * m2 + h2 * n2 / 2.0];
            (h1 * d_power_bias(c, m1, m2) + h2 * d_exp_bias(c, n1, n2), quad(l, &sigma(c)))
        }
    }
}

fn fixed(w1: f64, w2: f64) -> Weights {
    Weights::Fixed { w1, w2 }
}

fn all_specs(x: [f64; 6]) -> Vec<EstimatorSpec> {
    use EstimatorSpec::*;
    let [p, q, r, s, w1, w2] = x;
    vec![
        SampleMean,
        Ratio1,
        Product2,
        ExpRatio1,
        ExpProduct2,
        Power { a1: p, a2: q },
        ExpFamily { b1: r, b2: s },
        Composite { weights: fixed(w1, w2), a1: p, a2: q, b1: r, b2: s },
        TwoPhaseRatio1,
        TwoPhaseProduct2,
        TwoPhaseExpRatio1,
        TwoPhaseExpProduct2,
        TwoPhasePower { m1: p, m2: q },
        TwoPhaseExpFamily { n1: r, n2: s },
        TwoPhaseComposite { weights: fixed(w1, w2), m1: p, m2: q, n1: r, n2: s },
    ]
}

fn coefficients() -> impl Strategy<Value = Coefficients> {
    (0.05f64..2.0, 0.1f64..2.0, 0.1f64..2.0, -1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5, 0.001f64..0.2, 0.001f64..0.2)
        .prop_map(|(c_y, c_p1, c_p2, k_pb1, k_pb2, k_phi, f2, f3)| Coefficients {
            c_y,
            c_p1,
            c_p2,
            k_pb1,
            k_pb2,
            k_phi,
            f1: f2 + f3,
            f2: Some(f2),
            f3: Some(f3),
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn expansion_route_matches_closed_forms(
        c in coefficients(),
        x in prop::array::uniform6(-2.0f64..2.0),
        ybar in 0.5f64..500.0,
    ) {
        for spec in all_specs(x) {
            let (rb, rm) = closed_form(&spec, &c);
            let bias = first_order_bias(&spec, &c, ybar).unwrap();
            let mse = first_order_mse(&spec, &c, ybar).unwrap();
            let scale = ybar * (c.f1 * (c.cy2() + c.cp1_2() + c.cp2_2())) * 10.0;
            prop_assert!((bias - ybar * rb).abs() <= 1e-12 * scale, "{spec}: {bias} vs {}", ybar * rb);
            prop_assert!((mse - ybar * ybar * rm).abs() <= 1e-12 * ybar * scale, "{spec}: {mse} vs {}", ybar * ybar * rm);
        }
    }
}

/// Values computed by an independent script from the bundled summaries,
/// rounded to the digits shown.
#[test]
fn frozen_dataset_values() {
    let rice = datasets::rice();
    let wheat = datasets::wheat();
    let cases: [(&datasets::Dataset, &str, f64, f64); 16] = [
        (&rice, "mean", 655.2888, 1e-4),
        (&rice, "ratio1", 402.598, 1e-3),
        (&rice, "product2", 1720.83, 1e-2),
        (&rice, "expratio1", 466.736, 1e-3),
        (&rice, "expproduct2", 1091.214, 1e-3),
        (&rice, "power(a1=-1,a2=1)", 562.843, 1e-3),
        (&rice, "expfam(b1=1,b2=-1)", 362.506, 1e-3),
        (&rice, "composite(auto;a1=1,a2=1,b1=1,b2=1)", 356.879, 1e-3),
        (&wheat, "mean", 1592.795, 1e-3),
        (&wheat, "d-ratio1", 1256.943, 1e-3),
        (&wheat, "d-product2", 1533.00, 1e-2),
        (&wheat, "d-expratio1", 1131.014, 1e-3),
        (&wheat, "d-expproduct2", 1739.80, 1e-2),
        (&wheat, "d-power(m1=1,m2=1)", 1197.149, 1e-3),
        (&wheat, "d-expfam(n1=1,n2=1)", 1278.021, 1e-3),
        (&wheat, "d-composite(auto;m1=1,m2=1,n1=1,n2=1)", 1032.365, 1e-3),
    ];
    for (d, spec, expected, digits) in cases {
        let c = derived_coefficients(&d.summary, &d.design).unwrap();
        let mse = first_order_mse(&spec.parse().unwrap(), &c, d.summary.mean_y).unwrap();
        assert!((mse - expected).abs() <= digits / 2.0 + 1e-9, "{} {spec}: {mse} vs {expected}", d.name);
    }
}

#[test]
fn frozen_coefficients() {
    let r = derived_coefficients(&datasets::rice().summary, &datasets::rice().design).unwrap();
    for (got, want) in [(r.cy2(), 3.29229), (r.cp1_2(), 1.25015), (r.cp2_2(), 1.94628), (r.k_pb1, 1.007765), (r.k_pb2, 0.875309), (r.k_phi, 0.712493)] {
        assert!((got - want).abs() < 1e-5 * want.abs(), "{got} vs {want}");
    }
    let w = derived_coefficients(&datasets::wheat().summary, &datasets::wheat().design).unwrap();
    for (got, want) in [(w.cy2(), 0.567515), (w.cp1_2(), 0.492710), (w.cp2_2(), 0.370904), (w.k_pb1, 0.642865), (w.k_pb2, 0.691465), (w.k_phi, 0.835609)] {
        assert!((got - want).abs() < 1e-5 * want.abs(), "{got} vs {want}");
    }
    assert!((w.f1 - 0.0705882).abs() < 1e-7);
    assert!((w.f2.unwrap() - 0.0105882).abs() < 1e-7);
    assert!((w.f3.unwrap() - 0.06).abs() < 1e-12);
}
