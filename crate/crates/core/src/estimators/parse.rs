//! Textual estimator specs.
//!
//! ```text
//! spec      := name [ "(" args ")" ]
//! name      := mean | ratio1 | product2 | expratio1 | expproduct2
//!            | power | expfam | composite
//!            | d-ratio1 | d-product2 | d-expratio1 | d-expproduct2
//!            | d-power | d-expfam | d-composite
//! args      := kv ("," kv)*                 power(a1,a2) expfam(b1,b2)
//!                                           d-power(m1,m2) d-expfam(n1,n2)
//! composite := weights ";" kv ("," kv)*     exponents a1,a2,b1,b2 (m1,m2,n1,n2 for d-)
//! weights   := "auto" | kv ("," kv)*        w1,w2 with optional w0 (h0,h1,h2 for d-)
//! kv        := key "=" number
//! ```
//!
//! Lists separate specs with commas, semicolons, whitespace or newlines
//! outside parentheses; `#` starts a comment that runs to end of line.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{EstimatorSpec, Weights};
use crate::error::{Error, Result};

fn err(token: &str, reason: impl Into<String>) -> Error {
    Error::SpecParse { token: token.to_string(), reason: reason.into() }
}

struct Args<'a> {
    token: &'a str,
    map: BTreeMap<String, f64>,
}

impl<'a> Args<'a> {
    fn parse(token: &'a str, body: &str, allowed: &[&str]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in body.split(',').map(str::trim) {
            if part.is_empty() {
                return Err(err(token, "empty argument"));
            }
            let (k, v) = part.split_once('=').ok_or_else(|| err(part, "expected key=value"))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(err(part, format!("unknown key `{k}`, expected one of {}", allowed.join(", "))));
            }
            let v: f64 = v.trim().parse().map_err(|_| err(part, "value is not a number"))?;
            if !v.is_finite() {
                return Err(err(part, "value must be finite"));
            }
            if map.insert(k.to_string(), v).is_some() {
                return Err(err(part, format!("duplicate key `{k}`")));
            }
        }
        Ok(Self { token, map })
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.map.get(key).copied().ok_or_else(|| err(self.token, format!("missing `{key}`")))
    }
}

fn parse_weights(token: &str, body: &str, keys: [&str; 3]) -> Result<Weights> {
    if body.trim() == "auto" {
        return Ok(Weights::Optimal);
    }
    let a = Args::parse(token, body, &keys)?;
    let (w1, w2) = (a.get(keys[1])?, a.get(keys[2])?);
    match a.map.get(keys[0]) {
        Some(&w0) => Weights::from_triple(w0, w1, w2).map_err(|e| err(token, e.to_string())),
        None => Ok(Weights::Fixed { w1, w2 }),
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use EstimatorSpec::*;
        let token = s.trim();
        let (name, body) = match token.find('(') {
            Some(open) => {
                if !token.ends_with(')') {
                    return Err(err(token, "missing closing parenthesis"));
                }
                (token[..open].trim(), Some(&token[open + 1..token.len() - 1]))
            }
            None => (token, None),
        };
        let no_args = |spec: EstimatorSpec| match body {
            None => Ok(spec),
            Some(_) => Err(err(token, format!("`{name}` takes no arguments"))),
        };
        let need = || body.ok_or_else(|| err(token, format!("`{name}` needs arguments")));
        match name.to_ascii_lowercase().as_str() {
            "mean" => no_args(SampleMean),
            "ratio1" => no_args(Ratio1),
            "product2" => no_args(Product2),
            "expratio1" => no_args(ExpRatio1),
            "expproduct2" => no_args(ExpProduct2),
            "d-ratio1" => no_args(TwoPhaseRatio1),
            "d-product2" => no_args(TwoPhaseProduct2),
            "d-expratio1" => no_args(TwoPhaseExpRatio1),
            "d-expproduct2" => no_args(TwoPhaseExpProduct2),
            "power" => {
                let a = Args::parse(token, need()?, &["a1", "a2"])?;
                Ok(Power { a1: a.get("a1")?, a2: a.get("a2")? })
            }
            "expfam" => {
                let a = Args::parse(token, need()?, &["b1", "b2"])?;
                Ok(ExpFamily { b1: a.get("b1")?, b2: a.get("b2")? })
            }
            "d-power" => {
                let a = Args::parse(token, need()?, &["m1", "m2"])?;
                Ok(TwoPhasePower { m1: a.get("m1")?, m2: a.get("m2")? })
            }
            "d-expfam" => {
                let a = Args::parse(token, need()?, &["n1", "n2"])?;
                Ok(TwoPhaseExpFamily { n1: a.get("n1")?, n2: a.get("n2")? })
            }
            "composite" => {
                let (w, e) = need()?.split_once(';').ok_or_else(|| err(token, "expected `weights;exponents`"))?;
                let weights = parse_weights(token, w, ["w0", "w1", "w2"])?;
                let a = Args::parse(token, e, &["a1", "a2", "b1", "b2"])?;
                Ok(Composite { weights, a1: a.get("a1")?, a2: a.get("a2")?, b1: a.get("b1")?, b2: a.get("b2")? })
            }
            "d-composite" => {
                let (w, e) = need()?.split_once(';').ok_or_else(|| err(token, "expected `weights;exponents`"))?;
                let weights = parse_weights(token, w, ["h0", "h1", "h2"])?;
                let a = Args::parse(token, e, &["m1", "m2", "n1", "n2"])?;
                Ok(TwoPhaseComposite {
                    weights,
                    m1: a.get("m1")?,
                    m2: a.get("m2")?,
                    n1: a.get("n1")?,
                    n2: a.get("n2")?,
                })
            }
            _ => Err(err(name, "unknown estimator")),
        }
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use EstimatorSpec::*;
        let weights = |f: &mut fmt::Formatter<'_>, w: &Weights, k1: &str, k2: &str| match w {
            Weights::Optimal => write!(f, "auto"),
            Weights::Fixed { w1, w2 } => write!(f, "{k1}={w1},{k2}={w2}"),
        };
        match self {
            SampleMean => write!(f, "mean"),
            Ratio1 => write!(f, "ratio1"),
            Product2 => write!(f, "product2"),
            ExpRatio1 => write!(f, "expratio1"),
            ExpProduct2 => write!(f, "expproduct2"),
            Power { a1, a2 } => write!(f, "power(a1={a1},a2={a2})"),
            ExpFamily { b1, b2 } => write!(f, "expfam(b1={b1},b2={b2})"),
            Composite { weights: w, a1, a2, b1, b2 } => {
                write!(f, "composite(")?;
                weights(f, w, "w1", "w2")?;
                write!(f, ";a1={a1},a2={a2},b1={b1},b2={b2})")
            }
            TwoPhaseRatio1 => write!(f, "d-ratio1"),
            TwoPhaseProduct2 => write!(f, "d-product2"),
            TwoPhaseExpRatio1 => write!(f, "d-expratio1"),
            TwoPhaseExpProduct2 => write!(f, "d-expproduct2"),
            TwoPhasePower { m1, m2 } => write!(f, "d-power(m1={m1},m2={m2})"),
            TwoPhaseExpFamily { n1, n2 } => write!(f, "d-expfam(n1={n1},n2={n2})"),
            TwoPhaseComposite { weights: w, m1, m2, n1, n2 } => {
                write!(f, "d-composite(")?;
                weights(f, w, "h1", "h2")?;
                write!(f, ";m1={m1},m2={m2},n1={n1},n2={n2})")
            }
        }
    }
}

/// Parses a list of specs.
pub fn parse_spec_list(text: &str) -> Result<Vec<EstimatorSpec>> {
    let mut specs = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        let mut depth = 0usize;
        let mut start = 0;
        for (i, c) in line.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth = depth.checked_sub(1).ok_or_else(|| err(&line[start..=i], "unbalanced `)`"))?;
                }
                ',' | ';' if depth == 0 => {
                    push_token(&mut specs, &line[start..i])?;
                    start = i + 1;
                }
                c if c.is_whitespace() && depth == 0 => {
                    push_token(&mut specs, &line[start..i])?;
                    start = i + c.len_utf8();
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(err(line[start..].trim(), "unbalanced `(`"));
        }
        push_token(&mut specs, &line[start..])?;
    }
    Ok(specs)
}

fn push_token(out: &mut Vec<EstimatorSpec>, token: &str) -> Result<()> {
    let token = token.trim();
    if !token.is_empty() {
        out.push(token.parse()?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_every_family() {
        let list = parse_spec_list(
            "mean ratio1, product2; expratio1 expproduct2 power(a1=-1, a2=1) expfam(b1=1,b2=-1)\n\
             composite(auto;a1=1,a2=1,b1=1,b2=1) # comment\n\
             composite(w0=0.2,w1=0.3,w2=0.5;a1=1,a2=0,b1=0,b2=1)\n\
             d-ratio1 d-product2 d-expratio1 d-expproduct2 d-power(m1=1,m2=1) d-expfam(n1=1,n2=1)\n\
             d-composite(h1=0.5,h2=0.25;m1=1,m2=1,n1=1,n2=1)",
        )
        .unwrap();
        assert_eq!(list.len(), 16);
        assert_eq!(list[5], EstimatorSpec::Power { a1: -1.0, a2: 1.0 });
        assert_eq!(list[7].weights(), Some(Weights::Optimal));
        assert_eq!(list[8].weights(), Some(Weights::Fixed { w1: 0.3, w2: 0.5 }));
        assert_eq!(list[15].weights(), Some(Weights::Fixed { w1: 0.5, w2: 0.25 }));
    }

    #[test]
    fn empty_list_is_allowed() {
        assert!(parse_spec_list("").unwrap().is_empty());
        assert!(parse_spec_list("  # nothing\n").unwrap().is_empty());
    }

    #[test]
    fn errors_name_the_bad_token() {
        let e = parse_spec_list("mean ratio9").unwrap_err();
        assert!(matches!(&e, Error::SpecParse { token, .. } if token == "ratio9"), "{e}");
        let e = parse_spec_list("power(a1=1,a3=2)").unwrap_err();
        assert!(matches!(&e, Error::SpecParse { token, .. } if token == "a3=2"), "{e}");
        let e = parse_spec_list("power(a1=x,a2=2)").unwrap_err();
        assert!(matches!(&e, Error::SpecParse { token, .. } if token == "a1=x"), "{e}");
        assert!(parse_spec_list("power(a1=1").is_err());
        assert!(parse_spec_list("power(a1=1)").is_err());
        assert!(parse_spec_list("ratio1(a1=1)").is_err());
        assert!(parse_spec_list("composite(w0=1,w1=1,w2=1;a1=1,a2=1,b1=1,b2=1)").is_err());
        assert!(parse_spec_list("composite(a1=1,a2=1,b1=1,b2=1)").is_err());
    }

    fn arb_spec() -> impl Strategy<Value = EstimatorSpec> {
        let x = || -5.0f64..5.0;
        let w = prop_oneof![
            Just(Weights::Optimal),
            (x(), x()).prop_map(|(w1, w2)| Weights::Fixed { w1, w2 })
        ];
        prop_oneof![
            Just(EstimatorSpec::SampleMean),
            Just(EstimatorSpec::ExpProduct2),
            Just(EstimatorSpec::TwoPhaseProduct2),
            (x(), x()).prop_map(|(a1, a2)| EstimatorSpec::Power { a1, a2 }),
            (x(), x()).prop_map(|(n1, n2)| EstimatorSpec::TwoPhaseExpFamily { n1, n2 }),
            (w.clone(), x(), x(), x(), x())
                .prop_map(|(weights, a1, a2, b1, b2)| EstimatorSpec::Composite { weights, a1, a2, b1, b2 }),
            (w, x(), x(), x(), x())
                .prop_map(|(weights, m1, m2, n1, n2)| EstimatorSpec::TwoPhaseComposite { weights, m1, m2, n1, n2 }),
        ]
    }

    proptest! {
        #[test]
        fn display_round_trips(specs in proptest::collection::vec(arb_spec(), 0..6)) {
            let text = specs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            prop_assert_eq!(parse_spec_list(&text).unwrap(), specs);
        }
    }
}
