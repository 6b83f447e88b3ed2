//! PRE tables: one row per estimator with first-order bias, MSE and PRE
//! relative to the sample mean.

use std::fmt;

use super::{first_order_bias, first_order_mse, ledger, pre_value, resolve_weights, sample_mean_mse, tabulated_mse};
use crate::datasets::{PublishedStatus, PublishedTable};
use crate::error::Result;
use crate::estimators::{EstimatorSpec, Phase};
use crate::format::sig6;
use crate::population::Coefficients;

#[derive(Debug, Clone, Copy, Default)]
pub struct TableOptions<'a> {
    /// Use the tabulated `f3` variant for the two-phase exponential
    /// product estimator.
    pub as_tabulated: bool,
    /// Published values to attach to matching rows.
    pub published: Option<&'a PublishedTable>,
}

/// Row annotations.
#[derive(Debug, Clone, PartialEq)]
pub enum Flag {
    /// The canonical formula differs from the printed one; names a ledger entry.
    Corrected(&'static str),
    Published { mse: f64 },
    /// The published value cannot be reproduced.
    Unreconciled,
    /// Row shows the canonical value; this is the tabulated variant.
    TabulatedMse(f64),
    /// Row shows the tabulated variant; this is the canonical value.
    CanonicalMse(f64),
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flag::Corrected(id) => write!(f, "corrected={id}"),
            Flag::Published { mse } => write!(f, "published={mse}"),
            Flag::Unreconciled => write!(f, "unreconciled"),
            Flag::TabulatedMse(v) => write!(f, "tabulated_mse={v}"),
            Flag::CanonicalMse(v) => write!(f, "canonical_mse={v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    /// Spec as requested.
    pub spec: EstimatorSpec,
    /// Spec with composite weights resolved.
    pub resolved: EstimatorSpec,
    pub bias: f64,
    pub mse: f64,
    pub pre: f64,
    pub flags: Vec<Flag>,
}

impl TheoryRow {
    pub fn label(&self) -> &'static str {
        self.spec.label()
    }

    pub fn flags_string(&self) -> String {
        self.flags.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
    }

    pub fn is_unreconciled(&self) -> bool {
        self.flags.contains(&Flag::Unreconciled)
    }

    pub fn published_mse(&self) -> Option<f64> {
        self.flags.iter().find_map(|f| match f {
            Flag::Published { mse } => Some(*mse),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    /// MSE of the sample mean, the PRE baseline.
    pub baseline_mse: f64,
    pub rows: Vec<TheoryRow>,
}

pub fn theory_table(
    c: &Coefficients,
    ybar: f64,
    specs: &[EstimatorSpec],
    options: &TableOptions<'_>,
) -> Result<TheoryReport> {
    let baseline = sample_mean_mse(c, ybar);
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let resolved = resolve_weights(spec, c)?;
        let bias = first_order_bias(&resolved, c, ybar)?;
        let canonical = first_order_mse(&resolved, c, ybar)?;
        let mut flags: Vec<Flag> = ledger::corrections_for(spec).into_iter().map(Flag::Corrected).collect();
        let mut mse = canonical;
        if let Some(tab) = tabulated_mse(spec, c, ybar)? {
            if options.as_tabulated {
                mse = tab;
                flags.push(Flag::CanonicalMse(canonical));
            } else {
                flags.push(Flag::TabulatedMse(tab));
            }
        }
        if let Some(row) = options.published.and_then(|p| p.row_for(spec)) {
            flags.push(Flag::Published { mse: row.mse });
            if row.status == PublishedStatus::Unreconciled {
                flags.push(Flag::Unreconciled);
            }
        }
        rows.push(TheoryRow { spec: *spec, resolved, bias, mse, pre: pre_value(baseline, mse)?, flags });
    }
    Ok(TheoryReport { baseline_mse: baseline, rows })
}

impl TheoryReport {
    pub fn row(&self, spec: &EstimatorSpec) -> Option<&TheoryRow> {
        self.rows.iter().find(|r| r.spec == *spec)
    }

    /// `estimator,params,bias,mse,pre,flags` at full precision.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["estimator", "params", "bias", "mse", "pre", "flags"]).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.label().to_string(),
                r.resolved.to_string(),
                r.bias.to_string(),
                r.mse.to_string(),
                r.pre.to_string(),
                r.flags_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Aligned table: weights, exponents, estimator, bias, MSE, PRE, flags.
    pub fn to_text(&self) -> String {
        let two_phase = !self.rows.is_empty() && self.rows.iter().all(|r| r.spec.phase() != Some(Phase::Single));
        let header: Vec<String> = if two_phase {
            ["h0", "h1", "h2", "m1", "m2", "n1", "n2"]
        } else {
            ["w0", "w1", "w2", "a1", "a2", "b1", "b2"]
        }
        .iter()
        .map(|s| s.to_string())
        .chain(["estimator", "bias", "mse", "pre", "flags"].iter().map(|s| s.to_string()))
        .collect();
        let mut table = vec![header];
        for r in &self.rows {
            let mut cells = scalar_cells(&r.resolved);
            cells.extend([r.label().to_string(), sig6(r.bias), sig6(r.mse), sig6(r.pre), r.flags_string()]);
            table.push(cells);
        }
        render(&table)
    }
}

fn scalar_cells(spec: &EstimatorSpec) -> Vec<String> {
    use EstimatorSpec::*;
    let n = |x: f64| sig6(x);
    let blank = String::new;
    let member = spec.as_family_member();
    let (w, e): ([String; 3], [String; 4]) = match member {
        SampleMean => (["1".into(), "0".into(), "0".into()], [blank(), blank(), blank(), blank()]),
        Power { a1, a2 } | TwoPhasePower { m1: a1, m2: a2 } => {
            (["0".into(), "1".into(), "0".into()], [n(a1), n(a2), blank(), blank()])
        }
        ExpFamily { b1, b2 } | TwoPhaseExpFamily { n1: b1, n2: b2 } => {
            (["0".into(), "0".into(), "1".into()], [blank(), blank(), n(b1), n(b2)])
        }
        Composite { weights, a1, a2, b1, b2 } | TwoPhaseComposite { weights, m1: a1, m2: a2, n1: b1, n2: b2 } => {
            let w = match weights.triple() {
                Some((w0, w1, w2)) => [n(w0), n(w1), n(w2)],
                None => ["auto".into(), "auto".into(), "auto".into()],
            };
            (w, [n(a1), n(a2), n(b1), n(b2)])
        }
        _ => unreachable!("named estimators map onto families"),
    };
    w.into_iter().chain(e).collect()
}

/// Left-aligns the first column group, right-aligns numbers.
pub(crate) fn render(table: &[Vec<String>]) -> String {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| table.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in table {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, s)| if i + 1 == row.len() { s.clone() } else { format!("{s:>w$}", w = widths[i]) })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
