//! Finite populations with one real study variable and two binary
//! attributes, their summary statistics and derived coefficients.
//!
//! Variances and covariances use the `N - 1` divisor throughout. The
//! proportions `P1`, `P2` are plain means (divisor `N`).

use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used by the invariant checks in this module.
pub const INVARIANT_TOLERANCE: f64 = 1e-12;

/// One population record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub y: f64,
    pub phi1: u8,
    pub phi2: u8,
}

impl Unit {
    pub fn new(y: f64, phi1: u8, phi2: u8) -> Self {
        Self { y, phi1, phi2 }
    }
}

/// A problem found by [`validate_population`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `row` is 1-based over data rows.
    NonBinaryAttribute { row: usize, column: &'static str, value: i64 },
    TooFewUnits { units: usize },
    ConstantStudyVariable,
    DegenerateProportion { attribute: &'static str, proportion: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonBinaryAttribute { row, column, value } => {
                write!(f, "non-binary attribute: row {row}, column {column} = {value}")
            }
            Violation::TooFewUnits { units } => write!(f, "N too small: {units} unit(s), need at least 2"),
            Violation::ConstantStudyVariable => write!(f, "constant study variable: S_y = 0"),
            Violation::DegenerateProportion { attribute, proportion } => {
                write!(f, "degenerate proportion: {attribute} = {proportion}")
            }
        }
    }
}

impl Violation {
    /// Violations that make the records unusable as a population at all,
    /// as opposed to ones that only make correlations undefined.
    pub fn is_structural(&self) -> bool {
        matches!(self, Violation::NonBinaryAttribute { .. } | Violation::TooFewUnits { .. })
    }
}

/// Lists everything wrong with a set of records. Never fails.
pub fn validate_population(units: &[Unit]) -> Vec<Violation> {
    let mut out = Vec::new();
    if units.len() < 2 {
        out.push(Violation::TooFewUnits { units: units.len() });
    }
    for (i, u) in units.iter().enumerate() {
        if u.phi1 > 1 {
            out.push(Violation::NonBinaryAttribute { row: i + 1, column: "phi1", value: u.phi1 as i64 });
        }
        if u.phi2 > 1 {
            out.push(Violation::NonBinaryAttribute { row: i + 1, column: "phi2", value: u.phi2 as i64 });
        }
    }
    if let Some(first) = units.first() {
        if units.iter().all(|u| u.y == first.y) {
            out.push(Violation::ConstantStudyVariable);
        }
        let n = units.len() as f64;
        for (attribute, ones) in [
            ("P1", units.iter().filter(|u| u.phi1 == 1).count()),
            ("P2", units.iter().filter(|u| u.phi2 == 1).count()),
        ] {
            if ones == 0 || ones == units.len() {
                out.push(Violation::DegenerateProportion { attribute, proportion: ones as f64 / n });
            }
        }
    }
    out
}

/// A validated population: at least two units, attributes exactly 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePopulation {
    units: Vec<Unit>,
}

impl FinitePopulation {
    pub fn new(units: Vec<Unit>) -> Result<Self> {
        let structural: Vec<_> = validate_population(&units).into_iter().filter(Violation::is_structural).collect();
        if !structural.is_empty() {
            return Err(Error::InvalidPopulation(structural));
        }
        Ok(Self { units })
    }

    pub fn from_columns(y: &[f64], phi1: &[u8], phi2: &[u8]) -> Result<Self> {
        if y.len() != phi1.len() || y.len() != phi2.len() {
            return Err(Error::Parse(format!(
                "column lengths differ: y={}, phi1={}, phi2={}",
                y.len(),
                phi1.len(),
                phi2.len()
            )));
        }
        Self::new(y.iter().zip(phi1).zip(phi2).map(|((&y, &a), &b)| Unit::new(y, a, b)).collect())
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn mean_y(&self) -> f64 {
        self.units.iter().map(|u| u.y).sum::<f64>() / self.len() as f64
    }
}

/// Where a [`PopulationSummary`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummarySource {
    /// Computed from unit records; keeps the attribute counts so that
    /// `P_j = ones_j / N` is available as an exact ratio.
    Raw { ones1: usize, ones2: usize },
    /// Entered directly. No raw population is available, so enumeration
    /// and simulation are disabled for the dataset.
    Entered,
}

/// Population parameters consumed by the theory.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSummary {
    pub population_size: usize,
    pub mean_y: f64,
    pub p1: f64,
    pub p2: f64,
    pub var_y: f64,
    pub var_phi1: f64,
    pub var_phi2: f64,
    pub rho_pb1: f64,
    pub rho_pb2: f64,
    pub rho_phi: f64,
    pub source: SummarySource,
}

impl PopulationSummary {
    /// Builds an entered (summary-only) parameter set.
    #[allow(clippy::too_many_arguments)]
    pub fn entered(
        population_size: usize,
        mean_y: f64,
        p1: f64,
        p2: f64,
        var_y: f64,
        var_phi1: f64,
        var_phi2: f64,
        rho_pb1: f64,
        rho_pb2: f64,
        rho_phi: f64,
    ) -> Result<Self> {
        let s = Self {
            population_size,
            mean_y,
            p1,
            p2,
            var_y,
            var_phi1,
            var_phi2,
            rho_pb1,
            rho_pb2,
            rho_phi,
            source: SummarySource::Entered,
        };
        s.check()?;
        Ok(s)
    }

    pub fn has_raw_population(&self) -> bool {
        matches!(self.source, SummarySource::Raw { .. })
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSummary(m));
        if self.population_size < 2 {
            return bad(format!("N = {} must be at least 2", self.population_size));
        }
        let all = [
            ("mean_y", self.mean_y),
            ("P1", self.p1),
            ("P2", self.p2),
            ("var_y", self.var_y),
            ("var_phi1", self.var_phi1),
            ("var_phi2", self.var_phi2),
            ("rho_pb1", self.rho_pb1),
            ("rho_pb2", self.rho_pb2),
            ("rho_phi", self.rho_phi),
        ];
        if let Some((k, v)) = all.iter().find(|(_, v)| !v.is_finite()) {
            return bad(format!("{k} = {v} is not finite"));
        }
        for (k, p) in [("P1", self.p1), ("P2", self.p2)] {
            if p <= 0.0 || p >= 1.0 {
                return bad(format!("{k} = {p} must lie strictly between 0 and 1"));
            }
        }
        for (k, v) in [("var_y", self.var_y), ("var_phi1", self.var_phi1), ("var_phi2", self.var_phi2)] {
            if v < 0.0 {
                return bad(format!("{k} = {v} is negative"));
            }
        }
        for (k, r) in [("rho_pb1", self.rho_pb1), ("rho_pb2", self.rho_pb2), ("rho_phi", self.rho_phi)] {
            if r.abs() > 1.0 + INVARIANT_TOLERANCE {
                return bad(format!("{k} = {r} lies outside [-1, 1]"));
            }
        }
        Ok(())
    }

    /// `N P (1 - P) / (N - 1)`, the variance a binary attribute with
    /// proportion `p` must have.
    pub fn binary_variance(&self, p: f64) -> f64 {
        let n = self.population_size as f64;
        n * p * (1.0 - p) / (n - 1.0)
    }

    /// Whether the attribute variances agree with their proportions to
    /// the module tolerance. Always true for summaries built from raw data.
    pub fn binary_variances_consistent(&self) -> bool {
        [(self.p1, self.var_phi1), (self.p2, self.var_phi2)]
            .iter()
            .all(|&(p, v)| rel_close(self.binary_variance(p), v, INVARIANT_TOLERANCE))
    }
}

pub(crate) fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Population size `N`, sample size `n` and, for two-phase designs, the
/// first-phase size `n'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingDesign {
    pub population_size: usize,
    pub n: usize,
    pub n_prime: Option<usize>,
}

impl SamplingDesign {
    pub fn single(population_size: usize, n: usize) -> Result<Self> {
        Self::new(population_size, n, None)
    }

    pub fn two_phase(population_size: usize, n_prime: usize, n: usize) -> Result<Self> {
        Self::new(population_size, n, Some(n_prime))
    }

    pub fn new(population_size: usize, n: usize, n_prime: Option<usize>) -> Result<Self> {
        if n < 2 || n > population_size {
            return Err(Error::InvalidDesign(format!("need 2 <= n <= N, got n = {n}, N = {population_size}")));
        }
        if let Some(np) = n_prime {
            if np <= n || np > population_size {
                return Err(Error::InvalidDesign(format!(
                    "need n < n' <= N, got n = {n}, n' = {np}, N = {population_size}"
                )));
            }
        }
        Ok(Self { population_size, n, n_prime })
    }

    pub fn is_two_phase(&self) -> bool {
        self.n_prime.is_some()
    }
}

/// Finite-population correction `1/a - 1/b` for `a <= b`, as one rounding.
fn fpc(a: usize, b: usize) -> f64 {
    (b - a) as f64 / (a as f64 * b as f64)
}

/// Coefficients of variation, regression-type ratios and
/// finite-population factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub c_y: f64,
    pub c_p1: f64,
    pub c_p2: f64,
    pub k_pb1: f64,
    pub k_pb2: f64,
    pub k_phi: f64,
    /// `1/n - 1/N`
    pub f1: f64,
    /// `1/n' - 1/N`, two-phase only
    pub f2: Option<f64>,
    /// `1/n - 1/n'`, two-phase only
    pub f3: Option<f64>,
}

impl Coefficients {
    pub fn cy2(&self) -> f64 {
        self.c_y * self.c_y
    }

    pub fn cp1_2(&self) -> f64 {
        self.c_p1 * self.c_p1
    }

    pub fn cp2_2(&self) -> f64 {
        self.c_p2 * self.c_p2
    }

    pub fn two_phase_factors(&self) -> Option<(f64, f64)> {
        self.f2.zip(self.f3)
    }
}

/// Computes the population parameters from unit records.
pub fn summarize_population(pop: &FinitePopulation) -> Result<PopulationSummary> {
    let units = pop.units();
    let n = units.len();
    let nf = n as f64;
    let ones1 = units.iter().filter(|u| u.phi1 == 1).count();
    let ones2 = units.iter().filter(|u| u.phi2 == 1).count();
    let p1 = ones1 as f64 / nf;
    let p2 = ones2 as f64 / nf;
    let mean_y = pop.mean_y();

    let (mut syy, mut s11, mut s22, mut sy1, mut sy2, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for u in units {
        let dy = u.y - mean_y;
        let d1 = f64::from(u.phi1) - p1;
        let d2 = f64::from(u.phi2) - p2;
        syy += dy * dy;
        s11 += d1 * d1;
        s22 += d2 * d2;
        sy1 += dy * d1;
        sy2 += dy * d2;
        s12 += d1 * d2;
    }
    let div = nf - 1.0;
    let (var_y, var_phi1, var_phi2) = (syy / div, s11 / div, s22 / div);

    if var_y == 0.0 {
        return Err(Error::DegeneratePopulation("S_y = 0 (constant study variable)".into()));
    }
    for (k, ones) in [("P1", ones1), ("P2", ones2)] {
        if ones == 0 || ones == n {
            return Err(Error::DegeneratePopulation(format!("{k} = {}", ones as f64 / nf)));
        }
    }
    let corr = |sxy: f64, sxx: f64, syy: f64| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(PopulationSummary {
        population_size: n,
        mean_y,
        p1,
        p2,
        var_y,
        var_phi1,
        var_phi2,
        rho_pb1: corr(sy1, syy, s11),
        rho_pb2: corr(sy2, syy, s22),
        rho_phi: corr(s12, s11, s22),
        source: SummarySource::Raw { ones1, ones2 },
    })
}

/// Derives `C`, `K` and `f` from a summary and a design.
pub fn derived_coefficients(summary: &PopulationSummary, design: &SamplingDesign) -> Result<Coefficients> {
    if design.population_size != summary.population_size {
        return Err(Error::InvalidDesign(format!(
            "design N = {} does not match population N = {}",
            design.population_size, summary.population_size
        )));
    }
    // re-run the constructor checks; the fields are public
    SamplingDesign::new(design.population_size, design.n, design.n_prime)?;
    summary.check()?;
    if summary.mean_y == 0.0 {
        return Err(Error::ZeroMean);
    }
    let c_y = summary.var_y.sqrt() / summary.mean_y;
    let c_p1 = summary.var_phi1.sqrt() / summary.p1;
    let c_p2 = summary.var_phi2.sqrt() / summary.p2;
    if c_p1 == 0.0 || c_p2 == 0.0 {
        return Err(Error::DegeneratePopulation("an attribute has zero variance".into()));
    }
    let big_n = design.population_size;
    Ok(Coefficients {
        c_y,
        c_p1,
        c_p2,
        k_pb1: summary.rho_pb1 * c_y / c_p1,
        k_pb2: summary.rho_pb2 * c_y / c_p2,
        k_phi: summary.rho_phi * c_p1 / c_p2,
        f1: fpc(design.n, big_n),
        f2: design.n_prime.map(|np| fpc(np, big_n)),
        f3: design.n_prime.map(|np| fpc(design.n, np)),
    })
}
