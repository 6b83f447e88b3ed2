//! Shared per-sample evaluation and the order-preserving reduction used by
//! both Monte Carlo and exact enumeration.

use crate::error::{Error, Result};
use crate::estimators::{point_estimate, two_phase_estimate, EstimatorSpec, KnownTruth, Phase, SampleData, TwoPhaseSampleData};
use crate::population::{derived_coefficients, summarize_population, Coefficients, FinitePopulation, PopulationSummary, SamplingDesign};
use crate::theory::{first_order_bias, first_order_mse, resolve_weights};

use super::report::{AuxiliaryMeans, EstimatorOutcome, Method, SimulationReport};

/// Statistics of one drawn sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SampleStats {
    pub ybar: f64,
    pub p1: f64,
    pub p2: f64,
    pub p1_prime: f64,
    pub p2_prime: f64,
}

/// One sample's outcome: its statistics and each estimator's value, `None`
/// where the estimator is undefined.
pub(crate) type SampleOutcome = (SampleStats, Vec<Option<f64>>);

pub(crate) struct Evaluator {
    y: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    truth: KnownTruth,
    design: SamplingDesign,
    requested: Vec<EstimatorSpec>,
    resolved: Vec<EstimatorSpec>,
    theory: Vec<(f64, f64)>,
    summary: PopulationSummary,
    coefficients: Coefficients,
}

impl Evaluator {
    pub fn new(pop: &FinitePopulation, design: &SamplingDesign, specs: &[EstimatorSpec]) -> Result<Self> {
        if design.population_size != pop.len() {
            return Err(Error::InvalidDesign(format!(
                "design is for N = {}, population has {} units",
                design.population_size,
                pop.len()
            )));
        }
        let summary = summarize_population(pop)?;
        let coefficients = derived_coefficients(&summary, design)?;
        let resolved = specs.iter().map(|s| resolve_weights(s, &coefficients)).collect::<Result<Vec<_>>>()?;
        let theory = resolved
            .iter()
            .map(|s| {
                Ok((first_order_bias(s, &coefficients, summary.mean_y)?, first_order_mse(s, &coefficients, summary.mean_y)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let units = pop.units();
        Ok(Self {
            y: units.iter().map(|u| u.y).collect(),
            phi1: units.iter().map(|u| f64::from(u.phi1)).collect(),
            phi2: units.iter().map(|u| f64::from(u.phi2)).collect(),
            truth: KnownTruth::new(summary.p1, summary.p2)?,
            design: *design,
            requested: specs.to_vec(),
            resolved,
            theory,
            summary,
            coefficients,
        })
    }

    pub fn design(&self) -> &SamplingDesign {
        &self.design
    }

    pub fn width(&self) -> usize {
        self.resolved.len()
    }

    fn mean(column: &[f64], idx: &[usize]) -> f64 {
        idx.iter().map(|&i| column[i]).sum::<f64>() / idx.len() as f64
    }

    pub fn evaluate(&self, second: &[usize], first: Option<&[usize]>) -> SampleOutcome {
        let (p1_prime, p2_prime) = match first {
            Some(f) => (Self::mean(&self.phi1, f), Self::mean(&self.phi2, f)),
            None => (f64::NAN, f64::NAN),
        };
        let stats = SampleStats {
            ybar: Self::mean(&self.y, second),
            p1: Self::mean(&self.phi1, second),
            p2: Self::mean(&self.phi2, second),
            p1_prime,
            p2_prime,
        };
        let single = SampleData { mean_y: stats.ybar, p1: stats.p1, p2: stats.p2 };
        let double = TwoPhaseSampleData { mean_y: stats.ybar, p1: stats.p1, p1_prime, p2_prime };
        let values = self
            .resolved
            .iter()
            .map(|spec| {
                let v = match spec.phase() {
                    Some(Phase::Two) => two_phase_estimate(spec, &double, &self.truth),
                    _ => point_estimate(spec, &single, &self.truth),
                };
                v.ok().filter(|v| v.is_finite())
            })
            .collect();
        (stats, values)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    dev: Sum,
    dev2: Sum,
}

/// Accumulates sample outcomes in the order they are pushed.
pub(crate) struct Tally<'a> {
    eval: &'a Evaluator,
    samples: u64,
    per_spec: Vec<Moments>,
    aux: [Sum; 5],
}

impl<'a> Tally<'a> {
    pub fn new(eval: &'a Evaluator) -> Self {
        Self { eval, samples: 0, per_spec: vec![Moments::default(); eval.width()], aux: [Sum::default(); 5] }
    }

    pub fn push(&mut self, (stats, values): &SampleOutcome) {
        self.samples += 1;
        let truth = self.eval.summary.mean_y;
        for (m, v) in self.per_spec.iter_mut().zip(values) {
            if let Some(v) = v {
                let d = v - truth;
                m.count += 1;
                m.dev.add(d);
                m.dev2.add(d * d);
            }
        }
        for (acc, x) in self.aux.iter_mut().zip([stats.ybar, stats.p1, stats.p2, stats.p1_prime, stats.p2_prime]) {
            acc.add(x);
        }
    }

    pub fn finish(self, method: Method) -> Result<SimulationReport> {
        let e = self.eval;
        let truth = e.summary.mean_y;
        let mut rows = Vec::with_capacity(e.width());
        for (i, m) in self.per_spec.iter().enumerate() {
            if m.count == 0 {
                return Err(Error::AllReplicatesFailed(e.requested[i].to_string()));
            }
            let k = m.count as f64;
            let bias = m.dev.value() / k;
            let var = (m.dev2.value() / k - bias * bias).max(0.0);
            let (theory_bias, theory_mse) = e.theory[i];
            rows.push(EstimatorOutcome {
                spec: e.requested[i],
                resolved: e.resolved[i],
                successes: m.count,
                failures: self.samples - m.count,
                emp_mean: truth + bias,
                emp_bias: bias,
                emp_mse: var + bias * bias,
                theory_bias,
                theory_mse,
            });
        }
        let n = self.samples as f64;
        let mean = |k: usize| self.aux[k].value() / n;
        let two_phase = e.design.is_two_phase();
        Ok(SimulationReport {
            method,
            design: e.design,
            replicates: self.samples,
            summary: e.summary.clone(),
            coefficients: e.coefficients,
            rows,
            auxiliary: AuxiliaryMeans {
                ybar: mean(0),
                p1: mean(1),
                p2: mean(2),
                p1_prime: two_phase.then(|| mean(3)),
                p2_prime: two_phase.then(|| mean(4)),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum() {
        let mut s = Sum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
