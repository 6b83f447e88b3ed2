use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::population::{FinitePopulation, SamplingDesign};

use super::draw::{draw_srswor, draw_two_phase, replicate_seed};
use super::evaluate::{Evaluator, SampleOutcome, Tally};
use super::report::{Method, SimulationReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationPlan {
    pub replicates: u64,
    pub design: SamplingDesign,
    pub specs: Vec<EstimatorSpec>,
    pub seed: u64,
}

/// Replicates evaluated in parallel per block, then folded in index order.
const BLOCK: u64 = 8192;

fn replicate(eval: &Evaluator, master: u64, r: u64) -> SampleOutcome {
    let d = eval.design();
    let seed = replicate_seed(master, r);
    let draw = match d.n_prime {
        Some(np) => draw_two_phase(d.population_size, np, d.n, seed),
        None => draw_srswor(d.population_size, d.n, seed),
    }
    .expect("design validated");
    eval.evaluate(&draw.second, draw.first.as_deref())
}

/// Monte Carlo over `plan.replicates` independent draws. Replicate `r`
/// draws with seed `replicate_seed(plan.seed, r)`, and results are reduced
/// in replicate order, so the report does not depend on the thread count.
pub fn run_monte_carlo(pop: &FinitePopulation, plan: &ReplicationPlan) -> Result<SimulationReport> {
    if plan.replicates == 0 {
        return Err(Error::InvalidDesign("replicate count must be at least 1".into()));
    }
    let eval = Evaluator::new(pop, &plan.design, &plan.specs)?;
    let mut tally = Tally::new(&eval);
    let mut start = 0;
    while start < plan.replicates {
        let end = (start + BLOCK).min(plan.replicates);
        let block: Vec<SampleOutcome> = (start..end).into_par_iter().map(|r| replicate(&eval, plan.seed, r)).collect();
        for outcome in &block {
            tally.push(outcome);
        }
        start = end;
    }
    tally.finish(Method::MonteCarlo { seed: plan.seed })
}
