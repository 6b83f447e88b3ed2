use crate::estimators::EstimatorSpec;
use crate::format::sig6;
use crate::population::{Coefficients, PopulationSummary, SamplingDesign};
use crate::theory::report::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo { seed: u64 },
    /// Every equally likely sample visited once.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutcome {
    pub spec: EstimatorSpec,
    /// `spec` with composite weights resolved from the population.
    pub resolved: EstimatorSpec,
    pub successes: u64,
    /// Samples on which the estimator was undefined; excluded from the
    /// empirical moments.
    pub failures: u64,
    pub emp_mean: f64,
    pub emp_bias: f64,
    /// Mean squared deviation from the population mean.
    pub emp_mse: f64,
    pub theory_bias: f64,
    pub theory_mse: f64,
}

impl EstimatorOutcome {
    /// `(emp_mse - theory_mse) / theory_mse`
    pub fn rel_gap(&self) -> f64 {
        (self.emp_mse - self.theory_mse) / self.theory_mse
    }

    pub fn emp_variance(&self) -> f64 {
        self.emp_mse - self.emp_bias * self.emp_bias
    }
}

/// Empirical means of the sample statistics themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryMeans {
    pub ybar: f64,
    pub p1: f64,
    pub p2: f64,
    pub p1_prime: Option<f64>,
    pub p2_prime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub method: Method,
    pub design: SamplingDesign,
    /// Replicates drawn, or samples enumerated.
    pub replicates: u64,
    /// Realized population, the ground truth.
    pub summary: PopulationSummary,
    pub coefficients: Coefficients,
    pub rows: Vec<EstimatorOutcome>,
    pub auxiliary: AuxiliaryMeans,
}

pub const CSV_HEADER: [&str; 8] = ["estimator", "R", "failures", "emp_bias", "emp_mse", "theory_bias", "theory_mse", "rel_gap"];

impl SimulationReport {
    pub fn row(&self, spec: &EstimatorSpec) -> Option<&EstimatorOutcome> {
        self.rows.iter().find(|r| r.spec == *spec)
    }

    /// Full-precision CSV. `pass`, when given, adds a trailing `pass`
    /// column with one entry per row.
    pub fn to_csv(&self, pass: Option<&[bool]>) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if pass.is_some() {
            header.push("pass");
        }
        w.write_record(&header).expect("in-memory write");
        for (i, r) in self.rows.iter().enumerate() {
            let mut rec = vec![
                r.spec.to_string(),
                self.replicates.to_string(),
                r.failures.to_string(),
                r.emp_bias.to_string(),
                r.emp_mse.to_string(),
                r.theory_bias.to_string(),
                r.theory_mse.to_string(),
                r.rel_gap().to_string(),
            ];
            if let Some(p) = pass {
                rec.push(p[i].to_string());
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_text(&self, pass: Option<&[bool]>) -> String {
        let method = match self.method {
            Method::MonteCarlo { seed } => format!("monte carlo, R = {}, seed = {seed}", self.replicates),
            Method::Exact => format!("exact enumeration over {} samples", self.replicates),
        };
        let design = match self.design.n_prime {
            Some(np) => format!("N = {}, n' = {np}, n = {}", self.design.population_size, self.design.n),
            None => format!("N = {}, n = {}", self.design.population_size, self.design.n),
        };
        let mut table = vec![["estimator", "spec", "failures", "emp_bias", "emp_mse", "theory_bias", "theory_mse", "rel_gap"]
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()];
        if pass.is_some() {
            table[0].push("pass".into());
        }
        for (i, r) in self.rows.iter().enumerate() {
            let mut cells = vec![
                r.spec.label().to_string(),
                r.spec.to_string(),
                r.failures.to_string(),
                sig6(r.emp_bias),
                sig6(r.emp_mse),
                sig6(r.theory_bias),
                sig6(r.theory_mse),
                sig6(r.rel_gap()),
            ];
            if let Some(p) = pass {
                cells.push(if p[i] { "yes" } else { "NO" }.into());
            }
            table.push(cells);
        }
        format!("# {method}; {design}; Ybar = {}\n{}", sig6(self.summary.mean_y), render(&table))
    }
}
