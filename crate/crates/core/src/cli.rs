//! The `attrmean` command line.
//!
//! Exit codes: 0 success, 1 usage, parse or I/O error, 2 validation or
//! domain error (including a failed `--tolerance` check), 3 enumeration
//! above the cap.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datasets::{self, PublishedTable};
use crate::error::Error;
use crate::estimators::{parse_spec_list, EstimatorSpec};
use crate::format::sig6;
use crate::io::{read_population_csv, read_summary, write_population_csv};
use crate::population::{derived_coefficients, summarize_population, Coefficients, FinitePopulation, PopulationSummary, SamplingDesign, SummarySource};
use crate::simulation::{compare_theory_empirical, enumerate_exact, generate_population, run_monte_carlo, GeneratorSpec, ReplicationPlan};
use crate::theory::ledger::{corrections, ledger_csv, ledger_text};
use crate::theory::{theory_table, TableOptions};

/// Estimators for the single-phase default table.
pub const SINGLE_PHASE_DEFAULT_SPECS: &str = "mean ratio1 product2 power(a1=-1,a2=1) expratio1 expproduct2 \
                                               expfam(b1=1,b2=-1) composite(auto;a1=1,a2=1,b1=1,b2=1)";
/// Estimators for the two-phase default table.
pub const TWO_PHASE_DEFAULT_SPECS: &str = "mean d-ratio1 d-product2 d-power(m1=1,m2=1) d-expratio1 d-expproduct2 \
                                            d-expfam(n1=1,n2=1) d-composite(auto;m1=1,m2=1,n1=1,n2=1)";

#[derive(Parser, Debug)]
#[command(name = "attrmean", version, about = "Attribute-assisted estimators of a finite-population mean")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print population parameters and derived coefficients.
    Summarize {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// First-order bias, MSE and PRE for a list of estimators.
    Table {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        design: DesignArgs,
        /// Estimator list, or a file containing one.
        #[arg(long)]
        specs: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Report the two-phase exponential product estimator under the
        /// tabulated f3 convention.
        #[arg(long)]
        as_tabulated: bool,
    },
    /// Monte Carlo or exact enumeration against first-order theory.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        specs: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 10_000)]
        replicates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate every sample instead of drawing replicates.
        #[arg(long)]
        exact: bool,
        /// Fail (exit 2) when any |relative MSE gap| exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write the population used to this path as CSV.
        #[arg(long)]
        export_population: Option<PathBuf>,
        /// Worker threads; defaults to all available.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the corrections ledger.
    Ledger {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Population CSV with header y,phi1,phi2.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Summary file (key = value).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Bundled dataset.
    #[arg(long, value_parser = ["rice", "wheat"])]
    dataset: Option<String>,
    /// Synthetic population, e.g. `N=1000,p00=0.4,p01=0.1,p10=0.1,p11=0.4,a=50,b1=10,b2=6,sigma=8,seed=1`.
    #[arg(long)]
    generate: Option<String>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "nprime")]
    n_prime: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
}

/// Failure with its exit code; the message goes to stderr.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::SpecParse { .. } | Error::Io { .. } => 1,
            Error::EnumerationTooLarge { .. } => 3,
            _ => 2,
        };
        let mut message = e.to_string();
        if code == 3 {
            message.push_str("; drop --exact to use Monte Carlo instead");
        }
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(|e| usage(format!("writing output: {e}")))?;
    Ok(0)
}

/// A loaded input source.
struct Loaded {
    summary: PopulationSummary,
    population: Option<FinitePopulation>,
    default_n: Option<usize>,
    default_n_prime: Option<usize>,
    published: Option<(PublishedTable, SamplingDesign)>,
}

fn load(input: &InputArgs) -> std::result::Result<Loaded, Failure> {
    if let Some(path) = &input.input {
        let pop = read_population_csv(path)?;
        return Ok(Loaded { summary: summarize_population(&pop)?, population: Some(pop), default_n: None, default_n_prime: None, published: None });
    }
    if let Some(g) = &input.generate {
        let spec: GeneratorSpec = g.parse()?;
        let pop = generate_population(&spec)?;
        return Ok(Loaded { summary: summarize_population(&pop)?, population: Some(pop), default_n: None, default_n_prime: None, published: None });
    }
    if let Some(path) = &input.summary {
        let f = read_summary(path)?;
        let published = f.reference.as_deref().map(datasets::by_name_or_err).transpose()?;
        return Ok(Loaded {
            summary: f.summary,
            population: None,
            default_n: f.n,
            default_n_prime: f.n_prime,
            published: published.map(|d| (d.published, d.design)),
        });
    }
    let name = input.dataset.as_deref().expect("clap enforces one input");
    let d = datasets::by_name(name).expect("clap restricts dataset names");
    Ok(Loaded {
        summary: d.summary,
        population: None,
        default_n: Some(d.design.n),
        default_n_prime: d.design.n_prime,
        published: Some((d.published, d.design)),
    })
}

impl Loaded {
    fn design(&self, args: &DesignArgs) -> std::result::Result<Option<SamplingDesign>, Failure> {
        let n = args.n.or(self.default_n);
        let n_prime = if args.n.is_some() && args.n_prime.is_none() { None } else { args.n_prime.or(self.default_n_prime) };
        match n {
            None if n_prime.is_some() => Err(usage("--nprime needs --n")),
            None => Ok(None),
            Some(n) => Ok(Some(SamplingDesign::new(self.summary.population_size, n, n_prime)?)),
        }
    }

    fn require_design(&self, args: &DesignArgs) -> std::result::Result<SamplingDesign, Failure> {
        self.design(args)?.ok_or_else(|| usage("a sample size is required: pass --n (and --nprime for two-phase designs)"))
    }

    /// The bundled published table, when the design is the bundled one.
    fn published_for(&self, design: &SamplingDesign) -> Option<&PublishedTable> {
        self.published.as_ref().filter(|(_, d)| d == design).map(|(t, _)| t)
    }
}

fn specs_for(arg: Option<&str>, design: &SamplingDesign) -> std::result::Result<Vec<EstimatorSpec>, Failure> {
    let text = match arg {
        None => (if design.is_two_phase() { TWO_PHASE_DEFAULT_SPECS } else { SINGLE_PHASE_DEFAULT_SPECS }).to_string(),
        Some(s) if Path::new(s).is_file() => {
            fs::read_to_string(s).map_err(|e| Failure::from(Error::Io { path: s.into(), message: e.to_string() }))?
        }
        Some(s) => s.to_string(),
    };
    Ok(parse_spec_list(&text)?)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Summarize { input, design, format } => {
            let loaded = load(&input)?;
            let design = loaded.design(&design)?;
            let coefficients = design.map(|d| derived_coefficients(&loaded.summary, &d)).transpose()?;
            emit(out, &summary_output(&loaded.summary, coefficients.as_ref(), format))
        }
        Command::Table { input, design, specs, format, as_tabulated } => {
            let loaded = load(&input)?;
            let design = loaded.require_design(&design)?;
            let specs = specs_for(specs.as_deref(), &design)?;
            let c = derived_coefficients(&loaded.summary, &design)?;
            let opts = TableOptions { as_tabulated, published: loaded.published_for(&design) };
            let report = theory_table(&c, loaded.summary.mean_y, &specs, &opts)?;
            emit(out, &if format == Format::Csv { report.to_csv() } else { report.to_text() })
        }
        Command::Simulate { input, design, specs, format, replicates, seed, exact, tolerance, export_population, threads } => {
            let loaded = load(&input)?;
            let Some(pop) = &loaded.population else {
                return Err(Failure { code: 2, message: "raw population required: simulate needs --input or --generate, not summary statistics".into() });
            };
            let design = loaded.require_design(&design)?;
            let specs = specs_for(specs.as_deref(), &design)?;
            if let Some(path) = &export_population {
                let file = fs::File::create(path).map_err(|e| Failure::from(Error::Io { path: path.display().to_string(), message: e.to_string() }))?;
                write_population_csv(pop, std::io::BufWriter::new(file))?;
            }
            let job = || {
                if exact {
                    enumerate_exact(pop, &design, &specs)
                } else {
                    run_monte_carlo(pop, &ReplicationPlan { replicates, design, specs: specs.clone(), seed })
                }
            };
            let report = match threads {
                Some(k) => rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| usage(format!("thread pool: {e}")))?
                    .install(job),
                None => job(),
            }?;
            let pass = match tolerance {
                Some(tol) => {
                    let c = derived_coefficients(&loaded.summary, &design)?;
                    let theory = theory_table(&c, loaded.summary.mean_y, &specs, &TableOptions::default())?;
                    Some(compare_theory_empirical(&report, &theory, tol)?.iter().map(|r| r.pass).collect::<Vec<_>>())
                }
                None => None,
            };
            let text = if format == Format::Csv { report.to_csv(pass.as_deref()) } else { report.to_text(pass.as_deref()) };
            emit(out, &text)?;
            Ok(if pass.is_some_and(|p| p.iter().any(|ok| !ok)) { 2 } else { 0 })
        }
        Command::Ledger { format } => {
            let entries = corrections();
            emit(out, &if format == Format::Csv { ledger_csv(&entries) } else { ledger_text(&entries) })
        }
    }
}

fn summary_output(s: &PopulationSummary, c: Option<&Coefficients>, format: Format) -> String {
    let source = match s.source {
        SummarySource::Raw { .. } => "raw population".to_string(),
        SummarySource::Entered => "entered summary (no raw population available)".to_string(),
    };
    let mut rows: Vec<(&str, String, f64)> = vec![
        ("N", s.population_size.to_string(), s.population_size as f64),
        ("mean_y", String::new(), s.mean_y),
        ("P1", String::new(), s.p1),
        ("P2", String::new(), s.p2),
        ("var_y", String::new(), s.var_y),
        ("var_phi1", String::new(), s.var_phi1),
        ("var_phi2", String::new(), s.var_phi2),
        ("rho_pb1", String::new(), s.rho_pb1),
        ("rho_pb2", String::new(), s.rho_pb2),
        ("rho_phi", String::new(), s.rho_phi),
    ];
    if let Some(c) = c {
        rows.extend([
            ("C_y", String::new(), c.c_y),
            ("C_p1", String::new(), c.c_p1),
            ("C_p2", String::new(), c.c_p2),
            ("K_pb1", String::new(), c.k_pb1),
            ("K_pb2", String::new(), c.k_pb2),
            ("K_phi", String::new(), c.k_phi),
            ("f1", String::new(), c.f1),
        ]);
        if let Some((f2, f3)) = c.two_phase_factors() {
            rows.extend([("f2", String::new(), f2), ("f3", String::new(), f3)]);
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, fixed, v) in &rows {
                w.write_record([*k, &if fixed.is_empty() { v.to_string() } else { fixed.clone() }]).expect("in-memory write");
            }
            w.write_record(["source", &source]).expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        Format::Text => {
            let mut table: Vec<Vec<String>> = rows
                .into_iter()
                .map(|(k, fixed, v)| vec![k.to_string(), if fixed.is_empty() { sig6(v) } else { fixed }])
                .collect();
            table.push(vec!["source".into(), source]);
            if c.is_none() {
                table.push(vec!["note".into(), "pass --n (and --nprime) for C, K and f".into()]);
            }
            crate::theory::report::render(&table)
        }
    }
}
