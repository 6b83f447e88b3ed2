//! C ABI for `attrmean`.
//!
//! Every fallible function returns an [`AmStatus`]; on failure a message is
//! available from [`am_last_error_message`] on the same thread. Handles are
//! opaque and owned by the caller, who releases them with the matching
//! `_free` function. Strings returned through `char **out` are released
//! with [`am_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use attrmean::estimators::{parse_spec_list, point_estimate, two_phase_estimate};
use attrmean::simulation::{enumerate_exact, generate_population, run_monte_carlo, GeneratorSpec, ReplicationPlan};
use attrmean::theory::ledger::{corrections, ledger_csv};
use attrmean::theory::{a_terms, b_terms, first_order_bias, first_order_mse, optimal_weights_double, optimal_weights_single, theory_table, TableOptions};
use attrmean::{
    datasets, derived_coefficients, io, summarize_population, Coefficients, Error, EstimatorSpec, FinitePopulation, KnownTruth,
    PopulationSummary, SampleData, SamplingDesign, TwoPhaseSampleData,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmStatus {
    Ok = 0,
    NullPointer = 1,
    /// Not UTF-8, or malformed text input.
    Parse = 2,
    /// Input parsed but failed validation, or the computation is undefined.
    Domain = 3,
    /// Exact enumeration above the sample cap.
    EnumerationTooLarge = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Sample sizes; `n_prime = 0` means a single-phase design. The
/// population size comes from the summary or population handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmDesign {
    pub n: usize,
    pub n_prime: usize,
}

/// Population parameters.
pub struct AmSummary {
    inner: PopulationSummary,
}

/// Raw unit records.
pub struct AmPopulation {
    inner: FinitePopulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(AmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::SpecParse { .. } | Error::Io { .. } => AmStatus::Parse,
            Error::EnumerationTooLarge { .. } => AmStatus::EnumerationTooLarge,
            _ => AmStatus::Domain,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            AmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(AmStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(AmStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(AmStatus::Domain, "output contains a NUL byte".into()))?;
    write_out(out, c.into_raw(), "out")
}

fn design_for(size: usize, d: AmDesign) -> Result<SamplingDesign, Fail> {
    Ok(SamplingDesign::new(size, d.n, (d.n_prime != 0).then_some(d.n_prime))?)
}

fn coefficients(s: &AmSummary, d: AmDesign) -> Result<Coefficients, Fail> {
    Ok(derived_coefficients(&s.inner, &design_for(s.inner.population_size, d)?)?)
}

fn one_spec(text: &str) -> Result<EstimatorSpec, Fail> {
    let mut specs = parse_spec_list(text)?;
    if specs.len() != 1 {
        return Err(Fail(AmStatus::Parse, format!("expected one estimator spec, got {}", specs.len())));
    }
    Ok(specs.remove(0))
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn am_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn am_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn am_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Summary from entered parameters.
#[no_mangle]
pub unsafe extern "C" fn am_summary_new(
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
    out: *mut *mut AmSummary,
) -> AmStatus {
    guard(|| {
        let inner =
            PopulationSummary::entered(population_size, mean_y, p1, p2, var_y, var_phi1, var_phi2, rho_pb1, rho_pb2, rho_phi)?;
        write_out(out, Box::into_raw(Box::new(AmSummary { inner })), "out")
    })
}

/// Summary from summary-file text (`key = value` lines).
#[no_mangle]
pub unsafe extern "C" fn am_summary_parse(text_in: *const c_char, out: *mut *mut AmSummary) -> AmStatus {
    guard(|| {
        let f = io::parse_summary(text(text_in, "text")?)?;
        write_out(out, Box::into_raw(Box::new(AmSummary { inner: f.summary })), "out")
    })
}

/// Bundled dataset summary, `"rice"` or `"wheat"`.
#[no_mangle]
pub unsafe extern "C" fn am_summary_dataset(name: *const c_char, out: *mut *mut AmSummary) -> AmStatus {
    guard(|| {
        let d = datasets::by_name_or_err(text(name, "name")?)?;
        write_out(out, Box::into_raw(Box::new(AmSummary { inner: d.summary })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn am_summary_population_size(s: *const AmSummary) -> usize {
    s.as_ref().map_or(0, |s| s.inner.population_size)
}

#[no_mangle]
pub unsafe extern "C" fn am_summary_mean_y(s: *const AmSummary) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.inner.mean_y)
}

#[no_mangle]
pub unsafe extern "C" fn am_summary_free(s: *mut AmSummary) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Population from CSV text with header `y,phi1,phi2`.
#[no_mangle]
pub unsafe extern "C" fn am_population_from_csv(csv: *const c_char, out: *mut *mut AmPopulation) -> AmStatus {
    guard(|| {
        let inner = io::parse_population_csv(text(csv, "csv")?)?;
        write_out(out, Box::into_raw(Box::new(AmPopulation { inner })), "out")
    })
}

/// Population from parallel columns of length `len`.
#[no_mangle]
pub unsafe extern "C" fn am_population_from_columns(
    y: *const f64,
    phi1: *const u8,
    phi2: *const u8,
    len: usize,
    out: *mut *mut AmPopulation,
) -> AmStatus {
    guard(|| {
        if y.is_null() || phi1.is_null() || phi2.is_null() {
            return Err(null("column"));
        }
        let (y, phi1, phi2) =
            (std::slice::from_raw_parts(y, len), std::slice::from_raw_parts(phi1, len), std::slice::from_raw_parts(phi2, len));
        let inner = FinitePopulation::from_columns(y, phi1, phi2)?;
        write_out(out, Box::into_raw(Box::new(AmPopulation { inner })), "out")
    })
}

/// Synthetic population from a generator spec such as
/// `N=1000,p00=0.4,p01=0.1,p10=0.1,p11=0.4,a=50,b1=10,b2=6,sigma=8,seed=1`.
#[no_mangle]
pub unsafe extern "C" fn am_population_generate(spec: *const c_char, out: *mut *mut AmPopulation) -> AmStatus {
    guard(|| {
        let g: GeneratorSpec = text(spec, "spec")?.parse()?;
        let inner = generate_population(&g)?;
        write_out(out, Box::into_raw(Box::new(AmPopulation { inner })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn am_population_len(p: *const AmPopulation) -> usize {
    p.as_ref().map_or(0, |p| p.inner.len())
}

/// Summary of a raw population; the new handle is independent of `p`.
#[no_mangle]
pub unsafe extern "C" fn am_population_summary(p: *const AmPopulation, out: *mut *mut AmSummary) -> AmStatus {
    guard(|| {
        let inner = summarize_population(&handle(p, "population")?.inner)?;
        write_out(out, Box::into_raw(Box::new(AmSummary { inner })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn am_population_free(p: *mut AmPopulation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// First-order MSE of one estimator spec.
#[no_mangle]
pub unsafe extern "C" fn am_theory_mse(s: *const AmSummary, design: AmDesign, spec: *const c_char, out: *mut f64) -> AmStatus {
    guard(|| {
        let s = handle(s, "summary")?;
        let v = first_order_mse(&one_spec(text(spec, "spec")?)?, &coefficients(s, design)?, s.inner.mean_y)?;
        write_out(out, v, "out")
    })
}

/// First-order bias of one estimator spec.
#[no_mangle]
pub unsafe extern "C" fn am_theory_bias(s: *const AmSummary, design: AmDesign, spec: *const c_char, out: *mut f64) -> AmStatus {
    guard(|| {
        let s = handle(s, "summary")?;
        let v = first_order_bias(&one_spec(text(spec, "spec")?)?, &coefficients(s, design)?, s.inner.mean_y)?;
        write_out(out, v, "out")
    })
}

/// MSE-minimizing single-phase composite weights.
#[no_mangle]
pub unsafe extern "C" fn am_optimal_weights_single(
    s: *const AmSummary,
    design: AmDesign,
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    w1: *mut f64,
    w2: *mut f64,
) -> AmStatus {
    guard(|| {
        let c = coefficients(handle(s, "summary")?, design)?;
        let (x, y) = optimal_weights_single(&a_terms(&c, a1, a2, b1, b2))?;
        write_out(w1, x, "w1")?;
        write_out(w2, y, "w2")
    })
}

/// MSE-minimizing two-phase composite weights; `design.n_prime` must be set.
#[no_mangle]
pub unsafe extern "C" fn am_optimal_weights_double(
    s: *const AmSummary,
    design: AmDesign,
    m1: f64,
    m2: f64,
    n1: f64,
    n2: f64,
    h1: *mut f64,
    h2: *mut f64,
) -> AmStatus {
    guard(|| {
        let c = coefficients(handle(s, "summary")?, design)?;
        let (x, y) = optimal_weights_double(&b_terms(&c, m1, m2, n1, n2)?)?;
        write_out(h1, x, "h1")?;
        write_out(h2, y, "h2")
    })
}

/// Single-phase estimate from sample statistics and known proportions.
#[no_mangle]
pub unsafe extern "C" fn am_point_estimate(
    spec: *const c_char,
    ybar: f64,
    p1: f64,
    p2: f64,
    big_p1: f64,
    big_p2: f64,
    out: *mut f64,
) -> AmStatus {
    guard(|| {
        let v = point_estimate(&one_spec(text(spec, "spec")?)?, &SampleData::new(ybar, p1, p2)?, &KnownTruth::new(big_p1, big_p2)?)?;
        write_out(out, v, "out")
    })
}

/// Two-phase estimate; only `P2` is known.
#[no_mangle]
pub unsafe extern "C" fn am_two_phase_estimate(
    spec: *const c_char,
    ybar: f64,
    p1: f64,
    p1_prime: f64,
    p2_prime: f64,
    big_p2: f64,
    out: *mut f64,
) -> AmStatus {
    guard(|| {
        let sample = TwoPhaseSampleData::new(ybar, p1, p1_prime, p2_prime)?;
        // P1 is never read by two-phase estimators
        let truth = KnownTruth::new(0.5, big_p2)?;
        let v = two_phase_estimate(&one_spec(text(spec, "spec")?)?, &sample, &truth)?;
        write_out(out, v, "out")
    })
}

/// Theory table as CSV (`estimator,params,bias,mse,pre,flags`).
#[no_mangle]
pub unsafe extern "C" fn am_theory_table_csv(
    s: *const AmSummary,
    design: AmDesign,
    specs: *const c_char,
    as_tabulated: c_int,
    out: *mut *mut c_char,
) -> AmStatus {
    guard(|| {
        let s = handle(s, "summary")?;
        let specs = parse_spec_list(text(specs, "specs")?)?;
        let opts = TableOptions { as_tabulated: as_tabulated != 0, published: None };
        let report = theory_table(&coefficients(s, design)?, s.inner.mean_y, &specs, &opts)?;
        write_string(out, report.to_csv())
    })
}

/// Monte Carlo (`exact = 0`) or exact enumeration as simulation CSV.
#[no_mangle]
pub unsafe extern "C" fn am_simulate_csv(
    p: *const AmPopulation,
    design: AmDesign,
    specs: *const c_char,
    replicates: u64,
    seed: u64,
    exact: c_int,
    out: *mut *mut c_char,
) -> AmStatus {
    guard(|| {
        let pop = &handle(p, "population")?.inner;
        let design = design_for(pop.len(), design)?;
        let specs = parse_spec_list(text(specs, "specs")?)?;
        let report = if exact != 0 {
            enumerate_exact(pop, &design, &specs)?
        } else {
            run_monte_carlo(pop, &ReplicationPlan { replicates, design, specs, seed })?
        };
        write_string(out, report.to_csv(None))
    })
}

/// Corrections ledger as CSV.
#[no_mangle]
pub unsafe extern "C" fn am_ledger_csv(out: *mut *mut c_char) -> AmStatus {
    guard(|| write_string(out, ledger_csv(&corrections())))
}
