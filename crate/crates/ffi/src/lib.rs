//! C ABI for the exact Weingarten / partial-transpose calculus library.
//!
//! Conventions:
//! - Every fallible function returns a [`PtlabStatus`]; `PTLAB_STATUS_OK`
//!   is zero. On failure a thread-local message describes the cause; fetch
//!   it with [`ptlab_last_error`].
//! - Handles (`PtlabExperiment`, `PtlabReport`) are opaque. Create and
//!   destroy them only through this API; destroying twice or using after
//!   destroy is undefined behavior, as usual for C handles.
//! - Strings returned through `char**` out-parameters are NUL-terminated,
//!   UTF-8, and owned by the caller: release them with
//!   [`ptlab_string_free`]. Strings returned as `const char*` are static
//!   and must not be freed.
//! - All functions are safe to call from multiple threads at once as long
//!   as each individual handle is used from one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;

use ptlab::experiment::{
    prediction_rows, predictions_to_csv, run, ExperimentConfig, Report, ReportFormat,
};
use ptlab::freeprob::{pt_limit_cumulants, pt_limit_moments, LimitData};
use ptlab::partition::{
    enumerate_admissible, enumerate_eps_pairings, enumerate_nc12, enumerate_noncrossing,
    enumerate_pairings, enumerate_set_partitions, EpsilonMap,
};
use ptlab::scalar::CRat;
use ptlab::weingarten::{haar_moment_interleaved, wg_at, wg_symbolic, CycleType};
use ptlab::word::{entry_word_parts, parse_entry_word, Letter};
use ptlab::Error;

// ---------------------------------------------------------------------------
// Status codes and the thread-local error message
// ---------------------------------------------------------------------------

/// Result of a call. Zero means success; every other value has a matching
/// human-readable message available from `ptlab_last_error`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PtlabStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A value was outside the documented domain.
    InvalidArgument = 3,
    /// A size cap protecting exact enumeration was exceeded.
    ResourceLimit = 4,
    /// An exact linear system degenerated.
    SingularSystem = 5,
    /// A required moment or cumulant was absent from the supplied data.
    MissingMoment = 6,
    /// A word, pattern, or numeric literal failed to parse.
    ParseError = 7,
    /// The operation is recognized but out of scope.
    Unsupported = 8,
    /// The experiment configuration is malformed.
    ConfigError = 9,
    /// File or stream I/O failed.
    IoError = 10,
    /// JSON serialization or deserialization failed.
    JsonError = 11,
    /// The library caught an internal panic instead of unwinding across
    /// the language boundary.
    InternalPanic = 12,
}

/// Output format selector for rendered tables.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PtlabFormat {
    Csv = 0,
    Json = 1,
}

/// Partition family selector for `ptlab_partition_count`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PtlabFamily {
    /// Perfect matchings of `2m` points.
    Pairings = 0,
    /// Matchings that pair plain with starred points (alternating signs).
    SignRespectingPairings = 1,
    /// Non-crossing partitions of `[m]`.
    Noncrossing = 2,
    /// Non-crossing partitions with blocks of size one or two.
    SmallBlockNoncrossing = 3,
    /// Non-crossing partitions of `2m` points with the three admitted
    /// block shapes.
    Admissible = 4,
    /// All set partitions of `[m]`.
    SetPartitions = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sane: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sane).unwrap_or_default();
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
}

fn status_of(err: &Error) -> PtlabStatus {
    match err {
        Error::InvalidArgument(_) => PtlabStatus::InvalidArgument,
        Error::ResourceLimit(_) => PtlabStatus::ResourceLimit,
        Error::SingularSystem(_) => PtlabStatus::SingularSystem,
        Error::MissingMoment(_) => PtlabStatus::MissingMoment,
        Error::Parse(_) => PtlabStatus::ParseError,
        Error::Unsupported(_) => PtlabStatus::Unsupported,
        Error::Config(_) => PtlabStatus::ConfigError,
        Error::Io(_) => PtlabStatus::IoError,
        Error::Json(_) => PtlabStatus::JsonError,
    }
}

fn fail(err: Error) -> PtlabStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a fallible body, converting panics into a status instead of
/// unwinding into the caller.
fn guard(body: impl FnOnce() -> PtlabStatus) -> PtlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(ToString::to_string)
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_owned());
            set_error(&format!("internal panic: {message}"));
            PtlabStatus::InternalPanic
        }
    }
}

macro_rules! require_ptr {
    ($ptr:expr, $name:literal) => {
        if $ptr.is_null() {
            set_error(concat!($name, " must not be NULL"));
            return PtlabStatus::NullPointer;
        }
    };
}

/// # Safety
/// `text` must point to a NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, PtlabStatus> {
    match CStr::from_ptr(text).to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error("string argument is not valid UTF-8");
            Err(PtlabStatus::InvalidUtf8)
        }
    }
}

fn give_string(text: String, out: *mut *mut c_char) -> PtlabStatus {
    match CString::new(text) {
        Ok(owned) => {
            unsafe { *out = owned.into_raw() };
            clear_error();
            PtlabStatus::Ok
        }
        Err(_) => {
            set_error("rendered text contained an interior NUL byte");
            PtlabStatus::InvalidArgument
        }
    }
}

/// Copies the message describing the most recent failure on this thread
/// into `buffer` (NUL-terminated, truncated to `capacity` bytes) and
/// returns the full length of the message including its NUL terminator.
/// Call with a NULL buffer to query the required capacity. After a
/// successful call the message is empty.
///
/// # Safety
/// `buffer` must be NULL or point to at least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes_with_nul();
        if !buffer.is_null() && capacity > 0 {
            let copy_len = bytes.len().min(capacity);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, copy_len);
            // Guarantee termination even when truncating.
            *buffer.add(copy_len - 1) = 0;
        }
        bytes.len()
    })
}

/// Returns the library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn ptlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned through a `char**` out-parameter. NULL is
/// ignored.
///
/// # Safety
/// `text` must be NULL or a string this library handed out through a
/// `char**` out-parameter, not freed before.
#[no_mangle]
pub unsafe extern "C" fn ptlab_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

// ---------------------------------------------------------------------------
// Experiments and reports
// ---------------------------------------------------------------------------

/// An experiment description: which quantity to verify, at which
/// dimensions, with how many samples, under which tolerance policy.
pub struct PtlabExperiment {
    inner: ExperimentConfig,
}

/// The outcome of one experiment run: a table of verdict or structure rows.
pub struct PtlabReport {
    inner: Report,
}

/// Parses an experiment from its JSON description (the same format the
/// command-line tool reads via `--config`). On success `*out` owns the new
/// handle; release it with `ptlab_experiment_free`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_experiment_from_json(
    json: *const c_char,
    out: *mut *mut PtlabExperiment,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(json, "json");
        require_ptr!(out, "out");
        let text = match read_str(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match ExperimentConfig::from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PtlabExperiment { inner }));
                clear_error();
                PtlabStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Returns the experiment kind as a static string; do not free it.
///
/// # Safety
/// `experiment` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ptlab_experiment_name(
    experiment: *const PtlabExperiment,
) -> *const c_char {
    if experiment.is_null() {
        return c"".as_ptr();
    }
    match (*experiment).inner.name() {
        "entry_moments" => c"entry_moments".as_ptr(),
        "limit_distribution" => c"limit_distribution".as_ptr(),
        "freeness" => c"freeness".as_ptr(),
        "blocks" => c"blocks".as_ptr(),
        "invariance" => c"invariance".as_ptr(),
        _ => c"unknown".as_ptr(),
    }
}

/// Replaces the experiment's seed. Fails for the structural table, which
/// is exact and takes no randomness.
///
/// # Safety
/// `experiment` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ptlab_experiment_set_seed(
    experiment: *mut PtlabExperiment,
    seed: u64,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(experiment, "experiment");
        match (*experiment).inner.set_seed(seed) {
            Ok(()) => {
                clear_error();
                PtlabStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Runs the experiment and hands back a report handle; release it with
/// `ptlab_report_free`.
///
/// # Safety
/// `experiment` must be a live handle from this library; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_experiment_run(
    experiment: *const PtlabExperiment,
    out: *mut *mut PtlabReport,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(experiment, "experiment");
        require_ptr!(out, "out");
        match run(&(*experiment).inner) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PtlabReport { inner }));
                clear_error();
                PtlabStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Renders the exact predictions for the experiment without touching any
/// sampler, as CSV or JSON. The caller frees `*out` with
/// `ptlab_string_free`.
///
/// # Safety
/// `experiment` must be a live handle from this library; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_experiment_predictions(
    experiment: *const PtlabExperiment,
    format: PtlabFormat,
    out: *mut *mut c_char,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(experiment, "experiment");
        require_ptr!(out, "out");
        let rows = match prediction_rows(&(*experiment).inner) {
            Ok(rows) => rows,
            Err(err) => return fail(err),
        };
        let text = match format {
            PtlabFormat::Csv => predictions_to_csv(&rows),
            PtlabFormat::Json => match serde_json::to_string_pretty(&rows) {
                Ok(t) => t,
                Err(err) => return fail(Error::Json(err)),
            },
        };
        give_string(text, out)
    })
}

/// Releases an experiment handle. NULL is ignored.
///
/// # Safety
/// `experiment` must be NULL or a live handle from this library; it must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ptlab_experiment_free(experiment: *mut PtlabExperiment) {
    if !experiment.is_null() {
        drop(Box::from_raw(experiment));
    }
}

/// Renders a report as CSV or JSON text. The caller frees `*out` with
/// `ptlab_string_free`.
///
/// # Safety
/// `report` must be a live handle from this library; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_render(
    report: *const PtlabReport,
    format: PtlabFormat,
    out: *mut *mut c_char,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(report, "report");
        require_ptr!(out, "out");
        let mapped = match format {
            PtlabFormat::Csv => ReportFormat::Csv,
            PtlabFormat::Json => ReportFormat::Json,
        };
        match (*report).inner.render(mapped) {
            Ok(text) => give_string(text, out),
            Err(err) => fail(err),
        }
    })
}

/// Sets `*out` to 1 when every row of the report passed, 0 otherwise.
///
/// # Safety
/// `report` must be a live handle from this library; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_all_pass(
    report: *const PtlabReport,
    out: *mut u8,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(report, "report");
        require_ptr!(out, "out");
        *out = u8::from((*report).inner.all_pass());
        clear_error();
        PtlabStatus::Ok
    })
}

/// Sets `*out` to the number of rows in the report.
///
/// # Safety
/// `report` must be a live handle from this library; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_row_count(
    report: *const PtlabReport,
    out: *mut usize,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(report, "report");
        require_ptr!(out, "out");
        *out = match &(*report).inner {
            Report::Verdicts(rows) => rows.len(),
            Report::Blocks(rows) => rows.len(),
        };
        clear_error();
        PtlabStatus::Ok
    })
}

/// Releases a report handle. NULL is ignored.
///
/// # Safety
/// `report` must be NULL or a live handle from this library; it must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_free(report: *mut PtlabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

// ---------------------------------------------------------------------------
// Exact values
// ---------------------------------------------------------------------------

unsafe fn cycle_type_from_raw(
    parts: *const u64,
    parts_len: usize,
    order: u64,
) -> Result<CycleType, Error> {
    if parts_len > 0 && parts.is_null() {
        return Err(Error::invalid("parts must not be NULL when parts_len > 0"));
    }
    let mut list: Vec<usize> = std::slice::from_raw_parts(parts, parts_len)
        .iter()
        .map(|&p| p as usize)
        .collect();
    let sum: usize = list.iter().sum();
    let order = order as usize;
    if order > 0 {
        if sum > order {
            return Err(Error::invalid(format!(
                "parts sum to {sum}, larger than the requested order {order}"
            )));
        }
        list.extend(std::iter::repeat_n(1, order - sum));
    }
    CycleType::new(list)
}

/// Writes the exact Weingarten value of the given cycle type at dimension
/// `dim` as a rational string "numerator/denominator". `parts` lists the
/// nontrivial cycle lengths; when `order` is nonzero the type is padded
/// with fixed points up to that order. The caller frees `*out`.
///
/// # Safety
/// `parts` must point to `parts_len` values (NULL is allowed when
/// `parts_len` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ptlab_wg_rational(
    parts: *const u64,
    parts_len: usize,
    order: u64,
    dim: u64,
    out: *mut *mut c_char,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(out, "out");
        let ct = match cycle_type_from_raw(parts, parts_len, order) {
            Ok(ct) => ct,
            Err(err) => return fail(err),
        };
        match wg_at(&ct, &BigInt::from(dim)) {
            Ok(value) => give_string(value.to_string(), out),
            Err(err) => fail(err),
        }
    })
}

/// Writes the symbolic Weingarten value of the given cycle type as JSON
/// with fields `cycle_type`, `numerator`, `denominator` (integer
/// coefficient strings in ascending powers of the dimension), and
/// `display`. The caller frees `*out`.
#[no_mangle]
pub unsafe extern "C" fn ptlab_wg_symbolic_json(
    parts: *const u64,
    parts_len: usize,
    order: u64,
    out: *mut *mut c_char,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(out, "out");
        let ct = match cycle_type_from_raw(parts, parts_len, order) {
            Ok(ct) => ct,
            Err(err) => return fail(err),
        };
        let value = match wg_symbolic(&ct) {
            Ok(v) => v,
            Err(err) => return fail(err),
        };
        let coeff_strings = |poly: &ptlab::ratfunc::PolyZ| -> Vec<String> {
            poly.coeffs().iter().map(ToString::to_string).collect()
        };
        let body = serde_json::json!({
            "cycle_type": ct.parts(),
            "numerator": coeff_strings(value.numerator()),
            "denominator": coeff_strings(value.denominator()),
            "display": value.to_string(),
        });
        match serde_json::to_string_pretty(&body) {
            Ok(text) => give_string(text, out),
            Err(err) => fail(Error::Json(err)),
        }
    })
}

/// Evaluates the exact mean of a product of Haar-unitary entries given as
/// a pattern like "1.1 2.2 1.1* 2.2*" (row.column per factor, `*` for a
/// conjugated factor) at dimension `dim`, written as a rational string.
/// The caller frees `*out`.
#[no_mangle]
pub unsafe extern "C" fn ptlab_entry_moment(
    word: *const c_char,
    dim: u64,
    out: *mut *mut c_char,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(word, "word");
        require_ptr!(out, "out");
        let text = match read_str(word) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let factors = match parse_entry_word(text) {
            Ok(f) => f,
            Err(err) => return fail(err),
        };
        let (rows, cols, eps) = entry_word_parts(&factors);
        match haar_moment_interleaved(&rows, &cols, &eps, &BigInt::from(dim)) {
            Ok(value) => give_string(value.to_string(), out),
            Err(err) => fail(err),
        }
    })
}

/// Sets `*out` to the number of elements of the chosen partition family at
/// the given size.
#[no_mangle]
pub unsafe extern "C" fn ptlab_partition_count(
    family: PtlabFamily,
    size: usize,
    out: *mut u64,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(out, "out");
        let count = match family {
            PtlabFamily::Pairings => enumerate_pairings(size).map(|v| v.len()),
            PtlabFamily::SignRespectingPairings => {
                enumerate_eps_pairings(&EpsilonMap::alternating(size)).map(|v| v.len())
            }
            PtlabFamily::Noncrossing => enumerate_noncrossing(size).map(|v| v.len()),
            PtlabFamily::SmallBlockNoncrossing => enumerate_nc12(size).map(|v| v.len()),
            PtlabFamily::Admissible => enumerate_admissible(size).map(|v| v.len()),
            PtlabFamily::SetPartitions => enumerate_set_partitions(size).map(|v| v.len()),
        };
        match count {
            Ok(n) => {
                *out = n as u64;
                clear_error();
                PtlabStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Computes the limit moment and free-cumulant series of the right partial
/// flip from first- and second-order data of the base family.
///
/// Inputs are complex numbers as `(re, im)` pairs of doubles:
/// - `m1`: mean of the base variable; `m1_star`: mean of its adjoint.
/// - `m2`: the four second-order mixed moments (not cumulants; the mean
///   product is subtracted internally) in the order (plain,plain),
///   (plain,star), (star,plain), (star,star) — eight doubles.
///
/// Outputs: `out_moments` and `out_cumulants` each receive `max_order`
/// complex values (`2 * max_order` doubles), orders `1..=max_order`. The
/// conversion is exact internally; results are rounded once on output.
#[no_mangle]
pub unsafe extern "C" fn ptlab_flip_series(
    m1: *const f64,
    m1_star: *const f64,
    m2: *const f64,
    max_order: usize,
    out_moments: *mut f64,
    out_cumulants: *mut f64,
) -> PtlabStatus {
    guard(|| {
        require_ptr!(m1, "m1");
        require_ptr!(m1_star, "m1_star");
        require_ptr!(m2, "m2");
        require_ptr!(out_moments, "out_moments");
        require_ptr!(out_cumulants, "out_cumulants");
        if max_order == 0 {
            set_error("max_order must be at least 1");
            return PtlabStatus::InvalidArgument;
        }

        let read_pair = |ptr: *const f64, offset: usize| -> Result<CRat, Error> {
            let re = *ptr.add(2 * offset);
            let im = *ptr.add(2 * offset + 1);
            CRat::from_f64_exact(re, im)
        };

        let a = Letter::new(1);
        let a_star = Letter::starred(1);
        let mut data: LimitData<CRat> = LimitData::new();
        let combos = [(a, a), (a, a_star), (a_star, a), (a_star, a_star)];
        let filled = (|| -> Result<(), Error> {
            data.set_m1(a, read_pair(m1, 0)?);
            data.set_m1(a_star, read_pair(m1_star, 0)?);
            for (k, &(x, y)) in combos.iter().enumerate() {
                data.set_m2(x, y, read_pair(m2, k)?);
            }
            Ok(())
        })();
        if let Err(err) = filled {
            return fail(err);
        }

        for n in 1..=max_order {
            let word = vec![a; n];
            let moment = match pt_limit_moments(&data, &word) {
                Ok(v) => v,
                Err(err) => return fail(err),
            };
            let cumulant = match pt_limit_cumulants(&data, &word) {
                Ok(v) => v,
                Err(err) => return fail(err),
            };
            let (mre, mim) = moment.to_f64_pair();
            let (kre, kim) = cumulant.to_f64_pair();
            *out_moments.add(2 * (n - 1)) = mre;
            *out_moments.add(2 * (n - 1) + 1) = mim;
            *out_cumulants.add(2 * (n - 1)) = kre;
            *out_cumulants.add(2 * (n - 1) + 1) = kim;
        }
        clear_error();
        PtlabStatus::Ok
    })
}
