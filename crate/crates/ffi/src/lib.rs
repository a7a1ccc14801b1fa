//! C interface.  Programs and reports are opaque handles owned by the caller
//! and released with their `_free` functions.  Every fallible call returns a
//! [`QqStatus`]; on failure [`qq_last_error`] describes the problem.  Strings
//! returned through out-parameters are freed with [`qq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qquery::analyzer::{self, ErrorReport, Sidedness};
use qquery::blackbox::{Property, TruthTable};
use qquery::circuit::{parse_program, serialize_program, Builtin, Program, Symbol};
use qquery::classical::{dfp_stats, santha_threshold};
use qquery::tuner::{default_domain, tune_theta};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Analysis = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QqSidedness {
    Exact = 0,
    OneSidedOn0 = 1,
    OneSidedOn1 = 2,
    TwoSided = 3,
}

/// Opaque circuit handle.
pub struct QqProgram(Program);

/// Opaque error-report handle.
pub struct QqReport(ErrorReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

type Outcome = Result<(), (QqStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> QqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QqStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QqStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (QqStatus, String)> {
    if s.is_null() {
        return Err((QqStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (QqStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QqStatus, String)> {
    p.as_ref().ok_or_else(|| (QqStatus::NullPointer, format!("{what} is null")))
}

unsafe fn store<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err((QqStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn analysis(e: impl std::fmt::Display) -> (QqStatus, String) {
    (QqStatus::Analysis, e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> (QqStatus, String) {
    (QqStatus::InvalidArgument, e.to_string())
}

/// Message describing the last failure on this thread.  The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library.  Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a circuit in the text format.
///
/// # Safety
/// `source` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_program_parse(source: *const c_char, out: *mut *mut QqProgram) -> QqStatus {
    guard(|| {
        let src = text(source, "source")?;
        let p = parse_program(src).map_err(|e| (QqStatus::Parse, e.to_string()))?;
        store(out, Box::into_raw(Box::new(QqProgram(p))), "out")
    })
}

/// Builds one of the bundled circuits (`OR`, `OR_SINGLE_FINAL`, `ANDOR2`,
/// `XOR_EXACT`, `PARITY_LASVEGAS`) at angle `theta`.
///
/// # Safety
/// `name` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_program_builtin(name: *const c_char, theta: f64, out: *mut *mut QqProgram) -> QqStatus {
    guard(|| {
        let b: Builtin = text(name, "name")?.parse().map_err(invalid)?;
        store(out, Box::into_raw(Box::new(QqProgram(b.program(theta)))), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qq_program_free(p: *mut QqProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Text form of the circuit; free with [`qq_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_program_serialize(p: *const QqProgram, out: *mut *mut c_char) -> QqStatus {
    guard(|| {
        let p = handle(p, "program")?;
        store(out, owned_string(serialize_program(&p.0)), "out")
    })
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qq_program_num_qubits(p: *const QqProgram) -> usize {
    p.as_ref().map_or(0, |p| p.0.num_qubits)
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qq_program_oracle_arity(p: *const QqProgram) -> usize {
    p.as_ref().map_or(0, |p| p.0.oracle_arity)
}

/// Exact output distribution on the function with truth-table index `bits`
/// (first value most significant).  `probs` receives P(0), P(1), P(?).
///
/// # Safety
/// `p` must be a live handle; `probs` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qq_run_exact(p: *const QqProgram, bits: u64, probs: *mut f64) -> QqStatus {
    guard(|| {
        let p = handle(p, "program")?;
        let f = TruthTable::new(p.0.oracle_arity, bits).map_err(invalid)?;
        let d = analyzer::run_exact(&p.0, &f).map_err(analysis)?;
        if probs.is_null() {
            return Err((QqStatus::NullPointer, "probs is null".into()));
        }
        for (i, s) in Symbol::ALL.iter().enumerate() {
            probs.add(i).write(d.prob(*s));
        }
        Ok(())
    })
}

/// Error report of `p` for the property named by `property` (`or`, `and`,
/// `xor`, `andor:2`, ...).
///
/// # Safety
/// `p` must be a live handle, `property` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qq_analyze(p: *const QqProgram, property: *const c_char, out: *mut *mut QqReport) -> QqStatus {
    guard(|| {
        let p = handle(p, "program")?;
        let prop: Property = text(property, "property")?.parse().map_err(invalid)?;
        let r = analyzer::error_report(&p.0, &prop).map_err(analysis)?;
        store(out, Box::into_raw(Box::new(QqReport(r))), "out")
    })
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qq_report_free(r: *mut QqReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Worst-case error; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qq_report_p_error_max(r: *const QqReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.p_error_max)
}

/// Worst-case expected oracle calls; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qq_report_q_max(r: *const QqReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.q_max)
}

/// # Safety
/// `r` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qq_report_sidedness(r: *const QqReport, out: *mut QqSidedness) -> QqStatus {
    guard(|| {
        let r = handle(r, "report")?;
        let s = match r.0.sidedness {
            Sidedness::Exact => QqSidedness::Exact,
            Sidedness::OneSidedOn0 => QqSidedness::OneSidedOn0,
            Sidedness::OneSidedOn1 => QqSidedness::OneSidedOn1,
            Sidedness::TwoSided => QqSidedness::TwoSided,
        };
        store(out, s, "out")
    })
}

/// Number of per-function entries; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qq_report_function_count(r: *const QqReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.per_function.len())
}

/// Truth-table index and error probability of entry `index`.
///
/// # Safety
/// `r` must be a live handle; `bits` and `p_error` writable.
#[no_mangle]
pub unsafe extern "C" fn qq_report_function(r: *const QqReport, index: usize, bits: *mut u64, p_error: *mut f64) -> QqStatus {
    guard(|| {
        let r = handle(r, "report")?;
        let entry = r
            .0
            .per_function
            .get(index)
            .ok_or_else(|| invalid(format!("index {index} out of range for {} functions", r.0.per_function.len())))?;
        store(bits, entry.f.index(), "bits")?;
        store(p_error, entry.p_error, "p_error")
    })
}

/// JSON form of the report; free with [`qq_string_free`].
///
/// # Safety
/// `r` must be a live handle, `label` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qq_report_json(r: *const QqReport, label: *const c_char, out: *mut *mut c_char) -> QqStatus {
    guard(|| {
        let r = handle(r, "report")?;
        let label = text(label, "label")?;
        store(out, owned_string(r.0.to_json(label).to_string()), "out")
    })
}

/// Minimax angle of a bundled template over `[lo, hi)`.  When `lo >= hi`
/// the template's default domain is used.  `property` may be null to use
/// the template's own property.
///
/// # Safety
/// `template` must be a valid C string, `property` null or a valid C string,
/// the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn qq_tune(
    template: *const c_char,
    property: *const c_char,
    lo: f64,
    hi: f64,
    theta_star: *mut f64,
    p_error_max: *mut f64,
) -> QqStatus {
    guard(|| {
        let b: Builtin = text(template, "template")?.parse().map_err(invalid)?;
        let prop = if property.is_null() { b.property() } else { text(property, "property")?.parse().map_err(invalid)? };
        let (lo, hi) = if lo < hi { (lo, hi) } else { default_domain(b) };
        let r = tune_theta(b, &prop, lo, hi).map_err(analysis)?;
        store(theta_star, r.theta_star, "theta_star")?;
        store(p_error_max, r.p_error_max, "p_error_max")
    })
}

/// Largest error a `q`-query algorithm may have and still beat a classical
/// baseline of `big_q` expected queries; `sided` is 1 or 2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_threshold(q: f64, big_q: f64, sided: u8, out: *mut f64) -> QqStatus {
    guard(|| {
        if !(sided == 1 || sided == 2) {
            return Err(invalid(format!("sided must be 1 or 2, got {sided}")));
        }
        if big_q.is_nan() || big_q <= 0.0 {
            return Err(invalid("baseline must be positive"));
        }
        store(out, santha_threshold(q, big_q, sided), "out")
    })
}

/// Worst-case expected queries of depth-first pruning as a fraction.
///
/// # Safety
/// `numer` and `denom` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qq_dfp_worst_case(depth: usize, root_and: bool, numer: *mut i64, denom: *mut i64) -> QqStatus {
    guard(|| {
        let s = dfp_stats(&Property::AltTree { depth, root_and }).map_err(invalid)?;
        store(numer, *s.worst_case.numer(), "numer")?;
        store(denom, *s.worst_case.denom(), "denom")
    })
}
