//! C interface to `cvdisc`.
//!
//! Every function returns a [`CvdStatus`] and writes results through out
//! pointers. Reports and sweeps are opaque handles that must be released with
//! the matching `*_free` function. After a non-OK status,
//! [`cvd_last_error`] returns a message for the calling thread.
//!
//! # Safety
//!
//! Out pointers may be NULL (reported as `CVD_STATUS_NULL_POINTER`) but must
//! otherwise point to writable storage of the right type. Handles must come
//! from the matching constructor and must not be used after being freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cvdisc::report::{sweep, write_csv, DiscriminationReport, Spacing, SweepSpec};
use cvdisc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvdStatus {
    Ok = 0,
    Domain = 1,
    Numerical = 2,
    Convergence = 3,
    ReportFailure = 4,
    Invariant = 5,
    NullPointer = 6,
    Io = 7,
    Panic = 8,
}

/// Plain copy of one report row. `ratio_db` is NaN at `mu = 1`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CvdReportValues {
    pub mu: f64,
    pub delta_c: f64,
    pub delta_d: f64,
    pub p_plus_global: f64,
    pub p_minus_global: f64,
    pub p_plus_local: f64,
    pub p_minus_local: f64,
    pub i_plus_global: f64,
    pub i_minus_global: f64,
    pub i_plus_local: f64,
    pub i_minus_local: f64,
    pub kappa: f64,
    pub kappa_loc: f64,
    pub delta: f64,
    pub ratio_db: f64,
}

impl From<&DiscriminationReport> for CvdReportValues {
    fn from(r: &DiscriminationReport) -> Self {
        Self {
            mu: r.mu,
            delta_c: r.delta_c,
            delta_d: r.delta_d,
            p_plus_global: r.p_plus_global,
            p_minus_global: r.p_minus_global,
            p_plus_local: r.p_plus_local,
            p_minus_local: r.p_minus_local,
            i_plus_global: r.i_plus_global,
            i_minus_global: r.i_minus_global,
            i_plus_local: r.i_plus_local,
            i_minus_local: r.i_minus_local,
            kappa: r.kappa,
            kappa_loc: r.kappa_loc,
            delta: r.delta,
            ratio_db: r.ratio_db.unwrap_or(f64::NAN),
        }
    }
}

/// Opaque single-point report.
pub struct CvdReport(DiscriminationReport);

/// Opaque sweep table.
pub struct CvdSweep(Vec<DiscriminationReport>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CvdStatus {
    match e {
        Error::Domain(_) => CvdStatus::Domain,
        Error::Numerical(_) => CvdStatus::Numerical,
        Error::Convergence(_) => CvdStatus::Convergence,
        Error::ReportFailure(_) => CvdStatus::ReportFailure,
        Error::Invariant(_) => CvdStatus::Invariant,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), CvdStatus>>(f: F) -> CvdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CvdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("internal panic");
            CvdStatus::Panic
        }
    }
}

fn lib<T>(r: cvdisc::Result<T>) -> Result<T, CvdStatus> {
    r.map_err(|e| {
        set_last_error(e.to_string());
        status_of(&e)
    })
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), CvdStatus> {
    if out.is_null() {
        set_last_error("output pointer is null");
        return Err(CvdStatus::NullPointer);
    }
    // SAFETY: only reached from the exported `unsafe` functions, whose callers
    // guarantee a non-null `out` is writable.
    unsafe { out.write(value) };
    Ok(())
}

fn deref<'a, T>(p: *const T) -> Result<&'a T, CvdStatus> {
    // SAFETY: as for `write_out`; non-null handles are live.
    unsafe { p.as_ref() }.ok_or_else(|| {
        set_last_error("handle is null");
        CvdStatus::NullPointer
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cvd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cvd_status_string(status: CvdStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CvdStatus::Ok => c"ok",
        CvdStatus::Domain => c"argument outside the domain",
        CvdStatus::Numerical => c"numerical routine failed",
        CvdStatus::Convergence => c"truncation did not converge",
        CvdStatus::ReportFailure => c"verification failed",
        CvdStatus::Invariant => c"bound ordering violated",
        CvdStatus::NullPointer => c"null pointer",
        CvdStatus::Io => c"I/O error",
        CvdStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Gaussian discord (bits) of the maximally correlated state.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_delta_d(mu: f64, out: *mut f64) -> CvdStatus {
    guard(|| write_out(out, lib(cvdisc::correlations::delta_d(mu))?))
}

/// Classical correlations (bits) of the maximally correlated state.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_delta_c(mu: f64, out: *mut f64) -> CvdStatus {
    guard(|| write_out(out, lib(cvdisc::correlations::delta_c(mu))?))
}

/// Global s-overlap `Tr(rho0^s rho1^(1-s))`.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_s_overlap_global(mu: f64, s: f64, out: *mut f64) -> CvdStatus {
    guard(|| write_out(out, lib(cvdisc::chernoff::s_overlap_global(mu, s))?))
}

/// Heterodyne-averaged s-overlap of the local detector.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_s_overlap_local(mu: f64, s: f64, out: *mut f64) -> CvdStatus {
    guard(|| write_out(out, lib(cvdisc::local::s_overlap_heterodyne(mu, s))?))
}

/// Minimized global overlap and its minimizer.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_qcb_global(mu: f64, q_out: *mut f64, s_out: *mut f64) -> CvdStatus {
    guard(|| {
        if q_out.is_null() || s_out.is_null() {
            set_last_error("output pointer is null");
            return Err(CvdStatus::NullPointer);
        }
        let r = lib(cvdisc::chernoff::qcb_global(mu))?;
        write_out(q_out, r.q_value)?;
        write_out(s_out, r.s_star)
    })
}

/// Computes every bound at `mu`. Free the handle with [`cvd_report_free`].
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_report_new(mu: f64, out: *mut *mut CvdReport) -> CvdStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("output pointer is null");
            return Err(CvdStatus::NullPointer);
        }
        let r = lib(DiscriminationReport::compute(mu).and_then(DiscriminationReport::check))?;
        write_out(out, Box::into_raw(Box::new(CvdReport(r))))
    })
}

/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_report_values(report: *const CvdReport, out: *mut CvdReportValues) -> CvdStatus {
    guard(|| write_out(out, CvdReportValues::from(&deref(report)?.0)))
}

/// Releases a report; NULL is ignored.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_report_free(report: *mut CvdReport) {
    if !report.is_null() {
        // SAFETY: non-null handles come from `cvd_report_new` and are freed once.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Computes a sweep over `points` values of mu, log-spaced when
/// `log_spacing` is true. Free the handle with [`cvd_sweep_free`].
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_sweep_new(
    mu_min: f64,
    mu_max: f64,
    points: usize,
    log_spacing: bool,
    out: *mut *mut CvdSweep,
) -> CvdStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("output pointer is null");
            return Err(CvdStatus::NullPointer);
        }
        let spacing = if log_spacing { Spacing::Log } else { Spacing::Linear };
        let spec = lib(SweepSpec::new(mu_min, mu_max, points, spacing))?;
        let rows = lib(sweep(&spec))?;
        write_out(out, Box::into_raw(Box::new(CvdSweep(rows))))
    })
}

/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_sweep_len(table: *const CvdSweep, out: *mut usize) -> CvdStatus {
    guard(|| write_out(out, deref(table)?.0.len()))
}

/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_sweep_row(
    table: *const CvdSweep,
    index: usize,
    out: *mut CvdReportValues,
) -> CvdStatus {
    guard(|| {
        let rows = &deref(table)?.0;
        let row = rows.get(index).ok_or_else(|| {
            set_last_error(format!("row {index} out of range for {} rows", rows.len()));
            CvdStatus::Domain
        })?;
        write_out(out, CvdReportValues::from(row))
    })
}

/// Writes the sweep as CSV to the UTF-8 path `path`.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_sweep_write_csv(table: *const CvdSweep, path: *const c_char) -> CvdStatus {
    guard(|| {
        let rows = &deref(table)?.0;
        if path.is_null() {
            set_last_error("path is null");
            return Err(CvdStatus::NullPointer);
        }
        // SAFETY: the caller passes a NUL-terminated string.
        let path = unsafe { CStr::from_ptr(path) }.to_str().map_err(|_| {
            set_last_error("path is not valid UTF-8");
            CvdStatus::Domain
        })?;
        let io = |e: std::io::Error| {
            set_last_error(e.to_string());
            CvdStatus::Io
        };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        write_csv(&mut w, rows).map_err(io)?;
        w.flush().map_err(io)
    })
}

/// Releases a sweep; NULL is ignored.
///
/// # Safety
/// Non-null out pointers must be writable and handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cvd_sweep_free(table: *mut CvdSweep) {
    if !table.is_null() {
        // SAFETY: non-null handles come from `cvd_sweep_new` and are freed once.
        drop(unsafe { Box::from_raw(table) });
    }
}
