//! C interface to the wilson-loops solver, the planar gauge oracle and the
//! lattice helpers.
//!
//! Every object crosses the boundary as an opaque pointer owned by the caller
//! and released with the matching `*_free`. Fallible calls return a
//! [`WlStatus`] and write results through out-pointers; the message of the
//! most recent failure on the calling thread is available from
//! [`wl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use wilson_loops::freeprob::FreeOracle;
use wilson_loops::gauge::{degree_bound, gauge_polynomial};
use wilson_loops::lattice::{loop_area, LoopSequence};
use wilson_loops::parse::parse_sequence;
use wilson_loops::poly::{rational_string, BetaPolynomial};
use wilson_loops::solver::{Budget, EdgePolicy, Solver};
use wilson_loops::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Budget = 5,
    Unsupported = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

pub struct WlSolver(Solver);

/// A parsed sequence of loops (possibly a single loop, possibly empty).
pub struct WlLoops(LoopSequence);

pub struct WlPoly(BetaPolynomial);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: WlStatus, msg: impl Into<String>) -> WlStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> WlStatus {
    let status = match e {
        Error::Parse { .. } => WlStatus::Parse,
        Error::Budget(_) => WlStatus::Budget,
        Error::Unsupported(_) => WlStatus::Unsupported,
        _ => WlStatus::Invalid,
    };
    fail(status, e.to_string())
}

/// Run `f`, turning panics into [`WlStatus::Panic`] and clearing the error
/// message on success.
fn guard(f: impl FnOnce() -> WlStatus) -> WlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == WlStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(WlStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, WlStatus> {
    if s.is_null() {
        return Err(fail(WlStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(WlStatus::InvalidUtf8, "string is not valid UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, WlStatus> {
    p.as_ref().ok_or_else(|| fail(WlStatus::NullPointer, "null handle"))
}

unsafe fn put<T>(out: *mut T, v: T) -> WlStatus {
    if out.is_null() {
        return fail(WlStatus::NullPointer, "null out-pointer");
    }
    out.write(v);
    WlStatus::Ok
}

/// Copy `s` and a terminating NUL into `buf`. `needed` receives the full
/// size; a null `buf` only queries it.
unsafe fn write_string(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> WlStatus {
    let n = s.len() + 1;
    if !needed.is_null() {
        needed.write(n);
    }
    if buf.is_null() {
        return WlStatus::Ok;
    }
    if cap < n {
        return fail(WlStatus::BufferTooSmall, format!("buffer holds {cap} bytes, {n} needed"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    buf.add(s.len()).write(0);
    WlStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn wl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn wl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `policy` is "lex", "top" or "random:SEED"; null means "lex".
///
/// # Safety
/// `policy` is null or a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn wl_solver_new(policy: *const c_char, out: *mut *mut WlSolver) -> WlStatus {
    guard(|| {
        let policy = if policy.is_null() {
            EdgePolicy::LexMin
        } else {
            tri!(tri!(text(policy)).parse::<EdgePolicy>().map_err(from_core))
        };
        put(out, Box::into_raw(Box::new(WlSolver(Solver::new(policy)))))
    })
}

/// Limits for later calls. `max_millis` of 0 means no time limit.
///
/// # Safety
/// `solver` comes from [`wl_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn wl_solver_set_budget(
    solver: *mut WlSolver,
    max_memo: usize,
    max_depth: usize,
    max_millis: u64,
) -> WlStatus {
    guard(|| {
        let s = tri!(solver.as_mut().ok_or_else(|| fail(WlStatus::NullPointer, "null handle")));
        s.0.budget = Budget {
            max_memo,
            max_depth,
            max_time: (max_millis > 0).then(|| Duration::from_millis(max_millis)),
        };
        WlStatus::Ok
    })
}

/// Number of cached coefficients.
///
/// # Safety
/// `solver` is null or comes from [`wl_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn wl_solver_memo_len(solver: *const WlSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.0.memo_len())
}

/// # Safety
/// `solver` is null or an unfreed handle from [`wl_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn wl_solver_free(solver: *mut WlSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Parse loops written as in the command line tool, for example
/// "x+ y+ x- y-", "rect 2 3", "commutator 1" or several loops
/// separated by ";".
///
/// # Safety
/// `words` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn wl_loops_parse(words: *const c_char, dim: usize, out: *mut *mut WlLoops) -> WlStatus {
    guard(|| {
        let seq = tri!(parse_sequence(tri!(text(words)), dim).map_err(from_core));
        put(out, Box::into_raw(Box::new(WlLoops(seq))))
    })
}

/// Number of non-null loops.
///
/// # Safety
/// `loops` is null or comes from [`wl_loops_parse`].
#[no_mangle]
pub unsafe extern "C" fn wl_loops_count(loops: *const WlLoops) -> usize {
    loops.as_ref().map_or(0, |l| l.0.len())
}

/// Canonical printed form, re-parseable by [`wl_loops_parse`].
///
/// # Safety
/// `loops` comes from [`wl_loops_parse`]; `buf` has `cap` writable bytes or
/// is null; `needed` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn wl_loops_to_string(
    loops: *const WlLoops,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> WlStatus {
    guard(|| {
        let l = tri!(deref(loops));
        write_string(&l.0.to_string(), buf, cap, needed)
    })
}

/// Enclosed area of a single planar loop.
///
/// # Safety
/// `loops` comes from [`wl_loops_parse`]; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn wl_loops_area(loops: *const WlLoops, out: *mut u64) -> WlStatus {
    guard(|| {
        let l = tri!(deref(loops));
        let [one] = l.0.loops.as_slice() else {
            return fail(WlStatus::Invalid, "area needs exactly one non-null loop");
        };
        put(out, tri!(loop_area(one).map_err(from_core)))
    })
}

/// # Safety
/// `loops` is null or an unfreed handle from [`wl_loops_parse`].
#[no_mangle]
pub unsafe extern "C" fn wl_loops_free(loops: *mut WlLoops) {
    if !loops.is_null() {
        drop(Box::from_raw(loops));
    }
}

/// Coefficients 0..=k_max of the loop expectation from the recursion.
///
/// # Safety
/// Handles come from this library; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn wl_solver_polynomial(
    solver: *mut WlSolver,
    loops: *const WlLoops,
    k_max: usize,
    out: *mut *mut WlPoly,
) -> WlStatus {
    guard(|| {
        let s = tri!(solver.as_mut().ok_or_else(|| fail(WlStatus::NullPointer, "null handle")));
        let l = tri!(deref(loops));
        let p = tri!(s.0.polynomial(&l.0, k_max).map_err(from_core));
        put(out, Box::into_raw(Box::new(WlPoly(p))))
    })
}

/// The exact planar polynomial of one loop through the gauge word.
///
/// # Safety
/// `loops` comes from [`wl_loops_parse`]; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn wl_gauge_polynomial(loops: *const WlLoops, out: *mut *mut WlPoly) -> WlStatus {
    guard(|| {
        let l = tri!(deref(loops));
        let [one] = l.0.loops.as_slice() else {
            return fail(WlStatus::Invalid, "the gauge oracle takes exactly one non-null loop");
        };
        let p = tri!(gauge_polynomial(one, &mut FreeOracle::default()).map_err(from_core));
        put(out, Box::into_raw(Box::new(WlPoly(p))))
    })
}

/// Degree above which the planar polynomial of one loop vanishes.
///
/// # Safety
/// `loops` comes from [`wl_loops_parse`]; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn wl_degree_bound(loops: *const WlLoops, out: *mut usize) -> WlStatus {
    guard(|| {
        let l = tri!(deref(loops));
        let [one] = l.0.loops.as_slice() else {
            return fail(WlStatus::Invalid, "degree bound needs exactly one non-null loop");
        };
        put(out, tri!(degree_bound(one).map_err(from_core)))
    })
}

/// Degree of the polynomial, or -1 for zero.
///
/// # Safety
/// `poly` is null or comes from this library.
#[no_mangle]
pub unsafe extern "C" fn wl_poly_degree(poly: *const WlPoly) -> i64 {
    poly.as_ref().and_then(|p| p.0.degree()).map_or(-1, |d| d as i64)
}

/// # Safety
/// `poly` comes from this library.
#[no_mangle]
pub unsafe extern "C" fn wl_poly_eval(poly: *const WlPoly, beta: f64) -> f64 {
    poly.as_ref().map_or(f64::NAN, |p| p.0.eval(beta))
}

/// Coefficient of β^k as "p/q", or "p" when the denominator is one.
///
/// # Safety
/// `poly` comes from this library; `buf` has `cap` writable bytes or is
/// null; `needed` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn wl_poly_coeff(
    poly: *const WlPoly,
    k: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> WlStatus {
    guard(|| {
        let p = tri!(deref(poly));
        write_string(&rational_string(&p.0.coeff(k)), buf, cap, needed)
    })
}

/// # Safety
/// `poly` comes from this library; `buf` has `cap` writable bytes or is
/// null; `needed` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn wl_poly_to_string(
    poly: *const WlPoly,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> WlStatus {
    guard(|| {
        let p = tri!(deref(poly));
        write_string(&p.0.to_string(), buf, cap, needed)
    })
}

/// # Safety
/// `poly` is null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wl_poly_free(poly: *mut WlPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}
