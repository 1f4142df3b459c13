//! C ABI over `qfrac`.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Fallible calls return a [`QfracStatus`];
//! the message of the last failure on the calling thread is available from
//! [`qfrac_last_error`]. Strings returned to C are owned by the caller and
//! released with [`qfrac_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qfrac::cert::{parse_lines, verify_all, Certificate};
use qfrac::fraction::eval;
use qfrac::search::{brute_force_enum, diophantine_search_upto, FoundLoop, SearchBudget};
use qfrac::{Conductor, Path, PathEval, QfracError};

/// Result codes of the C interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QfracStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Verification = 5,
    Io = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// A path `(m_0, ..., m_k)`.
pub struct QfracPath(Path);

/// A conductor `q = a/b`.
pub struct QfracConductor(Conductor);

/// The exact evaluation of `c(q, m)`.
pub struct QfracEval(PathEval);

/// Loops returned by a search.
pub struct QfracSearch {
    loops: Vec<FoundLoop>,
    exhaustive: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &QfracError) -> QfracStatus {
    match err {
        QfracError::Parse(_) | QfracError::Json(_) => QfracStatus::Parse,
        QfracError::Verification(_) | QfracError::ValueMismatch(..) | QfracError::CongruenceFailed { .. } => {
            QfracStatus::Verification
        }
        QfracError::Io(_) => QfracStatus::Io,
        _ => QfracStatus::InvalidArgument,
    }
}

/// Runs `f`, recording its error message and turning panics into
/// [`QfracStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (QfracStatus, String)>) -> QfracStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QfracStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QfracStatus::Panic
        }
    }
}

fn lib_err(e: QfracError) -> (QfracStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (QfracStatus, String)> {
    if s.is_null() {
        return Err((QfracStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (QfracStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QfracStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (QfracStatus::NullPointer, format!("null {what}")))
}

fn check_out<T>(out: *mut *mut T) -> Result<(), (QfracStatus, String)> {
    if out.is_null() {
        Err((QfracStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

fn boxed<T>(x: T) -> *mut T {
    Box::into_raw(Box::new(x))
}

/// Message of the last failed call on this thread, or NULL. Release with
/// [`qfrac_string_free`].
#[no_mangle]
pub extern "C" fn qfrac_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been released before.
#[no_mangle]
pub unsafe extern "C" fn qfrac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a path such as `"1,-1,-3"` or `"(1, -1, -3)"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_path_parse(text: *const c_char, out: *mut *mut QfracPath) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let p: Path = read_str(text)?.parse().map_err(lib_err)?;
        *out = boxed(QfracPath(p));
        Ok(())
    })
}

/// Builds a path from `len` entries.
///
/// # Safety
/// `entries` must point to `len` integers and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_path_new(entries: *const i64, len: usize, out: *mut *mut QfracPath) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        if entries.is_null() || len == 0 {
            return Err((QfracStatus::InvalidArgument, "a path needs at least one entry".into()));
        }
        let v = std::slice::from_raw_parts(entries, len);
        *out = boxed(QfracPath(Path::from_i64s(v)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not have been released before.
#[no_mangle]
pub unsafe extern "C" fn qfrac_path_free(p: *mut QfracPath) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The length `k` of `(m_0, ..., m_k)`, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live path handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_path_length(p: *const QfracPath) -> usize {
    p.as_ref().map_or(0, |p| p.0.length())
}

/// The path as text, or NULL for NULL.
///
/// # Safety
/// `p` must be NULL or a live path handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_path_to_string(p: *const QfracPath) -> *mut c_char {
    p.as_ref().map_or(ptr::null_mut(), |p| to_c_string(p.0.to_string()))
}

/// Parses a positive rational such as `"2/3"` or `"5"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_conductor_parse(text: *const c_char, out: *mut *mut QfracConductor) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let q: Conductor = read_str(text)?.parse().map_err(lib_err)?;
        *out = boxed(QfracConductor(q));
        Ok(())
    })
}

/// `q = a/b` in lowest terms; `a` and `b` must be positive.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_conductor_new(a: u64, b: u64, out: *mut *mut QfracConductor) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let q = Conductor::from_parts(a, b).map_err(lib_err)?;
        *out = boxed(QfracConductor(q));
        Ok(())
    })
}

/// # Safety
/// `q` must come from this library and not have been released before.
#[no_mangle]
pub unsafe extern "C" fn qfrac_conductor_free(q: *mut QfracConductor) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Evaluates `c(q, m)` and the weight exactly.
///
/// # Safety
/// `q` and `m` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval(
    q: *const QfracConductor,
    m: *const QfracPath,
    out: *mut *mut QfracEval,
) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let (q, m) = (deref(q, "conductor")?, deref(m, "path")?);
        *out = boxed(QfracEval(eval(&q.0, &m.0)));
        Ok(())
    })
}

/// # Safety
/// `e` must come from this library and not have been released before.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval_free(e: *mut QfracEval) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Whether every prefix value before the last is non-zero.
///
/// # Safety
/// `e` must be NULL or a live evaluation handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval_is_path(e: *const QfracEval) -> bool {
    e.as_ref().is_some_and(|e| e.0.is_path())
}

/// Whether the path closes, `c(q, m) = 0`.
///
/// # Safety
/// `e` must be NULL or a live evaluation handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval_is_loop(e: *const QfracEval) -> bool {
    e.as_ref().is_some_and(|e| e.0.is_loop())
}

/// `c(q, m)` as `"p/q"`, or NULL when `m` is not a path.
///
/// # Safety
/// `e` must be NULL or a live evaluation handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval_value(e: *const QfracEval) -> *mut c_char {
    e.as_ref()
        .and_then(|e| e.0.value())
        .map_or(ptr::null_mut(), |v| to_c_string(v.to_string()))
}

/// The squared weight as `"p/q"`, or NULL when `m` is not a path.
///
/// # Safety
/// `e` must be NULL or a live evaluation handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval_weight_sq(e: *const QfracEval) -> *mut c_char {
    e.as_ref()
        .and_then(|e| e.0.weight_sq.as_ref())
        .map_or(ptr::null_mut(), |w| to_c_string(w.value().to_string()))
}

/// The weight itself, a rational or `"sqrt(x)"`, or NULL when `m` is not a
/// path.
///
/// # Safety
/// `e` must be NULL or a live evaluation handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_eval_weight(e: *const QfracEval) -> *mut c_char {
    e.as_ref()
        .and_then(|e| e.0.weight_sq.as_ref())
        .map_or(ptr::null_mut(), |w| to_c_string(w.display_root()))
}

/// Re-verifies one certificate line on its own. Closure records need their
/// parent and fail here; use [`qfrac_verify_certificates`] for those.
///
/// # Safety
/// `line` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qfrac_verify_certificate_line(line: *const c_char) -> QfracStatus {
    guard(|| {
        let c = Certificate::from_line(read_str(line)?.trim()).map_err(lib_err)?;
        c.verify_standalone().map_err(lib_err)
    })
}

/// Re-verifies every line of a certificate file's text. On
/// [`QfracStatus::Verification`], `failed` (if not NULL) receives the number
/// of failing records.
///
/// # Safety
/// `text` must be a NUL-terminated string; `failed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn qfrac_verify_certificates(text: *const c_char, failed: *mut usize) -> QfracStatus {
    guard(|| {
        let certs = parse_lines(read_str(text)?).map_err(lib_err)?;
        let bad: Vec<String> = certs
            .iter()
            .zip(verify_all(&certs))
            .filter_map(|(c, v)| v.err().map(|e| format!("{}: {e}", c.identity())))
            .collect();
        if let Some(f) = failed.as_mut() {
            *f = bad.len();
        }
        match bad.first() {
            None => Ok(()),
            Some(first) => Err((QfracStatus::Verification, first.clone())),
        }
    })
}

/// Loops of length `1..=max_length` with all `|m_j| <= entry_bound` by direct
/// enumeration.
///
/// # Safety
/// `q` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_brute_force(
    q: *const QfracConductor,
    max_length: usize,
    entry_bound: u64,
    out: *mut *mut QfracSearch,
) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let q = deref(q, "conductor")?;
        let r = brute_force_enum(&q.0, max_length, entry_bound);
        *out = boxed(QfracSearch {
            loops: r.loops_found,
            exhaustive: r.exhaustive,
        });
        Ok(())
    })
}

/// Loops of length `1..=max_length` from the Diophantine solver; an
/// `entry_bound` of 0 means unbounded entries.
///
/// # Safety
/// `q` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_diophantine_search(
    q: *const QfracConductor,
    max_length: usize,
    entry_bound: u64,
    out: *mut *mut QfracSearch,
) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let q = deref(q, "conductor")?;
        let mut budget = SearchBudget::default().with_max_length(max_length);
        if entry_bound > 0 {
            budget = budget.with_entry_bound(entry_bound);
        }
        let r = diophantine_search_upto(q.0.a().clone(), q.0.b().clone(), max_length, &budget).map_err(lib_err)?;
        *out = boxed(QfracSearch {
            loops: r.loops_found,
            exhaustive: r.exhaustive,
        });
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not have been released before.
#[no_mangle]
pub unsafe extern "C" fn qfrac_search_free(s: *mut QfracSearch) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of loops found, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live search handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_search_len(s: *const QfracSearch) -> usize {
    s.as_ref().map_or(0, |s| s.loops.len())
}

/// Whether the search covered its whole range.
///
/// # Safety
/// `s` must be NULL or a live search handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_search_exhaustive(s: *const QfracSearch) -> bool {
    s.as_ref().is_some_and(|s| s.exhaustive)
}

/// A new path handle for loop `i`.
///
/// # Safety
/// `s` must be a live search handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qfrac_search_get(s: *const QfracSearch, i: usize, out: *mut *mut QfracPath) -> QfracStatus {
    guard(|| {
        check_out(out)?;
        let s = deref(s, "search")?;
        let l = s
            .loops
            .get(i)
            .ok_or_else(|| (QfracStatus::OutOfRange, format!("index {i} of {}", s.loops.len())))?;
        *out = boxed(QfracPath(l.path.clone()));
        Ok(())
    })
}

/// The squared weight of loop `i` as `"p/q"`, or NULL when out of range.
///
/// # Safety
/// `s` must be NULL or a live search handle.
#[no_mangle]
pub unsafe extern "C" fn qfrac_search_weight_sq(s: *const QfracSearch, i: usize) -> *mut c_char {
    s.as_ref()
        .and_then(|s| s.loops.get(i))
        .map_or(ptr::null_mut(), |l| to_c_string(l.weight_sq.value().to_string()))
}
