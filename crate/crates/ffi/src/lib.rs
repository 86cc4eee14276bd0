//! C ABI over the `ipsf` solver.
//!
//! Every function returns an [`IpsfStatus`]. On failure a message describing
//! the error is kept per thread and can be read with [`ipsf_last_error`].
//! Handles are opaque; each `*_new`/`*_load`/`ipsf_solve` result must be
//! released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ipsf::assembly::PolynomialPotential;
use ipsf::cache::{load, store, TableBundle};
use ipsf::mask::ScaleOrder;
use ipsf::solver::{solve, Solution};
use ipsf::wavefunction::reconstruct;
use ipsf::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpsfStatus {
    Ok = 0,
    /// Bad parameter value (order, level, domain, state index, ...).
    InvalidArgument = 1,
    NullPointer = 2,
    /// Factorization, eigensolver or certification failure.
    Numerical = 3,
    Io = 4,
    /// Table file failed its checksum or has an unknown version.
    Integrity = 5,
    /// Output buffer too short; the required length was reported.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Coefficient tables for one scaling-function order.
pub struct IpsfTables {
    inner: TableBundle,
}

/// Eigenpairs of one assembled problem.
pub struct IpsfSpectrum {
    inner: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> IpsfStatus {
    match e {
        Error::Io(_) | Error::MissingFile(_) => IpsfStatus::Io,
        Error::Integrity { .. } | Error::Version { .. } => IpsfStatus::Integrity,
        e if e.is_validation() => IpsfStatus::InvalidArgument,
        _ => IpsfStatus::Numerical,
    }
}

/// Run `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), (IpsfStatus, String)>) -> IpsfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IpsfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IpsfStatus::Panic
        }
    }
}

fn lift(e: Error) -> (IpsfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (IpsfStatus, String) {
    (IpsfStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: String) -> (IpsfStatus, String) {
    (IpsfStatus::InvalidArgument, msg)
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, (IpsfStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| invalid("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Message for the most recent failed call on this thread; empty if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ipsf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ipsf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Compute the mask, connection and moment tables for order `order`
/// (even, >= 2) and monomial degrees up to `m_max`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_new(order: i64, m_max: u32, out: *mut *mut IpsfTables) -> IpsfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let order = ScaleOrder::new(order).map_err(lift)?;
        let inner = TableBundle::compute(order, m_max as usize).map_err(lift)?;
        *out = Box::into_raw(Box::new(IpsfTables { inner }));
        Ok(())
    })
}

/// Load tables written by [`ipsf_tables_store`].
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_load(path: *const c_char, out: *mut *mut IpsfTables) -> IpsfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = load(&path_arg(path)?).map_err(lift)?;
        *out = Box::into_raw(Box::new(IpsfTables { inner }));
        Ok(())
    })
}

/// Write tables atomically to `path`.
///
/// # Safety
/// `tables` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_store(tables: *const IpsfTables, path: *const c_char) -> IpsfStatus {
    guard(|| {
        let t = tables.as_ref().ok_or_else(|| null("tables"))?;
        store(&t.inner, &path_arg(path)?).map_err(lift)
    })
}

/// # Safety
/// `tables` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_free(tables: *mut IpsfTables) {
    if !tables.is_null() {
        drop(Box::from_raw(tables));
    }
}

/// Refinement coefficient `a_k` (zero outside the support).
///
/// # Safety
/// `tables` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_mask(tables: *const IpsfTables, k: i64, out: *mut f64) -> IpsfStatus {
    guard(|| {
        let t = tables.as_ref().ok_or_else(|| null("tables"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = t.inner.mask.get(k);
        Ok(())
    })
}

/// Connection coefficient `L_k = <phi'', phi(. - k)>`.
///
/// # Safety
/// `tables` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_connection(tables: *const IpsfTables, k: i64, out: *mut f64) -> IpsfStatus {
    guard(|| {
        let t = tables.as_ref().ok_or_else(|| null("tables"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = t.inner.connection.get(k);
        Ok(())
    })
}

/// Moment `H_{m,k} = <x^m phi(x - k), phi(x)>`.
///
/// # Safety
/// `tables` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ipsf_tables_moment(tables: *const IpsfTables, m: u32, k: i64, out: *mut f64) -> IpsfStatus {
    guard(|| {
        let t = tables.as_ref().ok_or_else(|| null("tables"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = m as usize;
        if m > t.inner.m_max() {
            return Err(lift(Error::MomentOrder {
                requested: m,
                available: t.inner.m_max(),
            }));
        }
        *out = t.inner.moments.get(m, k);
        Ok(())
    })
}

/// Lowest `n_states` eigenpairs of `-psi'' + V psi = E psi` on
/// `[-radius, radius]` at resolution `level`, with
/// `V(x) = sum_i coeffs[i] x^i`.
///
/// # Safety
/// `tables` must come from this library, `coeffs` must point to `n_coeffs`
/// readable doubles, and `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn ipsf_solve(
    tables: *const IpsfTables,
    coeffs: *const f64,
    n_coeffs: usize,
    level: u32,
    radius: f64,
    n_states: usize,
    out: *mut *mut IpsfSpectrum,
) -> IpsfStatus {
    guard(|| {
        let t = tables.as_ref().ok_or_else(|| null("tables"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if coeffs.is_null() && n_coeffs > 0 {
            return Err(null("coeffs"));
        }
        let c = if n_coeffs == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(coeffs, n_coeffs)
        };
        let pot = PolynomialPotential::new(c.to_vec()).map_err(lift)?;
        let inner = solve(&t.inner, &pot, level, radius, n_states).map_err(lift)?;
        *out = Box::into_raw(Box::new(IpsfSpectrum { inner }));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ipsf_spectrum_free(spectrum: *mut IpsfSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of computed eigenpairs and the basis dimension.
///
/// # Safety
/// `spectrum` must come from this library; outputs may be null if unwanted.
#[no_mangle]
pub unsafe extern "C" fn ipsf_spectrum_size(
    spectrum: *const IpsfSpectrum,
    n_states: *mut usize,
    dimension: *mut usize,
) -> IpsfStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if let Some(n) = n_states.as_mut() {
            *n = s.inner.spectrum.len();
        }
        if let Some(d) = dimension.as_mut() {
            *d = s.inner.problem.dimension();
        }
        Ok(())
    })
}

/// Copy the ascending eigenvalues into `out[0..len]`; `len` must be at least
/// the number of states.
///
/// # Safety
/// `spectrum` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ipsf_spectrum_eigenvalues(
    spectrum: *const IpsfSpectrum,
    out: *mut f64,
    len: usize,
) -> IpsfStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        copy_out(&s.inner.spectrum.eigenvalues, out, len)
    })
}

/// Copy the residuals `||A c - E B c||` into `out[0..len]`.
///
/// # Safety
/// `spectrum` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ipsf_spectrum_residuals(
    spectrum: *const IpsfSpectrum,
    out: *mut f64,
    len: usize,
) -> IpsfStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        copy_out(&s.inner.spectrum.residuals, out, len)
    })
}

/// Copy the B-normalized coefficient vector of `state` into `out[0..len]`;
/// `len` must be at least the basis dimension.
///
/// # Safety
/// `spectrum` must come from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ipsf_spectrum_eigenvector(
    spectrum: *const IpsfSpectrum,
    state: usize,
    out: *mut f64,
    len: usize,
) -> IpsfStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let v = s
            .inner
            .spectrum
            .eigenvectors
            .get(state)
            .ok_or_else(|| invalid(format!("state {state} not computed")))?;
        copy_out(v, out, len)
    })
}

/// Sample eigenfunction `state` on the grid `i / 2^depth` over the domain
/// (`depth >= level`). Writes `*written` points to `x` and `psi`; if `len`
/// is too small, returns `BUFFER_TOO_SMALL` with the required count in
/// `*written`.
///
/// # Safety
/// Handles must come from this library and describe the same order;
/// `x` and `psi` must hold `len` doubles; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ipsf_spectrum_sample(
    spectrum: *const IpsfSpectrum,
    tables: *const IpsfTables,
    state: usize,
    depth: u32,
    x: *mut f64,
    psi: *mut f64,
    len: usize,
    written: *mut usize,
) -> IpsfStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let t = tables.as_ref().ok_or_else(|| null("tables"))?;
        let written = written.as_mut().ok_or_else(|| null("written"))?;
        let disc = &s.inner.problem.disc;
        if depth < disc.level {
            return Err(invalid(format!(
                "sampling depth {depth} is coarser than level {}",
                disc.level
            )));
        }
        let need = (2 * (disc.radius << depth) + 1) as usize;
        *written = need;
        if len < need {
            return Err((
                IpsfStatus::BufferTooSmall,
                format!("buffer holds {len} points, {need} needed"),
            ));
        }
        if x.is_null() || psi.is_null() {
            return Err(null("output buffer"));
        }
        let samples = t.inner.samples(depth - disc.level);
        let w = reconstruct(&s.inner.spectrum, state, &s.inner.problem, &samples, depth).map_err(lift)?;
        ptr::copy_nonoverlapping(w.grid.as_ptr(), x, need);
        ptr::copy_nonoverlapping(w.values.as_ptr(), psi, need);
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), (IpsfStatus, String)> {
    if len < src.len() {
        return Err((
            IpsfStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}
