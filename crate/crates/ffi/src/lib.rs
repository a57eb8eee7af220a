//! C ABI over the emtor library.
//!
//! Objects are opaque handles released by their `_free` function. Every
//! fallible call returns an [`EmtorStatus`]; on failure the message is
//! available from [`emtor_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`emtor_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use emtor::graded::{GradedModule, ModuleJson};
use emtor::groups::catalog_lookup;
use emtor::toric::{toric_cohomology, Fan, FanFile};
use emtor::tor::{koszul_tor, BigradedTor};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmtorStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    ComputeFailed = 4,
    Panic = 5,
}

/// A validated graded module over a polynomial ring.
pub struct EmtorModule(GradedModule);

/// A bigraded Tor table.
pub struct EmtorTor(BigradedTor);

/// A rational fan.
pub struct EmtorFan(Fan);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type Failure = (EmtorStatus, String);

fn fail(status: EmtorStatus, msg: impl ToString) -> Failure {
    (status, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EmtorStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EmtorStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EmtorStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(EmtorStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(EmtorStatus::InvalidUtf8, e))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(EmtorStatus::NullPointer, "null handle"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(EmtorStatus::NullPointer, "null output pointer"))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|e| fail(EmtorStatus::ComputeFailed, e))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn emtor_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn emtor_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a module from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_module` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_module_from_json(json: *const c_char, out_module: *mut *mut EmtorModule) -> EmtorStatus {
    guard(|| {
        let slot = out(out_module)?;
        let j: ModuleJson = serde_json::from_str(text(json)?).map_err(|e| fail(EmtorStatus::InvalidInput, e))?;
        let m = GradedModule::from_json(&j).map_err(|e| fail(EmtorStatus::InvalidInput, e))?;
        let report = m.validate();
        if let Some(v) = report.first() {
            return Err(fail(EmtorStatus::InvalidInput, v));
        }
        *slot = Box::into_raw(Box::new(EmtorModule(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`emtor_module_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn emtor_module_free(m: *mut EmtorModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Tor of the module against Q through degree `bound`, by the Koszul complex.
///
/// # Safety
/// `m` must be a live module handle and `out_tor` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_koszul_tor(m: *const EmtorModule, bound: usize, out_tor: *mut *mut EmtorTor) -> EmtorStatus {
    guard(|| {
        let slot = out(out_tor)?;
        let t = koszul_tor(&handle(m)?.0, bound).map_err(|e| fail(EmtorStatus::ComputeFailed, e))?;
        *slot = Box::into_raw(Box::new(EmtorTor(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a live Tor handle.
#[no_mangle]
pub unsafe extern "C" fn emtor_tor_free(t: *mut EmtorTor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Dimension of Tor in homological degree `p` and internal degree `q`.
///
/// # Safety
/// `t` must be a live Tor handle and `out_dim` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_tor_dim(t: *const EmtorTor, p: usize, q: usize, out_dim: *mut usize) -> EmtorStatus {
    guard(|| {
        *out(out_dim)? = handle(t)?.0.dim(p, q);
        Ok(())
    })
}

/// Largest internal degree up to which the table is exact.
///
/// # Safety
/// `t` must be a live Tor handle and `out_q` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_tor_trusted_q(t: *const EmtorTor, out_q: *mut usize) -> EmtorStatus {
    guard(|| {
        *out(out_q)? = handle(t)?.0.trusted_q();
        Ok(())
    })
}

/// JSON form of the table; release with [`emtor_string_free`].
///
/// # Safety
/// `t` must be a live Tor handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_tor_to_json(t: *const EmtorTor, out_json: *mut *mut c_char) -> EmtorStatus {
    guard(|| {
        let slot = out(out_json)?;
        let s = serde_json::to_string(&handle(t)?.0.to_json()).map_err(|e| fail(EmtorStatus::ComputeFailed, e))?;
        *slot = owned_string(s)?;
        Ok(())
    })
}

/// Parses a single fan (not a family) from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_fan` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_fan_from_json(json: *const c_char, out_fan: *mut *mut EmtorFan) -> EmtorStatus {
    guard(|| {
        let slot = out(out_fan)?;
        let file = FanFile::parse(text(json)?).map_err(|e| fail(EmtorStatus::InvalidInput, e))?;
        let mut fans = file.fans("fan").map_err(|e| fail(EmtorStatus::InvalidInput, e))?;
        if fans.len() != 1 {
            return Err(fail(EmtorStatus::InvalidInput, format!("expected one fan, found {}", fans.len())));
        }
        *slot = Box::into_raw(Box::new(EmtorFan(fans.remove(0).1)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a live fan handle.
#[no_mangle]
pub unsafe extern "C" fn emtor_fan_free(f: *mut EmtorFan) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live fan handle and `out_smooth` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_fan_is_smooth(f: *const EmtorFan, out_smooth: *mut bool) -> EmtorStatus {
    guard(|| {
        *out(out_smooth)? = handle(f)?.0.is_smooth();
        Ok(())
    })
}

/// Weighted cohomology of the toric variety through degree `bound`, as JSON.
///
/// # Safety
/// `f` must be a live fan handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_toric_cohomology_json(
    f: *const EmtorFan,
    bound: usize,
    out_json: *mut *mut c_char,
) -> EmtorStatus {
    guard(|| {
        let slot = out(out_json)?;
        let w = toric_cohomology(&handle(f)?.0, bound).map_err(|e| fail(EmtorStatus::ComputeFailed, e))?;
        let s = serde_json::to_string(&w.to_json()).map_err(|e| fail(EmtorStatus::ComputeFailed, e))?;
        *slot = owned_string(s)?;
        Ok(())
    })
}

/// Weighted cohomology of a catalog group such as `SL:3`, as JSON.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emtor_group_cohomology_json(spec: *const c_char, out_json: *mut *mut c_char) -> EmtorStatus {
    guard(|| {
        let slot = out(out_json)?;
        let g = catalog_lookup(text(spec)?).map_err(|e| fail(EmtorStatus::InvalidInput, e))?;
        let s = serde_json::to_string(&g.group_cohomology().to_weighted().to_json())
            .map_err(|e| fail(EmtorStatus::ComputeFailed, e))?;
        *slot = owned_string(s)?;
        Ok(())
    })
}
