//! C interface to `blab`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`BlabStatus`]; on failure [`blab_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blab::bohr_bourgain::parse_system;
use blab::group::parse_group;
use blab::sets::{count_ap3, doubling_constant, restricted_sumset, sumset};
use blab::{run_increment, BourgainSystem, Error, GSet, Group, Mode};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GroupMismatch = 3,
    Budget = 4,
    Parse = 5,
    NotRegular = 6,
    Internal = 7,
    BufferTooSmall = 8,
}

/// A finite abelian group.
pub struct BlabGroup {
    inner: Group,
}

/// A subset of a group.
pub struct BlabSet {
    inner: GSet,
}

/// A Bourgain system.
pub struct BlabSystem {
    inner: BourgainSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> BlabStatus {
    match err {
        Error::GroupMismatch => BlabStatus::GroupMismatch,
        Error::OverBudget { .. } | Error::BudgetExceeded(_) => BlabStatus::Budget,
        Error::Parse(_) => BlabStatus::Parse,
        Error::NotRegular | Error::RegularityNotFound => BlabStatus::NotRegular,
        Error::Numerical(_) => BlabStatus::Internal,
        _ => BlabStatus::InvalidArgument,
    }
}

struct Fail(BlabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BlabStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> BlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            BlabStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BlabStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail(BlabStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    unsafe { out.write(value) };
    Ok(())
}

/// Parses a group literal such as `Z12`, `Z4xZ6` or `F3^2`.
///
/// # Safety
/// `literal` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_group_parse(
    literal: *const c_char,
    out: *mut *mut BlabGroup,
) -> BlabStatus {
    guard(|| {
        let g = parse_group(unsafe { text(literal, "literal") }?)?;
        unsafe { store(out, Box::into_raw(Box::new(BlabGroup { inner: g }))) }
    })
}

/// # Safety
/// `group` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_group_cardinality(
    group: *const BlabGroup,
    out: *mut usize,
) -> BlabStatus {
    guard(|| {
        let g = unsafe { borrow(group, "group") }?;
        unsafe { store(out, g.inner.cardinality()) }
    })
}

/// # Safety
/// `group` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blab_group_free(group: *mut BlabGroup) {
    if !group.is_null() {
        drop(unsafe { Box::from_raw(group) });
    }
}

/// A set from flat element indices.
///
/// # Safety
/// `indices` must point to `len` readable values (or be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn blab_set_new(
    group: *const BlabGroup,
    indices: *const usize,
    len: usize,
    out: *mut *mut BlabSet,
) -> BlabStatus {
    guard(|| {
        let g = unsafe { borrow(group, "group") }?;
        let items: &[usize] = if len == 0 {
            &[]
        } else if indices.is_null() {
            return Err(null("indices"));
        } else {
            unsafe { std::slice::from_raw_parts(indices, len) }
        };
        let s = GSet::from_indices(&g.inner, items)?;
        unsafe { store(out, Box::into_raw(Box::new(BlabSet { inner: s }))) }
    })
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_set_len(set: *const BlabSet, out: *mut usize) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(set, "set") }?;
        unsafe { store(out, s.inner.len()) }
    })
}

/// Copies the sorted element indices into `buf`. `out_len` always receives
/// the set size; if `capacity` is smaller nothing is copied and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `buf` must have room for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn blab_set_indices(
    set: *const BlabSet,
    buf: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(set, "set") }?;
        let items = s.inner.indices();
        unsafe { store(out_len, items.len()) }?;
        if items.is_empty() {
            return Ok(());
        }
        if buf.is_null() || capacity < items.len() {
            return Err(Fail(
                BlabStatus::BufferTooSmall,
                format!("need room for {} indices", items.len()),
            ));
        }
        unsafe { ptr::copy_nonoverlapping(items.as_ptr(), buf, items.len()) };
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blab_set_free(set: *mut BlabSet) {
    if !set.is_null() {
        drop(unsafe { Box::from_raw(set) });
    }
}

/// `A + B`, or the restricted sumset when `restricted` is true.
///
/// # Safety
/// Both sets must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_sumset(
    a: *const BlabSet,
    b: *const BlabSet,
    restricted: bool,
    out: *mut *mut BlabSet,
) -> BlabStatus {
    guard(|| {
        let (a, b) = unsafe { (borrow(a, "a")?, borrow(b, "b")?) };
        let s = if restricted {
            restricted_sumset(&a.inner, &b.inner)?
        } else {
            sumset(&a.inner, &b.inner)?
        };
        unsafe { store(out, Box::into_raw(Box::new(BlabSet { inner: s }))) }
    })
}

/// Number of pairs `(x, y)` with `x − y, x, x + y` in the set, and those with `y ≠ 0`.
///
/// # Safety
/// `set` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn blab_count_ap3(
    set: *const BlabSet,
    total: *mut u64,
    nontrivial: *mut u64,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(set, "set") }?;
        let c = count_ap3(&s.inner)?;
        unsafe {
            store(total, c.total)?;
            store(nontrivial, c.nontrivial)
        }
    })
}

/// `|A + A| / |A|` as a reduced fraction.
///
/// # Safety
/// `set` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn blab_doubling_constant(
    set: *const BlabSet,
    numer: *mut u64,
    denom: *mut u64,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(set, "set") }?;
        let k = doubling_constant(&s.inner)?;
        unsafe {
            store(numer, *k.numer())?;
            store(denom, *k.denom())
        }
    })
}

/// Parses a system descriptor such as `bohr(g=Z16; freqs=1,5; delta=0.2)`.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_system_parse(
    descriptor: *const c_char,
    out: *mut *mut BlabSystem,
) -> BlabStatus {
    guard(|| {
        let s = parse_system(unsafe { text(descriptor, "descriptor") }?)?;
        unsafe { store(out, Box::into_raw(Box::new(BlabSystem { inner: s }))) }
    })
}

/// The set at radius `rho`.
///
/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_system_materialize(
    system: *const BlabSystem,
    rho: f64,
    out: *mut *mut BlabSet,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(system, "system") }?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Fail(
                BlabStatus::InvalidArgument,
                format!("radius {rho} is not positive"),
            ));
        }
        let set = s.inner.materialize(rho);
        unsafe { store(out, Box::into_raw(Box::new(BlabSet { inner: set }))) }
    })
}

/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_system_density(
    system: *const BlabSystem,
    out: *mut f64,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(system, "system") }?;
        unsafe { store(out, s.inner.density()) }
    })
}

/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_system_dimension(
    system: *const BlabSystem,
    out: *mut f64,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(system, "system") }?;
        unsafe { store(out, s.inner.dimension()) }
    })
}

/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_system_is_regular(
    system: *const BlabSystem,
    out: *mut bool,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(system, "system") }?;
        unsafe { store(out, s.inner.is_regular()) }
    })
}

/// A regular dilate `λS` with `λ ∈ [1/2, 1)`.
///
/// # Safety
/// `system` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn blab_system_regular_dilate(
    system: *const BlabSystem,
    lambda: *mut f64,
    out: *mut *mut BlabSystem,
) -> BlabStatus {
    guard(|| {
        let s = unsafe { borrow(system, "system") }?;
        let (l, r) = s.inner.regular_dilate()?;
        unsafe {
            store(lambda, l)?;
            store(out, Box::into_raw(Box::new(BlabSystem { inner: r })))
        }
    })
}

/// # Safety
/// `system` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blab_system_free(system: *mut BlabSystem) {
    if !system.is_null() {
        drop(unsafe { Box::from_raw(system) });
    }
}

/// Runs the density-increment iteration and returns its text trace.
/// A null `system` means the whole group. `mode` is 0 for practical
/// constants and 1 for the exact ones. Release the string with
/// [`blab_string_free`].
///
/// # Safety
/// `set` must be a live handle, `system` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn blab_trace(
    set: *const BlabSet,
    system: *const BlabSystem,
    mode: u32,
    budget: usize,
    out: *mut *mut c_char,
) -> BlabStatus {
    guard(|| {
        let a = unsafe { borrow(set, "set") }?;
        let sys = match unsafe { system.as_ref() } {
            Some(s) => s.inner.clone(),
            None => BourgainSystem::trivial(a.inner.group()),
        };
        let mode = match mode {
            0 => Mode::Practical,
            1 => Mode::Paper,
            m => {
                return Err(Fail(
                    BlabStatus::InvalidArgument,
                    format!("unknown mode {m}"),
                ))
            }
        };
        let trace = run_increment(&a.inner, &sys, mode, budget)?;
        let s =
            CString::new(trace.to_text()).map_err(|e| Fail(BlabStatus::Internal, e.to_string()))?;
        unsafe { store(out, s.into_raw()) }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the most recent failure on this thread, empty after a
/// success. Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn blab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
