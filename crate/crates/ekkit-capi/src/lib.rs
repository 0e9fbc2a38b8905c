//! C interface to `ekkit`.
//!
//! Every fallible function returns an [`EkStatus`]; on failure a message is
//! available from [`ek_last_error`] on the same thread. Handles are opaque
//! and released with their `_free` function; strings handed out by the
//! library are released with [`ek_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ekkit::classical::{eisenstein, eisenstein2_star, Tau};
use ekkit::ekseries::{ek, ek_direct, f_star, g_star, EKValue, SeriesParams, Variant};
use ekkit::harness::{run_check, CheckId, Env};
use ekkit::symrec::{Reducer, Var};
use ekkit::{EkError, Lattice, C64};

/// Status codes. `EK_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Degenerate = 3,
    Domain = 4,
    Pole = 5,
    Truncation = 6,
    NotComposable = 7,
    Shape = 8,
    InvalidConfig = 9,
    MissingGenerator = 10,
    UnknownCheck = 11,
    Io = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EkComplex {
    pub re: f64,
    pub im: f64,
}

/// A series value with its truncation diagnostics.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EkValue {
    pub value: EkComplex,
    pub radius_used: f64,
    pub tail_bound: f64,
}

/// A normalized lattice `Z + Zτ`.
pub struct EkLattice {
    tau: Tau,
    lattice: Lattice,
}

/// Memoized reduction polynomials.
pub struct EkReducer {
    inner: Reducer,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &EkError) -> EkStatus {
    match e {
        EkError::Degenerate(_) => EkStatus::Degenerate,
        EkError::Domain(_) => EkStatus::Domain,
        EkError::Pole(_) => EkStatus::Pole,
        EkError::Truncation { .. } => EkStatus::Truncation,
        EkError::NotComposable => EkStatus::NotComposable,
        EkError::Shape(_) => EkStatus::Shape,
        EkError::InvalidConfig(_) => EkStatus::InvalidConfig,
        EkError::MissingGenerator(_) => EkStatus::MissingGenerator,
        EkError::UnknownCheck(_) => EkStatus::UnknownCheck,
        EkError::Io(_) => EkStatus::Io,
    }
}

enum Fail {
    Null,
    Utf8,
    Ek(EkError),
}

impl From<EkError> for Fail {
    fn from(e: EkError) -> Self {
        Fail::Ek(e)
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EkStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            EkStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            EkStatus::InvalidUtf8
        }
        Ok(Err(Fail::Ek(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            EkStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Utf8)
}

fn c(z: EkComplex) -> C64 {
    C64::new(z.re, z.im)
}

fn ek_c(z: C64) -> EkComplex {
    EkComplex { re: z.re, im: z.im }
}

fn value(v: EKValue) -> EkValue {
    EkValue { value: ek_c(v.value), radius_used: v.radius_used, tail_bound: v.tail_bound }
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last error on this thread (empty after a success). The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ek_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ek_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Create the lattice `Z + Zτ`; `Im τ` must be positive.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ek_lattice_new(tau: EkComplex, out: *mut *mut EkLattice) -> EkStatus {
    guard(|| {
        let tau = Tau::new(c(tau))?;
        let h = Box::new(EkLattice { tau, lattice: tau.lattice() });
        write(out, Box::into_raw(h))
    })
}

/// # Safety
/// `l` must be null or a handle from `ek_lattice_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ek_lattice_free(l: *mut EkLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Covolume constant `A` of the lattice.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_lattice_a(l: *const EkLattice, out: *mut f64) -> EkStatus {
    guard(|| write(out, deref(l)?.lattice.a()))
}

/// The pairing `⟨z, w⟩`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_pairing(l: *const EkLattice, z: EkComplex, w: EkComplex, out: *mut EkComplex) -> EkStatus {
    guard(|| write(out, ek_c(deref(l)?.lattice.pairing(c(z), c(w)))))
}

/// `f*_{m,n}(z, w)`; `tilde` selects the tilde variant.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_f_star(
    l: *const EkLattice,
    m: u32,
    n: u32,
    z: EkComplex,
    w: EkComplex,
    tilde: bool,
    out: *mut EkValue,
) -> EkStatus {
    guard(|| {
        let l = &deref(l)?.lattice;
        let variant = if tilde { Variant::Tilde } else { Variant::Plain };
        let v = f_star(m as usize, n as usize, &l.strat(c(z)), &l.strat(c(w)), l, &SeriesParams::default(), variant)?;
        write(out, value(v))
    })
}

/// `g*_{a,b}(z, w)`; `tilde` selects the tilde variant.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_g_star(
    l: *const EkLattice,
    a: u32,
    b: u32,
    z: EkComplex,
    w: EkComplex,
    tilde: bool,
    out: *mut EkValue,
) -> EkStatus {
    guard(|| {
        let l = &deref(l)?.lattice;
        let variant = if tilde { Variant::Tilde } else { Variant::Plain };
        let v = g_star(a as usize, b as usize, &l.strat(c(z)), &l.strat(c(w)), l, &SeriesParams::default(), variant)?;
        write(out, value(v))
    })
}

/// Eisenstein–Kronecker number `e*_{a,b}(z, w)`, `b ≥ 1`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_ek(
    l: *const EkLattice,
    a: u32,
    b: u32,
    z: EkComplex,
    w: EkComplex,
    out: *mut EkValue,
) -> EkStatus {
    guard(|| {
        let l = &deref(l)?.lattice;
        let v = ek(a as usize, b as usize, &l.strat(c(z)), &l.strat(c(w)), l, &SeriesParams::default())?;
        write(out, value(v))
    })
}

/// Direct partial sum over `|λ + z| ≤ radius`; needs `b ≥ a + 3`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_ek_direct(
    l: *const EkLattice,
    a: u32,
    b: u32,
    z: EkComplex,
    w: EkComplex,
    radius: f64,
    out: *mut EkValue,
) -> EkStatus {
    guard(|| {
        let l = &deref(l)?.lattice;
        let v = ek_direct(a as usize, b as usize, &l.strat(c(z)), &l.strat(c(w)), l, radius)?;
        write(out, value(v))
    })
}

/// `e_{2k}` for even weight `≥ 4`; weight 2 gives `e*_2`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_eisenstein(l: *const EkLattice, weight: u32, out: *mut EkComplex) -> EkStatus {
    guard(|| {
        let l = &deref(l)?.lattice;
        let v = if weight == 2 { eisenstein2_star(l, 1e-15) } else { eisenstein(l, weight as usize, 1e-15)? };
        write(out, ek_c(v))
    })
}

/// Run one named check on this lattice's τ. `*out_json` receives the JSON
/// report (free with `ek_string_free`), `*out_pass` the verdict.
///
/// # Safety
/// `check` must be a NUL-terminated string; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ek_run_check(
    l: *const EkLattice,
    check: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
    out_pass: *mut bool,
) -> EkStatus {
    guard(|| {
        let tau = deref(l)?.tau;
        let id: CheckId = str_arg(check)?.parse()?;
        if out_json.is_null() || out_pass.is_null() {
            return Err(Fail::Null);
        }
        let r = run_check(id, &Env::new(tau.value(), seed)?)?;
        write(out_pass, r.pass)?;
        write(out_json, owned_string(r.to_json()))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ek_reducer_new(out: *mut *mut EkReducer) -> EkStatus {
    guard(|| write(out, Box::into_raw(Box::new(EkReducer { inner: Reducer::new() }))))
}

/// # Safety
/// `r` must be null or a handle from `ek_reducer_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ek_reducer_free(r: *mut EkReducer) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Canonical text of the polynomial expressing `g*_{a,b}(z, w)`, or
/// `g*_{a,b}(z, 0)` when `one_var` is set. Free with `ek_string_free`.
///
/// # Safety
/// Pointers must be valid; the handle must not be used concurrently.
#[no_mangle]
pub unsafe extern "C" fn ek_reduce(
    r: *mut EkReducer,
    a: u32,
    b: u32,
    one_var: bool,
    out: *mut *mut c_char,
) -> EkStatus {
    guard(|| {
        let r = r.as_mut().ok_or(Fail::Null)?;
        if a + b > 12 {
            return Err(EkError::Domain("a + b ≤ 12 supported".into()).into());
        }
        let p =
            if one_var { r.inner.one_var(Var::Z, a as usize, b as usize) } else { r.inner.gab(a as usize, b as usize) };
        write(out, owned_string(p.to_string()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> *mut EkLattice {
        let mut l = ptr::null_mut();
        assert_eq!(unsafe { ek_lattice_new(EkComplex { re: 0.0, im: 1.0 }, &mut l) }, EkStatus::Ok);
        l
    }

    fn last() -> String {
        unsafe { CStr::from_ptr(ek_last_error()) }.to_str().unwrap().to_string()
    }

    #[test]
    fn lattice_round_trip() {
        let l = lat();
        let mut a = 0.0;
        assert_eq!(unsafe { ek_lattice_a(l, &mut a) }, EkStatus::Ok);
        assert!((a - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        unsafe { ek_lattice_free(l) };
    }

    #[test]
    fn bad_tau_and_nulls() {
        let mut l = ptr::null_mut();
        assert_eq!(unsafe { ek_lattice_new(EkComplex { re: 0.0, im: -1.0 }, &mut l) }, EkStatus::Domain);
        assert!(l.is_null());
        assert!(!last().is_empty());
        let mut v = EkValue::default();
        let z = EkComplex { re: 0.3, im: 0.2 };
        assert_eq!(unsafe { ek_g_star(ptr::null(), 0, 0, z, z, false, &mut v) }, EkStatus::NullPointer);
        let l = lat();
        assert_eq!(unsafe { ek_g_star(l, 0, 0, z, z, false, ptr::null_mut()) }, EkStatus::NullPointer);
        unsafe { ek_lattice_free(l) };
    }

    #[test]
    fn ek_matches_g_star() {
        let l = lat();
        let (z, w) = (EkComplex { re: 0.3, im: 0.2 }, EkComplex { re: 0.1, im: 0.4 });
        let mut e = EkValue::default();
        let mut g = EkValue::default();
        unsafe {
            assert_eq!(ek_ek(l, 0, 1, z, w, &mut e), EkStatus::Ok);
            let wn = EkComplex { re: -w.re, im: -w.im };
            assert_eq!(ek_g_star(l, 0, 0, z, wn, false, &mut g), EkStatus::Ok);
            assert_eq!(ek_ek(l, 0, 0, z, w, &mut e), EkStatus::Domain);
            ek_lattice_free(l);
        }
        // e*_{0,1}(z, w) = -g*_{0,0}(z, -w)
        assert!((e.value.re + g.value.re).abs() < 1e-12 && (e.value.im + g.value.im).abs() < 1e-12);
    }

    #[test]
    fn check_and_reducer_strings() {
        let l = lat();
        let name = CString::new("zeta-id").unwrap();
        let mut js = ptr::null_mut();
        let mut pass = false;
        unsafe {
            assert_eq!(ek_run_check(l, name.as_ptr(), 1, &mut js, &mut pass), EkStatus::Ok);
            assert!(pass);
            assert!(CStr::from_ptr(js).to_str().unwrap().contains("\"check\":\"zeta-id\""));
            ek_string_free(js);
            let bad = CString::new("nope").unwrap();
            assert_eq!(ek_run_check(l, bad.as_ptr(), 1, &mut js, &mut pass), EkStatus::UnknownCheck);
            ek_lattice_free(l);

            let mut r = ptr::null_mut();
            assert_eq!(ek_reducer_new(&mut r), EkStatus::Ok);
            let mut s = ptr::null_mut();
            assert_eq!(ek_reduce(r, 0, 0, false, &mut s), EkStatus::Ok);
            assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "1 * G00");
            ek_string_free(s);
            ek_reducer_free(r);
        }
    }

    #[test]
    fn eisenstein_square_lattice() {
        let l = lat();
        let mut v = EkComplex::default();
        unsafe {
            assert_eq!(ek_eisenstein(l, 6, &mut v), EkStatus::Ok);
            assert!(v.re.hypot(v.im) < 1e-10);
            assert_eq!(ek_eisenstein(l, 5, &mut v), EkStatus::Domain);
            ek_lattice_free(l);
        }
    }
}
