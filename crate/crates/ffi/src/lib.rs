//! C ABI over `dirac_infmass`.
//!
//! Every fallible call returns a `DiStatus`; on failure the message is kept per
//! thread and read with `di_last_error_message`. Domains are opaque handles
//! released with `di_domain_free`; strings returned by the library are
//! released with `di_string_free`. Panics never cross the boundary.

use dirac_infmass::bounds::evaluate_bounds;
use dirac_infmass::config::SolverConfig;
use dirac_infmass::geometry::{make_radial_domain, DomainSpec};
use dirac_infmass::harness::{e1_variational, mu_evaluator, random_domain, solve_domain};
use dirac_infmass::specfun::{bessel_j0, bessel_j1, disk_e1};
use dirac_infmass::{Error, ErrorClass};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDomain = 3,
    SolverFailure = 4,
    Panic = 5,
}

/// Opaque domain handle.
pub struct DiDomain {
    inner: DomainSpec,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiBounds {
    pub lower_area: f64,
    pub upper_simple: f64,
    pub upper_inradius: f64,
    pub upper_ecrit: f64,
    pub fk_reference: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiSolveResult {
    pub e1_dirac: f64,
    pub e1_var: f64,
    pub sigma_min: f64,
    pub bc_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DiStatus {
    match e.class() {
        ErrorClass::Usage => DiStatus::InvalidArgument,
        ErrorClass::Domain => DiStatus::InvalidDomain,
        ErrorClass::Solver => DiStatus::SolverFailure,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DiStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            DiStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            DiStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn domain_ref<'a>(d: *const DiDomain) -> Result<&'a DomainSpec, Fail> {
    d.as_ref().map(|d| &d.inner).ok_or(Fail::Null("domain"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Precondition(format!("{what} is not UTF-8"))))
}

/// Null means defaults; otherwise a JSON config object (unknown keys rejected).
unsafe fn read_config(s: *const c_char) -> Result<SolverConfig, Fail> {
    if s.is_null() {
        return Ok(SolverConfig::default());
    }
    let text = read_str(s, "config")?;
    serde_json::from_str(text).map_err(|e| Fail::Lib(Error::Json(e)))
}

fn hand_out(d: DomainSpec, out: &mut *mut DiDomain) {
    *out = Box::into_raw(Box::new(DiDomain { inner: d }));
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn di_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn di_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn di_domain_disk(radius: f64, out: *mut *mut DiDomain) -> DiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        hand_out(DomainSpec::disk(radius)?, out);
        Ok(())
    })
}

/// r(t) = r0 + sum_k a_k cos kt + b_k sin kt with `coeffs` = [a_1, b_1, a_2, b_2, ...]
/// holding `n_modes` pairs.
///
/// # Safety
/// `coeffs` must point to 2 * n_modes doubles (or be null when n_modes is 0);
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn di_domain_radial(
    r0: f64,
    coeffs: *const f64,
    n_modes: usize,
    out: *mut *mut DiDomain,
) -> DiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let flat: &[f64] = if n_modes == 0 {
            &[]
        } else if coeffs.is_null() {
            return Err(Fail::Null("coeffs"));
        } else {
            std::slice::from_raw_parts(coeffs, 2 * n_modes)
        };
        let pairs: Vec<[f64; 2]> = flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        hand_out(make_radial_domain(&pairs, r0)?, out);
        Ok(())
    })
}

/// Seeded random area-pi domain, as used by sweeps.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn di_domain_random(seed: u64, modes: usize, amplitude: f64, out: *mut *mut DiDomain) -> DiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        hand_out(random_domain(seed, modes, amplitude)?, out);
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn di_domain_from_json(json: *const c_char, out: *mut *mut DiDomain) -> DiStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        hand_out(DomainSpec::from_json(read_str(json, "json")?)?, out);
        Ok(())
    })
}

/// # Safety
/// `d` must be a live handle; `out` receives a string to release with `di_string_free`.
#[no_mangle]
pub unsafe extern "C" fn di_domain_to_json(d: *const DiDomain, out: *mut *mut c_char) -> DiStatus {
    guard(|| {
        let d = domain_ref(d)?;
        let out = out_ref(out, "out")?;
        let s = d.to_json()?;
        *out = CString::new(s).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn di_domain_free(d: *mut DiDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

macro_rules! scalar_getter {
    ($name:ident, $f:expr) => {
        /// # Safety
        /// `d` must be a live handle and `out` valid for writes.
        #[no_mangle]
        pub unsafe extern "C" fn $name(d: *const DiDomain, out: *mut f64) -> DiStatus {
            guard(|| {
                let d = domain_ref(d)?;
                *out_ref(out, "out")? = $f(d);
                Ok(())
            })
        }
    };
}

scalar_getter!(di_domain_area, |d: &DomainSpec| d.area());
scalar_getter!(di_domain_perimeter, |d: &DomainSpec| d.perimeter());
scalar_getter!(di_domain_inradius, |d: &DomainSpec| d.inradius().0);

/// Principal eigenvalue of the unit disk, the root of J0 = J1.
#[no_mangle]
pub extern "C" fn di_disk_e1() -> f64 {
    disk_e1().e1_disk
}

#[no_mangle]
pub extern "C" fn di_bessel_j0(x: f64) -> f64 {
    bessel_j0(x)
}

#[no_mangle]
pub extern "C" fn di_bessel_j1(x: f64) -> f64 {
    bessel_j1(x)
}

/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn di_bounds(d: *const DiDomain, out: *mut DiBounds) -> DiStatus {
    guard(|| {
        let b = evaluate_bounds(domain_ref(d)?);
        *out_ref(out, "out")? = DiBounds {
            lower_area: b.lower_area,
            upper_simple: b.upper_simple,
            upper_inradius: b.upper_inradius,
            upper_ecrit: b.upper_ecrit,
            fk_reference: b.fk_reference,
        };
        Ok(())
    })
}

/// Both solvers on one domain. `config_json` may be null for defaults.
///
/// # Safety
/// `d` must be a live handle, `config_json` null or NUL-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn di_solve(d: *const DiDomain, config_json: *const c_char, out: *mut DiSolveResult) -> DiStatus {
    guard(|| {
        let d = domain_ref(d)?;
        let out = out_ref(out, "out")?;
        let cfg = read_config(config_json)?;
        let r = solve_domain(d, &cfg, 0, 0)?.record;
        *out = DiSolveResult {
            e1_dirac: r.e1_dirac,
            e1_var: r.e1_var,
            sigma_min: r.sigma_min,
            bc_residual: r.bc_residual,
        };
        Ok(())
    })
}

/// Principal eigenvalue as the root of mu.
///
/// # Safety
/// As for `di_solve`.
#[no_mangle]
pub unsafe extern "C" fn di_e1_variational(d: *const DiDomain, config_json: *const c_char, out: *mut f64) -> DiStatus {
    guard(|| {
        let d = domain_ref(d)?;
        let out = out_ref(out, "out")?;
        let cfg = read_config(config_json)?;
        *out = e1_variational(d, &mu_evaluator(d, &cfg)?)?;
        Ok(())
    })
}

/// mu(E) for one E.
///
/// # Safety
/// As for `di_solve`.
#[no_mangle]
pub unsafe extern "C" fn di_mu(d: *const DiDomain, config_json: *const c_char, e: f64, out: *mut f64) -> DiStatus {
    guard(|| {
        let d = domain_ref(d)?;
        let out = out_ref(out, "out")?;
        let cfg = read_config(config_json)?;
        if !e.is_finite() {
            return Err(Error::Precondition("E must be finite".into()).into());
        }
        *out = mu_evaluator(d, &cfg)?.mu(e);
        Ok(())
    })
}
