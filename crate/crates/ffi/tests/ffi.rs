use dirac_infmass_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let p = di_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn disk(radius: f64) -> *mut DiDomain {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { di_domain_disk(radius, &mut d) }, DiStatus::Ok);
    assert!(!d.is_null());
    d
}

#[test]
fn domain_scalars_and_bounds() {
    let d = disk(1.0);
    let (mut a, mut p, mut r) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(di_domain_area(d, &mut a), DiStatus::Ok);
        assert_eq!(di_domain_perimeter(d, &mut p), DiStatus::Ok);
        assert_eq!(di_domain_inradius(d, &mut r), DiStatus::Ok);
    }
    assert!((a - std::f64::consts::PI).abs() < 1e-12);
    assert!((p - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((r - 1.0).abs() < 1e-6);
    let mut b = DiBounds::default();
    assert_eq!(unsafe { di_bounds(d, &mut b) }, DiStatus::Ok);
    assert!((b.lower_area - 2f64.sqrt()).abs() < 1e-12);
    assert!((b.fk_reference - di_disk_e1()).abs() < 1e-12);
    assert!((di_bessel_j0(di_disk_e1()) - di_bessel_j1(di_disk_e1())).abs() < 1e-14);
    unsafe { di_domain_free(d) };
}

#[test]
fn null_pointers_are_reported() {
    let mut x = 0.0;
    assert_eq!(unsafe { di_domain_area(ptr::null(), &mut x) }, DiStatus::NullPointer);
    assert!(!last_error().is_empty());
    let d = disk(1.0);
    assert_eq!(unsafe { di_domain_area(d, ptr::null_mut()) }, DiStatus::NullPointer);
    assert_eq!(unsafe { di_domain_disk(1.0, ptr::null_mut()) }, DiStatus::NullPointer);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { di_domain_radial(1.0, ptr::null(), 2, &mut h) }, DiStatus::NullPointer);
    unsafe {
        di_domain_free(d);
        di_domain_free(ptr::null_mut());
        di_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_domains_and_arguments() {
    let mut h = ptr::null_mut();
    let coeffs = [1.5, 0.0, 0.0, 0.0];
    assert_eq!(unsafe { di_domain_radial(1.0, coeffs.as_ptr(), 2, &mut h) }, DiStatus::InvalidDomain);
    assert!(h.is_null());
    assert!(last_error().contains("radial"));
    assert_eq!(unsafe { di_domain_disk(-1.0, &mut h) }, DiStatus::InvalidDomain);
    assert_eq!(unsafe { di_domain_random(1, 20, 0.2, &mut h) }, DiStatus::InvalidArgument);
    let junk = CString::new("{not json").unwrap();
    assert_eq!(unsafe { di_domain_from_json(junk.as_ptr(), &mut h) }, DiStatus::InvalidArgument);
    // A successful call clears the message.
    let d = disk(2.0);
    assert!(di_last_error_message().is_null());
    unsafe { di_domain_free(d) };
}

#[test]
fn json_round_trip() {
    let mut d = ptr::null_mut();
    let coeffs = [0.0, 0.0, 0.1, 0.02];
    assert_eq!(unsafe { di_domain_radial(1.0, coeffs.as_ptr(), 2, &mut d) }, DiStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { di_domain_to_json(d, &mut s) }, DiStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { di_domain_from_json(s, &mut back) }, DiStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        di_domain_perimeter(d, &mut a);
        di_domain_perimeter(back, &mut b);
        di_string_free(s);
        di_domain_free(d);
        di_domain_free(back);
    }
    assert_eq!(a, b);
}

#[test]
fn random_domains_match_the_library() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { di_domain_random(5, 8, 0.2, &mut d) }, DiStatus::Ok);
    let mut p = 0.0;
    unsafe { di_domain_perimeter(d, &mut p) };
    let lib = dirac_infmass::harness::random_domain(5, 8, 0.2).unwrap();
    assert_eq!(p, lib.perimeter());
    unsafe { di_domain_free(d) };
}

#[test]
fn solvers_through_the_abi() {
    let d = disk(1.0);
    let cfg = CString::new(r#"{"N": 200}"#).unwrap();
    let mut mu = f64::NAN;
    assert_eq!(unsafe { di_mu(d, cfg.as_ptr(), 0.0, &mut mu) }, DiStatus::Ok);
    assert!(mu.abs() < 5e-3, "{mu}");
    let mut r = DiSolveResult::default();
    assert_eq!(unsafe { di_solve(d, ptr::null(), &mut r) }, DiStatus::Ok);
    assert!((r.e1_dirac - di_disk_e1()).abs() < 1e-5);
    assert!((r.e1_var - di_disk_e1()).abs() < 5e-3);
    assert!(r.sigma_min < 1e-6 && r.bc_residual < 1e-3);
    let bad = CString::new(r#"{"bogus": 1}"#).unwrap();
    assert_eq!(unsafe { di_mu(d, bad.as_ptr(), 0.0, &mut mu) }, DiStatus::InvalidArgument);
    unsafe { di_domain_free(d) };
}
