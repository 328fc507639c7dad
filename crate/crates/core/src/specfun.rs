//! Bessel functions J0, J1, the disk reference eigenvalue and the Bessel moments.

use crate::quadrature::gauss_legendre_unit;
use num_complex::Complex64;
use std::sync::OnceLock;

/// First positive root of J0 = J1 as quoted in the literature, to 12 digits.
pub const E1_DISK_PUBLISHED: f64 = 1.434695650819;

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j01(x.abs()).0
}

pub fn bessel_j1(x: f64) -> f64 {
    let j1 = bessel_j01(x.abs()).1;
    if x < 0.0 {
        -j1
    } else {
        j1
    }
}

/// (J0(x), J1(x)) for x >= 0.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    debug_assert!(x >= 0.0);
    if x < 4.0 {
        series_j01(x)
    } else {
        miller_j01(x)
    }
}

fn series_j01(x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 0.5 * x;
    let mut j0 = t0;
    let mut j1 = t1;
    for k in 1..60 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        j0 += t0;
        j1 += t1;
        if t0.abs() < 1e-18 * j0.abs().max(1e-300) && t1.abs() < 1e-18 {
            break;
        }
    }
    (j0, j1)
}

// Backward recurrence from a high even order, normalized by J0 + 2 sum J_2k = 1.
fn miller_j01(x: f64) -> (f64, f64) {
    let start = (x + 30.0 + 12.0 * x.cbrt()) as usize;
    let m = start + start % 2;
    let mut j_up = 0.0;
    let mut j = 1.0;
    let mut sum = 2.0;
    let mut j1 = 0.0;
    for k in (1..=m).rev() {
        let next = 2.0 * k as f64 / x * j - j_up;
        j_up = j;
        j = next;
        let order = k - 1;
        if order == 1 {
            j1 = j;
        } else if order > 0 && order % 2 == 0 {
            sum += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            j_up *= 1e-250;
            sum *= 1e-250;
            j1 *= 1e-250;
        }
    }
    let norm = j + sum;
    (j / norm, j1 / norm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskReference {
    pub e1_disk: f64,
    pub j0_at_e1: f64,
    pub j1_at_e1: f64,
}

/// Principal eigenvalue of the unit disk: first positive root of J0 = J1.
pub fn disk_e1() -> DiskReference {
    static CELL: OnceLock<DiskReference> = OnceLock::new();
    *CELL.get_or_init(|| {
        let g = |e: f64| {
            let (a, b) = bessel_j01(e);
            a - b
        };
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut e = 0.5 * (lo + hi);
        for _ in 0..8 {
            let (j0, j1) = bessel_j01(e);
            // d/dE (J0 - J1) = -J1 - (J0 - J1/E)
            let dg = -j1 - (j0 - j1 / e);
            let step = (j0 - j1) / dg;
            e -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (j0, j1) = bessel_j01(e);
        DiskReference {
            e1_disk: e,
            j0_at_e1: j0,
            j1_at_e1: j1,
        }
    })
}

/// Eigenfunction of the unit disk for E1: u1 = J0(E1 r), u2 = i e^{i theta} J1(E1 r).
pub fn disk_eigenfunction(x: [f64; 2]) -> (Complex64, Complex64) {
    let e1 = disk_e1().e1_disk;
    let r = x[0].hypot(x[1]);
    let (j0, j1) = bessel_j01(e1 * r);
    let u1 = Complex64::new(j0, 0.0);
    if r == 0.0 {
        return (u1, Complex64::new(0.0, 0.0));
    }
    let phase = Complex64::new(x[0] / r, x[1] / r);
    (u1, Complex64::i() * phase * j1)
}

fn moment_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_unit(256))
}

/// n * int_0^1 J0(E r)^2 r^(2n-1) dr.
pub fn bessel_moment(n: u32, e: f64) -> f64 {
    assert!(n >= 1, "moment order starts at 1");
    let (x, w) = moment_rule();
    let p = (2 * n - 1) as i32;
    let s: f64 = x
        .iter()
        .zip(w)
        .map(|(&r, &w)| {
            let j0 = bessel_j0(e * r);
            w * j0 * j0 * r.powi(p)
        })
        .sum();
    n as f64 * s
}

/// int_0^1 J_order(E r)^2 r dr for order 0 or 1, by the same 256-node rule.
pub fn bessel_square_integral(order: u32, e: f64) -> f64 {
    let (x, w) = moment_rule();
    x.iter()
        .zip(w)
        .map(|(&r, &w)| {
            let (j0, j1) = bessel_j01(e * r);
            let j = if order == 0 { j0 } else { j1 };
            w * j * j * r
        })
        .sum()
}
