//! Variational characterization: the quadratic form
//!   q_E(u) = 4 int |dzbar u|^2 - E^2 int |u|^2 + E int_boundary |u|^2
//! on RBF trial functions u = v + i w, its first min-max level mu(E), and the
//! root mu(E1) = 0.
//!
//! Coefficients are stacked as (alpha, beta) with v = sum alpha_j phi_j and
//! w = sum beta_j phi_j.

use crate::discretize::{multiquadric, Discretization};
use crate::error::{Error, Result};
use crate::geometry::{DomainKind, DomainSpec};
use crate::specfun::{bessel_moment, bessel_square_integral, disk_e1};
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_TRUNC_TOL: f64 = 1e-10;
const MIN_MODES: usize = 10;

/// Quadrature resolution for the form integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormQuadrature {
    pub n_rho: usize,
    pub n_theta: usize,
    pub n_boundary: usize,
}

impl Default for FormQuadrature {
    fn default() -> Self {
        FormQuadrature {
            n_rho: 48,
            n_theta: 320,
            n_boundary: 640,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FormMatrices {
    /// Stiffness, 4 int |dzbar u|^2.
    pub d: Mat<f64>,
    /// Interior mass, int |u|^2.
    pub m: Mat<f64>,
    /// Boundary mass, int over the boundary of |u|^2.
    pub bd: Mat<f64>,
}

pub fn assemble_forms(d: &DomainSpec, disc: &Discretization) -> Result<FormMatrices> {
    assemble_forms_with(d, disc, &FormQuadrature::default())
}

pub fn assemble_forms_with(d: &DomainSpec, disc: &Discretization, q: &FormQuadrature) -> Result<FormMatrices> {
    let n = disc.n();
    let nodes = d.polar_quadrature(q.n_rho, q.n_theta);
    let bnodes = d.boundary_nodes(q.n_boundary)?;
    let nq = nodes.len();
    let mut phi = Mat::<f64>::zeros(nq, n);
    let mut d1 = Mat::<f64>::zeros(nq, n);
    let mut d2 = Mat::<f64>::zeros(nq, n);
    for (j, &c) in disc.centers.iter().enumerate() {
        for (i, node) in nodes.iter().enumerate() {
            let s = node.weight.sqrt();
            let (v, g) = multiquadric(disc.eps, c, node.p);
            phi[(i, j)] = s * v;
            d1[(i, j)] = s * g[0];
            d2[(i, j)] = s * g[1];
        }
    }
    let mut phib = Mat::<f64>::zeros(bnodes.len(), n);
    for (j, &c) in disc.centers.iter().enumerate() {
        for (i, b) in bnodes.iter().enumerate() {
            phib[(i, j)] = b.weight.sqrt() * multiquadric(disc.eps, c, b.p).0;
        }
    }
    let g = phi.transpose() * &phi;
    let gb = phib.transpose() * &phib;
    let p11 = d1.transpose() * &d1;
    let p22 = d2.transpose() * &d2;
    let p12 = d1.transpose() * &d2;

    // (d1 v - d2 w)^2 + (d2 v + d1 w)^2 = a'(P11+P22)a + b'(P11+P22)b + 2 a'(P12' - P12) b
    let mut dm = Mat::<f64>::zeros(2 * n, 2 * n);
    let mut mm = Mat::<f64>::zeros(2 * n, 2 * n);
    let mut bm = Mat::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let k = 0.5 * (p11[(i, j)] + p22[(i, j)] + p11[(j, i)] + p22[(j, i)]);
            let s = p12[(j, i)] - p12[(i, j)];
            dm[(i, j)] = k;
            dm[(n + i, n + j)] = k;
            dm[(i, n + j)] = s;
            dm[(n + i, j)] = -s;
            let gv = 0.5 * (g[(i, j)] + g[(j, i)]);
            mm[(i, j)] = gv;
            mm[(n + i, n + j)] = gv;
            let bv = 0.5 * (gb[(i, j)] + gb[(j, i)]);
            bm[(i, j)] = bv;
            bm[(n + i, n + j)] = bv;
        }
    }
    Ok(FormMatrices { d: dm, m: mm, bd: bm })
}

impl FormMatrices {
    pub fn dim(&self) -> usize {
        self.d.nrows()
    }

    /// q_E as a matrix: D - E^2 M + E Bd.
    pub fn q_matrix(&self, e: f64) -> Mat<f64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.d[(i, j)] - e * e * self.m[(i, j)] + e * self.bd[(i, j)])
    }
}

/// The form pencil projected onto the well-conditioned mass eigenmodes.
///
/// The real 2N matrices are the real forms of N x N Hermitian ones (D of
/// K - iS, M and Bd of real symmetric blocks), so the work is done on the
/// complex N x N blocks; every eigenvalue of the real problem is doubled.
#[derive(Clone, Debug)]
pub struct MuEvaluator {
    stiffness: Mat<C64>,
    stiffness_real: Mat<f64>,
    boundary: Mat<f64>,
    n_modes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuSample {
    pub e: f64,
    pub mu: f64,
    pub n_modes: usize,
}

impl MuEvaluator {
    pub fn new(fm: &FormMatrices, trunc_tol: f64) -> Result<Self> {
        crate::sequential_linalg();
        let n = fm.dim() / 2;
        let block = |m: &Mat<f64>, r0: usize, c0: usize| Mat::from_fn(n, n, |i, j| m[(r0 + i, c0 + j)]);
        let g = block(&fm.m, 0, 0);
        let eig = g
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Precondition(format!("mass eigendecomposition failed: {e:?}")))?;
        let s = eig.S().column_vector();
        let smax = (0..n).map(|i| s[i]).fold(0.0, f64::max);
        let keep: Vec<usize> = (0..n).filter(|&i| s[i] > trunc_tol * smax).collect();
        if 2 * keep.len() < MIN_MODES {
            return Err(Error::MassDegenerate { modes: 2 * keep.len() });
        }
        let u = eig.U();
        let t = Mat::from_fn(n, keep.len(), |i, j| u[(i, keep[j])] / s[keep[j]].sqrt());
        let k = block(&fm.d, 0, 0);
        let sk = block(&fm.d, 0, n);
        let gb = block(&fm.bd, 0, 0);
        let kp = t.transpose() * (&k * &t);
        let sp = t.transpose() * (&sk * &t);
        let bp = t.transpose() * (&gb * &t);
        let m = keep.len();
        let sym = |a: &Mat<f64>| Mat::from_fn(m, m, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
        let kp = sym(&kp);
        let bp = sym(&bp);
        let stiffness = Mat::from_fn(m, m, |i, j| C64::new(kp[(i, j)], -0.5 * (sp[(i, j)] - sp[(j, i)])));
        Ok(MuEvaluator {
            stiffness,
            stiffness_real: kp,
            boundary: bp,
            n_modes: 2 * m,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn shifted(&self, e: f64) -> Mat<C64> {
        let m = self.boundary.nrows();
        Mat::from_fn(m, m, |i, j| self.stiffness[(i, j)] + C64::new(e * self.boundary[(i, j)], 0.0))
    }

    pub fn mu(&self, e: f64) -> f64 {
        let ev = self
            .shifted(e)
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("Hermitian eigenvalues");
        ev[0] - e * e
    }

    pub fn sample(&self, e: f64) -> MuSample {
        MuSample {
            e,
            mu: self.mu(e),
            n_modes: self.n_modes,
        }
    }

    /// Same form restricted to real trial functions (w = 0): lambda_Rob(E) - E^2.
    pub fn robin_shifted(&self, e: f64) -> f64 {
        let m = self.boundary.nrows();
        let a = Mat::from_fn(m, m, |i, j| self.stiffness_real[(i, j)] + e * self.boundary[(i, j)]);
        a.self_adjoint_eigenvalues(Side::Lower).expect("symmetric eigenvalues")[0] - e * e
    }

    /// Steepest descent on the Rayleigh quotient with Armijo backtracking,
    /// stopping when the relative change of the quotient drops below 1e-10.
    /// Returns the quotient and the number of iterations used.
    pub fn mu_by_descent(&self, e: f64, max_iter: usize) -> (f64, usize) {
        let a = self.shifted(e);
        let m = a.nrows();
        let apply = |y: &[C64]| -> Vec<C64> {
            (0..m)
                .map(|i| (0..m).map(|j| a[(i, j)] * y[j]).sum::<C64>())
                .collect()
        };
        let dot = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        let quotient = |y: &[C64]| dot(y, &apply(y)) / dot(y, y);
        let mut y: Vec<C64> = (0..m).map(|i| C64::new(1.0 / (1.0 + i as f64), 0.0)).collect();
        let mut q = quotient(&y);
        let mut step = 1.0;
        for it in 0..max_iter {
            let ay = apply(&y);
            let yy = dot(&y, &y);
            let g: Vec<C64> = ay.iter().zip(&y).map(|(a, b)| (a - b * q) * (2.0 / yy)).collect();
            let gg = dot(&g, &g);
            if gg == 0.0 {
                return (q - e * e, it);
            }
            step *= 2.0;
            loop {
                let trial: Vec<C64> = y.iter().zip(&g).map(|(a, b)| a - b * step).collect();
                let qt = quotient(&trial);
                if qt <= q - 1e-4 * step * gg || step < 1e-300 {
                    let change = (qt - q).abs() / q.abs().max(1e-300);
                    let nrm = dot(&trial, &trial).sqrt();
                    y = trial.iter().map(|v| v / nrm).collect();
                    q = qt;
                    if change < 1e-10 {
                        return (q - e * e, it + 1);
                    }
                    break;
                }
                step *= 0.5;
            }
        }
        (q - e * e, max_iter)
    }
}

pub fn mu_of_e(fm: &FormMatrices, e: f64, trunc_tol: f64) -> Result<(f64, usize)> {
    let ev = MuEvaluator::new(fm, trunc_tol)?;
    Ok((ev.mu(e), ev.n_modes()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuCurve {
    pub samples: Vec<MuSample>,
    pub e1_root: Option<f64>,
}

pub fn mu_curve(ev: &MuEvaluator, grid: &[f64]) -> Result<MuCurve> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|&e| !(e >= 0.0)) {
        return Err(Error::Precondition("E grid must be ascending and nonnegative".into()));
    }
    let samples: Vec<MuSample> = grid.par_iter().map(|&e| ev.sample(e)).collect();
    let mut e1_root = None;
    for w in samples.windows(2) {
        if w[0].e > 0.0 && w[0].mu > 0.0 && w[1].mu < 0.0 {
            e1_root = Some(e1_from_mu(ev, (w[0].e, w[1].e))?);
            break;
        }
    }
    Ok(MuCurve { samples, e1_root })
}

pub fn write_mu_csv<W: std::io::Write>(w: W, curve: &MuCurve) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["E", "mu", "n_modes"])?;
    for s in &curve.samples {
        out.write_record([crate::fmt_f64(s.e), crate::fmt_f64(s.mu), s.n_modes.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Root of mu in (lo, hi) with mu(lo) > 0 > mu(hi): bisection down to a
/// bracket of 1e-4, then safeguarded secant steps to |dE| < 1e-8.
pub fn e1_from_mu(ev: &MuEvaluator, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let mut flo = ev.mu(lo);
    let mut fhi = ev.mu(hi);
    if !(lo < hi && flo > 0.0 && fhi < 0.0) {
        return Err(Error::BadBracket {
            lo,
            hi,
            mu_lo: flo,
            mu_hi: fhi,
        });
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        let f = ev.mu(mid);
        if f > 0.0 {
            lo = mid;
            flo = f;
        } else {
            hi = mid;
            fhi = f;
        }
    }
    let mut prev = lo;
    for _ in 0..60 {
        let mut x = lo - flo * (hi - lo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let f = ev.mu(x);
        if f > 0.0 {
            lo = x;
            flo = f;
        } else {
            hi = x;
            fhi = f;
        }
        if (x - prev).abs() < 1e-8 || hi - lo < 1e-8 || f == 0.0 {
            return Ok(x);
        }
        prev = x;
    }
    Ok(0.5 * (lo + hi))
}

/// Upper bound on mu(E) from transplanting the disk eigenfunction through the
/// conformal map, with the map's coefficient series as given.
pub fn transplant_bound(d: &DomainSpec, e: f64) -> Result<f64> {
    if d.kind() != DomainKind::ConformalPoly {
        return Err(Error::NotConformal);
    }
    let r = disk_e1();
    let e1 = r.e1_disk;
    let weighted: f64 = d
        .conformal_coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let n = (k + 1) as u32;
            n as f64 * c.norm_sqr() * bessel_moment(n, e1)
        })
        .sum();
    let mass = 2.0 * PI * weighted;
    let grad = 2.0 * PI * e1 * e1 * bessel_square_integral(1, e1);
    Ok(grad / mass - e * e + e * r.j0_at_e1 * r.j0_at_e1 * d.perimeter() / mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_conformal_domain;

    #[test]
    fn transplant_vanishes_on_disk_at_e1() {
        let d = make_conformal_domain(&[C64::new(1.0, 0.0)]).unwrap();
        let b = transplant_bound(&d, disk_e1().e1_disk).unwrap();
        assert!(b.abs() < 1e-10, "{b}");
    }

    #[test]
    fn transplant_needs_conformal() {
        let d = DomainSpec::disk(1.0).unwrap();
        assert!(matches!(transplant_bound(&d, 1.0), Err(Error::NotConformal)));
    }
}
