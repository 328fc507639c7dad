//! Direct solver: the overdetermined collocation pencil (A - E B) x = 0 for the
//! split real system, eigenvalue search by a scan of the smallest relative
//! singular value, and spinor reconstruction.
//!
//! Column blocks are (alpha1, beta1, alpha2, beta2), the real and imaginary
//! parts of the coefficients of u1 and u2. Row blocks are the four real
//! interior equations followed by the two real boundary equations.
//!
//! The pencil commutes with multiplication by i, so the singular value work is
//! done on the equivalent complex system with unknowns (a, b) = coefficients of
//! (u1, u2): rows `-2i dz u2 - E u1`, `-2i dzbar u1 - E u2`, `u2 - i n u1`.

use crate::discretize::{collocation_matrices, multiquadric, CollocationMatrices, Discretization};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Side};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative cutoff for the singular values of the interior value block.
const BASIS_TRUNCATION: f64 = 1e-14;

/// Row weights applied to the collocation equations.
#[derive(Clone, Debug)]
pub struct RowScaling {
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
}

impl RowScaling {
    /// sqrt of the quadrature weights, boundary rows additionally multiplied by
    /// sqrt(M_int / M_bnd) so neither block dominates.
    pub fn from_discretization(disc: &Discretization) -> Self {
        let balance = (disc.interior.len() as f64 / disc.boundary.len() as f64).sqrt();
        RowScaling {
            interior: disc.interior.iter().map(|q| q.weight.sqrt()).collect(),
            boundary: disc.boundary.iter().map(|b| b.weight.sqrt() * balance).collect(),
        }
    }

    pub fn unit(m_int: usize, m_bnd: usize) -> Self {
        RowScaling {
            interior: vec![1.0; m_int],
            boundary: vec![1.0; m_bnd],
        }
    }
}

/// The pencil, stored as its six row-scaled collocation blocks.
#[derive(Clone, Debug)]
pub struct PencilSystem {
    pub n: usize,
    pub m_int: usize,
    pub m_bnd: usize,
    blocks: CollocationMatrices,
}

pub fn assemble_pencil(cm: &CollocationMatrices, w: &RowScaling) -> PencilSystem {
    let scale = |m: &Mat<f64>, s: &[f64]| Mat::from_fn(m.nrows(), m.ncols(), |i, j| s[i] * m[(i, j)]);
    let blocks = CollocationMatrices {
        mint: scale(&cm.mint, &w.interior),
        m1int: scale(&cm.m1int, &w.interior),
        m2int: scale(&cm.m2int, &w.interior),
        mbnd: scale(&cm.mbnd, &w.boundary),
        m1bnd: scale(&cm.m1bnd, &w.boundary),
        m2bnd: scale(&cm.m2bnd, &w.boundary),
    };
    PencilSystem {
        n: cm.mint.ncols(),
        m_int: cm.mint.nrows(),
        m_bnd: cm.mbnd.nrows(),
        blocks,
    }
}

impl PencilSystem {
    pub fn rows(&self) -> usize {
        4 * self.m_int + 2 * self.m_bnd
    }

    /// Dense left matrix of the real pencil.
    pub fn a(&self) -> Mat<f64> {
        let (n, mi, mb) = (self.n, self.m_int, self.m_bnd);
        let b = &self.blocks;
        let mut a = Mat::zeros(self.rows(), 4 * n);
        let mut put = |r0: usize, c0: usize, m: &Mat<f64>, sign: f64| {
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    a[(r0 + i, c0 + j)] = sign * m[(i, j)];
                }
            }
        };
        put(0, 2 * n, &b.m2int, -1.0);
        put(0, 3 * n, &b.m1int, 1.0);
        put(mi, 2 * n, &b.m1int, -1.0);
        put(mi, 3 * n, &b.m2int, -1.0);
        put(2 * mi, 0, &b.m2int, 1.0);
        put(2 * mi, n, &b.m1int, 1.0);
        put(3 * mi, 0, &b.m1int, -1.0);
        put(3 * mi, n, &b.m2int, 1.0);
        put(4 * mi, 0, &b.m2bnd, 1.0);
        put(4 * mi, n, &b.m1bnd, 1.0);
        put(4 * mi, 2 * n, &b.mbnd, 1.0);
        put(4 * mi + mb, 0, &b.m1bnd, -1.0);
        put(4 * mi + mb, n, &b.m2bnd, 1.0);
        put(4 * mi + mb, 3 * n, &b.mbnd, 1.0);
        a
    }

    /// Dense right matrix of the real pencil; boundary rows are zero.
    pub fn b(&self) -> Mat<f64> {
        let (n, mi) = (self.n, self.m_int);
        let mut out = Mat::zeros(self.rows(), 4 * n);
        for k in 0..4 {
            for j in 0..n {
                for i in 0..mi {
                    out[(k * mi + i, k * n + j)] = self.blocks.mint[(i, j)];
                }
            }
        }
        out
    }

    /// Complex form of the left matrix, rows (first interior equation, second interior equation, boundary), columns (u1, u2).
    pub fn complex_a(&self) -> Mat<C64> {
        let (n, mi, mb) = (self.n, self.m_int, self.m_bnd);
        let b = &self.blocks;
        let mut a = Mat::<C64>::zeros(2 * mi + mb, 2 * n);
        for j in 0..n {
            for i in 0..mi {
                a[(i, n + j)] = C64::new(-b.m2int[(i, j)], -b.m1int[(i, j)]);
                a[(mi + i, j)] = C64::new(b.m2int[(i, j)], -b.m1int[(i, j)]);
            }
            for i in 0..mb {
                a[(2 * mi + i, j)] = C64::new(b.m2bnd[(i, j)], -b.m1bnd[(i, j)]);
                a[(2 * mi + i, n + j)] = C64::new(b.mbnd[(i, j)], 0.0);
            }
        }
        a
    }

    pub fn complex_b(&self) -> Mat<C64> {
        let (n, mi, mb) = (self.n, self.m_int, self.m_bnd);
        let mut out = Mat::<C64>::zeros(2 * mi + mb, 2 * n);
        for j in 0..n {
            for i in 0..mi {
                let v = C64::new(self.blocks.mint[(i, j)], 0.0);
                out[(i, j)] = v;
                out[(mi + i, n + j)] = v;
            }
        }
        out
    }
}

/// E-independent reduction of the pencil.
///
/// With the thin SVD  W Mint = U S V^T  truncated to rank r and the substitution
/// x = (V S^-1) y per spinor component, ||B x|| = ||y|| and
///   ||(A - E B) x||^2 = ||(H - E I) y||^2 + ||R_F y||^2,
/// where H is the part of A in range(U) and R_F the triangular factor of the rest.
#[derive(Clone, Debug)]
pub struct ReducedPencil {
    h: Mat<C64>,
    rf: Mat<C64>,
    t: Mat<f64>,
    rank: usize,
}

#[derive(Clone, Debug)]
pub struct SigmaSample {
    pub e: f64,
    /// sigma_min / sigma_max of the reduced matrix.
    pub sigma: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Unit right singular vector in reduced coordinates.
    pub y: Vec<C64>,
}

impl ReducedPencil {
    pub fn new(ps: &PencilSystem) -> Result<Self> {
        crate::sequential_linalg();
        let b = &ps.blocks;
        let svd = b
            .mint
            .thin_svd()
            .map_err(|e| Error::Precondition(format!("SVD of the value block failed: {e:?}")))?;
        let s = svd.S().column_vector();
        let smax = s[0];
        let rank = (0..s.nrows()).filter(|&i| s[i] > BASIS_TRUNCATION * smax).count();
        let u = svd.U().subcols(0, rank).to_owned();
        let t = Mat::from_fn(ps.n, rank, |i, j| svd.V()[(i, j)] / s[j]);

        let p1 = &b.m1int * &t;
        let p2 = &b.m2int * &t;
        let g1 = u.transpose() * &p1;
        let g2 = u.transpose() * &p2;
        let p1p = &p1 - &u * &g1;
        let p2p = &p2 - &u * &g2;
        let q0 = &b.mbnd * &t;
        let q1 = &b.m1bnd * &t;
        let q2 = &b.m2bnd * &t;

        let r = rank;
        let mut h = Mat::<C64>::zeros(2 * r, 2 * r);
        for j in 0..r {
            for i in 0..r {
                h[(i, r + j)] = C64::new(-g2[(i, j)], -g1[(i, j)]);
                h[(r + i, j)] = C64::new(g2[(i, j)], -g1[(i, j)]);
            }
        }

        // Compress the two interior residual blocks separately, then stack with
        // the boundary rows.
        let mi = ps.m_int;
        let r_first = Mat::<C64>::from_fn(mi, r, |i, j| C64::new(-p2p[(i, j)], -p1p[(i, j)]))
            .qr()
            .thin_R()
            .to_owned();
        let r_second = Mat::<C64>::from_fn(mi, r, |i, j| C64::new(p2p[(i, j)], -p1p[(i, j)]))
            .qr()
            .thin_R()
            .to_owned();
        let mb = ps.m_bnd;
        let mut stack = Mat::<C64>::zeros(2 * r + mb, 2 * r);
        for j in 0..r {
            for i in 0..r.min(r_first.nrows()) {
                stack[(i, r + j)] = r_first[(i, j)];
                stack[(r + i, j)] = r_second[(i, j)];
            }
            for i in 0..mb {
                stack[(2 * r + i, j)] = C64::new(q2[(i, j)], -q1[(i, j)]);
                stack[(2 * r + i, r + j)] = C64::new(q0[(i, j)], 0.0);
            }
        }
        let rf = stack.qr().thin_R().to_owned();
        Ok(ReducedPencil { h, rf, t, rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn stacked(&self, e: f64) -> Mat<C64> {
        let m = 2 * self.rank;
        let mut out = Mat::<C64>::zeros(2 * m, m);
        for j in 0..m {
            for i in 0..m {
                out[(i, j)] = self.h[(i, j)];
                out[(m + i, j)] = self.rf[(i, j)];
            }
            out[(j, j)] -= C64::new(e, 0.0);
        }
        out
    }

    /// Smallest relative singular value at E and its right singular vector.
    pub fn sample(&self, e: f64) -> SigmaSample {
        let r = self.stacked(e).qr().thin_R().to_owned();
        let (smin, y) = smallest_singular_triangular(&r);
        let smax = largest_singular_triangular(&r);
        SigmaSample {
            e,
            sigma: smin / smax,
            sigma_min: smin,
            sigma_max: smax,
            y,
        }
    }

    pub fn sigma(&self, e: f64) -> f64 {
        self.sample(e).sigma
    }

    /// Real coefficient vector (alpha1, beta1, alpha2, beta2), unit norm.
    pub fn coefficients(&self, y: &[C64]) -> Vec<f64> {
        let n = self.t.nrows();
        let r = self.rank;
        let mut a = vec![C64::new(0.0, 0.0); 2 * n];
        for k in 0..2 {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..r {
                    s += y[k * r + j] * self.t[(i, j)];
                }
                a[k * n + i] = s;
            }
        }
        let mut out = Vec::with_capacity(4 * n);
        for k in 0..2 {
            out.extend(a[k * n..(k + 1) * n].iter().map(|z| z.re));
            out.extend(a[k * n..(k + 1) * n].iter().map(|z| z.im));
        }
        let nrm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.iter_mut().for_each(|v| *v /= nrm);
        out
    }

    /// E at which d/dE ||(H - E I) y||^2 vanishes for fixed y.
    fn stationary_e(&self, y: &[C64]) -> f64 {
        let m = 2 * self.rank;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..m {
            let mut hy = C64::new(0.0, 0.0);
            for j in 0..m {
                hy += self.h[(i, j)] * y[j];
            }
            num += (y[i].conj() * hy).re;
            den += y[i].norm_sqr();
        }
        num / den
    }
}

/// Block inverse iteration on R^H R with Rayleigh-Ritz extraction.
fn smallest_singular_triangular(r: &Mat<C64>) -> (f64, Vec<C64>) {
    let n = r.nrows();
    let p = 4.min(n);
    let mut v = Mat::<C64>::from_fn(n, p, |i, j| {
        let t = (i * 7919 + j * 104729 + 13) as f64;
        C64::new((t * 0.618034).sin(), (t * 0.381966).cos())
    });
    orthonormalize(&mut v);
    let mut prev = f64::INFINITY;
    let mut best = (f64::INFINITY, vec![C64::new(0.0, 0.0); n]);
    for it in 0..80 {
        solve_lower_triangular_in_place(r.adjoint(), v.as_mut(), Par::Seq);
        solve_upper_triangular_in_place(r.as_ref(), v.as_mut(), Par::Seq);
        orthonormalize(&mut v);
        let rv = r * &v;
        let gram = rv.adjoint() * &rv;
        let eig = match gram.self_adjoint_eigen(Side::Lower) {
            Ok(e) => e,
            Err(_) => break,
        };
        let w = eig.U();
        v = &v * w;
        let y: Vec<C64> = (0..n).map(|i| v[(i, 0)]).collect();
        // Measured directly rather than from the Gram eigenvalue, which loses
        // half the digits.
        let s = (r * v.col(0)).norm_l2();
        best = (s, y);
        if it > 2 && (prev - s).abs() <= 1e-12 * s.max(1e-300) {
            break;
        }
        prev = s;
    }
    best
}

fn largest_singular_triangular(r: &Mat<C64>) -> f64 {
    let n = r.nrows();
    let mut v = faer::Col::<C64>::from_fn(n, |i| C64::new(1.0 + (i as f64 * 0.37).sin(), 0.0));
    let mut s = 0.0;
    for _ in 0..60 {
        let nv = v.norm_l2();
        v /= faer::Scale(C64::new(nv, 0.0));
        let rv = r * &v;
        let next = rv.norm_l2();
        v = r.adjoint() * &rv;
        if (next - s).abs() < 1e-10 * next {
            s = next;
            break;
        }
        s = next;
    }
    s
}

fn orthonormalize(v: &mut Mat<C64>) {
    let q = v.qr().compute_thin_Q();
    *v = q;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracEigenResult {
    pub e: f64,
    /// (alpha1, beta1, alpha2, beta2), unit Euclidean norm.
    pub coeffs: Vec<f64>,
    /// Relative smallest singular value at E.
    pub sigma_min: f64,
    /// Max |u2 - i n u1| over fresh boundary nodes relative to max |u|.
    pub bc_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

/// A domain with its discretization, pencil and reduction, ready for scans.
pub struct DiracProblem {
    pub domain: DomainSpec,
    pub disc: Discretization,
    pub pencil: PencilSystem,
    pub reduced: ReducedPencil,
}

impl DiracProblem {
    pub fn new(domain: DomainSpec, disc: Discretization) -> Result<Self> {
        let cm = collocation_matrices(&disc);
        let pencil = assemble_pencil(&cm, &RowScaling::from_discretization(&disc));
        let reduced = ReducedPencil::new(&pencil)?;
        Ok(DiracProblem {
            domain,
            disc,
            pencil,
            reduced,
        })
    }

    pub fn sigma_at(&self, e: f64) -> f64 {
        self.reduced.sigma(e)
    }

    pub fn scan(&self, w: &ScanWindow) -> Result<Vec<(f64, f64)>> {
        if !(w.lo < w.hi) || !(w.step > 0.0 && w.step <= 0.02) || !w.lo.is_finite() || !w.hi.is_finite() {
            return Err(Error::Precondition(format!(
                "scan window needs lo < hi and 0 < step <= 0.02, got {w:?}"
            )));
        }
        let n = ((w.hi - w.lo) / w.step).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| w.lo + (w.hi - w.lo) * i as f64 / n as f64).collect();
        Ok(grid.par_iter().map(|&e| (e, self.sigma_at(e))).collect())
    }

    /// Scan, refine every sufficiently deep local minimum and keep the accepted ones.
    pub fn find_eigenvalues(&self, w: &ScanWindow, accept_tol: f64) -> Result<Vec<DiracEigenResult>> {
        let scan = self.scan(w)?;
        let sig: Vec<f64> = scan.iter().map(|s| s.1).collect();
        let global = sig.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut sorted = sig.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = sorted[sorted.len() / 2];
        let mut best = global;
        let mut out = Vec::new();
        for i in 1..sig.len() - 1 {
            if !(sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1]) {
                continue;
            }
            if sig[i] > 10.0 * global || sig[i] > 0.1 * median {
                continue;
            }
            let s = self.refine(scan[i - 1].0, scan[i + 1].0);
            best = best.min(s.sigma);
            if s.sigma < accept_tol {
                out.push(self.result_from(&s));
            }
        }
        if out.is_empty() {
            return Err(Error::NoEigenvalueFound { best_sigma: best });
        }
        out.sort_by(|a, b| a.e.total_cmp(&b.e));
        Ok(out)
    }

    /// Golden-section search to |dE| < 1e-10, then fixed-point polish of the
    /// stationarity condition E = Re(y^H H y) while sigma does not grow.
    pub fn refine(&self, lo: f64, hi: f64) -> SigmaSample {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = self.sigma_at(c);
        let mut fd = self.sigma_at(d);
        while b - a > 1e-10 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.sigma_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.sigma_at(d);
            }
        }
        let mut s = self.reduced.sample(0.5 * (a + b));
        for _ in 0..20 {
            let e = self.reduced.stationary_e(&s.y);
            if !(e > lo && e < hi) || (e - s.e).abs() < 1e-14 {
                break;
            }
            let next = self.reduced.sample(e);
            if next.sigma > s.sigma {
                break;
            }
            s = next;
        }
        s
    }

    fn result_from(&self, s: &SigmaSample) -> DiracEigenResult {
        let coeffs = self.reduced.coefficients(&s.y);
        let bc_residual = self.bc_residual(&coeffs);
        DiracEigenResult {
            e: s.e,
            coeffs,
            sigma_min: s.sigma,
            bc_residual,
        }
    }

    /// Sup-norm violation of u2 = i n u1 at 4 M_bnd boundary nodes interleaved
    /// with the collocation nodes, relative to the sup of |u| there.
    pub fn bc_residual(&self, coeffs: &[f64]) -> f64 {
        let m = 4 * self.disc.boundary.len();
        let nodes = match self.domain.boundary_nodes_shifted(m, 0.5) {
            Ok(n) => n,
            Err(_) => return f64::INFINITY,
        };
        let mut worst: f64 = 0.0;
        let mut size: f64 = 0.0;
        for b in &nodes {
            let (u1, u2) = evaluate_spinor(coeffs, &self.disc, b.p);
            let n = C64::new(b.normal[0], b.normal[1]);
            worst = worst.max((u2 - C64::i() * n * u1).norm());
            size = size.max((u1.norm_sqr() + u2.norm_sqr()).sqrt());
        }
        worst / size
    }
}

/// Smallest relative singular value of the pencil at E (builds the reduction).
pub fn sigma_min_at(ps: &PencilSystem, e: f64) -> Result<f64> {
    Ok(ReducedPencil::new(ps)?.sigma(e))
}

/// Unnormalized spinor (u1, u2) at x for real coefficients (alpha1, beta1, alpha2, beta2).
pub fn evaluate_spinor(coeffs: &[f64], disc: &Discretization, x: Point) -> (C64, C64) {
    let n = disc.n();
    let mut u1 = C64::new(0.0, 0.0);
    let mut u2 = C64::new(0.0, 0.0);
    for (j, &c) in disc.centers.iter().enumerate() {
        let (v, _) = multiquadric(disc.eps, c, x);
        u1 += C64::new(coeffs[j], coeffs[n + j]) * v;
        u2 += C64::new(coeffs[2 * n + j], coeffs[3 * n + j]) * v;
    }
    (u1, u2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub abs_u1: f64,
    pub arg_u1: f64,
    pub abs_u2: f64,
    pub arg_u2: f64,
}

/// Factor that makes the spinor unit-norm in the interior quadrature and u1
/// real positive where |u1| is largest among the interior nodes.
pub fn field_normalization(res: &DiracEigenResult, disc: &Discretization) -> C64 {
    let mut norm2 = 0.0;
    let mut peak = C64::new(0.0, 0.0);
    for q in &disc.interior {
        let (u1, u2) = evaluate_spinor(&res.coeffs, disc, q.p);
        norm2 += q.weight * (u1.norm_sqr() + u2.norm_sqr());
        if u1.norm() > peak.norm() {
            peak = u1;
        }
    }
    let phase = if peak.norm() > 0.0 { peak.conj() / peak.norm() } else { C64::new(1.0, 0.0) };
    phase / norm2.sqrt()
}

pub fn reconstruct_field(res: &DiracEigenResult, disc: &Discretization, grid: &[Point]) -> Vec<FieldSample> {
    let k = field_normalization(res, disc);
    grid.par_iter()
        .map(|&p| {
            let (u1, u2) = evaluate_spinor(&res.coeffs, disc, p);
            let (u1, u2) = (u1 * k, u2 * k);
            FieldSample {
                x: p[0],
                y: p[1],
                abs_u1: u1.norm(),
                arg_u1: u1.arg(),
                abs_u2: u2.norm(),
                arg_u2: u2.arg(),
            }
        })
        .collect()
}

pub fn write_field_csv<W: std::io::Write>(w: W, field: &[FieldSample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "abs_u1", "arg_u1", "abs_u2", "arg_u2"])?;
    for f in field {
        out.write_record(
            [f.x, f.y, f.abs_u1, f.arg_u1, f.abs_u2, f.arg_u2].map(crate::fmt_f64),
        )?;
    }
    out.flush()?;
    Ok(())
}
