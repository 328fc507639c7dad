//! Multiquadric RBF discretization: center placement by node repulsion,
//! collocation node sets, and the six collocation matrices.

use crate::error::{Error, Result};
use crate::geometry::{add, dist2, BoundaryNode, DomainSpec, Point, QuadNode};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const REPEL_ITERATIONS: usize = 200;
const REPEL_NEIGHBORS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationParams {
    pub n_centers: usize,
    /// Shape parameter for a domain of equivalent radius 1; divided by
    /// sqrt(area/pi) so the basis scales with the domain.
    pub eps: f64,
    /// Interior grid spacing in units of the equivalent radius sqrt(area/pi).
    pub interior_h: f64,
    /// Boundary collocation nodes; 0 means `n_centers`.
    pub n_boundary: usize,
    /// Width of the band outside the boundary where centers may sit, in units
    /// of the equivalent radius.
    pub center_margin: f64,
    pub seed: u64,
}

impl Default for DiscretizationParams {
    fn default() -> Self {
        DiscretizationParams {
            n_centers: 323,
            eps: 10.0,
            interior_h: 0.035,
            n_boundary: 0,
            center_margin: 0.3,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Discretization {
    pub centers: Vec<Point>,
    pub eps: f64,
    pub interior: Vec<QuadNode>,
    pub boundary: Vec<BoundaryNode>,
    pub seed: u64,
}

impl Discretization {
    pub fn build(d: &DomainSpec, p: &DiscretizationParams) -> Result<Self> {
        if !(p.eps > 0.0) {
            return Err(Error::Precondition("shape parameter must be positive".into()));
        }
        let scale = (d.area() / PI).sqrt();
        let centers = repel_centers_in_band(d, p.n_centers, p.seed, p.center_margin * scale)?;
        let interior = d.interior_grid(p.interior_h * scale)?;
        let m_bnd = if p.n_boundary == 0 { p.n_centers } else { p.n_boundary };
        let boundary = d.boundary_nodes(m_bnd)?;
        Self::from_parts(centers, p.eps / scale, interior, boundary, p.seed)
    }

    pub fn from_parts(
        centers: Vec<Point>,
        eps: f64,
        interior: Vec<QuadNode>,
        boundary: Vec<BoundaryNode>,
        seed: u64,
    ) -> Result<Self> {
        let n = centers.len();
        if n < 50 {
            return Err(Error::Precondition(format!("need at least 50 centers, got {n}")));
        }
        if 2 * interior.len() < n {
            return Err(Error::Precondition("fewer than N/2 interior collocation points".into()));
        }
        if boundary.len() < 16 {
            return Err(Error::Precondition("fewer than 16 boundary collocation points".into()));
        }
        if min_spacing(&centers) <= 0.0 {
            return Err(Error::Precondition("coincident centers".into()));
        }
        Ok(Discretization {
            centers,
            eps,
            interior,
            boundary,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }
}

/// Centers inside the domain.
pub fn repel_centers(d: &DomainSpec, n: usize, seed: u64) -> Result<Vec<Point>> {
    repel_centers_in_band(d, n, seed, 0.0)
}

/// Centers inside the domain or within `margin` outside its boundary.
///
/// Seeded rejection sampling, then k-nearest-neighbour inverse-square
/// repulsion with a fixed step of 0.1 mean spacings. Points pushed out of the
/// region are put back just inside it along the boundary normal.
pub fn repel_centers_in_band(d: &DomainSpec, n: usize, seed: u64, margin: f64) -> Result<Vec<Point>> {
    if n < 50 {
        return Err(Error::Precondition(format!("need at least 50 centers, got {n}")));
    }
    let margin = margin.max(0.0);
    let region_area = d.area() + margin * d.perimeter() + PI * margin * margin;
    let spacing = (region_area / n as f64).sqrt();
    let inside = |x: Point| d.contains(x) || (margin > 0.0 && d.distance_to_boundary(x) < margin);

    let (lo, hi) = d.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    let mut tries = 0usize;
    while pts.len() < n {
        tries += 1;
        if tries > 1000 * n {
            return Err(Error::RepelFailure {
                min_spacing: 0.0,
                target: 0.5 * (d.area() / n as f64).sqrt(),
            });
        }
        let x = [
            rng.random_range(lo[0] - margin..hi[0] + margin),
            rng.random_range(lo[1] - margin..hi[1] + margin),
        ];
        if inside(x) {
            pts.push(x);
        }
    }

    let k = REPEL_NEIGHBORS.min(n - 1);
    let step = 0.1 * spacing;
    let mut neigh: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut force = vec![[0.0; 2]; n];
    for _ in 0..REPEL_ITERATIONS {
        for i in 0..n {
            neigh.clear();
            neigh.extend((0..n).filter(|&j| j != i).map(|j| (dist2(pts[i], pts[j]), j)));
            neigh.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0));
            let mut f = [0.0; 2];
            for &(r2, j) in &neigh[..k] {
                let w = 1.0 / (r2 * r2.sqrt());
                f[0] += (pts[i][0] - pts[j][0]) * w;
                f[1] += (pts[i][1] - pts[j][1]) * w;
            }
            force[i] = f;
        }
        for i in 0..n {
            let f = force[i];
            let fn_ = f[0].hypot(f[1]);
            if fn_ == 0.0 || !fn_.is_finite() {
                continue;
            }
            let x = [pts[i][0] + step * f[0] / fn_, pts[i][1] + step * f[1] / fn_];
            pts[i] = if inside(x) {
                x
            } else {
                let (t, _) = d.closest_boundary(x);
                let nrm = d.normal_at(t);
                let back = margin - 1e-3 * spacing;
                let y = add(d.curve(t).0, [back * nrm[0], back * nrm[1]]);
                if inside(y) {
                    y
                } else {
                    pts[i]
                }
            };
        }
    }
    let target = 0.5 * (d.area() / n as f64).sqrt();
    let got = min_spacing(&pts);
    if got < target {
        return Err(Error::RepelFailure {
            min_spacing: got,
            target,
        });
    }
    Ok(pts)
}

pub fn min_spacing(pts: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(dist2(pts[i], pts[j]));
        }
    }
    best.sqrt()
}

/// sqrt(1 + (eps |x - c|)^2) and its gradient in x.
#[inline]
pub fn multiquadric(eps: f64, c: Point, x: Point) -> (f64, [f64; 2]) {
    let dx = x[0] - c[0];
    let dy = x[1] - c[1];
    let e2 = eps * eps;
    let v = (1.0 + e2 * (dx * dx + dy * dy)).sqrt();
    (v, [e2 * dx / v, e2 * dy / v])
}

#[derive(Clone, Debug)]
pub struct CollocationMatrices {
    /// Basis values at interior points.
    pub mint: Mat<f64>,
    /// x1-derivatives at interior points.
    pub m1int: Mat<f64>,
    /// x2-derivatives at interior points.
    pub m2int: Mat<f64>,
    /// Basis values at boundary points.
    pub mbnd: Mat<f64>,
    /// n1 times basis values at boundary points.
    pub m1bnd: Mat<f64>,
    /// n2 times basis values at boundary points.
    pub m2bnd: Mat<f64>,
}

pub fn collocation_matrices(disc: &Discretization) -> CollocationMatrices {
    collocation_from_nodes(&disc.centers, disc.eps, &disc.interior, &disc.boundary)
}

pub fn collocation_from_nodes(
    centers: &[Point],
    eps: f64,
    interior: &[QuadNode],
    boundary: &[BoundaryNode],
) -> CollocationMatrices {
    let n = centers.len();
    let mi = interior.len();
    let mb = boundary.len();
    let mut mint = Mat::zeros(mi, n);
    let mut m1int = Mat::zeros(mi, n);
    let mut m2int = Mat::zeros(mi, n);
    let mut mbnd = Mat::zeros(mb, n);
    let mut m1bnd = Mat::zeros(mb, n);
    let mut m2bnd = Mat::zeros(mb, n);
    for (j, &c) in centers.iter().enumerate() {
        for (i, q) in interior.iter().enumerate() {
            let (v, g) = multiquadric(eps, c, q.p);
            mint[(i, j)] = v;
            m1int[(i, j)] = g[0];
            m2int[(i, j)] = g[1];
        }
        for (i, b) in boundary.iter().enumerate() {
            let (v, _) = multiquadric(eps, c, b.p);
            mbnd[(i, j)] = v;
            m1bnd[(i, j)] = b.normal[0] * v;
            m2bnd[(i, j)] = b.normal[1] * v;
        }
    }
    CollocationMatrices {
        mint,
        m1int,
        m2int,
        mbnd,
        m1bnd,
        m2bnd,
    }
}
