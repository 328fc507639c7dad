//! Smooth simply connected planar domains: disks, radial Fourier perturbations of
//! the circle, and images of the unit disk under univalent polynomials.
//!
//! Every boundary is a counterclockwise periodic curve `gamma(t)`, `t in [0, 2pi)`,
//! so the outward normal is the unit tangent rotated by -pi/2.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_unit;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub type Point = [f64; 2];

/// Samples used for trapezoid rules, positivity tests and the boundary polygon.
const SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainKind {
    Disk,
    RadialFourier,
    ConformalPoly,
}

#[derive(Clone, Debug)]
pub struct DomainSpec {
    kind: DomainKind,
    r0: f64,
    radial: Vec<[f64; 2]>,
    conformal: Vec<Complex64>,
    center: Point,
    area: f64,
    perimeter: f64,
    inradius: f64,
    incenter: Point,
    polygon: Arc<Vec<Point>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryNode {
    pub p: Point,
    pub normal: Point,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadNode {
    pub p: Point,
    pub weight: f64,
}

/// On-disk form of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub kind: DomainKind,
    #[serde(default)]
    pub r0: f64,
    #[serde(default)]
    pub radial_coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    pub conformal_coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "is_origin")]
    pub center: [f64; 2],
}

fn is_origin(p: &[f64; 2]) -> bool {
    p[0] == 0.0 && p[1] == 0.0
}

impl DomainSpec {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::NonPositiveRadius { min_radius: radius });
        }
        Self::finish(DomainKind::Disk, radius, Vec::new(), Vec::new(), [0.0, 0.0])
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn radial_coeffs(&self) -> &[[f64; 2]] {
        &self.radial
    }
    pub fn conformal_coeffs(&self) -> &[Complex64] {
        &self.conformal
    }
    pub fn center(&self) -> Point {
        self.center
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }
    pub fn inradius(&self) -> (f64, Point) {
        (self.inradius, self.incenter)
    }

    /// Same shape moved by `offset`.
    pub fn translated(&self, offset: Point) -> Self {
        let mut d = self.clone();
        d.center = add(d.center, offset);
        d.incenter = add(d.incenter, offset);
        d.polygon = Arc::new(d.polygon.iter().map(|&p| add(p, offset)).collect());
        d
    }

    pub fn to_file(&self) -> DomainFile {
        DomainFile {
            kind: self.kind,
            r0: self.r0,
            radial_coeffs: self.radial.clone(),
            conformal_coeffs: self.conformal.iter().map(|c| [c.re, c.im]).collect(),
            center: self.center,
        }
    }

    pub fn from_file(f: &DomainFile) -> Result<Self> {
        let d = match f.kind {
            DomainKind::Disk => Self::disk(f.r0)?,
            DomainKind::RadialFourier => make_radial_domain(&f.radial_coeffs, f.r0)?,
            DomainKind::ConformalPoly => {
                let c: Vec<Complex64> = f.conformal_coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect();
                make_conformal_domain(&c)?
            }
        };
        Ok(if is_origin(&f.center) { d } else { d.translated(f.center) })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: DomainFile = serde_json::from_str(s)?;
        Self::from_file(&f)
    }

    /// r(theta) and r'(theta) for disk and radial domains.
    fn radius_at(&self, t: f64) -> (f64, f64) {
        let mut r = self.r0;
        let mut dr = 0.0;
        for (k, ab) in self.radial.iter().enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * t).sin_cos();
            r += ab[0] * c + ab[1] * s;
            dr += kf * (ab[1] * c - ab[0] * s);
        }
        (r, dr)
    }

    fn map_value_and_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for (k, c) in self.conformal.iter().enumerate().rev() {
            let n = (k + 1) as f64;
            f = (f + c) * z;
            df = df * z + c * n;
        }
        (f, df)
    }

    /// Boundary point and velocity at parameter t (counterclockwise).
    pub fn curve(&self, t: f64) -> (Point, Point) {
        let (s, c) = t.sin_cos();
        let (p, v) = match self.kind {
            DomainKind::Disk | DomainKind::RadialFourier => {
                let (r, dr) = self.radius_at(t);
                ([r * c, r * s], [dr * c - r * s, dr * s + r * c])
            }
            DomainKind::ConformalPoly => {
                let z = Complex64::new(c, s);
                let (f, df) = self.map_value_and_derivative(z);
                let v = Complex64::i() * z * df;
                ([f.re, f.im], [v.re, v.im])
            }
        };
        (add(p, self.center), v)
    }

    /// Image of the polar point (rho, t) of the unit disk and the area Jacobian
    /// of (rho, t) -> x.
    pub fn map_polar(&self, rho: f64, t: f64) -> (Point, f64) {
        let (s, c) = t.sin_cos();
        let (p, jac) = match self.kind {
            DomainKind::Disk | DomainKind::RadialFourier => {
                let (r, _) = self.radius_at(t);
                ([rho * r * c, rho * r * s], rho * r * r)
            }
            DomainKind::ConformalPoly => {
                let z = Complex64::new(rho * c, rho * s);
                let (f, df) = self.map_value_and_derivative(z);
                ([f.re, f.im], rho * df.norm_sqr())
            }
        };
        (add(p, self.center), jac)
    }

    pub fn contains(&self, x: Point) -> bool {
        let y = sub(x, self.center);
        match self.kind {
            DomainKind::Disk => y[0].hypot(y[1]) < self.r0,
            DomainKind::RadialFourier => {
                let rho = y[0].hypot(y[1]);
                rho < self.radius_at(y[1].atan2(y[0])).0
            }
            DomainKind::ConformalPoly => {
                // The polygon sags off the curve by ~1e-6; close to the edge
                // decide by the side of the exact nearest boundary point.
                let edge = dist2(self.polygon[0], self.polygon[1]).sqrt();
                let near = self.polygon.iter().any(|&p| dist2(p, x) < 4.0 * edge * edge);
                if near {
                    let (t, _) = self.closest_boundary(x);
                    let b = self.curve(t).0;
                    let n = self.normal_at(t);
                    (x[0] - b[0]) * n[0] + (x[1] - b[1]) * n[1] < 0.0
                } else {
                    winding_number(&self.polygon, x) != 0
                }
            }
        }
    }

    /// Unsigned distance from `x` to the boundary curve.
    pub fn distance_to_boundary(&self, x: Point) -> f64 {
        self.closest_boundary(x).1
    }

    /// Curve parameter of the boundary point nearest to `x`, and the distance.
    pub fn closest_boundary(&self, x: Point) -> (f64, f64) {
        if self.kind == DomainKind::Disk {
            let y = sub(x, self.center);
            return (y[1].atan2(y[0]), (y[0].hypot(y[1]) - self.r0).abs());
        }
        let (k, dk) = self
            .polygon
            .iter()
            .map(|&p| dist2(p, x))
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
        let dt = 2.0 * PI / SAMPLES as f64;
        let tk = k as f64 * dt;
        let f = |t: f64| dist2(self.curve(t).0, x);
        let t = golden_min(f, tk - dt, tk + dt, 1e-13);
        let ft = f(t);
        if ft <= dk {
            (t, ft.sqrt())
        } else {
            (tk, dk.sqrt())
        }
    }

    /// Outward unit normal at curve parameter t.
    pub fn normal_at(&self, t: f64) -> Point {
        let v = self.curve(t).1;
        let s = norm(v);
        [v[1] / s, -v[0] / s]
    }

    /// Bounding box of the boundary polygon, padded slightly.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in self.polygon.iter() {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let pad = 1e-3 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
        ([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad])
    }

    fn finish(kind: DomainKind, r0: f64, radial: Vec<[f64; 2]>, conformal: Vec<Complex64>, center: Point) -> Result<Self> {
        let mut d = DomainSpec {
            kind,
            r0,
            radial,
            conformal,
            center,
            area: 0.0,
            perimeter: 0.0,
            inradius: 0.0,
            incenter: center,
            polygon: Arc::new(Vec::new()),
        };
        let dt = 2.0 * PI / SAMPLES as f64;
        let mut polygon = Vec::with_capacity(SAMPLES);
        let mut length = 0.0;
        for j in 0..SAMPLES {
            let (p, v) = d.curve(j as f64 * dt);
            polygon.push(p);
            length += norm(v);
        }
        d.polygon = Arc::new(polygon);
        d.perimeter = match kind {
            DomainKind::Disk => 2.0 * PI * r0,
            _ => length * dt,
        };
        d.area = match kind {
            DomainKind::Disk => PI * r0 * r0,
            DomainKind::RadialFourier => {
                let s: f64 = (0..SAMPLES).map(|j| d.radius_at(j as f64 * dt).0.powi(2)).sum();
                0.5 * s * dt
            }
            DomainKind::ConformalPoly => {
                let formula = conformal_area(&d.conformal);
                let quad = d.jacobian_area();
                if ((formula - quad) / formula).abs() > 1e-8 {
                    return Err(Error::InvalidDomain(format!(
                        "area formula {formula} disagrees with Jacobian quadrature {quad}"
                    )));
                }
                formula
            }
        };
        if !(d.area > 0.0 && d.perimeter > 0.0) || !d.area.is_finite() || !d.perimeter.is_finite() {
            return Err(Error::InvalidDomain("area and perimeter must be positive".into()));
        }
        if d.perimeter * d.perimeter < 4.0 * PI * d.area * (1.0 - 1e-9) {
            return Err(Error::InvalidDomain("isoperimetric inequality violated".into()));
        }
        let (ri, c) = match kind {
            DomainKind::Disk => (r0, center),
            _ => d.search_incenter(),
        };
        if !(ri > 0.0) || ri > (d.area / PI).sqrt() * (1.0 + 1e-8) {
            return Err(Error::InvalidDomain(format!("inradius {ri} out of range")));
        }
        d.inradius = ri;
        d.incenter = c;
        Ok(d)
    }

    /// Area as the integral of the polar-map Jacobian; exact for polynomial maps.
    fn jacobian_area(&self) -> f64 {
        let n = self.conformal.len();
        let (rho, wr) = gauss_legendre_unit(n + 4);
        let nt = 4 * n + 16;
        let dt = 2.0 * PI / nt as f64;
        let mut s = 0.0;
        for (r, w) in rho.iter().zip(&wr) {
            for j in 0..nt {
                s += w * dt * self.map_polar(*r, j as f64 * dt).1;
            }
        }
        s
    }

    fn search_incenter(&self) -> (f64, Point) {
        let (lo, hi) = self.bounding_box();
        let g = 48;
        let hx = (hi[0] - lo[0]) / g as f64;
        let hy = (hi[1] - lo[1]) / g as f64;
        let mut best = (f64::NEG_INFINITY, self.center);
        for i in 0..=g {
            for j in 0..=g {
                let x = [lo[0] + i as f64 * hx, lo[1] + j as f64 * hy];
                if self.contains(x) {
                    let r = self.distance_to_boundary(x);
                    if r > best.0 {
                        best = (r, x);
                    }
                }
            }
        }
        let objective = |x: Point| {
            if self.contains(x) {
                -self.distance_to_boundary(x)
            } else {
                f64::INFINITY
            }
        };
        let mut x = best.1;
        let mut size = hx.max(hy);
        for _ in 0..4 {
            x = nelder_mead(&objective, x, size, 1e-11, 600);
            size *= 0.25;
        }
        let r = -objective(x);
        if r >= best.0 {
            (r, x)
        } else {
            best
        }
    }

    /// Boundary nodes equispaced in arclength, the first at t = 0.
    pub fn boundary_nodes(&self, m: usize) -> Result<Vec<BoundaryNode>> {
        self.boundary_nodes_shifted(m, 0.0)
    }

    /// Like `boundary_nodes` but with the j-th node at arclength (j + shift) L / m.
    pub fn boundary_nodes_shifted(&self, m: usize, shift: f64) -> Result<Vec<BoundaryNode>> {
        if m < 16 {
            return Err(Error::Precondition(format!("need at least 16 boundary nodes, got {m}")));
        }
        let arc = ArcLength::new(self);
        let total = arc.total();
        let weight = self.perimeter / m as f64;
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            let target = (j as f64 + shift) * total / m as f64;
            let t = arc.invert(target, 2.0 * PI * (j as f64 + shift) / m as f64);
            let (p, v) = self.curve(t);
            let speed = norm(v);
            out.push(BoundaryNode {
                p,
                normal: [v[1] / speed, -v[0] / speed],
                weight,
            });
        }
        Ok(out)
    }

    /// Uniform grid points with spacing h (aligned with the origin) lying at
    /// distance more than h/2 from the boundary; weight h^2 each.
    pub fn interior_grid(&self, h: f64) -> Result<Vec<QuadNode>> {
        if !(h > 0.0) {
            return Err(Error::Precondition("grid spacing must be positive".into()));
        }
        let (lo, hi) = self.bounding_box();
        let i0 = (lo[0] / h).floor() as i64;
        let i1 = (hi[0] / h).ceil() as i64;
        let j0 = (lo[1] / h).floor() as i64;
        let j1 = (hi[1] / h).ceil() as i64;
        if (i1 - i0 + 1).saturating_mul(j1 - j0 + 1) > 50_000_000 {
            return Err(Error::Precondition("grid spacing too small".into()));
        }
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let x = [i as f64 * h, j as f64 * h];
                if self.contains(x) && self.distance_to_boundary(x) > 0.5 * h {
                    out.push(QuadNode { p: x, weight: h * h });
                }
            }
        }
        if out.len() < 50 {
            return Err(Error::GridTooCoarse { points: out.len() });
        }
        Ok(out)
    }

    /// Tensor rule through the polar parametrization: Gauss-Legendre in the
    /// radial parameter, periodic trapezoid in angle.
    pub fn polar_quadrature(&self, n_rho: usize, n_theta: usize) -> Vec<QuadNode> {
        let (rho, wr) = gauss_legendre_unit(n_rho);
        let dt = 2.0 * PI / n_theta as f64;
        let mut out = Vec::with_capacity(n_rho * n_theta);
        for j in 0..n_theta {
            for (r, w) in rho.iter().zip(&wr) {
                let (p, jac) = self.map_polar(*r, j as f64 * dt);
                out.push(QuadNode { p, weight: w * dt * jac });
            }
        }
        out
    }
}

pub fn make_radial_domain(coeffs: &[[f64; 2]], r0: f64) -> Result<DomainSpec> {
    if !r0.is_finite() || coeffs.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidDomain("non-finite radial coefficient".into()));
    }
    let probe = DomainSpec {
        kind: DomainKind::RadialFourier,
        r0,
        radial: coeffs.to_vec(),
        conformal: Vec::new(),
        center: [0.0, 0.0],
        area: 0.0,
        perimeter: 0.0,
        inradius: 0.0,
        incenter: [0.0, 0.0],
        polygon: Arc::new(Vec::new()),
    };
    let n = SAMPLES.max(16 * coeffs.len());
    let min_r = (0..n)
        .map(|j| probe.radius_at(2.0 * PI * j as f64 / n as f64).0)
        .fold(f64::INFINITY, f64::min);
    if min_r <= 0.0 {
        return Err(Error::NonPositiveRadius { min_radius: min_r });
    }
    DomainSpec::finish(DomainKind::RadialFourier, r0, coeffs.to_vec(), Vec::new(), [0.0, 0.0])
}

pub fn make_conformal_domain(c: &[Complex64]) -> Result<DomainSpec> {
    if c.is_empty() {
        return Err(Error::UnivalenceViolation { margin: 0.0 });
    }
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidDomain("non-finite conformal coefficient".into()));
    }
    let tail: f64 = c.iter().enumerate().skip(1).map(|(k, z)| (k + 1) as f64 * z.norm()).sum();
    let margin = c[0].norm() - tail;
    if margin <= 0.0 {
        return Err(Error::UnivalenceViolation { margin });
    }
    DomainSpec::finish(DomainKind::ConformalPoly, 0.0, Vec::new(), c.to_vec(), [0.0, 0.0])
}

/// pi * sum n |c_n|^2.
pub fn conformal_area(c: &[Complex64]) -> f64 {
    PI * c.iter().enumerate().map(|(k, z)| (k + 1) as f64 * z.norm_sqr()).sum::<f64>()
}

/// Uniform rescaling about the domain's reference point so the area becomes `target`.
pub fn scale_to_area(d: &DomainSpec, target: f64) -> Result<DomainSpec> {
    if !(target > 0.0) {
        return Err(Error::Precondition("target area must be positive".into()));
    }
    let s = (target / d.area).sqrt();
    let scaled = match d.kind {
        DomainKind::Disk => DomainSpec::disk(d.r0 * s)?,
        DomainKind::RadialFourier => {
            let c: Vec<[f64; 2]> = d.radial.iter().map(|ab| [ab[0] * s, ab[1] * s]).collect();
            make_radial_domain(&c, d.r0 * s)?
        }
        DomainKind::ConformalPoly => {
            let c: Vec<Complex64> = d.conformal.iter().map(|z| z * s).collect();
            make_conformal_domain(&c)?
        }
    };
    Ok(if is_origin(&d.center) { scaled } else { scaled.translated(d.center) })
}

/// Cumulative arclength s(t) from the Fourier series of the speed |gamma'(t)|.
struct ArcLength<'a> {
    d: &'a DomainSpec,
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl<'a> ArcLength<'a> {
    fn new(d: &'a DomainSpec) -> Self {
        let n = SAMPLES;
        let dt = 2.0 * PI / n as f64;
        let speed: Vec<f64> = (0..n).map(|j| norm(d.curve(j as f64 * dt).1)).collect();
        let mean = speed.iter().sum::<f64>() / n as f64;
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        let mut small = 0;
        for k in 1..n / 4 {
            let (mut a, mut b) = (0.0, 0.0);
            let (s1, c1) = (k as f64 * dt).sin_cos();
            let (mut s, mut c) = (0.0f64, 1.0f64);
            for v in &speed {
                a += v * c;
                b += v * s;
                let cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
            a *= 2.0 / n as f64;
            b *= 2.0 / n as f64;
            cos.push(a);
            sin.push(b);
            if a.abs().max(b.abs()) < 1e-16 * mean {
                small += 1;
                if small >= 8 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        ArcLength { d, mean, cos, sin }
    }

    fn total(&self) -> f64 {
        2.0 * PI * self.mean
    }

    fn eval(&self, t: f64) -> f64 {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut out = self.mean * t;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kf = (k + 1) as f64;
            out += (a * s - b * (c - 1.0)) / kf;
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
        }
        out
    }

    fn invert(&self, target: f64, guess: f64) -> f64 {
        let mut t = guess;
        for _ in 0..50 {
            let step = (self.eval(t) - target) / norm(self.d.curve(t).1);
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        t
    }
}

fn winding_number(poly: &[Point], x: Point) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = (b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= x[1] {
            if b[1] > x[1] && cross > 0.0 {
                w += 1;
            }
        } else if b[1] <= x[1] && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn nelder_mead(f: &impl Fn(Point) -> f64, x0: Point, size: f64, tol: f64, max_iter: usize) -> Point {
    let mut s = [x0, [x0[0] + size, x0[1]], [x0[0], x0[1] + size]];
    let mut v = [f(s[0]), f(s[1]), f(s[2])];
    for _ in 0..max_iter {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        s = [s[idx[0]], s[idx[1]], s[idx[2]]];
        v = [v[idx[0]], v[idx[1]], v[idx[2]]];
        let diam = dist2(s[0], s[1]).max(dist2(s[0], s[2])).sqrt();
        if diam < tol {
            break;
        }
        let c = [0.5 * (s[0][0] + s[1][0]), 0.5 * (s[0][1] + s[1][1])];
        let along = |t: f64| [c[0] + t * (s[2][0] - c[0]), c[1] + t * (s[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < v[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                s[2] = xe;
                v[2] = fe;
            } else {
                s[2] = xr;
                v[2] = fr;
            }
        } else if fr < v[1] {
            s[2] = xr;
            v[2] = fr;
        } else {
            let xc = if fr < v[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < v[2].min(fr) {
                s[2] = xc;
                v[2] = fc;
            } else {
                for i in 1..3 {
                    s[i] = [0.5 * (s[0][0] + s[i][0]), 0.5 * (s[0][1] + s[i][1])];
                    v[i] = f(s[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap();
    s[best]
}

pub(crate) fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}
pub(crate) fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}
