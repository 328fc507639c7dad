//! Closed-form geometric bounds on the principal eigenvalue and the
//! conjecture comparisons.

use crate::error::Result;
use crate::geometry::DomainSpec;
use crate::specfun::disk_e1;
use crate::varform::MuCurve;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for the proven bounds when checked against solver output.
pub const SOLVER_TOL: f64 = 5e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// sqrt(2 pi / area).
    pub lower_area: f64,
    /// perimeter / area.
    pub upper_simple: f64,
    /// perimeter E1(D) / (pi r_i^2 + area).
    pub upper_inradius: f64,
    /// Positive root of the quadratic bound in E.
    pub upper_ecrit: f64,
    /// sqrt(pi / area) E1(D), the conjectured optimal lower bound.
    pub fk_reference: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFlags {
    pub lower_ok: bool,
    pub simple_ok: bool,
    pub inradius_ok: bool,
    pub ecrit_ok: bool,
    /// Conjecture check; a failure is reported, never fatal.
    pub fk_ok: bool,
}

impl BoundFlags {
    /// All proven bounds hold.
    pub fn proven_ok(&self) -> bool {
        self.lower_ok && self.simple_ok && self.inradius_ok && self.ecrit_ok
    }
}

pub fn evaluate_bounds(d: &DomainSpec) -> BoundsReport {
    bounds_from_scalars(d.area(), d.perimeter(), d.inradius().0)
}

pub fn bounds_from_scalars(area: f64, perimeter: f64, inradius: f64) -> BoundsReport {
    let e1 = disk_e1().e1_disk;
    let s = PI * inradius * inradius + area;
    let disc = perimeter * perimeter + 8.0 * PI * e1 * (e1 - 1.0) * s;
    BoundsReport {
        lower_area: (2.0 * PI / area).sqrt(),
        upper_simple: perimeter / area,
        upper_inradius: perimeter * e1 / s,
        upper_ecrit: (perimeter + disc.sqrt()) / (2.0 * s),
        fk_reference: (PI / area).sqrt() * e1,
    }
}

pub fn check_e1_against_bounds(r: &BoundsReport, e1: f64, tol: f64) -> BoundFlags {
    BoundFlags {
        lower_ok: r.lower_area - tol <= e1,
        simple_ok: e1 <= r.upper_simple + tol,
        inradius_ok: e1 <= r.upper_inradius + tol,
        ecrit_ok: e1 <= r.upper_ecrit + tol,
        fk_ok: e1 >= r.fk_reference - tol,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureCheck {
    pub e: f64,
    /// mu of the domain at E.
    pub lhs: f64,
    /// (pi / area) mu of the unit disk at sqrt(area / pi) E.
    pub rhs: f64,
    pub ok: bool,
}

/// Compare a domain's mu-curve with the area-matched disk curve, sample by sample.
pub fn conjecture_mu_check(
    domain_curve: &MuCurve,
    area: f64,
    disk_mu: impl Fn(f64) -> Result<f64>,
    tol: f64,
) -> Result<Vec<ConjectureCheck>> {
    let k = (area / PI).sqrt();
    domain_curve
        .samples
        .iter()
        .map(|s| {
            let rhs = (PI / area) * disk_mu(k * s.e)?;
            Ok(ConjectureCheck {
                e: s.e,
                lhs: s.mu,
                rhs,
                ok: s.mu >= rhs - tol,
            })
        })
        .collect()
}
