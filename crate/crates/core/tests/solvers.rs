//! Direct and variational solvers on small and mid-size discretizations.

use dirac_infmass::config::SolverConfig;
use dirac_infmass::dirac::{assemble_pencil, reconstruct_field, DiracProblem, RowScaling, ScanWindow};
use dirac_infmass::discretize::{collocation_matrices, Discretization, DiscretizationParams};
use dirac_infmass::geometry::{make_conformal_domain, DomainSpec};
use dirac_infmass::harness::{e1_variational, mu_evaluator, random_domain};
use dirac_infmass::specfun::{disk_e1, E1_DISK_PUBLISHED};
use dirac_infmass::varform::{assemble_forms, assemble_forms_with, e1_from_mu, mu_curve, transplant_bound, FormQuadrature, MuEvaluator};
use dirac_infmass::Error;
use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn small_disc(d: &DomainSpec) -> Discretization {
    let p = DiscretizationParams {
        n_centers: 60,
        eps: 4.0,
        interior_h: 0.1,
        ..DiscretizationParams::default()
    };
    Discretization::build(d, &p).unwrap()
}

struct DiskSolve {
    problem: DiracProblem,
    e1: f64,
}

/// Unit disk at the default configuration, shared by the tests below.
fn disk() -> &'static DiskSolve {
    static CELL: OnceLock<DiskSolve> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = SolverConfig::default();
        let d = DomainSpec::disk(1.0).unwrap();
        let problem = DiracProblem::new(d.clone(), Discretization::build(&d, &cfg.discretization()).unwrap()).unwrap();
        let e1 = problem
            .find_eigenvalues(&cfg.scan_window(d.area(), d.perimeter()), cfg.accept_tol)
            .unwrap()[0]
            .e;
        DiskSolve { problem, e1 }
    })
}

#[test]
fn pencil_block_layout() {
    let d = random_domain(2, 4, 0.2).unwrap();
    let disc = small_disc(&d);
    let cm = collocation_matrices(&disc);
    let ps = assemble_pencil(&cm, &RowScaling::unit(disc.interior.len(), disc.boundary.len()));
    let (n, mi, mb) = (ps.n, ps.m_int, ps.m_bnd);
    let (a, b) = (ps.a(), ps.b());
    assert_eq!(a.nrows(), 4 * mi + 2 * mb);
    assert_eq!(a.ncols(), 4 * n);
    for i in 0..mi {
        for j in 0..n {
            assert_eq!(a[(i, 2 * n + j)], -cm.m2int[(i, j)]);
            assert_eq!(a[(i, 3 * n + j)], cm.m1int[(i, j)]);
            assert_eq!(a[(i, j)], 0.0);
            for k in 0..4 {
                assert_eq!(b[(k * mi + i, k * n + j)], cm.mint[(i, j)]);
            }
        }
    }
    for i in 0..mb {
        for j in 0..n {
            let r = 4 * mi + i;
            assert_eq!(a[(r, j)], cm.m2bnd[(i, j)]);
            assert_eq!(a[(r, n + j)], cm.m1bnd[(i, j)]);
            assert_eq!(a[(r, 2 * n + j)], cm.mbnd[(i, j)]);
            assert_eq!(a[(r, 3 * n + j)], 0.0);
        }
    }
    for r in 4 * mi..a.nrows() {
        assert!((0..4 * n).all(|c| b[(r, c)] == 0.0));
    }
}

/// Real rows (2k, 2k+1) of each equation and real columns (Re, Im) of each
/// unknown are the real split of the complex system.
#[test]
fn real_pencil_is_the_split_complex_pencil() {
    let d = random_domain(4, 4, 0.2).unwrap();
    let disc = small_disc(&d);
    let ps = assemble_pencil(&collocation_matrices(&disc), &RowScaling::from_discretization(&disc));
    let (n, mi, mb) = (ps.n, ps.m_int, ps.m_bnd);
    let (ca, cb) = (ps.complex_a(), ps.complex_b());
    let (a, b) = (ps.a(), ps.b());
    let real_row = |ci: usize, imag: bool| -> usize {
        if ci < 2 * mi {
            let (eq, i) = (ci / mi, ci % mi);
            (2 * eq + imag as usize) * mi + i
        } else {
            4 * mi + imag as usize * mb + (ci - 2 * mi)
        }
    };
    for (cm, rm) in [(&ca, &a), (&cb, &b)] {
        for ci in 0..2 * mi + mb {
            for cj in 0..2 * n {
                let z = cm[(ci, cj)];
                let (u, j) = (cj / n, cj % n);
                let (re_col, im_col) = (2 * u * n + j, (2 * u + 1) * n + j);
                assert_eq!(rm[(real_row(ci, false), re_col)], z.re);
                assert_eq!(rm[(real_row(ci, false), im_col)], -z.im);
                assert_eq!(rm[(real_row(ci, true), re_col)], z.im);
                assert_eq!(rm[(real_row(ci, true), im_col)], z.re);
            }
        }
    }
}

/// The real pencil commutes with J = multiplication by i on coefficient pairs.
#[test]
fn real_pencil_commutes_with_multiplication_by_i() {
    let d = DomainSpec::disk(1.0).unwrap();
    let disc = small_disc(&d);
    let ps = assemble_pencil(&collocation_matrices(&disc), &RowScaling::unit(disc.interior.len(), disc.boundary.len()));
    let a = ps.a();
    let (n, mi, mb) = (ps.n, ps.m_int, ps.m_bnd);
    let x = Mat::<f64>::from_fn(4 * n, 1, |i, _| ((i * 7919) % 101) as f64 / 101.0 - 0.5);
    let jx = Mat::<f64>::from_fn(4 * n, 1, |i, _| {
        let (blk, j) = (i / n, i % n);
        match blk % 2 {
            0 => -x[((blk + 1) * n + j, 0)],
            _ => x[((blk - 1) * n + j, 0)],
        }
    });
    let ax = &a * &x;
    let ajx = &a * &jx;
    let row_pairs: Vec<(usize, usize)> = (0..2)
        .flat_map(|eq| (0..mi).map(move |i| (2 * eq * mi + i, (2 * eq + 1) * mi + i)))
        .chain((0..mb).map(|i| (4 * mi + i, 4 * mi + mb + i)))
        .collect();
    let scale = ax.norm_l2();
    for (re, im) in row_pairs {
        assert!((ajx[(re, 0)] + ax[(im, 0)]).abs() < 1e-12 * scale);
        assert!((ajx[(im, 0)] - ax[(re, 0)]).abs() < 1e-12 * scale);
    }
}

#[test]
fn discretization_and_sigma_are_deterministic() {
    let d = random_domain(9, 8, 0.2).unwrap();
    let a = small_disc(&d);
    let b = small_disc(&d);
    assert_eq!(a.centers, b.centers);
    let (ca, cb) = (collocation_matrices(&a), collocation_matrices(&b));
    assert!(ca.mint == cb.mint && ca.m1bnd == cb.m1bnd);
    let pa = DiracProblem::new(d.clone(), a).unwrap();
    let pb = DiracProblem::new(d.clone(), b).unwrap();
    assert_eq!(pa.sigma_at(1.3).to_bits(), pb.sigma_at(1.3).to_bits());
}

#[test]
fn sigma_profile_on_the_disk() {
    let s = disk();
    let far = s.problem.sigma_at(0.1);
    let at = s.problem.sigma_at(s.e1);
    assert!(far > 1e-3, "{far}");
    assert!(at < 1e-6, "{at}");
    assert!(s.problem.sigma_at(s.e1 - 0.05) > at && s.problem.sigma_at(s.e1 + 0.05) > at);
}

#[test]
fn disk_eigenpair_structure() {
    let s = disk();
    assert!((s.e1 - E1_DISK_PUBLISHED).abs() < 1e-5);
    let cfg = SolverConfig::default();
    let d = &s.problem.domain;
    let r = s
        .problem
        .find_eigenvalues(&cfg.scan_window(d.area(), d.perimeter()), cfg.accept_tol)
        .unwrap()
        .remove(0);
    let norm: f64 = r.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!(r.bc_residual < 1e-4, "{}", r.bc_residual);
    assert!(r.e >= (2.0 * PI / d.area()).sqrt() - 1e-6);
    let disc = &s.problem.disc;
    let pts: Vec<[f64; 2]> = disc.interior.iter().map(|q| q.p).collect();
    let f = reconstruct_field(&r, disc, &pts);
    let total: f64 = f
        .iter()
        .zip(&disc.interior)
        .map(|(s, q)| q.weight * (s.abs_u1.powi(2) + s.abs_u2.powi(2)))
        .sum();
    assert!((total - 1.0).abs() < 1e-6);
    // Compare with the exact eigenfunction up to the global phase fixed by the normalization.
    let exact: Vec<(C64, C64)> = pts.iter().map(|&p| dirac_infmass::specfun::disk_eigenfunction(p)).collect();
    let exact_norm: f64 = exact
        .iter()
        .zip(&disc.interior)
        .map(|((a, b), q)| q.weight * (a.norm_sqr() + b.norm_sqr()))
        .sum::<f64>()
        .sqrt();
    let worst = f
        .iter()
        .zip(&exact)
        .map(|(s, (u1, _))| (s.abs_u1 - u1.norm() / exact_norm).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn spectrum_is_symmetric_on_the_disk() {
    let s = disk();
    let cfg = SolverConfig::default();
    let minus = s
        .problem
        .find_eigenvalues(&ScanWindow { lo: -1.7, hi: -1.2, step: 0.01 }, cfg.accept_tol)
        .unwrap();
    assert!((minus.last().unwrap().e + s.e1).abs() < 1e-5);
}

#[test]
fn scaled_disk_eigenvalue() {
    let cfg = SolverConfig::default();
    let d = DomainSpec::disk(2.0).unwrap();
    let p = DiracProblem::new(d.clone(), Discretization::build(&d, &cfg.discretization()).unwrap()).unwrap();
    let e = p
        .find_eigenvalues(&cfg.scan_window(d.area(), d.perimeter()), cfg.accept_tol)
        .unwrap()[0]
        .e;
    assert!((e - disk_e1().e1_disk / 2.0).abs() < 1e-5, "{e}");
}

#[test]
fn scan_window_preconditions() {
    let s = disk();
    assert!(matches!(
        s.problem.scan(&ScanWindow { lo: 1.0, hi: 2.0, step: 0.05 }),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        s.problem.scan(&ScanWindow { lo: 2.0, hi: 1.0, step: 0.01 }),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        s.problem.find_eigenvalues(&ScanWindow { lo: 0.2, hi: 1.0, step: 0.02 }, 1e-6),
        Err(Error::NoEigenvalueFound { .. })
    ));
}

fn disk_evaluator() -> &'static MuEvaluator {
    static CELL: OnceLock<MuEvaluator> = OnceLock::new();
    CELL.get_or_init(|| mu_evaluator(&DomainSpec::disk(1.0).unwrap(), &SolverConfig::default()).unwrap())
}

#[test]
fn mu_values_on_the_disk() {
    let ev = disk_evaluator();
    let e1 = disk_e1().e1_disk;
    assert!(ev.mu(0.0).abs() < 5e-3);
    assert!(ev.mu(e1).abs() < 5e-3);
    assert!(ev.mu(0.7) > 0.0);
    assert!((e1_variational(&DomainSpec::disk(1.0).unwrap(), ev).unwrap() - E1_DISK_PUBLISHED).abs() < 1e-3);
    let grid: Vec<f64> = (0..=10).map(|k| 0.25 * k as f64).collect();
    let c = mu_curve(ev, &grid).unwrap();
    for s in &c.samples[1..] {
        if s.e < e1 - 1e-3 {
            assert!(s.mu > 0.0);
        } else if s.e > e1 + 1e-3 {
            assert!(s.mu < 0.0);
        }
    }
    assert!(c.e1_root.is_some_and(|r| (r - e1).abs() < 1e-3));
    let (m0, m1, m2) = (ev.mu(0.0), ev.mu(0.5), ev.mu(1.0));
    assert!(m2 <= 2.0 * m1 - m0 + 1e-3);
    assert!(matches!(e1_from_mu(ev, (2.0, 3.0)), Err(Error::BadBracket { .. })));
}

#[test]
fn constant_function_quotient() {
    let d = DomainSpec::disk(1.0).unwrap();
    let cfg = SolverConfig::default();
    let disc = Discretization::build(&d, &cfg.discretization()).unwrap();
    let fm = assemble_forms(&d, &disc).unwrap();
    // Least-squares fit of u = 1 (real part only) on the quadrature nodes.
    let n = disc.n();
    let coeffs = fit(&d, &disc, |_| 1.0);
    let mut x = vec![0.0; 2 * n];
    x[..n].copy_from_slice(&coeffs);
    let e = 1.0;
    let q = quad(&fm.q_matrix(e), &x) / quad(&fm.m, &x);
    let expected = e * (d.perimeter() / d.area() - e);
    assert!((q - expected).abs() < 1e-3, "{q} vs {expected}");
}

#[test]
fn holomorphic_trial_function_has_no_stiffness() {
    let d = DomainSpec::disk(1.0).unwrap();
    let cfg = SolverConfig::default();
    let disc = Discretization::build(&d, &cfg.discretization()).unwrap();
    let fm = assemble_forms(&d, &disc).unwrap();
    let n = disc.n();
    let mut x = fit(&d, &disc, |p| p[0]);
    x.extend(fit(&d, &disc, |p| p[1]));
    assert!(quad(&fm.d, &x) < 1e-6 * quad(&fm.m, &x));
    let mut psd = fm.d.clone();
    for i in 0..2 * n {
        for j in 0..2 * n {
            psd[(i, j)] = 0.5 * (fm.d[(i, j)] + fm.d[(j, i)]);
        }
    }
    let ev = psd.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    let top = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(ev[0] >= -1e-10 * top);
    for (m, name) in [(&fm.d, "D"), (&fm.m, "M"), (&fm.bd, "Bd")] {
        let scale = (0..2 * n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
        for i in 0..2 * n {
            for j in 0..i {
                assert!((m[(i, j)] - m[(j, i)]).abs() <= 1e-13 * scale, "{name} not symmetric");
            }
        }
    }
}

fn quad(a: &Mat<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    (0..n).map(|i| x[i] * (0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>()).sum()
}

/// Coefficients of g in the multiquadric basis by truncated-SVD least squares
/// on a polar grid.
fn fit(d: &DomainSpec, disc: &Discretization, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    let nodes = d.polar_quadrature(40, 160);
    let n = disc.n();
    let phi = Mat::<f64>::from_fn(nodes.len(), n, |i, j| {
        dirac_infmass::discretize::multiquadric(disc.eps, disc.centers[j], nodes[i].p).0
    });
    let rhs: Vec<f64> = nodes.iter().map(|q| g(q.p)).collect();
    let svd = phi.thin_svd().unwrap();
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let smax = s[0];
    let mut out = vec![0.0; n];
    for k in 0..n {
        if s[k] < 1e-13 * smax {
            continue;
        }
        let c = (0..nodes.len()).map(|i| u[(i, k)] * rhs[i]).sum::<f64>() / s[k];
        for j in 0..n {
            out[j] += c * v[(j, k)];
        }
    }
    out
}

#[test]
fn descent_reaches_the_eigenvalue_from_above() {
    let d = DomainSpec::disk(1.0).unwrap();
    let p = DiscretizationParams {
        n_centers: 60,
        eps: 3.0,
        interior_h: 0.1,
        ..DiscretizationParams::default()
    };
    let disc = Discretization::build(&d, &p).unwrap();
    let fm = assemble_forms_with(&d, &disc, &FormQuadrature { n_rho: 24, n_theta: 128, n_boundary: 256 }).unwrap();
    let ev = MuEvaluator::new(&fm, 1e-6).unwrap();
    for e in [0.5, 1.0, 1.5] {
        let exact = ev.mu(e);
        let (desc, _) = ev.mu_by_descent(e, 200_000);
        assert!(desc >= exact - 1e-9 * exact.abs().max(1.0));
        assert!(desc - exact < 1e-2 * exact.abs().max(1.0), "E={e}: {desc} vs {exact}");
    }
}

#[test]
fn mu_scaling_law() {
    let cfg = SolverConfig::default();
    let rho = 1.3;
    let big = mu_evaluator(&DomainSpec::disk(rho).unwrap(), &cfg).unwrap();
    let unit = disk_evaluator();
    for e in [0.3, 0.8, 1.1, 1.6] {
        let lhs = big.mu(e);
        let rhs = unit.mu(rho * e) / (rho * rho);
        assert!((lhs - rhs).abs() < 1e-3, "E={e}: {lhs} vs {rhs}");
    }
    let root = e1_variational(&DomainSpec::disk(rho).unwrap(), &big).unwrap();
    assert!((root - disk_e1().e1_disk / rho).abs() < 1e-3);
}

#[test]
fn robin_restriction_dominates_mu() {
    let cfg = SolverConfig::default();
    let d = random_domain(6, 8, 0.2).unwrap();
    let ev = mu_evaluator(&d, &cfg).unwrap();
    for k in 0..=12 {
        let e = 0.25 * k as f64;
        assert!(ev.robin_shifted(e) >= ev.mu(e) - 1e-3);
    }
}

#[test]
fn mu_decreases_as_the_basis_grows() {
    let cfg = SolverConfig::default();
    let d = random_domain(8, 8, 0.2).unwrap();
    let values: Vec<Vec<f64>> = [150, 250, 350]
        .iter()
        .map(|&n| {
            let c = cfg.with_overrides(&[format!("N={n}")]).unwrap();
            let ev = mu_evaluator(&d, &c).unwrap();
            [0.5, 1.0, 1.4, 2.0].iter().map(|&e| ev.mu(e)).collect()
        })
        .collect();
    for k in 0..4 {
        assert!(values[1][k] <= values[0][k] + 1e-4, "{values:?}");
        assert!(values[2][k] <= values[1][k] + 1e-4, "{values:?}");
    }
}

#[test]
fn transplant_bound_dominates_mu() {
    let c = [C64::new(1.0, 0.0), C64::new(0.1, 0.0)];
    let d = make_conformal_domain(&c).unwrap();
    let ev = mu_evaluator(&d, &SolverConfig::default()).unwrap();
    for k in 0..=12 {
        let e = 0.2 * k as f64;
        assert!(ev.mu(e) <= transplant_bound(&d, e).unwrap() + 1e-3);
    }
}

#[test]
fn mass_degenerate_basis_is_reported() {
    let d = DomainSpec::disk(1.0).unwrap();
    let disc = small_disc(&d);
    let fm = assemble_forms_with(&d, &disc, &FormQuadrature { n_rho: 8, n_theta: 32, n_boundary: 64 }).unwrap();
    assert!(matches!(MuEvaluator::new(&fm, 0.5), Err(Error::MassDegenerate { .. })));
}
