use dirac_infmass::bounds::BoundsReport;
use dirac_infmass::config::SolverConfig;
use dirac_infmass::harness::{clipped_grid, random_domain, read_sweep_csv, run_sweep, summarize, SpectralRecord};
use dirac_infmass::Error;
use std::fs;

fn small_config() -> SolverConfig {
    SolverConfig::default()
        .with_overrides(&["sweep.count=2".into(), "sweep.amplitude=0.05".into(), "sweep.modes=3".into()])
        .unwrap()
}

fn rows_without_time(path: &std::path::Path) -> Vec<SpectralRecord> {
    read_sweep_csv(path)
        .unwrap()
        .into_iter()
        .map(|mut r| {
            r.wall_time_ms = 0;
            r
        })
        .collect()
}

#[test]
fn sweep_resume_extend_and_recover() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let cfg = small_config();

    let first = run_sweep(&cfg, &out).unwrap();
    assert_eq!(first.records.len() + first.failures.len(), 2);
    let n_ok = first.records.len();
    assert!(n_ok >= 1, "{:?}", first.failures);
    let text = fs::read_to_string(&out).unwrap();

    // Nothing left to do: the file is untouched.
    let again = run_sweep(&cfg, &out).unwrap();
    assert_eq!(fs::read_to_string(&out).unwrap(), text);
    assert_eq!(again.records.len(), n_ok);

    // A larger count extends the same file.
    let more = cfg.with_overrides(&["sweep.count=3".into()]).unwrap();
    let ext = run_sweep(&more, &out).unwrap();
    let ids: Vec<u64> = ext.records.iter().map(|r| r.domain_id).collect();
    let mut uniq = ids.clone();
    uniq.dedup();
    assert_eq!(ids, uniq);
    let full = fs::read_to_string(&out).unwrap();
    assert!(full.starts_with(&text));
    let before = rows_without_time(&out);

    // Cut the last row in half, as an interrupted write would, and resume.
    let cut = full.trim_end().rfind('\n').unwrap() + 1;
    let partial = &full[..cut + (full.len() - cut) / 2];
    fs::write(&out, partial).unwrap();
    run_sweep(&more, &out).unwrap();
    assert_eq!(rows_without_time(&out), before);

    // A different solver config refuses to touch the file.
    let other = more.with_overrides(&["eps=6".into()]).unwrap();
    assert!(matches!(run_sweep(&other, &out), Err(Error::Config(_))));
}

#[test]
fn sweep_records_are_reproducible() {
    let cfg = small_config().with_overrides(&["sweep.count=1".into()]).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_sweep(&cfg, &a.path().join("s.csv")).unwrap();
    run_sweep(&cfg, &b.path().join("s.csv")).unwrap();
    let (ra, rb) = (rows_without_time(&a.path().join("s.csv")), rows_without_time(&b.path().join("s.csv")));
    assert_eq!(ra, rb);
    for r in &ra {
        assert!(r.solvers_agree() && r.proven_bounds_ok(), "{r:?}");
        assert!(r.bc_residual < 1e-3);
    }
}

#[test]
fn sweep_preconditions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config().with_overrides(&["sweep.count=0".into()]).unwrap();
    assert!(matches!(run_sweep(&cfg, &dir.path().join("s.csv")), Err(Error::Precondition(_))));
    let orphan = dir.path().join("orphan.csv");
    fs::write(&orphan, "x\n").unwrap();
    assert!(matches!(run_sweep(&small_config(), &orphan), Err(Error::Config(_))));
}

fn record(id: u64, perimeter: f64, e1: f64) -> SpectralRecord {
    SpectralRecord {
        domain_id: id,
        seed: id + 1,
        area: std::f64::consts::PI,
        perimeter,
        inradius: 0.9,
        e1_dirac: e1,
        e1_var: e1,
        sigma_min: 1e-7,
        bc_residual: 1e-5,
        bounds: BoundsReport {
            lower_area: 1.41,
            upper_simple: perimeter / std::f64::consts::PI,
            upper_inradius: 1.6,
            upper_ecrit: 1.7,
            fk_reference: 1.4347,
        },
        fk_ok: e1 >= 1.4347 - 5e-3,
        wall_time_ms: 1,
    }
}

#[test]
fn summary_flags() {
    let recs = vec![record(0, 6.30, 1.44), record(1, 6.40, 1.46), record(2, 6.35, 1.45)];
    let s = summarize(&recs, 1);
    assert_eq!((s.records, s.failures), (3, 1));
    assert!(s.min_e1_at_min_perimeter);
    assert_eq!((s.fk_violations, s.proven_bound_failures, s.solver_disagreements), (0, 0, 0));

    let recs = vec![record(0, 6.30, 1.45), record(1, 6.60, 1.42)];
    let s = summarize(&recs, 0);
    assert!(!s.min_e1_at_min_perimeter);
    assert_eq!(s.fk_violations, 1);
    let mut bad = record(2, 6.3, 1.45);
    bad.e1_var = 1.5;
    assert_eq!(summarize(&[bad], 0).solver_disagreements, 1);
}

#[test]
fn clipped_grid_stays_inside() {
    let d = random_domain(11, 8, 0.3).unwrap();
    let g = clipped_grid(&d, 0.05);
    assert!(g.len() > 500);
    assert!(g.iter().all(|&p| d.contains(p)));
}
