//! Seeded random domains, per-domain solves, sweeps with resume, and the
//! mu-curve and eigenfunction exports.

use crate::bounds::{check_e1_against_bounds, conjecture_mu_check, evaluate_bounds, BoundsReport, ConjectureCheck, SOLVER_TOL};
use crate::config::SolverConfig;
use crate::dirac::{reconstruct_field, write_field_csv, DiracEigenResult, DiracProblem, FieldSample};
use crate::discretize::Discretization;
use crate::error::{Error, Result};
use crate::geometry::{dist2, make_radial_domain, scale_to_area, DomainSpec, Point};
use crate::varform::{assemble_forms_with, e1_from_mu, mu_curve, MuCurve, MuEvaluator};
use crate::fmt_f64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SWEEP_HEADER: [&str; 16] = [
    "domain_id",
    "seed",
    "area",
    "perimeter",
    "inradius",
    "e1_dirac",
    "e1_var",
    "sigma_min",
    "bc_residual",
    "lb_area",
    "ub_simple",
    "ub_inradius",
    "ub_ecrit",
    "fk_ref",
    "fk_ok",
    "wall_time_ms",
];

/// r(theta) = 1 + sum_{k=2}^{modes+1} (a_k cos k theta + b_k sin k theta) with
/// a_k, b_k uniform in +-amplitude/k^2, rescaled to area pi.
pub fn random_domain(seed: u64, modes: usize, amplitude: f64) -> Result<DomainSpec> {
    if modes > 8 || !(0.0..=0.3).contains(&amplitude) {
        return Err(Error::Precondition(format!(
            "random domains need modes <= 8 and 0 <= amplitude <= 0.3, got {modes}, {amplitude}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let mut coeffs = vec![[0.0, 0.0]];
        for k in 2..=modes + 1 {
            let a = amplitude / (k * k) as f64;
            if a > 0.0 {
                coeffs.push([rng.random_range(-a..=a), rng.random_range(-a..=a)]);
            } else {
                coeffs.push([0.0, 0.0]);
            }
        }
        while coeffs.last() == Some(&[0.0, 0.0]) {
            coeffs.pop();
        }
        if let Ok(d) = make_radial_domain(&coeffs, 1.0) {
            return scale_to_area(&d, PI);
        }
    }
    Err(Error::GenerationFailure { seed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRecord {
    pub domain_id: u64,
    pub seed: u64,
    pub area: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub e1_dirac: f64,
    pub e1_var: f64,
    pub sigma_min: f64,
    pub bc_residual: f64,
    pub bounds: BoundsReport,
    pub fk_ok: bool,
    pub wall_time_ms: u64,
}

impl SpectralRecord {
    pub fn solvers_agree(&self) -> bool {
        (self.e1_dirac - self.e1_var).abs() < SOLVER_TOL
    }

    /// Proven bounds checked on the direct-solver value.
    pub fn proven_bounds_ok(&self) -> bool {
        check_e1_against_bounds(&self.bounds, self.e1_dirac, SOLVER_TOL).proven_ok()
    }

    fn csv_row(&self) -> Vec<String> {
        let b = &self.bounds;
        let mut row = vec![self.domain_id.to_string(), self.seed.to_string()];
        row.extend(
            [
                self.area,
                self.perimeter,
                self.inradius,
                self.e1_dirac,
                self.e1_var,
                self.sigma_min,
                self.bc_residual,
                b.lower_area,
                b.upper_simple,
                b.upper_inradius,
                b.upper_ecrit,
                b.fk_reference,
            ]
            .map(fmt_f64),
        );
        row.push(self.fk_ok.to_string());
        row.push(self.wall_time_ms.to_string());
        row
    }

    fn from_csv_row(r: &csv::StringRecord) -> Result<Self> {
        let bad = || Error::Config(format!("malformed sweep row: {r:?}"));
        let f = |i: usize| r.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(bad);
        let u = |i: usize| r.get(i).and_then(|s| s.parse::<u64>().ok()).ok_or_else(bad);
        Ok(SpectralRecord {
            domain_id: u(0)?,
            seed: u(1)?,
            area: f(2)?,
            perimeter: f(3)?,
            inradius: f(4)?,
            e1_dirac: f(5)?,
            e1_var: f(6)?,
            sigma_min: f(7)?,
            bc_residual: f(8)?,
            bounds: BoundsReport {
                lower_area: f(9)?,
                upper_simple: f(10)?,
                upper_inradius: f(11)?,
                upper_ecrit: f(12)?,
                fk_reference: f(13)?,
            },
            fk_ok: r.get(14).and_then(|s| s.parse::<bool>().ok()).ok_or_else(bad)?,
            wall_time_ms: u(15)?,
        })
    }
}

/// Everything computed for one domain.
pub struct DomainSolution {
    pub problem: DiracProblem,
    pub eigen: Vec<DiracEigenResult>,
    pub mu: MuEvaluator,
    pub e1_var: f64,
    pub record: SpectralRecord,
}

pub fn discretize(d: &DomainSpec, cfg: &SolverConfig) -> Result<Discretization> {
    Discretization::build(d, &cfg.discretization())
}

/// Variational evaluator for a domain with the configured basis.
pub fn mu_evaluator(d: &DomainSpec, cfg: &SolverConfig) -> Result<MuEvaluator> {
    let disc = discretize(d, cfg)?;
    let fm = assemble_forms_with(d, &disc, &cfg.form_quad)?;
    MuEvaluator::new(&fm, cfg.trunc_tol)
}

/// Root of mu bracketed by the proven bounds: mu > 0 below sqrt(2 pi/area) and
/// mu < 0 above perimeter/area.
pub fn e1_variational(d: &DomainSpec, ev: &MuEvaluator) -> Result<f64> {
    let b = evaluate_bounds(d);
    e1_from_mu(ev, (0.9 * b.lower_area, 1.05 * b.upper_simple))
}

pub fn solve_domain(d: &DomainSpec, cfg: &SolverConfig, domain_id: u64, seed: u64) -> Result<DomainSolution> {
    let start = Instant::now();
    let disc = discretize(d, cfg)?;
    let fm = assemble_forms_with(d, &disc, &cfg.form_quad)?;
    let mu = MuEvaluator::new(&fm, cfg.trunc_tol)?;
    let e1_var = e1_variational(d, &mu)?;
    let problem = DiracProblem::new(d.clone(), disc)?;
    let window = cfg.scan_window(d.area(), d.perimeter());
    let eigen = problem.find_eigenvalues(&window, cfg.accept_tol)?;
    let first = eigen
        .iter()
        .find(|r| r.e > 0.0)
        .ok_or(Error::NoEigenvalueFound { best_sigma: f64::NAN })?;
    let bounds = evaluate_bounds(d);
    let flags = check_e1_against_bounds(&bounds, first.e, SOLVER_TOL);
    let record = SpectralRecord {
        domain_id,
        seed,
        area: d.area(),
        perimeter: d.perimeter(),
        inradius: d.inradius().0,
        e1_dirac: first.e,
        e1_var,
        sigma_min: first.sigma_min,
        bc_residual: first.bc_residual,
        bounds,
        fk_ok: flags.fk_ok,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    Ok(DomainSolution {
        problem,
        eigen,
        mu,
        e1_var,
        record,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub records: usize,
    pub failures: usize,
    pub min_perimeter: f64,
    pub min_e1: f64,
    pub perimeter_at_min_e1: f64,
    /// The minimum-E1 domain has perimeter within 1% of the smallest perimeter.
    pub min_e1_at_min_perimeter: bool,
    /// Records with E1 below sqrt(pi/area) E1(D) - tol.
    pub fk_violations: usize,
    pub proven_bound_failures: usize,
    pub solver_disagreements: usize,
}

pub struct SweepOutcome {
    pub records: Vec<SpectralRecord>,
    pub failures: Vec<(u64, String)>,
    pub summary: SweepSummary,
}

fn meta_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".meta.json");
    PathBuf::from(p)
}

#[derive(Serialize, Deserialize)]
struct SweepMeta {
    config_hash: String,
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SpectralRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(Error::Config(format!("{} is not a sweep file", path.display())));
    }
    rd.records().map(|r| SpectralRecord::from_csv_row(&r?)).collect()
}

/// Parse a sweep file for resuming. A last row cut short by an interrupted
/// write (unparsable, or missing its line terminator) is removed from the file.
fn load_for_resume(out: &Path) -> Result<Vec<SpectralRecord>> {
    let bytes = std::fs::read(out)?;
    let mut rd = csv::ReaderBuilder::new().flexible(true).from_reader(bytes.as_slice());
    let header = rd.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(Error::Config(format!("{} is not a sweep file", out.display())));
    }
    let mut records = Vec::new();
    let mut row = csv::StringRecord::new();
    loop {
        let start = rd.position().byte();
        let more = rd.read_record(&mut row)?;
        if !more {
            break;
        }
        let end = rd.position().byte() as usize;
        let complete = bytes[..end].ends_with(b"\n");
        match SpectralRecord::from_csv_row(&row) {
            Ok(r) if complete => records.push(r),
            Err(e) if end != bytes.len() => return Err(e),
            _ => {
                eprintln!("{}: dropping incomplete last row", out.display());
                std::fs::OpenOptions::new().write(true).open(out)?.set_len(start)?;
                break;
            }
        }
    }
    Ok(records)
}

/// Solve `count` random domains with seeds seed0.. and append them to `out`.
/// Domain ids already present in `out` are skipped, so an interrupted sweep
/// restarts where it stopped; the file must come from the same config.
pub fn run_sweep(cfg: &SolverConfig, out: &Path) -> Result<SweepOutcome> {
    let s = &cfg.sweep;
    if s.count < 1 {
        return Err(Error::Precondition("sweep count must be at least 1".into()));
    }
    let hash = cfg.hash();
    let meta = meta_path(out);
    let mut existing = Vec::new();
    if out.exists() {
        let m: SweepMeta = serde_json::from_str(&std::fs::read_to_string(&meta).map_err(|_| {
            Error::Config(format!("{} exists without {}", out.display(), meta.display()))
        })?)?;
        if m.config_hash != hash {
            return Err(Error::Config(format!(
                "{} was produced by a different config ({} vs {})",
                out.display(),
                m.config_hash,
                hash
            )));
        }
        existing = load_for_resume(out)?;
    } else {
        if let Some(dir) = out.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = csv::Writer::from_path(out)?;
        w.write_record(SWEEP_HEADER)?;
        w.flush()?;
        std::fs::write(&meta, serde_json::to_string(&SweepMeta { config_hash: hash })? + "\n")?;
    }
    let done: BTreeSet<u64> = existing.iter().map(|r| r.domain_id).collect();
    let todo: Vec<u64> = (0..s.count as u64).filter(|id| !done.contains(id)).collect();

    let mut records = existing;
    let mut failures = Vec::new();
    let chunk = 2 * rayon::current_num_threads().max(1);
    for ids in todo.chunks(chunk) {
        let results: Vec<(u64, Result<SpectralRecord>)> = ids
            .par_iter()
            .map(|&id| {
                let seed = s.seed0 + id;
                let r = random_domain(seed, s.modes, s.amplitude)
                    .and_then(|d| solve_domain(&d, cfg, id, seed))
                    .map(|sol| sol.record);
                (id, r)
            })
            .collect();
        let file = std::fs::OpenOptions::new().append(true).open(out)?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        for (id, r) in results {
            match r {
                Ok(rec) => {
                    w.write_record(rec.csv_row())?;
                    records.push(rec);
                }
                Err(e) => {
                    eprintln!("domain {id}: {e}");
                    failures.push((id, e.to_string()));
                }
            }
        }
        w.flush()?;
    }
    records.sort_by_key(|r| r.domain_id);
    let summary = summarize(&records, failures.len());
    Ok(SweepOutcome {
        records,
        failures,
        summary,
    })
}

pub fn summarize(records: &[SpectralRecord], failures: usize) -> SweepSummary {
    let min_perimeter = records.iter().map(|r| r.perimeter).fold(f64::INFINITY, f64::min);
    let best = records.iter().min_by(|a, b| a.e1_dirac.total_cmp(&b.e1_dirac));
    let (min_e1, perimeter_at_min_e1) = best.map(|r| (r.e1_dirac, r.perimeter)).unwrap_or((f64::NAN, f64::NAN));
    SweepSummary {
        records: records.len(),
        failures,
        min_perimeter,
        min_e1,
        perimeter_at_min_e1,
        min_e1_at_min_perimeter: perimeter_at_min_e1 <= 1.01 * min_perimeter,
        fk_violations: records
            .iter()
            .filter(|r| r.e1_dirac < r.bounds.fk_reference - SOLVER_TOL)
            .count(),
        proven_bound_failures: records.iter().filter(|r| !r.proven_bounds_ok()).count(),
        solver_disagreements: records.iter().filter(|r| !r.solvers_agree()).count(),
    }
}

pub struct Figure4 {
    pub grid: Vec<f64>,
    pub disk: MuCurve,
    pub domains: Vec<MuCurve>,
    pub checks: Vec<Vec<ConjectureCheck>>,
}

/// mu-curves of the given area-pi domains next to the unit-disk curve.
pub fn figure4_curves(domains: &[DomainSpec], grid: &[f64], cfg: &SolverConfig) -> Result<Figure4> {
    for d in domains {
        if ((d.area() - PI) / PI).abs() > 1e-9 {
            return Err(Error::Precondition("figure-4 domains must have area pi".into()));
        }
    }
    let disk_ev = mu_evaluator(&DomainSpec::disk(1.0)?, cfg)?;
    let disk = mu_curve(&disk_ev, grid)?;
    let mut curves = Vec::new();
    let mut checks = Vec::new();
    for d in domains {
        let ev = mu_evaluator(d, cfg)?;
        let c = mu_curve(&ev, grid)?;
        checks.push(conjecture_mu_check(&c, d.area(), |e| Ok(disk_ev.mu(e)), SOLVER_TOL)?);
        curves.push(c);
    }
    Ok(Figure4 {
        grid: grid.to_vec(),
        disk,
        domains: curves,
        checks,
    })
}

pub fn write_figure4_csv<W: Write>(w: W, f: &Figure4) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["E".to_string(), "mu_disk".to_string()];
    for i in 0..f.domains.len() {
        header.push(format!("mu_{}", i + 1));
        header.push(format!("ok_{}", i + 1));
    }
    out.write_record(&header)?;
    for (k, &e) in f.grid.iter().enumerate() {
        let mut row = vec![fmt_f64(e), fmt_f64(f.disk.samples[k].mu)];
        for (c, chk) in f.domains.iter().zip(&f.checks) {
            row.push(fmt_f64(c.samples[k].mu));
            row.push(chk[k].ok.to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub struct FieldReport {
    pub e1: f64,
    pub samples: Vec<FieldSample>,
    pub max_abs_u1_at: Point,
    pub distance_to_incenter: f64,
    /// Spread of arg u1 over the grid; a diagnostic only.
    pub arg_u1_range: f64,
}

/// Grid points with spacing h aligned with the origin, clipped to the domain.
pub fn clipped_grid(d: &DomainSpec, h: f64) -> Vec<Point> {
    let (lo, hi) = d.bounding_box();
    let mut pts = Vec::new();
    for j in (lo[1] / h).floor() as i64..=(hi[1] / h).ceil() as i64 {
        for i in (lo[0] / h).floor() as i64..=(hi[0] / h).ceil() as i64 {
            let p = [i as f64 * h, j as f64 * h];
            if d.contains(p) {
                pts.push(p);
            }
        }
    }
    pts
}

/// Principal eigenfunction of a solved domain sampled on a clipped grid.
pub fn figure5_fields(d: &DomainSpec, spacing: f64, cfg: &SolverConfig) -> Result<FieldReport> {
    if !(spacing > 0.0) {
        return Err(Error::Precondition("grid spacing must be positive".into()));
    }
    let disc = discretize(d, cfg)?;
    let problem = DiracProblem::new(d.clone(), disc)?;
    let eigen = problem.find_eigenvalues(&cfg.scan_window(d.area(), d.perimeter()), cfg.accept_tol)?;
    let first = eigen
        .iter()
        .find(|r| r.e > 0.0)
        .ok_or(Error::NoEigenvalueFound { best_sigma: f64::NAN })?;
    Ok(field_report(d, &problem.disc, first, spacing))
}

pub fn field_report(d: &DomainSpec, disc: &Discretization, res: &DiracEigenResult, spacing: f64) -> FieldReport {
    let grid = clipped_grid(d, spacing);
    let samples = reconstruct_field(res, disc, &grid);
    let peak = samples
        .iter()
        .max_by(|a, b| a.abs_u1.total_cmp(&b.abs_u1))
        .map(|s| [s.x, s.y])
        .unwrap_or(d.inradius().1);
    let (amin, amax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.arg_u1), hi.max(s.arg_u1)));
    FieldReport {
        e1: res.e,
        distance_to_incenter: dist2(peak, d.inradius().1).sqrt(),
        max_abs_u1_at: peak,
        arg_u1_range: amax - amin,
        samples,
    }
}

pub fn write_field_report<W: Write>(mut w: W, r: &FieldReport) -> Result<()> {
    writeln!(w, "# e1={}", fmt_f64(r.e1))?;
    writeln!(
        w,
        "# max_abs_u1_at={},{}",
        fmt_f64(r.max_abs_u1_at[0]),
        fmt_f64(r.max_abs_u1_at[1])
    )?;
    writeln!(w, "# distance_to_incenter={}", fmt_f64(r.distance_to_incenter))?;
    writeln!(w, "# arg_u1_range={}", fmt_f64(r.arg_u1_range))?;
    write_field_csv(w, &r.samples)
}
