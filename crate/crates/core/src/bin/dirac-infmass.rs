use clap::{Args, Parser, Subcommand};
use dirac_infmass::bounds::{check_e1_against_bounds, evaluate_bounds, SOLVER_TOL};
use dirac_infmass::config::SolverConfig;
use dirac_infmass::dirac::DiracProblem;
use dirac_infmass::discretize::{Discretization, DiscretizationParams};
use dirac_infmass::geometry::DomainSpec;
use dirac_infmass::harness::{
    figure4_curves, figure5_fields, random_domain, run_sweep, solve_domain, write_field_report, write_figure4_csv,
};
use dirac_infmass::specfun::E1_DISK_PUBLISHED;
use dirac_infmass::varform::{mu_curve, write_mu_csv};
use dirac_infmass::{fmt_f64, Error, ErrorClass};
use serde_json::json;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Principal eigenvalue of the Dirac operator with infinite-mass boundary
/// conditions. Precedence: defaults < --config file < --set overrides.
#[derive(Parser)]
#[command(name = "dirac-infmass", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override a config key, e.g. --set N=300 --set sweep.count=20.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Unit-disk error table over eps in {5,10,15} and N in {242,323,402}.
    DiskRef,
    /// Solve one domain with both solvers and evaluate the bounds.
    Solve { domain: PathBuf },
    /// mu(E) at one E or on a grid.
    Mu {
        domain: PathBuf,
        #[arg(long, conflicts_with = "grid")]
        e: Option<f64>,
        /// lo,hi,count
        #[arg(long, value_delimiter = ',', num_args = 3)]
        grid: Option<Vec<f64>>,
    },
    /// Closed-form bounds of a domain.
    Bounds { domain: PathBuf },
    /// Seeded random-domain sweep (resumes an existing sweep.csv).
    Sweep,
    /// Principal eigenfunction on a clipped grid.
    Fields {
        domain: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        spacing: f64,
    },
    /// mu-curves of area-pi domains against the disk. Without domain files the
    /// first three sweep seeds are used.
    Figure4 {
        domains: Vec<PathBuf>,
        /// lo,hi,count
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 3.0, 20.0])]
        grid: Vec<f64>,
    },
}

enum Failure {
    Err(Error),
    Threshold(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Err(e.into())
    }
}

type Run = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Threshold(msg)) => {
            eprintln!("threshold failure: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Domain => 2,
                ErrorClass::Solver => 3,
            })
        }
    }
}

fn run(cli: Cli) -> Run {
    let c = &cli.common;
    if let Some(j) = c.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let base = match &c.config {
        Some(p) => SolverConfig::load(p)?,
        None => SolverConfig::default(),
    };
    let cfg = base.with_overrides(&c.overrides)?;
    cfg.write_resolved(&c.out)?;
    let out = c.out.as_path();
    match &cli.cmd {
        Cmd::DiskRef => disk_ref(&cfg, out),
        Cmd::Solve { domain } => solve(&cfg, out, domain),
        Cmd::Mu { domain, e, grid } => mu(&cfg, out, domain, *e, grid.as_deref()),
        Cmd::Bounds { domain } => bounds(out, domain),
        Cmd::Sweep => sweep(&cfg, out),
        Cmd::Fields { domain, spacing } => fields(&cfg, out, domain, *spacing),
        Cmd::Figure4 { domains, grid } => figure4(&cfg, out, domains, grid),
    }
}

fn load_domain(p: &Path) -> Result<DomainSpec, Error> {
    DomainSpec::from_json(&std::fs::read_to_string(p)?)
}

fn write_json(path: &Path, v: &serde_json::Value) -> Run {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn linspace(g: &[f64]) -> Result<Vec<f64>, Error> {
    let n = g[2] as usize;
    if n < 2 || g[2].fract() != 0.0 || !(g[0] < g[1]) {
        return Err(Error::Precondition("grid needs lo < hi and an integer count >= 2".into()));
    }
    Ok((0..n).map(|i| g[0] + (g[1] - g[0]) * i as f64 / (n - 1) as f64).collect())
}

/// Published absolute errors of the multiquadric disk solve, by (eps, N).
const DISK_TABLE: [(f64, [f64; 3]); 3] = [
    (5.0, [4.45e-7, 8.55e-8, 1.33e-8]),
    (10.0, [1.30e-5, 2.78e-6, 4.93e-8]),
    (15.0, [4.92e-5, 9.21e-6, 1.16e-6]),
];
const DISK_NS: [usize; 3] = [242, 323, 402];

fn disk_ref(cfg: &SolverConfig, out: &Path) -> Run {
    let disk = DomainSpec::disk(1.0)?;
    let mut w = csv::Writer::from_path(out.join("disk_ref.csv")).map_err(Error::from)?;
    w.write_record(["eps", "N", "e1", "abs_error", "threshold", "ok"]).map_err(Error::from)?;
    let mut failed = Vec::new();
    println!("{:>6} {:>12} {:>12} {:>12}", "eps", "N=242", "N=323", "N=402");
    for (eps, published) in DISK_TABLE {
        let mut line = format!("{eps:>6}");
        for (&n, &p) in DISK_NS.iter().zip(&published) {
            let params = DiscretizationParams {
                n_centers: n,
                eps,
                ..cfg.discretization()
            };
            let problem = DiracProblem::new(disk.clone(), Discretization::build(&disk, &params)?)?;
            // The eigenvalue is known to be in the window, so the deepest
            // minimum is refined even when it misses accept_tol.
            let found = problem.find_eigenvalues(&cfg.scan_window(disk.area(), disk.perimeter()), f64::INFINITY);
            let e1 = found.ok().and_then(|v| v.into_iter().find(|r| r.e > 0.0)).map_or(f64::NAN, |r| r.e);
            let err = (e1 - E1_DISK_PUBLISHED).abs();
            let ok = err <= 10.0 * p;
            if !ok {
                failed.push(format!("eps={eps} N={n}: {err:.3e} > {:.3e}", 10.0 * p));
            }
            line += &format!(" {err:>12.3e}");
            w.write_record([
                fmt_f64(eps),
                n.to_string(),
                fmt_f64(e1),
                fmt_f64(err),
                fmt_f64(10.0 * p),
                ok.to_string(),
            ])
            .map_err(Error::from)?;
        }
        println!("{line}");
    }
    w.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Threshold(failed.join("; ")))
    }
}

fn solve(cfg: &SolverConfig, out: &Path, domain: &Path) -> Run {
    let d = load_domain(domain)?;
    let sol = solve_domain(&d, cfg, 0, 0)?;
    let flags = check_e1_against_bounds(&sol.record.bounds, sol.record.e1_dirac, SOLVER_TOL);
    let v = json!({
        "record": sol.record,
        "flags": flags,
        "eigenvalues": sol.eigen.iter().map(|r| json!({"e": r.e, "sigma_min": r.sigma_min, "bc_residual": r.bc_residual})).collect::<Vec<_>>(),
    });
    write_json(&out.join("solve.json"), &v)?;
    println!("e1_dirac={} e1_var={}", fmt_f64(sol.record.e1_dirac), fmt_f64(sol.record.e1_var));
    if !flags.proven_ok() {
        return Err(Failure::Threshold(format!("proven bounds violated: {flags:?}")));
    }
    Ok(())
}

fn mu(cfg: &SolverConfig, out: &Path, domain: &Path, e: Option<f64>, grid: Option<&[f64]>) -> Run {
    let d = load_domain(domain)?;
    let es = match (e, grid) {
        (Some(e), _) => vec![e],
        (None, Some(g)) => linspace(g)?,
        (None, None) => return Err(Error::Precondition("mu needs --e or --grid".into()).into()),
    };
    let ev = dirac_infmass::harness::mu_evaluator(&d, cfg)?;
    let curve = mu_curve(&ev, &es)?;
    write_mu_csv(BufWriter::new(File::create(out.join("mu.csv"))?), &curve)?;
    write_mu_csv(std::io::stdout().lock(), &curve)?;
    Ok(())
}

fn bounds(out: &Path, domain: &Path) -> Run {
    let d = load_domain(domain)?;
    let b = evaluate_bounds(&d);
    let v = json!({
        "area": d.area(),
        "perimeter": d.perimeter(),
        "inradius": d.inradius().0,
        "bounds": b,
    });
    write_json(&out.join("bounds.json"), &v)?;
    println!("{}", serde_json::to_string_pretty(&v).map_err(Error::from)?);
    Ok(())
}

fn sweep(cfg: &SolverConfig, out: &Path) -> Run {
    let o = run_sweep(cfg, &out.join("sweep.csv"))?;
    let s = &o.summary;
    write_json(&out.join("sweep_summary.json"), &json!({"summary": s, "failures": o.failures}))?;
    println!("{}", serde_json::to_string_pretty(s).map_err(Error::from)?);
    let mut bad = Vec::new();
    if s.proven_bound_failures > 0 {
        bad.push(format!("{} records violate the proven bounds", s.proven_bound_failures));
    }
    if s.records > 0 && !s.min_e1_at_min_perimeter {
        bad.push("minimum E1 is not at the minimum perimeter".to_string());
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Threshold(bad.join("; ")))
    }
}

fn fields(cfg: &SolverConfig, out: &Path, domain: &Path, spacing: f64) -> Run {
    let d = load_domain(domain)?;
    let r = figure5_fields(&d, spacing, cfg)?;
    write_field_report(BufWriter::new(File::create(out.join("fields.csv"))?), &r)?;
    println!(
        "e1={} max_abs_u1_at=({}, {}) distance_to_incenter={} arg_u1_range={}",
        fmt_f64(r.e1),
        fmt_f64(r.max_abs_u1_at[0]),
        fmt_f64(r.max_abs_u1_at[1]),
        fmt_f64(r.distance_to_incenter),
        fmt_f64(r.arg_u1_range)
    );
    Ok(())
}

fn figure4(cfg: &SolverConfig, out: &Path, files: &[PathBuf], grid: &[f64]) -> Run {
    let domains = if files.is_empty() {
        let s = &cfg.sweep;
        (0..3)
            .map(|i| random_domain(s.seed0 + i, s.modes, s.amplitude))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        files.iter().map(|p| load_domain(p)).collect::<Result<Vec<_>, _>>()?
    };
    let f = figure4_curves(&domains, &linspace(grid)?, cfg)?;
    write_figure4_csv(BufWriter::new(File::create(out.join("figure4.csv"))?), &f)?;
    let violations: usize = f.checks.iter().map(|c| c.iter().filter(|k| !k.ok).count()).sum();
    println!("conjecture violations: {violations}");
    Ok(())
}
