//! Verification harness. Runs an equation-keyed check suite and writes a
//! machine-readable report.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed,
//! 2 configuration or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use stquad_core::quadrature::{QuadCoeffTable, QuadKind};
use stquad_core::report::{self, ReportFormat, Suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    version,
    about = "Run verification suites over discretized bosonic mode grids"
)]
struct Args {
    /// Suite: ccr | fock | coherent | quadrature | stq | bch | functional | all
    suite: String,

    /// Number of modes M in the discretized grid
    #[arg(long, default_value_t = 2)]
    modes: usize,

    /// Truncation cutoff N_max (maximum total occupation)
    #[arg(long, default_value_t = 8)]
    cutoff: usize,

    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 100_000)]
    samples: usize,

    /// Seed of the counter-based sample streams
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Regularization parameter for same-kind eigenstate overlaps, in (0, 1]
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Multiplier applied to the deterministic tolerances
    #[arg(long = "tol-scale", default_value_t = 1.0)]
    tol_scale: f64,

    /// Worker threads for check execution and Monte-Carlo accumulation
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Report destination; a timestamped file under ./verification-reports
    /// is created when omitted
    #[arg(long)]
    report: Option<PathBuf>,

    /// Report format
    #[arg(long, default_value = "json")]
    format: String,

    /// Write wall_time_s as 0 so identical runs produce byte-identical files
    #[arg(long, default_value_t = false)]
    canonical: bool,

    /// Also write the quadrature coefficient-function table (n, x, Theta_n,
    /// Phi_n) as CSV to this path
    #[arg(long = "coeff-table")]
    coeff_table: Option<PathBuf>,

    /// Also write a Monte-Carlo convergence trace (sample count vs
    /// deviation of the second-moment estimate) as CSV to this path
    #[arg(long = "trace")]
    trace: Option<PathBuf>,

    /// Suppress the per-check summary lines
    #[arg(long, default_value_t = false)]
    quiet: bool,
}

fn run(args: &Args) -> Result<bool, stquad_core::Error> {
    let suite = Suite::parse(&args.suite)?;
    let format = ReportFormat::parse(&args.format)?;
    let mut cfg = SuiteConfig::new(suite);
    cfg.modes = args.modes;
    cfg.cutoff = args.cutoff;
    cfg.samples = args.samples;
    cfg.seed = args.seed;
    cfg.epsilon = args.epsilon;
    cfg.tol_scale = args.tol_scale;
    cfg.workers = args.workers;
    cfg.canonical_time = args.canonical;
    cfg.validate()?;

    if let Some(path) = &args.coeff_table {
        let xs: Vec<f64> = (0..=160).map(|i| -4.0 + 0.05 * i as f64).collect();
        let theta = QuadCoeffTable::build(QuadKind::Q, 12, xs.clone());
        let phi = QuadCoeffTable::build(QuadKind::P, 12, xs);
        let mut csv = String::from("n,x,theta,phi_re,phi_im\n");
        for n in 0..=12usize {
            for (j, &x) in theta.xs.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{:.6},{:e},{:e},{:e}\n",
                    n, x, theta.values[n][j].re, phi.values[n][j].re, phi.values[n][j].im
                ));
            }
        }
        std::fs::write(path, csv)?;
    }

    if let Some(path) = &args.trace {
        let grid = stquad_core::grid::ModeGrid::unit(cfg.modes.max(1));
        let spec = stquad_core::functional::MomentSpec::new(vec![(0, false), (0, true)]);
        let mut csv = String::from("sample_count,abs_err,stderr\n");
        let mut s = 1000usize;
        while s <= cfg.samples.max(1000) {
            let ens = stquad_core::functional::EnsembleConfig::new(
                &grid,
                s,
                cfg.seed,
                stquad_core::functional::EnsembleKind::GaussianSpectrum,
            );
            let (mc, se) = stquad_core::functional::mc_wick_moment(&ens, &spec, cfg.workers);
            csv.push_str(&format!(
                "{},{:e},{:e}\n",
                s,
                (mc - stquad_core::c64(1.0, 0.0)).norm(),
                se
            ));
            s *= 10;
        }
        std::fs::write(path, csv)?;
    }

    let report = report::run_suite(&cfg)?;
    if !args.quiet {
        for c in &report.checks {
            eprintln!(
                "{} {:<40} [{}] err={:.3e} tol={:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.paper_ref,
                c.abs_err,
                c.tol
            );
        }
    }
    let dir = PathBuf::from("verification-reports");
    let path = report::emit_report(&report, format, args.report.as_deref(), &dir)?;
    if !args.quiet {
        eprintln!(
            "{}: {}/{} checks passed, report written to {}",
            report.suite,
            report.checks.iter().filter(|c| c.passed).count(),
            report.checks.len(),
            path.display()
        );
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
