//! Equation-keyed verification suites and machine-readable reports.
//!
//! Every check is registered with a stable name and the label of the
//! identity it exercises, so the test surface is auditable. A check records
//! a computed value, the expected value, the absolute error, the effective
//! tolerance and (for Monte-Carlo checks) the standard error; `passed` is
//! `abs_err <= tol`, where statistical checks set `tol` to the recorded
//! sigma multiple times the measured standard error.
//!
//! Reports serialize to a stable JSON schema
//! (see the repository README) or to CSV with one row per check. Rerunning
//! a suite with the same configuration and seed reproduces the same check
//! values bit-for-bit for any worker count; `canonical_time` additionally
//! zeroes the wall-clock field so whole report files can be compared
//! byte-for-byte.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coherent::{self, CoherentSpec, Construction};
use crate::error::{Error, Result};
use crate::fock::{self, dot, norm, FockSpace};
use crate::functional::{self, EnsembleConfig, EnsembleKind, MomentSpec};
use crate::grid::{ModeGrid, RealSpectralVector, SpectralVector};
use crate::quadrature::{self, QuadKind};
use crate::sparse::SparseOperator;
use crate::stq::{self, Normalization, Regularization, StqKind, StqSpec};
use crate::{bch, c64, par, C64};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ccr,
    Fock,
    Coherent,
    Quadrature,
    Stq,
    Bch,
    Functional,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Ccr => "ccr",
            Suite::Fock => "fock",
            Suite::Coherent => "coherent",
            Suite::Quadrature => "quadrature",
            Suite::Stq => "stq",
            Suite::Bch => "bch",
            Suite::Functional => "functional",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ccr" => Suite::Ccr,
            "fock" => Suite::Fock,
            "coherent" => Suite::Coherent,
            "quadrature" => Suite::Quadrature,
            "stq" => Suite::Stq,
            "bch" => Suite::Bch,
            "functional" => Suite::Functional,
            "all" => Suite::All,
            other => {
                return Err(Error::InvalidConfig(format!("unknown suite '{other}'")));
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub modes: usize,
    pub cutoff: usize,
    pub samples: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub tol_scale: f64,
    pub workers: usize,
    /// Zero the wall-clock field for byte-stable report files.
    pub canonical_time: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            modes: 2,
            cutoff: 8,
            samples: 100_000,
            seed: 42,
            epsilon: 0.1,
            tol_scale: 1.0,
            workers: 1,
            canonical_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes < 1 {
            return Err(Error::InvalidConfig("modes must be >= 1".into()));
        }
        if self.cutoff < 2 {
            return Err(Error::InvalidConfig("cutoff must be >= 2".into()));
        }
        if self.samples < 1 {
            return Err(Error::InvalidConfig("samples must be >= 1".into()));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 || self.epsilon > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon = {} outside (0, 1]",
                self.epsilon
            )));
        }
        if !self.tol_scale.is_finite() || self.tol_scale <= 0.0 {
            return Err(Error::InvalidConfig("tol-scale must be positive".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Scalar or complex payload of a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumOrPair {
    Num(f64),
    Pair([f64; 2]),
}

impl From<f64> for NumOrPair {
    fn from(v: f64) -> Self {
        NumOrPair::Num(v)
    }
}

impl From<C64> for NumOrPair {
    fn from(v: C64) -> Self {
        NumOrPair::Pair([v.re, v.im])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub paper_ref: String,
    pub computed: NumOrPair,
    pub expected: NumOrPair,
    pub abs_err: f64,
    pub tol: f64,
    pub stderr: Option<f64>,
    pub passed: bool,
}

/// Semantic parameters of a run. Execution details (worker count) are
/// deliberately excluded so reports from different worker counts compare
/// byte-for-byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportParams {
    pub modes: usize,
    pub cutoff: usize,
    pub samples: usize,
    pub epsilon: f64,
    pub tol_scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub params: ReportParams,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
    pub seed: u64,
    pub version: String,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "suite,name,paper_ref,computed_re,computed_im,expected_re,expected_im,abs_err,tol,stderr,passed\n",
        );
        for c in &self.checks {
            let (cre, cim) = split(c.computed);
            let (ere, eim) = split(c.expected);
            out.push_str(&format!(
                "{},{},\"{}\",{:e},{:e},{:e},{:e},{:e},{:e},{},{}\n",
                self.suite,
                c.name,
                c.paper_ref,
                cre,
                cim,
                ere,
                eim,
                c.abs_err,
                c.tol,
                c.stderr.map_or(String::from(""), |s| format!("{s:e}")),
                c.passed
            ));
        }
        out
    }
}

fn split(v: NumOrPair) -> (f64, f64) {
    match v {
        NumOrPair::Num(x) => (x, 0.0),
        NumOrPair::Pair([re, im]) => (re, im),
    }
}

/// Intermediate result of one check body, before naming.
struct Outcome {
    computed: NumOrPair,
    expected: NumOrPair,
    abs_err: f64,
    tol: f64,
    stderr: Option<f64>,
    passed: bool,
}

impl Outcome {
    /// Deterministic comparison: passes iff abs_err <= tol (tol already
    /// scaled by the caller).
    fn det(computed: impl Into<NumOrPair>, expected: impl Into<NumOrPair>, abs_err: f64, tol: f64) -> Self {
        Outcome {
            computed: computed.into(),
            expected: expected.into(),
            abs_err,
            tol,
            stderr: None,
            passed: abs_err <= tol,
        }
    }

    /// Statistical comparison at `k` standard errors; `floor` guards the
    /// degenerate zero-variance case.
    fn stat(
        computed: impl Into<NumOrPair>,
        expected: impl Into<NumOrPair>,
        abs_err: f64,
        k: f64,
        stderr: f64,
        floor: f64,
    ) -> Self {
        let tol = k * stderr.max(floor);
        Outcome {
            computed: computed.into(),
            expected: expected.into(),
            abs_err,
            tol,
            stderr: Some(stderr),
            passed: abs_err <= tol,
        }
    }
}

struct CheckDef {
    name: &'static str,
    paper_ref: &'static str,
    run: fn(&SuiteConfig) -> Result<Outcome>,
}

fn registry(suite: Suite) -> Vec<CheckDef> {
    let mut defs: Vec<CheckDef> = Vec::new();
    let mut push = |name, paper_ref, run| defs.push(CheckDef { name, paper_ref, run });
    let s = suite;
    if matches!(s, Suite::Ccr | Suite::All) {
        push("commut/ccr-block-exactness", "Eq. (commut)", checks::ccr_block);
        push("commut/adjoint-consistency", "Eq. (commut)", checks::adjoint_consistency);
        push("numopk/number-eigenvalue", "Eq. (numopk)", checks::number_eigenvalue);
    }
    if matches!(s, Suite::Fock | Suite::All) {
        push("infockf/closed-vs-explicit", "Eq. (infockf)", checks::fock_overlap);
        push("fsfsdef/unit-norm", "Eq. (fsfsdef)", checks::fock_state_norm);
        push("fsskepabs/smeared-ccr", "Eqs. (fsskepabs); (binnespek)", checks::smeared_ccr);
        push("IIA/fixed-momentum-divergence", "Sec. II.A divergence", checks::divergence_probe);
        push("IIB/discrete-incompleteness", "Sec. II.B incompleteness", checks::incompleteness_probe);
    }
    if matches!(s, Suite::Coherent | Suite::All) {
        push("fskohdef-verplfs/cross-construction", "Eqs. (fskohdef); (verplfs)", checks::coherent_cross);
        push("fsinprodf/closed-vs-truncated", "Eq. (fsinprodf)", checks::coherent_overlap_check);
        push("fsinprodf/factored-form", "Eqs. (fsinprodf); (metric); (kohfase)", checks::coherent_factored);
        push("metric/distance-identity", "metric display after Eq. (kohfase)", checks::coherent_metric_identity);
        push("kohfase/real-phase", "Eq. (kohfase)", checks::coherent_real_phase);
    }
    if matches!(s, Suite::Quadrature | Suite::All) {
        push("koefpqn/theta-zero", "Eq. (koefpqn)", checks::theta_zero);
        push("koefpqn/phi-zero", "Eq. (koefpqn)", checks::phi_zero);
        push("genherm/generating-function", "Eq. (genherm)", checks::generating_function);
        push("ortherm/hermite-orthogonality", "Eq. (ortherm)", checks::hermite_orthogonality);
        push("ortqpcf/coefficient-orthogonality", "Eq. (ortqpcf)", checks::coefficient_orthogonality);
        push("volqpcf/delta-family-mass", "Eq. (volqpcf)", checks::delta_family_mass);
        push("mehler/closed-vs-series", "Eq. (mehler)", checks::mehler_identity);
        push("koefreken/theta-as-overlap", "Eqs. (koefreken); (fsquad)", checks::theta_as_overlap);
        push("fseieqp/eigen-block-residual", "Eq. (fseieqp)", checks::fs_quad_eigen_block);
        push("mehqq/closed-vs-states", "Eq. (mehqq)", checks::mehqq_overlap);
        push("fsquadkom/commutator", "Eq. (fsquadkom)", checks::quad_commutator);
        push("IIF/subspace-projector", "Sec. II.F projector display", checks::projector_check);
    }
    if matches!(s, Suite::Stq | Suite::All) {
        push("toetsqq/eigen-residual", "Eqs. (eieqpfm); (toetsqq)", checks::stq_eigen);
        push("koeff/recursion-vs-exponential", "Eqs. (uitbq0); (koeff); (qkdef)", checks::stq_recursion);
        push("qkdef/single-mode-amplitudes", "Eq. (qkdef)", checks::stq_amplitudes);
        push("anniQR/anti-vacuum", "Eq. (anniQR)", checks::anti_vacuum_check);
        push("oorvqp/closed-vs-truncated", "Eqs. (oorvqp); (binneprod)", checks::qp_overlap_convergence);
        push("oorvqq/regularized-overlap", "Eqs. (oplqq); (oorvqq)", checks::regularized_overlap);
        push("oorvqq0/delta-family-trend", "Eqs. (oorvqq0); (oorvpp0)", checks::delta_trend);
        push("qkdef/tensor-factorization", "Eqs. (qkdef); (defqr)", checks::stq_factorization);
        push("VI/projection-property", "Sec. VI projection discussion", checks::projection_property);
        push("oorvqkoh0/coherent-overlap", "Eqs. (oorvqkoh); (oorvqkoh0)", checks::stq_coherent);
    }
    if matches!(s, Suite::Bch | Suite::All) {
        push("komqpr/adjoint-closure", "App. A adjoint rule", checks::table_adjoint);
        push("komqpr/jacobi", "App. A table", checks::table_jacobi);
        push("komqpr/table-vs-matrices", "Eqs. (komqpr0)-(komnqpr)", checks::table_matrices);
        push("nonumr/s-split", "Eqs. (numr); (nonumr)", checks::s_split);
        push("oplh/closed-vs-ode", "Eq. (oplh)", checks::h_closed_vs_ode);
        push("omkeerfin/special-case", "Eq. (omkeerfin)", checks::h_special_case);
        push("oplqq/same-kind-pattern", "Eq. (oplqq)", checks::h_qq_pattern);
        push("omkeert/word-identity", "Eq. (omkeert)", checks::word_identity);
        push("fmqort1/vacuum-expectation", "Eqs. (fmqort0); (fmqort1)", checks::vacuum_expectation);
    }
    if matches!(s, Suite::Functional | Suite::All) {
        push("condF/second-moment", "Eq. (condF)", checks::wick_diagonal);
        push("condFcc/anomalous-moment", "Eq. (condFcc)", checks::wick_anomalous);
        push("condF2/four-point", "Eq. (condF2)", checks::wick_four_point);
        push("condals/higher-moments", "Eq. (condals)", checks::wick_six_point);
        push("fsfsvol/sector-diagonal", "Eqs. (Ldef); (LnaI); (fsfsvol)", checks::sector_diagonal);
        push("fsfsvolx/sector-off-diagonal", "Eq. (fsfsvolx)", checks::sector_off_diagonal);
        push("kohvol/coherent-resolution", "Eq. (kohvol)", checks::coherent_resolution_check);
        push("kohvol/two-step-sampler", "Eq. (kohvol) with Sec. II.D measure", checks::coherent_two_step);
        push("fquadqvol/kappa-fit", "Eq. (fquadqvol)", checks::stq_resolution_q);
        push("fquadpvol/kappa-fit", "Eq. (fquadpvol)", checks::stq_resolution_p);
    }
    defs
}

/// Runs every check registered for the configured suite. Check bodies are
/// pure given the configuration, so the report content is reproducible for
/// any worker count.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let defs = registry(cfg.suite);
    let start = Instant::now();
    let outcomes: Vec<Result<Outcome>> =
        par::ordered_map(defs.len(), cfg.workers, |i| (defs[i].run)(cfg));
    let mut checks = Vec::with_capacity(defs.len());
    for (def, outcome) in defs.iter().zip(outcomes) {
        let o = outcome?;
        checks.push(Check {
            name: def.name.to_string(),
            paper_ref: def.paper_ref.to_string(),
            computed: o.computed,
            expected: o.expected,
            abs_err: o.abs_err,
            tol: o.tol,
            stderr: o.stderr,
            passed: o.passed,
        });
    }
    let wall = if cfg.canonical_time {
        0.0
    } else {
        start.elapsed().as_secs_f64()
    };
    Ok(VerificationReport {
        suite: cfg.suite.name().to_string(),
        params: ReportParams {
            modes: cfg.modes,
            cutoff: cfg.cutoff,
            samples: cfg.samples,
            epsilon: cfg.epsilon,
            tol_scale: cfg.tol_scale,
        },
        checks,
        wall_time_s: wall,
        seed: cfg.seed,
        version: VERSION.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

/// Writes the report. With an explicit path the file is written exactly
/// there; otherwise a fresh timestamped name under `dir` is chosen and never
/// overwrites an existing report.
pub fn emit_report(
    report: &VerificationReport,
    format: ReportFormat,
    explicit_path: Option<&Path>,
    dir: &Path,
) -> Result<PathBuf> {
    let payload = match format {
        ReportFormat::Json => report.to_json()?,
        ReportFormat::Csv => report.to_csv(),
    };
    let path = match explicit_path {
        Some(p) => p.to_path_buf(),
        None => {
            std::fs::create_dir_all(dir)?;
            let stamp = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let mut attempt = 0;
            loop {
                let name = if attempt == 0 {
                    format!(
                        "{}-seed{}-{}.{}",
                        report.suite,
                        report.seed,
                        stamp,
                        format.extension()
                    )
                } else {
                    format!(
                        "{}-seed{}-{}-{}.{}",
                        report.suite,
                        report.seed,
                        stamp,
                        attempt,
                        format.extension()
                    )
                };
                let candidate = dir.join(name);
                if !candidate.exists() {
                    break candidate;
                }
                attempt += 1;
            }
        }
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(&path)?;
    file.write_all(payload.as_bytes())?;
    Ok(path)
}

mod checks {
    use super::*;

    fn unit_space(m: usize, cutoff: usize) -> Arc<FockSpace> {
        FockSpace::new(&ModeGrid::unit(m), cutoff)
    }

    /// Deterministic normalized spectrum draws for oracle comparisons.
    fn random_unit_spectra(grid: &Arc<ModeGrid>, seed: u64, count: usize) -> Vec<SpectralVector> {
        let cfg = EnsembleConfig::new(grid, count, seed, EnsembleKind::SphereSpectrum);
        (0..count)
            .map(|i| functional::sample_spectrum(&cfg, i).expect("in range"))
            .collect()
    }

    pub(super) fn ccr_block(cfg: &SuiteConfig) -> Result<Outcome> {
        let mut worst = 0.0f64;
        for m in 1..=cfg.modes.min(3) {
            let sp = unit_space(m, cfg.cutoff.max(3));
            let safe = sp.block_end(sp.cutoff() - 1);
            for i in 0..m {
                for j in 0..m {
                    let bi = sp.annihilator(i)?;
                    let (_, bjd) = sp.ladder(j)?;
                    let mut comm = bi.commutator(&bjd);
                    if i == j {
                        comm = comm.sub(&SparseOperator::identity(sp.dim()));
                    }
                    worst = worst.max(comm.max_abs_on_block(safe, safe));
                }
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-14 * cfg.tol_scale))
    }

    pub(super) fn adjoint_consistency(cfg: &SuiteConfig) -> Result<Outcome> {
        // Build the creator from its matrix elements directly and compare
        // with the adjoint of the annihilator, entrywise.
        let sp = unit_space(cfg.modes.min(3), cfg.cutoff);
        let mut worst = 0.0f64;
        for mode in 0..sp.modes() {
            let (a, adag) = sp.ladder(mode)?;
            let mut triplets = Vec::new();
            for col in 0..sp.dim() {
                let occ = sp.occupation(col);
                if sp.total_occupation(col) as usize >= sp.cutoff() {
                    continue;
                }
                let mut raised = occ.to_vec();
                raised[mode] += 1;
                if let Some(row) = sp.index_of(&raised) {
                    triplets.push((row, col, c64(((occ[mode] + 1) as f64).sqrt(), 0.0)));
                }
            }
            let direct = SparseOperator::from_triplets(sp.dim(), triplets);
            worst = worst.max(direct.sub(&adag).max_abs());
            let _ = a;
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-15 * cfg.tol_scale))
    }

    pub(super) fn number_eigenvalue(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff);
        let nop = sp.number_operator();
        let mut worst = 0.0f64;
        for f in random_unit_spectra(&grid, cfg.seed ^ 0x6e75, 4) {
            for n in 0..=cfg.cutoff.min(4) {
                let v = sp.fock_state(n, &f)?;
                let mut r = nop.apply(&v);
                fock::axpy(&mut r, c64(-(n as f64), 0.0), &v);
                worst = worst.max(norm(&r));
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn fock_overlap(cfg: &SuiteConfig) -> Result<Outcome> {
        let m = cfg.modes.min(3);
        let grid = ModeGrid::unit(m);
        let sp = FockSpace::new(&grid, cfg.cutoff.max(4));
        let spectra = random_unit_spectra(&grid, cfg.seed ^ 0xf0c, 100);
        let mut worst = 0.0f64;
        for pair in spectra.chunks(2).take(50) {
            let (f, g) = (&pair[0], &pair[1]);
            for mm in 0..=4usize {
                for nn in 0..=4usize {
                    let closed = fock::fock_overlap_closed(mm, f, nn, g)?;
                    let vm = sp.fock_state(mm, f)?;
                    let vn = sp.fock_state(nn, g)?;
                    worst = worst.max((closed - dot(&vm, &vn)).norm());
                }
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn fock_state_norm(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff);
        let mut worst = 0.0f64;
        for f in random_unit_spectra(&grid, cfg.seed ^ 0x11, 5) {
            for n in 0..=cfg.cutoff.min(5) {
                worst = worst.max((norm(&sp.fock_state(n, &f)?) - 1.0).abs());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn smeared_ccr(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff);
        let spectra = random_unit_spectra(&grid, cfg.seed ^ 0xcc, 6);
        let safe = sp.block_end(sp.cutoff() - 1);
        let mut worst = 0.0f64;
        for pair in spectra.chunks(2) {
            let (f, g) = (&pair[0], &pair[1]);
            let (af, _) = sp.smeared_ladder(f)?;
            let (_, agd) = sp.smeared_ladder(g)?;
            let comm = af.commutator(&agd);
            let expect = SparseOperator::identity(sp.dim()).scale(f.inner(g)?);
            worst = worst.max(comm.sub(&expect).max_abs_on_block(safe, safe));
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn divergence_probe(cfg: &SuiteConfig) -> Result<Outcome> {
        // Refine the cell volume through three halvings; the probe must grow
        // by exactly 2^n per step.
        let mut worst = 0.0f64;
        for n in 2..=3usize {
            let mut last = None;
            for step in 0..3 {
                let vol = (2.0 * std::f64::consts::PI).powi(3) / 2f64.powi(step);
                let grid = ModeGrid::new(&[[0.0, 0.0, 1.0]], &[0], vol)?;
                let sp = FockSpace::new(&grid, n);
                let probe = sp.fixed_momentum_divergence_probe(0, n)?;
                if let Some(prev) = last {
                    let ratio: f64 = probe / prev;
                    worst = worst.max((ratio - 2f64.powi(n as i32)).abs());
                }
                last = Some(probe);
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn incompleteness_probe(cfg: &SuiteConfig) -> Result<Outcome> {
        let sp = unit_space(cfg.modes.max(2), cfg.cutoff.max(2));
        let worst = sp.discrete_incompleteness_probe(0, 1)?;
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn coherent_cross(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff.max(20));
        let f = random_unit_spectra(&grid, cfg.seed ^ 0xc0, 1).remove(0);
        let spec = CoherentSpec::new(c64(0.8, 0.0), f)?;
        let ve = coherent::coherent_state(&sp, &spec, Construction::Expansion)?;
        let vd = coherent::coherent_state(&sp, &spec, Construction::Displacement)?;
        let mut resid = ve;
        fock::axpy(&mut resid, -C64::ONE, &vd);
        let dev = norm(&resid);
        Ok(Outcome::det(dev, 0.0, dev, 1e-7 * cfg.tol_scale))
    }

    pub(super) fn coherent_overlap_check(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff.max(25));
        let spectra = random_unit_spectra(&grid, cfg.seed ^ 0xab, 6);
        let alphas = [c64(0.9, 0.3), c64(-0.5, 0.6), c64(0.2, -0.9)];
        let mut worst = 0.0f64;
        for (pair, alpha) in spectra.chunks(2).zip(alphas) {
            let a = CoherentSpec::new(alpha, pair[0].clone())?;
            let b = CoherentSpec::new(alpha.conj() * 0.7, pair[1].clone())?;
            let closed = coherent::coherent_overlap_closed(&a, &b)?.value;
            let va = coherent::coherent_state(&sp, &a, Construction::Expansion)?;
            let vb = coherent::coherent_state(&sp, &b, Construction::Expansion)?;
            worst = worst.max((closed - dot(&va, &vb)).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-7 * cfg.tol_scale))
    }

    pub(super) fn coherent_factored(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let spectra = random_unit_spectra(&grid, cfg.seed ^ 0xfa, 8);
        let mut worst = 0.0f64;
        for pair in spectra.chunks(2) {
            let a = CoherentSpec::new(c64(0.7, -0.2), pair[0].clone())?;
            let b = CoherentSpec::new(c64(-0.3, 0.8), pair[1].clone())?;
            let o = coherent::coherent_overlap_closed(&a, &b)?;
            worst = worst.max((o.value - o.factored).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn coherent_metric_identity(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let spectra = random_unit_spectra(&grid, cfg.seed ^ 0x3e, 8);
        let mut worst = 0.0f64;
        for pair in spectra.chunks(2) {
            let a = CoherentSpec::new(c64(0.9, 0.1), pair[0].clone())?;
            let b = CoherentSpec::new(c64(0.4, -0.6), pair[1].clone())?;
            worst = worst.max(coherent::coherent_metric(&a, &b)?.abs_difference);
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn coherent_real_phase(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let f = SpectralVector::from_folded(&grid, vec![c64(0.6, 0.0), c64(0.8, 0.0)])?;
        let g = SpectralVector::from_folded(&grid, vec![c64(1.0, 0.0), c64(2.0, 0.0)])?
            .normalized()?;
        let a = CoherentSpec::new(c64(0.7, 0.0), f)?;
        let b = CoherentSpec::new(c64(1.1, 0.0), g)?;
        let phase = coherent::coherent_overlap_closed(&a, &b)?.phase.abs();
        Ok(Outcome::det(phase, 0.0, phase, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn theta_zero(cfg: &SuiteConfig) -> Result<Outcome> {
        let v = quadrature::quad_coeff(QuadKind::Q, 0, 0.0).re;
        let expect = std::f64::consts::PI.powf(-0.25);
        Ok(Outcome::det(v, expect, (v - expect).abs(), 1e-12 * cfg.tol_scale))
    }

    pub(super) fn phi_zero(cfg: &SuiteConfig) -> Result<Outcome> {
        let v = quadrature::quad_coeff(QuadKind::P, 0, 0.0);
        let expect = 2.0 * std::f64::consts::PI.sqrt();
        let err = (v.norm_sqr() - expect).abs();
        Ok(Outcome::det(v.norm_sqr(), expect, err, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn generating_function(cfg: &SuiteConfig) -> Result<Outcome> {
        let mut worst = 0.0f64;
        for &x in &[-2.0f64, -0.5, 0.0, 1.0, 2.0] {
            for &nu in &[-0.5f64, -0.25, 0.1, 0.5] {
                let mut acc = 0.0;
                let mut fact = 1.0;
                for n in 0..=60usize {
                    if n > 0 {
                        fact *= n as f64;
                    }
                    acc += nu.powi(n as i32) * quadrature::hermite(n, x) / fact;
                }
                worst = worst.max((acc - (2.0 * x * nu - nu * nu).exp()).abs());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn hermite_orthogonality(cfg: &SuiteConfig) -> Result<Outcome> {
        let (xs, ws) = quadrature::gauss_hermite(28);
        let mut worst = 0.0f64;
        for m in 0..=10usize {
            for n in 0..=10usize {
                let integral: f64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(&x, &w)| w * quadrature::hermite(m, x) * quadrature::hermite(n, x))
                    .sum();
                let mut fact = 1.0;
                for k in 1..=n {
                    fact *= k as f64;
                }
                let expect = if m == n {
                    std::f64::consts::PI.sqrt() * 2f64.powi(n as i32) * fact
                } else {
                    0.0
                };
                let scale = if m == n { expect } else { std::f64::consts::PI.sqrt() * 2f64.powi(((m + n) / 2) as i32) * fact.max(1.0) };
                worst = worst.max((integral - expect).abs() / scale.abs().max(1.0));
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-9 * cfg.tol_scale))
    }

    pub(super) fn coefficient_orthogonality(cfg: &SuiteConfig) -> Result<Outcome> {
        let (xs, ws) = quadrature::gauss_hermite(32);
        let pi = std::f64::consts::PI;
        let mut worst = 0.0f64;
        for m in 0..=12usize {
            for n in 0..=12usize {
                let mut theta = 0.0;
                let mut phi = C64::ZERO;
                for (&x, &w) in xs.iter().zip(&ws) {
                    let seq = quadrature::hermite_normalized_seq(12, x);
                    theta += w * seq[m] * seq[n] / pi.sqrt();
                    let im = c64(0.0, 1.0);
                    let pm = im.powu(m as u32) * seq[m];
                    let pn = im.powu(n as u32) * seq[n];
                    phi += pm * pn.conj() * w * 2.0 * pi.sqrt();
                }
                let dt = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((theta - dt).abs());
                worst = worst.max((phi - c64(2.0 * pi * dt, 0.0)).norm() / (2.0 * pi));
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-8 * cfg.tol_scale))
    }

    pub(super) fn delta_family_mass(cfg: &SuiteConfig) -> Result<Outcome> {
        let diag = quadrature::delta_family_diagnostics(0.0, &[10, 20, 40]);
        let monotone = diag.windows(2).all(|w| {
            w[1].mass_error < w[0].mass_error
                && w[1].window_spread.abs() < w[0].window_spread.abs()
        });
        let final_err = diag.last().unwrap().mass_error;
        let mut o = Outcome::det(final_err, 0.0, final_err, 0.1 * cfg.tol_scale);
        o.passed = o.passed && monotone;
        Ok(o)
    }

    pub(super) fn mehler_identity(cfg: &SuiteConfig) -> Result<Outcome> {
        let mut worst = 0.0f64;
        for &rho in &[0.3f64, 0.6, 0.9] {
            for &(x, y) in &[(0.0f64, 0.0f64), (0.7, -0.4), (1.5, 1.1)] {
                let closed = quadrature::mehler_kernel(rho, x, y)?;
                let series = quadrature::mehler_partial_sum(rho, x, y, 900);
                worst = worst.max((closed - series).abs() / closed.abs().max(1.0));
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn theta_as_overlap(cfg: &SuiteConfig) -> Result<Outcome> {
        // <n_F | q_F> = Theta_n(q) for any normalized spectrum.
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff.max(8));
        let f = random_unit_spectra(&grid, cfg.seed ^ 0x7a, 1).remove(0);
        let mut worst = 0.0f64;
        for &q in &[-1.1f64, 0.0, 0.9] {
            let state = quadrature::fs_quad_state(&sp, q, &f, QuadKind::Q)?;
            for n in 0..=cfg.cutoff.min(6) {
                let fock_n = sp.fock_state(n, &f)?;
                let overlap = dot(&fock_n, &state);
                worst = worst.max((overlap - quadrature::quad_coeff(QuadKind::Q, n, q)).norm());
            }
            let pstate = quadrature::fs_quad_state(&sp, q, &f, QuadKind::P)?;
            for n in 0..=cfg.cutoff.min(6) {
                let fock_n = sp.fock_state(n, &f)?;
                let overlap = dot(&fock_n, &pstate);
                worst = worst.max((overlap - quadrature::quad_coeff(QuadKind::P, n, q)).norm());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn fs_quad_eigen_block(cfg: &SuiteConfig) -> Result<Outcome> {
        // The three-term coefficient recurrence makes the eigenvalue
        // relation exact below the top sector.
        let grid = ModeGrid::unit(cfg.modes.min(2));
        let f = random_unit_spectra(&grid, cfg.seed ^ 0x7b, 1).remove(0);
        let mut worst = 0.0f64;
        for n_max in [cfg.cutoff.max(12), 2 * cfg.cutoff.max(12)] {
            let sp = FockSpace::new(&grid, n_max);
            for kind in [QuadKind::Q, QuadKind::P] {
                let r = quadrature::fs_quad_eigen_residual(&sp, 0.5, &f, kind)?;
                worst = worst.max(r.block_residual);
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn mehqq_overlap(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let n_max = cfg.cutoff.max(40);
        let sp = FockSpace::new(&grid, n_max);
        let f = SpectralVector::basis_mode(&grid, 0)?;
        let mut worst = 0.0f64;
        for &mu in &[0.0f64, 0.3, 0.6, 0.75, 0.8] {
            let g = SpectralVector::from_folded(
                &grid,
                vec![c64(mu, 0.0), c64((1.0 - mu * mu).sqrt(), 0.0)],
            )?;
            for &(q, q2) in &[(0.0f64, 0.0f64), (0.5, -0.3), (1.0, 1.0), (0.7, 0.7)] {
                let closed = quadrature::fs_quad_overlap_closed(q, &f, q2, &g)?;
                let sf = quadrature::fs_quad_state(&sp, q, &f, QuadKind::Q)?;
                let sg = quadrature::fs_quad_state(&sp, q2, &g, QuadKind::Q)?;
                worst = worst.max((dot(&sf, &sg) - c64(closed, 0.0)).norm());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-6 * cfg.tol_scale))
    }

    pub(super) fn quad_commutator(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff);
        let spectra = random_unit_spectra(&grid, cfg.seed ^ 0x4c, 4);
        let safe = sp.block_end(sp.cutoff() - 1);
        let mut worst = 0.0f64;
        for pair in spectra.chunks(2) {
            let qf = quadrature::quad_operator(&sp, &pair[0], QuadKind::Q)?;
            let pg = quadrature::quad_operator(&sp, &pair[1], QuadKind::P)?;
            let comm = qf.commutator(&pg);
            let expect = SparseOperator::identity(sp.dim())
                .scale(c64(0.0, pair[0].inner(&pair[1])?.re));
            worst = worst.max(comm.sub(&expect).max_abs_on_block(safe, safe));
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn projector_check(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, cfg.cutoff.clamp(4, 6));
        let f = SpectralVector::basis_mode(&grid, 0)?;
        let (p, diag) = quadrature::subspace_projector(&sp, &f, 9.0, 0.05)?;
        let orth = norm(&p.apply(&sp.basis_state(&[0, 1])?));
        let trace_err = (diag.trace - (sp.cutoff() + 1) as f64).abs();
        let worst = diag
            .deviation_from_sum
            .max(diag.idempotency_error)
            .max(orth)
            .max(trace_err);
        Ok(Outcome::det(worst, 0.0, worst, 1e-7 * cfg.tol_scale))
    }

    fn rsv(grid: &Arc<ModeGrid>, v: Vec<f64>) -> Result<RealSpectralVector> {
        RealSpectralVector::from_folded(grid, v)
    }

    pub(super) fn stq_eigen(cfg: &SuiteConfig) -> Result<Outcome> {
        let n_max = cfg.cutoff.max(16);
        let mut worst = 0.0f64;
        for m in 1..=cfg.modes.min(2) {
            let grid = ModeGrid::unit(m);
            let sp = FockSpace::new(&grid, n_max);
            let coeffs: Vec<f64> = (0..m).map(|i| 0.3 - 0.7 * i as f64).collect();
            for kind in [StqKind::Q, StqKind::P] {
                let spec = StqSpec::exact(kind, rsv(&grid, coeffs.clone())?);
                for mode in 0..m {
                    worst = worst.max(stq::eigen_residual(&sp, &spec, mode)?);
                }
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn stq_recursion(cfg: &SuiteConfig) -> Result<Outcome> {
        let mut worst = 0.0f64;
        for (m, coeffs) in [(1usize, vec![0.7]), (2, vec![0.3, -0.4])] {
            let grid = ModeGrid::unit(m);
            let sp = FockSpace::new(&grid, cfg.cutoff.max(8));
            let ev = rsv(&grid, coeffs)?;
            let state = stq::stq_state(&sp, &StqSpec::exact(StqKind::Q, ev.clone()))?;
            let oracle = stq::coeff_recursion_oracle(&sp, &ev, 5)?;
            for idx in 0..sp.block_end(5) {
                worst = worst.max((state[idx] - oracle[idx]).norm());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-10 * cfg.tol_scale))
    }

    pub(super) fn stq_amplitudes(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let n_max = cfg.cutoff.max(12);
        let sp = FockSpace::new(&grid, n_max);
        let q = 0.7;
        let state = stq::stq_state(&sp, &StqSpec::exact(StqKind::Q, rsv(&grid, vec![q])?))?;
        let v0 = 2f64.powf(0.25) * (-q * q / 2.0).exp();
        let phis = quadrature::hermite_normalized_seq(n_max, q);
        let mut worst = 0.0f64;
        for n in 0..=n_max {
            let idx = sp.index_of(&[n as u32]).unwrap();
            worst = worst.max((state[idx] - c64(v0 * phis[n], 0.0)).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn anti_vacuum_check(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(2));
        let sp = FockSpace::new(&grid, cfg.cutoff.max(8));
        let av = stq::anti_vacuum(&sp)?;
        let cut = sp.block_end(sp.cutoff() - 2);
        let mut worst = 0.0f64;
        for i in 0..sp.modes() {
            let (b, bdag) = sp.ladder(i)?;
            let lhs = b.apply(&av);
            let rhs = bdag.apply(&av);
            for idx in 0..cut {
                worst = worst.max((lhs[idx] - rhs[idx]).norm());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-13 * cfg.tol_scale))
    }

    pub(super) fn qp_overlap_convergence(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let q = StqSpec::exact(StqKind::Q, rsv(&grid, vec![0.3])?);
        let p = StqSpec::exact(StqKind::P, rsv(&grid, vec![0.4])?);
        let closed = stq::stq_overlap_closed(&q, &p)?;
        let mut errs = Vec::new();
        for n_max in [12usize, 16, 20] {
            let sp = FockSpace::new(&grid, n_max);
            let vq = stq::stq_state(&sp, &q)?;
            let vp = stq::stq_state(&sp, &p)?;
            let sums = stq::sector_partial_sums(&sp, &vq, &vp);
            errs.push((stq::accelerate_partial_sums(&sums, 4) - closed).norm());
        }
        let monotone = errs[0] > errs[1] && errs[1] > errs[2];
        let mut o = Outcome::det(errs[2], 0.0, errs[2], 1e-3 * cfg.tol_scale);
        o.passed = o.passed && monotone;
        Ok(o)
    }

    pub(super) fn regularized_overlap(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let eps = cfg.epsilon.max(0.1);
        // Geometric tail (1-eps)^N: size the cutoff for a 1e-10 tail.
        let n_max = ((-23.0) / (1.0 - eps).max(1e-6).ln()).ceil() as usize + 20;
        let sp = FockSpace::new(&grid, n_max.max(40));
        let mut worst = 0.0f64;
        for kind in [StqKind::Q, StqKind::P] {
            let a = StqSpec::new(kind, rsv(&grid, vec![0.6])?, Regularization::Eps(eps), Normalization::Paper)?;
            let b = StqSpec::new(kind, rsv(&grid, vec![-0.2])?, Regularization::Eps(eps), Normalization::Paper)?;
            let closed = stq::stq_overlap_closed(&a, &b)?;
            let explicit = dot(&stq::stq_state(&sp, &a)?, &stq::stq_state(&sp, &b)?);
            worst = worst.max((closed - explicit).norm());
            // Identical specs: the exact prefactor eps^{-Omega}.
            let same = stq::stq_overlap_closed(&a, &a)?;
            let expect = eps.powf(-grid.zero_point_constant());
            worst = worst.max((same - c64(expect, 0.0)).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-8 * cfg.tol_scale))
    }

    pub(super) fn delta_trend(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        // Distance 1 between the two eigenvalue vectors.
        let mk = |coeffs: Vec<f64>, eps: f64| {
            StqSpec::new(
                StqKind::Q,
                RealSpectralVector::from_folded(&grid, coeffs).unwrap(),
                Regularization::Eps(eps),
                Normalization::Paper,
            )
        };
        let mut last = f64::INFINITY;
        let mut monotone = true;
        for &eps in &[0.4f64, 0.2, 0.1, 0.05] {
            let v = stq::stq_overlap_closed(&mk(vec![1.0, 0.0], eps)?, &mk(vec![0.0, 0.0], eps)?)?
                .norm();
            monotone &= v < last;
            last = v;
        }
        // d = 0 grows exactly as eps^{-Omega}.
        let mut worst = 0.0f64;
        for &eps in &[0.4f64, 0.2, 0.1, 0.05] {
            let v = stq::stq_overlap_closed(&mk(vec![0.5, 0.2], eps)?, &mk(vec![0.5, 0.2], eps)?)?;
            worst = worst.max((v - c64(eps.powf(-1.0), 0.0)).norm());
        }
        let mut o = Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale);
        o.passed = o.passed && monotone;
        Ok(o)
    }

    pub(super) fn stq_factorization(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid2 = ModeGrid::unit(2);
        let sp2 = FockSpace::new(&grid2, cfg.cutoff.max(8));
        let qvec = [0.5, -0.7];
        let v = stq::stq_state(&sp2, &StqSpec::exact(StqKind::Q, rsv(&grid2, qvec.to_vec())?))?;
        let grid1 = ModeGrid::unit(1);
        let sp1 = FockSpace::new(&grid1, cfg.cutoff.max(8));
        let per: Vec<Vec<C64>> = qvec
            .iter()
            .map(|&qi| {
                stq::stq_state(&sp1, &StqSpec::exact(StqKind::Q, rsv(&grid1, vec![qi]).unwrap()))
                    .unwrap()
            })
            .collect();
        let mut worst = 0.0f64;
        for idx in 0..sp2.dim() {
            let occ = sp2.occupation(idx);
            let product = per[0][sp1.index_of(&[occ[0]]).unwrap()]
                * per[1][sp1.index_of(&[occ[1]]).unwrap()];
            worst = worst.max((v[idx] - product).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn projection_property(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, cfg.cutoff.clamp(8, 10));
        let ev = rsv(&grid, vec![0.48, 0.64])?;
        let (x, direction) = ev.magnitude_direction();
        let v = stq::stq_state(&sp, &StqSpec::exact(StqKind::Q, ev))?;
        let f = direction.as_complex();
        let (proj, _) = quadrature::subspace_projector(&sp, &f, 9.5, 0.05)?;
        let projected = proj.apply(&v);
        let fsq = quadrature::fs_quad_state(&sp, x, &f, QuadKind::Q)?;
        let ratio = c64(
            2f64.powf(grid.zero_point_constant() / 2.0)
                * std::f64::consts::PI.powf(0.25),
            0.0,
        );
        let mut worst = 0.0f64;
        for idx in 0..sp.dim() {
            worst = worst.max((projected[idx] - ratio * fsq[idx]).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-8 * cfg.tol_scale))
    }

    pub(super) fn stq_coherent(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, cfg.cutoff.max(25));
        let f = SpectralVector::from_folded(&grid, vec![c64(0.6, 0.0), c64(0.0, 0.8)])?;
        let coh = CoherentSpec::new(c64(0.5, 0.7), f)?;
        let q = StqSpec::exact(StqKind::Q, rsv(&grid, vec![0.4, -0.6])?);
        let closed = stq::stq_coherent_overlap_closed(&q, &coh)?;
        let vq = stq::stq_state(&sp, &q)?;
        let va = coherent::coherent_state(&sp, &coh, Construction::Expansion)?;
        let explicit = dot(&vq, &va);
        let err = (closed - explicit).norm();
        Ok(Outcome {
            computed: explicit.into(),
            expected: closed.into(),
            abs_err: err,
            tol: 1e-7 * cfg.tol_scale,
            stderr: None,
            passed: err <= 1e-7 * cfg.tol_scale,
        })
    }

    pub(super) fn table_adjoint(cfg: &SuiteConfig) -> Result<Outcome> {
        let ctx = bch::AlgebraContext {
            q2: 0.7,
            p2: 1.9,
            mu: c64(-0.35, 0.0),
        };
        let mut worst = 0.0f64;
        for &x in &bch::ALL_GENERATORS {
            for &y in &bch::ALL_GENERATORS {
                let lhs = bch::commutator(&ctx, y.adjoint(), x.adjoint());
                let rhs = bch::commutator(&ctx, x, y).adjoint();
                worst = worst.max(lhs.plus(&rhs.scaled(c64(-1.0, 0.0))).max_abs());
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-14 * cfg.tol_scale))
    }

    pub(super) fn table_jacobi(cfg: &SuiteConfig) -> Result<Outcome> {
        let ctx = bch::AlgebraContext {
            q2: 0.9,
            p2: 1.4,
            mu: c64(0.6, 0.0),
        };
        let mut worst = 0.0f64;
        for &a in &bch::ALL_GENERATORS {
            for &b in &bch::ALL_GENERATORS {
                for &d in &bch::ALL_GENERATORS {
                    let ea = bch::LieElement::generator(a);
                    let eb = bch::LieElement::generator(b);
                    let ed = bch::LieElement::generator(d);
                    let j = bch::lie_bracket(&ctx, &bch::lie_bracket(&ctx, &ea, &eb), &ed)
                        .plus(&bch::lie_bracket(&ctx, &bch::lie_bracket(&ctx, &eb, &ed), &ea))
                        .plus(&bch::lie_bracket(&ctx, &bch::lie_bracket(&ctx, &ed, &ea), &eb));
                    worst = worst.max(j.max_abs());
                }
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-13 * cfg.tol_scale))
    }

    pub(super) fn table_matrices(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(2));
        let sp = FockSpace::new(&grid, cfg.cutoff.max(8));
        let m = grid.len();
        let qv = rsv(&grid, (0..m).map(|i| 0.6 - 0.9 * i as f64).collect())?;
        let pv = rsv(&grid, (0..m).map(|i| 0.2 + 0.7 * i as f64).collect())?;
        let ctx = bch::AlgebraContext::from_vectors(&qv, &pv)?;
        let gens = bch::GeneratorMatrices::build(&sp, &qv, &pv)?;
        let cut = sp.block_end(sp.cutoff() - 2);
        let mut worst = 0.0f64;
        for &a in &bch::ALL_GENERATORS {
            for &b in &bch::ALL_GENERATORS {
                let numeric = gens.matrix(a).commutator(gens.matrix(b));
                let symbolic = bch::commutator(&ctx, a, b);
                let mut expect = SparseOperator::identity(sp.dim()).scale(symbolic.scalar);
                for (i, &g) in bch::ALL_GENERATORS.iter().enumerate() {
                    if symbolic.gens[i] != C64::ZERO {
                        expect = expect.add(&gens.matrix(g).scale(symbolic.gens[i]));
                    }
                }
                worst = worst.max(numeric.sub(&expect).max_abs_on_block(cut, cut));
            }
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn s_split(cfg: &SuiteConfig) -> Result<Outcome> {
        // s = n + Omega on the whole truncated space, and [a_R, a_R^dag] = s
        // on the sub-block.
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let sp = FockSpace::new(&grid, cfg.cutoff);
        let omega = grid.zero_point_constant();
        let s = stq::op_s(&sp);
        let expect = sp
            .number_operator()
            .add(&SparseOperator::identity(sp.dim()).scale(c64(omega, 0.0)));
        let mut worst = s.sub(&expect).max_abs();
        let ar = stq::op_a_r(&sp)?;
        let comm = ar.commutator(&ar.adjoint());
        let cut = sp.block_end(sp.cutoff() - 2);
        worst = worst.max(comm.sub(&s).max_abs_on_block(cut, cut));
        Ok(Outcome::det(worst, 0.0, worst, 1e-12 * cfg.tol_scale))
    }

    pub(super) fn h_closed_vs_ode(cfg: &SuiteConfig) -> Result<Outcome> {
        // 20 deterministic pseudo-random draws, |k| <= 1, |t| <= 0.5, away
        // from the singular surface.
        let mut state = cfg.seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut worst = 0.0f64;
        let mut done = 0;
        while done < 20 {
            let k = [
                c64(2.0 * next() - 1.0, 2.0 * next() - 1.0) * 0.7,
                c64(2.0 * next() - 1.0, 2.0 * next() - 1.0) * 0.7,
                c64(2.0 * next() - 1.0, 2.0 * next() - 1.0) * 0.7,
                c64(2.0 * next() - 1.0, 2.0 * next() - 1.0) * 0.7,
            ];
            let t = next() * 0.5;
            if (C64::ONE - k[1] * k[3] * t * t).norm() < 0.2 {
                continue;
            }
            let (mu, q2, p2) = (c64(next() - 0.5, 0.0), next(), next());
            let closed = bch::normal_order_h(k, t, mu, q2, p2)?;
            let ode = bch::ode_oracle_h(k, t, mu, q2, p2)?;
            for i in 0..8 {
                worst = worst.max((closed.h[i] - ode.h[i]).norm());
            }
            done += 1;
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-7 * cfg.tol_scale))
    }

    pub(super) fn h_special_case(cfg: &SuiteConfig) -> Result<Outcome> {
        let (q2, p2, mu) = (0.49, 0.81, 0.2);
        let sol = bch::normal_order_h(
            [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE],
            1.0,
            c64(mu, 0.0),
            q2,
            p2,
        )?;
        let expect = [
            c64(q2 / 2.0 + p2 / 2.0, mu),
            c64(0.5, 0.0),
            c64(0.0, 0.5),
            c64(0.5, 0.0),
            c64(-(2f64.ln()), 0.0),
            c64(0.5, 0.0),
            c64(0.0, -0.5),
            c64(-0.5, 0.0),
        ];
        let mut worst = 0.0f64;
        for i in 0..8 {
            worst = worst.max((sol.h[i] - expect[i]).norm());
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-14 * cfg.tol_scale))
    }

    pub(super) fn h_qq_pattern(cfg: &SuiteConfig) -> Result<Outcome> {
        let t = 0.6;
        let sol = bch::normal_order_h(
            [C64::ONE, -C64::ONE, C64::ONE, -C64::ONE],
            t,
            c64(0.15, 0.0),
            0.7,
            0.9,
        )?;
        let d = 1.0 - t * t;
        let mut worst = (sol.h[2] - c64(t / d, 0.0)).norm();
        worst = worst.max((sol.h[3] + c64(t / d, 0.0)).norm());
        worst = worst.max((sol.h[5] - c64(t / d, 0.0)).norm());
        worst = worst.max((sol.h[7] + c64(t / d, 0.0)).norm());
        worst = worst.max((sol.h[1] + c64(t * t / d, 0.0)).norm());
        worst = worst.max((sol.h[6] + c64(t * t / d, 0.0)).norm());
        worst = worst.max((sol.h[4] + c64(d.ln(), 0.0)).norm());
        Ok(Outcome::det(worst, 0.0, worst, 1e-14 * cfg.tol_scale))
    }

    pub(super) fn word_identity(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let n_max = cfg.cutoff.max(16);
        let sp = FockSpace::new(&grid, n_max);
        let qv = rsv(&grid, vec![0.7])?;
        let pv = rsv(&grid, vec![0.9])?;
        let gens = bch::GeneratorMatrices::build(&sp, &qv, &pv)?;
        let ctx = bch::AlgebraContext::from_vectors(&qv, &pv)?;
        let k = [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE];
        let mut worst = 0.0f64;
        // Block cuts sized so the clipped-path bound sits below tolerance;
        // larger t demands a lower block.
        for (t, block) in [(0.4f64, 0usize), (0.3, 2), (0.2, 4), (0.1, 6)] {
            let leak = bch::leakage_bound(block, n_max, (k[1] * k[3]).norm() * t * t);
            if leak > 1e-6 {
                return Err(Error::BlockCutTooHigh {
                    block_cut: block,
                    cutoff: n_max,
                    leakage: leak,
                });
            }
            let sol = bch::normal_order_h(k, t, ctx.mu, ctx.q2, ctx.p2)?;
            let dev = bch::verify_word(
                &sp,
                &gens,
                &bch::ExpWord::ordering_lhs(k, t),
                &bch::ExpWord::ordering_rhs(&sol),
                block,
            )?;
            worst = worst.max(dev);
        }
        Ok(Outcome::det(worst, 0.0, worst, 1e-6 * cfg.tol_scale))
    }

    pub(super) fn vacuum_expectation(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, cfg.cutoff.max(24));
        let qv = rsv(&grid, vec![0.5])?;
        let pv = rsv(&grid, vec![-0.4])?;
        let gens = bch::GeneratorMatrices::build(&sp, &qv, &pv)?;
        let ctx = bch::AlgebraContext::from_vectors(&qv, &pv)?;
        let omega = grid.zero_point_constant();
        let k = [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE];
        let mut worst = 0.0f64;
        for t in [0.3, 0.5] {
            let w = gens.word_matrix(&bch::ExpWord::ordering_lhs(k, t));
            let sol = bch::normal_order_h(k, t, ctx.mu, ctx.q2, ctx.p2)?;
            let closed = (sol.h[0] + sol.h[4] * omega).exp();
            worst = worst.max((w.entry(0, 0) - closed).norm());
        }
        // t = 1: closed forms give exactly 2^{-Omega} e^{q2/2 + p2/2 + i mu}.
        let sol1 = bch::normal_order_h(k, 1.0, ctx.mu, ctx.q2, ctx.p2)?;
        let closed1 = (sol1.h[0] + sol1.h[4] * omega).exp();
        let expect = c64(ctx.q2 / 2.0 + ctx.p2 / 2.0, 0.0).exp()
            * c64(0.0, ctx.mu.re).exp()
            * 2f64.powf(-omega);
        worst = worst.max((closed1 - expect).norm());
        Ok(Outcome::det(worst, 0.0, worst, 1e-8 * cfg.tol_scale))
    }

    pub(super) fn wick_diagonal(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let ens = EnsembleConfig::new(&grid, cfg.samples, cfg.seed, EnsembleKind::GaussianSpectrum);
        let spec = MomentSpec::new(vec![(0, false), (0, true)]);
        let (mc, se) = functional::mc_wick_moment(&ens, &spec, 1);
        let err = (mc - C64::ONE).norm();
        Ok(Outcome::stat(mc, C64::ONE, err, 5.0, se, 1e-8))
    }

    pub(super) fn wick_anomalous(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.min(3));
        let ens = EnsembleConfig::new(&grid, cfg.samples, cfg.seed, EnsembleKind::GaussianSpectrum);
        let spec = MomentSpec::new(vec![(0, false), (0, false)]);
        let (mc, se) = functional::mc_wick_moment(&ens, &spec, 1);
        Ok(Outcome::stat(mc, C64::ZERO, mc.norm(), 5.0, se, 1e-8))
    }

    pub(super) fn wick_four_point(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.clamp(2, 3));
        let ens = EnsembleConfig::new(&grid, cfg.samples, cfg.seed, EnsembleKind::GaussianSpectrum);
        // (F_0, F_1*, F_1, F_0*): one surviving pairing.
        let spec = MomentSpec::new(vec![(0, false), (1, true), (1, false), (0, true)]);
        let closed = functional::wick_moment_closed(&spec);
        let (mc, se) = functional::mc_wick_moment(&ens, &spec, 1);
        Ok(Outcome::stat(mc, closed, (mc - closed).norm(), 5.0, se, 1e-8))
    }

    pub(super) fn wick_six_point(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(cfg.modes.clamp(2, 3));
        let ens = EnsembleConfig::new(&grid, cfg.samples, cfg.seed, EnsembleKind::GaussianSpectrum);
        let patterns: Vec<Vec<(usize, bool)>> = vec![
            vec![(0, false), (0, true), (0, false), (0, true), (0, false), (0, true)],
            vec![(0, false), (0, true), (1, false), (1, true), (0, false), (0, true)],
            vec![(1, false), (1, false), (1, true), (1, true), (0, false), (0, true)],
            vec![(0, false), (1, true), (1, false), (1, true), (1, false), (0, true)],
            // Odd and unbalanced patterns vanish identically.
            vec![(0, false), (0, true), (1, false)],
            vec![(0, false), (0, false), (1, true), (0, true), (1, false), (1, false)],
        ];
        let mut worst_ratio = 0.0f64;
        let mut worst = (C64::ZERO, C64::ZERO, 0.0, 0.0);
        for p in patterns {
            let spec = MomentSpec::new(p);
            let closed = functional::wick_moment_closed(&spec);
            let (mc, se) = functional::mc_wick_moment(&ens, &spec, 1);
            let err = (mc - closed).norm();
            let ratio = err / se.max(1e-8);
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst = (mc, closed, err, se);
            }
        }
        Ok(Outcome::stat(worst.0, worst.1, worst.2, 5.0, worst.3, 1e-8))
    }

    pub(super) fn sector_diagonal(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let space = FockSpace::new(&grid, cfg.cutoff.clamp(2, 4));
        let ens = EnsembleConfig::new(&grid, cfg.samples, cfg.seed, EnsembleKind::GaussianSpectrum);
        let mut worst_ratio = 0.0f64;
        let mut payload = (0.0f64, 0.0f64);
        for n in 0..=2usize {
            let res = functional::mc_sector_resolution(&space, &ens, n, n, 3.0, 1)?;
            let ratio = res.max_deviation / res.stderr_at_max.max(1e-8);
            if ratio >= worst_ratio {
                worst_ratio = ratio;
                payload = (res.max_deviation, res.stderr_at_max);
            }
        }
        Ok(Outcome::stat(payload.0, 0.0, payload.0, 3.0, payload.1, 1e-6))
    }

    pub(super) fn sector_off_diagonal(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(2);
        let space = FockSpace::new(&grid, cfg.cutoff.clamp(2, 4));
        let ens = EnsembleConfig::new(&grid, cfg.samples, cfg.seed, EnsembleKind::GaussianSpectrum);
        let mut worst_ratio = 0.0f64;
        let mut payload = (0.0f64, 0.0f64);
        for (m, n) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let res = functional::mc_sector_resolution(&space, &ens, m, n, 3.0, 1)?;
            let ratio = res.max_deviation / res.stderr_at_max.max(1e-8);
            if ratio >= worst_ratio {
                worst_ratio = ratio;
                payload = (res.max_deviation, res.stderr_at_max);
            }
        }
        Ok(Outcome::stat(payload.0, 0.0, payload.0, 3.0, payload.1, 1e-6))
    }

    pub(super) fn coherent_resolution_check(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let space = FockSpace::new(&grid, 12);
        let ens = EnsembleConfig::new(
            &grid,
            cfg.samples,
            cfg.seed,
            EnsembleKind::CoherentPlane { sigma2: 0.75 },
        );
        let est = functional::mc_coherent_resolution(&space, &ens, false, 1)?;
        let block = space.block_end(6);
        let mut worst = 0.0f64;
        let mut at = 0.0f64;
        for r in 0..block {
            for c in 0..block {
                let expect = if r == c { C64::ONE } else { C64::ZERO };
                let d = (est.entry(r, c) - expect).norm();
                if d > worst {
                    worst = d;
                    at = est.stderr_entry(r, c);
                }
            }
        }
        // The Poisson amplitudes are exact per sample, so the truncation
        // tail term of the bound is identically zero here.
        Ok(Outcome::stat(worst, 0.0, worst, 3.5, at, 1e-6))
    }

    pub(super) fn coherent_two_step(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let space = FockSpace::new(&grid, 10);
        let ens = EnsembleConfig::new(
            &grid,
            (cfg.samples / 2).max(1),
            cfg.seed ^ 0x25,
            EnsembleKind::CoherentPlane { sigma2: 0.75 },
        );
        let one = functional::mc_coherent_resolution(&space, &ens, false, 1)?;
        let two = functional::mc_coherent_resolution(&space, &ens, true, 1)?;
        let block = space.block_end(5);
        let mut worst = 0.0f64;
        let mut se_at = 0.0f64;
        for r in 0..block {
            for c in 0..block {
                let d = (one.entry(r, c) - two.entry(r, c)).norm();
                let se =
                    (one.stderr_entry(r, c).powi(2) + two.stderr_entry(r, c).powi(2)).sqrt();
                if d / se.max(1e-8) > worst / se_at.max(1e-8) {
                    worst = d;
                    se_at = se;
                }
            }
        }
        Ok(Outcome::stat(worst, 0.0, worst, 5.0, se_at, 1e-6))
    }

    pub(super) fn stq_resolution_q(cfg: &SuiteConfig) -> Result<Outcome> {
        let grid = ModeGrid::unit(1);
        let space = FockSpace::new(&grid, 8);
        // The delta-limit trend wants a small epsilon here: the residual
        // bias of the tempered measure scales with it, independent of the
        // suite's overlap-regularization knob.
        let res = functional::mc_stq_resolution(
            &space,
            &grid,
            StqKind::Q,
            1e-3,
            cfg.samples,
            cfg.seed ^ 0x51,
            4,
            1,
        )?;
        let mut o = Outcome::stat(
            res.post_fit_residual,
            0.0,
            res.post_fit_residual,
            3.0,
            res.stderr_at_max.max(res.max_stderr * 0.5),
            1e-6,
        );
        o.passed = o.passed && res.kappa > 0.0;
        o.expected = res.kappa.into();
        Ok(o)
    }

    pub(super) fn stq_resolution_p(cfg: &SuiteConfig) -> Result<Outcome> {
        // Same tempered ensemble on an independent stream; the p-kind
        // amplitudes carry i^n phases whose off-diagonal expectations vanish
        // like the q-kind ones.
        let grid = ModeGrid::unit(1);
        let space = FockSpace::new(&grid, 8);
        let res = functional::mc_stq_resolution(
            &space,
            &grid,
            StqKind::P,
            1e-3,
            cfg.samples,
            cfg.seed ^ 0x52,
            4,
            1,
        )?;
        let mut o = Outcome::stat(
            res.post_fit_residual,
            0.0,
            res.post_fit_residual,
            3.0,
            res.stderr_at_max.max(res.max_stderr * 0.5),
            1e-6,
        );
        o.passed = o.passed && res.kappa > 0.0;
        o.expected = res.kappa.into();
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in [
            Suite::Ccr,
            Suite::Fock,
            Suite::Coherent,
            Suite::Quadrature,
            Suite::Stq,
            Suite::Bch,
            Suite::Functional,
            Suite::All,
        ] {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("bogus").is_err());
    }

    #[test]
    fn registry_paper_refs_nonempty() {
        let defs = registry(Suite::All);
        assert!(defs.len() >= 40);
        for d in &defs {
            assert!(!d.paper_ref.is_empty(), "{}", d.name);
            assert!(!d.name.is_empty());
        }
        // Names unique.
        let mut names: Vec<&str> = defs.iter().map(|d| d.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), defs.len());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.modes = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.cutoff = 1;
        assert!(cfg.validate().is_err());
        assert!(SuiteConfig::new(Suite::All).validate().is_ok());
    }

    #[test]
    fn ccr_suite_runs_clean() {
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.cutoff = 6;
        cfg.canonical_time = true;
        let report = run_suite(&cfg).unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
        assert_eq!(report.suite, "ccr");
    }

    #[test]
    fn json_roundtrip_and_csv_shape() {
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.cutoff = 4;
        cfg.canonical_time = true;
        let report = run_suite(&cfg).unwrap();
        let json = report.to_json().unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.checks.len(), report.checks.len());
        assert_eq!(back.suite, report.suite);
        let csv = report.to_csv();
        let cols = csv.lines().next().unwrap().split(',').count();
        for line in csv.lines().skip(1) {
            // paper_ref is quoted and contains no commas inside quotes here;
            // enforce the fixed column count.
            assert_eq!(line.split(',').count(), cols, "{line}");
        }
    }

    #[test]
    fn reports_identical_across_worker_counts() {
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.cutoff = 5;
        cfg.canonical_time = true;
        cfg.workers = 1;
        let a = run_suite(&cfg).unwrap().to_json().unwrap();
        cfg.workers = 4;
        let b = run_suite(&cfg).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emit_report_never_overwrites() {
        let dir = std::env::temp_dir().join(format!("stquad-report-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut cfg = SuiteConfig::new(Suite::Ccr);
        cfg.cutoff = 4;
        cfg.canonical_time = true;
        let report = run_suite(&cfg).unwrap();
        let p1 = emit_report(&report, ReportFormat::Json, None, &dir).unwrap();
        let p2 = emit_report(&report, ReportFormat::Json, None, &dir).unwrap();
        assert_ne!(p1, p2);
        assert!(p1.exists() && p2.exists());
        let _ = std::fs::remove_dir_all(&dir);
    }
}

