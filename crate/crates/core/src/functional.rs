//! Monte-Carlo realization of the functional integrals over spectra.
//!
//! The Gaussian measure over folded spectra is fixed by its second moments,
//! E[F_i conj(F_j)] = delta_ij and E[F_i F_j] = 0; higher moments factorize
//! into pairings (Isserlis). Ensembles are generated by counter-based
//! streams: every sample index owns a ChaCha stream keyed by (seed, index),
//! so the sample set is independent of worker count and scheduling, and
//! chunked in-order accumulation keeps every estimate bit-identical across
//! worker counts.
//!
//! Three resolution-of-identity families are estimated: fixed-spectrum Fock
//! sectors (E[|n_F><n_F|]/n! converges to the n-particle projector; the n!
//! is the pairing count of the symmetric tensor power), coherent states
//! (importance-sampled flat measure, exact in expectation entrywise), and
//! regularized quadrature eigenstates, where the flat measure over
//! eigenvalue vectors is tempered to a Gaussian of variance (1-eps)/eps
//! matched to the regularization so the expected operator is diagonal with
//! a single fitted proportionality constant.

use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::grid::{ModeGrid, SpectralVector};
use crate::par;
use crate::{c64, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleKind {
    /// I.i.d. complex standard normal per folded coordinate.
    GaussianSpectrum,
    /// Gaussian direction renormalized to the unit shell.
    SphereSpectrum,
    /// Complex Gaussian amplitude vectors of per-mode variance sigma2.
    CoherentPlane { sigma2: f64 },
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub grid: Arc<ModeGrid>,
    pub sample_count: usize,
    pub seed: u64,
    pub kind: EnsembleKind,
}

impl EnsembleConfig {
    pub fn new(grid: &Arc<ModeGrid>, sample_count: usize, seed: u64, kind: EnsembleKind) -> Self {
        EnsembleConfig {
            grid: Arc::clone(grid),
            sample_count,
            seed,
            kind,
        }
    }
}

/// Stream for one sample: one ChaCha8 stream per index under a common seed.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
}

/// Standard-normal pair by Box-Muller.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// One complex coordinate with E|z|^2 = 1, E z^2 = 0.
fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let (a, b) = normal_pair(rng);
    c64(a, b) * (0.5f64).sqrt()
}

fn raw_gaussian_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    (0..m).map(|_| complex_normal(rng)).collect()
}

/// Draws the sample with the given index; deterministic in (seed, index).
pub fn sample_spectrum(cfg: &EnsembleConfig, index: usize) -> Result<SpectralVector> {
    if index >= cfg.sample_count {
        return Err(Error::SampleOutOfRange {
            index,
            count: cfg.sample_count,
        });
    }
    let mut rng = sample_rng(cfg.seed, index);
    let m = cfg.grid.len();
    let coeffs = match cfg.kind {
        EnsembleKind::GaussianSpectrum => raw_gaussian_vector(&mut rng, m),
        EnsembleKind::SphereSpectrum => {
            let v = raw_gaussian_vector(&mut rng, m);
            let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / n).collect()
        }
        EnsembleKind::CoherentPlane { sigma2 } => {
            let s = sigma2.sqrt();
            raw_gaussian_vector(&mut rng, m)
                .into_iter()
                .map(|c| c * s)
                .collect()
        }
    };
    SpectralVector::from_folded(&cfg.grid, coeffs)
}

/// Which F and conj(F) factors appear in a moment.
#[derive(Debug, Clone)]
pub struct MomentSpec {
    pub factors: Vec<(usize, bool)>,
}

impl MomentSpec {
    pub fn new(factors: Vec<(usize, bool)>) -> Self {
        MomentSpec { factors }
    }
}

/// Isserlis pairing sum in folded coordinates: each unconjugated factor must
/// pair with a conjugated one on the same mode; the value is the number of
/// complete matchings. Unequal counts give exactly zero.
pub fn wick_moment_closed(spec: &MomentSpec) -> C64 {
    let plain: Vec<usize> = spec
        .factors
        .iter()
        .filter(|(_, c)| !*c)
        .map(|(m, _)| *m)
        .collect();
    let conj: Vec<usize> = spec
        .factors
        .iter()
        .filter(|(_, c)| *c)
        .map(|(m, _)| *m)
        .collect();
    if plain.len() != conj.len() {
        return C64::ZERO;
    }
    let n = plain.len();
    let mut used = vec![false; n];
    fn count(plain: &[usize], conj: &[usize], used: &mut [bool], i: usize) -> u64 {
        if i == plain.len() {
            return 1;
        }
        let mut total = 0;
        for j in 0..conj.len() {
            if !used[j] && plain[i] == conj[j] {
                used[j] = true;
                total += count(plain, conj, used, i + 1);
                used[j] = false;
            }
        }
        total
    }
    c64(count(&plain, &conj, &mut used, 0) as f64, 0.0)
}

fn moment_of_sample(spec: &MomentSpec, f: &SpectralVector) -> C64 {
    spec.factors.iter().fold(C64::ONE, |acc, &(mode, conj)| {
        let v = f.coeffs()[mode];
        acc * if conj { v.conj() } else { v }
    })
}

/// Monte-Carlo estimate of a moment with its standard error.
pub fn mc_wick_moment(cfg: &EnsembleConfig, spec: &MomentSpec, workers: usize) -> (C64, f64) {
    let partial = par::chunked_fold(
        cfg.sample_count,
        workers,
        |range| {
            let mut sum = C64::ZERO;
            let mut sumsq = 0.0f64;
            for i in range {
                let f = sample_spectrum(cfg, i).expect("index in range");
                let v = moment_of_sample(spec, &f);
                sum += v;
                sumsq += v.norm_sqr();
            }
            (sum, sumsq)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    )
    .unwrap_or((C64::ZERO, 0.0));
    let n = cfg.sample_count as f64;
    let mean = partial.0 / n;
    let var = (partial.1 / n - mean.norm_sqr()).max(0.0);
    (mean, (var / n).sqrt())
}

/// A Monte-Carlo matrix estimate with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct OperatorEstimate {
    pub rows: usize,
    pub cols: usize,
    pub mean: Vec<C64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
}

impl OperatorEstimate {
    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.mean[r * self.cols + c]
    }

    pub fn stderr_entry(&self, r: usize, c: usize) -> f64 {
        self.stderr[r * self.cols + c]
    }

    /// Max |mean - expected| over all entries, and the stderr at the
    /// maximizing entry.
    pub fn max_deviation_from(&self, expected: impl Fn(usize, usize) -> C64) -> (f64, f64) {
        let mut worst = 0.0f64;
        let mut at = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = (self.entry(r, c) - expected(r, c)).norm();
                if d > worst {
                    worst = d;
                    at = self.stderr_entry(r, c);
                }
            }
        }
        (worst, at)
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().copied().fold(0.0, f64::max)
    }
}

fn accumulate_outer<FS>(
    rows: usize,
    cols: usize,
    samples: usize,
    workers: usize,
    per_sample: FS,
) -> OperatorEstimate
where
    FS: Fn(usize) -> (Vec<C64>, Vec<C64>, f64) + Sync + Send,
{
    // per_sample returns (left amplitudes, right amplitudes, weight); the
    // accumulated entry is w * left_r * conj(right_c).
    let size = rows * cols;
    let partial = par::chunked_fold(
        samples,
        workers,
        |range| {
            let mut sum = vec![C64::ZERO; size];
            let mut sumsq = vec![0.0f64; size];
            for i in range {
                let (left, right, w) = per_sample(i);
                for r in 0..rows {
                    let lw = left[r] * w;
                    if lw == C64::ZERO {
                        continue;
                    }
                    let row = &mut sum[r * cols..(r + 1) * cols];
                    let rowsq = &mut sumsq[r * cols..(r + 1) * cols];
                    for c in 0..cols {
                        let v = lw * right[c].conj();
                        row[c] += v;
                        rowsq[c] += v.norm_sqr();
                    }
                }
            }
            (sum, sumsq)
        },
        |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(&b.0) {
                *x += y;
            }
            for (x, y) in a.1.iter_mut().zip(&b.1) {
                *x += y;
            }
            a
        },
    )
    .unwrap_or((vec![C64::ZERO; size], vec![0.0; size]));
    let n = samples as f64;
    let mean: Vec<C64> = partial.0.iter().map(|s| s / n).collect();
    let stderr = partial
        .1
        .iter()
        .zip(&mean)
        .map(|(&sq, m)| ((sq / n - m.norm_sqr()).max(0.0) / n).sqrt())
        .collect();
    OperatorEstimate {
        rows,
        cols,
        mean,
        stderr,
        samples,
    }
}

/// Amplitudes of |n_F> on the occupation sector n for an arbitrary folded
/// vector F: sqrt(n!) prod_i F_i^{nu_i} / sqrt(nu_i!).
pub fn sector_amplitudes(space: &FockSpace, f: &[C64], n: usize) -> Vec<C64> {
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
    }
    space
        .sector(n)
        .map(|idx| {
            let occ = space.occupation(idx);
            let mut v = c64(fact.sqrt(), 0.0);
            for (i, &ni) in occ.iter().enumerate() {
                let mut of = 1.0;
                for k in 1..=ni {
                    of *= k as f64;
                }
                v *= f[i].powu(ni) / of.sqrt();
            }
            v
        })
        .collect()
}

/// Report of a sector resolution estimate E[|m_F><n_F|] / sqrt(m! n!)
/// against delta_mn times the sector projector.
#[derive(Debug, Clone)]
pub struct SectorResolution {
    pub m: usize,
    pub n: usize,
    pub estimate: OperatorEstimate,
    pub max_deviation: f64,
    pub stderr_at_max: f64,
    pub max_stderr: f64,
    pub passed: bool,
}

/// Estimates the (m, n) sector block of the Gaussian-measure resolution of
/// identity. The diagonal case converges to the m-particle projector; the
/// normalization 1/sqrt(m! n!) absorbs the pairing count of the symmetric
/// tensor power.
pub fn mc_sector_resolution(
    space: &Arc<FockSpace>,
    cfg: &EnsembleConfig,
    m: usize,
    n: usize,
    sigma_factor: f64,
    workers: usize,
) -> Result<SectorResolution> {
    if m > space.cutoff() || n > space.cutoff() {
        return Err(Error::CutoffExceeded {
            n: m.max(n),
            cutoff: space.cutoff(),
        });
    }
    let rows = space.sector(m).len();
    let cols = space.sector(n).len();
    let mut norm = 1.0f64;
    for k in 1..=m {
        norm *= (k as f64).sqrt();
    }
    for k in 1..=n {
        norm *= (k as f64).sqrt();
    }
    let est = accumulate_outer(rows, cols, cfg.sample_count, workers, |i| {
        let f = sample_spectrum(cfg, i).expect("index in range");
        let left = sector_amplitudes(space, f.coeffs(), m);
        let right = sector_amplitudes(space, f.coeffs(), n);
        (left, right, 1.0 / norm)
    });
    let expected = |r: usize, c: usize| {
        if m == n && r == c {
            C64::ONE
        } else {
            C64::ZERO
        }
    };
    let (max_dev, stderr_at_max) = est.max_deviation_from(expected);
    let max_stderr = est.max_stderr();
    let passed = max_dev <= sigma_factor * stderr_at_max.max(max_stderr * 1e-3);
    Ok(SectorResolution {
        m,
        n,
        estimate: est,
        max_deviation: max_dev,
        stderr_at_max,
        max_stderr,
        passed,
    })
}

/// Coherent-state resolution estimate by Gaussian importance sampling of the
/// flat measure: pi^{-M} Int |alpha><alpha| d^{2M}alpha = E_p[w |alpha><alpha|]
/// with w = sigma^{2M} exp(|alpha|^2 / sigma^2). Entries with occupations
/// inside the cutoff are estimated without truncation bias because the
/// Poisson amplitudes are exact per sample.
pub fn mc_coherent_resolution(
    space: &Arc<FockSpace>,
    cfg: &EnsembleConfig,
    two_step: bool,
    workers: usize,
) -> Result<OperatorEstimate> {
    let sigma2 = match cfg.kind {
        EnsembleKind::CoherentPlane { sigma2 } => sigma2,
        _ => {
            return Err(Error::InvalidConfig(
                "coherent resolution needs the coherent-plane ensemble".into(),
            ))
        }
    };
    if sigma2 <= 0.5 {
        return Err(Error::InvalidConfig(format!(
            "importance variance sigma2 = {sigma2} must exceed 1/2 for finite estimator variance"
        )));
    }
    let m = space.modes();
    let dim = space.dim();
    let est = accumulate_outer(dim, dim, cfg.sample_count, workers, |i| {
        let alpha = if two_step {
            // Radial times spherical: |alpha|^2 = sigma2 * sum of M unit
            // exponentials, direction uniform on the unit shell. Same law as
            // the i.i.d. Gaussian vector, different stream layout.
            let mut rng = sample_rng(cfg.seed, i);
            let dir = {
                let v = raw_gaussian_vector(&mut rng, m);
                let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                v.into_iter().map(|c| c / n).collect::<Vec<_>>()
            };
            let mut r2 = 0.0;
            for _ in 0..m {
                r2 -= sigma2 * uniform_open01(&mut rng).ln();
            }
            dir.into_iter().map(|c| c * r2.sqrt()).collect::<Vec<_>>()
        } else {
            sample_spectrum(cfg, i).expect("index in range").coeffs().to_vec()
        };
        let a2: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
        let w = sigma2.powi(m as i32) * (a2 / sigma2).exp();
        // Exact multimode Poisson amplitudes.
        let gauss = (-a2 / 2.0).exp();
        let amps: Vec<C64> = (0..dim)
            .map(|idx| {
                let occ = space.occupation(idx);
                let mut v = c64(gauss, 0.0);
                for (j, &nj) in occ.iter().enumerate() {
                    let mut of = 1.0;
                    for k in 1..=nj {
                        of *= k as f64;
                    }
                    v *= alpha[j].powu(nj) / of.sqrt();
                }
                v
            })
            .collect();
        (amps.clone(), amps, w)
    });
    Ok(est)
}

/// Result of the regularized quadrature-eigenstate resolution with its
/// fitted proportionality constant.
#[derive(Debug, Clone)]
pub struct StqResolution {
    pub epsilon: f64,
    pub kappa: f64,
    /// Max |entry - kappa delta| over the measured block after the fit.
    pub post_fit_residual: f64,
    pub stderr_at_max: f64,
    pub max_stderr: f64,
    pub block_dim: usize,
}

/// Estimates `Int |q><q| D[q]` over the tempered flat measure: folded
/// eigenvalue coordinates drawn from N(0, (1-eps)/eps) per mode, which is
/// the Gaussian matched to the regularized state so the expected operator
/// is exactly diagonal, approaching the flat measure as eps -> 0. The block
/// of total occupation <= block_order is measured; kappa is the
/// least-squares fit of the diagonal to the identity.
#[allow(clippy::too_many_arguments)]
pub fn mc_stq_resolution(
    space: &Arc<FockSpace>,
    grid: &Arc<ModeGrid>,
    kind: crate::stq::StqKind,
    epsilon: f64,
    samples: usize,
    seed: u64,
    block_order: usize,
    workers: usize,
) -> Result<StqResolution> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange { epsilon });
    }
    if block_order > space.cutoff() {
        return Err(Error::CutoffExceeded {
            n: block_order,
            cutoff: space.cutoff(),
        });
    }
    let m = grid.len();
    let sigma_q = ((1.0 - epsilon) / epsilon).sqrt().max(1e-8);
    let block = space.block_end(block_order);
    let a_scale = (1.0 - epsilon / 2.0).sqrt();
    let tau = (1.0 - epsilon).sqrt();
    let mode_pref = (2.0 - epsilon).powf(0.25);
    let n_max = block_order;
    let est = accumulate_outer(block, block, samples, workers, |i| {
        let mut rng = sample_rng(seed, i);
        let qs: Vec<f64> = (0..m)
            .map(|_| {
                let (z, _) = normal_pair(&mut rng);
                sigma_q * z
            })
            .collect();
        // Per-mode amplitude tables c_n(q_j) for n <= block_order; the
        // p-kind eigenstates carry an extra i^n per order.
        let phase = match kind {
            crate::stq::StqKind::Q => C64::ONE,
            crate::stq::StqKind::P => c64(0.0, 1.0),
        };
        let tables: Vec<Vec<C64>> = qs
            .iter()
            .map(|&q| {
                let phis = crate::quadrature::hermite_normalized_seq(n_max, a_scale * q / tau.max(1e-12));
                let gauss = mode_pref * (-q * q / 2.0).exp();
                let mut tn = C64::ONE;
                phis.iter()
                    .map(|&p| {
                        let v = tn * (gauss * p);
                        tn *= tau * phase;
                        v
                    })
                    .collect()
            })
            .collect();
        let amps: Vec<C64> = (0..block)
            .map(|idx| {
                let occ = space.occupation(idx);
                let mut v = C64::ONE;
                for (j, &nj) in occ.iter().enumerate() {
                    v *= tables[j][nj as usize];
                }
                v
            })
            .collect();
        (amps.clone(), amps, 1.0)
    });
    // Least-squares fit of a single kappa over the diagonal.
    let kappa = (0..block).map(|i| est.entry(i, i).re).sum::<f64>() / block as f64;
    let mut worst = 0.0f64;
    let mut at = 0.0f64;
    for r in 0..block {
        for c in 0..block {
            let target = if r == c { c64(kappa, 0.0) } else { C64::ZERO };
            let d = (est.entry(r, c) - target).norm();
            if d > worst {
                worst = d;
                at = est.stderr_entry(r, c);
            }
        }
    }
    Ok(StqResolution {
        epsilon,
        kappa,
        post_fit_residual: worst,
        stderr_at_max: at,
        max_stderr: est.max_stderr(),
        block_dim: block,
    })
}
