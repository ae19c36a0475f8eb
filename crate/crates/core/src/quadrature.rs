//! Fixed-spectrum quadrature operators and their Hermite coefficient
//! machinery.
//!
//! The coefficient functions
//!
//! ```text
//! Theta_n(q) = pi^{-1/4} (2^n n!)^{-1/2} H_n(q) exp(-q^2/2)
//! Phi_n(p)   = i^n sqrt(2) pi^{1/4} (2^n n!)^{-1/2} H_n(p) exp(-p^2/2)
//! ```
//!
//! expand the quadrature eigenstates over fixed-spectrum Fock states. The
//! asymmetric 2-pi between the Theta and Phi normalizations is carried as
//! explicit constants and never mixed. High orders are evaluated through the
//! normalized recurrence `phi_n = H_n / sqrt(2^n n!)`, which stays O(1)
//! where raw Hermite values overflow.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{norm, FockSpace};
use crate::grid::SpectralVector;
use crate::sparse::SparseOperator;
use crate::{c64, C64};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    Q,
    P,
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}. Overflows around n ~ 150; use
/// [`hermite_normalized_seq`] beyond that.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// phi_n(x) = H_n(x) / sqrt(2^n n!) for n = 0..=n_max, by the stable
/// recurrence phi_{n+1} = x sqrt(2/(n+1)) phi_n - sqrt(n/(n+1)) phi_{n-1}.
pub fn hermite_normalized_seq(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(cur);
    for n in 0..n_max {
        let np1 = (n + 1) as f64;
        let next = x * (2.0 / np1).sqrt() * cur - (n as f64 / np1).sqrt() * prev;
        out.push(next);
        prev = cur;
        cur = next;
    }
    out
}

/// Theta_n(x) values for n = 0..=n_max.
pub fn theta_seq(n_max: usize, x: f64) -> Vec<f64> {
    let gauss = (-0.5 * x * x).exp() * PI.powf(-0.25);
    hermite_normalized_seq(n_max, x)
        .into_iter()
        .map(|p| p * gauss)
        .collect()
}

/// Phi_n(x) values for n = 0..=n_max (complex: i^n times a real function).
pub fn phi_seq(n_max: usize, x: f64) -> Vec<C64> {
    let gauss = (-0.5 * x * x).exp() * 2f64.sqrt() * PI.powf(0.25);
    let mut i_pow = C64::ONE;
    hermite_normalized_seq(n_max, x)
        .into_iter()
        .map(|p| {
            let v = i_pow * p * gauss;
            i_pow *= c64(0.0, 1.0);
            v
        })
        .collect()
}

/// Single coefficient function Theta_n or Phi_n.
pub fn quad_coeff(kind: QuadKind, n: usize, x: f64) -> C64 {
    match kind {
        QuadKind::Q => c64(theta_seq(n, x)[n], 0.0),
        QuadKind::P => phi_seq(n, x)[n],
    }
}

/// Table of coefficient-function values over an evaluation grid, the
/// plotting payload behind the CLI's CSV export.
#[derive(Debug, Clone)]
pub struct QuadCoeffTable {
    pub kind: QuadKind,
    pub max_order: usize,
    pub xs: Vec<f64>,
    /// `values[n][j]` = coefficient of order n at `xs[j]`.
    pub values: Vec<Vec<C64>>,
}

impl QuadCoeffTable {
    pub fn build(kind: QuadKind, max_order: usize, xs: Vec<f64>) -> Self {
        let values = (0..=max_order)
            .map(|n| xs.iter().map(|&x| quad_coeff(kind, n, x)).collect())
            .collect();
        QuadCoeffTable {
            kind,
            max_order,
            xs,
            values,
        }
    }
}

/// Gauss-Hermite nodes and weights for weight function exp(-x^2). Nodes are
/// the roots of H_n, found by bisection + Newton on the normalized
/// recurrence; weights are sqrt(pi) / (n phi_{n-1}(x_i)^2).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let phi = |x: f64| hermite_normalized_seq(n, x);
    // All roots lie within |x| < sqrt(2n + 1); scan for sign changes.
    let bound = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let steps = 40 * n;
    let mut roots = Vec::with_capacity(n);
    let mut x_prev = -bound;
    let mut f_prev = phi(x_prev)[n];
    for s in 1..=steps {
        let x = -bound + 2.0 * bound * s as f64 / steps as f64;
        let f = phi(x)[n];
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev.signum() != f.signum() {
            let (mut lo, mut hi) = (x_prev, x);
            let (mut flo, _fhi) = (f_prev, f);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fmid = phi(mid)[n];
                if fmid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo.signum() != fmid.signum() {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fmid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x_prev = x;
        f_prev = f;
    }
    debug_assert_eq!(roots.len(), n);
    let weights = roots
        .iter()
        .map(|&x| {
            let seq = phi(x);
            PI.sqrt() / (n as f64 * seq[n - 1] * seq[n - 1])
        })
        .collect();
    (roots, weights)
}

/// q_F = (a_F + a_F^dag)/sqrt(2) or p_F = -i (a_F - a_F^dag)/sqrt(2).
pub fn quad_operator(
    space: &Arc<FockSpace>,
    spectrum: &SpectralVector,
    kind: QuadKind,
) -> Result<SparseOperator> {
    let (a, adag) = space.smeared_ladder(spectrum)?;
    let s = 1.0 / 2f64.sqrt();
    Ok(match kind {
        QuadKind::Q => a.add(&adag).scale(c64(s, 0.0)),
        QuadKind::P => a.sub(&adag).scale(c64(0.0, -s)),
    })
}

/// Truncated fixed-spectrum quadrature state
/// Sum_{n <= N_max} coeff_n(x) |n_F>. Non-normalizable in the untruncated
/// limit; amplitudes are summed to the cutoff.
pub fn fs_quad_state(
    space: &Arc<FockSpace>,
    x: f64,
    spectrum: &SpectralVector,
    kind: QuadKind,
) -> Result<Vec<C64>> {
    spectrum.check_normalized(1e-12)?;
    let n_max = space.cutoff();
    let coeffs: Vec<C64> = match kind {
        QuadKind::Q => theta_seq(n_max, x).into_iter().map(|t| c64(t, 0.0)).collect(),
        QuadKind::P => phi_seq(n_max, x),
    };
    let mut out = vec![C64::ZERO; space.dim()];
    let mut fock_n = space.vacuum();
    for n in 0..=n_max {
        if n > 0 {
            fock_n = space.apply_smeared_creator(spectrum, &fock_n);
            let inv = 1.0 / (n as f64).sqrt();
            for a in &mut fock_n {
                *a *= inv;
            }
        }
        for (o, f) in out.iter_mut().zip(&fock_n) {
            *o += coeffs[n] * f;
        }
    }
    Ok(out)
}

/// Residuals of the eigenvalue relation for a truncated quadrature state.
#[derive(Debug, Clone, Copy)]
pub struct QuadEigenResidual {
    /// Relative residual of (op - x) |state> restricted to total occupation
    /// <= N_max - 1. The three-term coefficient recurrence makes this zero
    /// in exact arithmetic.
    pub block_residual: f64,
    /// Relative residual over the whole truncated space, i.e. including the
    /// top-sector leakage caused by the missing order-(N_max + 1)
    /// coefficient.
    pub full_residual: f64,
}

pub fn fs_quad_eigen_residual(
    space: &Arc<FockSpace>,
    x: f64,
    spectrum: &SpectralVector,
    kind: QuadKind,
) -> Result<QuadEigenResidual> {
    let state = fs_quad_state(space, x, spectrum, kind)?;
    let op = quad_operator(space, spectrum, kind)?;
    let mut resid = op.apply(&state);
    for (r, s) in resid.iter_mut().zip(&state) {
        *r -= x * s;
    }
    let cut = space.block_end(space.cutoff().saturating_sub(1));
    let block_norm: f64 = state[..cut].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let block_resid: f64 = resid[..cut].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(QuadEigenResidual {
        block_residual: block_resid / block_norm.max(1e-300),
        full_residual: norm(&resid) / norm(&state).max(1e-300),
    })
}

/// Mehler kernel Sum_n rho^n H_n(x) H_n(y) / (2^n n!) in closed form.
pub fn mehler_kernel(rho: f64, x: f64, y: f64) -> Result<f64> {
    if rho.abs() >= 1.0 {
        return Err(Error::MuOutOfRange { mu: rho.abs() });
    }
    let d = 1.0 - rho * rho;
    Ok((1.0 / d.sqrt()) * ((2.0 * rho * x * y - (x * x + y * y) * rho * rho) / d).exp())
}

/// Partial sum of the Mehler series through order `n_terms`, the independent
/// oracle for the closed form. Uses the normalized recurrence so large
/// orders stay finite.
pub fn mehler_partial_sum(rho: f64, x: f64, y: f64, n_terms: usize) -> f64 {
    let px = hermite_normalized_seq(n_terms, x);
    let py = hermite_normalized_seq(n_terms, y);
    let mut acc = 0.0;
    let mut rho_n = 1.0;
    for n in 0..=n_terms {
        acc += rho_n * px[n] * py[n];
        rho_n *= rho;
    }
    acc
}

/// Closed form for <q_F | q'_G> with mu = <F, G> real, |mu| < 1.
pub fn fs_quad_overlap_closed(
    q: f64,
    f: &SpectralVector,
    q2: f64,
    g: &SpectralVector,
) -> Result<f64> {
    f.check_normalized(1e-12)?;
    g.check_normalized(1e-12)?;
    let mu_c = f.inner(g)?;
    if mu_c.im.abs() > 1e-12 {
        return Err(Error::ComplexMu { imag: mu_c.im });
    }
    let mu = mu_c.re;
    if mu.abs() >= 1.0 {
        return Err(Error::MuOutOfRange { mu: mu.abs() });
    }
    let d = 1.0 - mu * mu;
    let diff = q - q2;
    Ok((PI * d).powf(-0.5)
        * (-mu * diff * diff / d).exp()
        * (-(1.0 - mu) * (q * q + q2 * q2) / (2.0 * (1.0 + mu))).exp())
}

/// Concentration diagnostics of the coefficient-completeness partial sums
/// S_N(q, x) = Sum_{n <= N} Theta_n(q) Theta_n(x), which form a delta
/// family in x as N grows.
#[derive(Debug, Clone, Copy)]
pub struct DeltaFamilyDiagnostics {
    pub order: usize,
    /// |Integral S_N(q, x) dx - 1|.
    pub mass_error: f64,
    /// Second moment of S_N over the window |x - q| <= 2. The unwindowed
    /// second moment does not converge: the kernel's far oscillating tails
    /// carry weight under an (x - q)^2 factor.
    pub window_spread: f64,
}

/// Evaluates mass and windowed spread of the partial-sum kernel at each
/// requested order (trapezoid over |x| <= 14).
pub fn delta_family_diagnostics(q: f64, orders: &[usize]) -> Vec<DeltaFamilyDiagnostics> {
    orders
        .iter()
        .map(|&n| {
            let tq = theta_seq(n, q);
            let half = 14.0;
            let steps = 8000usize;
            let dx = 2.0 * half / steps as f64;
            let mut mass = 0.0;
            let mut window_spread = 0.0;
            for j in 0..=steps {
                let x = -half + dx * j as f64;
                let w = if j == 0 || j == steps { 0.5 } else { 1.0 } * dx;
                let tx = theta_seq(n, x);
                let s: f64 = (0..=n).map(|k| tq[k] * tx[k]).sum();
                mass += w * s;
                if (x - q).abs() <= 2.0 {
                    window_spread += w * (x - q) * (x - q) * s;
                }
            }
            DeltaFamilyDiagnostics {
                order: n,
                mass_error: (mass - 1.0).abs(),
                window_spread,
            }
        })
        .collect()
}

/// Diagnostics reported alongside the numeric subspace projector.
#[derive(Debug, Clone, Copy)]
pub struct ProjectorDiagnostics {
    /// Max |entry| of P - Sum_{n <= N_max} |n_F><n_F|.
    pub deviation_from_sum: f64,
    /// Max |entry| of P^2 - P.
    pub idempotency_error: f64,
    pub trace: f64,
}

/// Numeric quadrature of |q_F><q_F| dq over [-half_width, half_width] with
/// the given step (trapezoid). Approximates the projector onto the
/// fixed-spectrum subspace Sum_{n <= N_max} |n_F><n_F|.
pub fn subspace_projector(
    space: &Arc<FockSpace>,
    spectrum: &SpectralVector,
    half_width: f64,
    step: f64,
) -> Result<(SparseOperator, ProjectorDiagnostics)> {
    spectrum.check_normalized(1e-12)?;
    let n_max = space.cutoff();
    // The integrand's slowest-decaying factor is Theta_{N_max}^2; require its
    // boundary value to be negligible.
    let tail = theta_seq(n_max, half_width)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    if tail > 1e-9 {
        return Err(Error::QuadratureGridTooNarrow {
            tail,
            bound: 1e-9,
        });
    }
    let steps = (2.0 * half_width / step).ceil() as usize;
    let dim = space.dim();
    let mut dense = vec![C64::ZERO; dim * dim];
    for j in 0..=steps {
        let x = -half_width + 2.0 * half_width * j as f64 / steps as f64;
        let w = if j == 0 || j == steps { 0.5 } else { 1.0 } * (2.0 * half_width / steps as f64);
        let state = fs_quad_state(space, x, spectrum, QuadKind::Q)?;
        for (r, sr) in state.iter().enumerate() {
            if sr.norm_sqr() < 1e-60 {
                continue;
            }
            let row = &mut dense[r * dim..(r + 1) * dim];
            for (c, sc) in state.iter().enumerate() {
                row[c] += w * sr * sc.conj();
            }
        }
    }
    let mut triplets = Vec::new();
    for r in 0..dim {
        for c in 0..dim {
            let v = dense[r * dim + c];
            if v.norm() > 1e-15 {
                triplets.push((r, c, v));
            }
        }
    }
    let p = SparseOperator::from_triplets(dim, triplets);

    let mut sum_proj = vec![C64::ZERO; dim * dim];
    let mut fock_n = space.vacuum();
    for n in 0..=n_max {
        if n > 0 {
            fock_n = space.apply_smeared_creator(spectrum, &fock_n);
            let inv = 1.0 / (n as f64).sqrt();
            for a in &mut fock_n {
                *a *= inv;
            }
        }
        for (r, fr) in fock_n.iter().enumerate() {
            if fr.norm_sqr() < 1e-60 {
                continue;
            }
            for (c, fc) in fock_n.iter().enumerate() {
                sum_proj[r * dim + c] += fr * fc.conj();
            }
        }
    }
    let mut deviation = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            deviation = deviation.max((p.entry(r, c) - sum_proj[r * dim + c]).norm());
        }
    }
    let idem = p.matmul(&p).sub(&p).max_abs();
    let diag = ProjectorDiagnostics {
        deviation_from_sum: deviation,
        idempotency_error: idem,
        trace: p.trace().re,
    };
    Ok((p, diag))
}
