//! Spatio-temporal quadrature eigenstates.
//!
//! A q-kind eigenstate with folded eigenvalue vector (q_0..q_{M-1}) is
//! generated from the vacuum by an exponential of pure creation operators,
//!
//! ```text
//! |q> = V0 exp(a_Q^dag - a_R^dag) |vac>,   a_Q^dag = sqrt(2) Sum_i q_i b_i^dag,
//!                                           a_R^dag = (1/2)  Sum_i (b_i^dag)^2,
//! ```
//!
//! with V0 = 2^{Omega/2} exp(-||q||^2/2) and Omega = M/2. The generator
//! raises total occupation, so its series terminates exactly at the cutoff.
//! The p-kind state uses `exp(i a_P^dag + a_R^dag)` with W0 of the same
//! shape.
//!
//! Same-kind overlaps are delta families and exist only under an epsilon
//! regularization. One knob controls it: at regularization epsilon in
//! (0, 1] the q-kind generator is
//!
//! ```text
//! exp( sqrt(1 - eps/2) a_Q^dag - (1 - eps) a_R^dag )
//! ```
//!
//! with prefactor (2 - eps)^{Omega/2} exp(-||q||^2/2). This width
//! bookkeeping makes the regularized overlap closed form exact at every
//! epsilon, not only asymptotically:
//!
//! ```text
//! <q|q'> = eps^{-Omega} exp( -(||q||^2 + ||q'||^2 - 2 q.q') / (2 eps) ),
//! ```
//!
//! and the epsilon -> 0 limit restores the exact generator above.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coherent::CoherentSpec;
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::grid::RealSpectralVector;
use crate::sparse::SparseOperator;
use crate::{c64, C64};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StqKind {
    Q,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// The exact-limit generator; the state is non-normalizable in the
    /// untruncated space and same-kind overlaps are refused.
    Exact,
    /// Width parameter of the delta family, in (0, 1].
    Eps(f64),
}

/// Overall constant convention. `Paper` keeps V0 = 2^{Omega/2} e^{-q^2/2};
/// `DeltaNormalized` multiplies an extra (2 pi)^{-1/4} per mode, which turns
/// the single-mode q-states into conventionally delta-normalized position
/// eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Paper,
    DeltaNormalized,
}

#[derive(Debug, Clone)]
pub struct StqSpec {
    pub kind: StqKind,
    pub eigenvalue: RealSpectralVector,
    pub regularization: Regularization,
    pub normalization: Normalization,
}

impl StqSpec {
    pub fn new(
        kind: StqKind,
        eigenvalue: RealSpectralVector,
        regularization: Regularization,
        normalization: Normalization,
    ) -> Result<Self> {
        if let Regularization::Eps(e) = regularization {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::EpsilonOutOfRange { epsilon: e });
            }
        }
        Ok(StqSpec {
            kind,
            eigenvalue,
            regularization,
            normalization,
        })
    }

    pub fn exact(kind: StqKind, eigenvalue: RealSpectralVector) -> Self {
        StqSpec {
            kind,
            eigenvalue,
            regularization: Regularization::Exact,
            normalization: Normalization::Paper,
        }
    }

    /// ||eigenvalue||^2.
    pub fn magnitude_sq(&self) -> f64 {
        self.eigenvalue.norm2()
    }

    fn norm_factor(&self) -> f64 {
        let m = self.eigenvalue.len() as f64;
        match self.normalization {
            Normalization::Paper => 1.0,
            Normalization::DeltaNormalized => TWO_PI.powf(-m / 4.0),
        }
    }

    /// (prefactor, a-scale, signed R coefficient) of the generating
    /// exponential.
    fn generator_constants(&self) -> (f64, f64, f64) {
        let omega = self.eigenvalue.grid().zero_point_constant();
        let x2 = self.magnitude_sq();
        let r_sign = match self.kind {
            StqKind::Q => -1.0,
            StqKind::P => 1.0,
        };
        let (base, a_scale, r_mag) = match self.regularization {
            Regularization::Exact => (2.0f64, 1.0, 1.0),
            Regularization::Eps(e) => (2.0 - e, (1.0 - e / 2.0).sqrt(), 1.0 - e),
        };
        let prefactor = base.powf(omega / 2.0) * (-x2 / 2.0).exp() * self.norm_factor();
        (prefactor, a_scale, r_sign * r_mag)
    }
}

/// Annihilator smeared with a real eigenvalue vector: sqrt(2) Sum_i v_i b_i.
pub fn op_a_v(space: &Arc<FockSpace>, v: &RealSpectralVector) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zero(space.dim());
    for (i, &vi) in v.coeffs().iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        let b = space.annihilator(i)?;
        acc = acc.add(&b.scale(c64(2f64.sqrt() * vi, 0.0)));
    }
    Ok(acc)
}

/// a_R = (1/2) Sum_i b_i^2.
pub fn op_a_r(space: &Arc<FockSpace>) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zero(space.dim());
    for i in 0..space.modes() {
        let b = space.annihilator(i)?;
        acc = acc.add(&b.matmul(&b).scale(c64(0.5, 0.0)));
    }
    Ok(acc)
}

/// Symmetrized number operator s = n + Omega, diagonal; Omega = M/2 is the
/// regularized zero-point constant of the grid.
pub fn op_s(space: &Arc<FockSpace>) -> SparseOperator {
    let omega = space.grid().zero_point_constant();
    let shift = SparseOperator::identity(space.dim()).scale(c64(omega, 0.0));
    space.number_operator().add(&shift)
}

/// Applies exp(T) to a vector by the plain series. For graded-raising T the
/// series terminates exactly; the loop stops at the first vanishing term.
pub fn exp_series_apply(op: &SparseOperator, v: &[C64]) -> Vec<C64> {
    let mut sum = v.to_vec();
    let mut term = v.to_vec();
    for k in 1..=(op.dim() + 4) {
        term = op.apply(&term);
        let inv = 1.0 / k as f64;
        let mut nonzero = false;
        for t in &mut term {
            *t *= inv;
            nonzero |= *t != C64::ZERO;
        }
        if !nonzero {
            break;
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    sum
}

/// Builds the (possibly regularized) eigenstate in the truncated space.
pub fn stq_state(space: &Arc<FockSpace>, spec: &StqSpec) -> Result<Vec<C64>> {
    space.check_grid(spec.eigenvalue.grid())?;
    let (prefactor, a_scale, r_coeff) = spec.generator_constants();
    let a_dag = op_a_v(space, &spec.eigenvalue)?.adjoint();
    let r_dag = op_a_r(space)?.adjoint();
    let a_coeff = match spec.kind {
        StqKind::Q => c64(a_scale, 0.0),
        StqKind::P => c64(0.0, a_scale),
    };
    let generator = a_dag.scale(a_coeff).add(&r_dag.scale(c64(r_coeff, 0.0)));
    let mut state = exp_series_apply(&generator, &space.vacuum());
    for a in &mut state {
        *a *= prefactor;
    }
    Ok(state)
}

/// exp(a_R^dag) |vac>, the "anti-vacuum" exponential: annihilators act on it
/// the way creators act on the vacuum.
pub fn anti_vacuum(space: &Arc<FockSpace>) -> Result<Vec<C64>> {
    let r_dag = op_a_r(space)?.adjoint();
    Ok(exp_series_apply(&r_dag, &space.vacuum()))
}

/// Order-by-order solution of the eigenvalue equation, independent of the
/// exponential construction. The symmetric coefficient tensors satisfy
///
/// ```text
/// V(mu) = sqrt(2) q_i V(mu - e_i) - (mu_i - 1) V(mu - 2 e_i)
/// ```
///
/// for any mode i occupied in mu, starting from V0; occupation amplitudes
/// are V(mu) / sqrt(prod mu_l!).
pub fn coeff_recursion_oracle(
    space: &Arc<FockSpace>,
    eigenvalue: &RealSpectralVector,
    max_order: usize,
) -> Result<Vec<C64>> {
    if max_order > space.cutoff() {
        return Err(Error::CutoffExceeded {
            n: max_order,
            cutoff: space.cutoff(),
        });
    }
    space.check_grid(eigenvalue.grid())?;
    let omega = space.grid().zero_point_constant();
    let v0 = 2f64.powf(omega / 2.0) * (-eigenvalue.norm2() / 2.0).exp();
    let q = eigenvalue.coeffs();
    let mut tensor: HashMap<Vec<u32>, f64> = HashMap::new();
    tensor.insert(vec![0u32; space.modes()], v0);
    let mut amps = vec![C64::ZERO; space.dim()];
    amps[0] = c64(v0, 0.0);
    for order in 1..=max_order {
        for idx in space.sector(order) {
            let occ = space.occupation(idx).to_vec();
            let i = occ.iter().position(|&n| n > 0).expect("nonzero sector");
            let mut lowered = occ.clone();
            lowered[i] -= 1;
            let mut value = 2f64.sqrt() * q[i] * tensor[&lowered];
            if occ[i] >= 2 {
                let mut lowered2 = occ.clone();
                lowered2[i] -= 2;
                value -= (occ[i] - 1) as f64 * tensor[&lowered2];
            }
            let mut fact = 1.0;
            for &n in &occ {
                for k in 1..=n {
                    fact *= k as f64;
                }
            }
            amps[idx] = c64(value / fact.sqrt(), 0.0);
            tensor.insert(occ, value);
        }
    }
    Ok(amps)
}

/// Relative residual of the eigenvalue relation (quad_op_i - lambda_i)|state>
/// restricted to total occupation <= N_max - 2. The relation is exact there;
/// only the top two graded sectors carry truncation leakage.
pub fn eigen_residual(space: &Arc<FockSpace>, spec: &StqSpec, mode: usize) -> Result<f64> {
    if mode >= space.modes() {
        return Err(Error::ModeOutOfRange {
            index: mode,
            modes: space.modes(),
        });
    }
    if spec.regularization != Regularization::Exact {
        return Err(Error::IncompatibleSpecs {
            context: "eigen residual is defined for the exact-limit state",
        });
    }
    let state = stq_state(space, spec)?;
    let (b, bdag) = space.ladder(mode)?;
    let s = 1.0 / 2f64.sqrt();
    let quad = match spec.kind {
        StqKind::Q => b.add(&bdag).scale(c64(s, 0.0)),
        StqKind::P => b.sub(&bdag).scale(c64(0.0, -s)),
    };
    let lambda = spec.eigenvalue.coeffs()[mode];
    let mut resid = quad.apply(&state);
    for (r, st) in resid.iter_mut().zip(&state) {
        *r -= lambda * st;
    }
    let cut = space.block_end(space.cutoff().saturating_sub(2));
    let rn: f64 = resid[..cut].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let sn: f64 = state[..cut].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    Ok(rn / sn.max(1e-300))
}

/// Closed-form overlaps among eigenstates.
///
/// Mixed kinds (both exact): `<q|p> = exp(i mu)` with mu = Sum q_i p_i.
/// Same kind at a common regularization epsilon:
/// `eps^{-Omega} exp(-(x^2 + x'^2 - 2 mu) / (2 eps))`.
/// Same kind at the exact limit is refused: the limit is a delta family.
pub fn stq_overlap_closed(a: &StqSpec, b: &StqSpec) -> Result<C64> {
    if a.normalization != b.normalization {
        return Err(Error::IncompatibleSpecs {
            context: "normalization conventions differ",
        });
    }
    let mu = a.eigenvalue.dot(&b.eigenvalue)?;
    let m = a.eigenvalue.len() as f64;
    let omega = a.eigenvalue.grid().zero_point_constant();
    let norm_scale = match a.normalization {
        Normalization::Paper => 1.0,
        Normalization::DeltaNormalized => TWO_PI.powf(-m / 2.0),
    };
    match (a.kind, b.kind) {
        (StqKind::Q, StqKind::P) | (StqKind::P, StqKind::Q) => {
            if a.regularization != Regularization::Exact
                || b.regularization != Regularization::Exact
            {
                return Err(Error::IncompatibleSpecs {
                    context: "the mixed-kind closed form is the exact-limit formula",
                });
            }
            let sign = if a.kind == StqKind::Q { 1.0 } else { -1.0 };
            Ok(c64(0.0, sign * mu).exp() * norm_scale)
        }
        _ => match (a.regularization, b.regularization) {
            (Regularization::Exact, _) | (_, Regularization::Exact) => {
                Err(Error::RegularizationRequired)
            }
            (Regularization::Eps(ea), Regularization::Eps(eb)) => {
                if (ea - eb).abs() > 1e-15 {
                    return Err(Error::IncompatibleSpecs {
                        context: "same-kind overlap needs a common epsilon",
                    });
                }
                let d = a.magnitude_sq() + b.magnitude_sq() - 2.0 * mu;
                Ok(c64(
                    ea.powf(-omega) * (-d / (2.0 * ea)).exp() * norm_scale,
                    0.0,
                ))
            }
        },
    }
}

/// Closed form for <q | alpha_F> with the coherent amplitude vector split as
/// alpha_i = (q0_i + i p0_i)/sqrt(2):
///
/// ```text
/// 2^{Omega/2} exp Sum_i [ -(q_i - q0_i)^2 / 2 + i p0_i (q_i - q0_i / 2) ]
/// ```
pub fn stq_coherent_overlap_closed(q_spec: &StqSpec, coh: &CoherentSpec) -> Result<C64> {
    if q_spec.kind != StqKind::Q {
        return Err(Error::IncompatibleSpecs {
            context: "coherent-overlap closed form is derived for the q-kind state",
        });
    }
    if q_spec.regularization != Regularization::Exact {
        return Err(Error::IncompatibleSpecs {
            context: "coherent-overlap closed form uses the exact-limit state",
        });
    }
    let alpha_vec = coh.alpha_vector();
    if alpha_vec.len() != q_spec.eigenvalue.len() {
        return Err(Error::GridMismatch);
    }
    let omega = q_spec.eigenvalue.grid().zero_point_constant();
    let mut exponent = C64::ZERO;
    for (qi, ai) in q_spec.eigenvalue.coeffs().iter().zip(alpha_vec.coeffs()) {
        let q0 = 2f64.sqrt() * ai.re;
        let p0 = 2f64.sqrt() * ai.im;
        exponent += c64(-(qi - q0) * (qi - q0) / 2.0, p0 * (qi - q0 / 2.0));
    }
    Ok(exponent.exp() * 2f64.powf(omega / 2.0) * q_spec.norm_factor())
}

/// Per-sector partial sums S_N of an inner product <a|b>, N = 0..=cutoff.
pub fn sector_partial_sums(space: &Arc<FockSpace>, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(space.cutoff() + 1);
    let mut acc = C64::ZERO;
    for n in 0..=space.cutoff() {
        for idx in space.sector(n) {
            acc += a[idx].conj() * b[idx];
        }
        out.push(acc);
    }
    out
}

/// Accelerated limit of an order-partial-sum sequence whose tail oscillates
/// with period four in the order (the i^n phases of mixed q-p overlaps).
/// Repeated stride-2 averaging cancels the leading oscillation; each pass
/// gains roughly one power of 1/N.
pub fn accelerate_partial_sums(sums: &[C64], passes: usize) -> C64 {
    let mut cur = sums.to_vec();
    for _ in 0..passes {
        if cur.len() < 3 {
            break;
        }
        cur = (0..cur.len() - 2)
            .map(|j| (cur[j] + cur[j + 2]) * 0.5)
            .collect();
    }
    *cur.last().expect("nonempty")
}
