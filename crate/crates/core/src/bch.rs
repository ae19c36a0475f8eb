//! Normal-ordering engine for the seven-generator algebra
//! {a_Q, a_P, a_R, their adjoints, s}.
//!
//! The closed commutator table (with real eigenvalue vectors q, p and
//! mu = q.p, q2 = ||q||^2, p2 = ||p||^2):
//!
//! ```text
//! [a_Q, a_P] = [a_Q, a_R] = [a_P, a_R] = 0      (and among adjoints)
//! [a_Q, a_P^dag] = 2 mu     [a_Q, a_Q^dag] = 2 q2    [a_P, a_P^dag] = 2 p2
//! [a_R, a_Q^dag] = a_Q      [a_R, a_P^dag] = a_P     [a_R, a_R^dag] = s
//! [a_Q, a_R^dag] = a_Q^dag  [a_P, a_R^dag] = a_P^dag
//! [a_Q, s] = a_Q            [a_P, s] = a_P           [a_R, s] = 2 a_R
//! ```
//!
//! Reordering `exp(t k1 a_Q) exp(t k2 a_R) exp(t k3 a_P^dag) exp(t k4 a_R^dag)`
//! into normal order introduces eight scalar functions h_0..h_7 whose closed
//! forms all share the denominator 1 - k2 k4 t^2. Two independent routes to
//! them live here: the closed forms themselves, and an ODE system assembled
//! numerically from the commutator table (never from the closed forms) and
//! integrated with RK4. A third route builds both sides of the reordering
//! identity as explicit matrices on a truncated Fock space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::grid::RealSpectralVector;
use crate::sparse::SparseOperator;
use crate::stq::{op_a_r, op_a_v, op_s};
use crate::{c64, C64};

pub const GENERATOR_COUNT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    AQ,
    AP,
    AR,
    AQDag,
    APDag,
    ARDag,
    S,
}

use GeneratorKind::*;

pub const ALL_GENERATORS: [GeneratorKind; 7] = [AQ, AP, AR, AQDag, APDag, ARDag, S];

impl GeneratorKind {
    pub fn adjoint(self) -> Self {
        match self {
            AQ => AQDag,
            AP => APDag,
            AR => ARDag,
            AQDag => AQ,
            APDag => AP,
            ARDag => AR,
            S => S,
        }
    }

    fn index(self) -> usize {
        match self {
            AQ => 0,
            AP => 1,
            AR => 2,
            AQDag => 3,
            APDag => 4,
            ARDag => 5,
            S => 6,
        }
    }
}

/// Scalar data of the algebra: the norms of the two eigenvalue vectors and
/// their inner product. `mu` is kept complex so the scalar sector of the
/// ordering equations accepts the general parameter; the physical case
/// (real eigenvalue vectors) has real mu.
#[derive(Debug, Clone, Copy)]
pub struct AlgebraContext {
    pub q2: f64,
    pub p2: f64,
    pub mu: C64,
}

impl AlgebraContext {
    pub fn from_vectors(q: &RealSpectralVector, p: &RealSpectralVector) -> Result<Self> {
        Ok(AlgebraContext {
            q2: q.norm2(),
            p2: p.norm2(),
            mu: c64(q.dot(p)?, 0.0),
        })
    }
}

/// A scalar plus a linear combination of the seven generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieElement {
    pub scalar: C64,
    pub gens: [C64; GENERATOR_COUNT],
}

impl LieElement {
    pub fn zero() -> Self {
        LieElement {
            scalar: C64::ZERO,
            gens: [C64::ZERO; GENERATOR_COUNT],
        }
    }

    pub fn scalar(v: C64) -> Self {
        let mut e = Self::zero();
        e.scalar = v;
        e
    }

    pub fn generator(g: GeneratorKind) -> Self {
        let mut e = Self::zero();
        e.gens[g.index()] = C64::ONE;
        e
    }

    pub fn scaled(mut self, s: C64) -> Self {
        self.scalar *= s;
        for g in &mut self.gens {
            *g *= s;
        }
        self
    }

    pub fn plus(mut self, other: &LieElement) -> Self {
        self.scalar += other.scalar;
        for (a, b) in self.gens.iter_mut().zip(&other.gens) {
            *a += b;
        }
        self
    }

    /// Hermitian adjoint: conjugate coefficients, dagger each generator.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        out.scalar = self.scalar.conj();
        for (i, g) in ALL_GENERATORS.iter().enumerate() {
            out.gens[g.adjoint().index()] += self.gens[i].conj();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.gens
            .iter()
            .map(|g| g.norm())
            .fold(self.scalar.norm(), f64::max)
    }
}

/// Commutator of two generators, from the closed table.
pub fn commutator(ctx: &AlgebraContext, a: GeneratorKind, b: GeneratorKind) -> LieElement {
    fn half(ctx: &AlgebraContext, a: GeneratorKind, b: GeneratorKind) -> Option<LieElement> {
        let e = |g| Some(LieElement::generator(g));
        let s = |v| Some(LieElement::scalar(v));
        match (a, b) {
            // Annihilators commute among themselves; so do creators.
            (AQ, AP) | (AQ, AR) | (AP, AR) => Some(LieElement::zero()),
            (AQDag, APDag) | (AQDag, ARDag) | (APDag, ARDag) => Some(LieElement::zero()),
            // Mixed pairs.
            (AQ, APDag) => s(2.0 * ctx.mu),
            (AP, AQDag) => s(2.0 * ctx.mu),
            (AQ, AQDag) => s(c64(2.0 * ctx.q2, 0.0)),
            (AP, APDag) => s(c64(2.0 * ctx.p2, 0.0)),
            (AR, AQDag) => e(AQ),
            (AR, APDag) => e(AP),
            (AR, ARDag) => e(S),
            (AQ, ARDag) => e(AQDag),
            (AP, ARDag) => e(APDag),
            // The symmetrized number operator grades everything:
            // annihilators by their rung count downward, creators upward.
            (AQ, S) => e(AQ),
            (AP, S) => e(AP),
            (AR, S) => Some(LieElement::generator(AR).scaled(c64(2.0, 0.0))),
            (S, AQDag) => e(AQDag),
            (S, APDag) => e(APDag),
            (S, ARDag) => Some(LieElement::generator(ARDag).scaled(c64(2.0, 0.0))),
            _ => None,
        }
    }
    if a == b {
        return LieElement::zero();
    }
    if let Some(v) = half(ctx, a, b) {
        return v;
    }
    if let Some(v) = half(ctx, b, a) {
        return v.scaled(c64(-1.0, 0.0));
    }
    LieElement::zero()
}

/// Bilinear extension of the table to linear combinations (scalars are
/// central and drop out).
pub fn lie_bracket(ctx: &AlgebraContext, a: &LieElement, b: &LieElement) -> LieElement {
    let mut out = LieElement::zero();
    for (i, &ga) in ALL_GENERATORS.iter().enumerate() {
        if a.gens[i] == C64::ZERO {
            continue;
        }
        for (j, &gb) in ALL_GENERATORS.iter().enumerate() {
            if b.gens[j] == C64::ZERO {
                continue;
            }
            out = out.plus(&commutator(ctx, ga, gb).scaled(a.gens[i] * b.gens[j]));
        }
    }
    out
}

/// Ad_{exp(c G)}(y) = Sum_k (c ad_G)^k(y) / k!, summed until the term
/// vanishes. ad_G is nilpotent on this basis except for S, which acts
/// diagonally, so a few dozen terms always suffice.
fn ad_exp(ctx: &AlgebraContext, c: C64, g: GeneratorKind, y: &LieElement) -> LieElement {
    let gen = LieElement::generator(g);
    let mut sum = *y;
    let mut term = *y;
    for k in 1..=60 {
        term = lie_bracket(ctx, &gen, &term).scaled(c / k as f64);
        if term.max_abs() == 0.0 {
            break;
        }
        sum = sum.plus(&term);
        if term.max_abs() < 1e-20 * sum.max_abs().max(1.0) {
            break;
        }
    }
    sum
}

/// The eight normal-ordering functions at a common argument set.
#[derive(Debug, Clone)]
pub struct NormalOrderSolution {
    pub k: [C64; 4],
    pub t: f64,
    pub mu: C64,
    pub q2: f64,
    pub p2: f64,
    pub h: [C64; 8],
}

fn ordering_denominator(k: &[C64; 4], t: f64) -> Result<C64> {
    let d = C64::ONE - k[1] * k[3] * t * t;
    if d.norm() < 1e-9 {
        let prod = k[1] * k[3];
        let singular_t = if prod.norm() > 0.0 {
            (1.0 / prod).sqrt().norm()
        } else {
            f64::INFINITY
        };
        return Err(Error::SingularOrdering { singular_t });
    }
    Ok(d)
}

/// Closed forms of h_0..h_7.
pub fn normal_order_h(
    k: [C64; 4],
    t: f64,
    mu: C64,
    q2: f64,
    p2: f64,
) -> Result<NormalOrderSolution> {
    let d = ordering_denominator(&k, t)?;
    let t_c = c64(t, 0.0);
    let [k1, k2, k3, k4] = k;
    let h0 =
        (k1 * k1 * k4 * q2 * t_c + k2 * k3 * k3 * p2 * t_c + 2.0 * k1 * k3 * mu) * t_c * t_c / d;
    let h = [
        h0,
        k1 * k4 * t_c * t_c / d,
        k3 * t_c / d,
        k4 * t_c / d,
        -d.ln(),
        k1 * t_c / d,
        k2 * k3 * t_c * t_c / d,
        k2 * t_c / d,
    ];
    Ok(NormalOrderSolution {
        k,
        t,
        mu,
        q2,
        p2,
        h,
    })
}

// Coefficient vectors of the ordering derivation live on the basis
// [scalar, AQ, AP, AR, AQdag, APdag, ARdag, S].
const DIM: usize = 1 + GENERATOR_COUNT;

fn coeff_vector(e: &LieElement) -> [C64; DIM] {
    let mut v = [C64::ZERO; DIM];
    v[0] = e.scalar;
    v[1..].copy_from_slice(&e.gens);
    v
}

fn solve_linear(mut m: [[C64; DIM]; DIM], mut rhs: [C64; DIM]) -> [C64; DIM] {
    for col in 0..DIM {
        let (pivot, _) = (col..DIM)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = C64::ONE / m[col][col];
        for r in (col + 1)..DIM {
            let f = m[r][col] * inv;
            if f == C64::ZERO {
                continue;
            }
            for c in col..DIM {
                let sub = f * m[col][c];
                m[r][c] -= sub;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = [C64::ZERO; DIM];
    for col in (0..DIM).rev() {
        let mut acc = rhs[col];
        for c in (col + 1)..DIM {
            acc -= m[col][c] * x[c];
        }
        x[col] = acc / m[col][col];
    }
    x
}

/// Independent oracle for the h functions: differentiate the reordering
/// ansatz in the auxiliary variable, push every derivative-generated
/// operator through the preceding exponentials with the commutator table,
/// match coefficients, and integrate the resulting first-order system with
/// RK4. The closed forms never enter.
pub fn ode_oracle_h(
    k: [C64; 4],
    t_final: f64,
    mu: C64,
    q2: f64,
    p2: f64,
) -> Result<NormalOrderSolution> {
    let ctx = AlgebraContext { q2, p2, mu };
    // Refuse paths that cross or graze the singularity.
    let steps_check = 200;
    for j in 0..=steps_check {
        let t = t_final * j as f64 / steps_check as f64;
        ordering_denominator(&k, t)?;
    }

    let lhs_factors = [(k[0], AQ), (k[1], AR), (k[2], APDag), (k[3], ARDag)];
    let rhs_generators = [AQDag, APDag, ARDag, S, AQ, AP, AR];

    let derivative = |t: f64, h: &[C64; 8]| -> [C64; 8] {
        // LHS: x(t) = Sum_j k_j Ad_{e^{t k_1 G_1}} .. Ad_{e^{t k_{j-1} G_{j-1}}}(G_j).
        let mut x = LieElement::zero();
        for (j, &(kj, gj)) in lhs_factors.iter().enumerate() {
            let mut pushed = LieElement::generator(gj);
            for &(ki, gi) in lhs_factors[..j].iter().rev() {
                pushed = ad_exp(&ctx, ki * t, gi, &pushed);
            }
            x = x.plus(&pushed.scaled(kj));
        }
        // RHS: one column per unknown derivative; column 0 is the scalar
        // factor h0'.
        let mut m = [[C64::ZERO; DIM]; DIM];
        m[0][0] = C64::ONE;
        let mut cumulative: Vec<(C64, GeneratorKind)> = Vec::with_capacity(7);
        for (col, &g) in rhs_generators.iter().enumerate() {
            let mut pushed = LieElement::generator(g);
            for &(hc, gc) in cumulative.iter().rev() {
                pushed = ad_exp(&ctx, hc, gc, &pushed);
            }
            let v = coeff_vector(&pushed);
            for (r, val) in v.iter().enumerate() {
                m[r][col + 1] = *val;
            }
            cumulative.push((h[col + 1], g));
        }
        let sol = solve_linear(m, coeff_vector(&x));
        let mut dh = [C64::ZERO; 8];
        dh.copy_from_slice(&sol);
        dh
    };

    let steps = 4000usize.max((t_final.abs() * 8000.0) as usize);
    let dt = t_final / steps as f64;
    let mut h = [C64::ZERO; 8];
    let mut t = 0.0;
    for _ in 0..steps {
        let k1v = derivative(t, &h);
        let mut h2 = h;
        for i in 0..8 {
            h2[i] += 0.5 * dt * k1v[i];
        }
        let k2v = derivative(t + 0.5 * dt, &h2);
        let mut h3 = h;
        for i in 0..8 {
            h3[i] += 0.5 * dt * k2v[i];
        }
        let k3v = derivative(t + 0.5 * dt, &h3);
        let mut h4 = h;
        for i in 0..8 {
            h4[i] += dt * k3v[i];
        }
        let k4v = derivative(t + dt, &h4);
        for i in 0..8 {
            h[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        t += dt;
    }
    Ok(NormalOrderSolution {
        k,
        t: t_final,
        mu,
        q2,
        p2,
        h,
    })
}

/// Ordered product of exponential factors with an overall scalar prefactor.
#[derive(Debug, Clone)]
pub struct ExpWord {
    pub prefactor: C64,
    pub factors: Vec<(C64, GeneratorKind)>,
}

impl ExpWord {
    pub fn new(factors: Vec<(C64, GeneratorKind)>) -> Self {
        ExpWord {
            prefactor: C64::ONE,
            factors,
        }
    }

    /// exp(t k1 a_Q) exp(t k2 a_R) exp(t k3 a_P^dag) exp(t k4 a_R^dag).
    pub fn ordering_lhs(k: [C64; 4], t: f64) -> Self {
        ExpWord::new(vec![
            (k[0] * t, AQ),
            (k[1] * t, AR),
            (k[2] * t, APDag),
            (k[3] * t, ARDag),
        ])
    }

    /// The normal-ordered right-hand word of a solution, including the
    /// scalar e^{h0}.
    pub fn ordering_rhs(sol: &NormalOrderSolution) -> Self {
        ExpWord {
            prefactor: sol.h[0].exp(),
            factors: vec![
                (sol.h[1], AQDag),
                (sol.h[2], APDag),
                (sol.h[3], ARDag),
                (sol.h[4], S),
                (sol.h[5], AQ),
                (sol.h[6], AP),
                (sol.h[7], AR),
            ],
        }
    }
}

/// Concrete matrices of the seven generators on a Fock space for given
/// eigenvalue vectors.
pub struct GeneratorMatrices {
    mats: [SparseOperator; GENERATOR_COUNT],
}

impl GeneratorMatrices {
    pub fn build(
        space: &Arc<FockSpace>,
        q: &RealSpectralVector,
        p: &RealSpectralVector,
    ) -> Result<Self> {
        let aq = op_a_v(space, q)?;
        let ap = op_a_v(space, p)?;
        let ar = op_a_r(space)?;
        let mats = [
            aq.clone(),
            ap.clone(),
            ar.clone(),
            aq.adjoint(),
            ap.adjoint(),
            ar.adjoint(),
            op_s(space),
        ];
        Ok(GeneratorMatrices { mats })
    }

    pub fn matrix(&self, g: GeneratorKind) -> &SparseOperator {
        &self.mats[g.index()]
    }

    /// Product of factor exponentials, left to right, times the prefactor.
    pub fn word_matrix(&self, word: &ExpWord) -> SparseOperator {
        let dim = self.mats[0].dim();
        let mut acc = SparseOperator::identity(dim);
        for &(coeff, g) in &word.factors {
            let factor = exp_matrix(&self.matrix(g).scale(coeff));
            acc = acc.matmul(&factor);
        }
        acc.scale(word.prefactor)
    }
}

/// Matrix exponential by plain series; the ladder-word generators are
/// nilpotent in the truncated space and `s` is diagonal, so the series
/// either terminates or converges in a handful of terms.
pub fn exp_matrix(op: &SparseOperator) -> SparseOperator {
    let dim = op.dim();
    let mut sum = SparseOperator::identity(dim);
    let mut term = SparseOperator::identity(dim);
    for kk in 1..=(2 * dim + 8) {
        term = term.matmul(op).scale(c64(1.0 / kk as f64, 0.0));
        let t_norm = term.max_abs();
        if t_norm == 0.0 {
            break;
        }
        sum = sum.add(&term);
        if t_norm < 1e-17 * sum.max_abs().max(1.0) {
            break;
        }
    }
    sum
}

/// Upper bound on the truncation leakage of the reordering comparison at a
/// given block cut: the absolute sum of the up-down R-ladder paths from the
/// block that the cutoff clips,
/// `Sum_{k >= k*} |t^2 k2 k4|^k (c + 2k)! / (c! 4^k k!^2)`,
/// with k* the first rung above the cutoff.
pub fn leakage_bound(block_cut: usize, cutoff: usize, t2k: f64) -> f64 {
    if t2k == 0.0 {
        return 0.0;
    }
    let c = block_cut;
    let k_star = (cutoff - c) / 2 + 1;
    let ln_t = t2k.abs().ln();
    let mut total = 0.0f64;
    for k in k_star..(k_star + 200) {
        let mut ln_term = k as f64 * ln_t - k as f64 * 4f64.ln();
        for j in (c + 1)..=(c + 2 * k) {
            ln_term += (j as f64).ln();
        }
        for j in 1..=k {
            ln_term -= 2.0 * (j as f64).ln();
        }
        let term = ln_term.exp();
        total += term;
        if term < 1e-30 * total.max(1e-280) {
            break;
        }
    }
    total
}

/// Builds both sides of a word identity as matrices and returns the largest
/// entrywise deviation on the leading block of total occupation
/// <= block_cut. The caller must leave at least four graded sectors of
/// headroom above the block.
pub fn verify_word(
    space: &Arc<FockSpace>,
    gens: &GeneratorMatrices,
    lhs: &ExpWord,
    rhs: &ExpWord,
    block_cut: usize,
) -> Result<f64> {
    if block_cut + 4 > space.cutoff() {
        return Err(Error::BlockCutTooHigh {
            block_cut,
            cutoff: space.cutoff(),
            leakage: f64::NAN,
        });
    }
    let l = gens.word_matrix(lhs);
    let r = gens.word_matrix(rhs);
    let cut = space.block_end(block_cut);
    Ok(l.sub(&r).max_abs_on_block(cut, cut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ModeGrid;

    fn ctx(q2: f64, p2: f64, mu: f64) -> AlgebraContext {
        AlgebraContext {
            q2,
            p2,
            mu: c64(mu, 0.0),
        }
    }

    #[test]
    fn table_examples() {
        let c = ctx(1.3, 0.8, 0.45);
        assert_eq!(commutator(&c, AQ, AP), LieElement::zero());
        assert_eq!(commutator(&c, AR, ARDag), LieElement::generator(S));
        let qp = commutator(&c, AQ, APDag);
        assert!((qp.scalar - c64(0.9, 0.0)).norm() < 1e-15);
        // Orthogonal eigenvalue vectors: mu = 0 kills the scalar.
        let c0 = ctx(1.0, 1.0, 0.0);
        assert_eq!(commutator(&c0, AQ, APDag), LieElement::zero());
        // R grades doubly.
        let rs = commutator(&c, AR, S);
        assert!((rs.gens[2] - c64(2.0, 0.0)).norm() < 1e-15);
        // Antisymmetry fallback.
        let sq = commutator(&c, S, AQ);
        assert!((sq.gens[0] + C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn adjoint_closure_of_table() {
        // [Y^dag, X^dag] = ([X, Y])^dag over the whole table.
        let c = ctx(0.7, 1.9, -0.35);
        for &x in &ALL_GENERATORS {
            for &y in &ALL_GENERATORS {
                let lhs = commutator(&c, y.adjoint(), x.adjoint());
                let rhs = commutator(&c, x, y).adjoint();
                let diff = lhs.plus(&rhs.scaled(c64(-1.0, 0.0)));
                assert!(diff.max_abs() < 1e-14, "x={x:?} y={y:?}");
            }
        }
    }

    #[test]
    fn jacobi_identity_on_table() {
        let c = ctx(0.9, 1.4, 0.6);
        for &a in &ALL_GENERATORS {
            for &b in &ALL_GENERATORS {
                for &d in &ALL_GENERATORS {
                    let ea = LieElement::generator(a);
                    let eb = LieElement::generator(b);
                    let ed = LieElement::generator(d);
                    let j = lie_bracket(&c, &lie_bracket(&c, &ea, &eb), &ed)
                        .plus(&lie_bracket(&c, &lie_bracket(&c, &eb, &ed), &ea))
                        .plus(&lie_bracket(&c, &lie_bracket(&c, &ed, &ea), &eb));
                    assert!(j.max_abs() < 1e-13, "a={a:?} b={b:?} d={d:?}");
                }
            }
        }
    }

    #[test]
    fn table_matches_matrices() {
        // Every table entry is an identity of sparse matrices on the block
        // below the cutoff.
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, 8);
        let qv = RealSpectralVector::from_folded(&grid, vec![0.6, -0.3]).unwrap();
        let pv = RealSpectralVector::from_folded(&grid, vec![0.2, 0.9]).unwrap();
        let c = AlgebraContext::from_vectors(&qv, &pv).unwrap();
        let gens = GeneratorMatrices::build(&sp, &qv, &pv).unwrap();
        let cut = sp.block_end(sp.cutoff() - 2);
        for &a in &ALL_GENERATORS {
            for &b in &ALL_GENERATORS {
                let numeric = gens.matrix(a).commutator(gens.matrix(b));
                let symbolic = commutator(&c, a, b);
                let mut expect = SparseOperator::identity(sp.dim()).scale(symbolic.scalar);
                for (i, &g) in ALL_GENERATORS.iter().enumerate() {
                    if symbolic.gens[i] != C64::ZERO {
                        expect = expect.add(&gens.matrix(g).scale(symbolic.gens[i]));
                    }
                }
                let dev = numeric.sub(&expect).max_abs_on_block(cut, cut);
                assert!(dev < 1e-12, "a={a:?} b={b:?}: {dev}");
            }
        }
    }

    #[test]
    fn s_equals_number_plus_omega() {
        let grid = ModeGrid::unit(3);
        let sp = FockSpace::new(&grid, 5);
        let s = op_s(&sp);
        let expect = sp
            .number_operator()
            .add(&SparseOperator::identity(sp.dim()).scale(c64(1.5, 0.0)));
        assert!(s.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn closed_forms_special_cases() {
        // t = 0: everything vanishes.
        let sol0 = normal_order_h(
            [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE],
            0.0,
            c64(0.3, 0.0),
            1.0,
            1.0,
        )
        .unwrap();
        for h in sol0.h {
            assert!(h.norm() < 1e-15);
        }
        // k = (1, -1, i, 1) at t = 1: the coefficients of the fully ordered
        // mixed word.
        let (q2, p2, mu) = (0.49, 0.81, 0.2);
        let sol = normal_order_h(
            [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE],
            1.0,
            c64(mu, 0.0),
            q2,
            p2,
        )
        .unwrap();
        assert!((sol.h[4] - c64(-(2f64.ln()), 0.0)).norm() < 1e-14);
        assert!((sol.h[1] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!((sol.h[2] - c64(0.0, 0.5)).norm() < 1e-14);
        assert!((sol.h[3] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!((sol.h[5] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!((sol.h[6] - c64(0.0, -0.5)).norm() < 1e-14);
        assert!((sol.h[7] - c64(-0.5, 0.0)).norm() < 1e-14);
        let h0_expect = c64(q2 / 2.0 + p2 / 2.0, mu);
        assert!((sol.h[0] - h0_expect).norm() < 1e-14);
    }

    #[test]
    fn closed_forms_same_kind_pattern() {
        // k = (1, -1, 1, -1): h2 = -h3 = h5 = -h7 = t/(1-t^2),
        // h1 = h6 = -t^2/(1-t^2), h4 = -ln(1-t^2).
        let t = 0.6;
        let sol = normal_order_h(
            [C64::ONE, -C64::ONE, C64::ONE, -C64::ONE],
            t,
            c64(0.15, 0.0),
            0.7,
            0.9,
        )
        .unwrap();
        let d = 1.0 - t * t;
        assert!((sol.h[2] - c64(t / d, 0.0)).norm() < 1e-14);
        assert!((sol.h[3] + c64(t / d, 0.0)).norm() < 1e-14);
        assert!((sol.h[5] - c64(t / d, 0.0)).norm() < 1e-14);
        assert!((sol.h[7] + c64(t / d, 0.0)).norm() < 1e-14);
        assert!((sol.h[1] + c64(t * t / d, 0.0)).norm() < 1e-14);
        assert!((sol.h[6] + c64(t * t / d, 0.0)).norm() < 1e-14);
        assert!((sol.h[4] + c64(d.ln(), 0.0)).norm() < 1e-14);
        let h0_expect = -(0.7 * t + 0.9 * t - 2.0 * 0.15) * t * t / d;
        assert!((sol.h[0] - c64(h0_expect, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn singularity_guard() {
        // k2 k4 t^2 = 1 exactly.
        let err = normal_order_h(
            [C64::ONE, C64::ONE, C64::ONE, C64::ONE],
            1.0,
            C64::ZERO,
            0.0,
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularOrdering { .. }));
    }

    #[test]
    fn ode_oracle_matches_closed_forms() {
        let cases: Vec<([C64; 4], f64)> = vec![
            ([C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE], 0.5),
            ([C64::ONE, -C64::ONE, C64::ONE, -C64::ONE], 0.9),
            (
                [c64(0.3, 0.2), c64(-0.8, 0.1), c64(0.4, -0.6), c64(0.9, 0.3)],
                0.45,
            ),
        ];
        let (mu, q2, p2) = (c64(0.27, 0.0), 1.1, 0.6);
        for (k, t) in cases {
            let closed = normal_order_h(k, t, mu, q2, p2).unwrap();
            let ode = ode_oracle_h(k, t, mu, q2, p2).unwrap();
            let mut worst = 0.0f64;
            for i in 0..8 {
                worst = worst.max((closed.h[i] - ode.h[i]).norm());
            }
            assert!(worst < 1e-8, "k={k:?} t={t}: {worst}");
        }
        // Zero endpoint trivially matches.
        let z = ode_oracle_h(
            [C64::ONE, C64::ONE, C64::ONE, C64::ONE],
            0.0,
            C64::ZERO,
            0.0,
            0.0,
        )
        .unwrap();
        for h in z.h {
            assert!(h.norm() < 1e-14);
        }
    }

    #[test]
    fn ode_oracle_random_draws() {
        // Deterministic pseudo-random draws with |k_i| <= 1, |t| <= 0.5.
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
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
            let closed = normal_order_h(k, t, mu, q2, p2).unwrap();
            let ode = ode_oracle_h(k, t, mu, q2, p2).unwrap();
            let mut worst = 0.0f64;
            for i in 0..8 {
                worst = worst.max((closed.h[i] - ode.h[i]).norm());
            }
            assert!(worst < 1e-7, "draw {done}: {worst}");
            done += 1;
        }
    }

    #[test]
    fn word_identity_on_blocks() {
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, 16);
        let qv = RealSpectralVector::from_folded(&grid, vec![0.7]).unwrap();
        let pv = RealSpectralVector::from_folded(&grid, vec![0.9]).unwrap();
        let gens = GeneratorMatrices::build(&sp, &qv, &pv).unwrap();
        let ctx = AlgebraContext::from_vectors(&qv, &pv).unwrap();
        let k = [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE];
        // t = 0: both sides are the identity.
        let sol0 = normal_order_h(k, 0.0, ctx.mu, ctx.q2, ctx.p2).unwrap();
        let dev0 = verify_word(
            &sp,
            &gens,
            &ExpWord::ordering_lhs(k, 0.0),
            &ExpWord::ordering_rhs(&sol0),
            4,
        )
        .unwrap();
        assert!(dev0 < 1e-15);
        // Blocks sized to the leakage bound.
        for (t, block) in [(0.3f64, 2usize), (0.2, 4)] {
            let leak = leakage_bound(block, sp.cutoff(), (k[1] * k[3]).norm() * t * t);
            assert!(leak < 1e-6, "t={t} block={block}: leak {leak}");
            let sol = normal_order_h(k, t, ctx.mu, ctx.q2, ctx.p2).unwrap();
            let dev = verify_word(
                &sp,
                &gens,
                &ExpWord::ordering_lhs(k, t),
                &ExpWord::ordering_rhs(&sol),
                block,
            )
            .unwrap();
            assert!(dev < 1e-6, "t={t} block={block}: dev {dev}");
        }
    }

    #[test]
    fn vacuum_expectation_matches_scalar_solution() {
        // <vac| word |vac> = exp(h0) exp(h4 Omega) at moderate t, where the
        // truncated series has converged.
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, 24);
        let qv = RealSpectralVector::from_folded(&grid, vec![0.5]).unwrap();
        let pv = RealSpectralVector::from_folded(&grid, vec![-0.4]).unwrap();
        let gens = GeneratorMatrices::build(&sp, &qv, &pv).unwrap();
        let ctx = AlgebraContext::from_vectors(&qv, &pv).unwrap();
        let omega = grid.zero_point_constant();
        let k = [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE];
        for t in [0.3, 0.5] {
            let w = gens.word_matrix(&ExpWord::ordering_lhs(k, t));
            let numeric = w.entry(0, 0);
            let sol = normal_order_h(k, t, ctx.mu, ctx.q2, ctx.p2).unwrap();
            let closed = (sol.h[0] + sol.h[4] * omega).exp();
            assert!((numeric - closed).norm() < 1e-8, "t={t}");
        }
        // At t = 1 the closed forms reproduce the fully ordered overlap
        // scaling 2^{-Omega} exp(q2/2 + p2/2 + i mu).
        let sol1 = normal_order_h(k, 1.0, ctx.mu, ctx.q2, ctx.p2).unwrap();
        let closed1 = (sol1.h[0] + sol1.h[4] * omega).exp();
        let expect = c64(ctx.q2 / 2.0 + ctx.p2 / 2.0, 0.0).exp()
            * c64(0.0, ctx.mu.re).exp()
            * 2f64.powf(-omega);
        assert!((closed1 - expect).norm() < 1e-13);
    }

    #[test]
    fn block_cut_validation() {
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, 8);
        let qv = RealSpectralVector::from_folded(&grid, vec![0.1]).unwrap();
        let pv = RealSpectralVector::from_folded(&grid, vec![0.1]).unwrap();
        let gens = GeneratorMatrices::build(&sp, &qv, &pv).unwrap();
        let w = ExpWord::new(vec![(c64(0.1, 0.0), AQ)]);
        assert!(matches!(
            verify_word(&sp, &gens, &w, &w, 6),
            Err(Error::BlockCutTooHigh { .. })
        ));
    }

    #[test]
    fn leakage_bound_dominates_measured_truncation() {
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, 12);
        let qv = RealSpectralVector::from_folded(&grid, vec![0.3]).unwrap();
        let pv = RealSpectralVector::from_folded(&grid, vec![0.2]).unwrap();
        let gens = GeneratorMatrices::build(&sp, &qv, &pv).unwrap();
        let ctx = AlgebraContext::from_vectors(&qv, &pv).unwrap();
        let k = [C64::ONE, -C64::ONE, c64(0.0, 1.0), C64::ONE];
        let t = 0.35;
        let sol = normal_order_h(k, t, ctx.mu, ctx.q2, ctx.p2).unwrap();
        let wl = gens.word_matrix(&ExpWord::ordering_lhs(k, t));
        let wr = gens.word_matrix(&ExpWord::ordering_rhs(&sol));
        for block in [2usize, 4, 6] {
            let cut = sp.block_end(block);
            let dev = wl.sub(&wr).max_abs_on_block(cut, cut);
            let bound = leakage_bound(block, sp.cutoff(), t * t);
            assert!(
                dev <= bound.max(1e-12) * 50.0,
                "block={block}: dev {dev} vs bound {bound}"
            );
        }
    }
}
