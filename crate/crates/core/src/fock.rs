//! Truncated multimode Fock space over a mode grid.
//!
//! The basis is every occupation vector n = (n_0..n_{M-1}) with total
//! occupation Sum n_i <= N_max, ordered graded-lexicographically (by total,
//! then lexicographic). With that ordering the states of total occupation
//! < c form a leading principal block, so truncation artifacts are confined
//! to trailing blocks and exactness statements become block checks.
//!
//! Ladder operators act in folded coordinates, b_i = a(k_i) sqrt(weight_i),
//! which makes [b_i, b_j^dag] = delta_ij on every sector that the cutoff
//! does not clip.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ModeGrid, SpectralVector};
use crate::sparse::SparseOperator;
use crate::{c64, C64};

#[derive(Debug)]
pub struct FockSpace {
    grid: Arc<ModeGrid>,
    cutoff: usize,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// sector_start[t] is the index of the first state with total t;
    /// final entry is the dimension.
    sector_start: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

fn compositions_into(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions_into(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl FockSpace {
    pub fn new(grid: &Arc<ModeGrid>, cutoff: usize) -> Arc<Self> {
        let m = grid.len();
        let mut basis = Vec::with_capacity(binomial(m + cutoff, m));
        let mut sector_start = Vec::with_capacity(cutoff + 2);
        for total in 0..=cutoff as u32 {
            sector_start.push(basis.len());
            let mut prefix = Vec::with_capacity(m);
            compositions_into(total, m, &mut prefix, &mut basis);
        }
        sector_start.push(basis.len());
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Arc::new(FockSpace {
            grid: Arc::clone(grid),
            cutoff,
            basis,
            index,
            sector_start,
        })
    }

    pub fn grid(&self) -> &Arc<ModeGrid> {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.grid.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn occupation(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn total_occupation(&self, i: usize) -> u32 {
        self.basis[i].iter().sum()
    }

    /// Index range of the sector with total occupation `t`.
    pub fn sector(&self, t: usize) -> std::ops::Range<usize> {
        self.sector_start[t]..self.sector_start[t + 1]
    }

    /// Length of the leading block of states with total occupation <= `t`.
    pub fn block_end(&self, t: usize) -> usize {
        if t + 1 >= self.sector_start.len() {
            self.dim()
        } else {
            self.sector_start[t + 1]
        }
    }

    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::ZERO; self.dim()];
        v[0] = C64::ONE;
        v
    }

    pub fn basis_state(&self, occ: &[u32]) -> Result<Vec<C64>> {
        let idx = self.index_of(occ).ok_or(Error::CutoffExceeded {
            n: occ.iter().sum::<u32>() as usize,
            cutoff: self.cutoff,
        })?;
        let mut v = vec![C64::ZERO; self.dim()];
        v[idx] = C64::ONE;
        Ok(v)
    }

    /// Annihilator b_i in folded coordinates: b_i |..n_i..> = sqrt(n_i) |..n_i - 1..>.
    pub fn annihilator(&self, mode: usize) -> Result<SparseOperator> {
        if mode >= self.modes() {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes(),
            });
        }
        let mut triplets = Vec::new();
        for (col, occ) in self.basis.iter().enumerate() {
            let n = occ[mode];
            if n == 0 {
                continue;
            }
            let mut lowered = occ.clone();
            lowered[mode] -= 1;
            let row = self.index[&lowered];
            triplets.push((row, col, c64((n as f64).sqrt(), 0.0)));
        }
        Ok(SparseOperator::from_triplets(self.dim(), triplets))
    }

    /// (annihilator, creator) pair; the creator is the adjoint and maps the
    /// top sector to zero.
    pub fn ladder(&self, mode: usize) -> Result<(SparseOperator, SparseOperator)> {
        let a = self.annihilator(mode)?;
        let adag = a.adjoint();
        Ok((a, adag))
    }

    /// Total number operator, diagonal with entries Sum_i n_i.
    pub fn number_operator(&self) -> SparseOperator {
        let diag: Vec<C64> = self
            .basis
            .iter()
            .map(|occ| c64(occ.iter().sum::<u32>() as f64, 0.0))
            .collect();
        SparseOperator::from_diagonal(&diag)
    }

    /// Errors unless `grid` is the grid this space was built on.
    pub fn check_grid(&self, grid: &Arc<ModeGrid>) -> Result<()> {
        if Arc::ptr_eq(grid, &self.grid) || **grid == *self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Smeared ladder pair for a spectrum F: a_F = Sum_i conj(F_i) b_i and
    /// its adjoint.
    pub fn smeared_ladder(
        &self,
        spectrum: &SpectralVector,
    ) -> Result<(SparseOperator, SparseOperator)> {
        self.check_grid(spectrum.grid())?;
        let mut triplets = Vec::new();
        for (col, occ) in self.basis.iter().enumerate() {
            for mode in 0..self.modes() {
                let n = occ[mode];
                if n == 0 {
                    continue;
                }
                let f = spectrum.coeffs()[mode].conj();
                if f == C64::ZERO {
                    continue;
                }
                let mut lowered = occ.clone();
                lowered[mode] -= 1;
                let row = self.index[&lowered];
                triplets.push((row, col, f * (n as f64).sqrt()));
            }
        }
        let a = SparseOperator::from_triplets(self.dim(), triplets);
        let adag = a.adjoint();
        Ok((a, adag))
    }

    /// Applies a_F^dag to a state without forming the matrix.
    pub fn apply_smeared_creator(&self, spectrum: &SpectralVector, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::ZERO; self.dim()];
        for (col, occ) in self.basis.iter().enumerate() {
            if v[col] == C64::ZERO {
                continue;
            }
            if self.total_occupation(col) as usize >= self.cutoff {
                continue;
            }
            for mode in 0..self.modes() {
                let f = spectrum.coeffs()[mode];
                if f == C64::ZERO {
                    continue;
                }
                let mut raised = occ.clone();
                raised[mode] += 1;
                let row = self.index[&raised];
                out[row] += f * ((occ[mode] + 1) as f64).sqrt() * v[col];
            }
        }
        out
    }

    /// Fixed-spectrum Fock state (a_F^dag)^n |vac> / sqrt(n!).
    pub fn fock_state(&self, n: usize, spectrum: &SpectralVector) -> Result<Vec<C64>> {
        if n > self.cutoff {
            return Err(Error::CutoffExceeded {
                n,
                cutoff: self.cutoff,
            });
        }
        spectrum.check_normalized(1e-12)?;
        let mut v = self.vacuum();
        for k in 0..n {
            v = self.apply_smeared_creator(spectrum, &v);
            let inv = 1.0 / ((k + 1) as f64).sqrt();
            for a in &mut v {
                *a *= inv;
            }
        }
        Ok(v)
    }

    /// Norm^2 of the unfolded fixed-momentum n-photon state on `mode`:
    /// (1/weight)^n. Across a refinement sequence of shrinking cells this
    /// grows without bound, which is the divergence that rules fixed-momentum
    /// Fock bases out.
    pub fn fixed_momentum_divergence_probe(&self, mode: usize, n: usize) -> Result<f64> {
        if mode >= self.modes() {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes(),
            });
        }
        Ok(self.grid.weight(mode).powi(-(n as i32)))
    }

    /// Max |<p_{e_j} | 1_m 1_n>| over all basis-mode spectra e_j and all
    /// p <= N_max. A two-mode product state is orthogonal to every
    /// fixed-spectrum Fock state built on a single basis mode, which is the
    /// incompleteness of the discrete fixed-spectrum basis.
    pub fn discrete_incompleteness_probe(&self, m: usize, n: usize) -> Result<f64> {
        if m == n {
            return Err(Error::EqualModes { m, n });
        }
        if m >= self.modes() || n >= self.modes() {
            return Err(Error::ModeOutOfRange {
                index: m.max(n),
                modes: self.modes(),
            });
        }
        let mut occ = vec![0u32; self.modes()];
        occ[m] = 1;
        occ[n] = 1;
        let psi = self.basis_state(&occ)?;
        let mut worst = 0.0f64;
        for j in 0..self.modes() {
            let ej = SpectralVector::basis_mode(&self.grid, j)?;
            for p in 0..=self.cutoff {
                let basis_fock = self.fock_state(p, &ej)?;
                worst = worst.max(dot(&basis_fock, &psi).norm());
            }
        }
        Ok(worst)
    }
}

/// <a|b> with the left argument conjugated.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(v: &mut [C64], s: C64) {
    for x in v {
        *x *= s;
    }
}

pub fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Closed form <m_F | n_G> = delta_mn <F, G>^n for normalized spectra.
/// Valid for any m, n, also beyond a finite cutoff.
pub fn fock_overlap_closed(
    m: usize,
    f: &SpectralVector,
    n: usize,
    g: &SpectralVector,
) -> Result<C64> {
    f.check_normalized(1e-12)?;
    g.check_normalized(1e-12)?;
    if m != n {
        return Ok(C64::ZERO);
    }
    Ok(f.inner(g)?.powu(n as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ModeGrid;

    fn unit_space(m: usize, cutoff: usize) -> Arc<FockSpace> {
        FockSpace::new(&ModeGrid::unit(m), cutoff)
    }

    #[test]
    fn dimension_is_binomial() {
        let sp = unit_space(3, 4);
        assert_eq!(sp.dim(), binomial(7, 3));
        assert_eq!(sp.dim(), 35);
    }

    #[test]
    fn graded_order_leading_blocks() {
        let sp = unit_space(2, 3);
        // Sector totals must be non-decreasing along the basis.
        let mut last = 0;
        for i in 0..sp.dim() {
            let t = sp.total_occupation(i);
            assert!(t >= last);
            last = t;
        }
        assert_eq!(sp.block_end(0), 1);
        assert_eq!(sp.block_end(1), 3);
        assert_eq!(sp.block_end(3), sp.dim());
    }

    #[test]
    fn vacuum_annihilates() {
        let sp = unit_space(2, 3);
        let b0 = sp.annihilator(0).unwrap();
        let out = b0.apply(&sp.vacuum());
        assert!(norm(&out) < 1e-15);
    }

    #[test]
    fn creator_matrix_element() {
        // b^dag |n=1> = sqrt(2) |n=2>.
        let sp = unit_space(1, 3);
        let (_, bdag) = sp.ladder(0).unwrap();
        let one = sp.basis_state(&[1]).unwrap();
        let out = bdag.apply(&one);
        let two = sp.index_of(&[2]).unwrap();
        assert!((out[two] - c64(2f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn distinct_mode_commutator_vanishes() {
        let sp = unit_space(2, 4);
        let b0 = sp.annihilator(0).unwrap();
        let (_, b1dag) = sp.ladder(1).unwrap();
        let comm = b0.commutator(&b1dag);
        let safe = sp.block_end(sp.cutoff() - 1);
        assert!(comm.max_abs_on_block(safe, safe) < 1e-14);
    }

    #[test]
    fn ccr_exact_below_cutoff() {
        for m in 1..=3 {
            let sp = unit_space(m, 4);
            let safe = sp.block_end(sp.cutoff() - 1);
            for i in 0..m {
                for j in 0..m {
                    let bi = sp.annihilator(i).unwrap();
                    let (_, bjdag) = sp.ladder(j).unwrap();
                    let mut comm = bi.commutator(&bjdag);
                    if i == j {
                        comm = comm.sub(&SparseOperator::identity(sp.dim()));
                    }
                    assert!(comm.max_abs_on_block(safe, safe) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn mode_out_of_range() {
        let sp = unit_space(2, 2);
        assert!(matches!(
            sp.annihilator(2),
            Err(Error::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn number_operator_counts() {
        let sp = unit_space(2, 4);
        let nop = sp.number_operator();
        let occ = sp.basis_state(&[2, 1]).unwrap();
        let out = nop.apply(&occ);
        let idx = sp.index_of(&[2, 1]).unwrap();
        assert!((out[idx] - c64(3.0, 0.0)).norm() < 1e-14);
        assert!(norm(&nop.apply(&sp.vacuum())) < 1e-15);
    }

    #[test]
    fn smeared_ladder_single_mode_selection() {
        let sp = unit_space(2, 3);
        let f = SpectralVector::from_folded(sp.grid(), vec![C64::ONE, C64::ZERO]).unwrap();
        let (af, _) = sp.smeared_ladder(&f).unwrap();
        let b0 = sp.annihilator(0).unwrap();
        assert!(af.sub(&b0).max_abs() < 1e-14);
    }

    #[test]
    fn smeared_ladder_action_example() {
        // F = (0.6, 0.8): a_F |1,0> = 0.6 |vac>.
        let sp = unit_space(2, 3);
        let f =
            SpectralVector::from_folded(sp.grid(), vec![c64(0.6, 0.0), c64(0.8, 0.0)]).unwrap();
        let (af, _) = sp.smeared_ladder(&f).unwrap();
        let out = af.apply(&sp.basis_state(&[1, 0]).unwrap());
        assert!((out[0] - c64(0.6, 0.0)).norm() < 1e-14);
        assert!(norm(&out[1..]) < 1e-14);
    }

    #[test]
    fn smeared_commutator_is_overlap() {
        // [a_F, a_G^dag] = <F,G> 1 on the block below the cutoff.
        let sp = unit_space(2, 5);
        let f =
            SpectralVector::from_folded(sp.grid(), vec![c64(0.6, 0.1), c64(0.2, -0.4)]).unwrap();
        let g =
            SpectralVector::from_folded(sp.grid(), vec![c64(-0.3, 0.2), c64(0.9, 0.5)]).unwrap();
        let (af, _) = sp.smeared_ladder(&f).unwrap();
        let (_, agdag) = sp.smeared_ladder(&g).unwrap();
        let comm = af.commutator(&agdag);
        let mu = f.inner(&g).unwrap();
        let expect = SparseOperator::identity(sp.dim()).scale(mu);
        let safe = sp.block_end(sp.cutoff() - 1);
        assert!(comm.sub(&expect).max_abs_on_block(safe, safe) < 1e-13);
    }

    #[test]
    fn fock_state_examples() {
        let sp = unit_space(2, 4);
        // n = 0 is the vacuum.
        let f = SpectralVector::from_folded(sp.grid(), vec![C64::ONE, C64::ZERO]).unwrap();
        let v0 = sp.fock_state(0, &f).unwrap();
        assert!((v0[0] - C64::ONE).norm() < 1e-15);
        // n = 1 with F = e_1 is the |0,1> basis state.
        let e1 = SpectralVector::from_folded(sp.grid(), vec![C64::ZERO, C64::ONE]).unwrap();
        let v1 = sp.fock_state(1, &e1).unwrap();
        let idx = sp.index_of(&[0, 1]).unwrap();
        assert!((v1[idx] - C64::ONE).norm() < 1e-15);
        // n = 2 with the balanced spectrum.
        let s = 0.5f64.sqrt();
        let fb = SpectralVector::from_folded(sp.grid(), vec![c64(s, 0.0), c64(s, 0.0)]).unwrap();
        let v2 = sp.fock_state(2, &fb).unwrap();
        assert!((v2[sp.index_of(&[2, 0]).unwrap()] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!((v2[sp.index_of(&[1, 1]).unwrap()] - c64(s, 0.0)).norm() < 1e-14);
        assert!((v2[sp.index_of(&[0, 2]).unwrap()] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!((norm(&v2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_state_is_number_eigenvector() {
        let sp = unit_space(2, 5);
        let f = SpectralVector::from_folded(sp.grid(), vec![c64(0.6, 0.0), c64(0.0, 0.8)])
            .unwrap();
        let nop = sp.number_operator();
        for n in 0..=4usize {
            let v = sp.fock_state(n, &f).unwrap();
            let mut resid = nop.apply(&v);
            axpy(&mut resid, c64(-(n as f64), 0.0), &v);
            assert!(norm(&resid) < 1e-12);
        }
    }

    #[test]
    fn fock_state_rejects_unnormalized() {
        let sp = unit_space(1, 3);
        let f = SpectralVector::from_folded(sp.grid(), vec![c64(2.0, 0.0)]).unwrap();
        assert!(matches!(
            sp.fock_state(1, &f),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            sp.fock_state(4, &f.normalized().unwrap()),
            Err(Error::CutoffExceeded { .. })
        ));
    }

    #[test]
    fn closed_overlap_matches_explicit() {
        let sp = unit_space(2, 4);
        let f = SpectralVector::from_folded(sp.grid(), vec![c64(0.6, 0.0), c64(0.8, 0.0)])
            .unwrap();
        let g = SpectralVector::from_folded(sp.grid(), vec![c64(1.0, 0.0), C64::ZERO]).unwrap();
        for m in 0..=3usize {
            for n in 0..=3usize {
                let closed = fock_overlap_closed(m, &f, n, &g).unwrap();
                let vm = sp.fock_state(m, &f).unwrap();
                let vn = sp.fock_state(n, &g).unwrap();
                assert!((closed - dot(&vm, &vn)).norm() < 1e-12);
            }
        }
        // delta_mn kills mixed occupation numbers.
        assert_eq!(fock_overlap_closed(1, &f, 2, &g).unwrap(), C64::ZERO);
        // m = n = 3 at overlap 0.5 gives 0.125 (built with real spectra).
        let h = SpectralVector::from_folded(
            sp.grid(),
            vec![c64(0.5, 0.0), c64(0.75f64.sqrt(), 0.0)],
        )
        .unwrap();
        let closed = fock_overlap_closed(3, &g, 3, &h).unwrap();
        assert!((closed - c64(0.125, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn divergence_probe_scales_as_inverse_weight_power() {
        let g1 = ModeGrid::new(&[[0.0, 0.0, 1.0]], &[0], (2.0 * std::f64::consts::PI).powi(3))
            .unwrap();
        let sp1 = FockSpace::new(&g1, 2);
        assert!((sp1.fixed_momentum_divergence_probe(0, 2).unwrap() - 1.0).abs() < 1e-12);
        let g2 = ModeGrid::new(&[[0.0, 0.0, 2.0]], &[0], (2.0 * std::f64::consts::PI).powi(3))
            .unwrap();
        let sp2 = FockSpace::new(&g2, 2);
        assert!((sp2.fixed_momentum_divergence_probe(0, 2).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn incompleteness_probe_is_zero_on_basis_spectra() {
        let sp = unit_space(2, 3);
        let worst = sp.discrete_incompleteness_probe(0, 1).unwrap();
        assert!(worst < 1e-14);
        assert!(matches!(
            sp.discrete_incompleteness_probe(1, 1),
            Err(Error::EqualModes { .. })
        ));
        // A non-basis spectrum does overlap: <2_F | 1,1> = 1/sqrt(2).
        let s = 0.5f64.sqrt();
        let f = SpectralVector::from_folded(sp.grid(), vec![c64(s, 0.0), c64(s, 0.0)]).unwrap();
        let v2 = sp.fock_state(2, &f).unwrap();
        let psi = sp.basis_state(&[1, 1]).unwrap();
        assert!((dot(&v2, &psi).norm() - s).abs() < 1e-12);
    }
}
