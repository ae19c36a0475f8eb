//! Fixed-spectrum coherent states via two independent constructions.
//!
//! The expansion route sums exp(-|alpha|^2/2) alpha^n / sqrt(n!) over
//! fixed-spectrum Fock states; the displacement route applies
//! exp(a_alpha^dag - a_alpha) to the vacuum as a matrix exponential. They
//! agree up to the truncated Poisson tail, which is computed exactly and
//! enforced as a precondition.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::grid::SpectralVector;
use crate::sparse::exp_apply;
use crate::{c64, C64};

/// A coherent amplitude attached to a normalized spectrum. The state's
/// spectral amplitude vector is alpha_i = alpha * F_i, so
/// ||alpha_vector||^2 = |alpha|^2.
#[derive(Debug, Clone)]
pub struct CoherentSpec {
    alpha: C64,
    spectrum: SpectralVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Fock expansion with Poisson amplitudes.
    Expansion,
    /// Matrix exponential of the displacement generator on the vacuum.
    Displacement,
}

/// Closed-form overlap of two coherent specs in its two algebraically equal
/// shapes.
#[derive(Debug, Clone, Copy)]
pub struct CoherentOverlap {
    /// exp(-|alpha|^2/2 - |beta|^2/2 + <alpha, beta>).
    pub value: C64,
    /// exp(-distance/2) * exp(i Theta).
    pub factored: C64,
    /// ||alpha_vec - beta_vec||^2.
    pub distance: f64,
    /// Theta = Im <alpha_vec, beta_vec>.
    pub phase: f64,
}

/// Both sides of the metric identity d = -ln |<alpha_F|beta_G>|^2.
#[derive(Debug, Clone, Copy)]
pub struct CoherentMetric {
    pub distance: f64,
    pub minus_log_overlap: f64,
    pub abs_difference: f64,
}

impl CoherentSpec {
    pub fn new(alpha: C64, spectrum: SpectralVector) -> Result<Self> {
        spectrum.check_normalized(1e-12)?;
        Ok(CoherentSpec { alpha, spectrum })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn spectrum(&self) -> &SpectralVector {
        &self.spectrum
    }

    pub fn alpha_vector(&self) -> SpectralVector {
        self.spectrum.scale(self.alpha)
    }
}

/// Exact Poisson tail Sum_{n > n_max} e^{-lambda} lambda^n / n! with
/// lambda = |alpha|^2, the squared norm the truncation drops.
pub fn poisson_tail(lambda: f64, n_max: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let mut term = (-lambda).exp();
    let mut cdf = term;
    for n in 1..=n_max {
        term *= lambda / n as f64;
        cdf += term;
    }
    (1.0 - cdf).max(0.0)
}

/// Builds the coherent state by the requested construction. Errors when the
/// dropped Poisson tail exceeds 1e-8.
pub fn coherent_state(
    space: &Arc<FockSpace>,
    spec: &CoherentSpec,
    construction: Construction,
) -> Result<Vec<C64>> {
    let lambda = spec.alpha.norm_sqr();
    let tail = poisson_tail(lambda, space.cutoff());
    if tail >= 1e-8 {
        return Err(Error::TruncationTail { tail, bound: 1e-8 });
    }
    match construction {
        Construction::Expansion => {
            let mut out = vec![C64::ZERO; space.dim()];
            let mut fock_n = space.vacuum();
            // coeff_n = e^{-lambda/2} alpha^n / sqrt(n!), built iteratively.
            let mut coeff = c64((-0.5 * lambda).exp(), 0.0);
            for n in 0..=space.cutoff() {
                if n > 0 {
                    coeff *= spec.alpha / (n as f64).sqrt();
                    fock_n = space.apply_smeared_creator(&spec.spectrum, &fock_n);
                    let inv = 1.0 / (n as f64).sqrt();
                    for a in &mut fock_n {
                        *a *= inv;
                    }
                }
                for (o, fm) in out.iter_mut().zip(&fock_n) {
                    *o += coeff * fm;
                }
            }
            Ok(out)
        }
        Construction::Displacement => {
            let alpha_vec = spec.alpha_vector();
            let (a_alpha, a_alpha_dag) = space.smeared_ladder(&alpha_vec)?;
            let generator = a_alpha_dag.sub(&a_alpha);
            Ok(exp_apply(&generator, &space.vacuum(), 1e-14))
        }
    }
}

/// Inner product of two fixed-spectrum coherent states in closed form,
/// exposing both the direct exponent and the metric-phase factorization.
pub fn coherent_overlap_closed(a: &CoherentSpec, b: &CoherentSpec) -> Result<CoherentOverlap> {
    let av = a.alpha_vector();
    let bv = b.alpha_vector();
    let inner = av.inner(&bv)?;
    let exponent = -0.5 * a.alpha.norm_sqr() - 0.5 * b.alpha.norm_sqr();
    let value = (c64(exponent, 0.0) + inner).exp();
    let metric = av.norm_metric(&bv)?;
    let factored = c64(-0.5 * metric.distance, 0.0).exp() * c64(0.0, metric.phase).exp();
    Ok(CoherentOverlap {
        value,
        factored,
        distance: metric.distance,
        phase: metric.phase,
    })
}

/// Both routes to the metric distance between two coherent specs: the
/// direct spectral distance and -ln |overlap|^2.
pub fn coherent_metric(a: &CoherentSpec, b: &CoherentSpec) -> Result<CoherentMetric> {
    let overlap = coherent_overlap_closed(a, b)?;
    let minus_log = -overlap.value.norm_sqr().ln();
    Ok(CoherentMetric {
        distance: overlap.distance,
        minus_log_overlap: minus_log,
        abs_difference: (overlap.distance - minus_log).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{axpy, dot, norm};
    use crate::grid::ModeGrid;

    fn spec_on(grid: &Arc<ModeGrid>, alpha: C64, coeffs: Vec<C64>) -> CoherentSpec {
        let f = SpectralVector::from_folded(grid, coeffs)
            .unwrap()
            .normalized()
            .unwrap();
        CoherentSpec::new(alpha, f).unwrap()
    }

    #[test]
    fn zero_alpha_is_vacuum_both_ways() {
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, 6);
        let spec = spec_on(&grid, C64::ZERO, vec![c64(0.6, 0.0), c64(0.8, 0.0)]);
        for construction in [Construction::Expansion, Construction::Displacement] {
            let v = coherent_state(&sp, &spec, construction).unwrap();
            let mut resid = v.clone();
            axpy(&mut resid, -C64::ONE, &sp.vacuum());
            assert!(norm(&resid) < 1e-12);
        }
    }

    #[test]
    fn single_mode_poisson_amplitudes() {
        // M = 1, alpha = 0.5: amplitude on |n> is e^{-0.125} 0.5^n / sqrt(n!).
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, 20);
        let spec = spec_on(&grid, c64(0.5, 0.0), vec![C64::ONE]);
        let v = coherent_state(&sp, &spec, Construction::Expansion).unwrap();
        let mut fact = 1.0;
        for n in 0..=6usize {
            if n > 0 {
                fact *= n as f64;
            }
            let expect = (-0.125f64).exp() * 0.5f64.powi(n as i32) / fact.sqrt();
            let idx = sp.index_of(&[n as u32]).unwrap();
            assert!((v[idx] - c64(expect, 0.0)).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn constructions_agree() {
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, 20);
        let spec = spec_on(
            &grid,
            c64(0.8, 0.0),
            vec![c64(0.6, 0.0), c64(0.8, 0.0)],
        );
        let ve = coherent_state(&sp, &spec, Construction::Expansion).unwrap();
        let vd = coherent_state(&sp, &spec, Construction::Displacement).unwrap();
        let mut resid = ve.clone();
        axpy(&mut resid, -C64::ONE, &vd);
        assert!(norm(&resid) < 1e-7, "residual {}", norm(&resid));
        // Complex alpha too.
        let spec2 = spec_on(&grid, c64(0.3, -0.6), vec![c64(0.0, 1.0), c64(1.0, 0.0)]);
        let ve2 = coherent_state(&sp, &spec2, Construction::Expansion).unwrap();
        let vd2 = coherent_state(&sp, &spec2, Construction::Displacement).unwrap();
        let mut resid2 = ve2;
        axpy(&mut resid2, -C64::ONE, &vd2);
        assert!(norm(&resid2) < 1e-7);
    }

    #[test]
    fn tail_precondition_enforced() {
        let grid = ModeGrid::unit(1);
        let sp = FockSpace::new(&grid, 4);
        let spec = spec_on(&grid, c64(3.0, 0.0), vec![C64::ONE]);
        assert!(matches!(
            coherent_state(&sp, &spec, Construction::Expansion),
            Err(Error::TruncationTail { .. })
        ));
    }

    #[test]
    fn overlap_closed_examples() {
        let grid = ModeGrid::unit(2);
        let f = spec_on(&grid, c64(1.0, 0.0), vec![C64::ONE, C64::ZERO]);
        // a = b gives 1.
        let o = coherent_overlap_closed(&f, &f).unwrap();
        assert!((o.value - C64::ONE).norm() < 1e-14);
        // Orthogonal unit amplitudes give e^{-1}.
        let g = spec_on(&grid, c64(1.0, 0.0), vec![C64::ZERO, C64::ONE]);
        let o2 = coherent_overlap_closed(&f, &g).unwrap();
        assert!((o2.value - c64((-1.0f64).exp(), 0.0)).norm() < 1e-13);
        // The two algebraic forms agree.
        assert!((o2.value - o2.factored).norm() < 1e-12);
    }

    #[test]
    fn overlap_closed_matches_truncated_inner_product() {
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, 25);
        let a = spec_on(&grid, c64(0.7, 0.3), vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let b = spec_on(&grid, c64(-0.2, 0.9), vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        let closed = coherent_overlap_closed(&a, &b).unwrap().value;
        let va = coherent_state(&sp, &a, Construction::Expansion).unwrap();
        let vb = coherent_state(&sp, &b, Construction::Expansion).unwrap();
        assert!((closed - dot(&va, &vb)).norm() < 1e-7);
    }

    #[test]
    fn metric_identity_and_square_law() {
        let grid = ModeGrid::unit(2);
        let a = spec_on(&grid, c64(0.9, -0.1), vec![c64(0.3, 0.4), c64(0.5, -0.2)]);
        let b = spec_on(&grid, c64(0.2, 0.6), vec![c64(1.0, 0.0), c64(0.0, 1.0)]);
        let m = coherent_metric(&a, &b).unwrap();
        assert!(m.abs_difference < 1e-10);
        let o = coherent_overlap_closed(&a, &b).unwrap();
        assert!((o.value.norm_sqr() - (-m.distance).exp()).abs() < 1e-12);
        // Identical specs: distance zero.
        assert!(coherent_metric(&a, &a).unwrap().distance < 1e-14);
    }

    #[test]
    fn metric_distance_example() {
        // alpha_vec = (1,0), beta_vec = (0,1): distance 2.
        let grid = ModeGrid::unit(2);
        let a = spec_on(&grid, c64(1.0, 0.0), vec![C64::ONE, C64::ZERO]);
        let b = spec_on(&grid, c64(1.0, 0.0), vec![C64::ZERO, C64::ONE]);
        assert!((coherent_metric(&a, &b).unwrap().distance - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt_metric_triangle_inequality() {
        let grid = ModeGrid::unit(2);
        let specs = [
            spec_on(&grid, c64(0.5, 0.2), vec![c64(0.8, 0.0), c64(0.0, 0.6)]),
            spec_on(&grid, c64(-0.3, 0.7), vec![c64(0.6, 0.1), c64(0.4, -0.5)]),
            spec_on(&grid, c64(0.1, -0.9), vec![C64::ONE, C64::ONE]),
        ];
        let d = |i: usize, j: usize| {
            coherent_metric(&specs[i], &specs[j])
                .unwrap()
                .distance
                .sqrt()
        };
        assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
        assert!(d(0, 1) <= d(0, 2) + d(2, 1) + 1e-12);
    }

    #[test]
    fn phase_vanishes_for_real_vectors() {
        let grid = ModeGrid::unit(2);
        let a = spec_on(&grid, c64(0.7, 0.0), vec![c64(0.6, 0.0), c64(0.8, 0.0)]);
        let b = spec_on(&grid, c64(1.2, 0.0), vec![c64(1.0, 0.0), c64(3.0, 0.0)]);
        let o = coherent_overlap_closed(&a, &b).unwrap();
        assert!(o.phase.abs() < 1e-14);
        assert!(o.value.im.abs() < 1e-14);
    }

    #[test]
    fn eigenstate_property_on_safe_block() {
        // a_F |alpha_F> = alpha |alpha_F> below the cutoff, up to the tail.
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, 22);
        let spec = spec_on(&grid, c64(0.6, 0.4), vec![c64(0.6, 0.0), c64(0.8, 0.0)]);
        let v = coherent_state(&sp, &spec, Construction::Expansion).unwrap();
        let (af, _) = sp.smeared_ladder(spec.spectrum()).unwrap();
        let mut resid = af.apply(&v);
        axpy(&mut resid, -spec.alpha(), &v);
        let cut = sp.block_end(sp.cutoff() - 1);
        let block: f64 = resid[..cut].iter().map(|x| x.norm_sqr()).sum();
        assert!(block.sqrt() < 1e-9);
    }

    #[test]
    fn displacement_preserves_vacuum_norm() {
        // The displacement generator is anti-Hermitian, so its exponential
        // is unitary; applied to the vacuum the norm stays 1 up to the
        // exponential-action tolerance and the Poisson tail.
        let grid = ModeGrid::unit(2);
        let sp = FockSpace::new(&grid, 22);
        let spec = spec_on(&grid, c64(0.7, -0.5), vec![c64(0.6, 0.2), c64(0.3, -0.7)]);
        let v = coherent_state(&sp, &spec, Construction::Displacement).unwrap();
        assert!((norm(&v) - 1.0).abs() < 1e-9, "norm {}", norm(&v));
    }

    #[test]
    fn poisson_tail_values() {
        assert_eq!(poisson_tail(0.0, 5), 0.0);
        // lambda = 1, n_max = 2: 1 - e^{-1}(1 + 1 + 0.5).
        let expect = 1.0 - (-1.0f64).exp() * 2.5;
        assert!((poisson_tail(1.0, 2) - expect).abs() < 1e-14);
    }
}
