//! Discretized momentum/spin mode set with covariant measure weights.
//!
//! A continuum integral with the covariant measure `d^3k / ((2pi)^3 omega)`
//! is replaced by a finite weighted sum over `(k, spin)` samples. Spectral
//! functions are stored in *folded* coordinates: the square root of the
//! measure weight is absorbed into each coefficient, so every continuum
//! integral in the identities we verify becomes a plain Euclidean sum and
//! the per-mode ladder operators have unit commutators. The units are fixed
//! by c = 1.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// One discretized mode: a wave-vector sample, a spin index and the
/// covariant measure weight carried by the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: [f64; 3],
    pub spin: u32,
    pub weight: f64,
}

impl Mode {
    /// Dispersion omega = |k| (c = 1).
    pub fn omega(&self) -> f64 {
        let [x, y, z] = self.k;
        (x * x + y * y + z * z).sqrt()
    }
}

/// Finite ordered set of modes. Ordering is fixed at construction and
/// serves as the canonical index 0..M-1 for everything downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    modes: Vec<Mode>,
}

impl ModeGrid {
    /// Builds a grid from wave-vector samples, one spin index per sample and
    /// a common cell volume. The weight of mode i is
    /// `cell_volume / ((2pi)^3 |k_i|)`.
    ///
    /// Rejects empty sample lists and zero wave vectors (omega = 0 makes the
    /// measure singular).
    pub fn new(k_samples: &[[f64; 3]], spins: &[u32], cell_volume: f64) -> Result<Arc<Self>> {
        if k_samples.is_empty() {
            return Err(Error::InvalidConfig("empty mode list".into()));
        }
        if spins.len() != k_samples.len() {
            return Err(Error::LengthMismatch {
                expected: k_samples.len(),
                got: spins.len(),
            });
        }
        if !cell_volume.is_finite() || cell_volume <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "cell volume must be positive, got {cell_volume}"
            )));
        }
        let mut modes = Vec::with_capacity(k_samples.len());
        for (&k, &spin) in k_samples.iter().zip(spins) {
            let omega = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            if omega == 0.0 {
                return Err(Error::ZeroWaveVector);
            }
            modes.push(Mode {
                k,
                spin,
                weight: cell_volume / (TWO_PI.powi(3) * omega),
            });
        }
        for i in 0..modes.len() {
            for j in (i + 1)..modes.len() {
                if modes[i].k == modes[j].k && modes[i].spin == modes[j].spin {
                    return Err(Error::InvalidConfig(format!(
                        "duplicate (k, spin) pair at indices {i} and {j}"
                    )));
                }
            }
        }
        Ok(Arc::new(ModeGrid { modes }))
    }

    /// Grid of `m` unit-weight modes (|k| = 1 along z with distinct spins,
    /// cell volume (2pi)^3). Convenient in tests where the measure plays no
    /// role.
    pub fn unit(m: usize) -> Arc<Self> {
        let ks = vec![[0.0, 0.0, 1.0]; m];
        let spins: Vec<u32> = (0..m as u32).collect();
        Self::new(&ks, &spins, TWO_PI.powi(3)).expect("unit grid")
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, i: usize) -> &Mode {
        &self.modes[i]
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.modes[i].weight
    }

    /// Half the regularized delta(0) volume: Omega = M/2 on an M-mode grid.
    pub fn zero_point_constant(&self) -> f64 {
        self.modes.len() as f64 / 2.0
    }

    pub fn from_config(cfg: &GridConfig) -> Result<Arc<Self>> {
        let ks: Vec<[f64; 3]> = cfg.modes.iter().map(|m| m.k).collect();
        let spins: Vec<u32> = cfg.modes.iter().map(|m| m.spin).collect();
        Self::new(&ks, &spins, cfg.cell_volume)
    }

    pub fn load_config(path: &std::path::Path) -> Result<Arc<Self>> {
        let text = std::fs::read_to_string(path)?;
        let cfg: GridConfig = serde_json::from_str(&text)?;
        Self::from_config(&cfg)
    }
}

/// On-disk grid description (JSON). See the repository README for the schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub cell_volume: f64,
    pub modes: Vec<GridConfigMode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfigMode {
    pub k: [f64; 3],
    #[serde(default)]
    pub spin: u32,
}

fn same_grid(a: &Arc<ModeGrid>, b: &Arc<ModeGrid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Complex spectral coefficients in folded coordinates
/// (`coeff_i = F(k_i) * sqrt(weight_i)`).
#[derive(Debug, Clone)]
pub struct SpectralVector {
    grid: Arc<ModeGrid>,
    coeffs: Vec<C64>,
}

/// Outcome of [`SpectralVector::norm_metric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormMetric {
    /// ||A||^2.
    pub norm2: f64,
    /// Sum_i |A_i - B_i|^2.
    pub distance: f64,
    /// Theta = Im <A, B>.
    pub phase: f64,
}

impl SpectralVector {
    /// Folds raw samples `F(k_i)` with the square roots of the grid weights.
    /// After folding, continuum inner products are plain coefficient sums.
    pub fn embed(grid: &Arc<ModeGrid>, samples: &[C64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        let coeffs = samples
            .iter()
            .zip(grid.modes())
            .map(|(s, m)| s * m.weight.sqrt())
            .collect();
        Ok(SpectralVector {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Wraps coefficients that are already in folded coordinates.
    pub fn from_folded(grid: &Arc<ModeGrid>, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralVector {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Folded unit vector on mode `j` (the j-th basis-mode spectrum).
    pub fn basis_mode(grid: &Arc<ModeGrid>, j: usize) -> Result<Self> {
        if j >= grid.len() {
            return Err(Error::ModeOutOfRange {
                index: j,
                modes: grid.len(),
            });
        }
        let mut coeffs = vec![C64::ZERO; grid.len()];
        coeffs[j] = C64::ONE;
        Self::from_folded(grid, coeffs)
    }

    pub fn grid(&self) -> &Arc<ModeGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// <F, G> = Sum_i conj(F_i) G_i.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Norm, metric distance and relative phase of a pair of spectra.
    pub fn norm_metric(&self, other: &Self) -> Result<NormMetric> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        let distance = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(NormMetric {
            norm2: self.norm2(),
            distance,
            phase: self.inner(other)?.im,
        })
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm2().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        Ok(SpectralVector {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
        })
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let dev = (self.norm2() - 1.0).abs();
        if dev > tol {
            return Err(Error::NotNormalized { deviation: dev });
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Self {
        SpectralVector {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

/// Real spectral coefficients in folded coordinates. Houses eigenvalue
/// functions of Hermitian quadrature operators, which are real by
/// construction.
#[derive(Debug, Clone)]
pub struct RealSpectralVector {
    grid: Arc<ModeGrid>,
    coeffs: Vec<f64>,
}

impl RealSpectralVector {
    pub fn from_folded(grid: &Arc<ModeGrid>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(RealSpectralVector {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    pub fn zero(grid: &Arc<ModeGrid>) -> Self {
        RealSpectralVector {
            grid: Arc::clone(grid),
            coeffs: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<ModeGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm2(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Magnitude x and normalized direction, so that `self = x * direction`
    /// with the direction normalized in the real sense. The zero vector
    /// returns magnitude 0 and the first basis mode as direction.
    pub fn magnitude_direction(&self) -> (f64, RealSpectralVector) {
        let x = self.norm2().sqrt();
        if x == 0.0 {
            let mut coeffs = vec![0.0; self.coeffs.len()];
            coeffs[0] = 1.0;
            return (
                0.0,
                RealSpectralVector {
                    grid: Arc::clone(&self.grid),
                    coeffs,
                },
            );
        }
        (
            x,
            RealSpectralVector {
                grid: Arc::clone(&self.grid),
                coeffs: self.coeffs.iter().map(|c| c / x).collect(),
            },
        )
    }

    pub fn as_complex(&self) -> SpectralVector {
        SpectralVector {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn single_mode_unit_weight() {
        let g = ModeGrid::new(&[[0.0, 0.0, 1.0]], &[0], TWO_PI.powi(3)).unwrap();
        assert!((g.weight(0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weights_scale_with_inverse_omega() {
        let g = ModeGrid::new(&[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]], &[0, 0], TWO_PI.powi(3))
            .unwrap();
        assert!((g.weight(0) - 1.0).abs() < 1e-14);
        assert!((g.weight(1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_wave_vector_rejected() {
        let err = ModeGrid::new(&[[0.0, 0.0, 0.0]], &[0], 1.0).unwrap_err();
        assert!(matches!(err, Error::ZeroWaveVector));
    }

    #[test]
    fn embed_folds_sqrt_weight() {
        let g = ModeGrid::new(&[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]], &[0, 0], TWO_PI.powi(3))
            .unwrap();
        let v = SpectralVector::embed(&g, &[c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
        assert!((v.coeffs()[0] - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((v.coeffs()[1] - c64(0.5f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn embed_rejects_length_mismatch() {
        let g = ModeGrid::unit(2);
        let err = SpectralVector::embed(&g, &[C64::ONE; 3]).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn inner_product_examples() {
        let g = ModeGrid::unit(2);
        let f = SpectralVector::from_folded(&g, vec![c64(1.0, 0.0), C64::ZERO]).unwrap();
        let e1 = SpectralVector::from_folded(&g, vec![C64::ZERO, c64(1.0, 0.0)]).unwrap();
        let h = SpectralVector::from_folded(&g, vec![c64(0.6, 0.0), c64(0.8, 0.0)]).unwrap();
        assert!((f.inner(&f).unwrap() - C64::ONE).norm() < 1e-14);
        assert!(f.inner(&e1).unwrap().norm() < 1e-14);
        assert!((f.inner(&h).unwrap() - c64(0.6, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn norm_metric_examples() {
        let g = ModeGrid::unit(2);
        let a = SpectralVector::from_folded(&g, vec![c64(1.0, 0.0), C64::ZERO]).unwrap();
        let b = SpectralVector::from_folded(&g, vec![C64::ZERO, c64(1.0, 0.0)]).unwrap();
        let m = a.norm_metric(&b).unwrap();
        assert!((m.distance - 2.0).abs() < 1e-14);
        assert!(m.phase.abs() < 1e-14);
        let ib = SpectralVector::from_folded(&g, vec![c64(0.0, 1.0), C64::ZERO]).unwrap();
        let m2 = a.norm_metric(&ib).unwrap();
        assert!((m2.phase - 1.0).abs() < 1e-14);
        assert!((a.norm_metric(&a).unwrap().distance).abs() < 1e-14);
    }

    #[test]
    fn metric_polarization_identity() {
        // distance = |A|^2 + |B|^2 - 2 Re <A,B>, exactly.
        let g = ModeGrid::unit(3);
        let a = SpectralVector::from_folded(&g, vec![c64(0.3, 0.1), c64(-0.2, 0.4), c64(0.0, 0.9)])
            .unwrap();
        let b = SpectralVector::from_folded(&g, vec![c64(-1.0, 0.2), c64(0.5, 0.5), c64(0.1, 0.0)])
            .unwrap();
        let m = a.norm_metric(&b).unwrap();
        let rhs = a.norm2() + b.norm2() - 2.0 * a.inner(&b).unwrap().re;
        assert!((m.distance - rhs).abs() < 1e-12);
    }

    #[test]
    fn weight_folding_consistency() {
        // Sum samples_i * conj(samples_i) * weight_i == |embedded|^2.
        let g = ModeGrid::new(
            &[[0.1, 0.0, 1.0], [0.0, 0.3, 2.0], [1.0, 1.0, 1.0]],
            &[0, 0, 1],
            2.7,
        )
        .unwrap();
        let samples = [c64(0.4, -0.3), c64(1.2, 0.8), c64(-0.5, 0.1)];
        let v = SpectralVector::embed(&g, &samples).unwrap();
        let direct: f64 = samples
            .iter()
            .zip(g.modes())
            .map(|(s, m)| s.norm_sqr() * m.weight)
            .sum();
        assert!((direct - v.norm2()).abs() < 1e-12);
    }

    #[test]
    fn grid_config_loads_from_file() {
        let path = std::env::temp_dir().join(format!("stquad-grid-{}.json", std::process::id()));
        std::fs::write(
            &path,
            r#"{"cell_volume": 2.0, "modes": [{"k": [0.0, 0.0, 1.0]}, {"k": [0.0, 2.0, 0.0], "spin": 1}]}"#,
        )
        .unwrap();
        let g = ModeGrid::load_config(&path).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.mode(0).spin, 0);
        assert_eq!(g.mode(1).spin, 1);
        assert!((g.weight(1) - 1.0 / (TWO_PI.powi(3))).abs() < 1e-14);
        let _ = std::fs::remove_file(&path);
    }

    #[test]
    fn grid_config_roundtrip() {
        let cfg = GridConfig {
            cell_volume: 1.5,
            modes: vec![
                GridConfigMode {
                    k: [0.0, 0.0, 1.0],
                    spin: 0,
                },
                GridConfigMode {
                    k: [0.0, 1.0, 0.0],
                    spin: 1,
                },
            ],
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: GridConfig = serde_json::from_str(&text).unwrap();
        let g = ModeGrid::from_config(&back).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g.weight(0) - 1.5 / TWO_PI.powi(3)).abs() < 1e-14);
    }
}
