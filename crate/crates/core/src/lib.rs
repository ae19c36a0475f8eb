//! Numerical verification toolkit for multimode bosonic state families on
//! finite weighted mode grids.
//!
//! The crate discretizes a continuum of (wave vector, spin) modes onto a
//! [`grid::ModeGrid`] with covariant measure weights, builds truncated Fock
//! spaces with sparse ladder operators ([`fock`]), and constructs the state
//! families defined on top of them: fixed-spectrum Fock states, coherent
//! states ([`coherent`]), fixed-spectrum quadrature states ([`quadrature`])
//! and spatio-temporal quadrature eigenstates ([`stq`]). Every closed-form
//! identity these families satisfy (overlaps, commutation relations,
//! normal-ordering coefficients, completeness conditions) is checked against
//! an independent route: explicit truncated linear algebra, order-by-order
//! recursions, ODE integration ([`bch`]) or Monte-Carlo functional integrals
//! ([`functional`]).
//!
//! The [`report`] module packages the checks into equation-keyed suites with
//! machine-readable JSON/CSV reports; the `verify` binary in the companion
//! CLI crate is a thin wrapper around it.

// Index loops over matched slices read better than zipped chains in the
// dense numeric kernels here.
#![allow(clippy::needless_range_loop)]

pub mod bch;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod functional;
pub mod grid;
pub mod par;
pub mod quadrature;
pub mod report;
pub mod sparse;
pub mod stq;

pub use error::{Error, Result};
pub use grid::{ModeGrid, RealSpectralVector, SpectralVector};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Shorthand for `C64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
