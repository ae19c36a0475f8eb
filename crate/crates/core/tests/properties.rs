//! Property tests over randomized spectra and amplitudes.

use std::sync::Arc;

use proptest::prelude::*;

use stquad_core::coherent::{coherent_metric, coherent_overlap_closed, CoherentSpec};
use stquad_core::fock::{dot, FockSpace};
use stquad_core::grid::{ModeGrid, SpectralVector};
use stquad_core::{c64, C64};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| c64(re, im)).collect())
}

fn grid3() -> Arc<ModeGrid> {
    ModeGrid::unit(3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_conjugate_symmetry(a in complex_vec(3), b in complex_vec(3)) {
        let grid = grid3();
        let fa = SpectralVector::from_folded(&grid, a).unwrap();
        let fb = SpectralVector::from_folded(&grid, b).unwrap();
        let ab = fa.inner(&fb).unwrap();
        let ba = fb.inner(&fa).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn inner_product_sesquilinearity(
        a in complex_vec(3),
        b in complex_vec(3),
        cvec in complex_vec(3),
        s in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let grid = grid3();
        let s = c64(s.0, s.1);
        let fa = SpectralVector::from_folded(&grid, a.clone()).unwrap();
        let fb = SpectralVector::from_folded(&grid, b.clone()).unwrap();
        let fc = SpectralVector::from_folded(&grid, cvec).unwrap();
        // Linear in the second argument.
        let combo: Vec<C64> = b.iter().zip(fc.coeffs()).map(|(x, y)| x * s + y).collect();
        let fcombo = SpectralVector::from_folded(&grid, combo).unwrap();
        let lhs = fa.inner(&fcombo).unwrap();
        let rhs = s * fa.inner(&fb).unwrap() + fa.inner(&fc).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        // Conjugate-linear in the first argument.
        let scaled_a: Vec<C64> = a.iter().map(|x| x * s).collect();
        let fsa = SpectralVector::from_folded(&grid, scaled_a).unwrap();
        let lhs2 = fsa.inner(&fb).unwrap();
        let rhs2 = s.conj() * fa.inner(&fb).unwrap();
        prop_assert!((lhs2 - rhs2).norm() < 1e-12);
    }

    #[test]
    fn metric_decomposition(a in complex_vec(3), b in complex_vec(3)) {
        let grid = grid3();
        let fa = SpectralVector::from_folded(&grid, a).unwrap();
        let fb = SpectralVector::from_folded(&grid, b).unwrap();
        let m = fa.norm_metric(&fb).unwrap();
        let rhs = fa.norm2() + fb.norm2() - 2.0 * fa.inner(&fb).unwrap().re;
        prop_assert!((m.distance - rhs).abs() < 1e-12);
        prop_assert!(m.distance >= -1e-15);
    }

    #[test]
    fn coherent_overlap_metric_square_law(
        a in complex_vec(2),
        b in complex_vec(2),
        alphas in ((-1.0f64..1.0, -1.0f64..1.0), (-1.0f64..1.0, -1.0f64..1.0)),
    ) {
        let grid = ModeGrid::unit(2);
        let na = SpectralVector::from_folded(&grid, a).unwrap().normalized();
        let nb = SpectralVector::from_folded(&grid, b).unwrap().normalized();
        prop_assume!(na.is_ok() && nb.is_ok());
        let sa = CoherentSpec::new(c64(alphas.0.0, alphas.0.1), na.unwrap()).unwrap();
        let sb = CoherentSpec::new(c64(alphas.1.0, alphas.1.1), nb.unwrap()).unwrap();
        let o = coherent_overlap_closed(&sa, &sb).unwrap();
        // |overlap|^2 = exp(-distance), and the two algebraic forms agree.
        prop_assert!((o.value.norm_sqr() - (-o.distance).exp()).abs() < 1e-12);
        prop_assert!((o.value - o.factored).norm() < 1e-12);
        let m = coherent_metric(&sa, &sb).unwrap();
        prop_assert!(m.abs_difference < 1e-10);
    }

    #[test]
    fn smeared_overlap_closed_form_random_spectra(
        a in complex_vec(2),
        b in complex_vec(2),
        m in 0usize..4,
        n in 0usize..4,
    ) {
        let grid = ModeGrid::unit(2);
        let na = SpectralVector::from_folded(&grid, a).unwrap().normalized();
        let nb = SpectralVector::from_folded(&grid, b).unwrap().normalized();
        prop_assume!(na.is_ok() && nb.is_ok());
        let (f, g) = (na.unwrap(), nb.unwrap());
        let sp = FockSpace::new(&grid, 4);
        let closed = stquad_core::fock::fock_overlap_closed(m, &f, n, &g).unwrap();
        let vm = sp.fock_state(m, &f).unwrap();
        let vn = sp.fock_state(n, &g).unwrap();
        prop_assert!((closed - dot(&vm, &vn)).norm() < 1e-10);
    }

    #[test]
    fn weight_folding_consistency(
        samples in prop::collection::vec(((-2.0f64..2.0), (-2.0f64..2.0)), 3),
        scale in 0.5f64..4.0,
    ) {
        let ks = [[0.3, 0.0, 1.0], [0.0, 1.3, 0.4], [1.0, 1.0, 1.0]];
        let grid = ModeGrid::new(&ks, &[0, 0, 1], scale).unwrap();
        let cs: Vec<C64> = samples.into_iter().map(|(re, im)| c64(re, im)).collect();
        let v = SpectralVector::embed(&grid, &cs).unwrap();
        let direct: f64 = cs
            .iter()
            .zip(grid.modes())
            .map(|(s, m)| s.norm_sqr() * m.weight)
            .sum();
        prop_assert!((direct - v.norm2()).abs() < 1e-12);
    }
}
