//! Property tests for the invariant-operator algebra, fundamental solutions and
//! seeded test functions.

use std::sync::Arc;

use harmonia::bumps::BumpMixture;
use harmonia::operators::{fundamental_solution, identify_operator};
use harmonia::radial::{apply_polynomial, LaplacePolynomial, RadialGrid, RadialProfile};
use harmonia::ModelSpace;
use proptest::prelude::*;

fn spaces() -> impl Strategy<Value = ModelSpace> {
    prop_oneof![
        Just(ModelSpace::euclidean(3).unwrap()),
        Just(ModelSpace::hyperbolic(2).unwrap()),
        Just(ModelSpace::hyperbolic(3).unwrap()),
        Just(ModelSpace::damek_ricci(2, 1).unwrap()),
    ]
}

fn coefficients(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..=max_degree + 1)
}

/// A seeded bump on the default radial grid.
fn test_profile(seed: u64) -> RadialProfile {
    let grid = Arc::new(RadialGrid::new(8.0, 257).unwrap());
    BumpMixture::centered(seed, 2).profile(grid)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn invariant_operators_commute(space in spaces(), p in coefficients(2), q in coefficients(2), seed in any::<u64>()) {
        let p = LaplacePolynomial::from_real(&p).unwrap();
        let q = LaplacePolynomial::from_real(&q).unwrap();
        let u = test_profile(seed);
        let pq = apply_polynomial(&space, &p, &apply_polynomial(&space, &q, &u).unwrap()).unwrap();
        let qp = apply_polynomial(&space, &q, &apply_polynomial(&space, &p, &u).unwrap()).unwrap();
        let scale = pq.sup_norm().max(u.sup_norm());
        let diff = pq.max_abs_diff(&qp).unwrap();
        prop_assert!(diff <= 1e-8 * scale, "{diff:.3e} vs scale {scale:.3e}");
    }

    #[test]
    fn identify_inverts_apply(space in spaces(), mut coeffs in coefficients(3)) {
        let last = coeffs.len() - 1;
        if coeffs[last].abs() < 0.5 {
            coeffs[last] = 0.5f64.copysign(coeffs[last]);
        }
        let p = LaplacePolynomial::from_real(&coeffs).unwrap();
        let found = identify_operator(&space, |u| apply_polynomial(&space, &p, u), 3).unwrap();
        prop_assert!(found.max_coeff_diff(&p) <= 1e-6, "{found} vs {p}");
    }

    #[test]
    fn fundamental_solution_is_even(c in 0.1..4.0f64, s in 0.0..6.0f64) {
        let space = ModelSpace::hyperbolic(3).unwrap();
        let p = LaplacePolynomial::from_real(&[-c, 1.0]).unwrap();
        let f = fundamental_solution(&space, &p).unwrap();
        let (a, b) = (f.line_value(s), f.line_value(-s));
        prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1e-300));
    }

    #[test]
    fn bump_mixtures_are_reproducible(seed in any::<u64>(), count in 1usize..5) {
        let grid = Arc::new(RadialGrid::new(8.0, 65).unwrap());
        let first = BumpMixture::seeded(seed, count);
        let second = BumpMixture::seeded(seed, count);
        prop_assert_eq!(&first, &second);
        let (u, v) = (first.profile(grid.clone()), second.profile(grid));
        prop_assert!(u.values().iter().zip(v.values()).all(|(a, b)| a.re.to_bits() == b.re.to_bits()));
        prop_assert_eq!(BumpMixture::centered(seed, count).components.iter().map(|b| b.center).sum::<f64>(), 0.0);
    }
}
