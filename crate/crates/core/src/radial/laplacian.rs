//! The radial Laplacian `L_A = d²/dr² + (A'/A) d/dr` on even profiles.
//!
//! In the variable `y = 2(r/R)² - 1`, with `u(r) = g(y)`,
//!
//! ```text
//! L_A u = (16 r²/R⁴) g''(y) + (4/R²) (1 + r A'(r)/A(r)) g'(y)
//! ```
//!
//! and `r A'/A` is smooth with value `n-1` at the origin, so the formula has no
//! singular term and returns `n·u''(0)` at `r = 0` by construction.

use num_complex::Complex64;

use super::grid::{RadialGrid, PARITY_TOLERANCE};
use super::profile::RadialProfile;
use super::series::{compute_pj, LaplacePolynomial};
use crate::error::{Error, Result};
use crate::model_space::ModelSpace;

/// Relative size below which a profile counts as zero for [`laplacian_unchecked`].
const NEGLIGIBLE: f64 = 1e-14;
const MASK_HALF_WIDTH: usize = 4;

/// `L_A u`. Fails with a parity error when `u` is not a resolved even profile.
pub fn apply_radial_laplacian(space: &ModelSpace, u: &RadialProfile) -> Result<RadialProfile> {
    u.check_parity(PARITY_TOLERANCE)?;
    Ok(laplacian_unchecked(space, u))
}

fn laplacian_unchecked(space: &ModelSpace, u: &RadialProfile) -> RadialProfile {
    let grid = u.grid();
    let mut a = u.coefficients().to_vec();
    RadialGrid::chop(&mut a);
    let d1 = RadialGrid::derivative_coefficients(&a);
    let d2 = RadialGrid::derivative_coefficients(&d1);
    let g1 = grid.values_from_coefficients(&d1);
    let g2 = grid.values_from_coefficients(&d2);
    let r_max = grid.r_max();
    let s1 = 4.0 / (r_max * r_max);
    let s2 = 16.0 / r_max.powi(4);
    // L_A is local: where u sits at the rounding floor around a node, so does
    // L_A u, and the spectral derivative there is pure endpoint noise.
    let floor = NEGLIGIBLE * u.sup_norm();
    let input = u.values();
    let len = input.len();
    let values = grid
        .nodes()
        .iter()
        .zip(g1.iter().zip(&g2))
        .enumerate()
        .map(|(i, (&r, (&p1, &p2)))| {
            let window = &input[i.saturating_sub(MASK_HALF_WIDTH)..(i + MASK_HALF_WIDTH + 1).min(len)];
            if window.iter().all(|v| v.norm() <= floor) {
                Complex64::new(0.0, 0.0)
            } else {
                p2 * (s2 * r * r) + p1 * (s1 * (1.0 + space.drift_times_r(r)))
            }
        })
        .collect();
    RadialProfile::new(grid.clone(), values).expect("same grid")
}

/// `P(L_A) u = Σ a_k L_A^k u`, evaluated by Horner's scheme.
///
/// Every intermediate stage is checked for resolution; an unresolved stage
/// (the grid cannot carry `2·deg P` derivatives of `u`) is an accuracy error.
pub fn apply_polynomial(
    space: &ModelSpace,
    p: &LaplacePolynomial,
    u: &RadialProfile,
) -> Result<RadialProfile> {
    u.check_parity(PARITY_TOLERANCE)?;
    let coeffs = p.coeffs();
    let top = *coeffs.last().unwrap_or(&Complex64::new(0.0, 0.0));
    let mut acc = u.scale(top);
    for (stage, &a) in coeffs.iter().rev().skip(1).enumerate() {
        let residual = acc.parity_residual();
        if residual > PARITY_TOLERANCE {
            return Err(Error::Accuracy(format!(
                "stage {} of P(L_A) is unresolved on {} nodes (tail {residual:.2e})",
                stage + 1,
                acc.grid().len()
            )));
        }
        acc = laplacian_unchecked(space, &acc).axpy(a, u)?;
    }
    Ok(acc)
}

/// `u^{(2j)}(0)` for `j = 0..=j_max`, computed as `(P_j(L_A) u)(0)`.
pub fn derivatives_at_zero(
    space: &ModelSpace,
    u: &RadialProfile,
    j_max: usize,
) -> Result<Vec<Complex64>> {
    compute_pj(space, j_max)
        .iter()
        .map(|p| apply_polynomial(space, p, u).map(|v| v.values()[0]))
        .collect()
}

/// `u^{(2j)}(0)` read directly off the Chebyshev expansion in `y`:
/// `u^{(2j)}(0) = (2j)!/j! · (2/R²)^j · g^{(j)}(-1)`.
pub fn taylor_derivatives_at_zero(u: &RadialProfile, j_max: usize) -> Vec<Complex64> {
    let r_max = u.r_max();
    let mut a = u.coefficients().to_vec();
    RadialGrid::chop(&mut a);
    let mut out = Vec::with_capacity(j_max + 1);
    let mut scale = 1.0;
    for j in 0..=j_max {
        if j > 0 {
            // (2j)!/j! grows by (2j)(2j-1)/j = 2(2j-1)
            scale *= 2.0 * (2 * j - 1) as f64 * 2.0 / (r_max * r_max);
            a = RadialGrid::derivative_coefficients(&a);
        }
        out.push(RadialGrid::clenshaw(&a, -1.0) * scale);
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn grid(r_max: f64, n: usize) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::new(r_max, n).unwrap())
    }

    #[test]
    fn euclidean_r_squared_gives_six() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        let u = RadialProfile::from_real_fn(grid(2.0, 17), |r| r * r);
        let lu = apply_radial_laplacian(&e3, &u).unwrap();
        for v in lu.values() {
            assert!((v.re - 6.0).abs() < 1e-12, "{v}");
        }
        let p2 = LaplacePolynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let l2 = apply_polynomial(&e3, &p2, &u).unwrap();
        assert!(l2.sup_norm() < 1e-10);
    }

    #[test]
    fn constants_are_harmonic() {
        for space in [
            ModelSpace::hyperbolic(3).unwrap(),
            ModelSpace::damek_ricci(2, 1).unwrap(),
        ] {
            let u = RadialProfile::from_real_fn(grid(8.0, 65), |_| 1.0);
            assert!(apply_radial_laplacian(&space, &u).unwrap().sup_norm() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_spherical_function_is_eigenfunction() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let phi = |r: f64| if r == 0.0 { 1.0 } else { r.sin() / r.sinh() };
        let u = RadialProfile::from_real_fn(grid(8.0, 257), phi);
        let lu = apply_radial_laplacian(&h3, &u).unwrap();
        for (r, v) in u.nodes().iter().zip(lu.values()) {
            assert!((v.re + 2.0 * phi(*r)).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn origin_value_is_n_times_second_derivative() {
        let h2 = ModelSpace::hyperbolic(2).unwrap();
        // u = exp(-r²): u''(0) = -2
        let u = RadialProfile::from_real_fn(grid(6.0, 129), |r| (-r * r).exp());
        let lu = apply_radial_laplacian(&h2, &u).unwrap();
        assert!((lu.values()[0].re + 4.0).abs() < 1e-9);
    }

    #[test]
    fn odd_input_is_rejected() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let u = RadialProfile::from_real_fn(grid(4.0, 65), |r| r * (-r * r).exp());
        assert!(matches!(apply_radial_laplacian(&h3, &u), Err(Error::Parity { .. })));
    }

    #[test]
    fn derivatives_of_monomials() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        let u = RadialProfile::from_real_fn(grid(2.0, 33), |r| r.powi(4));
        let d = derivatives_at_zero(&e3, &u, 2).unwrap();
        assert!(d[0].norm() < 1e-12 && d[1].norm() < 1e-10);
        assert!((d[2].re - 24.0).abs() < 1e-8);
        let e1 = ModelSpace::euclidean(1).unwrap();
        let c = RadialProfile::from_real_fn(grid(3.0, 65), f64::cos);
        let d = derivatives_at_zero(&e1, &c, 1).unwrap();
        assert!((d[1].re + 1.0).abs() < 1e-10);
        let t = taylor_derivatives_at_zero(&c, 3);
        assert!((t[1].re + 1.0).abs() < 1e-10 && (t[2].re - 1.0).abs() < 1e-8);
    }
}
