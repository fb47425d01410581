//! Spherical functions φ_λ: closed form on H³, eigen-relation on a Damek–Ricci space.

use std::sync::Arc;

use harmonia::radial::{apply_radial_laplacian, RadialGrid};
use harmonia::spherical::{spherical_function, spherical_values};
use harmonia::ModelSpace;
use num_complex::Complex64;

fn main() -> harmonia::Result<()> {
    let h3 = ModelSpace::hyperbolic(3)?;
    let radii: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64).collect();
    for lambda in [0.5, 1.0, 2.0] {
        let phi = spherical_values(&h3, Complex64::new(lambda, 0.0), &radii)?;
        let error = radii
            .iter()
            .zip(&phi)
            .map(|(&r, p)| (p.re - (lambda * r).sin() / (lambda * r.sinh())).abs())
            .fold(0.0, f64::max);
        println!("H3  λ = {lambda}: max |φ_λ - sin(λr)/(λ sinh r)| on (0, 5] = {error:.2e}");
    }

    let dr = ModelSpace::damek_ricci(2, 1)?;
    let grid = Arc::new(RadialGrid::new(5.0, 65)?);
    let lambda = 1.5;
    let phi = spherical_function(&dr, Complex64::new(lambda, 0.0), grid)?;
    let mu = lambda * lambda + dr.rho() * dr.rho();
    let residual = apply_radial_laplacian(&dr, &phi)?.axpy(Complex64::new(mu, 0.0), &phi)?.sup_norm();
    println!("{dr} (ρ = {}): ‖L_A φ + (λ² + ρ²) φ‖∞ = {residual:.2e}", dr.rho());
    Ok(())
}
