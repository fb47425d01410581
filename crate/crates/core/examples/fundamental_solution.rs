//! Fundamental solution of Δ - 1 on H³ and the solution of (Δ - 1)u = f.

use harmonia::analysis::Analysis;
use harmonia::operators::{fundamental_solution, solve};
use harmonia::radial::{apply_polynomial, LaplacePolynomial};
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(3)?;
    let a = Analysis::with_defaults(space)?;
    let p = LaplacePolynomial::from_real(&[-1.0, 1.0])?;

    let fundamental = fundamental_solution(&space, &p)?;
    println!("Abel-domain operator coefficients: {:?}", fundamental.operator().coeffs());
    println!("F(0) = {:.10}, expected -1/(2√2) = {:.10}", fundamental.line_value(0.0).re, -1.0 / (2.0 * 2f64.sqrt()));
    println!("decay rate {:.6}", fundamental.decay_rate());
    println!("delta residual at ε = 0.05: {:.2e}", fundamental.delta_residual(0.05));

    let f = a.profile(|r| (-4.0 * r * r).exp());
    let w = a.abel_transform(&f)?;
    println!("certificate ‖D̃(F ∗ 𝒜f) - 𝒜f‖∞ / ‖𝒜f‖∞ = {:.2e}", fundamental.abel_certificate(&w));

    let u = solve(&a, &p, &f)?;
    let residual = apply_polynomial(&space, &p, &u)?.max_abs_diff(&f)? / f.sup_norm();
    println!("solve: ‖(L_A - 1)u - f‖∞ / ‖f‖∞ = {residual:.2e}");
    Ok(())
}
