//! Abel transform of a radial bump: spectral route against horosphere integrals,
//! and the identity ℱ(𝒜u) = û.

use harmonia::analysis::Analysis;
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(3)?;
    let a = Analysis::with_defaults(space)?;
    let u = a.profile(|r| (-2.0 * r * r).exp() * (1.0 + 0.5 * r * r));

    let spectral = a.abel_transform(&u)?;
    let geometric = a.abel_transform_geometric(&u)?;
    println!("sup |𝒜u spectral - 𝒜u horospheres| / sup |𝒜u| = {:.2e}", spectral.max_abs_diff(&geometric)? / spectral.sup_norm());

    let lhs = a.line_fourier(&geometric)?;
    let rhs = a.spherical_fourier(&u)?;
    let error = lhs.values().iter().zip(rhs.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    println!("sup |ℱ(𝒜u) - û| / sup |û| = {:.2e}", error / rhs.sup_norm());

    for s in [0.0, 0.5, 1.0, 2.0] {
        println!("𝒜u({s}) = {:.10}", geometric.value_at(s).re);
    }
    Ok(())
}
