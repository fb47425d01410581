//! Recovering P from a black-box radial operator L = P(Δ), and rejecting
//! multiplication by r².

use harmonia::operators::{identify_operator, BuiltinOperator};
use harmonia::radial::{apply_radial_laplacian, RadialProfile};
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(3)?;
    let black_box = |u: &RadialProfile| -> harmonia::Result<RadialProfile> {
        let lu = apply_radial_laplacian(&space, u)?;
        let llu = apply_radial_laplacian(&space, &lu)?;
        let mut out = llu.axpy(3.0.into(), &lu)?;
        out = out.axpy(2.0.into(), u)?;
        Ok(out)
    };
    let p = identify_operator(&space, black_box, 4)?;
    println!("L = Δ² + 3Δ + 2 identified as P = {p} (low to high)");

    let r2 = BuiltinOperator::parse("builtin:r2")?;
    match identify_operator(&space, |u| r2.apply(&space, u), 4) {
        Ok(p) => println!("unexpected: r² identified as {p}"),
        Err(e) => println!("r² rejected: {e}"),
    }
    Ok(())
}
