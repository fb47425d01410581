//! Radial convolution through the spherical transform, checked against direct
//! quadrature of ∫ f(y) u(d(x, y)) dy on H².

use harmonia::analysis::Analysis;
use harmonia::geometry::{Ball, Geometry, Point};
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(2)?;
    let a = Analysis::with_defaults(space)?;
    let geometry = Geometry::new(space)?;
    let u = a.profile(|r| (-2.0 * r * r).exp());
    let v = a.profile(|r| (-3.0 * r * r).exp() * (1.0 + r * r));
    let uv = a.radial_convolve(&u, &v)?;

    let origin = geometry.origin();
    let table = u.tabulate(4097);
    let f = |p: &Point| table.value_at(geometry.distance(&origin, p));
    let support = Ball { center: origin.clone(), radius: 6.0 };
    let direction = geometry.unit_vector(&origin, &[1.0, 0.0])?;
    for r in [0.0, 0.5, 1.0, 2.0] {
        let x = geometry.exp_map(&direction, r);
        let direct = geometry.convolve_general(&f, &support, &v, &x)?;
        println!("r = {r}: spectral {:.10}, direct {:.10}", uv.value_at(r).re, direct.re);
    }
    Ok(())
}
