//! The horospherical wave e^{(iλ-ρ)b_v} is an eigenfunction: its spherical means
//! are f(x) φ_λ(t). A bump is not.

use harmonia::bumps::PointBump;
use harmonia::geometry::{Geometry, Point};
use harmonia::ModelSpace;
use num_complex::Complex64;

fn main() -> harmonia::Result<()> {
    let geometry = Geometry::new(ModelSpace::hyperbolic(3)?)?;
    let v = geometry.unit_vector(&geometry.origin(), &[0.0, 0.0, 1.0])?;
    let lambda = 1.0;
    let wave = geometry.horospherical_wave(&v, lambda);
    let samples = geometry.sample_points(11, 5, 1.5);
    let times = [0.25, 0.5, 1.0, 2.0];
    let report = geometry.eigenfunction_check(&wave, Complex64::new(lambda, 0.0), &samples, &times, 1e-6)?;
    for s in &report.samples {
        println!("x = {:?}: mean residual {:.2e}, Laplacian residual {:.2e}", s.x, s.residual, s.laplacian_residual);
    }
    println!("horospherical wave passes: {}", report.pass);

    let bump = PointBump::new(&geometry, geometry.origin(), 0.8);
    let control = geometry.eigenfunction_check(&|p: &Point| bump.eval(p), Complex64::new(lambda, 0.0), &samples, &times, 1e-6)?;
    println!("bump residual {:.2e}, passes: {}", control.max_residual(), control.pass);
    Ok(())
}
