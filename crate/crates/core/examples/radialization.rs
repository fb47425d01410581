//! Radialization R_x about a point: idempotence on radial functions and
//! preservation of the integral.

use std::sync::Arc;

use harmonia::analysis::Analysis;
use harmonia::bumps::PointBump;
use harmonia::geometry::{Ball, Geometry, Point};
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(2)?;
    let a = Analysis::with_defaults(space)?;
    let geometry = Geometry::new(space)?;
    let mut points = geometry.sample_points(5, 2, 1.0).into_iter();
    let x = points.next().expect("two points");
    let bump = PointBump::new(&geometry, points.next().expect("two points"), 0.5);

    let u = a.profile(|r| (-r * r).exp());
    let translated = geometry.translate(&x, &u);
    let grid: Arc<_> = a.grid().clone();
    let back = geometry.radialize(&|p: &Point| translated.eval(p), &x, grid.clone());
    println!("R_x τ_x u = u: relative error {:.2e}", back.max_abs_diff(&u)? / u.sup_norm());

    let radial = geometry.radialize(&|p: &Point| bump.eval(p), &x, grid);
    let ball = Ball { center: bump.center.clone(), radius: bump.support_radius() };
    let direct = geometry.integrate(&|p: &Point| bump.eval(p), &ball, 8);
    println!("∫ R_x f = {:.10}, ∫ f = {:.10}", a.integral(&radial)?.re, direct.re);
    Ok(())
}
