//! Heat kernel on H³: spectral synthesis against the closed form, unit mass,
//! and a Crank–Nicolson cross-check.

use std::f64::consts::PI;

use harmonia::analysis::{Analysis, GridConfig};
use harmonia::heat::{crank_nicolson, heat_config, heat_kernel};
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(3)?;
    let a = Analysis::new(space, heat_config(&space, GridConfig::default(), 0.25))?;
    let t = 0.5;
    let h = heat_kernel(&a, t)?;
    let exact = |r: f64| {
        let ratio = if r == 0.0 { 1.0 } else { r / r.sinh() };
        (4.0 * PI * t).powf(-1.5) * (-t).exp() * ratio * (-r * r / (4.0 * t)).exp()
    };
    let error = h.profile().nodes().iter().zip(h.profile().values()).map(|(&r, v)| (v.re - exact(r)).abs()).fold(0.0, f64::max);
    println!("t = {t}: max |h_t - closed form| / h_t(0) = {:.2e}", error / exact(0.0));
    println!("mass ∫ h_t = {:.12}", a.integral(h.profile())?.re);

    let start = heat_kernel(&a, 0.25)?;
    let pde = crank_nicolson(&a, start.profile(), 0.25, 500)?;
    println!("Crank–Nicolson h_¼ → h_½: relative error {:.2e}", pde.max_abs_diff(h.profile())? / h.profile().sup_norm());
    Ok(())
}
