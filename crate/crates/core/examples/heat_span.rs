//! Approximating a radial bump by combinations of heat kernels with growing
//! sets of times.

use harmonia::analysis::{Analysis, GridConfig};
use harmonia::heat::{heat_config, heat_span_projection, parse_times};
use harmonia::ModelSpace;

fn main() -> harmonia::Result<()> {
    let space = ModelSpace::hyperbolic(3)?;
    let a = Analysis::new(space, heat_config(&space, GridConfig::default(), 0.01))?;
    let target = a.profile(|r| (-1.5 * r * r).exp() * (1.0 + 0.3 * r * r));
    let times = parse_times("log:0.01:5:20")?;
    for count in [0, 5, 10, 20] {
        let subset: Vec<f64> = times.iter().copied().step_by((20 / count.max(1)).max(1)).take(count).collect();
        let report = heat_span_projection(&a, &target, &subset)?;
        println!(
            "{:2} times: relative L¹ residual {:.3e}, relative L² residual {:.3e}",
            subset.len(),
            report.relative_l1_residual(),
            report.l2_residual / heat_span_projection(&a, &target, &[])?.l2_residual
        );
    }
    Ok(())
}
