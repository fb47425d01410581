//! Heat kernels, heat flow of radial profiles, and the heat-span experiment.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{Analysis, GridConfig, SpectralProfile};
use crate::error::{Error, Result};
use crate::model_space::ModelSpace;
use crate::radial::{apply_polynomial, LaplacePolynomial, RadialProfile};

/// Relative Tikhonov parameter of [`heat_span_projection`]: singular values
/// below `TIKHONOV · σ_max` are damped.
pub const TIKHONOV: f64 = 1e-12;

/// `e^{-t(λ²+ρ²)}` on the λ-grid.
pub fn heat_spectrum(analysis: &Analysis, t: f64) -> SpectralProfile {
    let rho2 = analysis.space().rho().powi(2);
    analysis.spectral(|l| Complex64::new((-t * (l * l + rho2)).exp(), 0.0))
}

/// `GridConfig` whose `λ_max` resolves heat kernels on `space` down to time
/// `t_min`: the spectral data `e^{-tλ²} λ^{n-1}` falls below `1e-12` of its
/// peak at `Λ`.
pub fn heat_config(space: &ModelSpace, base: GridConfig, t_min: f64) -> GridConfig {
    let half_degree = (space.dimension() - 1) as f64 / 2.0;
    let floor = 1e12f64.ln();
    // x = tΛ² solves x - h ln x = floor + h (1 - ln h) for h = (n-1)/2
    let mut x = floor + 1.0;
    for _ in 0..50 {
        x = floor + if half_degree > 0.0 { half_degree * (x.ln() - half_degree.ln() + 1.0) } else { 0.0 };
    }
    let needed = (x / t_min).sqrt();
    if needed <= base.lambda_max {
        return base;
    }
    let spacing = base.lambda_max / (base.lambda_nodes - 1) as f64;
    let nodes = ((needed / spacing).ceil() as usize + 1).max(base.lambda_nodes);
    GridConfig { lambda_max: needed, lambda_nodes: nodes, ..base }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("heat time must be positive, got {t}")));
    }
    Ok(())
}

/// The heat kernel `h_t`, radial about the base point.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    t: f64,
    profile: RadialProfile,
    spectrum: SpectralProfile,
}

impl HeatKernel {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn spectrum(&self) -> &SpectralProfile {
        &self.spectrum
    }
}

/// `h_t` synthesized from `ĥ_t(λ) = e^{-t(λ²+ρ²)}`.
pub fn heat_kernel(analysis: &Analysis, t: f64) -> Result<HeatKernel> {
    check_time(t)?;
    let spectrum = heat_spectrum(analysis, t);
    let profile = analysis.inverse_spherical(&spectrum)?;
    Ok(HeatKernel { t, profile, spectrum })
}

/// `u ∗ h_t`, the solution of `∂_t v = Δv`, `v(0) = u`.
pub fn heat_evolve(analysis: &Analysis, u: &RadialProfile, t: f64) -> Result<RadialProfile> {
    check_time(t)?;
    let rho2 = analysis.space().rho().powi(2);
    let spectrum = analysis.spherical_fourier(u)?.map(|l, v| v * (-t * (l * l + rho2)).exp());
    analysis.inverse_spherical(&spectrum)
}

/// Radial heat equation by Crank–Nicolson collocation on the profile's grid,
/// with Dirichlet data `u(R) = 0` and four half-steps of backward Euler first.
pub fn crank_nicolson(analysis: &Analysis, u0: &RadialProfile, t: f64, steps: usize) -> Result<RadialProfile> {
    check_time(t)?;
    if steps < 4 {
        return Err(Error::Domain("Crank–Nicolson needs at least 4 steps".into()));
    }
    let grid = u0.grid();
    let n = grid.len();
    let (d1, d2) = grid.y_differentiation_matrices();
    let r_max = grid.r_max();
    let space = analysis.space();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (i, &r) in grid.nodes().iter().enumerate() {
        let c2 = 16.0 * r * r / r_max.powi(4);
        let c1 = 4.0 / (r_max * r_max) * (1.0 + space.drift_times_r(r));
        for j in 0..n {
            lap[(i, j)] = c2 * d2[i * n + j] + c1 * d1[i * n + j];
        }
    }
    let dt = t / steps as f64;
    let system = |theta: f64, h: f64| {
        let mut a = DMatrix::<f64>::identity(n, n) - &lap * (theta * h);
        let mut b = DMatrix::<f64>::identity(n, n) + &lap * ((1.0 - theta) * h);
        for j in 0..n {
            a[(n - 1, j)] = if j == n - 1 { 1.0 } else { 0.0 };
            b[(n - 1, j)] = 0.0;
        }
        (a.lu(), b)
    };
    let evolve = |values: Vec<f64>| -> Result<Vec<f64>> {
        let mut v = DVector::from_vec(values);
        let (euler, euler_rhs) = system(1.0, 0.5 * dt);
        for _ in 0..4 {
            v = euler.solve(&(&euler_rhs * &v)).ok_or_else(|| Error::Accuracy("singular Euler step".into()))?;
        }
        let (cn, cn_rhs) = system(0.5, dt);
        for _ in 2..steps {
            v = cn.solve(&(&cn_rhs * &v)).ok_or_else(|| Error::Accuracy("singular Crank–Nicolson step".into()))?;
        }
        Ok(v.as_slice().to_vec())
    };
    let re = evolve(u0.values().iter().map(|v| v.re).collect())?;
    let im = evolve(u0.values().iter().map(|v| v.im).collect())?;
    RadialProfile::new(grid.clone(), re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// Parses `log:a:b:n` (n log-spaced times in `[a, b]`) or a comma list.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::Config(format!("invalid time list '{text}'"));
    if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].parse().map_err(|_| bad())?;
        let b: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !(a > 0.0 && b >= a && count >= 1) {
            return Err(bad());
        }
        if count == 1 {
            return Ok(vec![a]);
        }
        let ratio = (b / a).ln() / (count - 1) as f64;
        return Ok((0..count).map(|k| a * (ratio * k as f64).exp()).collect());
    }
    text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// Result of [`heat_span_projection`].
#[derive(Debug, Clone, Serialize)]
pub struct HeatSpanReport {
    pub times: Vec<f64>,
    pub coefficients: Vec<Complex64>,
    /// `A`-weighted `L²` residual of the fit.
    pub l2_residual: f64,
    /// Weighted `L¹` residual `ω∫|target - Σ c_i h_{t_i}| A dr`.
    pub l1_residual: f64,
    pub target_l1: f64,
    /// Tikhonov parameter used (absolute, in singular-value units).
    pub regularization: f64,
    /// Whether any singular value fell below the regularization parameter.
    pub regularized: bool,
}

impl HeatSpanReport {
    pub fn relative_l1_residual(&self) -> f64 {
        self.l1_residual / self.target_l1
    }
}

/// Least-squares projection of `target` onto `span{h_t : t ∈ times}` in the
/// `A`-weighted `L²` norm, with the weighted `L¹` residual reported.
///
/// Kernels are sampled at the quadrature nodes; the solve uses the SVD of the
/// weighted sample matrix with Tikhonov damping [`TIKHONOV`]`·σ_max`.
pub fn heat_span_projection(analysis: &Analysis, target: &RadialProfile, times: &[f64]) -> Result<HeatSpanReport> {
    for &t in times {
        check_time(t)?;
    }
    analysis.check_decay(target)?;
    let samples = analysis.quadrature_values(target)?;
    let target_l1 = analysis.l1_norm_of_samples(&samples);
    if times.is_empty() {
        return Ok(HeatSpanReport {
            times: Vec::new(),
            coefficients: Vec::new(),
            l2_residual: weighted_l2(analysis, &samples),
            l1_residual: target_l1,
            target_l1,
            regularization: 0.0,
            regularized: false,
        });
    }
    let kernels: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let values = analysis.inverse_spherical_at_quadrature(&heat_spectrum(analysis, t))?;
            Ok(values.iter().map(|v| v.re).collect())
        })
        .collect::<Result<_>>()?;
    let measure = analysis.quad_measure();
    let q = measure.len();
    let m = times.len();
    let sqrt_w: Vec<f64> = measure.iter().map(|w| w.sqrt()).collect();
    let design = DMatrix::from_fn(q, m, |i, j| kernels[j][i] * sqrt_w[i]);
    let svd = design.svd(true, true);
    let (u, vt) = (svd.u.as_ref().expect("u"), svd.v_t.as_ref().expect("v_t"));
    let sigma_max = svd.singular_values.max();
    let mu = TIKHONOV * sigma_max;
    let regularized = svd.singular_values.iter().any(|&s| s < mu);
    let solve = |rhs: DVector<f64>| -> DVector<f64> {
        let projected = u.transpose() * rhs;
        let scaled = DVector::from_iterator(
            projected.len(),
            projected.iter().zip(svd.singular_values.iter()).map(|(p, &s)| p * s / (s * s + mu * mu)),
        );
        vt.transpose() * scaled
    };
    let re = solve(DVector::from_iterator(q, samples.iter().zip(&sqrt_w).map(|(v, w)| v.re * w)));
    let im = solve(DVector::from_iterator(q, samples.iter().zip(&sqrt_w).map(|(v, w)| v.im * w)));
    let coefficients: Vec<Complex64> = re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let residual: Vec<Complex64> = (0..q)
        .map(|i| samples[i] - coefficients.iter().zip(&kernels).map(|(c, k)| c * k[i]).sum::<Complex64>())
        .collect();
    Ok(HeatSpanReport {
        times: times.to_vec(),
        coefficients,
        l2_residual: weighted_l2(analysis, &residual),
        l1_residual: analysis.l1_norm_of_samples(&residual),
        target_l1,
        regularization: mu,
        regularized,
    })
}

fn weighted_l2(analysis: &Analysis, samples: &[Complex64]) -> f64 {
    samples.iter().zip(analysis.quad_measure()).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
}

/// Empirical constant in `|Δ^N h_t(r)| ≤ C e^{-α r}`.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBound {
    pub t: f64,
    pub order: usize,
    pub alpha: f64,
    /// `sup_r |L_A^N h_t(r)| e^{α r}` on the analysis grid.
    pub constant: f64,
    /// The same on a grid with twice as many intervals.
    pub refined_constant: f64,
    pub relative_change: f64,
}

impl DerivativeBound {
    /// Finite and stable under refinement within 5%.
    pub fn stable(&self) -> bool {
        self.constant.is_finite() && self.refined_constant.is_finite() && self.relative_change <= 0.05
    }
}

/// Probes the exponential decay of `Δ^N h_t`, `N ≤ 3`, on the analysis grid
/// and on a grid with doubled resolution.
pub fn derivative_bound_probe(analysis: &Analysis, t: f64, order: usize, alpha: f64) -> Result<DerivativeBound> {
    check_time(t)?;
    if order > 3 {
        return Err(Error::Domain(format!("derivative order {order} exceeds 3")));
    }
    let mut coeffs = vec![0.0; order + 1];
    coeffs[order] = 1.0;
    let power = LaplacePolynomial::from_real(&coeffs)?;
    let measure = |a: &Analysis| -> Result<f64> {
        let h = heat_kernel(a, t)?;
        let image = apply_polynomial(a.space(), &power, h.profile())?;
        Ok(image
            .nodes()
            .iter()
            .zip(image.values())
            .map(|(&r, v)| v.norm() * (alpha * r).exp())
            .fold(0.0, f64::max))
    };
    let constant = measure(analysis)?;
    let config = analysis.config().clone();
    let refined = Analysis::new(
        *analysis.space(),
        GridConfig { radial_nodes: 2 * config.radial_nodes - 1, ..config },
    )?;
    let refined_constant = measure(&refined)?;
    Ok(DerivativeBound {
        t,
        order,
        alpha,
        constant,
        refined_constant,
        relative_change: (refined_constant - constant).abs() / constant,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model_space::ModelSpace;

    fn h3() -> Analysis {
        Analysis::new(ModelSpace::hyperbolic(3).unwrap(), GridConfig { lambda_nodes: 1024, ..GridConfig::default() })
            .unwrap()
    }

    fn h3_closed(t: f64, r: f64) -> f64 {
        let ratio = if r == 0.0 { 1.0 } else { r / r.sinh() };
        (4.0 * PI * t).powf(-1.5) * (-t).exp() * ratio * (-r * r / (4.0 * t)).exp()
    }

    #[test]
    fn hyperbolic_closed_form_and_mass() {
        let a = h3();
        let h = heat_kernel(&a, 0.5).unwrap();
        let sup = h.profile().sup_norm();
        for (&r, v) in h.profile().nodes().iter().zip(h.profile().values()) {
            assert!((v.re - h3_closed(0.5, r)).abs() < 1e-8 * sup, "r = {r}");
        }
        assert!((h.profile().value_at(1.0).re - h3_closed(0.5, 1.0)).abs() < 1e-6);
        assert!((a.integral(h.profile()).unwrap().re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn euclidean_gaussian() {
        let a = Analysis::new(ModelSpace::euclidean(3).unwrap(), GridConfig { lambda_nodes: 1024, ..GridConfig::default() })
            .unwrap();
        let h = heat_kernel(&a, 0.5).unwrap();
        for (&r, v) in h.profile().nodes().iter().zip(h.profile().values()) {
            let exact = (2.0 * PI).powf(-1.5) * (-r * r / 2.0).exp();
            assert!((v.re - exact).abs() < 1e-9);
        }
        assert!(matches!(heat_kernel(&a, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn crank_nicolson_agrees() {
        let a = h3();
        let start = heat_kernel(&a, 0.25).unwrap();
        let end = heat_kernel(&a, 0.5).unwrap();
        let pde = crank_nicolson(&a, start.profile(), 0.25, 500).unwrap();
        let err = pde.max_abs_diff(end.profile()).unwrap() / end.profile().sup_norm();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn span_trivial_cases() {
        let a = h3();
        let target = heat_kernel(&a, 0.7).unwrap();
        let report = heat_span_projection(&a, target.profile(), &[0.3, 0.7, 1.5]).unwrap();
        assert!(report.relative_l1_residual() < 1e-10, "{}", report.relative_l1_residual());
        assert!((report.coefficients[1].re - 1.0).abs() < 1e-6);
        let bump = a.profile(|r| (-(r * r)).exp());
        let empty = heat_span_projection(&a, &bump, &[]).unwrap();
        assert_eq!(empty.l1_residual, empty.target_l1);
    }

    #[test]
    fn time_lists() {
        let t = parse_times("log:0.01:5:20").unwrap();
        assert_eq!(t.len(), 20);
        assert!((t[0] - 0.01).abs() < 1e-15 && (t[19] - 5.0).abs() < 1e-12);
        assert_eq!(parse_times("0.5, 1").unwrap(), vec![0.5, 1.0]);
        assert!(parse_times("log:1:2").is_err());
        assert!(parse_times("").unwrap().is_empty());
    }
}
