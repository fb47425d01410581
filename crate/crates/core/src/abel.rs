//! Abel transform, its dual, and radial convolution.
//!
//! With the cosine transform `ℱw(λ) = 2∫₀^∞ w(s) cos(λs) ds` and its inverse
//! `ℱ⁻¹F(s) = (1/π)∫₀^∞ F(λ) cos(λs) dλ`, the Abel transform factors the
//! spherical transform, `û = ℱ(𝒜u)`. The primary path computes `𝒜u` as
//! `ℱ⁻¹û`; the horosphere integral `e^{-ρs}∫_{H^s} u` is kept as an
//! independent route for the point-level backends.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::analysis::{Analysis, SpectralProfile, DECAY_TOLERANCE, SPECTRAL_TAIL_TOLERANCE};
use crate::error::{Error, Result};
use crate::model_space::{unit_sphere_area, SpaceKind};
use crate::quadrature::gauss_legendre;
use crate::radial::RadialProfile;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Points of the local Lagrange interpolant used for off-grid evaluation.
const INTERPOLATION_POINTS: usize = 10;

/// An even function on `[-S, S]`, stored on `s_j = j·ds`, `j = 0..L`.
#[derive(Debug, Clone)]
pub struct LineProfile {
    s_max: f64,
    values: Vec<Complex64>,
}

impl LineProfile {
    pub fn new(s_max: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(s_max > 0.0) || values.len() < INTERPOLATION_POINTS {
            return Err(Error::Domain("line profile needs s_max > 0 and at least 10 nodes".into()));
        }
        Ok(Self { s_max, values })
    }

    pub fn from_fn(s_max: f64, nodes: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let ds = s_max / (nodes.max(2) - 1) as f64;
        Self::new(s_max, (0..nodes).map(|j| f(j as f64 * ds)).collect())
    }

    pub fn from_real_fn(s_max: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(s_max, nodes, |s| Complex64::new(f(s), 0.0))
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn ds(&self) -> f64 {
        self.s_max / (self.values.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> Vec<f64> {
        let ds = self.ds();
        (0..self.values.len()).map(|j| j as f64 * ds).collect()
    }

    /// Samples at `s_j ≥ 0`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &LineProfile) -> Result<f64> {
        if self.values.len() != other.values.len() || self.s_max != other.s_max {
            return Err(Error::Domain("line profiles live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let ds = self.ds();
        let values = self.values.iter().enumerate().map(|(j, &v)| f(j as f64 * ds, v)).collect();
        Self { s_max: self.s_max, values }
    }

    /// Sample `j` of the even extension, zero beyond the grid.
    fn sample(&self, j: i64) -> Complex64 {
        let j = j.unsigned_abs() as usize;
        self.values.get(j).copied().unwrap_or(ZERO)
    }

    /// Value at any `s` by local Lagrange interpolation of the even
    /// extension, zero beyond `S`.
    pub fn value_at(&self, s: f64) -> Complex64 {
        let s = s.abs();
        if s > self.s_max {
            return ZERO;
        }
        let ds = self.ds();
        let x = s / ds;
        let base = x.floor() as i64;
        if (x - base as f64) == 0.0 {
            return self.sample(base);
        }
        let half = (INTERPOLATION_POINTS / 2) as i64;
        let first = base - half + 1;
        let mut acc = ZERO;
        for i in 0..INTERPOLATION_POINTS as i64 {
            let node = first + i;
            let mut weight = 1.0;
            for m in 0..INTERPOLATION_POINTS as i64 {
                if m != i {
                    let other = (first + m) as f64;
                    weight *= (x - other) / (node as f64 - other);
                }
            }
            acc += self.sample(node) * weight;
        }
        acc
    }

    /// Fails with a truncation error if the profile has not decayed at `S`.
    pub fn check_decay(&self) -> Result<()> {
        let norm = self.sup_norm();
        let tail = self.values.last().map_or(0.0, |v| v.norm());
        if tail > DECAY_TOLERANCE * norm {
            return Err(Error::Truncation(format!(
                "line profile has |w(S)| = {tail:.3e} relative to sup {norm:.3e}"
            )));
        }
        Ok(())
    }
}

/// `Σ_j c_j cos(j θ)` for each `θ` in `thetas`, with exact resynchronization
/// of the rotation every 64 steps.
fn cosine_sums(coeffs: &[Complex64], thetas: &[f64]) -> Vec<Complex64> {
    thetas
        .par_iter()
        .map(|&theta| {
            let step = Complex64::new(theta.cos(), theta.sin());
            let mut rot = Complex64::new(1.0, 0.0);
            let mut acc = ZERO;
            for (j, c) in coeffs.iter().enumerate() {
                if j % 64 == 0 && j > 0 {
                    let a = j as f64 * theta;
                    rot = Complex64::new(a.cos(), a.sin());
                }
                acc += c * rot.re;
                rot *= step;
            }
            acc
        })
        .collect()
}

impl Analysis {
    /// Uniform line grid `[0, S]` of this analysis.
    pub fn line_profile(&self, f: impl Fn(f64) -> Complex64) -> LineProfile {
        let c = self.config();
        LineProfile::from_fn(c.s_max(), c.line_nodes, f).expect("validated grid")
    }

    pub fn line_profile_real(&self, f: impl Fn(f64) -> f64) -> LineProfile {
        self.line_profile(|s| Complex64::new(f(s), 0.0))
    }

    fn check_line_grid(&self, w: &LineProfile) -> Result<()> {
        let c = self.config();
        if w.len() != c.line_nodes || w.s_max() != c.s_max() {
            return Err(Error::Domain("line profile does not live on the analysis line grid".into()));
        }
        Ok(())
    }

    /// `ℱw(λ) = 2∫₀^S w(s) cos(λs) ds` on the λ-grid (trapezoid).
    pub fn line_fourier(&self, w: &LineProfile) -> Result<SpectralProfile> {
        self.check_line_grid(w)?;
        w.check_decay()?;
        let ds = w.ds();
        let last = w.len() - 1;
        let coeffs: Vec<Complex64> = w
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| v * (if j == 0 || j == last { ds } else { 2.0 * ds }))
            .collect();
        let thetas: Vec<f64> = self.lambdas().iter().map(|l| l * ds).collect();
        SpectralProfile::new(self.lambdas().clone(), cosine_sums(&coeffs, &thetas))
    }

    /// `ℱ⁻¹F(s) = (1/π)∫₀^Λ F(λ) cos(λs) dλ` on the line grid (trapezoid).
    pub fn line_inverse_fourier(&self, spectrum: &SpectralProfile) -> Result<LineProfile> {
        let max = spectrum.sup_norm();
        let tail = spectrum.values().last().map_or(0.0, |v| v.norm());
        if tail > SPECTRAL_TAIL_TOLERANCE * max {
            return Err(Error::Truncation(format!(
                "spectral data not decayed at Λ (relative tail {:.3e})",
                tail / max
            )));
        }
        let h = self.lambdas()[1] - self.lambdas()[0];
        let coeffs: Vec<Complex64> = spectrum
            .values()
            .iter()
            .zip(self.lambda_weights())
            .map(|(f, w)| f * (w / std::f64::consts::PI))
            .collect();
        let c = self.config();
        let ds = c.s_max() / (c.line_nodes - 1) as f64;
        let thetas: Vec<f64> = (0..c.line_nodes).map(|j| j as f64 * ds * h).collect();
        LineProfile::new(c.s_max(), cosine_sums(&coeffs, &thetas))
    }

    /// Abel transform via `𝒜u = ℱ⁻¹ û`.
    pub fn abel_transform(&self, u: &RadialProfile) -> Result<LineProfile> {
        self.line_inverse_fourier(&self.spherical_fourier(u)?)
    }

    /// Abel transform as the weighted horosphere integral `e^{-ρs}∫_{H^s} u`.
    ///
    /// In the upper half-space with `x₀ = (0, 1)` and `H^s = {y = e^{-s}}`,
    /// `𝒜u(s) = e^{ρs} ω_{n-2} ∫₀^∞ u(d(t)) t^{n-2} dt` where
    /// `cosh d = cosh s + t²/(2y)`; in `ℝⁿ`, `d² = s² + t²`.
    pub fn abel_transform_geometric(&self, u: &RadialProfile) -> Result<LineProfile> {
        let space = *self.space();
        if !space.point_ops() {
            return Err(Error::Capability(format!("no horosphere geometry for {space}")));
        }
        self.check_decay(u)?;
        let r_max = u.r_max();
        let n = space.dimension();
        if n == 1 {
            return Ok(self.line_profile(|s| u.value_at(s)));
        }
        let hyperbolic = matches!(space.kind(), SpaceKind::RealHyperbolic { .. });
        let rho = space.rho();
        let omega = unit_sphere_area(n - 1);
        let gl = gauss_legendre(16);
        const PANELS: usize = 32;
        let c = self.config();
        let ds = c.s_max() / (c.line_nodes - 1) as f64;
        let values: Vec<Complex64> = (0..c.line_nodes)
            .into_par_iter()
            .map(|j| {
                let s = j as f64 * ds;
                if s >= r_max {
                    return ZERO;
                }
                let y = (-s).exp();
                let half_s_sinh = (0.5 * s).sinh();
                // t as a function of the distance d reached on H^s
                let t_of_d = |d: f64| {
                    if hyperbolic {
                        (2.0 * y * 2.0 * (0.5 * (d + s)).sinh() * (0.5 * (d - s)).sinh()).max(0.0).sqrt()
                    } else {
                        ((d - s) * (d + s)).max(0.0).sqrt()
                    }
                };
                let d_of_t = |t: f64| {
                    if hyperbolic {
                        let z = 2.0 * half_s_sinh * half_s_sinh + t * t / (2.0 * y);
                        (z + (z * (z + 2.0)).sqrt()).ln_1p()
                    } else {
                        (s * s + t * t).sqrt()
                    }
                };
                let mut acc = ZERO;
                for p in 0..PANELS {
                    let d0 = s + (r_max - s) * p as f64 / PANELS as f64;
                    let d1 = s + (r_max - s) * (p + 1) as f64 / PANELS as f64;
                    let (t0, t1) = (t_of_d(d0), t_of_d(d1));
                    for (x, w) in gl.mapped(t0, t1).nodes.iter().zip(gl.mapped(t0, t1).weights.iter()) {
                        acc += u.value_at(d_of_t(*x)) * (w * x.powi(n as i32 - 2));
                    }
                }
                acc * (omega * (rho * s).exp())
            })
            .collect();
        LineProfile::new(c.s_max(), values)
    }

    /// Inverse Abel transform `𝒜⁻¹w = (inverse spherical)(ℱw)`.
    pub fn inverse_abel(&self, w: &LineProfile) -> Result<RadialProfile> {
        self.inverse_spherical(&self.line_fourier(w)?)
    }

    /// Dual Abel transform on the spectral side, `a(w)(r) = (1/π)∫₀^Λ ŵ(λ) φ_λ(r) dλ`.
    /// Needs no Plancherel density, so it works on every backend.
    pub fn dual_abel_spectral(&self, w: &LineProfile) -> Result<RadialProfile> {
        let spectrum = self.line_fourier(w)?;
        let coeffs: Vec<Complex64> = spectrum
            .values()
            .iter()
            .zip(self.lambda_weights())
            .map(|(f, wt)| f * (wt / std::f64::consts::PI))
            .collect();
        RadialProfile::new(self.grid().clone(), self.weighted_sum(&coeffs, true)?)
    }

    /// Euclidean convolution of two even line profiles, by zero-padded FFT.
    pub fn line_convolve(&self, w1: &LineProfile, w2: &LineProfile) -> Result<LineProfile> {
        self.check_line_grid(w1)?;
        self.check_line_grid(w2)?;
        line_convolve(w1, w2)
    }

    /// Radial convolution `u ∗ v`, by multiplying spherical transforms.
    pub fn radial_convolve(&self, u: &RadialProfile, v: &RadialProfile) -> Result<RadialProfile> {
        let product = self.spherical_fourier(u)?.mul(&self.spherical_fourier(v)?)?;
        self.inverse_spherical(&product)
    }
}

/// Euclidean convolution `(w₁ ∗ w₂)(s) = ∫ w₁(σ) w₂(s-σ) dσ` of even profiles
/// on a common grid. Errors if the result does not fit inside `[-S, S]`.
pub fn line_convolve(w1: &LineProfile, w2: &LineProfile) -> Result<LineProfile> {
    if w1.len() != w2.len() || w1.s_max() != w2.s_max() {
        return Err(Error::Domain("line profiles live on different grids".into()));
    }
    let l = w1.len();
    let full = |w: &LineProfile| -> Vec<Complex64> {
        (0..2 * l - 1).map(|m| w.sample(m as i64 - (l as i64 - 1))).collect()
    };
    let (a, b) = (full(w1), full(w2));
    let out_len = 4 * l - 3;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut fa = a;
    fa.resize(size, ZERO);
    let mut fb = b;
    fb.resize(size, ZERO);
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);
    let scale = w1.ds() / size as f64;
    let centre = 2 * (l - 1);
    let max = fa[..out_len].iter().map(|v| v.norm()).fold(0.0, f64::max) * scale;
    let outside = fa[centre + l..out_len].iter().map(|v| v.norm()).fold(0.0, f64::max) * scale;
    if outside > 1e-10 * max.max(f64::MIN_POSITIVE) {
        return Err(Error::Truncation(format!(
            "line convolution spills beyond S (relative {:.3e}); enlarge s_max",
            outside / max
        )));
    }
    let values = fa[centre..centre + l].iter().map(|v| v * scale).collect();
    LineProfile::new(w1.s_max(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::GridConfig;
    use crate::model_space::ModelSpace;

    fn analysis(space: ModelSpace) -> Analysis {
        let config = GridConfig { lambda_nodes: 1024, lambda_max: 30.0, ..GridConfig::default() };
        Analysis::new(space, config).unwrap()
    }

    #[test]
    fn interpolation_is_accurate() {
        let w = LineProfile::from_real_fn(16.0, 2049, |s| (-s * s).exp()).unwrap();
        for s in [0.0013f64, 0.7, -1.234, 3.3] {
            let exact = (-s * s).exp();
            assert!((w.value_at(s).re - exact).abs() < 1e-13, "s={s}");
        }
        assert_eq!(w.value_at(17.0), ZERO);
    }

    #[test]
    fn gaussian_convolution() {
        let a = analysis(ModelSpace::euclidean(1).unwrap());
        let (s1, s2) = (0.5f64, 0.8f64);
        let g = |s: f64, sig: f64| (-s * s / (2.0 * sig * sig)).exp();
        let w1 = a.line_profile_real(|s| g(s, s1));
        let w2 = a.line_profile_real(|s| g(s, s2));
        let c = a.line_convolve(&w1, &w2).unwrap();
        let sig = (s1 * s1 + s2 * s2).sqrt();
        let mass = 2.0 * std::f64::consts::PI * s1 * s2 / (2.0 * std::f64::consts::PI).sqrt() / sig;
        for (s, v) in c.nodes().iter().zip(c.values()) {
            assert!((v.re - mass * g(*s, sig)).abs() < 1e-12);
        }
    }

    #[test]
    fn wide_convolution_is_rejected() {
        let a = analysis(ModelSpace::euclidean(1).unwrap());
        let w = a.line_profile_real(|s| (-(s - 8.0).powi(2)).exp() + (-(s + 8.0).powi(2)).exp());
        assert!(matches!(a.line_convolve(&w, &w), Err(Error::Truncation(_))));
    }

    #[test]
    fn line_cosine_pair_round_trip() {
        let a = analysis(ModelSpace::euclidean(1).unwrap());
        let w = a.line_profile_real(|s| (-s * s).exp());
        let back = a.line_inverse_fourier(&a.line_fourier(&w).unwrap()).unwrap();
        assert!(w.max_abs_diff(&back).unwrap() < 1e-12);
    }

    #[test]
    fn geometric_abel_of_gaussian_in_the_plane() {
        // ∫ exp(-(s² + t²)) dt = √π exp(-s²)
        let a = analysis(ModelSpace::euclidean(2).unwrap());
        let u = a.profile(|r| (-r * r).exp());
        let w = a.abel_transform_geometric(&u).unwrap();
        let pi_sqrt = std::f64::consts::PI.sqrt();
        for (s, v) in w.nodes().iter().zip(w.values()) {
            assert!((v.re - pi_sqrt * (-s * s).exp()).abs() < 1e-10, "s={s}");
        }
    }

    #[test]
    fn hyperbolic_abel_paths_agree() {
        let a = analysis(ModelSpace::hyperbolic(3).unwrap());
        let u = a.profile(|r| (-r * r).exp());
        let spectral = a.abel_transform(&u).unwrap();
        let geometric = a.abel_transform_geometric(&u).unwrap();
        assert!(spectral.max_abs_diff(&geometric).unwrap() < 1e-8 * geometric.sup_norm());
    }

    #[test]
    fn dual_abel_pairs_with_abel() {
        // ∫_ℝ 𝒜u · w ds = ∫_X u · a(w)
        let a = analysis(ModelSpace::damek_ricci(2, 1).unwrap());
        let u = a.profile(|r| (-(r - 0.5).powi(2)).exp() + (-(r + 0.5).powi(2)).exp());
        let w = a.line_profile_real(|s| (-0.5 * s * s).exp() * (1.0 + s * s));
        let au = a.abel_transform(&u).unwrap();
        let ds = au.ds();
        let last = au.len() - 1;
        let lhs: f64 = au
            .values()
            .iter()
            .zip(w.values())
            .enumerate()
            .map(|(j, (x, y))| (x * y).re * if j == 0 || j == last { ds } else { 2.0 * ds })
            .sum();
        let aw = a.dual_abel_spectral(&w).unwrap();
        let prod = a.profile(|r| u.value_at(r).re * aw.value_at(r).re);
        let rhs = a.integral(&prod).unwrap().re;
        assert!((lhs - rhs).abs() < 1e-8 * lhs.abs(), "{lhs} vs {rhs}");
    }
}
