//! The discretized spherical transform pair on one model space.
//!
//! An [`Analysis`] fixes a radial Chebyshev grid on `[0, R]`, a
//! Clenshaw–Curtis rule on `[0, R]` for radial integrals, a uniform spectral
//! grid on `[0, Λ]` and a uniform half-line grid on `[0, S]`. Tables of `φ_λ`
//! at the radial nodes are built once, lazily, in parallel over `λ`.
//!
//! ```text
//! f̂(λ)  = ω_{n-1} ∫₀^R u(r) φ_λ(r) A(r) dr              (Clenshaw–Curtis)
//! u(r)  = C ∫₀^Λ F(λ) φ_λ(r) ν(λ) dλ                    (trapezoid)
//! ```

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_space::{bernoulli_even, rational_to_f64, ModelSpace, SpaceKind};
use crate::quadrature::{clenshaw_curtis, Rule};
use crate::radial::{RadialGrid, RadialProfile};
use crate::spherical::{plancherel_density, spherical_values};

/// Relative size of `|u(R)|` above which a profile counts as not decayed.
pub const DECAY_TOLERANCE: f64 = 1e-12;
/// Relative size of spectral data at `Λ` above which synthesis is truncated.
pub const SPECTRAL_TAIL_TOLERANCE: f64 = 1e-10;

/// Discretization parameters shared by all transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub r_max: f64,
    pub radial_nodes: usize,
    pub quadrature_nodes: usize,
    pub lambda_max: f64,
    pub lambda_nodes: usize,
    /// Half-length of the line grid; `None` means `2 r_max`.
    pub s_max: Option<f64>,
    /// Nodes of the line grid on `[0, s_max]`.
    pub line_nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r_max: 8.0,
            radial_nodes: 257,
            quadrature_nodes: 513,
            lambda_max: 40.0,
            lambda_nodes: 2048,
            s_max: None,
            line_nodes: 2049,
        }
    }
}

impl GridConfig {
    pub fn s_max(&self) -> f64 {
        self.s_max.unwrap_or(2.0 * self.r_max)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("r_max", self.r_max), ("lambda_max", self.lambda_max), ("s_max", self.s_max())];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let counts = [
            ("radial_nodes", self.radial_nodes, 9),
            ("quadrature_nodes", self.quadrature_nodes, 9),
            ("lambda_nodes", self.lambda_nodes, 16),
            ("line_nodes", self.line_nodes, 16),
        ];
        for (name, v, min) in counts {
            if v < min {
                return Err(Error::Config(format!("{name} must be at least {min}, got {v}")));
            }
        }
        if self.s_max() < self.r_max {
            return Err(Error::Config("s_max must be at least r_max".into()));
        }
        Ok(())
    }
}

/// Values of a spectral function on the uniform grid `λ_k = k Λ/(K-1)`.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    lambdas: Arc<Vec<f64>>,
    values: Vec<Complex64>,
}

impl SpectralProfile {
    pub fn new(lambdas: Arc<Vec<f64>>, values: Vec<Complex64>) -> Result<Self> {
        if lambdas.len() != values.len() {
            return Err(Error::Domain("spectral values do not match the λ-grid".into()));
        }
        Ok(Self { lambdas, values })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.lambdas.iter().zip(&self.values).map(|(&l, &v)| f(l, v)).collect();
        Self { lambdas: self.lambdas.clone(), values }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::Domain("spectral profiles live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { lambdas: self.lambdas.clone(), values })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

struct PhiTables {
    /// `φ_{λ_k}` at the radial grid nodes, row `k`.
    grid: Vec<Vec<f64>>,
    /// `φ_{λ_k}` at the quadrature nodes, row `k`.
    quad: Vec<Vec<f64>>,
}

/// Endpoint corrections at `λ = 0` used when the synthesis integrand is odd.
const GREGORY_ORDER: usize = 16;

/// Trapezoid weights on `[0, (k-1)h]` corrected at `λ = 0` so that the rule is
/// exact on polynomials of degree `< m` there. The integrand is assumed
/// negligible at the far end. Plain trapezoid is `O(h²)` for integrands odd in
/// `λ`; the corrections `c_i` solve `Σ_i c_i i^j = B_{j+1}/(j+1)` for odd `j`
/// and `0` for even `j`, in exact arithmetic.
fn gregory_weights(k: usize, h: f64, m: usize) -> Vec<f64> {
    let m = m.min(k);
    let bern = bernoulli_even(m / 2 + 1);
    let mut rows: Vec<Vec<BigRational>> = (0..m)
        .map(|j| {
            let mut row: Vec<BigRational> =
                (0..m).map(|i| BigRational::from_integer(BigInt::from(i).pow(j as u32))).collect();
            let rhs = if j % 2 == 1 {
                bern[j.div_ceil(2)].clone() / BigRational::from_integer(BigInt::from(j + 1))
            } else {
                BigRational::zero()
            };
            row.push(rhs);
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !rows[r][col].is_zero()).expect("Vandermonde system is regular");
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        rows[col].iter_mut().for_each(|x| *x *= &inv);
        for r in 0..m {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let (src, dst) = if r < col {
                    let (a, b) = rows.split_at_mut(col);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[col], &mut b[0])
                };
                dst.iter_mut().zip(src).for_each(|(d, s)| *d -= &f * s);
            }
        }
    }
    let mut w = vec![h; k];
    w[0] *= 0.5;
    w[k - 1] *= 0.5;
    for (i, row) in rows.iter().enumerate() {
        w[i] += h * rational_to_f64(&row[m]);
    }
    w
}

/// Transform engine for one space and one discretization.
pub struct Analysis {
    space: ModelSpace,
    config: GridConfig,
    grid: Arc<RadialGrid>,
    quad: Rule,
    /// `ω_{n-1} w_q A(r_q)`.
    quad_measure: Vec<f64>,
    lambdas: Arc<Vec<f64>>,
    lambda_weights: Vec<f64>,
    /// Weights for `∫ F φ_λ ν dλ`; differ from `lambda_weights` when `ν` is odd.
    synthesis_weights: Vec<f64>,
    tables: OnceLock<std::result::Result<PhiTables, String>>,
    plancherel: OnceLock<std::result::Result<f64, (bool, String)>>,
}

impl std::fmt::Debug for Analysis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Analysis").field("space", &self.space).field("config", &self.config).finish()
    }
}

impl Analysis {
    pub fn new(space: ModelSpace, config: GridConfig) -> Result<Self> {
        config.validate()?;
        let grid = Arc::new(RadialGrid::new(config.r_max, config.radial_nodes)?);
        let quad = clenshaw_curtis(config.quadrature_nodes, 0.0, config.r_max);
        let omega = space.unit_sphere_area();
        let quad_measure = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .map(|(&r, &w)| omega * w * space.density_unchecked(r))
            .collect();
        let k = config.lambda_nodes;
        let h = config.lambda_max / (k - 1) as f64;
        let lambdas = Arc::new((0..k).map(|i| i as f64 * h).collect::<Vec<_>>());
        let mut lambda_weights = vec![h; k];
        lambda_weights[0] *= 0.5;
        lambda_weights[k - 1] *= 0.5;
        let odd_density = matches!(space.kind(), SpaceKind::Euclidean { n } if n % 2 == 0);
        let synthesis_weights = if odd_density { gregory_weights(k, h, GREGORY_ORDER) } else { lambda_weights.clone() };
        Ok(Self {
            space,
            config,
            grid,
            quad,
            quad_measure,
            lambdas,
            lambda_weights,
            synthesis_weights,
            tables: OnceLock::new(),
            plancherel: OnceLock::new(),
        })
    }

    pub fn with_defaults(space: ModelSpace) -> Result<Self> {
        Self::new(space, GridConfig::default())
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn quadrature(&self) -> &Rule {
        &self.quad
    }

    pub fn lambdas(&self) -> &Arc<Vec<f64>> {
        &self.lambdas
    }

    pub(crate) fn lambda_weights(&self) -> &[f64] {
        &self.lambda_weights
    }

    pub fn profile(&self, f: impl Fn(f64) -> f64) -> RadialProfile {
        RadialProfile::from_real_fn(self.grid.clone(), f)
    }

    pub fn spectral(&self, f: impl Fn(f64) -> Complex64) -> SpectralProfile {
        let values = self.lambdas.iter().map(|&l| f(l)).collect();
        SpectralProfile { lambdas: self.lambdas.clone(), values }
    }

    pub fn spherical_function(&self, lambda: Complex64) -> Result<RadialProfile> {
        crate::spherical::spherical_function(&self.space, lambda, self.grid.clone())
    }

    fn tables(&self) -> Result<&PhiTables> {
        self.tables
            .get_or_init(|| self.build_tables())
            .as_ref()
            .map_err(|e| Error::Accuracy(e.clone()))
    }

    fn build_tables(&self) -> std::result::Result<PhiTables, String> {
        // merge radial and quadrature nodes into one sorted list per λ
        let g = self.grid.nodes();
        let q = &self.quad.nodes;
        let mut merged: Vec<(f64, bool, usize)> = g
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, true, i))
            .chain(q.iter().enumerate().map(|(i, &r)| (r, false, i)))
            .collect();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        let radii: Vec<f64> = merged.iter().map(|m| m.0).collect();
        let rows: Vec<(Vec<f64>, Vec<f64>)> = self
            .lambdas
            .par_iter()
            .map(|&lambda| {
                let phi = spherical_values(&self.space, Complex64::new(lambda, 0.0), &radii)
                    .map_err(|e| e.to_string())?;
                let mut at_grid = vec![0.0; g.len()];
                let mut at_quad = vec![0.0; q.len()];
                for (m, v) in merged.iter().zip(&phi) {
                    if m.1 {
                        at_grid[m.2] = v.re;
                    } else {
                        at_quad[m.2] = v.re;
                    }
                }
                Ok((at_grid, at_quad))
            })
            .collect::<std::result::Result<_, String>>()?;
        let (grid, quad) = rows.into_iter().unzip();
        Ok(PhiTables { grid, quad })
    }

    /// Fails with a truncation error if `u` has not decayed at `R`.
    pub fn check_decay(&self, u: &RadialProfile) -> Result<()> {
        let norm = u.sup_norm();
        let tail = u.values().last().map_or(0.0, |v| v.norm());
        if tail > DECAY_TOLERANCE * norm {
            return Err(Error::Truncation(format!(
                "profile has |u(R)| = {tail:.3e} relative to sup {norm:.3e} at R = {}",
                self.config.r_max
            )));
        }
        Ok(())
    }

    /// Samples of `u` at the quadrature nodes.
    pub fn quadrature_values(&self, u: &RadialProfile) -> Result<Vec<Complex64>> {
        if u.grid().len() != self.grid.len() || u.r_max() != self.grid.r_max() {
            return Err(Error::Domain("profile does not live on the analysis grid".into()));
        }
        Ok(self.quad.nodes.iter().map(|&r| u.value_at(r)).collect())
    }

    /// `ω_{n-1} ∫ u A dr`.
    pub fn integral(&self, u: &RadialProfile) -> Result<Complex64> {
        let vals = self.quadrature_values(u)?;
        Ok(vals.iter().zip(&self.quad_measure).map(|(v, m)| v * m).sum())
    }

    /// Radial `L¹` norm `ω_{n-1} ∫ |u| A dr`.
    pub fn l1_norm(&self, u: &RadialProfile) -> Result<f64> {
        Ok(self.l1_norm_of_samples(&self.quadrature_values(u)?))
    }

    pub(crate) fn l1_norm_of_samples(&self, samples: &[Complex64]) -> f64 {
        samples.iter().zip(&self.quad_measure).map(|(v, m)| v.norm() * m).sum()
    }

    pub(crate) fn quad_measure(&self) -> &[f64] {
        &self.quad_measure
    }

    /// Spherical transform `f̂(λ) = ω_{n-1} ∫ u φ_λ A dr` on the λ-grid.
    pub fn spherical_fourier(&self, u: &RadialProfile) -> Result<SpectralProfile> {
        self.check_decay(u)?;
        self.spherical_fourier_unchecked(u)
    }

    /// [`Self::spherical_fourier`] without the decay check, for images of
    /// decayed profiles under local operators (whose endpoint values carry
    /// only differentiation noise).
    pub(crate) fn spherical_fourier_unchecked(&self, u: &RadialProfile) -> Result<SpectralProfile> {
        let samples = self.quadrature_values(u)?;
        self.fourier_from_samples(&samples)
    }

    pub(crate) fn fourier_from_samples(&self, samples: &[Complex64]) -> Result<SpectralProfile> {
        let weighted: Vec<Complex64> =
            samples.iter().zip(&self.quad_measure).map(|(v, m)| v * m).collect();
        let tables = self.tables()?;
        let values = tables
            .quad
            .par_iter()
            .map(|row| row.iter().zip(&weighted).map(|(p, w)| w * p).sum())
            .collect();
        Ok(SpectralProfile { lambdas: self.lambdas.clone(), values })
    }

    /// `ν(λ_k)` on the λ-grid (unnormalized).
    pub fn plancherel_weights(&self) -> Result<Vec<f64>> {
        self.lambdas.iter().map(|&l| plancherel_density(&self.space, l)).collect()
    }

    /// Plancherel constant `C`, calibrated by requiring the round trip to be
    /// the identity on the reference bump `exp(-(8r/R)²)`.
    pub fn plancherel_constant(&self) -> Result<f64> {
        let cached = self.plancherel.get_or_init(|| {
            self.calibrate().map_err(|e| match e {
                Error::Capability(msg) => (true, msg),
                other => (false, other.to_string()),
            })
        });
        match cached {
            Ok(c) => Ok(*c),
            Err((true, msg)) => Err(Error::Capability(msg.clone())),
            Err((false, msg)) => Err(Error::Accuracy(msg.clone())),
        }
    }

    fn calibrate(&self) -> Result<f64> {
        let scale = 8.0 / self.config.r_max;
        let bump = self.profile(|r| (-(scale * r).powi(2)).exp());
        let spectrum = self.spherical_fourier(&bump)?;
        let raw = self.synthesize_raw(&spectrum)?;
        let (mut num, mut den) = (0.0, 0.0);
        for (u, v) in bump.values().iter().zip(raw.values()) {
            num += (u * v.conj()).re;
            den += v.norm_sqr();
        }
        if !(den > 0.0) {
            return Err(Error::Accuracy("Plancherel calibration degenerate".into()));
        }
        Ok(num / den)
    }

    /// `Σ_k τ_k F_k ν_k φ_k` at the radial nodes, without `C`.
    fn synthesize_raw(&self, spectrum: &SpectralProfile) -> Result<RadialProfile> {
        let nu = self.plancherel_weights()?;
        let coeffs: Vec<Complex64> = spectrum
            .values
            .iter()
            .zip(nu.iter().zip(&self.synthesis_weights))
            .map(|(f, (n, w))| f * (n * w))
            .collect();
        RadialProfile::new(self.grid.clone(), self.weighted_sum(&coeffs, true)?)
    }

    /// `Σ_k c_k φ_{λ_k}(r)` at the radial nodes (or quadrature nodes).
    pub(crate) fn weighted_sum(&self, coeffs: &[Complex64], on_grid: bool) -> Result<Vec<Complex64>> {
        let tables = self.tables()?;
        let rows = if on_grid { &tables.grid } else { &tables.quad };
        let len = rows.first().map_or(0, Vec::len);
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (c, row) in coeffs.iter().zip(rows) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, p) in out.iter_mut().zip(row) {
                *o += c * p;
            }
        }
        Ok(out)
    }

    /// Fails with a truncation error if `F ν` has not decayed at `Λ`.
    fn check_spectral_tail(&self, spectrum: &SpectralProfile, nu: &[f64]) -> Result<()> {
        let weighted: Vec<f64> = spectrum.values.iter().zip(nu).map(|(f, n)| f.norm() * n).collect();
        let max = weighted.iter().copied().fold(0.0, f64::max);
        let tail = *weighted.last().unwrap_or(&0.0);
        if tail > SPECTRAL_TAIL_TOLERANCE * max {
            return Err(Error::Truncation(format!(
                "spectral data not decayed at Λ = {} (relative tail {:.3e})",
                self.config.lambda_max,
                tail / max
            )));
        }
        Ok(())
    }

    fn synthesis_coefficients(&self, spectrum: &SpectralProfile) -> Result<Vec<Complex64>> {
        if spectrum.values.len() != self.lambdas.len() {
            return Err(Error::Domain("spectral profile does not match the λ-grid".into()));
        }
        let nu = self.plancherel_weights()?;
        self.check_spectral_tail(spectrum, &nu)?;
        let c = self.plancherel_constant()?;
        Ok(spectrum
            .values
            .iter()
            .zip(nu.iter().zip(&self.synthesis_weights))
            .map(|(f, (n, w))| f * (c * n * w))
            .collect())
    }

    /// Inverse spherical transform `u(r) = C ∫ F φ_λ(r) ν dλ` at the radial nodes.
    pub fn inverse_spherical(&self, spectrum: &SpectralProfile) -> Result<RadialProfile> {
        let coeffs = self.synthesis_coefficients(spectrum)?;
        RadialProfile::new(self.grid.clone(), self.weighted_sum(&coeffs, true)?)
    }

    /// Inverse spherical transform sampled at the quadrature nodes.
    pub fn inverse_spherical_at_quadrature(&self, spectrum: &SpectralProfile) -> Result<Vec<Complex64>> {
        let coeffs = self.synthesis_coefficients(spectrum)?;
        self.weighted_sum(&coeffs, false)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model_space::unit_sphere_area;

    fn small() -> GridConfig {
        GridConfig { lambda_nodes: 1024, lambda_max: 30.0, ..GridConfig::default() }
    }

    #[test]
    fn calibrated_constant_matches_classical_value() {
        for (space, expected) in [
            (ModelSpace::hyperbolic(3).unwrap(), 1.0 / (2.0 * PI * PI)),
            (ModelSpace::euclidean(3).unwrap(), 1.0 / (2.0 * PI * PI)),
            (ModelSpace::euclidean(1).unwrap(), 1.0 / PI),
            (ModelSpace::hyperbolic(2).unwrap(), 1.0 / (2.0 * PI)),
        ] {
            let a = Analysis::new(space, small()).unwrap();
            let c = a.plancherel_constant().unwrap();
            assert!((c / expected - 1.0).abs() < 1e-8, "{space}: {c} vs {expected}");
            let n = space.dimension();
            let formula = unit_sphere_area(n) / (2.0 * PI).powi(n as i32);
            assert!((formula / expected - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn damek_ricci_synthesis_is_unsupported() {
        let a = Analysis::new(ModelSpace::damek_ricci(2, 1).unwrap(), small()).unwrap();
        assert!(matches!(a.plancherel_constant(), Err(Error::Capability(_))));
        let u = a.profile(|r| (-r * r).exp());
        assert!(a.spherical_fourier(&u).is_ok());
    }

    #[test]
    fn slow_decay_is_flagged() {
        let a = Analysis::new(ModelSpace::hyperbolic(3).unwrap(), small()).unwrap();
        let u = a.profile(|r| (-0.1 * r).exp());
        assert!(matches!(a.spherical_fourier(&u), Err(Error::Truncation(_))));
    }
}
