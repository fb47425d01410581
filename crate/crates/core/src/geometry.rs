//! Point-level geometry of `ℝⁿ` and `Hⁿ`.
//!
//! `Hⁿ` is realized as the upper sheet of `⟨x, x⟩ = -1` in `ℝ^{n,1}` with
//! `⟨a, b⟩ = -a₀b₀ + Σ aᵢbᵢ`; the base point is `(1, 0, …, 0)`. Charts are the
//! upper half-space `(x₁, …, x_{n-1}, y)`, `y > 0`, with the base point at
//! `(0, …, 0, 1)`.
//!
//! Point functions are plain closures `Fn(&Point) -> Complex64`; they must be
//! pure, since quadratures evaluate them concurrently.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_space::{ModelSpace, SpaceKind};
use crate::quadrature::gauss_legendre;
use crate::radial::{RadialGrid, RadialProfile};
use crate::spherical::spherical_values;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Tolerance on the hyperboloid constraint and on tangent vector norms.
pub const POINT_TOLERANCE: f64 = 1e-10;

/// A point in the ambient coordinates (`ℝⁿ`, or `ℝ^{n+1}` for the hyperboloid).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// A unit tangent vector at `base`, in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    base: Point,
    dir: Vec<f64>,
}

impl UnitVector {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn direction(&self) -> &[f64] {
        &self.dir
    }
}

/// A geodesic ball, used to describe supports.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// Product quadrature on the unit sphere `S^{n-1} ⊂ ℝⁿ`, weights summing to 1.
#[derive(Debug, Clone)]
pub struct SphereRule {
    dirs: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// `S⁰`: two points. `S¹`: `azimuth` equispaced angles. `S²`: Gauss–Legendre
    /// in `cos θ` with `polar` nodes times `azimuth` equispaced angles.
    pub fn new(n: usize, polar: usize, azimuth: usize) -> Result<Self> {
        use std::f64::consts::PI;
        match n {
            1 => Ok(Self { dirs: vec![vec![1.0], vec![-1.0]], weights: vec![0.5, 0.5] }),
            2 => {
                let dirs = (0..azimuth)
                    .map(|k| {
                        let a = 2.0 * PI * k as f64 / azimuth as f64;
                        vec![a.cos(), a.sin()]
                    })
                    .collect();
                Ok(Self { dirs, weights: vec![1.0 / azimuth as f64; azimuth] })
            }
            3 => {
                let gl = gauss_legendre(polar);
                let mut dirs = Vec::with_capacity(polar * azimuth);
                let mut weights = Vec::with_capacity(polar * azimuth);
                for (&z, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let s = (1.0 - z * z).sqrt();
                    for k in 0..azimuth {
                        let a = 2.0 * PI * k as f64 / azimuth as f64;
                        dirs.push(vec![s * a.cos(), s * a.sin(), z]);
                        weights.push(0.5 * w / azimuth as f64);
                    }
                }
                Ok(Self { dirs, weights })
            }
            _ => Err(Error::Capability(format!("no sphere quadrature for S^{}", n - 1))),
        }
    }

    /// 512 points on `S¹`; 64 × 128 on `S²`.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::new(n, 64, if n == 2 { 512 } else { 128 })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// Point-level operations on a model space with `point_ops`.
#[derive(Debug, Clone)]
pub struct Geometry {
    space: ModelSpace,
    hyperbolic: bool,
    n: usize,
    sphere: Arc<SphereRule>,
}

fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Geometry {
    pub fn new(space: ModelSpace) -> Result<Self> {
        if !space.point_ops() {
            return Err(Error::Capability(format!("{space} has no point-level chart")));
        }
        let n = space.dimension();
        if n > 3 {
            return Err(Error::Capability(format!("point operations are implemented up to dimension 3, not {n}")));
        }
        let hyperbolic = matches!(space.kind(), SpaceKind::RealHyperbolic { .. });
        Ok(Self { space, hyperbolic, n, sphere: Arc::new(SphereRule::default_for(n)?) })
    }

    pub fn with_sphere_rule(mut self, rule: SphereRule) -> Result<Self> {
        if rule.dirs.first().map_or(0, Vec::len) != self.n {
            return Err(Error::Domain("sphere rule has the wrong dimension".into()));
        }
        self.sphere = Arc::new(rule);
        Ok(self)
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn sphere_rule(&self) -> &SphereRule {
        &self.sphere
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.hyperbolic {
            minkowski(a, b)
        } else {
            euclid(a, b)
        }
    }

    /// The base point `x₀`.
    pub fn origin(&self) -> Point {
        let mut coords = vec![0.0; self.ambient_dim()];
        if self.hyperbolic {
            coords[0] = 1.0;
        }
        Point { coords }
    }

    fn ambient_dim(&self) -> usize {
        if self.hyperbolic {
            self.n + 1
        } else {
            self.n
        }
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::Domain(format!("expected {} coordinates", self.ambient_dim())));
        }
        if self.hyperbolic {
            let q = minkowski(&coords, &coords);
            if (q + 1.0).abs() > POINT_TOLERANCE * coords[0].powi(2).max(1.0) || coords[0] <= 0.0 {
                return Err(Error::Domain(format!("not on the upper hyperboloid sheet (⟨x,x⟩ = {q})")));
            }
        }
        Ok(Point { coords })
    }

    /// Point with chart coordinates (half-space for `Hⁿ`, identity for `ℝⁿ`).
    pub fn from_chart(&self, x: &[f64]) -> Result<Point> {
        if x.len() != self.n {
            return Err(Error::Domain(format!("expected {} chart coordinates", self.n)));
        }
        if !self.hyperbolic {
            return Ok(Point { coords: x.to_vec() });
        }
        let y = x[self.n - 1];
        if !(y > 0.0) {
            return Err(Error::Domain("half-space chart needs y > 0".into()));
        }
        let horizontal = &x[..self.n - 1];
        let h2: f64 = horizontal.iter().map(|v| v * v).sum();
        let mut coords = Vec::with_capacity(self.n + 1);
        coords.push((1.0 + h2 + y * y) / (2.0 * y));
        coords.extend(horizontal.iter().map(|v| v / y));
        coords.push((1.0 - h2 - y * y) / (2.0 * y));
        Ok(Point { coords })
    }

    pub fn to_chart(&self, p: &Point) -> Vec<f64> {
        if !self.hyperbolic {
            return p.coords.clone();
        }
        let c = &p.coords;
        let y = 1.0 / (c[0] + c[self.n]);
        let mut x: Vec<f64> = c[1..self.n].iter().map(|v| v * y).collect();
        x.push(y);
        x
    }

    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        let diff: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
        let chord2 = self.inner(&diff, &diff).max(0.0);
        if !self.hyperbolic {
            return chord2.sqrt();
        }
        // |p - q|² = 4 sinh²(d/2), accurate for small d
        let pairing = -minkowski(&p.coords, &q.coords);
        if pairing < 2.0 {
            2.0 * (0.5 * chord2.sqrt()).asinh()
        } else {
            pairing.acosh()
        }
    }

    /// Orthonormal basis of the tangent space at `p`.
    pub fn tangent_frame(&self, p: &Point) -> Vec<Vec<f64>> {
        let dim = self.ambient_dim();
        let offset = dim - self.n;
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut v = vec![0.0; dim];
            v[offset + i] = 1.0;
            if self.hyperbolic {
                let c = minkowski(&v, &p.coords);
                for (vk, pk) in v.iter_mut().zip(&p.coords) {
                    *vk += c * pk;
                }
            }
            for e in &frame {
                let c = self.inner(&v, e);
                for (vk, ek) in v.iter_mut().zip(e) {
                    *vk -= c * ek;
                }
            }
            let norm = self.inner(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            frame.push(v);
        }
        frame
    }

    /// Unit vector at `p` with the given components in [`Self::tangent_frame`].
    pub fn unit_vector(&self, p: &Point, components: &[f64]) -> Result<UnitVector> {
        if components.len() != self.n {
            return Err(Error::Domain(format!("expected {} tangent components", self.n)));
        }
        let norm = euclid(components, components).sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("zero tangent vector".into()));
        }
        let frame = self.tangent_frame(p);
        let mut dir = vec![0.0; self.ambient_dim()];
        for (c, e) in components.iter().zip(&frame) {
            for (d, ek) in dir.iter_mut().zip(e) {
                *d += c / norm * ek;
            }
        }
        Ok(UnitVector { base: p.clone(), dir })
    }

    /// `c_v(t)`, the unit-speed geodesic with `c(0) = base`, `ċ(0) = v`.
    pub fn exp_map(&self, v: &UnitVector, t: f64) -> Point {
        let coords = if self.hyperbolic {
            let (c, s) = (t.cosh(), t.sinh());
            v.base.coords.iter().zip(&v.dir).map(|(p, d)| c * p + s * d).collect()
        } else {
            v.base.coords.iter().zip(&v.dir).map(|(p, d)| p + t * d).collect()
        };
        Point { coords }
    }

    /// Busemann function `b_v(x) = lim_{t→∞} d(x, c_v(t)) - t`.
    pub fn busemann(&self, v: &UnitVector, x: &Point) -> f64 {
        if self.hyperbolic {
            let ideal: Vec<f64> = v.base.coords.iter().zip(&v.dir).map(|(p, d)| p + d).collect();
            (-minkowski(&x.coords, &ideal)).ln()
        } else {
            let diff: Vec<f64> = x.coords.iter().zip(&v.base.coords).map(|(a, b)| a - b).collect();
            -euclid(&diff, &v.dir)
        }
    }

    /// Nodes of the sphere rule mapped onto `S(x, t)`, with weights summing to 1.
    pub fn sphere_points(&self, x: &Point, t: f64) -> Vec<(Point, f64)> {
        let frame = self.tangent_frame(x);
        self.sphere
            .dirs
            .iter()
            .zip(&self.sphere.weights)
            .map(|(c, &w)| {
                let mut dir = vec![0.0; self.ambient_dim()];
                for (ci, e) in c.iter().zip(&frame) {
                    for (d, ek) in dir.iter_mut().zip(e) {
                        *d += ci * ek;
                    }
                }
                (self.exp_map(&UnitVector { base: x.clone(), dir }, t), w)
            })
            .collect()
    }

    /// Spherical mean `Π_t f(x)`.
    pub fn sphere_average<F>(&self, f: &F, x: &Point, t: f64) -> Complex64
    where
        F: Fn(&Point) -> Complex64 + Sync,
    {
        if t == 0.0 {
            return f(x);
        }
        let values: Vec<Complex64> = self.sphere_points(x, t).par_iter().map(|(p, w)| f(p) * w).collect();
        values.iter().sum()
    }

    /// Radialization `R_x f`: the profile `r ↦ Π_r f(x)` on `grid`.
    pub fn radialize<F>(&self, f: &F, x: &Point, grid: Arc<RadialGrid>) -> RadialProfile
    where
        F: Fn(&Point) -> Complex64 + Sync,
    {
        let values = grid.nodes().iter().map(|&r| self.sphere_average(f, x, r)).collect();
        RadialProfile::new(grid, values).expect("grid-sized values")
    }

    /// Translation `τ_x u = u ∘ d(x, ·)`.
    pub fn translate(&self, x: &Point, u: &RadialProfile) -> Translated {
        Translated { geometry: self.clone(), center: x.clone(), profile: u.clone() }
    }

    /// Quadrature on a geodesic ball in polar coordinates about its center:
    /// `∫_B f = ω_{n-1} ∫₀^ρ A(r) (mean of f over S(c, r)) dr`.
    pub fn ball_rule(&self, ball: &Ball, radial_panels: usize) -> Vec<(Point, f64)> {
        let gl = gauss_legendre(16).composite(0.0, ball.radius, radial_panels.max(1));
        let omega = self.space.unit_sphere_area();
        let mut out = Vec::with_capacity(gl.nodes.len() * self.sphere.len());
        for (&r, &w) in gl.nodes.iter().zip(&gl.weights) {
            let radial = omega * w * self.space.density_unchecked(r);
            for (p, ws) in self.sphere_points(&ball.center, r) {
                out.push((p, radial * ws));
            }
        }
        out
    }

    /// `∫_B f` by [`Self::ball_rule`].
    pub fn integrate<F>(&self, f: &F, ball: &Ball, radial_panels: usize) -> Complex64
    where
        F: Fn(&Point) -> Complex64 + Sync,
    {
        let values: Vec<Complex64> = self.ball_rule(ball, radial_panels).par_iter().map(|(p, w)| f(p) * w).collect();
        values.iter().sum()
    }

    /// Brute-force `(f ∗ u)(x) = ∫_X f(y) u(d(x, y)) dy` for `f` supported in `support`.
    pub fn convolve_general<F>(&self, f: &F, support: &Ball, u: &RadialProfile, x: &Point) -> Result<Complex64>
    where
        F: Fn(&Point) -> Complex64 + Sync,
    {
        let interior = self.sphere_points(&support.center, 0.5 * support.radius);
        let boundary = self.sphere_points(&support.center, support.radius);
        let inner = interior.iter().map(|(p, _)| f(p).norm()).fold(f(&support.center).norm(), f64::max);
        let edge = boundary.iter().map(|(p, _)| f(p).norm()).fold(0.0, f64::max);
        if edge > 1e-8 * inner.max(f64::MIN_POSITIVE) {
            return Err(Error::Truncation(format!(
                "function is not supported in the given ball (edge/interior = {:.2e})",
                edge / inner
            )));
        }
        let panels = (support.radius / 0.25).ceil() as usize;
        let table = u.tabulate(4097);
        let integrand = |p: &Point| f(p) * table.value_at(self.distance(x, p));
        Ok(self.integrate(&integrand, support, panels))
    }

    /// Laplace–Beltrami operator by fourth-order central differences in the
    /// chart: `Δ = y² Σ ∂ᵢ² - (n-2) y ∂_y` on the half-space, `Σ ∂ᵢ²` on `ℝⁿ`.
    pub fn chart_laplacian<F>(&self, f: &F, p: &Point, step: f64) -> Complex64
    where
        F: Fn(&Point) -> Complex64 + Sync,
    {
        let x = self.to_chart(p);
        let scale = if self.hyperbolic { x[self.n - 1] } else { 1.0 };
        let h = step * scale;
        let at = |i: usize, off: f64| {
            let mut z = x.clone();
            z[i] += off;
            f(&self.from_chart(&z).expect("chart point"))
        };
        let centre = f(p);
        let mut second = ZERO;
        let mut first_y = ZERO;
        for i in 0..self.n {
            let (m2, m1, p1, p2) = (at(i, -2.0 * h), at(i, -h), at(i, h), at(i, 2.0 * h));
            second += (-m2 + m1 * 16.0 - centre * 30.0 + p1 * 16.0 - p2) / (12.0 * h * h);
            if i == self.n - 1 {
                first_y = (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h);
            }
        }
        if self.hyperbolic {
            let y = x[self.n - 1];
            second * (y * y) - first_y * ((self.n as f64 - 2.0) * y)
        } else {
            second
        }
    }

    /// `count` points at distance at most `max_distance` from `x₀`, seeded.
    pub fn sample_points(&self, seed: u64, count: usize, max_distance: f64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let origin = self.origin();
        (0..count)
            .map(|_| {
                let comps: Vec<f64> = loop {
                    let c: Vec<f64> = (0..self.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm = euclid(&c, &c);
                    if norm > 1e-3 && norm <= 1.0 {
                        break c;
                    }
                };
                let v = self.unit_vector(&origin, &comps).expect("nonzero");
                self.exp_map(&v, rng.gen_range(0.0..max_distance))
            })
            .collect()
    }

    /// The horospherical eigenfunction `e^{(iλ-ρ) b_v}` with eigenvalue `-(λ²+ρ²)`.
    pub fn horospherical_wave(&self, v: &UnitVector, lambda: f64) -> impl Fn(&Point) -> Complex64 + Sync + '_ {
        let v = v.clone();
        let exponent = Complex64::new(-self.space.rho(), lambda);
        move |p: &Point| (exponent * self.busemann(&v, p)).exp()
    }

    /// Dual Abel transform by quadrature: `a(w)(r)` is the mean over `S(x₀, r)`
    /// of `e^{-ρ b_v} w(b_v)`.
    pub fn dual_abel_quadrature<W>(&self, w: &W, grid: Arc<RadialGrid>) -> RadialProfile
    where
        W: Fn(f64) -> Complex64 + Sync,
    {
        let origin = self.origin();
        let mut comps = vec![0.0; self.n];
        comps[self.n - 1] = 1.0;
        let v = self.unit_vector(&origin, &comps).expect("unit vector");
        let rho = self.space.rho();
        let g = |p: &Point| {
            let b = self.busemann(&v, p);
            w(b) * (-rho * b).exp()
        };
        self.radialize(&g, &origin, grid)
    }

    /// Checks `Π_t f(x) = f(x) φ_λ(t)` and `Δf(x) = -(λ²+ρ²) f(x)` at each sample.
    pub fn eigenfunction_check<F>(
        &self,
        f: &F,
        lambda: Complex64,
        samples: &[Point],
        times: &[f64],
        tolerance: f64,
    ) -> Result<EigenReport>
    where
        F: Fn(&Point) -> Complex64 + Sync,
    {
        let mut sorted = times.to_vec();
        sorted.sort_by(f64::total_cmp);
        let phi = spherical_values(&self.space, lambda, &sorted)?;
        let mu = lambda * lambda + self.space.rho() * self.space.rho();
        let n = self.n as f64;
        let mut entries = Vec::with_capacity(samples.len());
        for x in samples {
            let fx = f(x);
            let scale = fx.norm().max(f64::MIN_POSITIVE);
            let residual = sorted
                .iter()
                .zip(&phi)
                .map(|(&t, p)| (self.sphere_average(f, x, t) - fx * p).norm() / scale)
                .fold(0.0, f64::max);
            // 2n(Π_t f - f)/t² = Δf + O(t²), one Richardson step
            let estimate = |t: f64| (self.sphere_average(f, x, t) - fx) * (2.0 * n / (t * t));
            let t0 = 0.02;
            let lap = (estimate(0.5 * t0) * 4.0 - estimate(t0)) / 3.0;
            let laplacian_residual = (lap + mu * fx).norm() / scale;
            entries.push(EigenSample {
                x: x.coords.clone(),
                residual,
                laplacian_residual,
                pass: residual <= tolerance && laplacian_residual <= tolerance,
            });
        }
        let pass = entries.iter().all(|e| e.pass);
        Ok(EigenReport { tolerance, samples: entries, pass })
    }
}

/// `τ_x u` as an evaluator.
#[derive(Debug, Clone)]
pub struct Translated {
    geometry: Geometry,
    center: Point,
    profile: RadialProfile,
}

impl Translated {
    pub fn try_eval(&self, y: &Point) -> Result<Complex64> {
        self.profile.try_value_at(self.geometry.distance(&self.center, y))
    }

    /// Value at `y`, zero beyond `r_max`.
    pub fn eval(&self, y: &Point) -> Complex64 {
        self.profile.value_at(self.geometry.distance(&self.center, y))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenSample {
    pub x: Vec<f64>,
    pub residual: f64,
    pub laplacian_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub tolerance: f64,
    pub samples: Vec<EigenSample>,
    pub pass: bool,
}

impl EigenReport {
    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual.max(s.laplacian_residual)).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: usize) -> Geometry {
        Geometry::new(ModelSpace::hyperbolic(n).unwrap()).unwrap()
    }

    #[test]
    fn damek_ricci_has_no_points() {
        let dr = ModelSpace::damek_ricci(2, 1).unwrap();
        assert!(matches!(Geometry::new(dr), Err(Error::Capability(_))));
    }

    #[test]
    fn exp_and_distance() {
        let e = Geometry::new(ModelSpace::euclidean(3).unwrap()).unwrap();
        let o = e.origin();
        let v = e.unit_vector(&o, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.distance(&o, &e.exp_map(&v, 3.0)), 3.0);
        let g = h(2);
        let o = g.origin();
        let v = g.unit_vector(&o, &[0.3, -0.7]).unwrap();
        let p = g.exp_map(&v, 1.5);
        assert!(g.point(p.coords.clone()).is_ok());
        assert!((g.distance(&o, &p) - 1.5).abs() < 1e-12);
        let q = g.exp_map(&g.unit_vector(&p, &[1.0, 1.0]).unwrap(), 0.8);
        let cosh = -minkowski(&p.coords, &q.coords);
        assert!((g.distance(&p, &q).cosh() - cosh).abs() < 1e-12);
        assert!((g.distance(&p, &q) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn chart_round_trip() {
        let g = h(3);
        let p = g.from_chart(&[0.3, -1.2, 0.4]).unwrap();
        assert!(g.point(p.coords.clone()).is_ok());
        let x = g.to_chart(&p);
        assert!((x[0] - 0.3).abs() < 1e-14 && (x[1] + 1.2).abs() < 1e-14 && (x[2] - 0.4).abs() < 1e-14);
        assert_eq!(g.to_chart(&g.origin()), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn busemann_along_ray() {
        for g in [h(3), Geometry::new(ModelSpace::euclidean(2).unwrap()).unwrap()] {
            let o = g.origin();
            let comps = vec![0.6; g.space().dimension()];
            let v = g.unit_vector(&o, &comps).unwrap();
            assert!(g.busemann(&v, &o).abs() < 1e-15);
            for t in [0.5, 2.0, 4.0] {
                assert!((g.busemann(&v, &g.exp_map(&v, t)) + t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn horospherical_laplacian() {
        // Δ(u∘b) = u'' + 2ρ u' for u = exp(-s²)
        let g = h(3);
        let v = g.unit_vector(&g.origin(), &[0.0, 0.0, 1.0]).unwrap();
        let f = |p: &Point| Complex64::new((-g.busemann(&v, p).powi(2)).exp(), 0.0);
        for p in g.sample_points(7, 4, 1.5) {
            let s = g.busemann(&v, &p);
            let u1 = -2.0 * s * (-s * s).exp();
            let u2 = (4.0 * s * s - 2.0) * (-s * s).exp();
            let lap = g.chart_laplacian(&f, &p, 1e-2);
            assert!((lap.re - (u2 + 2.0 * u1)).abs() < 1e-6, "{} vs {}", lap.re, u2 + 2.0 * u1);
        }
    }

    #[test]
    fn mean_value_property() {
        let e = Geometry::new(ModelSpace::euclidean(3).unwrap()).unwrap();
        let x = e.point(vec![0.2, -0.1, 0.4]).unwrap();
        let f = |p: &Point| Complex64::new(2.0 * p.coords[0] - p.coords[2] + 1.0, 0.0);
        assert!((e.sphere_average(&f, &x, 1.7) - f(&x)).norm() < 1e-13);
        let one = |_: &Point| Complex64::new(1.0, 0.0);
        assert!((e.sphere_average(&one, &x, 3.0).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn horospherical_wave_is_eigenfunction() {
        let g = h(3);
        let v = g.unit_vector(&g.origin(), &[0.0, 0.0, 1.0]).unwrap();
        let f = g.horospherical_wave(&v, 1.0);
        let samples = g.sample_points(3, 2, 1.0);
        let report = g
            .eigenfunction_check(&f, Complex64::new(1.0, 0.0), &samples, &[0.25, 0.5, 1.0, 2.0], 1e-6)
            .unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn translation_preserves_integral() {
        let g = h(2);
        let grid = Arc::new(RadialGrid::new(6.0, 129).unwrap());
        let u = RadialProfile::from_real_fn(grid, |r| (-4.0 * r * r).exp());
        let x = g.from_chart(&[0.7, 1.8]).unwrap();
        let tu = g.translate(&x, &u);
        let f = |p: &Point| tu.eval(p);
        let around_origin = g.integrate(&f, &Ball { center: g.origin(), radius: 4.0 }, 32);
        let exact = 2.0 * std::f64::consts::PI
            * crate::quadrature::gauss_legendre(40)
                .composite(0.0, 6.0, 12)
                .integrate(|r| (-4.0 * r * r).exp() * r.sinh());
        assert!((around_origin.re / exact - 1.0).abs() < 1e-4);
    }
}
