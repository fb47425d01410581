//! Seeded families of smooth test profiles.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::Analysis;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};
use crate::radial::{RadialGrid, RadialProfile};

/// `w · ½(e^{-((r-c)/σ)²} + e^{-((r+c)/σ)²})`, even and entire in `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub weight: f64,
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn eval(&self, r: f64) -> f64 {
        let a = ((r - self.center) / self.width).powi(2);
        let b = ((r + self.center) / self.width).powi(2);
        0.5 * self.weight * ((-a).exp() + (-b).exp())
    }
}

/// A seeded mixture of [`Bump`]s with widths in `[0.6, 1]`, centers in
/// `[0, 1.5]` and weights in `[0.5, 1.5]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BumpMixture {
    pub seed: u64,
    pub components: Vec<Bump>,
}

impl BumpMixture {
    pub fn seeded(seed: u64, count: usize) -> Self {
        Self::draw(seed, count, true)
    }

    /// Like [`Self::seeded`] with every center at the origin.
    pub fn centered(seed: u64, count: usize) -> Self {
        Self::draw(seed, count, false)
    }

    fn draw(seed: u64, count: usize, shifted: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let components = (0..count.max(1))
            .map(|_| {
                let width = rng.gen_range(0.6..=1.0);
                let center = rng.gen_range(0.0..=1.5);
                let weight = rng.gen_range(0.5..=1.5);
                Bump { weight, center: if shifted { center } else { 0.0 }, width }
            })
            .collect();
        Self { seed, components }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.components.iter().map(|b| b.eval(r)).sum()
    }

    pub fn profile(&self, grid: Arc<RadialGrid>) -> RadialProfile {
        RadialProfile::from_real_fn(grid, |r| self.eval(r))
    }
}

/// `e^{-(r/ε)²}` scaled to unit mass on `analysis`.
pub fn mollifier(analysis: &Analysis, eps: f64) -> Result<RadialProfile> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("mollifier width must be positive, got {eps}")));
    }
    let raw = analysis.profile(|r| (-(r / eps).powi(2)).exp());
    let mass = analysis.integral(&raw)?.re;
    Ok(raw.scale(Complex64::new(1.0 / mass, 0.0)))
}

/// Point bump `e^{-(d(y, center)/σ)²}`, negligible beyond `6σ`.
#[derive(Debug, Clone)]
pub struct PointBump {
    geometry: Geometry,
    pub center: Point,
    pub width: f64,
}

impl PointBump {
    pub fn new(geometry: &Geometry, center: Point, width: f64) -> Self {
        Self { geometry: geometry.clone(), center, width }
    }

    pub fn eval(&self, y: &Point) -> Complex64 {
        let d = self.geometry.distance(&self.center, y) / self.width;
        Complex64::new((-d * d).exp(), 0.0)
    }

    /// Radius beyond which the bump is below `e^{-36}`.
    pub fn support_radius(&self) -> f64 {
        6.0 * self.width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_mixtures_are_reproducible() {
        let a = BumpMixture::seeded(42, 3);
        assert_eq!(a, BumpMixture::seeded(42, 3));
        assert_ne!(a, BumpMixture::seeded(43, 3));
        for b in &a.components {
            assert!((0.6..=1.0).contains(&b.width) && (0.0..=1.5).contains(&b.center));
        }
        assert!(BumpMixture::centered(1, 2).components.iter().all(|b| b.center == 0.0));
        let b = a.components[0];
        assert_eq!(b.eval(0.7), b.eval(-0.7));
    }
}
