use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::grid::RadialGrid;
use crate::error::{Error, Result};

/// An even function `u(r)` on `[0, r_max]`, standing for `f = u ∘ d(x₀, ·)`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl RadialProfile {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "profile has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, coeffs: OnceLock::new() })
    }

    pub fn from_real(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values, coeffs: OnceLock::new() }
    }

    pub fn from_real_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0))
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n], coeffs: OnceLock::new() }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max()
    }

    /// Chebyshev coefficients in `y = 2(r/R)² - 1` (cached).
    pub fn coefficients(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| self.grid.coefficients(&self.values))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Relative size of the unresolved tail of the Chebyshev spectrum. A
    /// smooth even profile has a tail at rounding level; a profile with an odd
    /// component (a kink in its even extension) does not.
    pub fn parity_residual(&self) -> f64 {
        RadialGrid::tail_residual(self.coefficients(), self.sup_norm())
    }

    pub fn check_parity(&self, tol: f64) -> Result<()> {
        let residual = self.parity_residual();
        if residual > tol {
            Err(Error::Parity { residual })
        } else {
            Ok(())
        }
    }

    /// Interpolated value at radius `r` (`|r|` for negative input).
    pub fn try_value_at(&self, r: f64) -> Result<Complex64> {
        let r = r.abs();
        if r > self.grid.r_max() * (1.0 + 1e-12) {
            return Err(Error::Extrapolation { r, r_max: self.grid.r_max() });
        }
        if let Some(i) = self.grid.node_index(r) {
            return Ok(self.values[i]);
        }
        Ok(RadialGrid::clenshaw(self.coefficients(), self.grid.y_of_r(r)))
    }

    /// Interpolated value, extended by zero beyond `r_max`.
    pub fn value_at(&self, r: f64) -> Complex64 {
        self.try_value_at(r).unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.nodes().iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        Self { grid: self.grid.clone(), values, coeffs: OnceLock::new() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|_, v| v * s)
    }

    /// `self + s·other` on a shared grid.
    pub fn axpy(&self, s: Complex64, other: &RadialProfile) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect();
        Ok(Self { grid: self.grid.clone(), values, coeffs: OnceLock::new() })
    }

    pub fn sub(&self, other: &RadialProfile) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn max_abs_diff(&self, other: &RadialProfile) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn same_grid(&self, other: &RadialProfile) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.len() == other.grid.len() && self.grid.r_max() == other.grid.r_max())
        {
            Ok(())
        } else {
            Err(Error::Domain("profiles live on different radial grids".into()))
        }
    }

    /// Re-samples this profile onto another grid (zero beyond `r_max`).
    pub fn resample(&self, grid: Arc<RadialGrid>) -> Self {
        Self::from_fn(grid, |r| self.value_at(r))
    }

    /// Uniform table of `count` samples with cheap local interpolation, for
    /// inner loops that evaluate the profile many times.
    pub fn tabulate(&self, count: usize) -> TabulatedProfile {
        let count = count.max(TABLE_STENCIL + 1);
        let step = self.r_max() / (count - 1) as f64;
        let values = (0..count).map(|k| self.value_at(k as f64 * step)).collect();
        TabulatedProfile { step, r_max: self.r_max(), values }
    }
}

const TABLE_STENCIL: usize = 8;

/// Uniform samples of an even profile, evaluated by 8-point Lagrange
/// interpolation of the even extension; zero beyond `r_max`.
#[derive(Debug, Clone)]
pub struct TabulatedProfile {
    step: f64,
    r_max: f64,
    values: Vec<Complex64>,
}

impl TabulatedProfile {
    fn sample(&self, k: i64) -> Complex64 {
        let k = k.unsigned_abs() as usize;
        self.values.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn value_at(&self, r: f64) -> Complex64 {
        let r = r.abs();
        if r > self.r_max {
            return Complex64::new(0.0, 0.0);
        }
        let x = r / self.step;
        let base = x.floor() as i64;
        if x == base as f64 {
            return self.sample(base);
        }
        let first = base - (TABLE_STENCIL as i64) / 2 + 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..TABLE_STENCIL as i64 {
            let mut weight = 1.0;
            for m in 0..TABLE_STENCIL as i64 {
                if m != i {
                    weight *= (x - (first + m) as f64) / ((i - m) as f64);
                }
            }
            acc += self.sample(first + i) * weight;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_nodes_exactly() {
        let grid = Arc::new(RadialGrid::new(4.0, 33).unwrap());
        let u = RadialProfile::from_real_fn(grid.clone(), |r| (-r * r).exp() + 0.1 * r.cos());
        for (i, &r) in grid.nodes().iter().enumerate() {
            assert_eq!(u.value_at(r), u.values()[i]);
        }
        let r: f64 = 1.2345;
        let exact = (-r * r).exp() + 0.1 * r.cos();
        assert!((u.value_at(r).re - exact).abs() < 1e-12);
        assert_eq!(u.value_at(-r), u.value_at(r));
        assert!(matches!(u.try_value_at(4.5), Err(Error::Extrapolation { .. })));
    }

    #[test]
    fn tabulated_matches_profile() {
        let grid = Arc::new(RadialGrid::new(6.0, 129).unwrap());
        let u = RadialProfile::from_real_fn(grid, |r| (-r * r).exp());
        let table = u.tabulate(4001);
        for r in [0.0, 0.0007, 0.5, 1.2345, 3.3] {
            assert!((table.value_at(r) - u.value_at(r)).norm() < 1e-13, "{r}");
        }
        assert_eq!(table.value_at(7.0).norm(), 0.0);
    }

    #[test]
    fn parity_detects_odd_component() {
        let grid = Arc::new(RadialGrid::new(2.0, 65).unwrap());
        let even = RadialProfile::from_real_fn(grid.clone(), |r| (-r * r).exp());
        assert!(even.check_parity(1e-6).is_ok());
        let odd = RadialProfile::from_real_fn(grid, |r| r * (-r * r).exp());
        assert!(matches!(odd.check_parity(1e-6), Err(Error::Parity { .. })));
    }
}
