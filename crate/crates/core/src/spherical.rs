//! Spherical functions `φ_λ` and the Plancherel density.
//!
//! `φ_λ` solves `u'' + (A'/A) u' = -(λ² + ρ²) u` with `u(0) = 1`, `u'(0) = 0`.
//! Near the origin the solution is taken from its even Frobenius series; from
//! `r₀` on it is integrated with an embedded Dormand–Prince 5(4) pair that
//! lands exactly on every requested radius.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model_space::{ModelSpace, SpaceKind};
use crate::radial::{RadialGrid, RadialProfile};

/// Radius at which the Frobenius start hands over to the integrator.
pub const FROBENIUS_RADIUS: f64 = 1e-2;
/// Number of even Frobenius terms beyond the constant (`r²` … `r^{12}`).
pub const FROBENIUS_TERMS: usize = 6;
/// Relative tolerance of the step-size controller.
pub const ODE_RTOL: f64 = 1e-12;
/// Tolerance for profiles sampled on a radial grid, which are differentiated.
pub const GRID_RTOL: f64 = 1e-14;

/// Coefficients `c_0, c_2, …` of the Frobenius series of `φ_λ`.
pub fn frobenius_coefficients(space: &ModelSpace, lambda: Complex64, terms: usize) -> Vec<Complex64> {
    let n = space.dimension() as f64;
    let mu = lambda * lambda + space.rho() * space.rho();
    let b = space.drift_series(terms);
    let mut c = vec![Complex64::new(1.0, 0.0)];
    // c_{2m+2}(2m+2)(2m+n) + Σ_{k=1..m} 2k b_{2(m-k)+1} c_{2k} = -μ c_{2m}
    for m in 0..terms {
        let mut rhs = -mu * c[m];
        for k in 1..=m {
            rhs -= c[k] * (2.0 * k as f64 * b[m - k]);
        }
        let two_m = 2.0 * m as f64;
        c.push(rhs / ((two_m + 2.0) * (two_m + n)));
    }
    c
}

fn series_eval(c: &[Complex64], r: f64) -> (Complex64, Complex64) {
    let r2 = r * r;
    let mut value = Complex64::new(0.0, 0.0);
    let mut slope = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter().enumerate().rev() {
        value = value * r2 + cj;
        if j > 0 {
            slope = slope * r2 + cj * (2.0 * j as f64);
        }
    }
    // slope accumulated Σ 2j c_j r^{2(j-1)}
    (value, slope * r)
}

fn check_strip(space: &ModelSpace, lambda: Complex64) -> Result<()> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Domain(format!("non-finite spectral parameter {lambda}")));
    }
    let bound = space.rho() + 1.0;
    if lambda.im.abs() > bound {
        return Err(Error::Domain(format!(
            "|Im λ| = {} exceeds the supported strip |Im λ| ≤ ρ + 1 = {bound}",
            lambda.im.abs()
        )));
    }
    Ok(())
}

/// `φ_λ` at the given radii, which must be non-negative and non-decreasing.
pub fn spherical_values(space: &ModelSpace, lambda: Complex64, radii: &[f64]) -> Result<Vec<Complex64>> {
    spherical_values_with_rtol(space, lambda, radii, ODE_RTOL)
}

fn spherical_values_with_rtol(space: &ModelSpace, lambda: Complex64, radii: &[f64], rtol: f64) -> Result<Vec<Complex64>> {
    check_strip(space, lambda)?;
    if radii.iter().any(|r| !(*r >= 0.0)) || radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("radii must be non-negative and sorted".into()));
    }
    let coeffs = frobenius_coefficients(space, lambda, FROBENIUS_TERMS);
    let mu = lambda * lambda + space.rho() * space.rho();
    let mut out = Vec::with_capacity(radii.len());
    let split = radii.partition_point(|&r| r <= FROBENIUS_RADIUS);
    for &r in &radii[..split] {
        out.push(series_eval(&coeffs, r).0);
    }
    if split == radii.len() {
        return Ok(out);
    }
    let (u0, v0) = series_eval(&coeffs, FROBENIUS_RADIUS);
    let rhs = |r: f64, y: &[Complex64; 2]| -> [Complex64; 2] {
        let drift = space.drift_times_r(r) / r;
        [y[1], -mu * y[0] - y[1] * drift]
    };
    let mut stepper = DormandPrince::new(FROBENIUS_RADIUS, [u0, v0], rtol, lambda.norm());
    for &target in &radii[split..] {
        stepper.advance_to(target, &rhs)?;
        out.push(stepper.y[0]);
    }
    Ok(out)
}

/// `φ_λ` sampled on a radial grid, at [`GRID_RTOL`].
pub fn spherical_function(space: &ModelSpace, lambda: Complex64, grid: Arc<RadialGrid>) -> Result<RadialProfile> {
    let values = spherical_values_with_rtol(space, lambda, grid.nodes(), GRID_RTOL)?;
    RadialProfile::new(grid, values)
}

/// Plancherel density `ν(λ)` up to a constant, normalized to behave like
/// `λ^{n-1}` for large `λ`.
///
/// | space          | `ν(λ)`                                           |
/// |----------------|--------------------------------------------------|
/// | `ℝⁿ`           | `λ^{n-1}`                                        |
/// | `Hⁿ`, `n` odd  | `Π_{k<ρ} (λ² + k²)`                              |
/// | `Hⁿ`, `n` even | `λ tanh(πλ) Π_{k<ρ-1/2} (λ² + (k+1/2)²)`         |
pub fn plancherel_density(space: &ModelSpace, lambda: f64) -> Result<f64> {
    let l = lambda.abs();
    match space.kind() {
        SpaceKind::Euclidean { n } => Ok(l.powi(n as i32 - 1)),
        SpaceKind::RealHyperbolic { n } if n % 2 == 1 => {
            Ok((0..(n - 1) / 2).map(|k| l * l + (k * k) as f64).product())
        }
        SpaceKind::RealHyperbolic { n } => {
            let base = l * (std::f64::consts::PI * l).tanh();
            Ok(base * (0..(n - 2) / 2).map(|k| l * l + (k as f64 + 0.5).powi(2)).product::<f64>())
        }
        SpaceKind::DamekRicci { .. } => Err(Error::Capability(format!(
            "no Plancherel density is implemented for {space}"
        ))),
    }
}

// ─── Dormand–Prince 5(4) ───────────────────────────────────────────────────

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State = [Complex64; 2];

struct DormandPrince {
    t: f64,
    y: State,
    h: f64,
    rtol: f64,
    atol: f64,
    fsal: Option<State>,
}

impl DormandPrince {
    fn new(t: f64, y: State, rtol: f64, freq: f64) -> Self {
        // start with a step resolving the local oscillation
        let h = (0.05 / (1.0 + freq)).min(0.05);
        Self { t, y, h, rtol, atol: rtol * 1e-3, fsal: None }
    }

    fn advance_to(&mut self, target: f64, f: &impl Fn(f64, &State) -> State) -> Result<()> {
        let mut steps = 0usize;
        while self.t < target {
            steps += 1;
            if steps > 1_000_000 {
                return Err(Error::Accuracy("spherical function ODE: step budget exhausted".into()));
            }
            let remaining = target - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let k1 = self.fsal.unwrap_or_else(|| f(self.t, &self.y));
            let mut k = [k1; 7];
            for s in 1..7 {
                let mut ys = self.y;
                for (i, ki) in k.iter().take(s).enumerate() {
                    let a = A[s][i];
                    if a != 0.0 {
                        ys[0] += ki[0] * (h * a);
                        ys[1] += ki[1] * (h * a);
                    }
                }
                k[s] = f(self.t + C[s] * h, &ys);
            }
            let mut y5 = self.y;
            let mut err = [Complex64::new(0.0, 0.0); 2];
            for s in 0..7 {
                for c in 0..2 {
                    y5[c] += k[s][c] * (h * B5[s]);
                    err[c] += k[s][c] * (h * (B5[s] - B4[s]));
                }
            }
            let scale = self.y[0].norm().max(y5[0].norm()).max(self.y[1].norm()).max(y5[1].norm());
            let tol = self.atol + self.rtol * scale;
            let ratio = err[0].norm().max(err[1].norm()) / tol;
            if !ratio.is_finite() {
                return Err(Error::Accuracy("spherical function ODE diverged".into()));
            }
            if ratio <= 1.0 {
                self.t = if last { target } else { self.t + h };
                self.y = y5;
                self.fsal = Some(k[6]);
                if !last || h == self.h {
                    let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                    self.h *= grow;
                }
            } else {
                self.fsal = Some(k1);
                self.h = h * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
                if self.h < 1e-14 * (1.0 + self.t) {
                    return Err(Error::Accuracy("spherical function ODE: step size underflow".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn frobenius_second_coefficient() {
        for space in [
            ModelSpace::euclidean(3).unwrap(),
            ModelSpace::hyperbolic(3).unwrap(),
            ModelSpace::damek_ricci(2, 1).unwrap(),
        ] {
            let lambda = 1.3;
            let co = frobenius_coefficients(&space, c(lambda), 4);
            let mu = lambda * lambda + space.rho().powi(2);
            let n = space.dimension() as f64;
            assert!((co[1].re + mu / (2.0 * n)).abs() < 1e-15);
        }
    }

    #[test]
    fn hyperbolic_closed_form() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let radii: Vec<f64> = (0..=80).map(|i| i as f64 * 0.1).collect();
        for lambda in [0.5, 1.0, 2.0, 5.0] {
            let phi = spherical_values(&h3, c(lambda), &radii).unwrap();
            for (r, v) in radii.iter().zip(&phi) {
                let exact = if *r == 0.0 { 1.0 } else { (lambda * r).sin() / (lambda * r.sinh()) };
                assert!((v.re - exact).abs() < 1e-10, "λ={lambda} r={r}: {} vs {exact}", v.re);
                assert!(v.im.abs() < 1e-300);
            }
        }
    }

    #[test]
    fn euclidean_closed_forms() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        let e1 = ModelSpace::euclidean(1).unwrap();
        let radii = [0.0, 0.005, 0.5, 3.0, 7.5];
        let lambda = 2.0;
        let p3 = spherical_values(&e3, c(lambda), &radii).unwrap();
        let p1 = spherical_values(&e1, c(lambda), &radii).unwrap();
        for (i, &r) in radii.iter().enumerate() {
            let s = if r == 0.0 { 1.0 } else { (lambda * r).sin() / (lambda * r) };
            assert!((p3[i].re - s).abs() < 1e-10);
            assert!((p1[i].re - (lambda * r).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn imaginary_rho_gives_constant() {
        // λ = iρ: eigenvalue 0, so φ ≡ 1
        let dr = ModelSpace::damek_ricci(2, 1).unwrap();
        let rho = dr.rho();
        let phi = spherical_values(&dr, Complex64::new(0.0, rho), &[0.5, 2.0, 6.0]).unwrap();
        for v in phi {
            assert!((v - c(1.0)).norm() < 1e-10);
        }
        assert!(spherical_values(&dr, Complex64::new(0.0, rho + 1.5), &[1.0]).is_err());
    }

    #[test]
    fn plancherel_shapes() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        assert_eq!(plancherel_density(&h3, 2.0).unwrap(), 4.0);
        let h5 = ModelSpace::hyperbolic(5).unwrap();
        assert_eq!(plancherel_density(&h5, 2.0).unwrap(), 4.0 * 5.0);
        let h2 = ModelSpace::hyperbolic(2).unwrap();
        assert!((plancherel_density(&h2, 3.0).unwrap() - 3.0).abs() < 1e-7);
        let dr = ModelSpace::damek_ricci(2, 1).unwrap();
        assert!(matches!(plancherel_density(&dr, 1.0), Err(Error::Capability(_))));
    }
}
