//! Model harmonic spaces, described through their radial volume density.
//!
//! Every backend is determined by the density `A(r)` of geodesic spheres,
//! `vol S(x, r) = ω_{n-1} A(r)` with `ω_{n-1}` the area of the unit sphere.
//! The three kinds implemented here are
//!
//! | kind            | `A(r)`                                         | `ρ`          |
//! |-----------------|------------------------------------------------|--------------|
//! | Euclidean `ℝⁿ`  | `r^{n-1}`                                      | `0`          |
//! | real hyperbolic | `sinh^{n-1} r`                                 | `(n-1)/2`    |
//! | Damek–Ricci     | `2^{p+q} sinh^{p+q}(r/2) cosh^q(r/2)`          | `p/4 + q/2`  |
//!
//! The horospheres of each space have constant mean curvature `2ρ`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceKind {
    Euclidean { n: usize },
    #[serde(rename = "hyperbolic")]
    RealHyperbolic { n: usize },
    DamekRicci { p: usize, q: usize },
}

/// A harmonic model geometry. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpace {
    kind: SpaceKind,
}

impl ModelSpace {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        match kind {
            SpaceKind::Euclidean { n } if n >= 1 => {}
            SpaceKind::RealHyperbolic { n } if n >= 2 => {}
            SpaceKind::DamekRicci { p, .. } if p >= 1 => {}
            other => return Err(Error::Domain(format!("invalid space parameters {other:?}"))),
        }
        Ok(Self { kind })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(SpaceKind::Euclidean { n })
    }

    pub fn hyperbolic(n: usize) -> Result<Self> {
        Self::new(SpaceKind::RealHyperbolic { n })
    }

    pub fn damek_ricci(p: usize, q: usize) -> Result<Self> {
        Self::new(SpaceKind::DamekRicci { p, q })
    }

    /// Parses the short forms used on the command line: `e3`, `h2`, `h3`,
    /// `euclidean:3`, `hyperbolic:3`, `damek-ricci:2:1`, `dr:2:1`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim().to_ascii_lowercase();
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Config(format!("bad integer '{s}' in space '{text}'")))
        };
        match parts.as_slice() {
            [short] if short.len() >= 2 && (short.starts_with('e') || short.starts_with('h')) => {
                let n = num(&short[1..])?;
                if short.starts_with('e') {
                    Self::euclidean(n)
                } else {
                    Self::hyperbolic(n)
                }
            }
            ["euclidean", n] => Self::euclidean(num(n)?),
            ["hyperbolic", n] => Self::hyperbolic(num(n)?),
            ["damek-ricci" | "dr", p, q] => Self::damek_ricci(num(p)?, num(q)?),
            _ => Err(Error::Config(format!("unknown space '{text}'"))),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean { n } | SpaceKind::RealHyperbolic { n } => n,
            SpaceKind::DamekRicci { p, q } => p + q + 1,
        }
    }

    /// Half the mean curvature of the horospheres.
    pub fn rho(&self) -> f64 {
        match self.kind {
            SpaceKind::Euclidean { .. } => 0.0,
            SpaceKind::RealHyperbolic { n } => (n as f64 - 1.0) / 2.0,
            SpaceKind::DamekRicci { p, q } => p as f64 / 4.0 + q as f64 / 2.0,
        }
    }

    /// Whether point-level geometry (charts, geodesics, Busemann functions) is available.
    pub fn point_ops(&self) -> bool {
        !matches!(self.kind, SpaceKind::DamekRicci { .. })
    }

    /// Volume density `A(r)` of the geodesic sphere of radius `r`.
    pub fn density(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("density requires r >= 0, got {r}")));
        }
        Ok(self.density_unchecked(r))
    }

    pub(crate) fn density_unchecked(&self, r: f64) -> f64 {
        match self.kind {
            SpaceKind::Euclidean { n } => r.powi(n as i32 - 1),
            SpaceKind::RealHyperbolic { n } => r.sinh().powi(n as i32 - 1),
            SpaceKind::DamekRicci { p, q } => {
                let h = 0.5 * r;
                2f64.powi((p + q) as i32) * h.sinh().powi((p + q) as i32) * h.cosh().powi(q as i32)
            }
        }
    }

    /// Radial drift `A'(r)/A(r)`, the mean curvature of the sphere of radius `r`.
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("log_derivative is singular at r = {r}")));
        }
        Ok(self.drift_times_r(r) / r)
    }

    /// `r·A'(r)/A(r)`, smooth and even with value `n-1` at the origin.
    pub fn drift_times_r(&self, r: f64) -> f64 {
        match self.kind {
            SpaceKind::Euclidean { n } => n as f64 - 1.0,
            SpaceKind::RealHyperbolic { n } => (n as f64 - 1.0) * x_coth_x(r),
            SpaceKind::DamekRicci { p, q } => {
                let h = 0.5 * r;
                (p + q) as f64 * x_coth_x(h) + q as f64 * h * h.tanh()
            }
        }
    }

    /// Area of the unit sphere `S^{n-1}`.
    pub fn unit_sphere_area(&self) -> f64 {
        unit_sphere_area(self.dimension())
    }

    /// Taylor coefficients `b_1, b_3, …` of the analytic part of the drift,
    /// `A'/A = (n-1)/r + Σ_k b_{2k+1} r^{2k+1}`, in exact arithmetic.
    pub fn drift_series_exact(&self, terms: usize) -> Vec<BigRational> {
        let bern = bernoulli_even(terms + 1);
        let mut out = Vec::with_capacity(terms);
        for k in 1..=terms {
            let b2k = &bern[k];
            let fact = factorial(2 * k);
            let coeff = match self.kind {
                SpaceKind::Euclidean { .. } => BigRational::zero(),
                SpaceKind::RealHyperbolic { n } => {
                    // (n-1) coth r
                    b2k * BigRational::from_integer(BigInt::from(n - 1) * pow2(2 * k))
                        / BigRational::from_integer(fact)
                }
                SpaceKind::DamekRicci { p, q } => {
                    // (p+q)/2 coth(r/2) + q/2 tanh(r/2)
                    let weight = BigInt::from(p + q) + BigInt::from(q) * (pow2(2 * k) - 1);
                    b2k * BigRational::from_integer(weight) / BigRational::from_integer(fact)
                }
            };
            out.push(coeff);
        }
        out
    }

    pub fn drift_series(&self, terms: usize) -> Vec<f64> {
        self.drift_series_exact(terms).iter().map(rational_to_f64).collect()
    }

    pub fn label(&self) -> String {
        match self.kind {
            SpaceKind::Euclidean { n } => format!("euclidean:{n}"),
            SpaceKind::RealHyperbolic { n } => format!("hyperbolic:{n}"),
            SpaceKind::DamekRicci { p, q } => format!("damek-ricci:{p}:{q}"),
        }
    }
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `x coth x` with its even Taylor expansion near zero.
fn x_coth_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    }
}

/// Area of the unit sphere `S^{n-1} ⊂ ℝⁿ`: `2π^{n/2}/Γ(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    // ω_0 = 2, ω_1 = 2π, ω_{k+2} = 2π ω_k / (k+1)
    let (mut area, mut k) = if n % 2 == 1 { (2.0, 0) } else { (2.0 * PI, 1) };
    while k + 1 < n {
        area *= 2.0 * PI / (k as f64 + 1.0);
        k += 2;
    }
    area
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

pub(crate) fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `B_0, B_2, B_4, …, B_{2(count-1)}`.
pub(crate) fn bernoulli_even(count: usize) -> Vec<BigRational> {
    let top = 2 * count;
    let mut b: Vec<BigRational> = Vec::with_capacity(top + 1);
    b.push(BigRational::one());
    for m in 1..=top {
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binomial(m + 1, k)) * bk;
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    (0..count).map(|k| b[2 * k].clone()).collect()
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_log_derivative(space: &ModelSpace, r: f64) -> f64 {
        // 8th-order central difference of log A
        let h = 1e-3 * r.clamp(1e-2, 1.0);
        let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let la = |x: f64| space.density(x).unwrap().ln();
        c.iter()
            .enumerate()
            .map(|(k, ck)| {
                let d = (k + 1) as f64 * h;
                ck * (la(r + d) - la(r - d))
            })
            .sum::<f64>()
            / h
    }

    fn backends() -> Vec<ModelSpace> {
        vec![
            ModelSpace::euclidean(3).unwrap(),
            ModelSpace::euclidean(1).unwrap(),
            ModelSpace::hyperbolic(2).unwrap(),
            ModelSpace::hyperbolic(3).unwrap(),
            ModelSpace::damek_ricci(2, 1).unwrap(),
            ModelSpace::damek_ricci(4, 3).unwrap(),
        ]
    }

    #[test]
    fn density_examples() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        assert_eq!(e3.density(2.0).unwrap(), 4.0);
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        assert!((h3.density(1.0).unwrap() - 1.381_097_845_541_816_5).abs() < 1e-14);
        let dr = ModelSpace::damek_ricci(2, 1).unwrap();
        let expected = 8.0 * 0.5f64.sinh().powi(3) * 0.5f64.cosh();
        assert!((dr.density(1.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 1.276_45).abs() < 1e-4);
        assert_eq!(h3.density(0.0).unwrap(), 0.0);
        assert!(matches!(h3.density(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rho_values() {
        assert_eq!(ModelSpace::euclidean(5).unwrap().rho(), 0.0);
        assert_eq!(ModelSpace::hyperbolic(3).unwrap().rho(), 1.0);
        assert_eq!(ModelSpace::damek_ricci(2, 1).unwrap().rho(), 1.0);
        assert_eq!(ModelSpace::damek_ricci(2, 1).unwrap().dimension(), 4);
    }

    #[test]
    fn log_derivative_matches_finite_differences() {
        for space in backends() {
            if space.dimension() == 1 {
                continue;
            }
            for &r in &[1e-3, 0.1, 0.7, 2.0, 5.0, 7.5] {
                let exact = space.log_derivative(r).unwrap();
                let fd = fd_log_derivative(&space, r);
                assert!(
                    (exact - fd).abs() < 1e-8 * (1.0 + exact.abs()),
                    "{space} r={r}: {exact} vs {fd}"
                );
            }
        }
        assert!(ModelSpace::hyperbolic(3).unwrap().log_derivative(0.0).is_err());
    }

    #[test]
    fn drift_limits_to_twice_rho() {
        for space in backends() {
            if matches!(space.kind(), SpaceKind::Euclidean { .. }) {
                let n = space.dimension() as f64;
                assert!((space.log_derivative(2.5).unwrap() - (n - 1.0) / 2.5).abs() < 1e-15);
                continue;
            }
            let far = space.log_derivative(60.0).unwrap();
            assert!((far - 2.0 * space.rho()).abs() < 1e-10, "{space}");
            let mut prev = f64::INFINITY;
            for k in 1..200 {
                let v = space.log_derivative(0.05 * k as f64).unwrap();
                assert!(v < prev && v >= 2.0 * space.rho());
                prev = v;
            }
        }
    }

    #[test]
    fn normalized_density_is_even_at_origin() {
        for space in backends() {
            let n = space.dimension() as i32;
            let b = |r: f64| space.density(r.abs()).unwrap() / r.abs().powi(n - 1);
            let h = 1e-2;
            // one-sided odd derivative estimate of the even function B
            let d1 = (-3.0 * b(h * 1e-6) + 4.0 * b(h) - b(2.0 * h)) / (2.0 * h);
            assert!(d1.abs() < 1e-3, "{space}: {d1}");
            assert!((b(1e-6) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn drift_series_matches_function() {
        for space in backends() {
            let b = space.drift_series(8);
            let r: f64 = 0.3;
            let series: f64 = b
                .iter()
                .enumerate()
                .map(|(k, bk)| bk * r.powi(2 * k as i32 + 1))
                .sum();
            let n = space.dimension() as f64;
            let exact = space.drift_times_r(r) / r - (n - 1.0) / r;
            assert!((series - exact).abs() < 1e-12, "{space}: {series} vs {exact}");
        }
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert_eq!(unit_sphere_area(1), 2.0);
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(ModelSpace::parse("h3").unwrap(), ModelSpace::hyperbolic(3).unwrap());
        assert_eq!(ModelSpace::parse("e1").unwrap(), ModelSpace::euclidean(1).unwrap());
        assert_eq!(
            ModelSpace::parse("damek-ricci:2:1").unwrap(),
            ModelSpace::damek_ricci(2, 1).unwrap()
        );
        assert!(ModelSpace::parse("sphere:2").is_err());
    }
}
