//! Even Taylor data at the origin and polynomials in the Laplacian.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model_space::{factorial, rational_to_f64, ModelSpace};

// ─── EvenSeries ────────────────────────────────────────────────────────────

/// Truncated even Taylor series `u(r) = Σ_j c_{2j} r^{2j}`, stored as
/// `[c_0, c_2, c_4, …]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvenSeries {
    coeffs: Vec<f64>,
}

impl EvenSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// `r^{2j}`.
    pub fn monomial(j: usize) -> Self {
        let mut coeffs = vec![0.0; j + 1];
        coeffs[j] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation order `J` (highest power is `r^{2J}`).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c)
    }

    /// `u^{(2j)}(0) = (2j)! c_{2j}`.
    pub fn derivative_at_zero(&self, j: usize) -> f64 {
        self.coeffs.get(j).map_or(0.0, |c| c * (1..=2 * j).map(|i| i as f64).product::<f64>())
    }

    /// `L_A u`, truncated at the same order.
    pub fn apply_laplacian(&self, space: &ModelSpace) -> Self {
        let n = space.dimension() as f64;
        let len = self.coeffs.len();
        let drift = space.drift_series(len);
        let mut out = vec![0.0; len];
        for (j, &c) in self.coeffs.iter().enumerate().skip(1) {
            let two_j = 2.0 * j as f64;
            out[j - 1] += c * two_j * (two_j + n - 2.0);
            // b_{2k-1} r^{2k-1} · 2j r^{2j-1} lands on r^{2(j+k-1)}
            for (k, b) in drift.iter().enumerate() {
                let idx = j + k;
                if idx >= len {
                    break;
                }
                out[idx] += c * two_j * b;
            }
        }
        Self { coeffs: out }
    }
}

// ─── LaplacePolynomial ─────────────────────────────────────────────────────

/// `P(Δ) = Σ_k a_k Δ^k`, coefficients low to high. The leading coefficient is
/// nonzero unless `P` is the zero polynomial of degree 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacePolynomial {
    coeffs: Vec<Complex64>,
}

impl LaplacePolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("polynomial coefficients must be finite".into()));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::zero());
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn identity() -> Self {
        Self { coeffs: vec![Complex64::one()] }
    }

    /// `P(z) = z`.
    pub fn laplacian() -> Self {
        Self { coeffs: vec![Complex64::zero(), Complex64::one()] }
    }

    /// Parses comma-separated coefficients, low to high: `"1,-1"` is `1 - z`.
    /// Complex entries are written `re+imi` or `re-imi`.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|t| parse_complex(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c)
    }

    /// The spectral symbol `σ(λ) = P(-(λ² + ρ²))`.
    pub fn symbol(&self, rho: f64, lambda: Complex64) -> Complex64 {
        self.eval(-(lambda * lambda + rho * rho))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out).expect("finite")
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_default();
                let b = other.coeffs.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for LaplacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format_complex(*c)).collect();
        f.write_str(&parts.join(","))
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im > 0.0 {
        format!("{}+{}i", c.re, c.im)
    } else {
        format!("{}{}i", c.re, c.im)
    }
}

fn parse_complex(t: &str) -> Result<Complex64> {
    let bad = || Error::Config(format!("bad polynomial coefficient '{t}'"));
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
            .ok_or_else(bad)?;
        let re: f64 = body[..split].parse().map_err(|_| bad())?;
        let im: f64 = body[split..].trim_start_matches('+').parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonCoeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Serialize for LaplacePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let items: Vec<JsonCoeff> = self
            .coeffs
            .iter()
            .map(|c| if c.im == 0.0 { JsonCoeff::Real(c.re) } else { JsonCoeff::Complex([c.re, c.im]) })
            .collect();
        items.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaplacePolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<JsonCoeff>::deserialize(deserializer)?;
        let coeffs = items
            .into_iter()
            .map(|c| match c {
                JsonCoeff::Real(re) => Complex64::new(re, 0.0),
                JsonCoeff::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect();
        LaplacePolynomial::new(coeffs).map_err(serde::de::Error::custom)
    }
}

// ─── P_j polynomials ───────────────────────────────────────────────────────

/// Exact coefficients of `P_0, …, P_{j_max}` with `u^{(2j)}(0) = (P_j(L_A) u)(0)`.
///
/// `T[k][j]` is the constant term of `L_A^k r^{2j}`. It vanishes for `j > k`
/// and `T[k][k] = Π_{m=1..k} 2m(2m+n-2)`, so `T` is invertible; then
/// `P_j(z) = (2j)! Σ_k (T⁻¹)[j][k] z^k`.
pub fn compute_pj_exact(space: &ModelSpace, j_max: usize) -> Vec<Vec<BigRational>> {
    let size = j_max + 1;
    let n = BigInt::from(space.dimension());
    let drift = space.drift_series_exact(size);
    // L_A on exact even series truncated at r^{2 j_max}
    let apply = |c: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); size];
        for (j, cj) in c.iter().enumerate().skip(1) {
            if cj.is_zero() {
                continue;
            }
            let two_j = BigInt::from(2 * j);
            let diag = BigRational::from_integer(&two_j * (&two_j + &n - 2));
            out[j - 1] += cj * diag;
            for (k, b) in drift.iter().enumerate() {
                if j + k >= size {
                    break;
                }
                out[j + k] += cj * b * BigRational::from_integer(two_j.clone());
            }
        }
        out
    };
    let mut t = vec![vec![BigRational::zero(); size]; size];
    for j in 0..size {
        let mut c = vec![BigRational::zero(); size];
        c[j] = BigRational::one();
        for row in t.iter_mut() {
            row[j] = c[0].clone();
            c = apply(&c);
        }
    }
    // forward substitution for T⁻¹ (lower triangular)
    let mut inv = vec![vec![BigRational::zero(); size]; size];
    for col in 0..size {
        for row in col..size {
            let mut acc = if row == col { BigRational::one() } else { BigRational::zero() };
            for m in col..row {
                acc -= &t[row][m] * &inv[m][col];
            }
            assert!(!t[row][row].is_zero(), "singular Taylor matrix");
            inv[row][col] = acc / &t[row][row];
        }
    }
    (0..size)
        .map(|j| {
            let f = BigRational::from_integer(factorial(2 * j));
            inv[j][..=j].iter().map(|x| x * &f).collect()
        })
        .collect()
}

/// `P_0, …, P_{j_max}` in floating point.
pub fn compute_pj(space: &ModelSpace, j_max: usize) -> Vec<LaplacePolynomial> {
    compute_pj_exact(space, j_max)
        .iter()
        .map(|p| {
            LaplacePolynomial::new(
                p.iter().map(|c| Complex64::new(rational_to_f64(c), 0.0)).collect(),
            )
            .expect("finite coefficients")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn low_order_pj_are_exact() {
        for space in [
            ModelSpace::euclidean(3).unwrap(),
            ModelSpace::hyperbolic(2).unwrap(),
            ModelSpace::hyperbolic(3).unwrap(),
            ModelSpace::damek_ricci(2, 1).unwrap(),
        ] {
            let p = compute_pj_exact(&space, 3);
            assert_eq!(p[0], vec![BigRational::one()]);
            let n = space.dimension() as i64;
            assert_eq!(p[1], vec![BigRational::zero(), rat(1, n)], "{space}");
        }
    }

    #[test]
    fn line_pj_are_powers() {
        let e1 = ModelSpace::euclidean(1).unwrap();
        for (j, p) in compute_pj_exact(&e1, 5).iter().enumerate() {
            for (k, c) in p.iter().enumerate() {
                let expected = if k == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(*c, expected);
            }
        }
    }

    #[test]
    fn hyperbolic_p2_matches_hand_computation() {
        // H³: L r² = 6 + 4r²/3 + …, L r⁴ = 20 r² + …, so T = [[1,0,0],[0,6,0],[0,8,120]]
        // and u''''(0) = 24·(z²/120 - 8/(6·120) z)
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let p = compute_pj_exact(&h3, 2);
        assert_eq!(p[2], vec![BigRational::zero(), rat(-4, 15), rat(1, 5)]);
    }

    #[test]
    fn series_laplacian_matches_pj() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let u = EvenSeries::new(vec![1.0, -0.5, 0.25, 0.1, -0.02]);
        let p = compute_pj(&h3, 4);
        for (j, pj) in p.iter().enumerate() {
            let mut acc = 0.0;
            let mut lk = u.clone();
            for c in pj.coeffs() {
                acc += c.re * lk.coeffs()[0];
                lk = lk.apply_laplacian(&h3);
            }
            assert!((acc - u.derivative_at_zero(j)).abs() < 1e-9 * (1.0 + acc.abs()), "j={j}");
        }
    }

    #[test]
    fn polynomial_parse_and_json() {
        let p = LaplacePolynomial::parse("1, -1, 0").unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(p.to_string(), "1,-1");
        let q = LaplacePolynomial::parse("2,0.5-1.5i").unwrap();
        assert_eq!(q.coeffs()[1], Complex64::new(0.5, -1.5));
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, "[2.0,[0.5,-1.5]]");
        let back: LaplacePolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
        assert!(LaplacePolynomial::parse("x").is_err());
    }

    #[test]
    fn symbol_of_shifted_laplacian() {
        let p = LaplacePolynomial::from_real(&[-1.0, 1.0]).unwrap();
        let s = p.symbol(1.0, Complex64::new(1.0, 0.0));
        assert_eq!(s, Complex64::new(-3.0, 0.0));
    }
}
