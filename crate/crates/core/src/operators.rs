//! The algebra of invariant operators: polynomials in `Δ`, their Abel
//! conjugates on the line, identification of black-box radial operators,
//! fundamental solutions and the equation `P(Δ)u = f`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::abel::LineProfile;
use crate::analysis::Analysis;
use crate::error::{Error, Result};
use crate::model_space::ModelSpace;
use crate::quadrature::gauss_legendre;
use crate::radial::{
    apply_polynomial, apply_radial_laplacian, compute_pj, LaplacePolynomial, RadialGrid, RadialProfile,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance of the consistency test in [`identify_operator`].
///
/// Six Chebyshev derivatives of a test profile already carry errors near
/// `1e-6` at the grid edge, while a non-invariant operator such as
/// multiplication by `r²` misses by order one.
pub const IDENTIFY_TOLERANCE: f64 = 1e-4;
/// Roots closer than this (relative) are merged into one multiple root.
pub const ROOT_MERGE_TOLERANCE: f64 = 1e-6;
/// Half-width of the central finite-difference stencils on the line.
const STENCIL_HALF_WIDTH: i32 = 10;

// ─── constant-coefficient operators on the line ───────────────────────────

/// `D̃ = Σ a_k d^k/ds^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstCoeffOperator {
    coeffs: Vec<Complex64>,
}

impl ConstCoeffOperator {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Fourier symbol `Σ a_k (iλ)^k`, so that `ℱ(D̃w) = symbol · ℱw`.
    pub fn symbol(&self, lambda: f64) -> Complex64 {
        let il = Complex64::new(0.0, lambda);
        self.coeffs.iter().rev().fold(ZERO, |acc, a| acc * il + a)
    }

    /// Finite-difference step used for an operator of this order.
    fn step(&self) -> f64 {
        0.05 * (self.order() as f64 / 4.0).max(1.0)
    }

    /// Stencil weights `Σ_k a_k w^{(k)}_j` for offsets `j·h`, `|j| ≤ 10`.
    fn stencil(&self, h: f64) -> Vec<Complex64> {
        let offsets: Vec<f64> = (-STENCIL_HALF_WIDTH..=STENCIL_HALF_WIDTH).map(|j| j as f64 * h).collect();
        let table = fornberg_weights(&offsets, self.order());
        let mut weights = vec![ZERO; offsets.len()];
        weights[STENCIL_HALF_WIDTH as usize] = self.coeffs[0];
        for (k, a) in self.coeffs.iter().enumerate().skip(1) {
            for (w, t) in weights.iter_mut().zip(&table[k]) {
                *w += a * t;
            }
        }
        weights
    }

    /// `(D̃f)(s)` for each `s`, by high-order central differences of `f`.
    pub fn apply_fd<F>(&self, f: &F, points: &[f64]) -> Vec<Complex64>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        self.apply_fd_with_step(f, points, self.step())
    }

    /// [`Self::apply_fd`] with an explicit stencil step.
    pub fn apply_fd_with_step<F>(&self, f: &F, points: &[f64], h: f64) -> Vec<Complex64>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let weights = self.stencil(h);
        points
            .par_iter()
            .map(|&s| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * f(s + (j as i32 - STENCIL_HALF_WIDTH) as f64 * h))
                    .sum()
            })
            .collect()
    }
}

/// Fornberg's recursion: `table[k][j]` weights the `k`-th derivative at 0
/// from samples at `offsets[j]`.
pub(crate) fn fornberg_weights(offsets: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = offsets.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `D̃ = P(d²/ds² - ρ²)`, the operator with `𝒜(P(Δ)u) = D̃(𝒜u)`.
pub fn abel_conjugate(space: &ModelSpace, p: &LaplacePolynomial) -> ConstCoeffOperator {
    let shift = Complex64::new(-space.rho() * space.rho(), 0.0);
    let mut coeffs = vec![ZERO; 2 * p.degree() + 1];
    for (k, a) in p.coeffs().iter().enumerate() {
        for j in 0..=k {
            coeffs[2 * j] += a * binomial(k, j) * shift.powu((k - j) as u32);
        }
    }
    ConstCoeffOperator::new(coeffs)
}

// ─── operator identification ──────────────────────────────────────────────

/// Recovers `P` with `L = P(L_A)` from a black-box radial operator.
///
/// `L` is applied to `r^{2k}`, `k ≤ m_bound`, on the grid `R = 1`, 33 nodes;
/// with `y_k = (L r^{2k})(0) = Σ_i p_i T[i][k]` the coefficients follow from
/// the `P_j` data as `p_i = Σ_k P_k[i] y_k / (2k)!`. The result is then
/// checked on two test profiles; a mismatch means `L` is not a polynomial in
/// the Laplacian (of degree at most `m_bound`).
pub fn identify_operator<L>(space: &ModelSpace, op: L, m_bound: usize) -> Result<LaplacePolynomial>
where
    L: Fn(&RadialProfile) -> Result<RadialProfile>,
{
    if m_bound > 8 {
        return Err(Error::Domain(format!("degree bound {m_bound} exceeds 8")));
    }
    let grid = Arc::new(RadialGrid::new(1.0, 33)?);
    let mut y = Vec::with_capacity(m_bound + 1);
    for k in 0..=m_bound {
        let monomial = RadialProfile::from_real_fn(grid.clone(), |r| r.powi(2 * k as i32));
        let image = op(&monomial)?;
        if image.grid().len() != grid.len() || image.r_max() != grid.r_max() {
            return Err(Error::Domain("operator changed the radial grid".into()));
        }
        y.push(image.values()[0]);
    }
    let pj = compute_pj(space, m_bound);
    let mut p = vec![ZERO; m_bound + 1];
    let mut factorial = 1.0;
    for (k, (yk, pk)) in y.iter().zip(&pj).enumerate() {
        if k > 0 {
            factorial *= (2 * k * (2 * k - 1)) as f64;
        }
        for (pi, c) in p.iter_mut().zip(pk.coeffs()) {
            *pi += c * yk / factorial;
        }
    }
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in p.iter_mut() {
        if c.norm() <= 1e-10 * scale {
            *c = ZERO;
        }
    }
    let poly = LaplacePolynomial::new(if scale == 0.0 { vec![ZERO] } else { p })?;
    for test in [
        RadialProfile::from_real_fn(grid.clone(), |r| (-2.0 * r * r).exp()),
        RadialProfile::from_real_fn(grid.clone(), |r| (1.0 + r * r) * (-r * r).exp() * (0.5 * r * r).cos()),
    ] {
        let image = op(&test)?;
        let expected = apply_polynomial(space, &poly, &test)?;
        let norm = image.sup_norm().max(test.sup_norm());
        let residual = image.max_abs_diff(&expected)? / norm;
        if !(residual <= IDENTIFY_TOLERANCE) {
            return Err(Error::NotInvariant(format!(
                "best fit P = {poly} leaves relative residual {residual:.3e} on a test profile"
            )));
        }
    }
    Ok(poly)
}

/// Ready-made radial operators for identification experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinOperator {
    /// `L_A`.
    Laplacian,
    /// `L_A²`.
    Laplacian2,
    /// `P(L_A)` for a given polynomial.
    Polynomial(LaplacePolynomial),
    /// Multiplication by `r²`, which is not invariant.
    MultiplyR2,
}

impl BuiltinOperator {
    /// `builtin:laplacian`, `builtin:laplacian2`, `builtin:r2`, `builtin:poly:<coeffs>`.
    pub fn parse(text: &str) -> Result<Self> {
        let name = text.strip_prefix("builtin:").ok_or_else(|| Error::Config(format!("unknown operator '{text}'")))?;
        match name {
            "laplacian" => Ok(Self::Laplacian),
            "laplacian2" => Ok(Self::Laplacian2),
            "r2" => Ok(Self::MultiplyR2),
            _ => match name.strip_prefix("poly:") {
                Some(coeffs) => Ok(Self::Polynomial(LaplacePolynomial::parse(coeffs)?)),
                None => Err(Error::Config(format!("unknown builtin operator '{name}'"))),
            },
        }
    }

    pub fn apply(&self, space: &ModelSpace, u: &RadialProfile) -> Result<RadialProfile> {
        match self {
            Self::Laplacian => apply_radial_laplacian(space, u),
            Self::Laplacian2 => apply_radial_laplacian(space, &apply_radial_laplacian(space, u)?),
            Self::Polynomial(p) => apply_polynomial(space, p, u),
            Self::MultiplyR2 => Ok(u.map(|r, v| v * (r * r))),
        }
    }
}

// ─── roots and fundamental solutions ──────────────────────────────────────

/// Roots of `Σ c_k z^k` by Durand–Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    if degree == 1 {
        return vec![-monic[0]];
    }
    let eval = |z: Complex64| monic.iter().rev().fold(ZERO, |acc, c| acc * z + c);
    let bound = 1.0 + monic[..degree].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..1000 {
        let mut change: f64 = 0.0;
        for i in 0..degree {
            let mut denom = ONE;
            for j in 0..degree {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let delta = eval(z[i]) / denom;
            z[i] -= delta;
            change = change.max(delta.norm() / z[i].norm().max(1.0));
        }
        if change < 1e-15 {
            break;
        }
    }
    z
}

/// Groups roots within [`ROOT_MERGE_TOLERANCE`] into `(root, multiplicity)`.
/// A root of multiplicity `m` is refined as a simple root of `P^{(m-1)}`.
fn group_roots(coeffs: &[Complex64], roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &r in roots {
        match groups.iter_mut().find(|g| (g[0] - r).norm() <= ROOT_MERGE_TOLERANCE * r.norm().max(1.0)) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    let derivative = |c: &[Complex64]| -> Vec<Complex64> {
        c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
    };
    let eval = |c: &[Complex64], z: Complex64| c.iter().rev().fold(ZERO, |acc, a| acc * z + a);
    groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            let mut z = g.iter().sum::<Complex64>() / m as f64;
            if m > 1 {
                let mut d = coeffs.to_vec();
                for _ in 1..m {
                    d = derivative(&d);
                }
                let dd = derivative(&d);
                for _ in 0..8 {
                    let slope = eval(&dd, z);
                    if slope.norm() == 0.0 {
                        break;
                    }
                    let next = z - eval(&d, z) / slope;
                    if !(eval(&d, next).norm() < eval(&d, z).norm()) {
                        break;
                    }
                    z = next;
                }
            }
            (z, m)
        })
        .collect()
}

/// One term `e^{-κ|s|} Σ_m c_m |s|^m` of a line fundamental solution.
#[derive(Debug, Clone, Serialize)]
pub struct ExpPiece {
    pub kappa: Complex64,
    pub poly: Vec<Complex64>,
}

impl ExpPiece {
    fn eval(&self, s: f64) -> Complex64 {
        let s = s.abs();
        let p = self.poly.iter().rev().fold(ZERO, |acc, c| acc * s + c);
        p * (-self.kappa * s).exp()
    }
}

/// Radial fundamental solution of `P(Δ)`, represented on the Abel side.
///
/// `F_{D̃}` is the even decaying solution of `D̃F = δ₀` in closed form. The
/// radial solution `F_D = 𝒜⁻¹F_{D̃}` is singular at the origin for `n ≥ 2`
/// and is used only through its spectral symbol `1/P(-(λ²+ρ²))`.
#[derive(Debug, Clone, Serialize)]
pub struct FundamentalSolution {
    #[serde(skip)]
    space: ModelSpace,
    polynomial: LaplacePolynomial,
    operator: ConstCoeffOperator,
    pieces: Vec<ExpPiece>,
}

/// Squared decay rates `κ² = ρ² + z` for the roots `z` of `P`, with
/// multiplicities. Errors if the symbol `P(-(λ²+ρ²))` vanishes for real `λ`.
fn decay_rates(space: &ModelSpace, p: &LaplacePolynomial) -> Result<Vec<(Complex64, usize)>> {
    let rho2 = space.rho() * space.rho();
    let grouped = group_roots(p.coeffs(), &polynomial_roots(p.coeffs()));
    let mut out = Vec::with_capacity(grouped.len());
    for (z, m) in grouped {
        let k2 = z + rho2;
        let scale = k2.norm().max(1.0);
        if k2.im.abs() <= 1e-12 * scale && k2.re <= 1e-12 * scale {
            return Err(Error::ResonantSymbol(format!(
                "P(-(λ²+ρ²)) vanishes at real λ = {:.6} (root z = {z} of P)",
                (-k2.re).max(0.0).sqrt()
            )));
        }
        out.push((k2, m));
    }
    Ok(out)
}

/// Fails with a resonant-symbol error if `P(-(λ²+ρ²))` has a real zero.
pub fn check_nonresonant(space: &ModelSpace, p: &LaplacePolynomial) -> Result<()> {
    decay_rates(space, p).map(|_| ())
}

/// Fundamental solution of `P(Δ)` by partial fractions of the line symbol.
///
/// With `k_j = ρ² + z_j` over the roots of `P`,
/// `1/P(-(λ²+ρ²)) = (-1)^M / a_M · Π_j (λ² + k_j)^{-m_j}`, and each
/// `(λ²+κ²)^{-l}` has the inverse Fourier transform
/// `e^{-κ|s|} / ((l-1)! (2κ)^{2l-1}) · Σ_{m<l} (l-1+m)!/(m!(l-1-m)!) (2κ|s|)^{l-1-m}`.
pub fn fundamental_solution(space: &ModelSpace, p: &LaplacePolynomial) -> Result<FundamentalSolution> {
    let degree = p.degree();
    if degree == 0 {
        return Err(Error::Domain("a constant operator has the fundamental solution δ/a₀, not a function".into()));
    }
    let rates = decay_rates(space, p)?;
    let lead = p.coeffs()[degree];
    let sign = if degree.is_multiple_of(2) { 1.0 } else { -1.0 };
    let prefactor = sign / lead;
    let mut pieces = Vec::with_capacity(rates.len());
    for (j, &(kj, mj)) in rates.iter().enumerate() {
        // Taylor coefficients in t = x + k_j of Π_{i≠j} (x + k_i)^{-m_i}
        let mut series = vec![ZERO; mj];
        series[0] = ONE;
        for (i, &(ki, mi)) in rates.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = ki - kj;
            // (d + t)^{-m} = d^{-m} Σ_q binom(-m, q) (t/d)^q
            let factor: Vec<Complex64> = (0..mj)
                .map(|q| {
                    let binom = (0..q).fold(1.0, |acc, r| acc * -((mi + r) as f64) / (r + 1) as f64);
                    d.powi(-(mi as i32) - q as i32) * binom
                })
                .collect();
            let mut next = vec![ZERO; mj];
            for (a, sa) in series.iter().enumerate() {
                for (b, fb) in factor.iter().enumerate().take(mj - a) {
                    next[a + b] += sa * fb;
                }
            }
            series = next;
        }
        let kappa = kj.sqrt();
        let mut poly = vec![ZERO; mj];
        for l in 1..=mj {
            let c = series[mj - l] * prefactor;
            let two_kappa = kappa * 2.0;
            let norm = factorial(l - 1) * two_kappa.powi(2 * l as i32 - 1);
            for m in 0..l {
                let power = l - 1 - m;
                let coef = factorial(l - 1 + m) / (factorial(m) * factorial(l - 1 - m));
                poly[power] += c * coef * two_kappa.powi(power as i32) / norm;
            }
        }
        pieces.push(ExpPiece { kappa, poly });
    }
    Ok(FundamentalSolution { space: *space, polynomial: p.clone(), operator: abel_conjugate(space, p), pieces })
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl FundamentalSolution {
    pub fn polynomial(&self) -> &LaplacePolynomial {
        &self.polynomial
    }

    pub fn operator(&self) -> &ConstCoeffOperator {
        &self.operator
    }

    pub fn pieces(&self) -> &[ExpPiece] {
        &self.pieces
    }

    /// `F_{D̃}(s)`.
    pub fn line_value(&self, s: f64) -> Complex64 {
        self.pieces.iter().map(|p| p.eval(s)).sum()
    }

    /// Spectral symbol `1/P(-(λ²+ρ²))` of `F_D` (and of `F_{D̃}`).
    pub fn symbol(&self, lambda: f64) -> Complex64 {
        ONE / self.polynomial.symbol(self.space.rho(), Complex64::new(lambda, 0.0))
    }

    /// Slowest decay rate `min Re κ`.
    pub fn decay_rate(&self) -> f64 {
        self.pieces.iter().map(|p| p.kappa.re).fold(f64::INFINITY, f64::min)
    }

    /// `(F_{D̃} ∗ w)(s) = ∫₀^∞ F(τ)[w(s-τ) + w(s+τ)] dτ` for even `w`
    /// vanishing beyond `support`. The kink of `F` sits at the endpoint `τ = 0`.
    pub fn convolve_at<W>(&self, w: &W, support: f64, s: f64) -> Complex64
    where
        W: Fn(f64) -> Complex64,
    {
        self.convolve_with_panels(w, support, s, 0.25)
    }

    fn convolve_with_panels<W>(&self, w: &W, support: f64, s: f64, max_width: f64) -> Complex64
    where
        W: Fn(f64) -> Complex64,
    {
        let fastest = self.pieces.iter().map(|p| p.kappa.norm()).fold(0.0, f64::max);
        let width = max_width.min(2.0 / fastest.max(1e-300));
        let end = s.abs() + support;
        let panels = (end / width).ceil().max(1.0) as usize;
        let rule = gauss_legendre(16).composite(0.0, end, panels);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &wt)| self.line_value(t) * (w(s - t) + w(s + t)) * wt)
            .sum()
    }

    /// Relative sup-residual of `D̃(F_{D̃} ∗ w) = w` at the given points.
    pub fn certificate<W>(&self, w: &W, support: f64, points: &[f64]) -> f64
    where
        W: Fn(f64) -> Complex64 + Sync,
    {
        let conv = |s: f64| self.convolve_at(w, support, s);
        let applied = self.operator.apply_fd(&conv, points);
        let norm = points.iter().map(|&s| w(s).norm()).fold(0.0, f64::max);
        applied.iter().zip(points).map(|(a, &s)| (a - w(s)).norm()).fold(0.0, f64::max) / norm
    }

    /// [`Self::certificate`] for `𝒜f` given as a line profile.
    pub fn abel_certificate(&self, w: &LineProfile) -> f64 {
        let h = self.operator.step() * STENCIL_HALF_WIDTH as f64;
        let limit = 0.75 * w.s_max() - h;
        let points: Vec<f64> = (0..).map(|j| j as f64 * 0.125).take_while(|&s| s <= limit).collect();
        self.certificate(&|s| w.value_at(s), w.s_max(), &points)
    }

    /// `D̃`-residual against the mollified delta `δ_ε = e^{-(s/ε)²}/(ε√π)`,
    /// relative to `δ_ε(0)`, sampled on `[0, 4ε]`.
    pub fn delta_residual(&self, eps: f64) -> f64 {
        let delta = |s: f64| Complex64::new((-(s / eps).powi(2)).exp() / (eps * PI.sqrt()), 0.0);
        let points: Vec<f64> = (0..=16).map(|j| j as f64 * eps / 4.0).collect();
        let conv = |s: f64| self.convolve_with_panels(&delta, 8.0 * eps, s, 0.5 * eps);
        let applied = self.operator.apply_fd_with_step(&conv, &points, 0.25 * eps);
        let peak = delta(0.0).norm();
        applied.iter().zip(&points).map(|(a, &s)| (a - delta(s)).norm()).fold(0.0, f64::max) / peak
    }

    /// Samples of `F_{D̃}` on the line grid of `analysis`.
    pub fn line_profile(&self, analysis: &Analysis) -> LineProfile {
        analysis.line_profile(|s| self.line_value(s))
    }
}

// ─── solving and intertwining ─────────────────────────────────────────────

/// Solves `P(Δ)u = f` spectrally, `û = f̂ / P(-(λ²+ρ²))`.
pub fn solve(analysis: &Analysis, p: &LaplacePolynomial, f: &RadialProfile) -> Result<RadialProfile> {
    check_nonresonant(analysis.space(), p)?;
    let rho = analysis.space().rho();
    let spectrum = analysis.spherical_fourier(f)?;
    let quotient = spectrum.map(|l, v| v / p.symbol(rho, Complex64::new(l, 0.0)));
    analysis.inverse_spherical(&quotient)
}

/// `‖𝒜(P(Δ)u) - D̃(𝒜u)‖_∞` relative to `max(‖𝒜(P(Δ)u)‖_∞, ‖𝒜u‖_∞)`.
///
/// `P(Δ)u` is computed by Chebyshev differentiation, `D̃` by finite
/// differences on the line; both Abel transforms go through the spectral route.
pub fn abel_intertwining_check(analysis: &Analysis, p: &LaplacePolynomial, u: &RadialProfile) -> Result<f64> {
    let space = analysis.space();
    let w = analysis.abel_transform(u)?;
    let image = apply_polynomial(space, p, u)?;
    let lhs = analysis.line_inverse_fourier(&analysis.spherical_fourier_unchecked(&image)?)?;
    let op = abel_conjugate(space, p);
    let limit = w.s_max() - op.step() * (STENCIL_HALF_WIDTH + 1) as f64;
    let stride = 8;
    let nodes: Vec<f64> = w.nodes().into_iter().step_by(stride).take_while(|&s| s <= limit).collect();
    let rhs = op.apply_fd(&|s| w.value_at(s), &nodes);
    let norm = lhs.sup_norm().max(w.sup_norm());
    let residual = nodes
        .iter()
        .zip(&rhs)
        .map(|(&s, r)| (lhs.value_at(s) - r).norm())
        .fold(0.0, f64::max);
    Ok(residual / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::GridConfig;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn abel_conjugates() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let e3 = ModelSpace::euclidean(3).unwrap();
        let z = LaplacePolynomial::laplacian();
        assert_eq!(abel_conjugate(&e3, &z).coeffs(), &[c(0.0), c(0.0), c(1.0)]);
        assert_eq!(abel_conjugate(&h3, &z).coeffs(), &[c(-1.0), c(0.0), c(1.0)]);
        let z2 = LaplacePolynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(abel_conjugate(&h3, &z2).coeffs(), &[c(1.0), c(0.0), c(-2.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn fornberg_second_derivative() {
        let w = fornberg_weights(&[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
    }

    #[test]
    fn roots_with_multiplicity() {
        let p = [c(2.0), c(3.0), c(1.0)];
        let mut r: Vec<f64> = polynomial_roots(&p).iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 2.0).abs() < 1e-13 && (r[1] + 1.0).abs() < 1e-13);
        let q = [c(1.0), c(2.0), c(1.0)];
        let g = group_roots(&q, &polynomial_roots(&q));
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].1, 2);
        assert!((g[0].0 + 1.0).norm() < 1e-10);
    }

    #[test]
    fn closed_form_fundamental_solutions() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let f = fundamental_solution(&h3, &LaplacePolynomial::from_real(&[-1.0, 1.0]).unwrap()).unwrap();
        let k = 2f64.sqrt();
        for s in [0.0, 0.3, -1.2, 4.0] {
            let exact = -(-k * f64::abs(s)).exp() / (2.0 * k);
            assert!((f.line_value(s).re - exact).abs() < 1e-15);
        }
        let f = fundamental_solution(&h3, &LaplacePolynomial::laplacian()).unwrap();
        assert!((f.line_value(2.0).re + (-2f64).exp() / 2.0).abs() < 1e-15);
        let e3 = ModelSpace::euclidean(3).unwrap();
        assert!(matches!(fundamental_solution(&e3, &LaplacePolynomial::laplacian()), Err(Error::ResonantSymbol(_))));
    }

    #[test]
    fn repeated_root_matches_symbol() {
        // (Δ - 1)² on H³: symbol 1/(λ²+2)², line solution by Matérn l = 2
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let p = LaplacePolynomial::from_real(&[1.0, -2.0, 1.0]).unwrap();
        let f = fundamental_solution(&h3, &p).unwrap();
        let k = 2f64.sqrt();
        for s in [0.0, 0.7, 3.0] {
            let exact = (-k * s).exp() / (4.0 * k.powi(3)) * (1.0 + k * s);
            assert!((f.line_value(s).re - exact).abs() < 1e-9, "{s}");
        }
        // a simple and a double root: Fourier transform by quadrature against 1/P
        let q = LaplacePolynomial::from_real(&[0.0, 1.0]).unwrap().mul(&p);
        let f = fundamental_solution(&h3, &q).unwrap();
        let rule = gauss_legendre(32).composite(0.0, 60.0, 240);
        for lambda in [0.0, 0.5, 2.0] {
            let transform = 2.0 * rule.integrate(|s| f.line_value(s).re * (lambda * s).cos());
            assert!((transform - f.symbol(lambda).re).abs() < 1e-12, "{lambda}");
        }
        let w = |s: f64| c((-(s * s)).exp());
        let points: Vec<f64> = (0..12).map(|j| j as f64 * 0.25).collect();
        let certificate = f.certificate(&w, 7.0, &points);
        assert!(certificate < 1e-6, "{certificate}");
    }

    #[test]
    fn line_certificate() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let f = fundamental_solution(&h3, &LaplacePolynomial::from_real(&[-1.0, 1.0]).unwrap()).unwrap();
        let w = |s: f64| c((-(s * s)).exp());
        let points: Vec<f64> = (0..20).map(|j| j as f64 * 0.2).collect();
        assert!(f.certificate(&w, 7.0, &points) < 1e-8);
        assert!(f.delta_residual(0.05) < 1e-6);
    }

    #[test]
    fn identifies_polynomials_and_rejects_r2() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let lap = identify_operator(&h3, |u| apply_radial_laplacian(&h3, u), 3).unwrap();
        assert!(lap.max_coeff_diff(&LaplacePolynomial::laplacian()) < 1e-6);
        let p = LaplacePolynomial::from_real(&[2.0, 3.0, 1.0]).unwrap();
        let found = identify_operator(&h3, |u| apply_polynomial(&h3, &p, u), 4).unwrap();
        assert!(found.max_coeff_diff(&p) < 1e-6, "{found}");
        let r2 = BuiltinOperator::parse("builtin:r2").unwrap();
        assert!(matches!(identify_operator(&h3, |u| r2.apply(&h3, u), 4), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn solve_and_intertwine() {
        let h3 = ModelSpace::hyperbolic(3).unwrap();
        let config = GridConfig { lambda_nodes: 1024, lambda_max: 30.0, ..GridConfig::default() };
        let analysis = Analysis::new(h3, config).unwrap();
        let f = analysis.profile(|r| (-(r * r)).exp() * (1.0 + 0.5 * r * r));
        let p = LaplacePolynomial::from_real(&[-1.0, 1.0]).unwrap();
        let u = solve(&analysis, &p, &f).unwrap();
        let back = apply_polynomial(&h3, &p, &u).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-4 * f.sup_norm());
        let res = abel_intertwining_check(&analysis, &LaplacePolynomial::laplacian(), &f).unwrap();
        assert!(res < 1e-6, "{res}");
        let zero = abel_intertwining_check(&analysis, &LaplacePolynomial::identity(), &f).unwrap();
        assert_eq!(zero, 0.0);
    }
}
