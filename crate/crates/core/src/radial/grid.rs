//! Chebyshev grid for even radial functions.
//!
//! An even function `u` on `[-R, R]` is a function of `r²`; writing
//! `y = 2(r/R)² - 1` turns it into a smooth function `g(y)` on `[-1, 1]`.
//! The grid stores `u` at the Chebyshev–Lobatto points in `y`, which are
//! exactly the non-negative half of the Chebyshev–Lobatto points of `[-R, R]`
//! (`r_i = R sin(π i / 2(N-1))`). Parity is therefore built into the
//! representation: odd derivatives at the origin vanish identically.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Target relative accuracy for locating the rounding plateau of a
/// Chebyshev series before differentiation.
pub const CHOP_TOLERANCE: f64 = f64::EPSILON;

/// Relative size of the coefficient tail that marks a profile as non-even or
/// unresolved.
pub const PARITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug)]
pub struct RadialGrid {
    r_max: f64,
    nodes: Vec<f64>,
    y_nodes: Vec<f64>,
    /// `cos(π m / K)` for `m = 0..2K`.
    cos_table: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_nodes: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
        }
        if n_nodes < 3 {
            return Err(Error::Domain(format!("need at least 3 radial nodes, got {n_nodes}")));
        }
        let k = n_nodes - 1;
        let m = 2 * k;
        let nodes: Vec<f64> = (0..n_nodes)
            .map(|i| {
                if i == k {
                    r_max
                } else {
                    r_max * (PI * i as f64 / m as f64).sin()
                }
            })
            .collect();
        let y_nodes: Vec<f64> = (0..n_nodes)
            .map(|i| {
                if i == 0 {
                    -1.0
                } else if i == k {
                    1.0
                } else {
                    -(PI * i as f64 / k as f64).cos()
                }
            })
            .collect();
        let cos_table = (0..2 * k).map(|j| (PI * j as f64 / k as f64).cos()).collect();
        Ok(Self { r_max, nodes, y_nodes, cos_table })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Radial nodes, increasing, `nodes[0] = 0`, last node `= r_max`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }

    pub fn y_of_r(&self, r: f64) -> f64 {
        let x = r / self.r_max;
        2.0 * x * x - 1.0
    }

    /// Index of an exact node match, if any.
    pub fn node_index(&self, r: f64) -> Option<usize> {
        self.nodes
            .binary_search_by(|probe| probe.partial_cmp(&r).unwrap_or(std::cmp::Ordering::Less))
            .ok()
    }

    fn cos_jk(&self, j: usize, k: usize) -> f64 {
        let period = self.cos_table.len();
        self.cos_table[(j * k) % period]
    }

    /// Chebyshev coefficients `a_j` of `g(y) = Σ a_j T_j(y)` from node values.
    pub fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        debug_assert_eq!(values.len(), n);
        let k_max = n - 1;
        // f_k = g(cos(πk/K)) = values[K - k]
        let f = |k: usize| values[k_max - k];
        let scale = 2.0 / k_max as f64;
        (0..n)
            .map(|j| {
                let mut acc = 0.5 * (f(0) + f(k_max) * self.cos_jk(j, k_max));
                for k in 1..k_max {
                    acc += f(k) * self.cos_jk(j, k);
                }
                let mut a = acc * scale;
                if j == 0 || j == k_max {
                    a *= 0.5;
                }
                a
            })
            .collect()
    }

    /// Node values from Chebyshev coefficients (inverse of [`Self::coefficients`]).
    pub fn values_from_coefficients(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let k_max = n - 1;
        let len = coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).map_or(0, |p| p + 1);
        (0..n)
            .map(|i| {
                let k = k_max - i;
                coeffs[..len]
                    .iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (j, c)| acc + c * self.cos_jk(j, k))
            })
            .collect()
    }

    /// Zeroes the rounding plateau at the end of a Chebyshev series.
    ///
    /// The cutoff follows the plateau detection of Aurentz and Trefethen
    /// ("Chopping a Chebyshev series", 2017) at tolerance [`CHOP_TOLERANCE`];
    /// a series without a plateau is left untouched.
    pub fn chop(coeffs: &mut [Complex64]) {
        let keep = chop_point(&coeffs.iter().map(|c| c.norm()).collect::<Vec<_>>(), CHOP_TOLERANCE);
        for c in coeffs[keep..].iter_mut() {
            *c = Complex64::new(0.0, 0.0);
        }
    }

    /// Largest coefficient in the top tenth of the spectrum, relative to `scale`.
    pub fn tail_residual(coeffs: &[Complex64], scale: f64) -> f64 {
        if scale == 0.0 {
            return 0.0;
        }
        let n = coeffs.len();
        let start = (9 * n) / 10;
        coeffs[start.min(n - 1)..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Coefficients of `dg/dy`.
    pub fn derivative_coefficients(coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = coeffs.len();
        let zero = Complex64::new(0.0, 0.0);
        if n < 2 {
            return vec![zero; n];
        }
        // d_{j-1} = d_{j+1} + 2j a_j, then d_0 is halved
        let mut out = vec![zero; n + 1];
        for j in (1..n).rev() {
            out[j - 1] = out[j + 1] + coeffs[j] * (2.0 * j as f64);
        }
        out[0] *= 0.5;
        out.truncate(n);
        out
    }

    /// Clenshaw evaluation of `Σ a_j T_j(y)`.
    pub fn clenshaw(coeffs: &[Complex64], y: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let len = coeffs.iter().rposition(|c| *c != zero).map_or(0, |p| p + 1);
        if len == 0 {
            return zero;
        }
        let mut b1 = zero;
        let mut b2 = zero;
        for c in coeffs[1..len].iter().rev() {
            let b0 = c + b1 * (2.0 * y) - b2;
            b2 = b1;
            b1 = b0;
        }
        coeffs[0] + b1 * y - b2
    }

    /// Barycentric differentiation matrices `(d/dy, d²/dy²)` on the y-nodes,
    /// row-major, for collocation solvers.
    pub fn y_differentiation_matrices(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        let x = &self.y_nodes;
        let w: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                if i == 0 || i == n - 1 {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let mut d1 = vec![0.0; n * n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (w[j] / w[i]) / (x[i] - x[j]);
                    d1[i * n + j] = v;
                    diag -= v;
                }
            }
            d1[i * n + i] = diag;
        }
        let mut d2 = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = d1[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    d2[i * n + j] += a * d1[k * n + j];
                }
            }
        }
        (d1, d2)
    }
}

/// Number of leading coefficients to keep.
fn chop_point(abs: &[f64], tol: f64) -> usize {
    let n = abs.len();
    if n < 17 {
        return n;
    }
    // monotone envelope m_j = max_{k ≥ j} |a_k|
    let mut envelope = abs.to_vec();
    for j in (0..n - 1).rev() {
        envelope[j] = envelope[j].max(envelope[j + 1]);
    }
    if envelope[0] == 0.0 {
        return 1;
    }
    let top = envelope[0];
    envelope.iter_mut().for_each(|e| *e /= top);
    // plateau: the envelope stops decreasing well before reaching tol
    let mut plateau = None;
    let mut j2 = 0;
    for j in 2..=n {
        j2 = (1.25 * j as f64 + 5.0).round() as usize;
        if j2 > n {
            return n;
        }
        let (e1, e2) = (envelope[j - 1], envelope[j2 - 1]);
        let r = 3.0 * (1.0 - e1.ln() / tol.ln());
        if e1 == 0.0 || e2 / e1 > r {
            plateau = Some(j - 1);
            break;
        }
    }
    let Some(point) = plateau else { return n };
    if envelope[point - 1] == 0.0 {
        return point;
    }
    // the last point before the plateau, with a slight preference for longer series
    let floor = tol.powf(7.0 / 6.0);
    let j3 = envelope.iter().filter(|&&e| e >= floor).count();
    if j3 < j2 {
        j2 = j3 + 1;
        envelope[j2 - 1] = floor;
    }
    let tilt = -tol.log10() / 3.0;
    let mut best = (f64::INFINITY, 0);
    for (i, e) in envelope[..j2].iter().enumerate() {
        let value = e.log10() + tilt * i as f64 / (j2 - 1) as f64;
        if value < best.0 {
            best = (value, i + 1);
        }
    }
    best.1.saturating_sub(1).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn nodes_are_half_of_symmetric_lobatto_grid() {
        let g = RadialGrid::new(8.0, 9).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(*g.nodes().last().unwrap(), 8.0);
        for (r, y) in g.nodes().iter().zip(g.y_nodes()) {
            assert!((g.y_of_r(*r) - y).abs() < 1e-14);
        }
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coefficient_round_trip() {
        let g = RadialGrid::new(3.0, 17).unwrap();
        let vals: Vec<Complex64> = g.nodes().iter().map(|r| c((-r * r).exp() * r.cos())).collect();
        let coeffs = g.coefficients(&vals);
        let back = g.values_from_coefficients(&coeffs);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
        let y = 0.123;
        let r = 3.0 * ((y + 1.0) / 2.0f64).sqrt();
        let direct = (-r * r).exp() * r.cos();
        assert!((RadialGrid::clenshaw(&coeffs, y).re - direct).abs() < 1e-4);
    }

    #[test]
    fn derivative_of_chebyshev_polynomial() {
        // g = T_3(y) = 4y³ - 3y, g' = 12y² - 3 = 6 T_2 + 3 T_0
        let coeffs = vec![c(0.0), c(0.0), c(0.0), c(1.0)];
        let d = RadialGrid::derivative_coefficients(&coeffs);
        assert!((d[0].re - 3.0).abs() < 1e-15);
        assert!((d[2].re - 6.0).abs() < 1e-15);
        assert_eq!(d[1].re, 0.0);
    }

    #[test]
    fn differentiation_matrix_is_exact_on_quadratics() {
        let g = RadialGrid::new(1.0, 7).unwrap();
        let (d1, d2) = g.y_differentiation_matrices();
        let n = g.len();
        let y = g.y_nodes();
        for i in 0..n {
            let first: f64 = (0..n).map(|j| d1[i * n + j] * y[j] * y[j]).sum();
            let second: f64 = (0..n).map(|j| d2[i * n + j] * y[j] * y[j]).sum();
            assert!((first - 2.0 * y[i]).abs() < 1e-12);
            assert!((second - 2.0).abs() < 1e-11);
        }
    }
}
