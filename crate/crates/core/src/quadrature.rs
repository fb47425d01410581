//! One-dimensional quadrature rules.

use std::f64::consts::PI;

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine image of a rule on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Rule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    /// Composite rule: this rule repeated on `panels` equal sub-intervals of `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Rule {
        let mut nodes = Vec::with_capacity(panels * self.nodes.len());
        let mut weights = Vec::with_capacity(panels * self.nodes.len());
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let piece = self.mapped(a + p as f64 * h, a + (p + 1) as f64 * h);
            nodes.extend(piece.nodes);
            weights.extend(piece.weights);
        }
        Rule { nodes, weights }
    }
}

/// Gauss–Legendre rule with `n` nodes on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Clenshaw–Curtis rule with `n` nodes on `[a, b]`, nodes increasing.
pub fn clenshaw_curtis(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 2);
    let k_max = n - 1;
    let kf = k_max as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        // increasing: x = -cos(πk/K)
        let theta = PI * k as f64 / kf;
        nodes.push(-theta.cos());
        let mut v = 1.0;
        let half = k_max / 2;
        for j in 1..=half {
            let bj = if 2 * j == k_max { 1.0 } else { 2.0 };
            v -= bj * (2.0 * j as f64 * theta).cos() / (4.0 * (j * j) as f64 - 1.0);
        }
        let ck = if k == 0 || k == k_max { 1.0 } else { 2.0 };
        weights.push(ck * v / kf);
    }
    Rule { nodes, weights }.mapped(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(10);
        for p in 0..20 {
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            let approx = rule.integrate(|x| x.powi(p));
            assert!((approx - exact).abs() < 1e-14, "p={p}");
        }
        let big = gauss_legendre(64);
        assert!((big.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn clenshaw_curtis_exponential() {
        let rule = clenshaw_curtis(33, 0.0, 2.0);
        let approx = rule.integrate(|x| x.exp());
        assert!((approx - (2f64.exp() - 1.0)).abs() < 1e-13);
        assert_eq!(rule.nodes[0], 0.0);
        assert!((rule.nodes[32] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn composite_gauss() {
        let rule = gauss_legendre(8).composite(0.0, 3.0, 5);
        let approx = rule.integrate(|x| (x * x).sin());
        // reference from a much finer rule
        let reference = gauss_legendre(40).composite(0.0, 3.0, 20).integrate(|x| (x * x).sin());
        assert!((approx - reference).abs() < 1e-12);
    }
}
