use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on `[0, 1]` (weights sum to 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on the three-term recurrence
        let mut x = ((4 * i + 3) as f64 * std::f64::consts::PI / (4 * n + 2) as f64).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map from [-1, 1] to [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

pub(crate) fn gl10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

/// A positive-weight rule on the reference triangle `(0,0), (1,0), (0,1)`.
/// Weights are normalised to sum to one.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Barycentric coordinates `(1 - x - y, x, y)`.
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Collapsed (conical) product rule: Gauss–Legendre with `⌈(d+2)/2⌉`
    /// points in the collapsed direction, which also absorbs the Jacobian
    /// factor, and `⌈(d+1)/2⌉` points along the other. Exact for total
    /// degree `d`, all nodes interior, all weights positive.
    pub fn conical(degree: usize) -> Self {
        let (xs, wx) = gauss_legendre((degree + 3) / 2);
        let (ts, wt) = gauss_legendre((degree + 2) / 2);
        let mut nodes = Vec::with_capacity(xs.len() * ts.len());
        let mut weights = Vec::with_capacity(xs.len() * ts.len());
        for (&s, &ws) in xs.iter().zip(&wx) {
            for (&t, &w) in ts.iter().zip(&wt) {
                let x = s;
                let y = (1.0 - s) * t;
                nodes.push([1.0 - x - y, x, y]);
                // ∫_T f = ∫∫ f(s, (1-s)t) (1-s) ds dt, and |T| = 1/2
                weights.push(2.0 * ws * w * (1.0 - s));
            }
        }
        Self { nodes, weights, degree }
    }

    /// The rule used throughout: exact for total degree 17.
    pub fn degree17() -> &'static Self {
        static RULE: OnceLock<QuadratureRule> = OnceLock::new();
        RULE.get_or_init(|| QuadratureRule::conical(17))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Normalised integral of `x^i y^j` over the reference triangle.
    pub fn integrate_monomial(&self, i: i32, j: i32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| w * b[1].powi(i) * b[2].powi(j))
            .sum()
    }
}

/// `2 · ∫_T x^i y^j = 2 · i! j! / (i + j + 2)!`, evaluated as
/// `2 / ((n+2)(n+1) C(n, i))` with `n = i + j`.
pub fn reference_monomial_integral(i: u32, j: u32) -> f64 {
    let n = i + j;
    let mut binom = 1.0f64;
    for k in 0..i {
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    2.0 / ((n + 2) as f64 * (n + 1) as f64 * binom)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleValidation {
    pub degree: u32,
    pub max_relative_error: f64,
    pub worst_monomial: (u32, u32),
    pub weight_sum: f64,
    pub min_weight: f64,
    pub nodes_interior: bool,
}

impl RuleValidation {
    pub fn passed(&self) -> bool {
        self.max_relative_error <= 1e-13 && self.min_weight > 0.0 && self.nodes_interior
    }
}

/// Integrates every monomial of total degree `<= degree` and reports the
/// largest relative error.
pub fn validate_rule(rule: &QuadratureRule, degree: u32) -> RuleValidation {
    let mut worst = (0.0, (0, 0));
    for n in 0..=degree {
        for i in 0..=n {
            let j = n - i;
            let exact = reference_monomial_integral(i, j);
            let got = rule.integrate_monomial(i as i32, j as i32);
            let rel = ((got - exact) / exact).abs();
            if rel > worst.0 {
                worst = (rel, (i, j));
            }
        }
    }
    RuleValidation {
        degree,
        max_relative_error: worst.0,
        worst_monomial: worst.1,
        weight_sum: rule.weights.iter().sum(),
        min_weight: rule.weights.iter().copied().fold(f64::INFINITY, f64::min),
        nodes_interior: rule.nodes.iter().all(|b| b.iter().all(|&l| l > 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - 1.0 / (k + 1) as f64).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn degree17_rule() {
        let rule = QuadratureRule::degree17();
        assert_eq!(rule.len(), 90);
        let v = validate_rule(rule, 17);
        assert!(v.passed(), "{v:?}");
        assert!((v.weight_sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degree18_is_not_exact() {
        let rule = QuadratureRule::degree17();
        let got = rule.integrate_monomial(0, 18);
        let exact = reference_monomial_integral(0, 18);
        assert!(((got - exact) / exact).abs() > 1e-12);
    }

    #[test]
    fn factorial_reference() {
        // 2 * 8! 9! / 19!
        let f = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        let direct = 2.0 * f(8) * f(9) / f(19);
        assert!((reference_monomial_integral(8, 9) - direct).abs() < 1e-13 * direct);
        assert_eq!(reference_monomial_integral(0, 0), 1.0);
    }
}
