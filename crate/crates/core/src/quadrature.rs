//! Gauss-Legendre rules, panel integration and compensated summation.

use std::f64::consts::PI;

use rayon::prelude::*;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
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
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = NeumaierSum::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.total()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Kahan-Babuska-Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Composite rule: `[a, b]` split into `panels` equal panels, each integrated
/// with `rule`. Panels are evaluated in parallel when `parallel` is set; the
/// per-panel results are always combined in panel order with compensated
/// summation, so serial and parallel runs agree to rounding.
pub fn integrate_panels<F>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, parallel: bool, f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let width = (b - a) / panels as f64;
    let panel = |j: usize| {
        let lo = a + j as f64 * width;
        rule.integrate(lo, lo + width, &f)
    };
    let parts: Vec<f64> = if parallel {
        (0..panels).into_par_iter().map(panel).collect()
    } else {
        (0..panels).map(panel).collect()
    };
    parts.into_iter().collect::<NeumaierSum>().total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // degree 9 = 2n - 1
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(8) + x.powi(9));
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_nodes_are_sorted_and_symmetric() {
        let rule = GaussLegendre::new(40);
        for w in rule.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (a, b) in rule.nodes.iter().zip(rule.nodes.iter().rev()) {
            assert!((a + b).abs() < 1e-15);
        }
    }

    #[test]
    fn panels_integrate_gaussian() {
        let rule = GaussLegendre::new(16);
        let v = integrate_panels(&rule, 0.0, 20.0, 20, false, |x| (-x * x).exp());
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn parallel_matches_serial() {
        let rule = GaussLegendre::new(12);
        let f = |x: f64| (3.0 * x).sin() * (-0.1 * x).exp();
        let s = integrate_panels(&rule, 0.0, 50.0, 64, false, f);
        let p = integrate_panels(&rule, 0.0, 50.0, 64, true, f);
        assert!((s - p).abs() <= 1e-13 * s.abs());
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.total(), 2.0);
    }
}
