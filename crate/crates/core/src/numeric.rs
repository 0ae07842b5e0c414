//! Finite differences, Gauss-Legendre quadrature and monotone cubic interpolation.

use std::ops::{Add, Mul, Sub};

/// Anything that can be combined linearly: `f64`, nalgebra vectors.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Default step for first derivatives (Richardson halves it once).
pub const STEP1: f64 = 1e-3;
/// Default step for second derivatives.
pub const STEP2: f64 = 4e-3;
/// Default step for third derivatives.
pub const STEP3: f64 = 1e-2;

/// One Richardson pass over a central stencil whose error expands in even powers of `h`.
fn richardson<T: Linear>(d: impl Fn(f64) -> T, h: f64) -> T {
    (d(0.5 * h) * 4.0 - d(h)) * (1.0 / 3.0)
}

/// First derivative, O(h^4).
pub fn diff1<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    richardson(|h| (f(x + h) - f(x - h)) * (0.5 / h), h)
}

/// Second derivative, O(h^4).
pub fn diff2<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    let f0 = f(x);
    richardson(|h| (f(x + h) - f0 * 2.0 + f(x - h)) * (1.0 / (h * h)), h)
}

/// Third derivative, O(h^4).
pub fn diff3<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    richardson(
        |h| (f(x + 2.0 * h) - f(x + h) * 2.0 + f(x - h) * 2.0 - f(x - 2.0 * h)) * (0.5 / (h * h * h)),
        h,
    )
}

/// Derivative of order `k` (1..=3) with the default step for that order scaled by `scale`.
pub fn diff_n<T: Linear>(f: impl Fn(f64) -> T, x: f64, k: usize, scale: f64) -> T {
    match k {
        1 => diff1(f, x, STEP1 * scale),
        2 => diff2(f, x, STEP2 * scale),
        3 => diff3(f, x, STEP3 * scale),
        _ => panic!("unsupported derivative order {k}"),
    }
}

/// Fourth-order derivative of uniformly spaced samples (5-point stencils, one-sided at the ends).
pub fn grid_derivative(values: &[f64], ds: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "grid_derivative needs at least 5 samples");
    let f = values;
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
            } else if i < 2 {
                let j = i;
                // forward stencil evaluated at offset j from the left edge
                match j {
                    0 => -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4],
                    _ => -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4],
                }
            } else {
                let j = n - 1 - i;
                match j {
                    0 => 25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5],
                    _ => 3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5],
                }
            };
            d / (12.0 * ds)
        })
        .collect()
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes mapped onto [a, b].
    pub fn nodes_on(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().map(move |x| mid + half * x)
    }

    /// Adaptive bisection until the rule and its two-panel refinement agree to `tol`.
    pub fn integrate_adaptive(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        self.adaptive_inner(f, a, b, tol, self.integrate(f, a, b), 0)
    }

    fn adaptive_inner(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, whole: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = self.integrate(f, a, m);
        let right = self.integrate(f, m, b);
        if (left + right - whole).abs() <= tol || depth >= 40 {
            return left + right;
        }
        self.adaptive_inner(f, a, m, 0.5 * tol, left, depth + 1)
            + self.adaptive_inner(f, m, b, 0.5 * tol, right, depth + 1)
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
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

/// Fritsch-Carlson monotone cubic Hermite interpolant; extrapolates linearly.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing and `y` monotone.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
            };
        }
        Self { x, y, m }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.m[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.m[n - 1] * (t - self.x[n - 1]);
        }
        let i = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_derivatives_of_sin() {
        let x = 0.7;
        assert!((diff1(f64::sin, x, STEP1) - x.cos()).abs() < 1e-12);
        assert!((diff2(f64::sin, x, STEP2) + x.sin()).abs() < 1e-9);
        assert!((diff3(f64::sin, x, STEP3) + x.cos()).abs() < 1e-8);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let g = GaussLegendre::new(5);
        // degree 9 is exact for 5 nodes
        let v = g.integrate(|x| x.powi(9) + x.powi(8), 0.0, 1.0);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-14);
        let sum: f64 = g.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_quadrature_handles_peaks() {
        let g = GaussLegendre::new(8);
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let v = g.integrate_adaptive(&f, -1.0, 1.0, 1e-10);
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn grid_derivative_is_fourth_order() {
        let ds = 0.01;
        let v: Vec<f64> = (0..50).map(|i| (i as f64 * ds).exp()).collect();
        let d = grid_derivative(&v, ds);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * ds).exp()).abs() < 1e-8, "i={i}");
        }
    }

    #[test]
    fn monotone_cubic_stays_monotone() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.1, 0.1, 5.0, 5.2];
        let p = MonotoneCubic::new(x, y);
        let mut last = f64::NEG_INFINITY;
        for k in 0..=400 {
            let v = p.eval(k as f64 * 0.01);
            assert!(v >= last - 1e-15);
            last = v;
        }
        assert_eq!(p.eval(3.0), 5.0);
    }
}
