//! Gauss–Legendre rules and a globally adaptive panel integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi initial guess followed by Newton on P_n.
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
        Self { nodes, weights }
    }

    /// Shared 20-point rule used by the adaptive integrator and profile builders.
    pub fn shared() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule with `panels` equal panels.
pub fn composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = GaussLegendre::shared();
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            rule.integrate(&mut f, lo, lo + h)
        })
        .sum()
}

/// Outcome of [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_PANELS: usize = 4000;

/// Globally adaptive Gauss–Legendre integration.
///
/// Each panel's error is estimated by comparing the 20-point value on the
/// panel with the sum over its two halves; the panel with the largest error is
/// split until the total falls below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult> {
    let rule = GaussLegendre::shared();
    let make = |lo: f64, hi: f64, f: &mut F| {
        let mid = 0.5 * (lo + hi);
        let whole = rule.integrate(&mut *f, lo, hi);
        let left = rule.integrate(&mut *f, lo, mid);
        let right = rule.integrate(&mut *f, mid, hi);
        Panel { a: lo, b: hi, value: left + right, error: (whole - left - right).abs() }
    };

    let mut heap = BinaryHeap::new();
    let initial = 4;
    let h = (b - a) / initial as f64;
    for i in 0..initial {
        let lo = a + h * i as f64;
        let hi = if i + 1 == initial { b } else { lo + h };
        heap.push(make(lo, hi, &mut f));
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature { error: f64::INFINITY });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult { value, error, panels: heap.len() });
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature { error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            return Ok(QuadResult { value, error, panels: heap.len() + 1 });
        }
        heap.push(make(worst.a, mid, &mut f));
        heap.push(make(mid, worst.b, &mut f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 10, 20, 33] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(6);
        // x^11 is odd, x^10 integrates to 2/11.
        assert!(rule.integrate(|x| x.powi(11), -1.0, 1.0).abs() < 1e-15);
        assert!((rule.integrate(|x| x.powi(10), -1.0, 1.0) - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_and_peaked_integrands() {
        let r = adaptive(|x| x.sin(), 0.0, PI, 1e-13, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() / exact < 1e-11);
    }

    #[test]
    fn composite_converges() {
        let a = composite(|x| x.exp(), 0.0, 1.0, 1);
        assert!((a - (1f64.exp() - 1.0)).abs() < 1e-15);
    }
}
