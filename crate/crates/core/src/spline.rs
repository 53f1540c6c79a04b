//! Clamped cubic splines with first and second derivative access.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    /// Builds the spline with prescribed end slopes.
    pub fn clamped(x: &[f64], y: &[f64], slope_start: f64, slope_end: f64) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::Format("abscissa and ordinate lengths differ".into()));
        }
        if n < 4 {
            return Err(Error::TooFewSamples { min: 4, got: n });
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Format("spline abscissae must be strictly increasing".into()));
        }
        // Tridiagonal system for the knot second derivatives.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let h0 = x[1] - x[0];
        diag[0] = h0 / 3.0;
        sup[0] = h0 / 6.0;
        rhs[0] = (y[1] - y[0]) / h0 - slope_start;
        for i in 1..n - 1 {
            let hl = x[i] - x[i - 1];
            let hr = x[i + 1] - x[i];
            sub[i] = hl / 6.0;
            diag[i] = (hl + hr) / 3.0;
            sup[i] = hr / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
        }
        let hn = x[n - 1] - x[n - 2];
        sub[n - 1] = hn / 6.0;
        diag[n - 1] = hn / 3.0;
        rhs[n - 1] = slope_end - (y[n - 1] - y[n - 2]) / hn;

        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Value, first and second derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

/// Slope at `x[0]` of the cubic interpolating the first four points.
pub fn end_slope(x: &[f64], y: &[f64]) -> f64 {
    // Derivative of the Lagrange basis at the first node.
    let x0 = x[0];
    let mut slope = 0.0;
    for j in 0..4 {
        let mut denom = 1.0;
        for k in 0..4 {
            if k != j {
                denom *= x[j] - x[k];
            }
        }
        let mut num = 0.0;
        for l in 0..4 {
            if l == j {
                continue;
            }
            let mut prod = 1.0;
            for k in 0..4 {
                if k != j && k != l {
                    prod *= x0 - x[k];
                }
            }
            num += prod;
        }
        slope += y[j] * num / denom;
    }
    slope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t * t;
        let dp = |t: f64| -2.0 + 1.5 * t * t;
        let xs: Vec<f64> = (0..9).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|&t| p(t)).collect();
        let s = CubicSpline::clamped(&xs, &ys, dp(0.0), dp(2.0)).unwrap();
        for t in [0.1, 0.77, 1.3, 1.99] {
            let (v, d1, d2) = s.eval(t);
            assert!((v - p(t)).abs() < 1e-13);
            assert!((d1 - dp(t)).abs() < 1e-12);
            assert!((d2 - 3.0 * t).abs() < 1e-11);
        }
    }

    #[test]
    fn end_slope_exact_on_cubic() {
        let xs = [0.0, 0.1, 0.3, 0.35];
        let ys: Vec<f64> = xs.iter().map(|&t| t * t * t - t).collect();
        assert!((end_slope(&xs, &ys) + 1.0).abs() < 1e-12);
        let rx: Vec<f64> = xs.iter().rev().copied().collect();
        let ry: Vec<f64> = ys.iter().rev().copied().collect();
        assert!((end_slope(&rx, &ry) - (3.0 * 0.35 * 0.35 - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(CubicSpline::clamped(&[0.0, 2.0, 1.0, 3.0], &[0.0; 4], 0.0, 0.0).is_err());
    }
}
