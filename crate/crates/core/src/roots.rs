//! Scalar root finding, golden-section maximization and Richardson tables.

/// Bisection on a bracket where `f(lo)` and `f(hi)` differ in sign.
///
/// Runs until the bracket is no wider than `x_tol` or stops shrinking in
/// floating point. Returns `None` if the endpoints do not bracket a root.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol || mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Richardson extrapolation of samples taken at step sizes `h0 * 2^-k`.
///
/// Assumes an error expansion in integer powers of the step. Returns the
/// diagonal entry whose change from its predecessor is smallest, together
/// with that change as the error estimate.
pub fn richardson_halving(values: &[f64]) -> (f64, f64) {
    assert!(values.len() >= 2, "need at least two samples to extrapolate");
    let n = values.len();
    let mut table = vec![vec![0.0; n]; n];
    for (k, v) in values.iter().enumerate() {
        table[k][0] = *v;
    }
    for k in 1..n {
        let mut factor = 1.0;
        for j in 1..=k {
            factor *= 2.0;
            table[k][j] = table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0);
        }
    }
    let mut best = (table[1][1], (table[1][1] - table[0][0]).abs());
    for k in 2..n {
        let err = (table[k][k] - table[k - 1][k - 1]).abs();
        if err < best.1 {
            best = (table[k][k], err);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_none());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let g = |h: f64| 3.0 + 0.5 * h - 2.0 * h * h + 0.25 * h * h * h;
        let samples: Vec<f64> = (0..6).map(|k| g(0.1 / 2f64.powi(k))).collect();
        let (v, e) = richardson_halving(&samples);
        assert!((v - 3.0).abs() < 1e-13, "{v}");
        assert!(e < 1e-12);
    }
}
