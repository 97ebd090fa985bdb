//! Sampled spectral data: circle/ray caches with cubic-spline interpolation,
//! used when the reflection coefficients come from the Volterra solver or
//! from a cache file rather than a closed form.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Natural cubic spline over strictly increasing nodes.
#[derive(Clone, Debug)]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>, // second derivatives
}

impl Spline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 4 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("spline needs >= 4 increasing nodes"));
        }
        // tridiagonal solve for natural spline second derivatives
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        b[0] = 1.0;
        b[n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        // Thomas algorithm
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        dp[0] = d[0] / b[0];
        for i in 1..n {
            let m = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / m;
            dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
        }
        let mut m2 = vec![0.0; n];
        m2[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m2[i] = dp[i] - cp[i] * m2[i + 1];
        }
        Ok(Spline { xs, ys, m: m2 })
    }

    fn locate(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn in_range(&self, x: f64) -> bool {
        x >= self.xs[0] && x <= *self.xs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}

/// Complex-valued spline (separate real/imaginary parts).
#[derive(Clone, Debug)]
pub struct CSpline {
    re: Spline,
    im: Spline,
}

impl CSpline {
    pub fn new(xs: Vec<f64>, ys: &[C64]) -> Result<Self> {
        let re = Spline::new(xs.clone(), ys.iter().map(|v| v.re).collect())?;
        let im = Spline::new(xs, ys.iter().map(|v| v.im).collect())?;
        Ok(CSpline { re, im })
    }

    pub fn in_range(&self, x: f64) -> bool {
        self.re.in_range(x)
    }

    pub fn eval(&self, x: f64) -> C64 {
        C64::new(self.re.eval(x), self.im.eval(x))
    }

    pub fn eval_deriv(&self, x: f64) -> C64 {
        C64::new(self.re.eval_deriv(x), self.im.eval_deriv(x))
    }
}

/// Chebyshev-Lobatto angles on [lo, hi] (endpoints included, so the spline
/// range covers the whole segment).
pub fn chebyshev_angles(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let t = (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos();
            0.5 * (lo + hi) - 0.5 * (hi - lo) * t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_smooth_function() {
        let xs: Vec<f64> = (0..60).map(|i| i as f64 / 59.0 * 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x).sin()).collect();
        let sp = Spline::new(xs, ys).unwrap();
        for &x in &[0.5, 1.234, 2.5] {
            assert!((sp.eval(x) - (2.0 * x).sin()).abs() < 1e-5);
            assert!((sp.eval_deriv(x) - 2.0 * (2.0 * x).cos()).abs() < 1e-3);
        }
    }
}
