//! Trigonometric series on the circle used by the synthetic spectral family.

use num_complex::Complex64 as C64;

/// Finite Fourier series f(theta) = sum_{n=-m}^{m} c_n e^{i n theta}.
#[derive(Clone, Debug)]
pub struct FourierSeries {
    /// coefficient of e^{i n theta} at index n + m
    coeffs: Vec<C64>,
    m: i64,
}

impl FourierSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "need an odd coefficient count");
        let m = (coeffs.len() / 2) as i64;
        FourierSeries { coeffs, m }
    }

    pub fn modes(&self) -> i64 {
        self.m
    }

    /// Direct DFT from N uniform samples (theta_j = 2 pi j / N), keeping the
    /// 2m+1 central modes.
    pub fn from_samples(samples: &[C64], m: usize) -> Self {
        let n = samples.len();
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * m + 1];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let mode = idx as i64 - m as i64;
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (mode as f64) * (j as f64) / (n as f64);
                acc += v * C64::from_polar(1.0, ang);
            }
            *c = acc / n as f64;
        }
        FourierSeries::new(coeffs)
    }

    /// Drop trailing modes whose modulus is below `tol` times the maximum.
    pub fn truncated(&self, tol: f64) -> Self {
        let max = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let mut keep = 0i64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mode = (idx as i64 - self.m).abs();
            if c.norm() > tol * max {
                keep = keep.max(mode);
            }
        }
        let m_new = keep as usize;
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * m_new + 1];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let mode = idx as i64 - m_new as i64;
            *c = self.coeffs[(mode + self.m) as usize];
        }
        FourierSeries::new(coeffs)
    }

    pub fn eval(&self, theta: f64) -> C64 {
        let e = C64::from_polar(1.0, theta);
        let einv = e.conj();
        let mut pos = C64::new(0.0, 0.0);
        let mut neg = C64::new(0.0, 0.0);
        // Horner from the outermost mode inward
        for n in (1..=self.m).rev() {
            pos = (pos + self.coeffs[(self.m + n) as usize]) * e;
            neg = (neg + self.coeffs[(self.m - n) as usize]) * einv;
        }
        pos + neg + self.coeffs[self.m as usize]
    }

    /// d/dtheta of the series.
    pub fn eval_deriv(&self, theta: f64) -> C64 {
        let e = C64::from_polar(1.0, theta);
        let einv = e.conj();
        let mut pos = C64::new(0.0, 0.0);
        let mut neg = C64::new(0.0, 0.0);
        for n in (1..=self.m).rev() {
            let i_n = C64::new(0.0, n as f64);
            pos = pos * e + i_n * self.coeffs[(self.m + n) as usize] * e;
            neg = neg * einv - i_n * self.coeffs[(self.m - n) as usize] * einv;
        }
        pos + neg
    }
}
