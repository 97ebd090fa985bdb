//! Adaptive Gauss–Legendre quadrature on real intervals.
//!
//! Panels are accepted when the 16- and 32-point rules agree; otherwise the
//! panel is bisected. Endpoint log singularities and near-contour Cauchy
//! kernels are handled by the same bisection (the recursion depth grows only
//! logarithmically in the distance to the singularity).

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use once_cell::sync::Lazy;

/// Gauss–Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence (no tabulated constants).
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x)
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0_f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| legendre_rule(16));
static GL32: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| legendre_rule(32));

fn gl_panel<F>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = C64::new(0.0, 0.0);
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        s += f(c + h * x)? * *w;
    }
    Ok(s * h)
}

struct Adapt<'f, F> {
    f: &'f F,
    tol: f64,
    scale: f64,
    evals: usize,
}

impl<F> Adapt<'_, F>
where
    F: Fn(f64) -> Result<C64>,
{
    fn run(&mut self, a: f64, b: f64, depth: usize) -> Result<C64> {
        let coarse = gl_panel(self.f, a, b, &GL16)?;
        let fine = gl_panel(self.f, a, b, &GL32)?;
        self.evals += 48;
        let err = (fine - coarse).norm();
        if err <= self.tol * (1.0 + self.scale) || depth >= 60 || (b - a) < 1e-15 * self.scale.max(1.0)
        {
            if depth >= 60 && err > 100.0 * self.tol * (1.0 + self.scale) {
                return Err(Error::Convergence(format!(
                    "quadrature panel [{a}, {b}] stalled with error {err:.3e}"
                )));
            }
            return Ok(fine);
        }
        let m = 0.5 * (a + b);
        Ok(self.run(a, m, depth + 1)? + self.run(m, b, depth + 1)?)
    }
}

/// Adaptive integral of `f` over [a, b] with absolute/relative tolerance `tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    // rough scale from a coarse pass, used to make the tolerance relative
    let coarse = gl_panel(&f, a, b, &GL16)?;
    let mut ad = Adapt {
        f: &f,
        tol,
        scale: coarse.norm(),
        evals: 0,
    };
    ad.run(a, b, 0)
}

/// Integral with panels pre-split at the given interior anchors (used to
/// isolate near-singular points before the adaptive pass).
pub fn integrate_split<F>(f: F, a: f64, b: f64, anchors: &[f64], tol: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let mut pts: Vec<f64> = vec![a];
    let mut sorted: Vec<f64> = anchors
        .iter()
        .copied()
        .filter(|t| *t > a && *t < b)
        .collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(sorted);
    pts.push(b);
    let mut total = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        total += integrate(&f, w[0], w[1], tol)?;
    }
    Ok(total)
}
