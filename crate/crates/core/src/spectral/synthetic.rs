//! Synthetic admissible reflection data.
//!
//! The circle trace `rho(theta) = r1(e^{i theta})` of admissible data cannot
//! be chosen freely: together with `r2 = r_tilde . conj(r1 . inv-conj)` it has
//! to satisfy the circle identity
//!
//! ```text
//! r1(1/(w k)) + r2(w k) + r1(w^2 k) r2(1/k) = 0,   |k| = 1,
//! ```
//!
//! otherwise the jump factorizations and the model-problem admissibility
//! constraint fail. Writing `T(rho)(a) = -tau(-a) conj(rho(-a))` (an
//! antilinear involution, since `tau(a) tau(-a) = 1`) the identity reads
//!
//! ```text
//! rho - T(rho) = -Q(rho),   Q(rho)(a) = tau(a + 2pi/3) rho(2pi/3 - a) conj(rho(a + 2pi/3)),
//! ```
//!
//! and `Q` always produces a T-odd function. So the family is parameterized
//! by a free T-even seed: iterate `rho <- seed - Q(rho)/2` to convergence.
//! Window bumps in the seed put mass where the saddle-point quantities live;
//! a global factor `(sin(3 theta) cos(theta))^2` pins zeros at the poles of
//! `tau` and at +-i (so `r1(i) = 0`, the trace of the global-existence
//! assumption).

use super::fourier::FourierSeries;
use crate::phase::{r_tilde_circle, r_tilde_circle_deriv};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct WindowSpec {
    pub center: f64,
    pub width: f64,
    pub amp: C64,
    pub modulation: i32,
}

#[derive(Clone, Debug)]
pub struct SyntheticParams {
    pub windows: Vec<WindowSpec>,
    /// profile of r1 on the outgoing ray at angle -pi/2 (|k| > 1):
    /// `ray_amp * rho(-pi/2) * exp(-ray_decay (|k| - 1)^2)` so the circle and
    /// ray traces join continuously at -i.
    pub ray_decay: f64,
}

impl SyntheticParams {
    /// The default verification family; `seed` jitters amplitudes and phases.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jitter = |base: f64| base * (1.0 + 0.2 * (rng.gen::<f64>() - 0.5));
        let windows = vec![
            // saddle window around arg k4 (zeta in the compact interior)
            WindowSpec {
                center: -0.2075 * PI,
                width: 0.038 * PI,
                amp: C64::from_polar(jitter(1.20), 0.7 + jitter(0.3)),
                modulation: 1,
            },
            // two bumps covering the arc (pi/2, arg(w^2 k2)) incl. the saddle
            WindowSpec {
                center: 0.565 * PI,
                width: 0.022 * PI,
                amp: C64::from_polar(jitter(20.0), -0.4 + jitter(0.2)),
                modulation: -1,
            },
            WindowSpec {
                center: 0.615 * PI,
                width: 0.022 * PI,
                amp: C64::from_polar(jitter(16.0), 0.9 + jitter(0.25)),
                modulation: 2,
            },
            // window at arg(1/k2) in (2pi/3, 3pi/4)
            WindowSpec {
                center: 0.71 * PI,
                width: 0.020 * PI,
                amp: C64::from_polar(jitter(7.8), -1.1 + jitter(0.2)),
                modulation: 0,
            },
            // window at arg(w k2) just below the real axis
            WindowSpec {
                center: -0.054 * PI,
                width: 0.018 * PI,
                amp: C64::from_polar(jitter(1.9), 0.3 + jitter(0.3)),
                modulation: -2,
            },
        ];
        SyntheticParams {
            windows,
            ray_decay: 4.0,
        }
    }
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d = 2.0 * PI - d;
    }
    d
}

/// Zero-pinning factor: zeros at the poles of tau (+-pi/3, +-2pi/3) and at +-pi/2.
fn pin_factor(theta: f64) -> f64 {
    let s = (3.0 * theta).sin() * theta.cos();
    s * s
}

fn seed_fn(params: &SyntheticParams, theta: f64) -> C64 {
    let mut v = C64::new(0.0, 0.0);
    for w in &params.windows {
        let d = angle_dist(theta, w.center) / w.width;
        if d < 12.0 {
            v += w.amp
                * (-d * d).exp()
                * C64::from_polar(1.0, w.modulation as f64 * theta);
        }
    }
    v * pin_factor(theta)
}

/// T(rho)(a) = -tau(-a) conj(rho(-a)).
///
/// tau(-a) has poles at a = -pi/3 and 2pi/3 where the pinned second-order
/// zeros of rho make the product vanish; the grid value there is 0.
fn t_map(grid: &[C64], n: usize, idx: usize) -> C64 {
    let neg = (n - idx) % n;
    let theta = 2.0 * PI * idx as f64 / n as f64;
    if (PI / 3.0 + theta).sin().abs() < 1e-9 {
        return C64::new(0.0, 0.0);
    }
    let tau = r_tilde_circle(-theta);
    -tau * grid[neg].conj()
}

fn q_map(grid: &[C64], n: usize, idx: usize) -> C64 {
    let third = n / 3;
    let theta = 2.0 * PI * idx as f64 / n as f64;
    if (PI / 3.0 + theta).sin().abs() < 1e-9 {
        return C64::new(0.0, 0.0);
    }
    // 2pi/3 - theta  and  theta + 2pi/3 on the grid
    let i_a = (third + n - idx) % n;
    let i_b = (idx + third) % n;
    let tau = r_tilde_circle(theta + 2.0 * PI / 3.0);
    tau * grid[i_a] * grid[i_b].conj()
}

/// Solve the circle identity for the trace `rho` and freeze it as a Fourier series.
pub fn build_rho(params: &SyntheticParams) -> FourierSeries {
    let n = 1536; // divisible by 6, so the orbit maps stay on the grid
    let thetas: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let raw: Vec<C64> = thetas.iter().map(|&t| seed_fn(params, t)).collect();
    // T-even projection of the seed
    let sigma: Vec<C64> = (0..n)
        .map(|j| (raw[j] + t_map(&raw, n, j)) / 2.0)
        .collect();
    let mut rho = sigma.clone();
    for _ in 0..400 {
        let next: Vec<C64> = (0..n)
            .map(|j| sigma[j] - q_map(&rho, n, j) / 2.0)
            .collect();
        let delta = next
            .iter()
            .zip(&rho)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        rho = next;
        if delta < 1e-15 {
            break;
        }
    }
    FourierSeries::from_samples(&rho, 420).truncated(1e-15)
}

/// Residual of the circle identity at an arbitrary angle (diagnostic).
pub fn circle_relation_residual(rho: &FourierSeries, alpha: f64) -> f64 {
    let lhs = rho.eval(alpha)
        + r_tilde_circle(-alpha) * rho.eval(-alpha).conj()
        + r_tilde_circle(alpha + 2.0 * PI / 3.0)
            * rho.eval(2.0 * PI / 3.0 - alpha)
            * rho.eval(alpha + 2.0 * PI / 3.0).conj();
    lhs.norm()
}

/// Circle trace helpers shared with the cached backend.
pub struct CircleTrace<'a> {
    pub rho: &'a FourierSeries,
}

impl CircleTrace<'_> {
    /// 1 + r1 r2 on the circle: real, = 1 + tau |rho|^2.
    pub fn one_plus_r1r2(&self, theta: f64) -> f64 {
        1.0 + r_tilde_circle(theta) * self.rho.eval(theta).norm_sqr()
    }

    pub fn one_plus_r1r2_deriv(&self, theta: f64) -> f64 {
        let v = self.rho.eval(theta);
        let dv = self.rho.eval_deriv(theta);
        r_tilde_circle_deriv(theta) * v.norm_sqr()
            + r_tilde_circle(theta) * 2.0 * (v.conj() * dv).re
    }

    /// f(e^{i theta}) = 1 + tau(theta)|rho(theta)|^2 + tau(2pi/3 - theta)|rho(2pi/3 - theta)|^2
    pub fn f(&self, theta: f64) -> f64 {
        let t2 = 2.0 * PI / 3.0 - theta;
        1.0 + r_tilde_circle(theta) * self.rho.eval(theta).norm_sqr()
            + r_tilde_circle(t2) * self.rho.eval(t2).norm_sqr()
    }

    pub fn f_deriv(&self, theta: f64) -> f64 {
        let t2 = 2.0 * PI / 3.0 - theta;
        let g = |th: f64| {
            let v = self.rho.eval(th);
            let dv = self.rho.eval_deriv(th);
            r_tilde_circle_deriv(th) * v.norm_sqr()
                + r_tilde_circle(th) * 2.0 * (v.conj() * dv).re
        };
        g(theta) - g(t2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_satisfies_circle_relation_off_grid() {
        let rho = build_rho(&SyntheticParams::from_seed(7));
        for m in 0..64 {
            let alpha = -PI + 2.0 * PI * (m as f64 + 0.318) / 64.0;
            let r = circle_relation_residual(&rho, alpha);
            assert!(r < 1e-11, "alpha = {alpha}: residual {r:.3e}");
        }
    }

    #[test]
    fn trace_vanishes_at_i_and_tau_poles() {
        let rho = build_rho(&SyntheticParams::from_seed(7));
        for t in [PI / 2.0, -PI / 2.0, PI / 3.0, -PI / 3.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0] {
            assert!(rho.eval(t).norm() < 1e-10, "rho({t}) = {}", rho.eval(t));
        }
    }

    #[test]
    fn saddle_windows_are_populated() {
        let rho = build_rho(&SyntheticParams::from_seed(7));
        // representative angles: arg k4 and arg(w^2 k2) at zeta = 0.35
        let s = crate::phase::saddle_points(0.35).unwrap();
        let a4 = s.k4.arg();
        let b = (crate::phase::omega2() * s.k2).arg();
        assert!(rho.eval(a4).norm() > 0.05, "rho(arg k4) = {}", rho.eval(a4).norm());
        assert!(rho.eval(b).norm() > 0.05, "rho(arg w2 k2) = {}", rho.eval(b).norm());
    }

    #[test]
    fn positivity_of_log_arguments_on_arcs() {
        let rho = build_rho(&SyntheticParams::from_seed(7));
        let tr = CircleTrace { rho: &rho };
        // 1 + r1 r2 > 0 and f > 0 along the upper arcs used by the deltas
        for m in 0..200 {
            let th = PI / 3.0 + (PI / 3.0) * (m as f64 + 0.5) / 200.0;
            assert!(tr.one_plus_r1r2(th) > 0.0, "theta = {th}");
            assert!(tr.f(th) > 0.0, "theta = {th}");
            let rot = th - 2.0 * PI / 3.0;
            assert!(tr.one_plus_r1r2(rot) > 0.0, "theta = {rot}");
            assert!(tr.f(rot) > 0.0, "theta = {rot}");
        }
    }
}
