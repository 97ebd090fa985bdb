//! Direct scattering: the Volterra systems for `X`, `X^A` and the scattering
//! matrices `s`, `s^A` computed from Schwartz initial data.
//!
//! The integral equations are equivalent to the linear ODEs
//!
//! ```text
//! X'  =  [L, X] + U X,          X(+inf)  = I,
//! XA' = -[L, XA] - U^T XA,      XA(+inf) = I,
//! ```
//!
//! marched downward from `x_max` with classical RK4 (the kernel is triangular
//! in x, so one O(N) sweep per k). The s-integrals use composite Simpson on
//! the march grid; both pieces are fourth order, which the Richardson tests
//! check empirically.

use crate::error::{Error, Result};
use crate::mat3::M3;
use crate::phase::{l_func, SQRT3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase")]
pub enum Profile {
    Gaussian {
        amplitude: f64,
        width: f64,
        center: f64,
        v0_amplitude: f64,
        v0_width: f64,
        v0_center: f64,
    },
    Sech2 {
        amplitude: f64,
        width: f64,
        center: f64,
        v0_amplitude: f64,
        v0_width: f64,
        v0_center: f64,
    },
    Table {
        xs: Vec<f64>,
        u0: Vec<f64>,
        u1: Vec<f64>,
    },
}

/// Initial data (u0, u1) with v0(x) = int_{-inf}^x u1.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub profile: Profile,
    pub x_min: f64,
    pub x_max: f64,
    pub n_samples: usize,
    pub tail_tol: f64,
    table: Option<TableData>,
}

#[derive(Clone, Debug)]
struct TableData {
    xs: Vec<f64>,
    u0: Pchip,
    v0: Pchip,
}

impl InitialData {
    pub fn new(profile: Profile, x_min: f64, x_max: f64, n_samples: usize, tail_tol: f64) -> Result<Self> {
        if x_min >= x_max || n_samples < 8 {
            return Err(Error::domain("bad initial-data window"));
        }
        let n_samples = n_samples + n_samples % 2; // Simpson wants an even count
        let table = match &profile {
            Profile::Table { xs, u0, u1 } => {
                if xs.len() != u0.len() || xs.len() != u1.len() || xs.len() < 4 {
                    return Err(Error::domain("table arrays must have equal length >= 4"));
                }
                let u0s = Pchip::new(xs.clone(), u0.clone())?;
                // v0 = cumulative integral of u1 (trapezoid on the table)
                let mut v0 = vec![0.0; xs.len()];
                for i in 1..xs.len() {
                    v0[i] = v0[i - 1] + 0.5 * (u1[i] + u1[i - 1]) * (xs[i] - xs[i - 1]);
                }
                let total = *v0.last().unwrap();
                let v0s = Pchip::new(xs.clone(), v0)?;
                let data = TableData {
                    xs: xs.clone(),
                    u0: u0s,
                    v0: v0s,
                };
                let d = InitialData {
                    profile: profile.clone(),
                    x_min,
                    x_max,
                    n_samples,
                    tail_tol,
                    table: Some(data),
                };
                if total.abs() > tail_tol {
                    return Err(Error::domain(format!(
                        "int u1 dx = {total:.3e} exceeds tail_tol (mass not conserved)"
                    )));
                }
                d.check_tails()?;
                return Ok(d);
            }
            _ => None,
        };
        let d = InitialData {
            profile,
            x_min,
            x_max,
            n_samples,
            tail_tol,
            table,
        };
        d.check_tails()?;
        Ok(d)
    }

    /// The fields must have decayed below tail_tol at the window ends.
    fn check_tails(&self) -> Result<()> {
        let mut peak = 0.0f64;
        for j in 0..=100 {
            let x = self.x_min + (self.x_max - self.x_min) * j as f64 / 100.0;
            let (u0, u0x, v0) = self.fields(x);
            peak = peak.max(u0.abs() + u0x.abs() + v0.abs());
        }
        for x in [self.x_min, self.x_max] {
            let (u0, u0x, v0) = self.fields(x);
            let tail = u0.abs() + u0x.abs() + v0.abs();
            if tail > self.tail_tol * (1.0 + peak) {
                return Err(Error::domain(format!(
                    "fields have not decayed at x = {x}: {tail:.3e} > tail_tol"
                )));
            }
        }
        Ok(())
    }

    pub fn zero(x_min: f64, x_max: f64, n_samples: usize) -> Self {
        InitialData::new(
            Profile::Gaussian {
                amplitude: 0.0,
                width: 1.0,
                center: 0.0,
                v0_amplitude: 0.0,
                v0_width: 1.0,
                v0_center: 0.0,
            },
            x_min,
            x_max,
            n_samples,
            1e-14,
        )
        .unwrap()
    }

    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        InitialData::new(
            Profile::Gaussian {
                amplitude,
                width,
                center: 0.0,
                v0_amplitude: 0.6 * amplitude,
                v0_width: 1.3 * width,
                v0_center: 0.2,
            },
            -14.0,
            14.0,
            1200,
            1e-12,
        )
        .unwrap()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let profile = match &self.profile {
            Profile::Gaussian {
                amplitude,
                width,
                center,
                v0_amplitude,
                v0_width,
                v0_center,
            } => Profile::Gaussian {
                amplitude: amplitude * factor,
                width: *width,
                center: *center,
                v0_amplitude: v0_amplitude * factor,
                v0_width: *v0_width,
                v0_center: *v0_center,
            },
            Profile::Sech2 {
                amplitude,
                width,
                center,
                v0_amplitude,
                v0_width,
                v0_center,
            } => Profile::Sech2 {
                amplitude: amplitude * factor,
                width: *width,
                center: *center,
                v0_amplitude: v0_amplitude * factor,
                v0_width: *v0_width,
                v0_center: *v0_center,
            },
            Profile::Table { xs, u0, u1 } => Profile::Table {
                xs: xs.clone(),
                u0: u0.iter().map(|v| v * factor).collect(),
                u1: u1.iter().map(|v| v * factor).collect(),
            },
        };
        InitialData::new(profile, self.x_min, self.x_max, self.n_samples, self.tail_tol).unwrap()
    }

    /// (u0, u0_x, v0) at x.
    pub fn fields(&self, x: f64) -> (f64, f64, f64) {
        match &self.profile {
            Profile::Gaussian {
                amplitude,
                width,
                center,
                v0_amplitude,
                v0_width,
                v0_center,
            } => {
                let u = (x - center) / width;
                let u0 = amplitude * (-u * u).exp();
                let u0x = -2.0 * u / width * u0;
                let w = (x - v0_center) / v0_width;
                let v0 = v0_amplitude * (-w * w).exp();
                (u0, u0x, v0)
            }
            Profile::Sech2 {
                amplitude,
                width,
                center,
                v0_amplitude,
                v0_width,
                v0_center,
            } => {
                let u = (x - center) / width;
                let sech = 1.0 / u.cosh();
                let u0 = amplitude * sech * sech;
                let u0x = -2.0 * amplitude * sech * sech * u.tanh() / width;
                let w = (x - v0_center) / v0_width;
                let sech2 = 1.0 / w.cosh();
                let v0 = v0_amplitude * sech2 * sech2;
                (u0, u0x, v0)
            }
            Profile::Table { .. } => {
                let t = self.table.as_ref().unwrap();
                if x < t.xs[0] || x > *t.xs.last().unwrap() {
                    return (0.0, 0.0, 0.0);
                }
                (t.u0.eval(x), t.u0.eval_deriv(x), t.v0.eval(x))
            }
        }
    }

    /// Window outside which the fields are numerically negligible.
    pub fn effective_support(&self) -> (f64, f64) {
        let n = 400;
        let mut lo = self.x_max;
        let mut hi = self.x_min;
        let mut peak = 0.0f64;
        for j in 0..=n {
            let x = self.x_min + (self.x_max - self.x_min) * j as f64 / n as f64;
            let (u0, u0x, v0) = self.fields(x);
            peak = peak.max(u0.abs() + u0x.abs() + v0.abs());
        }
        if peak == 0.0 {
            return (self.x_min, self.x_max);
        }
        for j in 0..=n {
            let x = self.x_min + (self.x_max - self.x_min) * j as f64 / n as f64;
            let (u0, u0x, v0) = self.fields(x);
            if u0.abs() + u0x.abs() + v0.abs() > 1e-13 * peak {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        ((lo - 1.0).max(self.x_min), (hi + 1.0).min(self.x_max))
    }

    /// Copy with the march window narrowed to the effective support (used for
    /// spectral-plane points where the conjugating exponentials grow).
    pub fn narrowed(&self) -> Self {
        let (lo, hi) = self.effective_support();
        let mut d = self.clone();
        d.x_min = lo;
        d.x_max = hi;
        d
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Gaussian {
                amplitude,
                v0_amplitude,
                ..
            }
            | Profile::Sech2 {
                amplitude,
                v0_amplitude,
                ..
            } => *amplitude == 0.0 && *v0_amplitude == 0.0,
            Profile::Table { u0, u1, .. } => {
                u0.iter().all(|v| *v == 0.0) && u1.iter().all(|v| *v == 0.0)
            }
        }
    }
}

/// P(k) (Vandermonde in the l_j) and U(x, k) = P^{-1} M(x) P.
pub fn build_p_and_u(x: f64, k: C64, data: &InitialData) -> Result<(M3, M3)> {
    let (p, pinv) = build_p(k)?;
    let (u0, u0x, v0) = data.fields(x);
    let m1 = C64::new(-u0x / 4.0, -v0 / (4.0 * SQRT3));
    let m2 = C64::new(-u0 / 2.0, 0.0);
    let mut m = M3::zero();
    m.0[2][0] = m1;
    m.0[2][1] = m2;
    Ok((p, pinv * m * p))
}

pub fn build_p(k: C64) -> Result<(M3, M3)> {
    let l1 = l_func(1, k)?;
    let l2 = l_func(2, k)?;
    let l3 = l_func(3, k)?;
    let one = C64::new(1.0, 0.0);
    let p = M3([
        [one, one, one],
        [l1, l2, l3],
        [l1 * l1, l2 * l2, l3 * l3],
    ]);
    let det = p.det();
    if det.norm() < 1e-10 {
        return Err(Error::NearSingular {
            k,
            det_abs: det.norm(),
        });
    }
    Ok((p, p.inv()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    XA,
}

/// March result: X(x_j, k) and the integrand samples needed for s(k).
pub struct March {
    pub xs: Vec<f64>,
    pub x_values: Vec<M3>,
    /// (U X)(x_j) for direction X, (U^T XA)(x_j) for direction XA
    pub kernel: Vec<M3>,
    pub l: [C64; 3],
}

fn commutator_rhs(l: &[C64; 3], u: &M3, x_mat: &M3, sign: f64) -> M3 {
    // sign=+1: [L, X] + U X ; sign=-1: -[L, X] - U^T X (U passed already transposed)
    let mut out = M3::zero();
    let ux = *u * *x_mat;
    for i in 0..3 {
        for j in 0..3 {
            out.0[i][j] = sign * ((l[i] - l[j]) * x_mat.0[i][j] + ux.0[i][j]);
        }
    }
    out
}

/// Downward RK4 march of the Volterra system, with a Picard fallback on the
/// integral form for spectral points where the conjugated ODE is unstable
/// (the fallback converges exactly when the kernel's Gronwall norm is small,
/// which is the regime where the march's homogeneous modes explode).
pub fn solve_volterra(k: C64, data: &InitialData, dir: Direction) -> Result<March> {
    solve_volterra_n(k, data, dir, data.n_samples)
}

pub fn solve_volterra_n(k: C64, data: &InitialData, dir: Direction, n: usize) -> Result<March> {
    match solve_volterra_march(k, data, dir, n) {
        Ok(m) => Ok(m),
        Err(Error::Convergence(_)) => solve_volterra_picard(k, &data.narrowed(), dir, 2 * n),
        Err(e) => Err(e),
    }
}

fn solve_volterra_march(k: C64, data: &InitialData, dir: Direction, n: usize) -> Result<March> {
    let n = n + n % 2;
    let l = [l_func(1, k)?, l_func(2, k)?, l_func(3, k)?];
    let h = (data.x_max - data.x_min) / n as f64;
    let u_at = |x: f64| -> Result<M3> {
        let (_, u) = build_p_and_u(x, k, data)?;
        Ok(match dir {
            Direction::X => u,
            Direction::XA => u.transpose(),
        })
    };
    let sign = match dir {
        Direction::X => 1.0,
        Direction::XA => -1.0,
    };
    let mut xs = Vec::with_capacity(n + 1);
    let mut vals = Vec::with_capacity(n + 1);
    let mut kernel = Vec::with_capacity(n + 1);
    let mut x = data.x_max;
    let mut m = M3::identity();
    let u_here = u_at(x)?;
    xs.push(x);
    vals.push(m);
    kernel.push(u_here * m);
    for _ in 0..n {
        // RK4 with step -h
        let u1 = u_at(x)?;
        let k1 = commutator_rhs(&l, &u1, &m, sign);
        let um = u_at(x - 0.5 * h)?;
        let m2 = m + k1.scale(C64::new(-0.5 * h, 0.0));
        let k2 = commutator_rhs(&l, &um, &m2, sign);
        let m3 = m + k2.scale(C64::new(-0.5 * h, 0.0));
        let k3 = commutator_rhs(&l, &um, &m3, sign);
        let u4 = u_at(x - h)?;
        let m4 = m + k3.scale(C64::new(-h, 0.0));
        let k4 = commutator_rhs(&l, &u4, &m4, sign);
        let incr = (k1 + k2.scale(C64::new(2.0, 0.0)) + k3.scale(C64::new(2.0, 0.0)) + k4)
            .scale(C64::new(-h / 6.0, 0.0));
        m = m + incr;
        x -= h;
        if m.norm_max() > 1e10 {
            return Err(Error::Convergence(format!(
                "march grew to {:.3e} at x = {x}, k = {k}",
                m.norm_max()
            )));
        }
        xs.push(x);
        vals.push(m);
        kernel.push(u_at(x)? * m);
    }
    xs.reverse();
    vals.reverse();
    kernel.reverse();
    Ok(March {
        xs,
        x_values: vals,
        kernel,
        l,
    })
}

/// Picard iteration on the conjugated integral equation
/// `W(x) = I - int_x^inf K(x, x') W(x') dx'` with entrywise kernel
/// `K_ij(x, x') = sign * U_ij(x') e^{sign (x - x')(l_i - l_j)}`,
/// using exact-exponential product panels (linear interpolation of U W).
fn solve_volterra_picard(k: C64, data: &InitialData, dir: Direction, n: usize) -> Result<March> {
    let n = n + n % 2;
    let l = [l_func(1, k)?, l_func(2, k)?, l_func(3, k)?];
    let h = (data.x_max - data.x_min) / n as f64;
    let sign = match dir {
        Direction::X => 1.0,
        Direction::XA => -1.0,
    };
    let mut us = Vec::with_capacity(n + 1);
    let mut xs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let x = data.x_min + h * j as f64;
        xs.push(x);
        let (_, u) = build_p_and_u(x, k, data)?;
        us.push(match dir {
            Direction::X => u,
            Direction::XA => u.transpose(),
        });
    }
    // Moments int_0^h e^{-s lam} s^j ds, j = 0, 1, 2.
    let moments = |lam: C64| -> (C64, C64, C64) {
        let one = C64::new(1.0, 0.0);
        let hl = lam * h;
        if hl.norm() < 1e-3 {
            (
                h * (one - hl / 2.0 + hl * hl / 6.0 - hl * hl * hl / 24.0),
                h * h * (C64::new(0.5, 0.0) - hl / 3.0 + hl * hl / 8.0 - hl * hl * hl / 30.0),
                h * h
                    * h
                    * (C64::new(1.0 / 3.0, 0.0) - hl / 4.0 + hl * hl / 10.0
                        - hl * hl * hl / 36.0),
            )
        } else {
            let e = (-hl).exp();
            (
                (one - e) / lam,
                (one - e * (one + hl)) / (lam * lam),
                (2.0 * one - e * (2.0 * one + 2.0 * hl + hl * hl)) / (lam * lam * lam),
            )
        }
    };
    let zero3 = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let mut decay = [[C64::new(0.0, 0.0); 3]; 3];
    // product-quadrature weights on the panel [0, h] for the quadratic
    // through G at nodes (0, h, 2h) and, for the last panel, (-h, 0, h)
    let mut w_fwd = [[zero3; 3]; 3];
    let mut w_back = [[zero3; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // lam such that C(x_m) = e^{-h lam} C(x_{m+1}) + panel, matching
            // the conjugation e^{sign (x - x') (l_i - l_j)} of the kernel
            let lam = (l[i] - l[j]) * sign;
            decay[i][j] = (-lam * h).exp();
            let (i0, i1, i2) = moments(lam);
            let h2 = h * h;
            w_fwd[i][j] = (
                (i2 - 3.0 * h * i1 + 2.0 * h2 * i0) / (2.0 * h2),
                (2.0 * h * i1 - i2) / h2,
                (i2 - h * i1) / (2.0 * h2),
            );
            w_back[i][j] = (
                (i2 - h * i1) / (2.0 * h2),
                (h2 * i0 - i2) / h2,
                (i2 + h * i1) / (2.0 * h2),
            );
        }
    }
    let mut w = vec![M3::identity(); n + 1];
    let mut prev_delta = f64::INFINITY;
    for sweep in 0..200 {
        let g: Vec<M3> = (0..=n).map(|m| us[m] * w[m]).collect();
        let mut c = vec![M3::zero(); n + 1];
        for m in (0..n).rev() {
            let forward = m + 2 <= n;
            for i in 0..3 {
                for j in 0..3 {
                    let panel = if forward {
                        let (wa, wb, wc) = w_fwd[i][j];
                        wa * g[m].0[i][j] + wb * g[m + 1].0[i][j] + wc * g[m + 2].0[i][j]
                    } else {
                        let (wa, wb, wc) = w_back[i][j];
                        wa * g[m - 1].0[i][j] + wb * g[m].0[i][j] + wc * g[m + 1].0[i][j]
                    };
                    c[m].0[i][j] = decay[i][j] * c[m + 1].0[i][j] + panel;
                }
            }
        }
        let mut delta: f64 = 0.0;
        for m in 0..=n {
            let new = M3::identity() + c[m].scale(C64::new(-sign, 0.0));
            delta = delta.max((new - w[m]).norm_max());
            w[m] = new;
        }
        if delta < 1e-13 {
            break;
        }
        if delta > prev_delta * 1.5 && sweep > 3 {
            return Err(Error::Convergence(format!(
                "Picard iteration diverging at k = {k} (delta {delta:.3e})"
            )));
        }
        prev_delta = delta.min(prev_delta);
        if sweep == 199 {
            return Err(Error::Convergence(format!(
                "Picard iteration stalled at k = {k} (delta {delta:.3e})"
            )));
        }
    }
    let kernel: Vec<M3> = (0..=n).map(|m| us[m] * w[m]).collect();
    Ok(March {
        xs,
        x_values: w,
        kernel,
        l,
    })
}

/// s(k) = I - int e^{-x L} (U X) e^{x L} dx  (direction X)
/// sA(k) = I + int e^{x L} (U^T XA) e^{-x L} dx  (direction XA)
pub fn scattering_matrix(k: C64, data: &InitialData, dir: Direction) -> Result<M3> {
    scattering_matrix_n(k, data, dir, data.n_samples)
}

pub fn scattering_matrix_n(k: C64, data: &InitialData, dir: Direction, n: usize) -> Result<M3> {
    let march = solve_volterra_n(k, data, dir, n)?;
    let sign = match dir {
        Direction::X => -1.0,
        Direction::XA => 1.0,
    };
    let m = march.xs.len() - 1; // even
    let h = (march.xs[m] - march.xs[0]) / m as f64;
    let mut integral = M3::zero();
    for j in 0..=m {
        let w = if j == 0 || j == m {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let x = march.xs[j];
        let g = &march.kernel[j];
        let mut term = M3::zero();
        for a in 0..3 {
            for b in 0..3 {
                // direction X: e^{-xL} G e^{xL}; direction XA: e^{xL} G e^{-xL}
                let expo = match dir {
                    Direction::X => (march.l[b] - march.l[a]) * x,
                    Direction::XA => (march.l[a] - march.l[b]) * x,
                };
                term.0[a][b] = g.0[a][b] * expo.exp();
            }
        }
        integral = integral + term.scale(C64::new(w * h / 3.0, 0.0));
    }
    Ok(M3::identity() + integral.scale(C64::new(sign, 0.0)))
}

/// Reflection coefficients r1 = s12/s11, r2 = sA12/sA11.
pub fn reflection(k: C64, data: &InitialData) -> Result<(C64, C64)> {
    let s = scattering_matrix(k, data, Direction::X)?;
    if s.0[0][0].norm() < 1e-12 {
        return Err(Error::DivisionNearZero(s.0[0][0].norm()));
    }
    let sa = scattering_matrix(k, data, Direction::XA)?;
    if sa.0[0][0].norm() < 1e-12 {
        return Err(Error::DivisionNearZero(sa.0[0][0].norm()));
    }
    Ok((s.0[0][1] / s.0[0][0], sa.0[0][1] / sa.0[0][0]))
}

// ---------------------------------------------------------------------------
// assumption checks
// ---------------------------------------------------------------------------

/// Report on the three admissibility assumptions: no solitons (s11 nonzero
/// on D2-bar and the circle), generic behavior of s and s^A near +-1, and
/// r1 = 0 on the segment [0, i].
#[derive(Clone, Debug, serde::Serialize)]
pub struct AssumptionReport {
    pub min_s11: f64,
    /// limits of ((k-1) s11, (k-1) s13, s31, s33, (k-1) sA11, (k-1) sA31,
    /// sA13, sA33) as k -> 1, then the same at k -> -1 (moduli)
    pub limits_at_plus1: [f64; 8],
    pub limits_at_minus1: [f64; 8],
    pub generic: bool,
    pub max_r1_on_segment: f64,
    /// |r1| at the far end of the outgoing ray (rapid-decay diagnostic)
    pub r1_far_ray: f64,
    /// estimated local vanishing order of f at k = 1 and k = omega
    /// (generically 1); NaN when the estimate is unavailable
    pub f_order_at_1: f64,
    pub f_order_at_omega: f64,
    /// segment probes skipped because the march overflowed (flagged, not fatal)
    pub segment_failures: usize,
    pub pass_no_solitons: bool,
    pub pass_global_existence: bool,
    pub tol_iii: f64,
}

/// Richardson extrapolation along a radial approach with 3 nodes (d, 2d, 3d),
/// assuming a quadratic model in d.
fn radial_limit<F>(f: F, d: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let r1 = f(d)?;
    let r2 = f(2.0 * d)?;
    let r3 = f(3.0 * d)?;
    Ok(r1 * 3.0 - r2 * 3.0 + r3)
}

/// The eight generic-behavior limits at k_star in {1, -1}.
pub fn generic_limits(data: &InitialData, k_star: f64) -> Result<[C64; 8]> {
    let d0 = 0.02;
    let s_at = |d: f64| -> Result<(M3, M3)> {
        let k = C64::new(k_star * (1.0 + d), 0.0);
        Ok((
            scattering_matrix(k, data, Direction::X)?,
            scattering_matrix(k, data, Direction::XA)?,
        ))
    };
    let pick = |which: usize, d: f64| -> Result<C64> {
        let k = C64::new(k_star * (1.0 + d), 0.0);
        let (s, sa) = s_at(d)?;
        let dk = k - k_star;
        Ok(match which {
            0 => dk * s.0[0][0],
            1 => dk * s.0[0][2],
            2 => s.0[2][0],
            3 => s.0[2][2] - 1.0, // deviation from the trivial value
            4 => dk * sa.0[0][0],
            5 => dk * sa.0[2][0],
            6 => sa.0[0][2],
            7 => sa.0[2][2] - 1.0,
            _ => unreachable!(),
        })
    };
    let mut out = [C64::new(0.0, 0.0); 8];
    for (which, slot) in out.iter_mut().enumerate() {
        *slot = radial_limit(|d| pick(which, d), d0)?;
    }
    // restore the trivial offsets for s33, sA33
    out[3] += 1.0;
    out[7] += 1.0;
    Ok(out)
}

/// Rational (Moebius) extrapolation r(d) ~ (beta + alpha d)/(gamma + d) from
/// three nodes; exact for the pole/zero collision structure of r1, r2 near
/// the kappa points, where polynomial extrapolation fails.
fn rational_limit<F>(f: F, d0: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let ds = [d0, 2.0 * d0, 3.0 * d0];
    let rs = [f(ds[0])?, f(ds[1])?, f(ds[2])?];
    // solve beta + alpha d_i - r_i gamma = r_i d_i  for (beta, alpha, gamma)
    let mut a = [[C64::new(0.0, 0.0); 3]; 3];
    let mut b = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        a[i][0] = C64::new(1.0, 0.0);
        a[i][1] = C64::new(ds[i], 0.0);
        a[i][2] = -rs[i];
        b[i] = rs[i] * ds[i];
    }
    let m = crate::mat3::M3(a).inv()?;
    let beta = m.0[0][0] * b[0] + m.0[0][1] * b[1] + m.0[0][2] * b[2];
    let gamma_c = m.0[2][0] * b[0] + m.0[2][1] * b[1] + m.0[2][2] * b[2];
    if gamma_c.norm() < 1e-14 {
        // no pole nearby; fall back to quadratic extrapolation
        return Ok(rs[0] * 3.0 - rs[1] * 3.0 + rs[2]);
    }
    Ok(beta / gamma_c)
}

/// Extrapolated boundary value of r1 (resp. r2) at k_star in {1, -1}.
pub fn reflection_limit_at(data: &InitialData, k_star: f64) -> Result<(C64, C64)> {
    let d0 = 0.004;
    let r1 = rational_limit(
        |d| {
            let k = C64::new(k_star * (1.0 + d), 0.0);
            let s = scattering_matrix(k, data, Direction::X)?;
            Ok(s.0[0][1] / s.0[0][0])
        },
        d0,
    )?;
    let r2 = rational_limit(
        |d| {
            let k = C64::new(k_star * (1.0 + d), 0.0);
            let sa = scattering_matrix(k, data, Direction::XA)?;
            Ok(sa.0[0][1] / sa.0[0][0])
        },
        d0,
    )?;
    Ok((r1, r2))
}

pub fn check_assumptions(data: &InitialData, tol_iii: f64) -> Result<AssumptionReport> {
    // (i): sample D2-bar (sector around 180 deg inside, around 0 deg outside)
    // and the unit circle, away from the kappa exclusions
    let mut min_s11 = f64::INFINITY;
    let mut probes: Vec<C64> = Vec::new();
    for &r in &[0.35, 0.6, 0.85] {
        for m in 0..5 {
            let a = 5.0 * PI_F / 6.0 + (PI_F / 3.0) * (m as f64 + 0.5) / 5.0;
            probes.push(C64::from_polar(r, a));
        }
    }
    for &r in &[1.01, 1.03, 1.07, 1.15, 1.6, 2.5] {
        for m in 0..5 {
            let a = -PI_F / 6.0 + (PI_F / 3.0) * (m as f64 + 0.5) / 5.0;
            probes.push(C64::from_polar(r, a));
        }
        // the real axis is where near-kappa zeros of s11 land for real data
        probes.push(C64::new(r, 0.0));
        probes.push(C64::new(-r, 0.0));
    }
    for m in 0..24 {
        let a = -PI_F + 2.0 * PI_F * (m as f64 + 0.5) / 24.0;
        let k = C64::from_polar(1.0, a);
        if crate::phase::dist_to_q_hat(k) > 0.05 {
            probes.push(k);
        }
    }
    let vals = crate::par::map(&probes, |&k| {
        scattering_matrix(k, data, Direction::X).map(|s| s.0[0][0].norm())
    });
    for v in vals {
        min_s11 = min_s11.min(v?);
    }
    // (ii)
    let lp = generic_limits(data, 1.0)?;
    let lm = generic_limits(data, -1.0)?;
    let scale = if data.is_zero() { 1.0 } else { 1e-6 };
    let generic = lp
        .iter()
        .chain(lm.iter())
        .all(|v| v.norm() > scale * 1e-3)
        && !data.is_zero();
    // (iii): on the segment the conjugating exponentials grow like
    // e^{(1/y - y) sqrt(3)/4 |x|}, so the march runs on the narrowed window
    // and the probe range keeps the growth within the guard; points that
    // still overflow are skipped and counted
    let narrowed = data.narrowed();
    let mut max_r1 = 0.0f64;
    let mut segment_failures = 0usize;
    for m in 0..9 {
        let y = 0.35 + 0.6 * m as f64 / 8.0;
        match scattering_matrix(C64::new(0.0, y), &narrowed, Direction::X) {
            Ok(s) => {
                if s.0[0][0].norm() > 1e-12 {
                    max_r1 = max_r1.max((s.0[0][1] / s.0[0][0]).norm());
                }
            }
            Err(Error::Convergence(_)) => segment_failures += 1,
            Err(e) => return Err(e),
        }
    }
    // local vanishing order of f at 1 and omega from a dyadic ratio of
    // f(e^{i theta}) approaching along the circle
    let f_at = |theta: f64| -> Result<f64> {
        let k = C64::from_polar(1.0, theta);
        let (r1, r2) = reflection(k, data)?;
        let k2 = C64::from_polar(1.0, 2.0 * PI_F / 3.0 - theta);
        let (r1b, r2b) = reflection(k2, data)?;
        Ok((C64::new(1.0, 0.0) + r1 * r2 + r1b * r2b).re)
    };
    let order_at = |base: f64| -> f64 {
        let d = 6e-3;
        match (f_at(base + d), f_at(base + 2.0 * d)) {
            (Ok(fa), Ok(fb)) if fa.abs() > 1e-14 && fb.abs() > 1e-14 => {
                (fb / fa).abs().log2()
            }
            _ => f64::NAN,
        }
    };
    let (f_order_at_1, f_order_at_omega) = if data.is_zero() {
        (f64::NAN, f64::NAN)
    } else {
        (order_at(0.0), order_at(2.0 * PI_F / 3.0))
    };
    // decay diagnostic at the far end of the outgoing ray
    let far = C64::from_polar(7.0, -PI_F / 2.0);
    let r1_far_ray = match scattering_matrix(far, &narrowed, Direction::X) {
        Ok(s) if s.0[0][0].norm() > 1e-12 => (s.0[0][1] / s.0[0][0]).norm(),
        _ => f64::NAN,
    };
    let to_mod = |a: [C64; 8]| {
        let mut out = [0.0; 8];
        for (i, v) in a.iter().enumerate() {
            out[i] = v.norm();
        }
        out
    };
    Ok(AssumptionReport {
        min_s11,
        limits_at_plus1: to_mod(lp),
        limits_at_minus1: to_mod(lm),
        generic,
        max_r1_on_segment: max_r1,
        r1_far_ray,
        f_order_at_1,
        f_order_at_omega,
        segment_failures,
        pass_no_solitons: min_s11 > 1e-6,
        pass_global_existence: max_r1 <= tol_iii,
        tol_iii,
    })
}

use std::f64::consts::PI as PI_F;

// ---------------------------------------------------------------------------
// monotone cubic interpolation for tabulated data
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 3 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("pchip needs >= 3 strictly increasing nodes"));
        }
        let n = xs.len();
        let mut slopes = vec![0.0; n - 1];
        for i in 0..n - 1 {
            slopes[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
        let mut d = vec![0.0; n];
        d[0] = slopes[0];
        d[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            if slopes[i - 1] * slopes[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                d[i] = (w1 + w2) / (w1 / slopes[i - 1] + w2 / slopes[i]);
            }
        }
        Ok(Pchip { xs, ys, d })
    }

    fn locate(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.d[i], self.d[i + 1]);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.d[i], self.d[i + 1]);
        let dh00 = 6.0 * t * t - 6.0 * t;
        let dh10 = 3.0 * t * t - 4.0 * t + 1.0;
        let dh01 = -6.0 * t * t + 6.0 * t;
        let dh11 = 3.0 * t * t - 2.0 * t;
        (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::omega2;

    #[test]
    fn zero_data_march_is_identity() {
        let data = InitialData::zero(-10.0, 10.0, 200);
        let k = C64::new(0.8, 0.45);
        let march = solve_volterra(k, &data, Direction::X).unwrap();
        for m in &march.x_values {
            assert!((*m - M3::identity()).norm_max() == 0.0);
        }
        let s = scattering_matrix(k, &data, Direction::X).unwrap();
        assert!((s - M3::identity()).norm_max() == 0.0);
    }

    #[test]
    fn det_p_is_vandermonde_product() {
        let k = C64::from_polar(2.0, 0.7);
        let data = InitialData::zero(-1.0, 1.0, 8);
        let (p, _) = build_p_and_u(0.0, k, &data).unwrap();
        let l1 = l_func(1, k).unwrap();
        let l2 = l_func(2, k).unwrap();
        let l3 = l_func(3, k).unwrap();
        let vdm = (l2 - l1) * (l3 - l1) * (l3 - l2);
        assert!((p.det() - vdm).norm() < 1e-14 * vdm.norm());
    }

    #[test]
    fn u_matrix_is_traceless_and_vanishes_for_zero_data() {
        let data = InitialData::gaussian(0.4, 1.5);
        let (_, u) = build_p_and_u(0.3, C64::new(0.9, 0.6), &data).unwrap();
        assert!(u.trace().norm() < 1e-14 * u.norm_max().max(1.0));
        let zero = InitialData::zero(-10.0, 10.0, 64);
        let (_, u0) = build_p_and_u(0.3, C64::new(0.9, 0.6), &zero).unwrap();
        assert!(u0.norm_max() == 0.0);
    }

    #[test]
    fn near_singular_p_rejected() {
        let data = InitialData::zero(-1.0, 1.0, 8);
        assert!(matches!(
            build_p_and_u(0.0, C64::new(1.0, 1e-11), &data),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn born_term_matches_single_integral_oracle() {
        // X - I agrees with the first Born integral to O(||U||^2)
        let eps = 1e-4;
        let data = InitialData::gaussian(eps, 1.2);
        let k = C64::from_polar(1.0, 0.9);
        let march = solve_volterra(k, &data, Direction::X).unwrap();
        let x_eval = data.x_min;
        let x_val = march.x_values[0];
        // independent quadrature: -int_x^inf e^{(x-x')L} U(x') e^{-(x-x')L} dx'
        let l = march.l;
        let n = 4000;
        let h = (data.x_max - x_eval) / n as f64;
        let mut born = M3::zero();
        for j in 0..=n {
            let xp = x_eval + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            let (_, u) = build_p_and_u(xp, k, &data).unwrap();
            let mut term = M3::zero();
            for a in 0..3 {
                for b in 0..3 {
                    term.0[a][b] = u.0[a][b] * ((l[a] - l[b]) * (x_eval - xp)).exp();
                }
            }
            born = born + term.scale(C64::new(-w * h, 0.0));
        }
        let diff = (x_val - M3::identity() - born).norm_max();
        assert!(
            diff < 50.0 * eps * eps,
            "Born mismatch {diff:.3e} vs eps^2 = {:.1e}",
            eps * eps
        );
    }

    #[test]
    fn march_order_of_accuracy_near_four() {
        let data = InitialData::gaussian(0.6, 1.3);
        let k = C64::from_polar(1.0, 2.3);
        let coarse = solve_volterra_n(k, &data, Direction::X, 300).unwrap().x_values[0];
        let medium = solve_volterra_n(k, &data, Direction::X, 600).unwrap().x_values[0];
        let fine = solve_volterra_n(k, &data, Direction::X, 1200).unwrap().x_values[0];
        let e1 = (coarse - medium).norm_max();
        let e2 = (medium - fine).norm_max();
        let order = (e1 / e2).log2();
        assert!(
            (3.5..=4.5).contains(&order),
            "empirical order {order} (errors {e1:.3e}, {e2:.3e})"
        );
    }

    #[test]
    fn reflection_symmetry_r2_equals_rtilde_conj_r1() {
        // r2(k) = r_tilde(k) conj(r1(1/conj k)) on the circle
        let data = InitialData::gaussian(0.3, 1.4);
        let mut worst = 0.0f64;
        for m in 0..16 {
            let th = -PI_F + 2.0 * PI_F * (m as f64 + 0.37) / 16.0;
            let k = C64::from_polar(1.0, th);
            if crate::phase::dist_to_q_hat(k) < 0.08 {
                continue;
            }
            let (r1, r2) = reflection(k, &data).unwrap();
            // on the circle 1/conj(k) = k
            let expect = crate::phase::r_tilde(k).unwrap() * r1.conj();
            worst = worst.max((r2 - expect).norm());
        }
        assert!(worst < 1e-7, "symmetry residual {worst:.3e}");
    }

    #[test]
    fn circle_relation_for_computed_data() {
        // r1(1/(wk)) + r2(wk) + r1(w^2 k) r2(1/k) = 0
        let data = InitialData::gaussian(0.3, 1.4);
        let w = crate::phase::omega();
        let mut worst = 0.0f64;
        for m in 0..8 {
            let th = 0.1 + 0.9 * m as f64 / 8.0;
            let k = C64::from_polar(1.0, th);
            let ks = [1.0 / (w * k), w * k, omega2() * k, 1.0 / k];
            if ks
                .iter()
                .any(|kk| crate::phase::dist_to_q_hat(*kk) < 0.08)
            {
                continue;
            }
            let (r1a, _) = reflection(ks[0], &data).unwrap();
            let (_, r2b) = reflection(ks[1], &data).unwrap();
            let (r1c, _) = reflection(ks[2], &data).unwrap();
            let (_, r2d) = reflection(ks[3], &data).unwrap();
            worst = worst.max((r1a + r2b + r1c * r2d).norm());
        }
        assert!(worst < 1e-7, "circle relation residual {worst:.3e}");
    }

    #[test]
    fn reflection_limits_at_pm1() {
        // r1(+-1) = 1, r2(+-1) = -1 for generic soliton-free data
        let data = InitialData::gaussian(0.02, 1.4);
        for k_star in [1.0, -1.0] {
            let (r1, r2) = reflection_limit_at(&data, k_star).unwrap();
            assert!(
                (r1 - C64::new(1.0, 0.0)).norm() < 1e-3,
                "r1({k_star}) = {r1}"
            );
            assert!(
                (r2 + C64::new(1.0, 0.0)).norm() < 1e-3,
                "r2({k_star}) = {r2}"
            );
        }
    }

    #[test]
    fn assumptions_zero_data() {
        let data = InitialData::zero(-10.0, 10.0, 200);
        let rep = check_assumptions(&data, 1e-8).unwrap();
        assert!(rep.pass_no_solitons);
        assert!(rep.pass_global_existence);
        assert!(!rep.generic, "zero data must be flagged non-generic");
        assert_eq!(rep.max_r1_on_segment, 0.0);
    }

    #[test]
    fn assumptions_generic_gaussian() {
        let data = InitialData::gaussian(0.02, 1.4);
        let rep = check_assumptions(&data, 1e-8).unwrap();
        assert!(rep.pass_no_solitons, "min |s11| = {}", rep.min_s11);
        assert!(rep.generic);
        // the vanishing-order estimate probes at fixed distance from the
        // kappa points (the march conditioning wall sits at the same
        // amplitude-dependent scale as the transition region), so it is a
        // report, not a sharp measurement: populated and nonnegative here
        assert!(
            rep.f_order_at_1.is_finite() && rep.f_order_at_1 > 0.0,
            "f order at 1: {}",
            rep.f_order_at_1
        );
        assert!(
            rep.f_order_at_omega.is_finite(),
            "f order at omega: {}",
            rep.f_order_at_omega
        );
        // generic data violates (iii)
        assert!(!rep.pass_global_existence);
        assert!(rep.max_r1_on_segment > 1e-8);
    }

    #[test]
    fn soliton_carrying_gaussian_shows_s11_dip() {
        // larger amplitude pushes a zero of s11 near the real axis inside
        // D2-bar; the sampled minimum dips by an order of magnitude (the
        // exact zero sits off-grid, so the check reports rather than proves)
        let small = check_assumptions(&InitialData::gaussian(0.02, 1.4), 1e-8)
            .unwrap()
            .min_s11;
        let large = check_assumptions(&InitialData::gaussian(0.3, 1.4), 1e-8)
            .unwrap()
            .min_s11;
        assert!(large < 0.5 * small, "min |s11|: {large} vs {small} for small data");
    }

    #[test]
    fn picard_fallback_agrees_with_march() {
        let data = InitialData::gaussian(0.05, 1.4);
        for k in [
            C64::from_polar(1.3, -PI_F / 2.0),
            C64::from_polar(1.0, 2.0),
            C64::from_polar(0.8, -PI_F / 2.0 + 0.0),
        ] {
            let a = solve_volterra_march(k, &data, Direction::X, 1200).unwrap();
            let b = solve_volterra_picard(k, &data, Direction::X, 2400).unwrap();
            let d = (a.x_values[0] - b.x_values[0]).norm_max();
            assert!(d < 1e-6, "X mismatch {d:.3e} at k = {k}");
            let a = solve_volterra_march(k, &data, Direction::XA, 1200).unwrap();
            let b = solve_volterra_picard(k, &data, Direction::XA, 2400).unwrap();
            let d = (a.x_values[0] - b.x_values[0]).norm_max();
            assert!(d < 1e-6, "XA mismatch {d:.3e} at k = {k}");
        }
    }

    #[test]
    fn table_profile_with_unbalanced_u1_rejected() {
        let xs: Vec<f64> = (0..64).map(|i| -8.0 + 16.0 * i as f64 / 63.0).collect();
        let u0: Vec<f64> = xs.iter().map(|x| 0.1 * (-x * x).exp()).collect();
        let u1: Vec<f64> = xs.iter().map(|x| 0.1 * (-x * x).exp()).collect();
        let r = InitialData::new(
            Profile::Table { xs, u0, u1 },
            -8.0,
            8.0,
            200,
            1e-10,
        );
        assert!(r.is_err(), "int u1 != 0 must be rejected");
    }
}

#[cfg(test)]
mod born_tests {
    use super::*;

    /// First-order (Born) oracle at the scattering-matrix level:
    /// r1 ~ s12 with s12 computed by a single independent quadrature of the
    /// conjugated kernel with X replaced by I.
    #[test]
    fn r1_matches_single_integral_born_term() {
        let eps = 1e-4;
        let data = InitialData::gaussian(1.0, 1.4).scaled(eps);
        let k = C64::from_polar(1.0, 0.9);
        let (r1, _) = reflection(k, &data).unwrap();
        let l = [
            l_func(1, k).unwrap(),
            l_func(2, k).unwrap(),
            l_func(3, k).unwrap(),
        ];
        let n = 6000;
        let h = (data.x_max - data.x_min) / n as f64;
        let mut born12 = C64::new(0.0, 0.0);
        for j in 0..=n {
            let x = data.x_min + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            let (_, u) = build_p_and_u(x, k, &data).unwrap();
            born12 += u.0[0][1] * ((l[1] - l[0]) * x).exp() * (-w * h);
        }
        assert!(
            (r1 - born12).norm() < 100.0 * eps * eps,
            "r1 = {r1} vs Born s12 = {born12}"
        );
    }
}

#[cfg(test)]
mod sech2_tests {
    use super::*;

    #[test]
    fn sech2_profile_satisfies_reconstruction_symmetry() {
        let data = InitialData::new(
            Profile::Sech2 {
                amplitude: 0.05,
                width: 1.2,
                center: -0.3,
                v0_amplitude: 0.03,
                v0_width: 1.5,
                v0_center: 0.1,
            },
            -14.0,
            14.0,
            1000,
            1e-9,
        )
        .unwrap();
        let mut worst = 0.0f64;
        for m in 0..6 {
            let th = 0.45 + 0.5 * m as f64 / 6.0;
            let k = C64::from_polar(1.0, th);
            let (r1, r2) = reflection(k, &data).unwrap();
            let expect = crate::phase::r_tilde(k).unwrap() * r1.conj();
            worst = worst.max((r2 - expect).norm());
        }
        assert!(worst < 1e-6, "sech2 symmetry residual {worst:.3e}");
    }
}
