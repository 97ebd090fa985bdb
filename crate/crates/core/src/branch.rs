//! Branch-aware logarithms `k -> ln(k - s)` with the cut layouts used by the
//! Cauchy-type integrals on the unit circle.
//!
//! Each branch is data: a cut description plus a normalization value at the
//! anchor point `k = s + 1`. Values elsewhere are obtained by analytic
//! continuation of `arg(k - s)` along an explicit polyline that provably
//! avoids the cut; every segment is intersection-checked against the cut, so
//! silent branch mixing cannot happen.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Tolerance for "k lies on the cut".
pub const CUT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub enum BranchLog {
    /// `ln_s(k - s)`: cut along the circle arc between `arg s` and `pi/2`
    /// together with the vertical ray `(i, i inf)`; normalized by
    /// `arg_s(1) = 2 pi` (value at the anchor `k = s + 1`).
    LnS { s: C64 },
    /// `tilde-ln_s(k - s)`: cut along the circle arc `[arg s, pi]` together
    /// with the negative real axis; normalized by `arg~_s(1) = 0`.
    LnTildeS { s: C64 },
    /// Principal `ln(k - s)`, `arg` in `(-pi, pi]`.
    Principal { s: C64 },
    /// `ln_0(k - s)`, `arg` in `(0, 2 pi)`, cut along `s + [0, +inf)`.
    Ln0 { s: C64 },
}

impl BranchLog {
    pub fn base_point(&self) -> C64 {
        match self {
            BranchLog::LnS { s }
            | BranchLog::LnTildeS { s }
            | BranchLog::Principal { s }
            | BranchLog::Ln0 { s } => *s,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cut {
    /// circle arc at radius 1 with angle in [lo, hi]
    arc_lo: f64,
    arc_hi: f64,
    /// true: vertical ray {iy : y >= 1}; false: negative real axis (-inf, 0]
    up_ray: bool,
}

impl Cut {
    fn for_branch(b: &BranchLog) -> Option<Cut> {
        match b {
            BranchLog::LnS { s } => {
                let a = s.arg();
                Some(Cut {
                    arc_lo: a.min(PI / 2.0),
                    arc_hi: a.max(PI / 2.0),
                    up_ray: true,
                })
            }
            BranchLog::LnTildeS { s } => Some(Cut {
                arc_lo: s.arg(),
                arc_hi: PI,
                up_ray: false,
            }),
            _ => None,
        }
    }

    fn distance(&self, k: C64) -> f64 {
        let mut d = f64::INFINITY;
        // distance to the circle arc
        let th = k.arg();
        if th >= self.arc_lo && th <= self.arc_hi {
            d = d.min((k.norm() - 1.0).abs());
        }
        for end in [self.arc_lo, self.arc_hi] {
            d = d.min((k - C64::from_polar(1.0, end)).norm());
        }
        if self.up_ray {
            // {iy : y >= 1}
            if k.im >= 1.0 {
                d = d.min(k.re.abs());
            }
            d = d.min((k - C64::new(0.0, 1.0)).norm());
        } else {
            // (-inf, 0]
            if k.re <= 0.0 {
                d = d.min(k.im.abs());
            }
            d = d.min(k.norm());
        }
        d
    }

    /// Does the straight segment p..q intersect the cut?
    fn segment_hits(&self, p: C64, q: C64) -> bool {
        let d = q - p;
        // circle |p + t d| = 1
        let a = d.norm_sqr();
        if a > 0.0 {
            let b = 2.0 * (p.re * d.re + p.im * d.im);
            let c = p.norm_sqr() - 1.0;
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                    if (-1e-12..=1.0 + 1e-12).contains(&t) {
                        let x = p + d * t;
                        let th = x.arg();
                        if th >= self.arc_lo - 1e-12 && th <= self.arc_hi + 1e-12 {
                            return true;
                        }
                    }
                }
            }
        }
        if self.up_ray {
            // Re = 0, Im >= 1
            if (p.re > 0.0) != (q.re > 0.0) {
                let t = -p.re / d.re;
                if (0.0..=1.0).contains(&t) && p.im + t * d.im >= 1.0 - 1e-12 {
                    return true;
                }
            }
        } else {
            // Im = 0, Re <= 0
            if (p.im > 0.0) != (q.im > 0.0) {
                let t = -p.im / d.im;
                if (0.0..=1.0).contains(&t) && p.re + t * d.re <= 1e-12 {
                    return true;
                }
            }
        }
        false
    }
}

/// Accumulate the continuous change of `arg(k - s)` along the straight
/// segment p..q, bisecting until each step turns by less than ~pi/4.
fn arg_increment(s: C64, p: C64, q: C64, depth: usize) -> Result<f64> {
    let ratio = (q - s) / (p - s);
    let a = ratio.arg();
    if a.abs() <= PI / 4.0 {
        return Ok(a);
    }
    if depth > 80 {
        return Err(Error::domain(
            "branch continuation failed to resolve argument increment",
        ));
    }
    let m = (p + q) / 2.0;
    Ok(arg_increment(s, p, m, depth + 1)? + arg_increment(s, m, q, depth + 1)?)
}

/// Build a polyline from the anchor s+1 to k avoiding `cut`.
fn route(cut: &Cut, s: C64, k: C64) -> Vec<C64> {
    const R_OUT: f64 = 3.0;
    let start = s + 1.0;
    let mut pts = vec![start];
    let phi0 = start.arg();
    let r0 = start.norm();
    // radially out to R_OUT (subdivided so chords hug the ray direction)
    let steps = 4;
    for i in 1..=steps {
        let r = r0 + (R_OUT - r0) * i as f64 / steps as f64;
        pts.push(C64::from_polar(r, phi0));
    }
    let phi_t = k.arg();
    let rk = k.norm();

    // angular sweeps are polygonal with steps <= pi/12 so chords stay near
    // radius R_OUT (resp. rk)
    let sweep = |pts: &mut Vec<C64>, r: f64, from: f64, to: f64| {
        let n = ((to - from).abs() / (PI / 12.0)).ceil().max(1.0) as usize;
        for i in 1..=n {
            let a = from + (to - from) * i as f64 / n as f64;
            pts.push(C64::from_polar(r, a));
        }
    };

    // targets within a whisker of the circle route as outside points; true
    // inside points sweep at a radius safely below the circle
    let outside = rk >= 1.0 - 1e-9;
    let r_sweep = rk.min(0.9);
    if cut.up_ray {
        // never cross angle pi/2 at radius >= 1
        let target_outer = if outside { phi_t } else { -PI / 2.0 };
        let crosses = |a: f64, b: f64| {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            lo < PI / 2.0 && hi > PI / 2.0
        };
        if !crosses(phi0, target_outer) {
            sweep(&mut pts, R_OUT, phi0, target_outer);
        } else {
            // go the other way round (through the bottom)
            let adjusted = if target_outer > phi0 {
                target_outer - 2.0 * PI
            } else {
                target_outer + 2.0 * PI
            };
            sweep(&mut pts, R_OUT, phi0, adjusted);
        }
        if outside {
            // radial descent
            let phi_end = pts.last().unwrap().arg();
            let steps = 6;
            for i in 1..=steps {
                let r = R_OUT + (rk - R_OUT) * i as f64 / steps as f64;
                pts.push(C64::from_polar(r, phi_end));
            }
            // final exact point
            pts.push(k);
        } else {
            // enter the disk at the bottom, sweep below the circle, ascend
            let steps = 6;
            for i in 1..=steps {
                let r = R_OUT + (r_sweep - R_OUT) * i as f64 / steps as f64;
                pts.push(C64::from_polar(r, -PI / 2.0));
            }
            sweep(&mut pts, r_sweep, -PI / 2.0, phi_t);
            for i in 1..=3 {
                let r = r_sweep + (rk - r_sweep) * i as f64 / 3.0;
                pts.push(C64::from_polar(r, phi_t));
            }
            pts.push(k);
        }
    } else {
        // cut = arc [arg s, pi] + negative axis: never cross angle +-pi,
        // and enter the disk at angle 0
        let target_outer = if outside { phi_t } else { 0.0 };
        sweep(&mut pts, R_OUT, phi0, target_outer);
        if outside {
            let phi_end = pts.last().unwrap().arg();
            let steps = 6;
            for i in 1..=steps {
                let r = R_OUT + (rk - R_OUT) * i as f64 / steps as f64;
                pts.push(C64::from_polar(r, phi_end));
            }
            pts.push(k);
        } else {
            let steps = 6;
            for i in 1..=steps {
                let r = R_OUT + (r_sweep - R_OUT) * i as f64 / steps as f64;
                pts.push(C64::from_polar(r, 0.0));
            }
            sweep(&mut pts, r_sweep, 0.0, phi_t);
            for i in 1..=3 {
                let r = r_sweep + (rk - r_sweep) * i as f64 / 3.0;
                pts.push(C64::from_polar(r, phi_t));
            }
            pts.push(k);
        }
    }
    pts
}

/// Evaluate the branch logarithm at k.
pub fn branch_log(branch: &BranchLog, k: C64) -> Result<C64> {
    match branch {
        BranchLog::Principal { s } => {
            let w = k - s;
            if w.im.abs() < CUT_TOL && w.re < 0.0 {
                return Err(Error::BranchCut { k, dist: w.im.abs() });
            }
            if w.norm() < 1e-300 {
                return Err(Error::domain("log of zero"));
            }
            Ok(w.ln())
        }
        BranchLog::Ln0 { s } => {
            let w = k - s;
            if w.im.abs() < CUT_TOL && w.re > 0.0 {
                return Err(Error::BranchCut { k, dist: w.im.abs() });
            }
            if w.norm() < 1e-300 {
                return Err(Error::domain("log of zero"));
            }
            let mut a = w.arg();
            if a <= 0.0 {
                a += 2.0 * PI;
            }
            Ok(C64::new(w.norm().ln(), a))
        }
        BranchLog::LnS { s } | BranchLog::LnTildeS { s } => {
            let cut = Cut::for_branch(branch).unwrap();
            let dist = cut.distance(k);
            if dist < CUT_TOL {
                return Err(Error::BranchCut { k, dist });
            }
            if (k - s).norm() < 1e-300 {
                return Err(Error::domain("log of zero"));
            }
            let pts = route(&cut, *s, k);
            for w in pts.windows(2) {
                if cut.segment_hits(w[0], w[1]) {
                    return Err(Error::domain(format!(
                        "branch continuation path crossed its cut between {} and {} (target {k})",
                        w[0], w[1]
                    )));
                }
            }
            let mut arg = match branch {
                BranchLog::LnS { .. } => 2.0 * PI,
                _ => 0.0,
            };
            for w in pts.windows(2) {
                arg += arg_increment(*s, w[0], w[1], 0)?;
            }
            Ok(C64::new((k - s).norm().ln(), arg))
        }
    }
}
