//! Cauchy-type integrals on unit-circle arcs: the scalar functions
//! `delta_1..delta_5` (directly as Cauchy integrals and through their
//! closed forms), the Stieltjes integrals `chi_1..chi_3` and the regularized
//! `chi_4, chi_5`, the products `D_1`, `D_2`, the diagonal global parametrix,
//! and the phase factors `d~_{1,0}`, `d~_{2,0}`, `z_{1,*}`, `z_{2,*}`.
//!
//! Everything is computed in log space: products of deltas are sums of
//! `ln delta`, so moduli and (unreduced, continuous) arguments come out
//! exactly as assembled.

use crate::branch::{branch_log, BranchLog};
use crate::error::{Error, Result};
use crate::phase::{omega, omega2, saddle_points, SaddleSet};
use crate::quad::integrate_split;
use crate::spectral::SpectralData;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Tolerances used by the arc quadratures.
#[derive(Clone, Copy, Debug)]
pub struct QuadOpts {
    pub tol: f64,
    /// distance below which the Cauchy kernel singularity is subtracted
    pub near_arc: f64,
    pub eps_schedule: [f64; 3],
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts {
            tol: 1e-11,
            near_arc: 0.05,
            eps_schedule: [1e-2, 1e-3, 1e-4],
        }
    }
}

/// The scalar functions whose logarithms are integrated along the arcs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrandKind {
    /// ln(1 + r1 r2)(w^2 s) - the delta_1 integrand
    Log1pRot,
    /// ln(1 + r1 r2)(s)
    Log1p,
    /// ln f(s)
    LogF,
    /// ln f(w^2 s)
    LogFRot,
}

impl IntegrandKind {
    fn value(self, sd: &SpectralData, theta: f64) -> Result<f64> {
        let g = match self {
            IntegrandKind::Log1pRot => sd.one_plus_r1r2_circle(theta - 2.0 * PI / 3.0)?,
            IntegrandKind::Log1p => sd.one_plus_r1r2_circle(theta)?,
            IntegrandKind::LogF => sd.f_circle(theta)?,
            IntegrandKind::LogFRot => sd.f_circle(theta - 2.0 * PI / 3.0)?,
        };
        if g <= 0.0 {
            return Err(Error::domain(format!(
                "log argument {g:.3e} <= 0 at theta = {theta} ({self:?}); inadmissible data"
            )));
        }
        Ok(g.ln())
    }

    /// d/dtheta of ln G.
    fn deriv(self, sd: &SpectralData, theta: f64) -> Result<f64> {
        let (g, dg) = match self {
            IntegrandKind::Log1pRot => {
                let t = theta - 2.0 * PI / 3.0;
                (
                    sd.one_plus_r1r2_circle(t)?,
                    sd.one_plus_r1r2_circle_deriv(t)?,
                )
            }
            IntegrandKind::Log1p => (
                sd.one_plus_r1r2_circle(theta)?,
                sd.one_plus_r1r2_circle_deriv(theta)?,
            ),
            IntegrandKind::LogF => (sd.f_circle(theta)?, sd.f_circle_deriv(theta)?),
            IntegrandKind::LogFRot => {
                let t = theta - 2.0 * PI / 3.0;
                (sd.f_circle(t)?, sd.f_circle_deriv(t)?)
            }
        };
        if g <= 0.0 {
            return Err(Error::domain(format!(
                "log argument {g:.3e} <= 0 at theta = {theta} ({self:?})"
            )));
        }
        Ok(dg / g)
    }
}

/// Arc of one delta/chi pair: the path follows the unit circle
/// counterclockwise from angle `lo` to `hi`.
#[derive(Clone, Copy, Debug)]
pub struct ArcSpec {
    pub lo: f64,
    pub hi: f64,
    pub kind: IntegrandKind,
    pub regularized: bool,
}

/// The exponents nu_1..nu_5 and nu-hat_2 (all real).
#[derive(Clone, Copy, Debug)]
pub struct NuValues {
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
    pub nu4: f64,
    pub nu5: f64,
    pub nu_hat2: f64,
}

/// Saddle geometry at fixed zeta.
#[derive(Clone, Copy, Debug)]
pub struct Saddles {
    pub set: SaddleSet,
    pub wk4: C64,
    pub w2k2: C64,
    /// arg(w k4) in (pi/3, pi/2)
    pub a1: f64,
    /// arg(w^2 k2) in (pi/2, 2pi/3)
    pub beta: f64,
}

impl Saddles {
    pub fn new(zeta: f64) -> Result<Self> {
        let set = saddle_points(zeta)?;
        let wk4 = omega() * set.k4;
        let w2k2 = omega2() * set.k2;
        let a1 = wk4.arg();
        let beta = w2k2.arg();
        if !(a1 > PI / 3.0 && a1 < PI / 2.0) || !(beta > PI / 2.0 && beta < 2.0 * PI / 3.0) {
            return Err(Error::domain("saddle arguments outside expected windows"));
        }
        Ok(Saddles {
            set,
            wk4,
            w2k2,
            a1,
            beta,
        })
    }
}

pub fn nu_values(zeta: f64, sd: &SpectralData) -> Result<(Saddles, NuValues)> {
    let saddles = Saddles::new(zeta)?;
    let ln_arg = |v: f64, what: &str| -> Result<f64> {
        if v <= 0.0 {
            return Err(Error::domain(format!(
                "{what} = {v:.3e} <= 0: inadmissible spectral data"
            )));
        }
        Ok(v.ln())
    };
    let k4 = saddles.set.k4.arg();
    let k2 = saddles.set.k2.arg();
    let nu1 = -ln_arg(sd.one_plus_r1r2_circle(k4)?, "1 + r1 r2 (k4)")? / (2.0 * PI);
    let nu2 = -ln_arg(sd.one_plus_r1r2_circle(saddles.beta)?, "1 + r1 r2 (w^2 k2)")? / (2.0 * PI);
    let nu3 = -ln_arg(sd.f_circle(PI / 2.0)?, "f(i)")? / (2.0 * PI);
    let nu4 = -ln_arg(sd.f_circle(saddles.beta)?, "f(w^2 k2)")? / (2.0 * PI);
    // arg(w k2) wrapped into (-pi/12, 0)
    let mut gamma = k2 + 2.0 * PI / 3.0;
    if gamma > PI {
        gamma -= 2.0 * PI;
    }
    let nu5 = -ln_arg(sd.f_circle(gamma)?, "f(w k2)")? / (2.0 * PI);
    Ok((
        saddles,
        NuValues {
            nu1,
            nu2,
            nu3,
            nu4,
            nu5,
            nu_hat2: nu2 + nu5 - nu4,
        },
    ))
}

/// Which closed-form branch family to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchVariant {
    /// `ln_s` branches, normalized arg_s(1) = 2 pi
    Standard,
    /// `tilde-ln_s` branches, normalized arg~_s(1) = 0 (only j = 2..5)
    Tilde,
}

/// Evaluator for the five delta functions at fixed (zeta, spectral data).
pub struct DeltaCtx<'a> {
    pub zeta: f64,
    pub sd: &'a SpectralData,
    pub saddles: Saddles,
    pub nus: NuValues,
    pub opts: QuadOpts,
}

impl<'a> DeltaCtx<'a> {
    pub fn new(zeta: f64, sd: &'a SpectralData) -> Result<Self> {
        Self::with_opts(zeta, sd, QuadOpts::default())
    }

    pub fn with_opts(zeta: f64, sd: &'a SpectralData, opts: QuadOpts) -> Result<Self> {
        let (saddles, nus) = nu_values(zeta, sd)?;
        Ok(DeltaCtx {
            zeta,
            sd,
            saddles,
            nus,
            opts,
        })
    }

    pub fn arc(&self, j: usize) -> Result<ArcSpec> {
        let s = &self.saddles;
        Ok(match j {
            1 => ArcSpec {
                lo: s.a1,
                hi: PI / 2.0,
                kind: IntegrandKind::Log1pRot,
                regularized: false,
            },
            2 => ArcSpec {
                lo: PI / 2.0,
                hi: s.beta,
                kind: IntegrandKind::Log1p,
                regularized: false,
            },
            3 => ArcSpec {
                lo: PI / 2.0,
                hi: s.beta,
                kind: IntegrandKind::LogF,
                regularized: false,
            },
            // sampled backends cannot evaluate inside the kappa gap at the
            // omega endpoint; the arc (and its regularization endpoint)
            // shrinks accordingly
            4 => ArcSpec {
                lo: s.beta,
                hi: 2.0 * PI / 3.0 - self.sd.circle_gap(),
                kind: IntegrandKind::LogF,
                regularized: true,
            },
            5 => ArcSpec {
                lo: s.beta,
                hi: 2.0 * PI / 3.0 - self.sd.circle_gap(),
                kind: IntegrandKind::LogFRot,
                regularized: true,
            },
            _ => return Err(Error::domain("delta index out of range")),
        })
    }

    // -- direct Cauchy representation ------------------------------------

    /// ln delta_j(k) = (1/2 pi i) int_arc ln G(s) / (s - k) ds.
    pub fn ln_delta_cauchy(&self, j: usize, k: C64) -> Result<C64> {
        let arc = self.arc(j)?;
        let sd = self.sd;
        let dist = arc_distance(arc.lo, arc.hi, k);
        if dist < 1e-9 {
            return Err(Error::NearContour(dist));
        }
        let total = if dist < self.opts.near_arc {
            // subtract  g(s*) * kernel  and integrate the remainder
            let th_star = nearest_arc_angle(arc.lo, arc.hi, k);
            let g_star = arc.kind.value(sd, th_star)?;
            let smooth = |th: f64| -> Result<C64> {
                let s = C64::from_polar(1.0, th);
                let g = arc.kind.value(sd, th)?;
                Ok(C64::new(g - g_star, 0.0) * C64::new(0.0, 1.0) * s / (s - k))
            };
            let rest = integrate_split(smooth, arc.lo, arc.hi, &[th_star], self.opts.tol)?;
            rest + kernel_integral(arc.lo, arc.hi, k)? * g_star
        } else {
            let integrand = |th: f64| -> Result<C64> {
                let s = C64::from_polar(1.0, th);
                let g = arc.kind.value(sd, th)?;
                Ok(C64::new(g, 0.0) * C64::new(0.0, 1.0) * s / (s - k))
            };
            integrate_split(integrand, arc.lo, arc.hi, &[], self.opts.tol)?
        };
        Ok(total / C64::new(0.0, 2.0 * PI))
    }

    pub fn delta_cauchy(&self, j: usize, k: C64) -> Result<C64> {
        Ok(self.ln_delta_cauchy(j, k)?.exp())
    }

    // -- Stieltjes integrals chi -----------------------------------------

    fn branch_at(&self, variant: BranchVariant, s: C64) -> BranchLog {
        match variant {
            BranchVariant::Standard => BranchLog::LnS { s },
            BranchVariant::Tilde => BranchLog::LnTildeS { s },
        }
    }

    /// chi_j(zeta, k) for j = 1, 2, 3: (1/2 pi i) int ln_s(k - s) d ln G(s).
    pub fn chi(&self, j: usize, k: C64, variant: BranchVariant) -> Result<C64> {
        if !(1..=3).contains(&j) {
            return Err(Error::domain("chi index out of range (use chi_reg for 4, 5)"));
        }
        let arc = self.arc(j)?;
        let sd = self.sd;
        let integrand = |th: f64| -> Result<C64> {
            let s = C64::from_polar(1.0, th);
            let lg = branch_log(&self.branch_at(variant, s), k)?;
            let gd = arc.kind.deriv(sd, th)?;
            Ok(lg * gd)
        };
        let anchors = self.anchors(&arc, k);
        let total = integrate_split(integrand, arc.lo, arc.hi, &anchors, self.opts.tol)?;
        Ok(total / C64::new(0.0, 2.0 * PI))
    }

    fn anchors(&self, arc: &ArcSpec, k: C64) -> Vec<f64> {
        if arc_distance(arc.lo, arc.hi, k) < self.opts.near_arc {
            vec![nearest_arc_angle(arc.lo, arc.hi, k)]
        } else {
            Vec::new()
        }
    }

    /// Regularized chi_4 / chi_5 as the exact subtraction-form limit:
    /// (1/2 pi i) [ int (ln_s(k-s) - ln_w(k-w)) d ln G - ln_w(k-w) ln G(lo) ].
    pub fn chi_reg(&self, j: usize, k: C64, variant: BranchVariant) -> Result<C64> {
        if j != 4 && j != 5 {
            return Err(Error::domain("chi_reg only defined for j = 4, 5"));
        }
        let arc = self.arc(j)?;
        let sd = self.sd;
        let lw = branch_log(&self.branch_at(variant, omega()), k)?;
        let integrand = |th: f64| -> Result<C64> {
            let s = C64::from_polar(1.0, th);
            let lg = branch_log(&self.branch_at(variant, s), k)?;
            let gd = arc.kind.deriv(sd, th)?;
            Ok((lg - lw) * gd)
        };
        let anchors = self.anchors(&arc, k);
        let total = integrate_split(integrand, arc.lo, arc.hi, &anchors, self.opts.tol)?;
        let g_lo = arc.kind.value(sd, arc.lo)?;
        Ok((total - lw * g_lo) / C64::new(0.0, 2.0 * PI))
    }

    /// Epsilon-schedule evaluation of the regularized integral with Aitken
    /// extrapolation; returns (value, drift from the subtraction-form limit)
    /// and errors when the extrapolation fails to stabilize.
    pub fn chi_reg_schedule(&self, j: usize, k: C64, variant: BranchVariant) -> Result<(C64, f64)> {
        let arc = self.arc(j)?;
        let sd = self.sd;
        let lw = branch_log(&self.branch_at(variant, omega()), k)?;
        let mut stages = Vec::new();
        for &eps in &self.opts.eps_schedule {
            let hi = arc.hi - eps;
            let integrand = |th: f64| -> Result<C64> {
                let s = C64::from_polar(1.0, th);
                let lg = branch_log(&self.branch_at(variant, s), k)?;
                let gd = arc.kind.deriv(sd, th)?;
                Ok(lg * gd)
            };
            let anchors = self.anchors(&arc, k);
            let total = integrate_split(integrand, arc.lo, hi, &anchors, self.opts.tol)?;
            let g_hi = arc.kind.value(sd, hi)?;
            stages.push((total - lw * g_hi) / C64::new(0.0, 2.0 * PI));
        }
        // Aitken delta-squared
        let (r1, r2, r3) = (stages[0], stages[1], stages[2]);
        let d1 = r2 - r1;
        let d2 = r3 - r2;
        let denom = d2 - d1;
        let extrapolated = if denom.norm() > 1e-300 {
            r3 - d2 * d2 / denom
        } else {
            r3
        };
        let exact = self.chi_reg(j, k, variant)?;
        let drift = (extrapolated - exact).norm() / (1.0 + exact.norm());
        if drift > 1e-3 {
            return Err(Error::Regularization(drift));
        }
        Ok((extrapolated, drift))
    }

    // -- closed forms ------------------------------------------------------

    /// ln delta_j via the closed forms.
    pub fn ln_delta_closed(&self, j: usize, k: C64, variant: BranchVariant) -> Result<C64> {
        let n = &self.nus;
        let s = &self.saddles;
        let i = C64::new(0.0, 1.0);
        let lg = |anchor: C64| -> Result<C64> { branch_log(&self.branch_at(variant, anchor), k) };
        Ok(match j {
            1 => {
                if variant == BranchVariant::Tilde {
                    return Err(Error::domain("delta_1 has no tilde-branch closed form"));
                }
                -i * n.nu1 * lg(s.wk4)? + i * n.nu3 * lg(C64::new(0.0, 1.0))?
                    - self.chi(1, k, variant)?
            }
            2 => i * n.nu2 * lg(s.w2k2)? - self.chi(2, k, variant)?,
            3 => {
                -i * n.nu3 * lg(C64::new(0.0, 1.0))? + i * n.nu4 * lg(s.w2k2)?
                    - self.chi(3, k, variant)?
            }
            4 => -i * n.nu4 * lg(s.w2k2)? - self.chi_reg(4, k, variant)?,
            5 => -i * n.nu5 * lg(s.w2k2)? - self.chi_reg(5, k, variant)?,
            _ => return Err(Error::domain("delta index out of range")),
        })
    }

    /// delta_j by the default route (closed form, standard branches).
    pub fn delta(&self, j: usize, k: C64) -> Result<C64> {
        Ok(self.ln_delta_closed(j, k, BranchVariant::Standard)?.exp())
    }

    // -- products ----------------------------------------------------------

    pub fn ln_d1_product(&self, k: C64) -> Result<C64> {
        self.ln_product(k, d1_exponents())
    }

    pub fn ln_d2_product(&self, k: C64) -> Result<C64> {
        self.ln_product(k, d2_exponents())
    }

    pub fn ln_delta33(&self, k: C64) -> Result<C64> {
        self.ln_product(k, delta33_exponents())
    }

    /// The diagonal global parametrix (Delta_11, Delta_22, Delta_33) with
    /// Delta_11(k) = Delta_33(w k) and Delta_22(k) = Delta_33(w^2 k).
    pub fn delta_diag(&self, k: C64) -> Result<(C64, C64, C64)> {
        let d33 = self.ln_delta33(k)?.exp();
        let d11 = self.ln_delta33(omega() * k)?.exp();
        let d22 = self.ln_delta33(omega2() * k)?.exp();
        Ok((d11, d22, d33))
    }

    fn ln_product(&self, k: C64, table: &[(usize, Rot, i32)]) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for &(j, rot, power) in table {
            let arg = rot.apply(k);
            acc += self.ln_delta_closed(j, arg, BranchVariant::Standard)? * power as f64;
        }
        Ok(acc)
    }
}

/// Rotation/inversion of the evaluation argument; computed exactly from k.
#[derive(Clone, Copy, Debug)]
pub enum Rot {
    K,
    WK,
    W2K,
    InvK,
    InvWK,
    InvW2K,
}

impl Rot {
    pub fn apply(self, k: C64) -> C64 {
        match self {
            Rot::K => k,
            Rot::WK => omega() * k,
            Rot::W2K => omega2() * k,
            Rot::InvK => 1.0 / k,
            Rot::InvWK => 1.0 / (omega() * k),
            Rot::InvW2K => 1.0 / (omega2() * k),
        }
    }
}

/// D_1 exponent table: (delta index, argument, power).
pub fn d1_exponents() -> &'static [(usize, Rot, i32)] {
    &[
        (1, Rot::W2K, 1),
        (1, Rot::InvWK, 2),
        (1, Rot::WK, 1),
        (1, Rot::InvK, -1),
        (1, Rot::InvW2K, -1),
        (2, Rot::K, 1),
        (2, Rot::W2K, 1),
        (2, Rot::InvK, 2),
        (2, Rot::WK, -2),
        (2, Rot::InvW2K, -1),
        (2, Rot::InvWK, -1),
        (3, Rot::WK, 1),
        (3, Rot::W2K, 1),
        (3, Rot::InvWK, 2),
        (3, Rot::K, -2),
        (3, Rot::InvK, -1),
        (3, Rot::InvW2K, -1),
        (4, Rot::W2K, 2),
        (4, Rot::InvK, 1),
        (4, Rot::InvWK, 1),
        (4, Rot::K, -1),
        (4, Rot::WK, -1),
        (4, Rot::InvW2K, -2),
        (5, Rot::WK, 2),
        (5, Rot::InvWK, 1),
        (5, Rot::InvW2K, 1),
        (5, Rot::K, -1),
        (5, Rot::InvK, -2),
        (5, Rot::W2K, -1),
    ]
}

/// D_2 exponent table.
pub fn d2_exponents() -> &'static [(usize, Rot, i32)] {
    &[
        (1, Rot::W2K, 2),
        (1, Rot::InvWK, 1),
        (1, Rot::InvW2K, 1),
        (1, Rot::K, -1),
        (1, Rot::InvK, -2),
        (1, Rot::WK, -1),
        (2, Rot::InvK, 1),
        (2, Rot::InvWK, 1),
        (2, Rot::WK, -1),
        (2, Rot::InvW2K, -2),
        (2, Rot::W2K, -1),
        (3, Rot::W2K, 2),
        (3, Rot::InvWK, 1),
        (3, Rot::InvW2K, 1),
        (3, Rot::InvK, -2),
        (3, Rot::WK, -1),
        (4, Rot::W2K, 1),
        (4, Rot::InvWK, 2),
        (4, Rot::WK, -2),
        (4, Rot::InvW2K, -1),
        (4, Rot::InvK, -1),
        (5, Rot::WK, 1),
        (5, Rot::InvW2K, 2),
        (5, Rot::W2K, 1),
        (5, Rot::InvK, -1),
        (5, Rot::InvWK, -1),
    ]
}

/// Delta_33 exponent table.
pub fn delta33_exponents() -> &'static [(usize, Rot, i32)] {
    &[
        (1, Rot::W2K, 1),
        (1, Rot::InvWK, 1),
        (1, Rot::K, -1),
        (1, Rot::InvK, -1),
        (2, Rot::K, 1),
        (2, Rot::InvK, 1),
        (2, Rot::WK, -1),
        (2, Rot::InvW2K, -1),
        (3, Rot::W2K, 1),
        (3, Rot::InvWK, 1),
        (3, Rot::K, -1),
        (3, Rot::InvK, -1),
        (4, Rot::W2K, 1),
        (4, Rot::InvWK, 1),
        (4, Rot::WK, -1),
        (4, Rot::InvW2K, -1),
        (5, Rot::WK, 1),
        (5, Rot::InvW2K, 1),
        (5, Rot::K, -1),
        (5, Rot::InvK, -1),
    ]
}

// ---------------------------------------------------------------------------
// geometry helpers
// ---------------------------------------------------------------------------

/// Distance from k to the circle arc between angles lo and hi.
pub fn arc_distance(lo: f64, hi: f64, k: C64) -> f64 {
    let th = k.arg();
    if th >= lo && th <= hi {
        (k.norm() - 1.0).abs()
    } else {
        let da = (k - C64::from_polar(1.0, lo)).norm();
        let db = (k - C64::from_polar(1.0, hi)).norm();
        da.min(db)
    }
}

fn nearest_arc_angle(lo: f64, hi: f64, k: C64) -> f64 {
    k.arg().clamp(lo, hi)
}

/// int_arc ds / (s - k) with a continuous branch along the arc.
pub fn kernel_integral(lo: f64, hi: f64, k: C64) -> Result<C64> {
    fn segment(k: C64, a: f64, b: f64, depth: usize) -> Result<C64> {
        let sa = C64::from_polar(1.0, a);
        let sb = C64::from_polar(1.0, b);
        let ratio = (sb - k) / (sa - k);
        if (ratio - 1.0).norm() < 0.5 {
            return Ok(ratio.ln());
        }
        if depth > 70 {
            return Err(Error::NearContour((sa - k).norm().min((sb - k).norm())));
        }
        let m = 0.5 * (a + b);
        Ok(segment(k, a, m, depth + 1)? + segment(k, m, b, depth + 1)?)
    }
    segment(k, lo, hi, 0)
}

// ---------------------------------------------------------------------------
// phase factors
// ---------------------------------------------------------------------------

/// z_{1,*} and z_{2,*} with branch arguments pinned to pi/2 - arg(saddle).
#[derive(Clone, Copy, Debug)]
pub struct ZStars {
    pub z1: C64,
    pub z2: C64,
    /// ln z_{j,*} with the declared argument (not principal)
    pub ln_z1: C64,
    pub ln_z2: C64,
}

pub fn z_stars(saddles: &Saddles) -> Result<ZStars> {
    let zeta = saddles.set.zeta;
    let k4 = saddles.set.k4;
    let k2 = saddles.set.k2;
    let phi1 = omega() * (4.0 - 3.0 * k4 * zeta - k4 * k4 * k4 * zeta) / (4.0 * k4.powi(4));
    let phi2 = -omega2() * (4.0 - 3.0 * k2 * zeta - k2 * k2 * k2 * zeta) / (4.0 * k2.powi(4));
    let fix = |phi: C64, rot: C64, name: &str, want_arg: f64| -> Result<(C64, C64)> {
        let mut z = 2.0f64.sqrt() * C64::from_polar(1.0, PI / 4.0) * phi.sqrt();
        if (-C64::new(0.0, 1.0) * rot * z).re < 0.0 {
            z = -z;
        }
        let cond = -C64::new(0.0, 1.0) * rot * z;
        if cond.re <= 0.0 || cond.im.abs() > 1e-9 * cond.re.abs() {
            return Err(Error::SignCondition(format!(
                "{name}: -i rot z = {cond} not positive real"
            )));
        }
        // declared branch: arg z = pi/2 - arg(rot)
        if (z.arg() - want_arg).abs() > 1e-9 {
            return Err(Error::SignCondition(format!(
                "{name}: arg z = {} but branch requires {want_arg}",
                z.arg()
            )));
        }
        let ln_z = C64::new(z.norm().ln(), want_arg);
        Ok((z, ln_z))
    };
    let (z1, ln_z1) = fix(phi1, saddles.wk4, "z1_star", PI / 2.0 - saddles.a1)?;
    let (z2, ln_z2) = fix(phi2, saddles.w2k2, "z2_star", PI / 2.0 - saddles.beta)?;
    Ok(ZStars {
        z1,
        z2,
        ln_z1,
        ln_z2,
    })
}

/// The bundle of parametrix scalars at fixed (zeta, t).
#[derive(Clone, Debug)]
pub struct ParametrixBundle {
    pub zeta: f64,
    pub t: f64,
    pub nus: NuValues,
    pub saddles: Saddles,
    pub z: ZStars,
    /// ln d~_{1,0} with continuous (unreduced) imaginary part
    pub ln_d10: C64,
    pub ln_d20: C64,
}

impl ParametrixBundle {
    pub fn build(zeta: f64, t: f64, sd: &SpectralData) -> Result<Self> {
        if t < 2.0 {
            return Err(Error::domain("bundle requires t >= 2"));
        }
        let ctx = DeltaCtx::new(zeta, sd)?;
        let saddles = ctx.saddles;
        let nus = ctx.nus;
        let z = z_stars(&saddles)?;
        let i = C64::new(0.0, 1.0);
        let ln_i_branch =
            |k: C64| branch_log(&BranchLog::LnS { s: C64::new(0.0, 1.0) }, k);

        // ln d~_{1,0} = -4 pi nu1 + 2 chi_1(w k4) - 2 i nu3 ln_i(w k4 - i)
        //              - i nu1 ln t - 2 i nu1 ln z1* + ln D_1(w k4)
        let chi1 = ctx.chi(1, saddles.wk4, BranchVariant::Standard)?;
        let ln_d10 = C64::new(-4.0 * PI * nus.nu1, 0.0) + chi1 * 2.0
            - i * (2.0 * nus.nu3) * ln_i_branch(saddles.wk4)?
            - i * nus.nu1 * t.ln()
            - i * (2.0 * nus.nu1) * z.ln_z1
            + ctx.ln_d1_product(saddles.wk4)?;

        // ln d~_{2,0} = -2 chi_2 + chi_3 - chi~_4 + 2 chi~_5 (all at w^2 k2)
        //              + i nu3 ln_i(w^2 k2 - i) + i (nu4 - nu5 - nu2) ln t
        //              + 2 i (nu4 - nu5 - nu2) ln z2* + ln D_2(w^2 k2)
        let kk = saddles.w2k2;
        let chi2 = ctx.chi(2, kk, BranchVariant::Standard)?;
        let chi3 = ctx.chi(3, kk, BranchVariant::Standard)?;
        let chi4t = ctx.chi_reg(4, kk, BranchVariant::Tilde)?;
        let chi5t = ctx.chi_reg(5, kk, BranchVariant::Tilde)?;
        let e2 = nus.nu4 - nus.nu5 - nus.nu2;
        let ln_d20 = -chi2 * 2.0 + chi3 - chi4t + chi5t * 2.0
            + i * nus.nu3 * ln_i_branch(kk)?
            + i * e2 * t.ln()
            + i * (2.0 * e2) * z.ln_z2
            + ctx.ln_d2_product(kk)?;

        Ok(ParametrixBundle {
            zeta,
            t,
            nus,
            saddles,
            z,
            ln_d10,
            ln_d20,
        })
    }

    /// Rebundle at a different time: only the t^{-i nu}-type factors move,
    /// so no quadrature is redone.
    pub fn at_time(&self, t: f64) -> Result<Self> {
        if t < 2.0 {
            return Err(Error::domain("bundle requires t >= 2"));
        }
        let i = C64::new(0.0, 1.0);
        let ratio = (t / self.t).ln();
        let mut b = self.clone();
        b.t = t;
        b.ln_d10 -= i * self.nus.nu1 * ratio;
        b.ln_d20 += i * (self.nus.nu4 - self.nus.nu5 - self.nus.nu2) * ratio;
        Ok(b)
    }

    pub fn d10(&self) -> C64 {
        self.ln_d10.exp()
    }

    pub fn d20(&self) -> C64 {
        self.ln_d20.exp()
    }

    /// (|d~_{1,0}|, |d~_{2,0}|); the first should be 1, the second
    /// e^{pi (2 nu2 - nu4)}.
    pub fn moduli(&self) -> (f64, f64) {
        (self.ln_d10.re.exp(), self.ln_d20.re.exp())
    }

    pub fn arg_d10(&self) -> f64 {
        self.ln_d10.im
    }

    pub fn arg_d20(&self) -> f64 {
        self.ln_d20.im
    }

    /// All scalar fields as JSON, for regression snapshots.
    pub fn dump(&self) -> serde_json::Value {
        let c = |z: C64| serde_json::json!([z.re, z.im]);
        serde_json::json!({
            "zeta": self.zeta,
            "t": self.t,
            "nu1": self.nus.nu1,
            "nu2": self.nus.nu2,
            "nu3": self.nus.nu3,
            "nu4": self.nus.nu4,
            "nu5": self.nus.nu5,
            "nu_hat2": self.nus.nu_hat2,
            "k2": c(self.saddles.set.k2),
            "k4": c(self.saddles.set.k4),
            "z1_star": c(self.z.z1),
            "z2_star": c(self.z.z2),
            "ln_d10": c(self.ln_d10),
            "ln_d20": c(self.ln_d20),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_with<'a>(zeta: f64, sd: &'a SpectralData) -> DeltaCtx<'a> {
        DeltaCtx::new(zeta, sd).unwrap()
    }

    #[test]
    fn zero_data_gives_trivial_deltas_and_nus() {
        let sd = SpectralData::zero();
        let ctx = ctx_with(0.3, &sd);
        let n = ctx.nus;
        for v in [n.nu1, n.nu2, n.nu3, n.nu4, n.nu5, n.nu_hat2] {
            assert_eq!(v, 0.0);
        }
        let k = C64::new(0.3, 0.9);
        for j in 1..=5 {
            let d = ctx.delta(j, k).unwrap();
            assert!((d - C64::new(1.0, 0.0)).norm() < 1e-12, "delta_{j} = {d}");
            let dc = ctx.delta_cauchy(j, k).unwrap();
            assert!((dc - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // chi all vanish
        assert!(ctx.chi(1, k, BranchVariant::Standard).unwrap().norm() < 1e-14);
        assert!(ctx.chi_reg(4, k, BranchVariant::Tilde).unwrap().norm() < 1e-14);
    }

    #[test]
    fn nu3_consistency_between_f_and_one_plus() {
        // f(i) = 1 + r1(w^2 i) r2(w^2 i) for data with r1(i) = 0
        let sd = SpectralData::synthetic(5);
        let f_i = sd.f_circle(PI / 2.0).unwrap();
        let alt = sd.one_plus_r1r2_circle(PI / 2.0 - 2.0 * PI / 3.0).unwrap();
        assert!(
            (f_i - alt).abs() < 1e-10,
            "f(i) = {f_i} vs 1 + r1 r2(w^2 i) = {alt}"
        );
    }

    #[test]
    fn nu_positivity_on_grid() {
        let sd = SpectralData::synthetic(5);
        for i in 0..50 {
            let zeta = 0.18 + (0.52 - 0.18) * i as f64 / 49.0;
            let (_, n) = nu_values(zeta, &sd).unwrap();
            assert!(n.nu1 >= 0.0, "nu1 = {} at zeta = {zeta}", n.nu1);
            assert!(n.nu_hat2 >= 0.0, "nu_hat2 = {} at zeta = {zeta}", n.nu_hat2);
        }
    }

    #[test]
    fn delta_decay_at_infinity() {
        // |delta_1(zeta, k) - 1| = O(1/k) along a ray
        let sd = SpectralData::synthetic(5);
        let ctx = ctx_with(0.3, &sd);
        let k1 = C64::from_polar(1e3, 0.3);
        let d = ctx.delta(1, k1).unwrap();
        assert!((d - C64::new(1.0, 0.0)).norm() < 1e-2, "delta_1 = {d}");
        // log-log slope about -1
        let k2 = C64::from_polar(1e4, 0.3);
        let d2 = ctx.delta(1, k2).unwrap();
        let slope = ((d2 - C64::new(1.0, 0.0)).norm() / (d - C64::new(1.0, 0.0)).norm()).log10();
        assert!((slope + 1.0).abs() < 0.05, "slope = {slope}");
    }

    #[test]
    fn dual_representation_of_delta2() {
        let sd = SpectralData::synthetic(5);
        let ctx = ctx_with(0.35, &sd);
        for &k in &[
            C64::new(0.4, 0.6),
            C64::new(-0.8, 0.9),
            C64::from_polar(1.45, 1.9),
            C64::from_polar(0.55, 2.3),
        ] {
            let a = ctx.delta_cauchy(2, k).unwrap();
            let b = ctx.delta(2, k).unwrap();
            assert!(
                (a - b).norm() < 1e-7,
                "delta_2 at {k}: cauchy {a} vs closed {b}"
            );
        }
    }

    #[test]
    fn delta1_jump_relation() {
        // delta_{1,+}/delta_{1,-} = 1 + r1 r2 (w^2 k) across the arc
        let sd = SpectralData::synthetic(5);
        let ctx = ctx_with(0.35, &sd);
        let arc = ctx.arc(1).unwrap();
        let th = 0.5 * (arc.lo + arc.hi);
        let k = C64::from_polar(1.0, th);
        let plus = ctx.delta(1, k * (1.0 - 1e-7)).unwrap();
        let minus = ctx.delta(1, k * (1.0 + 1e-7)).unwrap();
        let expect = sd.one_plus_r1r2_circle(th - 2.0 * PI / 3.0).unwrap();
        let ratio = plus / minus;
        assert!(
            (ratio - C64::new(expect, 0.0)).norm() < 1e-6,
            "ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn bundle_dump_has_all_scalars() {
        let sd = SpectralData::synthetic(5);
        let b = ParametrixBundle::build(0.35, 10.0, &sd).unwrap();
        let d = b.dump();
        for key in ["zeta", "t", "nu1", "nu_hat2", "z1_star", "z2_star", "ln_d10", "ln_d20"] {
            assert!(d.get(key).is_some(), "missing {key}");
        }
        let s1 = serde_json::to_string(&d).unwrap();
        let s2 = serde_json::to_string(&b.dump()).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn d10_modulus_is_one() {
        let sd = SpectralData::synthetic(5);
        let b = ParametrixBundle::build(0.35, 10.0, &sd).unwrap();
        let (m1, m2) = b.moduli();
        assert!((m1 - 1.0).abs() < 1e-8, "|d10| = {m1}");
        let expect = (PI * (2.0 * b.nus.nu2 - b.nus.nu4)).exp();
        assert!(
            (m2 - expect).abs() < 1e-6 * expect.max(1.0),
            "|d20| = {m2} vs {expect}"
        );
    }
}

#[cfg(test)]
mod regularization_tests {
    use super::*;
    use crate::branch::{branch_log, BranchLog};
    use crate::quad::integrate_split;

    /// Regularized endpoint-singular arc integral for a toy profile with a
    /// known simple zero at omega, checked against an independent
    /// integration-by-parts oracle and for the epsilon-schedule convergence
    /// order.
    #[test]
    fn regularized_integral_toy_f_oracle_and_schedule_order() {
        // f_toy(theta) = 2 sin((2pi/3 - theta)/2): positive on the arc,
        // simple zero at omega
        let f_toy = |th: f64| 2.0 * ((2.0 * PI / 3.0 - th) / 2.0).sin();
        let dlnf = |th: f64| -0.5 * ((2.0 * PI / 3.0 - th) / 2.0).tan().recip();
        let lo = 0.58 * PI;
        let hi = 2.0 * PI / 3.0;
        let k = C64::new(0.2, 0.65);
        let ln_at = |th: f64| branch_log(&BranchLog::LnTildeS { s: C64::from_polar(1.0, th) }, k);
        let lw = ln_at(hi).unwrap();

        // subtraction form (the production formula)
        let sub = integrate_split(
            |th| Ok((ln_at(th)? - lw) * dlnf(th)),
            lo,
            hi,
            &[],
            1e-12,
        )
        .unwrap()
            - lw * f_toy(lo).ln();

        // independent oracle: integrate by parts the other way round,
        //   R = -L(lo) ln f(lo) - int L'(theta) ln f(theta) dtheta,
        // with L' = d/dtheta ln(k - e^{i theta}) in closed form and the
        // boundary term at omega vanishing like eps ln eps
        let oracle = -ln_at(lo).unwrap() * f_toy(lo).ln()
            - integrate_split(
                |th| {
                    let s = C64::from_polar(1.0, th);
                    Ok(-C64::new(0.0, 1.0) * s / (k - s) * f_toy(th).ln())
                },
                lo,
                hi,
                &[],
                1e-12,
            )
            .unwrap();
        assert!(
            (sub - oracle).norm() < 1e-9,
            "subtraction form {sub} vs IBP oracle {oracle}"
        );

        // epsilon schedule: I(eps) converges with observed order >= 1
        let i_at = |eps: f64| -> C64 {
            integrate_split(|th| Ok(ln_at(th)? * dlnf(th)), lo, hi - eps, &[], 1e-12).unwrap()
                - lw * f_toy(hi - eps).ln()
        };
        let e1 = (i_at(1e-2) - sub).norm();
        let e2 = (i_at(1e-3) - sub).norm();
        let e3 = (i_at(1e-4) - sub).norm();
        let order12 = (e1 / e2).log10();
        let order23 = (e2 / e3).log10();
        assert!(
            order12 >= 1.0 && order23 >= 1.0,
            "schedule convergence orders {order12:.2}, {order23:.2} (errors {e1:.2e}, {e2:.2e}, {e3:.2e})"
        );
    }

    /// Lipschitz-log modulus of chi_1 toward the saddle point along a
    /// non-tangential ray: |chi_1(k) - chi_1(w k4)| <= C |k - w k4| (1 + |ln|k - w k4||).
    #[test]
    fn chi1_lipschitz_log_modulus_at_saddle() {
        let sd = SpectralData::synthetic(5);
        let ctx = DeltaCtx::new(0.35, &sd).unwrap();
        let anchor = ctx.saddles.wk4;
        let at_anchor = ctx.chi(1, anchor, BranchVariant::Standard).unwrap();
        let dir = anchor / anchor.norm() * C64::from_polar(1.0, 0.3); // non-tangential
        let mut ratios = Vec::new();
        for j in 0..6 {
            let d = 1e-2 * 0.5f64.powi(j);
            let k = anchor + dir * d;
            let v = ctx.chi(1, k, BranchVariant::Standard).unwrap();
            let bound = d * (1.0 + d.ln().abs());
            ratios.push((v - at_anchor).norm() / bound);
        }
        let c = ratios.iter().cloned().fold(0.0f64, f64::max);
        assert!(c.is_finite() && c < 10.0, "modulus constant {c}, ratios {ratios:?}");
        // and the ratios stay bounded (no faster blow-up than the modulus)
        assert!(ratios.last().unwrap() < &(2.0 * ratios[0] + 1.0));
    }
}

#[cfg(test)]
mod product_oracle_tests {
    use super::*;

    /// End-to-end oracle for the product machinery: D_1(w k4) assembled from
    /// closed-form deltas must equal the product of the independent direct
    /// Cauchy evaluations (exponential level, so branch offsets cannot hide).
    #[test]
    fn d1_product_matches_direct_cauchy_route() {
        let sd = SpectralData::synthetic(5);
        let ctx = DeltaCtx::new(0.35, &sd).unwrap();
        let k = ctx.saddles.wk4;
        let closed = ctx.ln_d1_product(k).unwrap().exp();
        let mut direct = C64::new(1.0, 0.0);
        for &(j, rot, power) in d1_exponents() {
            let v = ctx.delta_cauchy(j, rot.apply(k)).unwrap();
            direct *= v.powi(power);
        }
        assert!(
            (closed - direct).norm() < 1e-6 * direct.norm(),
            "closed {closed} vs direct {direct}"
        );
    }

    /// Delta_11(k) = Delta_22(1/k): the inversion symmetry of the diagonal
    /// parametrix through independently assembled products.
    #[test]
    fn delta_diag_inversion_symmetry() {
        let sd = SpectralData::synthetic(5);
        let ctx = DeltaCtx::new(0.35, &sd).unwrap();
        let k = C64::new(0.52, 0.31);
        let (d11, d22, d33) = ctx.delta_diag(k).unwrap();
        let (e11, e22, e33) = ctx.delta_diag(1.0 / k).unwrap();
        assert!((d11 - e22).norm() < 1e-9, "Delta11(k) vs Delta22(1/k)");
        assert!((d22 - e11).norm() < 1e-9);
        assert!((d33 - e33).norm() < 1e-9);
    }

    /// Direct Cauchy evaluation raises NearContour when the point sits on
    /// the open arc itself.
    #[test]
    fn cauchy_route_rejects_on_arc_points() {
        let sd = SpectralData::synthetic(5);
        let ctx = DeltaCtx::new(0.35, &sd).unwrap();
        let arc = ctx.arc(2).unwrap();
        let k = C64::from_polar(1.0, 0.5 * (arc.lo + arc.hi));
        assert!(matches!(
            ctx.ln_delta_cauchy(2, k),
            Err(crate::error::Error::NearContour(_))
        ));
    }

    /// The whole parametrix pipeline also runs on the sampled (cache/spline)
    /// backend; the modulus identities then hold to spline accuracy.
    #[test]
    fn sampled_backend_modulus_identities() {
        let synthetic = SpectralData::synthetic(5);
        let records = synthetic.to_cache_records().unwrap();
        let sampled = SpectralData::from_cache_records(&records).unwrap();
        let b = ParametrixBundle::build(0.35, 10.0, &sampled).unwrap();
        let (m1, m2) = b.moduli();
        assert!((m1 - 1.0).abs() < 1e-5, "|d10| = {m1} on sampled backend");
        let expect = (std::f64::consts::PI * (2.0 * b.nus.nu2 - b.nus.nu4)).exp();
        assert!(
            (m2 - expect).abs() < 1e-5 * expect.max(1.0),
            "|d20| = {m2} vs {expect} on sampled backend"
        );
    }
}
