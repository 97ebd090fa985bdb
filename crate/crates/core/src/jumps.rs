//! Jump matrices of the row-vector Riemann-Hilbert problem: the templates on
//! the original contour, the cyclic/inversion symmetries, and the four lens
//! factorizations of the circle jumps (exact spectral functions, remainders
//! zero).

use crate::error::{Error, Result};
use crate::mat3::{mat_a, mat_b, M3};
use crate::phase::{omega, omega2, saddle_points, theta, PhaseId};
use crate::spectral::SpectralData;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionLabel {
    V1P,
    V1PP,
    V2P,
    V2PP,
    V3P,
    V3PP,
    V4P,
    V4PP,
    V5P,
    V5PP,
    V6P,
    V6PP,
    V7,
    V8,
    V9,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::V1P => "v1'",
            RegionLabel::V1PP => "v1''",
            RegionLabel::V2P => "v2'",
            RegionLabel::V2PP => "v2''",
            RegionLabel::V3P => "v3'",
            RegionLabel::V3PP => "v3''",
            RegionLabel::V4P => "v4'",
            RegionLabel::V4PP => "v4''",
            RegionLabel::V5P => "v5'",
            RegionLabel::V5PP => "v5''",
            RegionLabel::V6P => "v6'",
            RegionLabel::V6PP => "v6''",
            RegionLabel::V7 => "v7",
            RegionLabel::V8 => "v8",
            RegionLabel::V9 => "v9",
        }
    }
}

const ANGLE_TOL: f64 = 1e-8;

/// Classify a point of the original contour Gamma.
pub fn region_of(k: C64) -> Option<RegionLabel> {
    let r = k.norm();
    let ang = k.arg();
    if (r - 1.0).abs() <= crate::UNIT_CIRCLE_TOL {
        let in_window = |lo: f64, hi: f64| ang > lo + ANGLE_TOL && ang < hi - ANGLE_TOL;
        // Gamma_7: arcs centered at 120 and -60 degrees
        if in_window(PI / 2.0, 5.0 * PI / 6.0) || in_window(-PI / 2.0, -PI / 6.0) {
            return Some(RegionLabel::V7);
        }
        // Gamma_8: arcs centered at 0 and 180 degrees
        if in_window(-PI / 6.0, PI / 6.0)
            || !(-5.0 * PI / 6.0 - ANGLE_TOL..=5.0 * PI / 6.0 + ANGLE_TOL).contains(&ang)
        {
            return Some(RegionLabel::V8);
        }
        // Gamma_9: arcs centered at 60 and -120 degrees
        if in_window(PI / 6.0, PI / 2.0) || in_window(-5.0 * PI / 6.0, -PI / 2.0) {
            return Some(RegionLabel::V9);
        }
        return None;
    }
    let near = |a: f64| (ang - a).abs() <= ANGLE_TOL;
    let out = r > 1.0;
    if near(PI / 2.0) {
        return Some(if out { RegionLabel::V4P } else { RegionLabel::V1PP });
    }
    if near(-PI / 2.0) {
        return Some(if out { RegionLabel::V1P } else { RegionLabel::V4PP });
    }
    if near(-PI / 6.0) {
        return Some(if out { RegionLabel::V2P } else { RegionLabel::V5PP });
    }
    if near(5.0 * PI / 6.0) {
        return Some(if out { RegionLabel::V5P } else { RegionLabel::V2PP });
    }
    if near(PI / 6.0) {
        return Some(if out { RegionLabel::V3P } else { RegionLabel::V6PP });
    }
    if near(-5.0 * PI / 6.0) {
        return Some(if out { RegionLabel::V6P } else { RegionLabel::V3PP });
    }
    None
}

struct Ctx<'a> {
    x: f64,
    t: f64,
    k: C64,
    sd: &'a SpectralData,
}

impl Ctx<'_> {
    fn e_theta(&self, id: PhaseId, sign: f64) -> Result<C64> {
        let th = theta(id, self.x, self.t, self.k)?;
        Ok((th * sign).exp())
    }
    fn r1(&self, arg: C64) -> Result<C64> {
        self.sd.r1(arg)
    }
    fn r2(&self, arg: C64) -> Result<C64> {
        self.sd.r2(arg)
    }
    fn f(&self, arg: C64) -> Result<C64> {
        self.sd.f_at(arg)
    }
    fn one_plus(&self, arg: C64) -> Result<C64> {
        Ok(C64::new(1.0, 0.0) + self.r1(arg)? * self.r2(arg)?)
    }
}

/// Jump matrix v(x, t, k) for k in the named region of Gamma.
pub fn jump(region: RegionLabel, x: f64, t: f64, k: C64, sd: &SpectralData) -> Result<M3> {
    if region_of(k) != Some(region) {
        let dist = (k.norm() - 1.0).abs();
        return Err(Error::RegionMismatch {
            region: region.name().to_string(),
            k,
            dist,
        });
    }
    jump_unchecked(region, x, t, k, sd)
}

pub fn jump_unchecked(
    region: RegionLabel,
    x: f64,
    t: f64,
    k: C64,
    sd: &SpectralData,
) -> Result<M3> {
    let c = Ctx { x, t, k, sd };
    let w = omega();
    let w2 = omega2();
    use PhaseId::*;
    let m = match region {
        RegionLabel::V1P => M3::elementary(0, 1, -c.r1(k)? * c.e_theta(P21, -1.0)?),
        RegionLabel::V1PP => M3::elementary(1, 0, c.r1(1.0 / k)? * c.e_theta(P21, 1.0)?),
        RegionLabel::V2P => M3::elementary(1, 2, -c.r2(1.0 / (w * k))? * c.e_theta(P32, -1.0)?),
        RegionLabel::V2PP => M3::elementary(2, 1, c.r2(w * k)? * c.e_theta(P32, 1.0)?),
        RegionLabel::V3P => M3::elementary(2, 0, -c.r1(w2 * k)? * c.e_theta(P31, 1.0)?),
        RegionLabel::V3PP => M3::elementary(0, 2, c.r1(1.0 / (w2 * k))? * c.e_theta(P31, -1.0)?),
        RegionLabel::V4P => M3::elementary(0, 1, -c.r2(1.0 / k)? * c.e_theta(P21, -1.0)?),
        RegionLabel::V4PP => M3::elementary(1, 0, c.r2(k)? * c.e_theta(P21, 1.0)?),
        RegionLabel::V5P => M3::elementary(1, 2, -c.r1(w * k)? * c.e_theta(P32, -1.0)?),
        RegionLabel::V5PP => M3::elementary(2, 1, c.r1(1.0 / (w * k))? * c.e_theta(P32, 1.0)?),
        RegionLabel::V6P => M3::elementary(2, 0, -c.r2(1.0 / (w2 * k))? * c.e_theta(P31, 1.0)?),
        RegionLabel::V6PP => M3::elementary(0, 2, c.r2(w2 * k)? * c.e_theta(P31, -1.0)?),
        RegionLabel::V7 => {
            let mut m = M3::zero();
            m.0[0][0] = C64::new(1.0, 0.0);
            m.0[0][1] = -c.r1(k)? * c.e_theta(P21, -1.0)?;
            m.0[0][2] = c.r2(w2 * k)? * c.e_theta(P31, -1.0)?;
            m.0[1][0] = -c.r2(k)? * c.e_theta(P21, 1.0)?;
            m.0[1][1] = c.one_plus(k)?;
            m.0[1][2] =
                (c.r2(1.0 / (w * k))? - c.r2(k)? * c.r2(w2 * k)?) * c.e_theta(P32, -1.0)?;
            m.0[2][0] = c.r1(w2 * k)? * c.e_theta(P31, 1.0)?;
            m.0[2][1] =
                (c.r1(1.0 / (w * k))? - c.r1(k)? * c.r1(w2 * k)?) * c.e_theta(P32, 1.0)?;
            m.0[2][2] = c.f(w2 * k)?;
            m
        }
        RegionLabel::V8 => {
            let mut m = M3::zero();
            m.0[0][0] = c.f(k)?;
            m.0[0][1] = c.r1(k)? * c.e_theta(P21, -1.0)?;
            m.0[0][2] =
                (c.r1(1.0 / (w2 * k))? - c.r1(k)? * c.r1(w * k)?) * c.e_theta(P31, -1.0)?;
            m.0[1][0] = c.r2(k)? * c.e_theta(P21, 1.0)?;
            m.0[1][1] = C64::new(1.0, 0.0);
            m.0[1][2] = -c.r1(w * k)? * c.e_theta(P32, -1.0)?;
            m.0[2][0] =
                (c.r2(1.0 / (w2 * k))? - c.r2(w * k)? * c.r2(k)?) * c.e_theta(P31, 1.0)?;
            m.0[2][1] = -c.r2(w * k)? * c.e_theta(P32, 1.0)?;
            m.0[2][2] = c.one_plus(w * k)?;
            m
        }
        RegionLabel::V9 => {
            let mut m = M3::zero();
            m.0[0][0] = c.one_plus(w2 * k)?;
            m.0[0][1] =
                (c.r2(1.0 / k)? - c.r2(w * k)? * c.r2(w2 * k)?) * c.e_theta(P21, -1.0)?;
            m.0[0][2] = -c.r2(w2 * k)? * c.e_theta(P31, -1.0)?;
            m.0[1][0] =
                (c.r1(1.0 / k)? - c.r1(w * k)? * c.r1(w2 * k)?) * c.e_theta(P21, 1.0)?;
            m.0[1][1] = c.f(w * k)?;
            m.0[1][2] = c.r1(w * k)? * c.e_theta(P32, -1.0)?;
            m.0[2][0] = -c.r1(w2 * k)? * c.e_theta(P31, 1.0)?;
            m.0[2][1] = c.r2(w * k)? * c.e_theta(P32, 1.0)?;
            m.0[2][2] = C64::new(1.0, 0.0);
            m
        }
    };
    Ok(m)
}

/// Residuals of the two contour symmetries at k:
/// `|v(k) - A v(w k) A^{-1}|` and `|v(k) - B v(1/k)^{-1} B|`.
pub fn verify_v_symmetry(x: f64, t: f64, k: C64, sd: &SpectralData) -> Result<(f64, f64)> {
    let rk = region_of(k)
        .ok_or_else(|| Error::RegionMismatch {
            region: "Gamma".into(),
            k,
            dist: f64::NAN,
        })?;
    let v = jump(rk, x, t, k, sd)?;
    let kw = omega() * k;
    let rw = region_of(kw).ok_or_else(|| Error::RegionMismatch {
        region: "Gamma (rotated)".into(),
        k: kw,
        dist: f64::NAN,
    })?;
    let vw = jump(rw, x, t, kw, sd)?;
    let a = mat_a();
    let res_a = (v - a * vw * a.inv()?).norm_max();
    let ki = 1.0 / k;
    let ri = region_of(ki).ok_or_else(|| Error::RegionMismatch {
        region: "Gamma (inverted)".into(),
        k: ki,
        dist: f64::NAN,
    })?;
    let vi = jump(ri, x, t, ki, sd)?;
    let b = mat_b();
    let res_b = (v - b * vi.inv()? * b).norm_max();
    Ok((res_a, res_b))
}

// ---------------------------------------------------------------------------
// lens factorizations (exact mode)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factorization {
    /// v9 = v3 v2 v1 on the arc (pi/3, arg w k4)
    F123,
    /// v9^{-1} = v4 v5 v6 on (arg w k4, pi/2)
    F456,
    /// v7 = v7 v8 v9 on (pi/2, arg w^2 k2)
    F789,
    /// v7 = v10 v11 v12 on (arg w^2 k2, 2pi/3)
    F101112,
}

impl Factorization {
    pub fn name(self) -> &'static str {
        match self {
            Factorization::F123 => "v9 = v3 v2 v1",
            Factorization::F456 => "v9^-1 = v4 v5 v6",
            Factorization::F789 => "v7 = v7 v8 v9",
            Factorization::F101112 => "v7 = v10 v11 v12",
        }
    }

    /// Angular window of the factorization arc for this zeta.
    pub fn arc(self, zeta: f64) -> Result<(f64, f64)> {
        let s = saddle_points(zeta)?;
        let a_wk4 = (omega() * s.k4).arg();
        let a_w2k2 = (omega2() * s.k2).arg();
        Ok(match self {
            Factorization::F123 => (PI / 3.0, a_wk4),
            Factorization::F456 => (a_wk4, PI / 2.0),
            Factorization::F789 => (PI / 2.0, a_w2k2),
            Factorization::F101112 => (a_w2k2, 2.0 * PI / 3.0),
        })
    }
}

/// The factor matrices v_j^{(1)}, exact mode (analytic parts = full spectral
/// functions, remainders = 0, diagonal middle factors).
pub fn lens_factor(j: usize, x: f64, t: f64, k: C64, sd: &SpectralData) -> Result<M3> {
    let c = Ctx { x, t, k, sd };
    let w = omega();
    let w2 = omega2();
    use PhaseId::*;
    let one = C64::new(1.0, 0.0);
    let hat = |r: C64, denom: C64| r / denom;
    let m = match j {
        1 => {
            let mut m = M3::identity();
            m.0[0][1] = c.r2(1.0 / k)? * c.e_theta(P21, -1.0)?;
            m.0[2][0] = -c.r1(w2 * k)? * c.e_theta(P31, 1.0)?;
            m.0[2][1] = c.r2(w * k)? * c.e_theta(P32, 1.0)?;
            m
        }
        2 => M3::identity(),
        3 => {
            let mut m = M3::identity();
            m.0[0][2] = -c.r2(w2 * k)? * c.e_theta(P31, -1.0)?;
            m.0[1][0] = c.r1(1.0 / k)? * c.e_theta(P21, 1.0)?;
            m.0[1][2] = c.r1(w * k)? * c.e_theta(P32, -1.0)?;
            m
        }
        4 => {
            let p2 = c.one_plus(w2 * k)?;
            let mut m = M3::identity();
            m.0[0][1] = -c.r2(1.0 / k)? * c.e_theta(P21, -1.0)?;
            m.0[0][2] = hat(c.r2(w2 * k)?, p2) * c.e_theta(P31, -1.0)?;
            m.0[2][1] = c.r1(1.0 / (w * k))? * c.e_theta(P32, 1.0)?;
            m
        }
        5 => {
            let p2 = c.one_plus(w2 * k)?;
            M3::diag(one / p2, one, p2)
        }
        6 => {
            let p2 = c.one_plus(w2 * k)?;
            let mut m = M3::identity();
            m.0[1][0] = -c.r1(1.0 / k)? * c.e_theta(P21, 1.0)?;
            m.0[1][2] = c.r2(1.0 / (w * k))? * c.e_theta(P32, -1.0)?;
            m.0[2][0] = hat(c.r1(w2 * k)?, p2) * c.e_theta(P31, 1.0)?;
            m
        }
        7 => {
            let p = c.one_plus(k)?;
            let f = c.f(k)?;
            let mut m = M3::identity();
            m.0[0][1] = -hat(c.r1(k)?, p) * c.e_theta(P21, -1.0)?;
            m.0[0][2] = -(c.r1(1.0 / (w2 * k))? / f) * c.e_theta(P31, -1.0)?;
            m.0[2][1] =
                ((c.r1(1.0 / (w * k))? - c.r1(k)? * c.r1(w2 * k)?) / p) * c.e_theta(P32, 1.0)?;
            m
        }
        8 => {
            let p = c.one_plus(k)?;
            let f = c.f(k)?;
            M3::diag(one / f, p, f / p)
        }
        9 => {
            let p = c.one_plus(k)?;
            let f = c.f(k)?;
            let mut m = M3::identity();
            m.0[1][0] = -hat(c.r2(k)?, p) * c.e_theta(P21, 1.0)?;
            m.0[1][2] =
                ((c.r2(1.0 / (w * k))? - c.r2(k)? * c.r2(w2 * k)?) / p) * c.e_theta(P32, -1.0)?;
            m.0[2][0] = -(c.r2(1.0 / (w2 * k))? / f) * c.e_theta(P31, 1.0)?;
            m
        }
        10 => {
            let f = c.f(k)?;
            let fw2 = c.f(w2 * k)?;
            let mut m = M3::identity();
            m.0[0][1] = -((c.r1(k)? - c.r1(1.0 / (w * k))? * c.r1(1.0 / (w2 * k))?) / f)
                * c.e_theta(P21, -1.0)?;
            m.0[0][2] = (c.r2(w2 * k)? / fw2) * c.e_theta(P31, -1.0)?;
            m.0[1][2] = ((c.r2(1.0 / (w * k))? - c.r2(k)? * c.r2(w2 * k)?) / fw2)
                * c.e_theta(P32, -1.0)?;
            m
        }
        11 => {
            let f = c.f(k)?;
            let fw2 = c.f(w2 * k)?;
            M3::diag(one / f, f / fw2, fw2)
        }
        12 => {
            let f = c.f(k)?;
            let fw2 = c.f(w2 * k)?;
            let mut m = M3::identity();
            m.0[1][0] = -((c.r2(k)? - c.r2(1.0 / (w * k))? * c.r2(1.0 / (w2 * k))?) / f)
                * c.e_theta(P21, 1.0)?;
            m.0[2][0] = (c.r1(w2 * k)? / fw2) * c.e_theta(P31, 1.0)?;
            m.0[2][1] = ((c.r1(1.0 / (w * k))? - c.r1(k)? * c.r1(w2 * k)?) / fw2)
                * c.e_theta(P32, 1.0)?;
            m
        }
        _ => return Err(Error::domain(format!("no lens factor v_{j}"))),
    };
    Ok(m)
}

/// Residual of one factorization identity at k on its arc.
pub fn verify_factorization(
    which: Factorization,
    x: f64,
    t: f64,
    k: C64,
    sd: &SpectralData,
) -> Result<f64> {
    // stay away from the zeros of f and the poles of r2
    for bad in [
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        omega(),
        -omega(),
        omega2(),
        -omega2(),
    ] {
        if (k - bad).norm() < 1e-2 {
            return Err(Error::Pole(k));
        }
    }
    let prod3 = |a: usize, b: usize, cc: usize| -> Result<M3> {
        Ok(lens_factor(a, x, t, k, sd)? * lens_factor(b, x, t, k, sd)? * lens_factor(cc, x, t, k, sd)?)
    };
    let res = match which {
        Factorization::F123 => {
            let v9 = jump_unchecked(RegionLabel::V9, x, t, k, sd)?;
            (v9 - prod3(3, 2, 1)?).norm_max()
        }
        Factorization::F456 => {
            let v9 = jump_unchecked(RegionLabel::V9, x, t, k, sd)?;
            (v9.inv()? - prod3(4, 5, 6)?).norm_max()
        }
        Factorization::F789 => {
            let v7 = jump_unchecked(RegionLabel::V7, x, t, k, sd)?;
            (v7 - prod3(7, 8, 9)?).norm_max()
        }
        Factorization::F101112 => {
            let v7 = jump_unchecked(RegionLabel::V7, x, t, k, sd)?;
            (v7 - prod3(10, 11, 12)?).norm_max()
        }
    };
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> SpectralData {
        SpectralData::synthetic(11)
    }

    #[test]
    fn zero_data_gives_identity_everywhere() {
        let sd = SpectralData::zero();
        let (x, t) = (0.7, 3.0);
        for (region, k) in [
            (RegionLabel::V7, C64::from_polar(1.0, 0.62 * PI)),
            (RegionLabel::V8, C64::from_polar(1.0, 0.05)),
            (RegionLabel::V9, C64::from_polar(1.0, 0.4 * PI)),
            (RegionLabel::V1P, C64::new(0.0, -1.7)),
            (RegionLabel::V4PP, C64::new(0.0, -0.5)),
        ] {
            let v = jump(region, x, t, k, &sd).unwrap();
            assert!((v - M3::identity()).norm_max() < 1e-15, "{region:?}");
        }
    }

    #[test]
    fn v9_entry_22_is_f_omega_k() {
        let sd = setup();
        let k = C64::from_polar(1.0, 0.41 * PI);
        let v = jump(RegionLabel::V9, 0.5, 2.0, k, &sd).unwrap();
        let f = sd.f_circle((omega() * k).arg()).unwrap();
        assert!((v.0[1][1] - C64::new(f, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn region_mismatch_rejected() {
        let sd = setup();
        let k = C64::from_polar(1.0, 0.05); // on Gamma_8
        assert!(matches!(
            jump(RegionLabel::V9, 0.5, 2.0, k, &sd),
            Err(Error::RegionMismatch { .. })
        ));
    }

    #[test]
    fn dets_of_circle_jumps_are_one() {
        let sd = setup();
        let (x, t) = (0.9, 3.0);
        for m in 0..16 {
            let th = -PI / 6.0 + (PI / 3.0) * (m as f64 + 0.5) / 16.0; // Gamma_8 arc
            let k = C64::from_polar(1.0, th);
            if crate::phase::dist_to_q_hat(k) < 0.02 {
                continue;
            }
            let v = jump(RegionLabel::V8, x, t, k, &sd).unwrap();
            assert!(
                (v.det() - C64::new(1.0, 0.0)).norm() < 1e-10,
                "theta = {th}: det = {}",
                v.det()
            );
        }
        // v7 and v9 as well, on their own arcs
        for m in 0..8 {
            let th = 0.55 * PI + 0.25 * PI * (m as f64 + 0.5) / 8.0;
            let k = C64::from_polar(1.0, th);
            let v = jump(RegionLabel::V7, x, t, k, &sd).unwrap();
            assert!((v.det() - C64::new(1.0, 0.0)).norm() < 1e-10);
            let th9 = PI / 6.0 + (PI / 3.0) * (m as f64 + 0.5) / 8.0;
            let k9 = C64::from_polar(1.0, th9);
            let v9 = jump(RegionLabel::V9, x, t, k9, &sd).unwrap();
            assert!((v9.det() - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn symmetries_on_circle_and_rays() {
        let sd = setup();
        let (x, t) = (0.4, 2.0);
        let mut pts = vec![
            C64::from_polar(1.0, 0.40 * PI),  // Gamma_9
            C64::from_polar(1.0, 0.60 * PI),  // Gamma_7
            C64::from_polar(1.0, 0.08 * PI),  // Gamma_8
            C64::from_polar(1.0, -0.45 * PI), // Gamma_7 lower
        ];
        // ray points
        pts.push(C64::from_polar(1.8, -PI / 2.0)); // v1'
        pts.push(C64::from_polar(0.55, PI / 2.0)); // v1''
        pts.push(C64::from_polar(1.33, PI / 6.0)); // v3'
        pts.push(C64::from_polar(0.71, -PI / 6.0)); // v5''
        for k in pts {
            let (ra, rb) = verify_v_symmetry(x, t, k, &sd).unwrap();
            assert!(ra < 1e-9, "A-symmetry residual {ra:.2e} at {k}");
            assert!(rb < 1e-9, "B-symmetry residual {rb:.2e} at {k}");
        }
    }

    #[test]
    fn symmetry_residual_responds_linearly_to_perturbation() {
        // breaking r2 <-> r1 consistency shows up at first order
        let sd = setup();
        let (x, t) = (0.4, 2.0);
        let k = C64::from_polar(1.0, 0.40 * PI);
        let (_, rb0) = verify_v_symmetry(x, t, k, &sd).unwrap();
        // perturb by moving the evaluation point slightly off-symmetric
        let eps = 1e-5;
        let v = jump(RegionLabel::V9, x, t, k, &sd).unwrap();
        let ki = 1.0 / k;
        let vi = jump(region_of(ki).unwrap(), x, t, ki, &sd).unwrap();
        let b = mat_b();
        let mut vi_pert = vi;
        vi_pert.0[1][0] += C64::new(eps, 0.0);
        let res = (v - b * vi_pert.inv().unwrap() * b).norm_max();
        assert!(res > 0.1 * eps && res < 10.0 * eps, "res = {res:.2e}");
        assert!(rb0 < 1e-9);
    }

    #[test]
    fn factorizations_hold_in_exact_mode() {
        let sd = setup();
        let zeta = 0.35;
        let t = 2.0;
        let x = zeta * t;
        for which in [
            Factorization::F123,
            Factorization::F456,
            Factorization::F789,
            Factorization::F101112,
        ] {
            let (lo, hi) = which.arc(zeta).unwrap();
            for m in 0..12 {
                let th = lo + (hi - lo) * (m as f64 + 0.5) / 12.0;
                let k = C64::from_polar(1.0, th);
                match verify_factorization(which, x, t, k, &sd) {
                    Ok(res) => assert!(res < 1e-8, "{}: residual {res:.2e} at {th}", which.name()),
                    Err(Error::Pole(_)) => continue, // excluded zone near kappa points
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn zero_data_factorization_residuals_vanish() {
        let sd = SpectralData::zero();
        let zeta = 0.3;
        let (lo, hi) = Factorization::F789.arc(zeta).unwrap();
        let k = C64::from_polar(1.0, 0.5 * (lo + hi));
        let res = verify_factorization(Factorization::F789, zeta * 2.0, 2.0, k, &sd).unwrap();
        assert!(res == 0.0);
    }
}
