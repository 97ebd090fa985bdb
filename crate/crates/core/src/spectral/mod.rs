//! Reflection coefficients `r1`, `r2` and the derived function `f`.
//!
//! Two provenances share one interface: data computed from initial conditions
//! through the Volterra solver (cached on contour grids, spline-interpolated)
//! and closed-form synthetic families built to satisfy the same algebraic
//! identities (used by the verification suites, where Assumption (iii) must
//! hold exactly).

pub mod cache;
pub mod fourier;
pub mod scattering;
pub mod synthetic;

use crate::error::{Error, Result};
use crate::files::CacheRecord;
use crate::phase::{dist_to_q_hat, omega2, r_tilde, r_tilde_circle, r_tilde_circle_deriv};
use crate::UNIT_CIRCLE_TOL;
use cache::{chebyshev_angles, CSpline};
use fourier::FourierSeries;
use num_complex::Complex64 as C64;
use scattering::{Direction, InitialData};
use std::f64::consts::PI;
use synthetic::{build_rho, SyntheticParams};

/// Exclusion radius around the sixth roots of unity and 0.
pub const Q_HAT_EXCLUSION: f64 = 1e-3;

/// Angular margin of the cached circle segments at the kappa points (sampled
/// backend only; closed-form backends have no gap).
pub const CIRCLE_MARGIN: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    FromInitialData,
    UserSupplied,
}

/// Location of a point on the contours carrying r1 or r2.
#[derive(Clone, Copy, Debug)]
enum Locus {
    Circle(f64),
    /// outward ray (radius > 1)
    RayOut(f64),
    /// inside-disk segment (radius < 1)
    SegIn(f64),
}

fn classify(k: C64, ray_out_angle: f64) -> Result<Locus> {
    let r = k.norm();
    if (r - 1.0).abs() <= UNIT_CIRCLE_TOL {
        return Ok(Locus::Circle(k.arg()));
    }
    let ang = k.arg();
    if r > 1.0 && (ang - ray_out_angle).abs() <= 1e-8 {
        return Ok(Locus::RayOut(r));
    }
    let seg_angle = -ray_out_angle;
    if r < 1.0 && (ang - seg_angle).abs() <= 1e-8 {
        return Ok(Locus::SegIn(r));
    }
    Err(Error::domain(format!(
        "k = {k} is not on the contour carrying this reflection coefficient"
    )))
}

#[derive(Clone)]
#[allow(clippy::large_enum_variant)] // one spectral dataset per run; never in bulk
enum Backend {
    Synthetic {
        rho: FourierSeries,
        ray_amp: C64,
        ray_decay: f64,
    },
    Sampled {
        /// r1 on the six circle segments between consecutive kappa points
        r1_circle: Vec<CSpline>,
        r2_circle: Vec<CSpline>,
        /// r1 on the outward ray at -pi/2 (by radius) and on (0, i) (by radius)
        r1_ray: CSpline,
        r1_seg: CSpline,
        /// r2 on the outward ray at +pi/2 and on (0, -i)
        r2_ray: CSpline,
        r2_seg: CSpline,
    },
}

#[derive(Clone)]
pub struct SpectralData {
    backend: Backend,
    provenance: Provenance,
}

/// Circle segments between kappa points, shrunk by `margin` radians.
fn circle_segments(margin: f64) -> Vec<(f64, f64)> {
    (0..6)
        .map(|j| {
            let lo = -PI + PI / 3.0 * j as f64;
            (lo + margin, lo + PI / 3.0 - margin)
        })
        .collect()
}

impl SpectralData {
    pub fn synthetic(seed: u64) -> Self {
        Self::synthetic_from_params(&SyntheticParams::from_seed(seed), seed)
    }

    pub fn synthetic_from_params(params: &SyntheticParams, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
        let phase: f64 = rng.gen::<f64>() * 2.0 * PI;
        SpectralData {
            backend: Backend::Synthetic {
                rho: build_rho(params),
                ray_amp: C64::from_polar(0.3, phase),
                ray_decay: params.ray_decay,
            },
            provenance: Provenance::UserSupplied,
        }
    }

    /// Identically-zero reflection data.
    pub fn zero() -> Self {
        SpectralData {
            backend: Backend::Synthetic {
                rho: FourierSeries::new(vec![C64::new(0.0, 0.0)]),
                ray_amp: C64::new(0.0, 0.0),
                ray_decay: 1.0,
            },
            provenance: Provenance::UserSupplied,
        }
    }

    /// March the Volterra systems and cache r1, r2 on the contour grids.
    pub fn from_initial_data(data: &InitialData) -> Result<Self> {
        let margin = CIRCLE_MARGIN;
        let per_segment = 96;
        let mut r1_circle = Vec::new();
        let mut r2_circle = Vec::new();
        let segs = circle_segments(margin);
        let seg_values = crate::par::map(&segs, |&(lo, hi)| -> Result<(CSpline, CSpline)> {
            let angles = chebyshev_angles(lo, hi, per_segment);
            let mut v1 = Vec::with_capacity(angles.len());
            let mut v2 = Vec::with_capacity(angles.len());
            for &th in &angles {
                let k = C64::from_polar(1.0, th);
                let (r1, r2) = scattering::reflection(k, data)?;
                v1.push(r1);
                v2.push(r2);
            }
            Ok((CSpline::new(angles.clone(), &v1)?, CSpline::new(angles, &v2)?))
        });
        for sv in seg_values {
            let (a, b) = sv?;
            r1_circle.push(a);
            r2_circle.push(b);
        }
        let eval_r1 = |k: C64| -> Result<C64> {
            let s = scattering::scattering_matrix(k, data, Direction::X)?;
            if s.0[0][0].norm() < 1e-12 {
                return Err(Error::DivisionNearZero(s.0[0][0].norm()));
            }
            Ok(s.0[0][1] / s.0[0][0])
        };
        let eval_r2 = |k: C64| -> Result<C64> {
            let sa = scattering::scattering_matrix(k, data, Direction::XA)?;
            if sa.0[0][0].norm() < 1e-12 {
                return Err(Error::DivisionNearZero(sa.0[0][0].norm()));
            }
            Ok(sa.0[0][1] / sa.0[0][0])
        };
        let collect = |radii: &[f64], angle: f64, which: u8| -> Result<CSpline> {
            let vals = crate::par::map(radii, |&r| {
                let k = C64::from_polar(r, angle);
                if which == 1 {
                    eval_r1(k)
                } else {
                    eval_r2(k)
                }
            });
            let vals: Result<Vec<C64>> = vals.into_iter().collect();
            CSpline::new(radii.to_vec(), &vals?)
        };
        let (radii_out, radii_in) = radial_grids();
        let r1_ray = collect(&radii_out, -PI / 2.0, 1)?;
        let r1_seg = collect(&radii_in, PI / 2.0, 1)?;
        let r2_ray = collect(&radii_out, PI / 2.0, 2)?;
        let r2_seg = collect(&radii_in, -PI / 2.0, 2)?;
        Ok(SpectralData {
            backend: Backend::Sampled {
                r1_circle,
                r2_circle,
                r1_ray,
                r1_seg,
                r2_ray,
                r2_seg,
            },
            provenance: Provenance::FromInitialData,
        })
    }

    /// Restore sampled data from cache records.
    pub fn from_cache_records(records: &[CacheRecord]) -> Result<Self> {
        let mut by_id: std::collections::BTreeMap<String, Vec<&CacheRecord>> =
            std::collections::BTreeMap::new();
        for r in records {
            by_id.entry(r.contour_id.clone()).or_default().push(r);
        }
        let spline_pair = |recs: &[&CacheRecord], radial: bool| -> Result<(CSpline, CSpline)> {
            let mut rows: Vec<(f64, C64, C64)> = recs
                .iter()
                .map(|r| {
                    let k = C64::new(r.k_re, r.k_im);
                    let t = if radial { k.norm() } else { k.arg() };
                    (t, C64::new(r.r1_re, r.r1_im), C64::new(r.r2_re, r.r2_im))
                })
                .collect();
            rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let v1: Vec<C64> = rows.iter().map(|r| r.1).collect();
            let v2: Vec<C64> = rows.iter().map(|r| r.2).collect();
            Ok((CSpline::new(ts.clone(), &v1)?, CSpline::new(ts, &v2)?))
        };
        let mut r1_circle = Vec::new();
        let mut r2_circle = Vec::new();
        for j in 0..6 {
            let id = format!("circle{j}");
            let recs = by_id
                .get(&id)
                .ok_or_else(|| Error::domain(format!("cache missing contour {id}")))?;
            let (a, b) = spline_pair(recs, false)?;
            r1_circle.push(a);
            r2_circle.push(b);
        }
        let need = |id: &str| -> Result<Vec<&CacheRecord>> {
            by_id
                .get(id)
                .cloned()
                .ok_or_else(|| Error::domain(format!("cache missing contour {id}")))
        };
        let (r1_ray, _) = spline_pair(&need("r1_ray")?, true)?;
        let (r1_seg, _) = spline_pair(&need("r1_seg")?, true)?;
        let (_, r2_ray) = spline_pair(&need("r2_ray")?, true)?;
        let (_, r2_seg) = spline_pair(&need("r2_seg")?, true)?;
        Ok(SpectralData {
            backend: Backend::Sampled {
                r1_circle,
                r2_circle,
                r1_ray,
                r1_seg,
                r2_ray,
                r2_seg,
            },
            provenance: Provenance::FromInitialData,
        })
    }

    /// Dump to cache records.
    pub fn to_cache_records(&self) -> Result<Vec<CacheRecord>> {
        let mut out = Vec::new();
        let margin = CIRCLE_MARGIN;
        for (j, (lo, hi)) in circle_segments(margin).into_iter().enumerate() {
            for th in chebyshev_angles(lo, hi, 96) {
                let k = C64::from_polar(1.0, th);
                let r1 = self.r1(k)?;
                let r2 = self.r2(k)?;
                out.push(CacheRecord::new(&format!("circle{j}"), k, r1, r2));
            }
        }
        let (radii_out, radii_in) = radial_grids();
        let zero = C64::new(0.0, 0.0);
        for &r in &radii_out {
            let k = C64::from_polar(r, -PI / 2.0);
            out.push(CacheRecord::new("r1_ray", k, self.r1(k)?, zero));
            let k2 = C64::from_polar(r, PI / 2.0);
            out.push(CacheRecord::new("r2_ray", k2, zero, self.r2(k2)?));
        }
        for &r in &radii_in {
            let k = C64::from_polar(r, PI / 2.0);
            out.push(CacheRecord::new("r1_seg", k, self.r1(k)?, zero));
            let k2 = C64::from_polar(r, -PI / 2.0);
            out.push(CacheRecord::new("r2_seg", k2, zero, self.r2(k2)?));
        }
        Ok(out)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// r1 on Gamma-hat_1 = circle + outward ray at -pi/2 + segment (0, i).
    pub fn r1(&self, k: C64) -> Result<C64> {
        match &self.backend {
            Backend::Synthetic {
                rho,
                ray_amp,
                ray_decay,
            } => match classify(k, -PI / 2.0)? {
                Locus::Circle(th) => Ok(rho.eval(th)),
                Locus::RayOut(r) => {
                    Ok(ray_amp * (r - 1.0) * (-ray_decay * (r - 1.0) * (r - 1.0)).exp())
                }
                Locus::SegIn(_) => Ok(C64::new(0.0, 0.0)),
            },
            Backend::Sampled {
                r1_circle,
                r1_ray,
                r1_seg,
                ..
            } => match classify(k, -PI / 2.0)? {
                Locus::Circle(th) => eval_circle_segments(r1_circle, th, k, false),
                Locus::RayOut(r) => {
                    if r1_ray.in_range(r) {
                        Ok(r1_ray.eval(r))
                    } else {
                        Ok(C64::new(0.0, 0.0)) // rapid decay beyond the cached range
                    }
                }
                Locus::SegIn(r) => {
                    if r1_seg.in_range(r) {
                        Ok(r1_seg.eval(r))
                    } else {
                        Err(Error::domain(format!("r1 segment sample out of range: {r}")))
                    }
                }
            },
        }
    }

    /// r2 on Gamma-hat_4 = circle + segment (0, -i) + outward ray at +pi/2,
    /// with the simple poles at +- omega^2 excluded.
    pub fn r2(&self, k: C64) -> Result<C64> {
        if (k - omega2()).norm() < 1e-9 || (k + omega2()).norm() < 1e-9 {
            return Err(Error::Pole(k));
        }
        match &self.backend {
            Backend::Synthetic { .. } => {
                // r2(k) = r_tilde(k) conj(r1(1 / conj k))
                let arg = 1.0 / k.conj();
                Ok(r_tilde(k)? * self.r1(arg)?.conj())
            }
            Backend::Sampled {
                r2_circle,
                r2_ray,
                r2_seg,
                ..
            } => match classify(k, PI / 2.0)? {
                Locus::Circle(th) => eval_circle_segments(r2_circle, th, k, false),
                Locus::RayOut(r) => {
                    if r2_ray.in_range(r) {
                        Ok(r2_ray.eval(r))
                    } else {
                        Ok(C64::new(0.0, 0.0))
                    }
                }
                Locus::SegIn(r) => {
                    if r2_seg.in_range(r) {
                        Ok(r2_seg.eval(r))
                    } else {
                        Err(Error::domain(format!("r2 segment sample out of range: {r}")))
                    }
                }
            },
        }
    }

    /// 1 + r1(e^{i th}) r2(e^{i th}); real on the circle.
    pub fn one_plus_r1r2_circle(&self, theta: f64) -> Result<f64> {
        match &self.backend {
            Backend::Synthetic { rho, .. } => {
                Ok(1.0 + r_tilde_circle(theta) * rho.eval(theta).norm_sqr())
            }
            Backend::Sampled { .. } => {
                let k = C64::from_polar(1.0, theta);
                let v = C64::new(1.0, 0.0) + self.r1(k)? * self.r2(k)?;
                // interpolated backends carry small imaginary residue
                if v.im.abs() > 1e-4 * (1.0 + v.re.abs()) {
                    return Err(Error::domain(format!(
                        "1 + r1 r2 not real on circle: {v} at theta = {theta}"
                    )));
                }
                Ok(v.re)
            }
        }
    }

    pub fn one_plus_r1r2_circle_deriv(&self, theta: f64) -> Result<f64> {
        match &self.backend {
            Backend::Synthetic { rho, .. } => {
                let v = rho.eval(theta);
                let dv = rho.eval_deriv(theta);
                Ok(r_tilde_circle_deriv(theta) * v.norm_sqr()
                    + r_tilde_circle(theta) * 2.0 * (v.conj() * dv).re)
            }
            Backend::Sampled {
                r1_circle,
                r2_circle,
                ..
            } => {
                let k = C64::from_polar(1.0, theta);
                let r1 = eval_circle_segments(r1_circle, theta, k, false)?;
                let r2 = eval_circle_segments(r2_circle, theta, k, false)?;
                let d1 = eval_circle_segments(r1_circle, theta, k, true)?;
                let d2 = eval_circle_segments(r2_circle, theta, k, true)?;
                Ok((d1 * r2 + r1 * d2).re)
            }
        }
    }

    /// f(e^{i th}) = 1 + (r1 r2)(th) + (r1 r2)(2pi/3 - th); on the circle the
    /// argument 1/(w^2 k) of the definition is e^{i(2pi/3 - th)}.
    pub fn f_circle(&self, theta: f64) -> Result<f64> {
        let t2 = 2.0 * PI / 3.0 - theta;
        Ok(self.one_plus_r1r2_circle(theta)? + self.one_plus_r1r2_circle(t2)? - 1.0)
    }

    pub fn f_circle_deriv(&self, theta: f64) -> Result<f64> {
        let t2 = 2.0 * PI / 3.0 - theta;
        Ok(self.one_plus_r1r2_circle_deriv(theta)? - self.one_plus_r1r2_circle_deriv(t2)?)
    }

    /// f at a unit-circle point.
    pub fn f_at(&self, k: C64) -> Result<C64> {
        if (k.norm() - 1.0).abs() > UNIT_CIRCLE_TOL {
            return Err(Error::domain("f is defined on the unit circle"));
        }
        Ok(C64::new(self.f_circle(k.arg())?, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        match &self.backend {
            Backend::Synthetic { rho, ray_amp, .. } => rho.modes() == 0 && ray_amp.norm() == 0.0,
            _ => false,
        }
    }

    /// Angular gap around the kappa points inside which circle values are
    /// unavailable (arc integrals shrink their endpoints by this much).
    pub fn circle_gap(&self) -> f64 {
        match &self.backend {
            Backend::Synthetic { .. } => 0.0,
            Backend::Sampled { .. } => CIRCLE_MARGIN,
        }
    }

    /// Hard check that k stays clear of the degeneracy set.
    pub fn guard_q_hat(&self, k: C64) -> Result<()> {
        let d = dist_to_q_hat(k);
        if d < Q_HAT_EXCLUSION {
            return Err(Error::domain(format!(
                "k = {k} within {d:.2e} of a sixth root of unity or 0"
            )));
        }
        Ok(())
    }
}

fn radial_grids() -> (Vec<f64>, Vec<f64>) {
    let radii_out: Vec<f64> = (0..28)
        .map(|j| 1.0 + 6.0 * ((j as f64 + 0.5) / 28.0).powi(2) + 1e-3)
        .collect();
    let radii_in: Vec<f64> = (0..24)
        .map(|j| 0.03 + (1.0 - 0.04) * (j as f64 + 0.5) / 24.0)
        .collect();
    (radii_out, radii_in)
}

fn eval_circle_segments(splines: &[CSpline], theta: f64, k: C64, deriv: bool) -> Result<C64> {
    let pick = |sp: &CSpline, t: f64| if deriv { sp.eval_deriv(t) } else { sp.eval(t) };
    for sp in splines {
        if sp.in_range(theta) {
            return Ok(pick(sp, theta));
        }
    }
    // wrap-around near +-pi
    let wrapped = if theta > 0.0 {
        theta - 2.0 * PI
    } else {
        theta + 2.0 * PI
    };
    for sp in splines {
        if sp.in_range(wrapped) {
            return Ok(pick(sp, wrapped));
        }
    }
    Err(Error::domain(format!(
        "circle angle {theta} falls in a kappa-point exclusion zone (k = {k})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::omega;

    #[test]
    fn synthetic_satisfies_r2_symmetry_by_construction() {
        let sd = SpectralData::synthetic(3);
        let k = C64::from_polar(1.0, 0.61 * PI);
        let r2 = sd.r2(k).unwrap();
        let expect = r_tilde(k).unwrap() * sd.r1(1.0 / k.conj()).unwrap().conj();
        assert!((r2 - expect).norm() < 1e-14);
    }

    #[test]
    fn circle_relation_via_r1_r2() {
        // r1(1/(wk)) + r2(wk) + r1(w^2 k) r2(1/k) = 0 on the circle
        let sd = SpectralData::synthetic(3);
        for m in 0..24 {
            let th = -PI + 2.0 * PI * (m as f64 + 0.41) / 24.0;
            let k = C64::from_polar(1.0, th);
            let lhs = sd.r1(1.0 / (omega() * k)).unwrap()
                + sd.r2(omega() * k).unwrap()
                + sd.r1(omega2() * k).unwrap() * sd.r2(1.0 / k).unwrap();
            assert!(lhs.norm() < 1e-11, "theta = {th}: {lhs}");
        }
    }

    #[test]
    fn zero_data_gives_zero_reflection() {
        let sd = SpectralData::zero();
        assert!(sd.is_zero());
        let k = C64::from_polar(1.0, 1.0);
        assert_eq!(sd.r1(k).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(sd.r2(k).unwrap(), C64::new(0.0, 0.0));
        assert!((sd.f_circle(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn r1_vanishes_on_segment_and_at_i() {
        let sd = SpectralData::synthetic(3);
        assert!(sd.r1(C64::new(0.0, 0.5)).unwrap().norm() == 0.0);
        assert!(sd.r1(C64::new(0.0, 1.0)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn r2_pole_guard() {
        let sd = SpectralData::synthetic(3);
        assert!(matches!(sd.r2(omega2()), Err(Error::Pole(_))));
    }
}
