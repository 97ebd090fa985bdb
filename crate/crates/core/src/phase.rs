//! Exact kinematics of the Lax spectral plane: the sixth roots of unity, the
//! exponents `l_j`, `z_j`, the phase functions `Phi_ij`, their saddle points,
//! and the rational reflection factor `r_tilde`.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// omega = e^{2 pi i / 3}
pub fn omega() -> C64 {
    C64::new(-0.5, 0.5 * SQRT3)
}

/// omega^2 = e^{4 pi i / 3}
pub fn omega2() -> C64 {
    C64::new(-0.5, -0.5 * SQRT3)
}

/// omega^j for any integer j.
pub fn omega_pow(j: i32) -> C64 {
    match j.rem_euclid(3) {
        0 => C64::new(1.0, 0.0),
        1 => omega(),
        _ => omega2(),
    }
}

/// kappa_j = e^{i pi (j-1)/3}, j = 1..6: the sixth roots of unity.
pub fn kappa(j: usize) -> C64 {
    C64::from_polar(1.0, PI * (j as f64 - 1.0) / 3.0)
}

/// Distance from k to the degeneracy set (sixth roots of unity and 0).
pub fn dist_to_q_hat(k: C64) -> f64 {
    let mut d = k.norm();
    for j in 1..=6 {
        d = d.min((k - kappa(j)).norm());
    }
    d
}

fn check_nonzero(k: C64) -> Result<()> {
    if k.norm() < 1e-14 {
        return Err(Error::domain("l_j/z_j undefined at k = 0"));
    }
    Ok(())
}

/// l_j(k) = i (w^j k + (w^j k)^{-1}) / (2 sqrt 3)
pub fn l_func(j: i32, k: C64) -> Result<C64> {
    check_nonzero(k)?;
    let w = omega_pow(j) * k;
    Ok(C64::new(0.0, 1.0) * (w + 1.0 / w) / (2.0 * SQRT3))
}

/// z_j(k) = i ((w^j k)^2 + (w^j k)^{-2}) / (4 sqrt 3)
pub fn z_func(j: i32, k: C64) -> Result<C64> {
    check_nonzero(k)?;
    let w = omega_pow(j) * k;
    let w2 = w * w;
    Ok(C64::new(0.0, 1.0) * (w2 + 1.0 / w2) / (4.0 * SQRT3))
}

fn l_deriv(j: i32, k: C64) -> C64 {
    let wj = omega_pow(j);
    C64::new(0.0, 1.0) * (wj - 1.0 / (wj * k * k)) / (2.0 * SQRT3)
}

fn z_deriv(j: i32, k: C64) -> C64 {
    let wj2 = omega_pow(j) * omega_pow(j);
    C64::new(0.0, 1.0) * (2.0 * wj2 * k - 2.0 / (wj2 * k * k * k)) / (4.0 * SQRT3)
}

/// Index pair of a phase function Phi_ij, i > j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseId {
    P21,
    P31,
    P32,
}

impl PhaseId {
    pub fn indices(self) -> (i32, i32) {
        match self {
            PhaseId::P21 => (2, 1),
            PhaseId::P31 => (3, 1),
            PhaseId::P32 => (3, 2),
        }
    }
}

/// Phi_ij(zeta, k) = (l_i - l_j) zeta + (z_i - z_j)
pub fn phi(id: PhaseId, zeta: f64, k: C64) -> Result<C64> {
    let (i, j) = id.indices();
    Ok((l_func(i, k)? - l_func(j, k)?) * zeta + (z_func(i, k)? - z_func(j, k)?))
}

/// theta_ij(x, t, k) = t Phi_ij(x/t, k)
pub fn theta(id: PhaseId, x: f64, t: f64, k: C64) -> Result<C64> {
    Ok(phi(id, x / t, k)? * t)
}

/// d/dk Phi_ij(zeta, k), closed form.
pub fn dphi_dk(id: PhaseId, zeta: f64, k: C64) -> Result<C64> {
    check_nonzero(k)?;
    let (i, j) = id.indices();
    Ok((l_deriv(i, k) - l_deriv(j, k)) * zeta + (z_deriv(i, k) - z_deriv(j, k)))
}

/// The four saddle points of k -> Phi_21(zeta, k).
#[derive(Clone, Copy, Debug)]
pub struct SaddleSet {
    pub zeta: f64,
    pub k1: C64,
    pub k2: C64,
    pub k3: C64,
    pub k4: C64,
}

impl SaddleSet {
    /// Saddle points of Phi_31 are the omega-rotations of these.
    pub fn rotated(&self, j: i32) -> [C64; 4] {
        let w = omega_pow(j);
        [w * self.k1, w * self.k2, w * self.k3, w * self.k4]
    }
}

pub const ZETA_MAX: f64 = 0.577_350_269_189_625_7; // 1/sqrt(3)

/// Closed-form saddle points, valid for 0 < zeta < 1/sqrt(3).
///
/// k2 and k4 are renormalized to unit modulus after evaluation; every
/// downstream arc integral assumes |k2| = |k4| = 1 exactly.
pub fn saddle_points(zeta: f64) -> Result<SaddleSet> {
    if !(zeta > 0.0 && zeta < ZETA_MAX) {
        return Err(Error::domain(format!(
            "zeta = {zeta} outside (0, 1/sqrt(3))"
        )));
    }
    let r = (8.0 + zeta * zeta).sqrt();
    let k2 = C64::new(
        (zeta - r) / 4.0,
        -(2.0f64).sqrt() * (4.0 - zeta * zeta + zeta * r).sqrt() / 4.0,
    );
    let k4 = C64::new(
        (zeta + r) / 4.0,
        -(2.0f64).sqrt() * (4.0 - zeta * zeta - zeta * r).sqrt() / 4.0,
    );
    for (name, k) in [("k2", k2), ("k4", k4)] {
        if (k.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "{name} lost unit modulus: |k| - 1 = {:.3e}",
                k.norm() - 1.0
            )));
        }
    }
    let k2 = k2 / k2.norm();
    let k4 = k4 / k4.norm();
    let a2 = k2.arg();
    let a4 = k4.arg();
    if !(a2 > -3.0 * PI / 4.0 && a2 < -2.0 * PI / 3.0) {
        return Err(Error::domain(format!("arg k2 = {a2} outside (-3pi/4, -2pi/3)")));
    }
    if !(a4 > -PI / 4.0 && a4 < -PI / 6.0) {
        return Err(Error::domain(format!("arg k4 = {a4} outside (-pi/4, -pi/6)")));
    }
    Ok(SaddleSet {
        zeta,
        k1: k2.conj(),
        k2,
        k3: k4.conj(),
        k4,
    })
}

/// Proximity warning for zeta near the ends of the sector, where saddle
/// points collide with sixth roots of unity.
pub fn saddle_margin(zeta: f64) -> f64 {
    zeta.min(ZETA_MAX - zeta)
}

/// r_tilde(k) = (w^2 - k^2) / (1 - w^2 k^2); real on the unit circle, simple
/// poles at +/- w^2 and zeros at +/- w.
pub fn r_tilde(k: C64) -> Result<C64> {
    let w2 = omega2();
    let den = C64::new(1.0, 0.0) - w2 * k * k;
    if den.norm() < 1e-12 * (1.0 + k.norm_sqr()) {
        return Err(Error::Pole(k));
    }
    Ok((w2 - k * k) / den)
}

/// r_tilde restricted to the unit circle, where it is real:
/// tau(theta) = -sin(theta + pi/3) / sin(pi/3 - theta).
pub fn r_tilde_circle(theta: f64) -> f64 {
    -(theta + PI / 3.0).sin() / (PI / 3.0 - theta).sin()
}

/// d/dtheta of `r_tilde_circle`.
pub fn r_tilde_circle_deriv(theta: f64) -> f64 {
    -(2.0 * PI / 3.0).sin() / (PI / 3.0 - theta).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cnear(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn l3_at_one_is_i_over_sqrt3() {
        let v = l_func(3, C64::new(1.0, 0.0)).unwrap();
        assert!(cnear(v, C64::new(0.0, 1.0 / SQRT3), 1e-15));
    }

    #[test]
    fn z3_at_i() {
        // z_3(i) = i (i^2 + i^{-2}) / (4 sqrt 3) = -i / (2 sqrt 3)
        let v = z_func(3, C64::new(0.0, 1.0)).unwrap();
        assert!(cnear(v, C64::new(0.0, -1.0 / (2.0 * SQRT3)), 1e-15));
    }

    #[test]
    fn index_shift_under_rotation() {
        let k = C64::new(0.7, 0.2);
        let a = l_func(1, omega() * k).unwrap();
        let b = l_func(2, k).unwrap();
        assert!(cnear(a, b, 1e-15));
    }

    #[test]
    fn phase_rotation_relations() {
        let zeta = 0.3;
        let k = C64::from_polar(1.1, 0.4);
        // Phi_31(zeta, k) = -Phi_21(zeta, w^2 k)
        let lhs = phi(PhaseId::P31, zeta, k).unwrap();
        let rhs = -phi(PhaseId::P21, zeta, omega2() * k).unwrap();
        assert!(cnear(lhs, rhs, 1e-14));
        // Phi_32(zeta, k) = Phi_21(zeta, w k)
        let lhs = phi(PhaseId::P32, zeta, k).unwrap();
        let rhs = phi(PhaseId::P21, zeta, omega() * k).unwrap();
        assert!(cnear(lhs, rhs, 1e-14));
    }

    #[test]
    fn saddles_at_zeta_to_zero_limit() {
        let s = saddle_points(1e-9).unwrap();
        assert!(cnear(s.k4, C64::from_polar(1.0, -PI / 4.0), 1e-8));
        assert!(cnear(s.k2, C64::from_polar(1.0, -3.0 * PI / 4.0), 1e-8));
    }

    #[test]
    fn saddles_unit_modulus_at_zeta_04() {
        let s = saddle_points(0.4).unwrap();
        assert!((s.k2.norm() - 1.0).abs() < 1e-15);
        assert!((s.k4.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn saddles_are_stationary_fd() {
        // central finite differences with step 1e-6 as independent oracle
        let zeta = 0.25;
        let s = saddle_points(zeta).unwrap();
        let h = 1e-6;
        for k in [s.k1, s.k2, s.k3, s.k4] {
            for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let fp = phi(PhaseId::P21, zeta, k + dir * h).unwrap();
                let fm = phi(PhaseId::P21, zeta, k - dir * h).unwrap();
                let d = (fp - fm) / (2.0 * h);
                assert!(d.norm() < 1e-9, "FD derivative {d} at {k}");
            }
        }
    }

    #[test]
    fn rotated_saddles_are_stationary_for_phi31_phi32() {
        let zeta = 0.33;
        let s = saddle_points(zeta).unwrap();
        for (id, rot) in [(PhaseId::P31, 1), (PhaseId::P32, 2)] {
            for k in s.rotated(rot) {
                let d = dphi_dk(id, zeta, k).unwrap();
                assert!(d.norm() < 1e-12, "{id:?} at {k}: {d}");
            }
        }
    }

    #[test]
    fn r_tilde_values() {
        // zero at omega
        assert!(r_tilde(omega()).unwrap().norm() < 1e-15);
        // real on the circle
        let k = C64::from_polar(1.0, 0.3);
        let v = r_tilde(k).unwrap();
        assert!(v.im.abs() < 1e-12);
        assert!((v.re - r_tilde_circle(0.3)).abs() < 1e-12);
        // multiplicative symmetry r~(k) = r~(1/(wk)) r~(1/(w^2 k))
        let lhs = r_tilde(k).unwrap();
        let rhs = r_tilde(1.0 / (omega() * k)).unwrap() * r_tilde(1.0 / (omega2() * k)).unwrap();
        assert!(cnear(lhs, rhs, 1e-12));
        // pole rejected
        assert!(r_tilde(omega2()).is_err());
    }

    #[test]
    fn re_phi21_zero_on_unit_circle_and_sign_structure() {
        // Phi_21 is purely imaginary on |k| = 1; for large |k| the sign of
        // Re Phi_21 follows -Re(k^2)/4; inversion flips the sign.
        let zeta = 1.0 / (2.0 * SQRT3);
        for m in 0..12 {
            let th = -PI + 2.0 * PI * (m as f64 + 0.5) / 12.0;
            let on_circle = phi(PhaseId::P21, zeta, C64::from_polar(1.0, th)).unwrap();
            assert!(on_circle.re.abs() < 1e-13);
            let far = phi(PhaseId::P21, zeta, C64::from_polar(4.0, th)).unwrap();
            let expect = -(2.0 * th).cos();
            if expect.abs() > 0.3 {
                assert_eq!(far.re > 0.0, expect > 0.0, "theta = {th}");
            }
            let inv = phi(
                PhaseId::P21,
                zeta,
                1.0 / C64::from_polar(4.0, th),
            )
            .unwrap();
            assert!((inv + far).norm() < 1e-12, "inversion antisymmetry");
        }
    }

    proptest! {
        #[test]
        fn rotation_and_inversion_index_identities(re in -2.0f64..2.0, im in -2.0f64..2.0, j in 1i32..=3) {
            let k = C64::new(re, im);
            prop_assume!(k.norm() > 0.1);
            // l_j(w k) = l_{j+1}(k), z_j(w k) = z_{j+1}(k)
            let a = l_func(j, omega() * k).unwrap();
            let b = l_func(j + 1, k).unwrap();
            prop_assert!((a - b).norm() < 1e-13);
            let a = z_func(j, omega() * k).unwrap();
            let b = z_func(j + 1, k).unwrap();
            prop_assert!((a - b).norm() < 1e-13);
            // l_j(1/k) = l_{-j}(k)
            let a = l_func(j, 1.0 / k).unwrap();
            let b = l_func(-j, k).unwrap();
            prop_assert!((a - b).norm() < 1e-13);
        }

        #[test]
        fn schwarz_symmetry(re in -2.0f64..2.0, im in -2.0f64..2.0, zeta in 0.05f64..0.55) {
            let k = C64::new(re, im);
            prop_assume!(k.norm() > 0.1);
            let a = phi(PhaseId::P21, zeta, k.conj()).unwrap();
            let b = phi(PhaseId::P21, zeta, k).unwrap().conj();
            prop_assert!((a - b).norm() < 1e-13);
        }

        #[test]
        fn saddle_stationarity_on_grid(i in 0usize..50) {
            let zeta = 0.05 + (0.5 - 0.05) * (i as f64) / 49.0;
            let s = saddle_points(zeta).unwrap();
            let h = 1e-6;
            for k in [s.k1, s.k2, s.k3, s.k4] {
                let fp = phi(PhaseId::P21, zeta, k + h).unwrap();
                let fm = phi(PhaseId::P21, zeta, k - h).unwrap();
                prop_assert!(((fp - fm) / (2.0 * h)).norm() < 1e-8);
            }
        }
    }
}
