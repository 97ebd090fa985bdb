//! The two model Riemann-Hilbert problems on the cross
//! `X = {s e^{+- i pi/4}} U {s e^{+- 3 i pi/4}}`, solved through parabolic
//! cylinder functions.
//!
//! Model 1 couples rows/columns (1,3) and is parameterized by a single
//! `q` in the unit disk; model 2 couples rows/columns (2,3) and carries
//! four coefficients (q2, q4, q5, q6) subject to `q4 = conj(q5) + q2 conj(q6)`.
//! Both are built the same way: conjugating by `z^{i nu sigma} e^{-i z^2/4 sigma}`
//! makes the cross jumps constant, collapsing the cross onto the real line
//! gives a piecewise-constant jump `v^psi`, and the resulting ODE
//! `(d psi) psi^{-1} = -(i z / 2) sigma + const` is solved by D_{+-i nu}.

use crate::error::{Error, Result};
use crate::mat3::M3;
use crate::special::{gamma, pcf_d_scaled, pcf_d_scaled_deriv, pcf_overlap_check};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Ray membership on the cross (angular tolerance 1e-12).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossRay {
    X1,
    X2,
    X3,
    X4,
    RPlus,
    RMinus,
}

pub fn classify_cross(z: C64) -> Option<CrossRay> {
    let a = z.arg();
    let near = |t: f64| (a - t).abs() < 1e-12;
    if near(PI / 4.0) {
        Some(CrossRay::X1)
    } else if near(3.0 * PI / 4.0) {
        Some(CrossRay::X2)
    } else if near(-3.0 * PI / 4.0) {
        Some(CrossRay::X3)
    } else if near(-PI / 4.0) {
        Some(CrossRay::X4)
    } else if near(0.0) {
        Some(CrossRay::RPlus)
    } else if near(PI) || near(-PI) {
        Some(CrossRay::RMinus)
    } else {
        None
    }
}

/// principal power z^a
fn powp(z: C64, a: C64) -> C64 {
    (a * z.ln()).exp()
}

/// z_(0)^a with arg_0(z) in (0, 2 pi)
fn pow0(z: C64, a: C64) -> C64 {
    let mut arg = z.arg();
    if arg <= 0.0 {
        arg += 2.0 * PI;
    }
    (a * C64::new(z.norm().ln(), arg)).exp()
}

// ---------------------------------------------------------------------------
// model 1
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct ModelParams1 {
    pub q: C64,
    pub nu: f64,
}

impl ModelParams1 {
    pub fn new(q: C64) -> Result<Self> {
        if q.norm() >= 1.0 {
            return Err(Error::domain(format!("model 1 requires |q| < 1, got {}", q.norm())));
        }
        let nu = -(1.0 - q.norm_sqr()).ln() / (2.0 * PI);
        Ok(ModelParams1 { q, nu })
    }
}

/// beta coefficients of model 1; beta12 beta21 = nu.
pub fn beta1(p: &ModelParams1) -> (C64, C64) {
    if p.q.norm() == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let nu = p.nu;
    let den = (PI * nu).exp() - (-PI * nu).exp();
    let b12 = C64::from_polar(1.0, 3.0 * PI / 4.0) * (PI * nu / 2.0).exp() * (2.0 * PI).sqrt()
        * p.q.conj()
        / (den * gamma(C64::new(0.0, -nu)));
    let b21 = C64::from_polar(1.0, -3.0 * PI / 4.0) * (PI * nu / 2.0).exp() * (2.0 * PI).sqrt()
        * p.q
        / (den * gamma(C64::new(0.0, nu)));
    (b12, b21)
}

/// Jump matrix v^{X,(1)}(z) on the cross.
pub fn v_cross_1(p: &ModelParams1, z: C64, ray: CrossRay) -> Result<M3> {
    let nu = C64::new(0.0, p.nu);
    let zp = powp(z, -2.0 * C64::new(0.0, 1.0) * nu.im); // z^{-2 i nu}
    let zm = powp(z, 2.0 * C64::new(0.0, 1.0) * nu.im);
    let ep = (C64::new(0.0, 0.5) * z * z).exp();
    let em = (C64::new(0.0, -0.5) * z * z).exp();
    let d = 1.0 - p.q.norm_sqr();
    Ok(match ray {
        CrossRay::X1 => M3::elementary(2, 0, -p.q * zp * ep),
        CrossRay::X2 => M3::elementary(0, 2, -p.q.conj() / d * zm * em),
        CrossRay::X3 => M3::elementary(2, 0, p.q / d * zp * ep),
        CrossRay::X4 => M3::elementary(0, 2, p.q.conj() * zm * em),
        _ => return Err(Error::domain("model 1 jumps live on the cross rays")),
    })
}

/// The explicit psi matrix of model 1 (trivial middle row/column).
pub struct Psi1 {
    p: ModelParams1,
    b12: C64,
    b21: C64,
}

impl Psi1 {
    pub fn new(p: ModelParams1) -> Result<Self> {
        for order in [
            C64::new(0.0, -p.nu),
            C64::new(0.0, p.nu),
            C64::new(1.0, -p.nu),
            C64::new(1.0, p.nu),
        ] {
            pcf_overlap_check(order)?;
        }
        let (b12, b21) = beta1(&p);
        Ok(Psi1 { p, b12, b21 })
    }

    /// (psi_33 e^{-i z^2/4}, psi_33' e^{-i z^2/4}): the Gaussian factor of
    /// D_{-i nu} cancels against e^{-i z^2/4} since w^2 = -i z^2 on both
    /// rotations, so the scaled pair stays O(1) at large |z|.
    fn psi33_scaled(&self, z: C64) -> (C64, C64) {
        let nu = self.p.nu;
        let order = C64::new(0.0, -nu);
        let (rho, c) = if z.im > 0.0 {
            (C64::from_polar(1.0, -PI / 4.0), (PI * nu / 4.0).exp())
        } else {
            (C64::from_polar(1.0, 3.0 * PI / 4.0), (-3.0 * PI * nu / 4.0).exp())
        };
        let w = rho * z;
        (
            c * pcf_d_scaled(order, w),
            c * rho * pcf_d_scaled_deriv(order, w),
        )
    }

    /// (psi_11 e^{+i z^2/4}, psi_11' e^{+i z^2/4}); here w^2 = +i z^2.
    fn psi11_scaled(&self, z: C64) -> (C64, C64) {
        let nu = self.p.nu;
        let order = C64::new(0.0, nu);
        let (rho, c) = if z.im > 0.0 {
            (C64::from_polar(1.0, -3.0 * PI / 4.0), (-3.0 * PI * nu / 4.0).exp())
        } else {
            (C64::from_polar(1.0, PI / 4.0), (PI * nu / 4.0).exp())
        };
        let w = rho * z;
        (
            c * pcf_d_scaled(order, w),
            c * rho * pcf_d_scaled_deriv(order, w),
        )
    }

    /// Plain psi(z) (small/moderate |z|; the scaled pieces carry the
    /// exponentials at large |z|).
    pub fn eval(&self, z: C64) -> Result<M3> {
        if z.im == 0.0 {
            return Err(Error::domain("psi is defined off the real line"));
        }
        let e = (C64::new(0.0, 0.25) * z * z).exp();
        let (p33, dp33) = self.psi33_scaled(z);
        let (p11, dp11) = self.psi11_scaled(z);
        let (p33, dp33) = (p33 * e, dp33 * e);
        let (p11, dp11) = (p11 / e, dp11 / e);
        let i = C64::new(0.0, 1.0);
        let mut m = M3::identity();
        m.0[0][0] = p11;
        m.0[2][2] = p33;
        if self.p.nu == 0.0 {
            m.0[0][2] = C64::new(0.0, 0.0);
            m.0[2][0] = C64::new(0.0, 0.0);
        } else {
            m.0[0][2] = (i * dp33 + z / 2.0 * p33) / self.b21;
            m.0[2][0] = (-i * dp11 + z / 2.0 * p11) / self.b12;
        }
        Ok(m)
    }
}

/// Model-1 solution m^{X,(1)}(q, z) reconstructed from psi.
pub struct ModelRhp1 {
    pub params: ModelParams1,
    psi: Psi1,
}

impl ModelRhp1 {
    pub fn new(q: C64) -> Result<Self> {
        let params = ModelParams1::new(q)?;
        Ok(ModelRhp1 {
            params,
            psi: Psi1::new(params)?,
        })
    }

    pub fn beta(&self) -> (C64, C64) {
        (self.psi.b12, self.psi.b21)
    }

    /// m_1^{X,(1)}: nonzero only at (1,3) and (3,1).
    pub fn m1_coefficient(&self) -> M3 {
        let mut m = M3::zero();
        m.0[0][2] = self.psi.b12;
        m.0[2][0] = self.psi.b21;
        m
    }

    /// sectorwise B factor collapsing the cross onto the real line
    fn b_factor(&self, z: C64) -> M3 {
        let a = z.arg();
        let q = self.params.q;
        let d = 1.0 - q.norm_sqr();
        if a > 0.0 && a < PI / 4.0 {
            M3::elementary(2, 0, -q)
        } else if a > 3.0 * PI / 4.0 && a < PI {
            M3::elementary(0, 2, q.conj() / d)
        } else if a > -PI && a < -3.0 * PI / 4.0 {
            M3::elementary(2, 0, q / d)
        } else if a > -PI / 4.0 && a < 0.0 {
            M3::elementary(0, 2, -q.conj())
        } else {
            M3::identity()
        }
    }

    /// m^{X,(1)}(z) for z off the cross.
    ///
    /// Entries are assembled with the Gaussian factors combined analytically:
    /// whenever e^{+- i z^2 / 2} appears it multiplies a B-sector coefficient
    /// that is nonzero only where that exponential decays.
    pub fn eval(&self, z: C64) -> Result<M3> {
        if self.params.q.norm() == 0.0 {
            return Ok(M3::identity());
        }
        if classify_cross(z).is_some() {
            return Err(Error::BranchCut { k: z, dist: 0.0 });
        }
        let binv = self.b_factor(z).inv()?;
        let b31 = binv.0[2][0];
        let b13 = binv.0[0][2];
        let i = C64::new(0.0, 1.0);
        let nu = C64::new(0.0, self.params.nu);
        let zp_m = powp(z, -nu); // z^{-i nu}
        let zp_p = powp(z, nu);
        let (p33, dp33) = self.psi.psi33_scaled(z); // psi_33 e^{-i z^2/4}, psi_33' e^{-i z^2/4}
        let (p11, dp11) = self.psi.psi11_scaled(z); // psi_11 e^{+i z^2/4}, ...
        let (b12, b21) = (self.psi.b12, self.psi.b21);
        let f13 = (i * dp33 + z / 2.0 * p33) / b21; // psi_13 e^{-i z^2/4}
        let f31 = (-i * dp11 + z / 2.0 * p11) / b12; // psi_31 e^{+i z^2/4}
        let mut m = M3::identity();
        // column 1 carries e^{+i z^2/4} z^{-i nu}; column 3 the reciprocal
        m.0[0][0] = p11 * zp_m;
        m.0[2][0] = f31 * zp_m;
        m.0[0][2] = f13 * zp_p;
        m.0[2][2] = p33 * zp_p;
        if b31.norm() > 0.0 {
            let e_half = (i * z * z / 2.0).exp(); // decays where b31 != 0
            m.0[0][0] += f13 * b31 * e_half * zp_m;
            m.0[2][0] += p33 * b31 * e_half * zp_m;
        }
        if b13.norm() > 0.0 {
            let e_half = (-i * z * z / 2.0).exp(); // decays where b13 != 0
            m.0[0][2] += p11 * b13 * e_half * zp_p;
            m.0[2][2] += f31 * b13 * e_half * zp_p;
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// model 2
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct ModelParams2 {
    pub q2: C64,
    pub q4: C64,
    pub q5: C64,
    pub q6: C64,
    pub nu2: f64,
    pub nu4: f64,
    pub nu5: f64,
    pub nu_hat2: f64,
}

impl ModelParams2 {
    pub fn new(q2: C64, q4: C64, q5: C64, q6: C64) -> Result<Self> {
        let c1 = 1.0 + q2.norm_sqr() - q4.norm_sqr();
        let c2 = 1.0 - q5.norm_sqr() - q6.norm_sqr();
        if c1 <= 0.0 || c2 <= 0.0 {
            return Err(Error::domain(format!(
                "model 2 positivity violated: 1+|q2|^2-|q4|^2 = {c1:.3e}, 1-|q5|^2-|q6|^2 = {c2:.3e}"
            )));
        }
        let constraint = (q4 - q5.conj() - q2 * q6.conj()).norm();
        if constraint > 1e-12 {
            return Err(Error::domain(format!(
                "model 2 constraint |q4 - conj q5 - q2 conj q6| = {constraint:.3e} > 1e-12"
            )));
        }
        let nu2 = -(1.0 + q2.norm_sqr()).ln() / (2.0 * PI);
        let nu4 = -c1.ln() / (2.0 * PI);
        let nu5 = -c2.ln() / (2.0 * PI);
        Ok(ModelParams2 {
            q2,
            q4,
            q5,
            q6,
            nu2,
            nu4,
            nu5,
            nu_hat2: nu2 + nu5 - nu4,
        })
    }

    /// Resolve q4 from the constraint.
    pub fn from_q2q5q6(q2: C64, q5: C64, q6: C64) -> Result<Self> {
        Self::new(q2, q5.conj() + q2 * q6.conj(), q5, q6)
    }

    pub fn q_combo(&self) -> C64 {
        self.q6 - self.q2 * self.q5
    }
}

/// beta coefficients of model 2; beta12 beta21 = nu_hat2.
pub fn beta2(p: &ModelParams2) -> (C64, C64) {
    let combo = p.q_combo();
    if combo.norm() == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let nu = p.nu_hat2;
    let den = (PI * nu).exp() - (-PI * nu).exp();
    let b12 = C64::from_polar(1.0, 3.0 * PI / 4.0)
        * (PI * nu / 2.0).exp()
        * (2.0 * PI * (p.nu4 - p.nu2)).exp()
        * (2.0 * PI).sqrt()
        * combo.conj()
        / (den * gamma(C64::new(0.0, -nu)));
    let b21 = C64::from_polar(1.0, -3.0 * PI / 4.0)
        * (PI * nu / 2.0).exp()
        * (2.0 * PI * p.nu2).exp()
        * (2.0 * PI).sqrt()
        * combo
        / (den * gamma(C64::new(0.0, nu)));
    (b12, b21)
}

/// Jump matrix v^{X,(2)}(z) on the cross.
pub fn v_cross_2(p: &ModelParams2, z: C64, ray: CrossRay) -> Result<M3> {
    let combo = p.q_combo();
    let a2 = 1.0 + p.q2.norm_sqr();
    let c2 = 1.0 - p.q5.norm_sqr() - p.q6.norm_sqr();
    let e1 = C64::new(0.0, -(2.0 * p.nu5 - p.nu4)); // exponent of z
    let e0 = C64::new(0.0, -(2.0 * p.nu2 - p.nu4)); // exponent of z_(0)
    let zfac_m = powp(z, e1) * pow0(z, e0);
    let zfac_p = powp(z, -e1) * pow0(z, -e0);
    let ep = (C64::new(0.0, 0.5) * z * z).exp();
    let em = (C64::new(0.0, -0.5) * z * z).exp();
    Ok(match ray {
        CrossRay::X1 => M3::elementary(2, 1, -combo / a2 * zfac_m * ep),
        CrossRay::X2 => M3::elementary(1, 2, -combo.conj() / c2 * zfac_p * em),
        CrossRay::X3 => M3::elementary(2, 1, combo / c2 * zfac_m * ep),
        CrossRay::X4 => M3::elementary(1, 2, combo.conj() / a2 * zfac_p * em),
        _ => return Err(Error::domain("model 2 jumps live on the cross rays")),
    })
}

/// The two displayed products for v^psi on R_+ and R_-; equal matrices given
/// the constraint (pure algebra, independent of the special functions).
pub fn v_psi_products(p: &ModelParams2) -> (M3, M3) {
    let combo = p.q_combo();
    let a2 = 1.0 + p.q2.norm_sqr();
    let c2 = 1.0 - p.q5.norm_sqr() - p.q6.norm_sqr();
    let e_plus = (PI * (2.0 * p.nu2 - p.nu4)).exp();
    let e_minus = (PI * (p.nu4 - 2.0 * p.nu5)).exp();
    let sig = |x: f64| M3::diag(C64::new(1.0, 0.0), C64::new(x, 0.0), C64::new(1.0 / x, 0.0));
    let plus = M3::elementary(1, 2, combo.conj() / a2)
        * sig(e_plus)
        * M3::elementary(2, 1, -combo / a2);
    let minus = M3::elementary(2, 1, -combo / c2)
        * sig(e_minus)
        * M3::elementary(1, 2, combo.conj() / c2);
    (plus, minus)
}

pub struct Psi2 {
    pub params: ModelParams2,
    b12: C64,
    b21: C64,
}

impl Psi2 {
    pub fn new(params: ModelParams2) -> Result<Self> {
        let nu = params.nu_hat2;
        for order in [
            C64::new(0.0, -nu),
            C64::new(0.0, nu),
            C64::new(1.0, -nu),
            C64::new(1.0, nu),
        ] {
            pcf_overlap_check(order)?;
        }
        let (b12, b21) = beta2(&params);
        Ok(Psi2 { params, b12, b21 })
    }

    pub fn beta(&self) -> (C64, C64) {
        (self.b12, self.b21)
    }

    /// (psi_33 e^{-i z^2/4}, psi_33' e^{-i z^2/4}).
    fn psi33_scaled(&self, z: C64) -> (C64, C64) {
        let p = &self.params;
        let nu = p.nu_hat2;
        let order = C64::new(0.0, -nu);
        let (rho, c) = if z.im > 0.0 {
            (C64::from_polar(1.0, -PI / 4.0), (PI * nu / 4.0).exp())
        } else {
            (
                C64::from_polar(1.0, 3.0 * PI / 4.0),
                (-3.0 * PI * nu / 4.0).exp() * (-PI * (p.nu4 - 2.0 * p.nu2)).exp(),
            )
        };
        let w = rho * z;
        (
            c * pcf_d_scaled(order, w),
            c * rho * pcf_d_scaled_deriv(order, w),
        )
    }

    /// (psi_22 e^{+i z^2/4}, psi_22' e^{+i z^2/4}).
    fn psi22_scaled(&self, z: C64) -> (C64, C64) {
        let p = &self.params;
        let nu = p.nu_hat2;
        let order = C64::new(0.0, nu);
        let (rho, c) = if z.im > 0.0 {
            (C64::from_polar(1.0, -3.0 * PI / 4.0), (-3.0 * PI * nu / 4.0).exp())
        } else {
            (
                C64::from_polar(1.0, PI / 4.0),
                (PI * nu / 4.0).exp() * (PI * (p.nu4 - 2.0 * p.nu2)).exp(),
            )
        };
        let w = rho * z;
        (
            c * pcf_d_scaled(order, w),
            c * rho * pcf_d_scaled_deriv(order, w),
        )
    }

    /// psi(z) for z off the real line; first row and column are (1, 0, 0).
    pub fn eval(&self, z: C64) -> Result<M3> {
        if z.im == 0.0 {
            return Err(Error::domain("psi is defined off the real line"));
        }
        let e = (C64::new(0.0, 0.25) * z * z).exp();
        let (p33, dp33) = self.psi33_scaled(z);
        let (p22, dp22) = self.psi22_scaled(z);
        let (p33, dp33) = (p33 * e, dp33 * e);
        let (p22, dp22) = (p22 / e, dp22 / e);
        let i = C64::new(0.0, 1.0);
        let mut m = M3::identity();
        m.0[1][1] = p22;
        m.0[2][2] = p33;
        if self.params.nu_hat2.abs() < 1e-13 && self.params.q_combo().norm() < 1e-13 {
            // degenerate: both numerator and beta vanish linearly in nu
            m.0[1][2] = C64::new(0.0, 0.0);
            m.0[2][1] = C64::new(0.0, 0.0);
        } else {
            m.0[1][2] = (i * dp33 + z / 2.0 * p33) / self.b21;
            m.0[2][1] = (-i * dp22 + z / 2.0 * p22) / self.b12;
        }
        Ok(m)
    }
}

pub struct ModelRhp2 {
    pub params: ModelParams2,
    psi: Psi2,
}

impl ModelRhp2 {
    pub fn new(params: ModelParams2) -> Result<Self> {
        Ok(ModelRhp2 {
            params,
            psi: Psi2::new(params)?,
        })
    }

    pub fn beta(&self) -> (C64, C64) {
        self.psi.beta()
    }

    pub fn psi(&self) -> &Psi2 {
        &self.psi
    }

    /// m_1^{X,(2)}: nonzero only at (2,3) and (3,2).
    pub fn m1_coefficient(&self) -> M3 {
        let (b12, b21) = self.psi.beta();
        let mut m = M3::zero();
        m.0[1][2] = b12;
        m.0[2][1] = b21;
        m
    }

    fn b_factor(&self, z: C64) -> M3 {
        let p = &self.params;
        let a = z.arg();
        let combo = p.q_combo();
        let a2 = 1.0 + p.q2.norm_sqr();
        let c2 = 1.0 - p.q5.norm_sqr() - p.q6.norm_sqr();
        if a > 0.0 && a < PI / 4.0 {
            M3::elementary(2, 1, -combo / a2)
        } else if a > 3.0 * PI / 4.0 && a < PI {
            M3::elementary(1, 2, combo.conj() / c2)
        } else if a > -PI && a < -3.0 * PI / 4.0 {
            M3::elementary(2, 1, combo / c2)
        } else if a > -PI / 4.0 && a < 0.0 {
            M3::elementary(1, 2, -combo.conj() / a2)
        } else {
            M3::identity()
        }
    }

    /// m^{X,(2)}(z) for z off the cross, assembled entrywise so the Gaussian
    /// factors combine before any overflow.
    pub fn eval(&self, z: C64) -> Result<M3> {
        if classify_cross(z).is_some() {
            return Err(Error::BranchCut { k: z, dist: 0.0 });
        }
        let p = &self.params;
        if p.q_combo().norm() == 0.0 && p.nu_hat2.abs() < 1e-13 {
            // all cross jumps trivial in the degenerate case, except for the
            // pure power jumps which still cancel; psi is diagonal there
        }
        let binv = self.b_factor(z).inv()?;
        let b32 = binv.0[2][1];
        let b23 = binv.0[1][2];
        let i = C64::new(0.0, 1.0);
        let a5 = C64::new(0.0, p.nu5 - p.nu4 / 2.0);
        let a0 = C64::new(0.0, p.nu2 - p.nu4 / 2.0);
        // bounded power factors (imaginary exponents)
        let f2 = pow0(z, -a0) * powp(z, -a5);
        let f3 = pow0(z, a0) * powp(z, a5);
        let (p33, dp33) = self.psi.psi33_scaled(z);
        let (p22, dp22) = self.psi.psi22_scaled(z);
        let degenerate = p.nu_hat2.abs() < 1e-13 && p.q_combo().norm() < 1e-13;
        let (f23, f32) = if degenerate {
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (
                (i * dp33 + z / 2.0 * p33) / self.psi.b21, // psi_23 e^{-i z^2/4}
                (-i * dp22 + z / 2.0 * p22) / self.psi.b12, // psi_32 e^{+i z^2/4}
            )
        };
        let mut m = M3::identity();
        m.0[1][1] = p22 * f2;
        m.0[2][1] = f32 * f2;
        m.0[1][2] = f23 * f3;
        m.0[2][2] = p33 * f3;
        if b32.norm() > 0.0 {
            let e_half = (i * z * z / 2.0).exp(); // decays where b32 != 0
            m.0[1][1] += f23 * b32 * e_half * f2;
            m.0[2][1] += p33 * b32 * e_half * f2;
        }
        if b23.norm() > 0.0 {
            let e_half = (-i * z * z / 2.0).exp(); // decays where b23 != 0
            m.0[1][2] += p22 * b23 * e_half * f3;
            m.0[2][2] += f32 * b23 * e_half * f3;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params2_sample() -> ModelParams2 {
        ModelParams2::from_q2q5q6(
            C64::new(0.31, 0.12),
            C64::new(-0.22, 0.18),
            C64::new(0.35, -0.27),
        )
        .unwrap()
    }

    #[test]
    fn beta_products_equal_nu() {
        let p = ModelParams1::new(C64::from_polar(0.6, 1.1)).unwrap();
        let (b12, b21) = beta1(&p);
        let prod = b12 * b21;
        assert!(
            (prod - C64::new(p.nu, 0.0)).norm() < 1e-12,
            "beta12 beta21 = {prod} vs nu = {}",
            p.nu
        );
        let p2 = params2_sample();
        let (c12, c21) = beta2(&p2);
        let prod = c12 * c21;
        assert!(
            (prod - C64::new(p2.nu_hat2, 0.0)).norm() < 1e-12,
            "beta12 beta21 = {prod} vs nu_hat2 = {}",
            p2.nu_hat2
        );
    }

    #[test]
    fn beta_vanishes_at_q_zero() {
        let p = ModelParams1::new(C64::new(0.0, 0.0)).unwrap();
        assert_eq!(p.nu, 0.0);
        let (b12, b21) = beta1(&p);
        assert_eq!(b12.norm(), 0.0);
        assert_eq!(b21.norm(), 0.0);
    }

    #[test]
    fn v_psi_constant_on_real_line_algebraically() {
        let p = params2_sample();
        let (plus, minus) = v_psi_products(&p);
        assert!(
            (plus - minus).norm_max() < 1e-12,
            "products differ by {:.3e}",
            (plus - minus).norm_max()
        );
    }

    #[test]
    fn psi_jump_constancy_numerically() {
        let m = ModelRhp2::new(params2_sample()).unwrap();
        let mut vs = Vec::new();
        for &x in &[-2.0f64, -1.0, 1.0, 2.0] {
            // Richardson toward the boundary from +-1e-6 offsets
            let v_at = |d: f64| -> M3 {
                let up = m.psi().eval(C64::new(x, d)).unwrap();
                let dn = m.psi().eval(C64::new(x, -d)).unwrap();
                dn.inv().unwrap() * up
            };
            let v1 = v_at(1e-6);
            let v2 = v_at(5e-7);
            let v = v2 + (v2 - v1); // eliminate the O(delta) drift
            vs.push(v);
        }
        for w in vs.windows(2) {
            let d = (w[0] - w[1]).norm_max();
            assert!(d < 1e-7, "v^psi varies along R by {d:.3e}");
        }
        // and it matches the algebraic product
        let (plus, _) = v_psi_products(&m.params);
        let d = (vs[2] - plus).norm_max();
        assert!(d < 1e-7, "v^psi differs from the algebraic product by {d:.3e}");
    }

    #[test]
    fn det_psi_is_z_independent() {
        let m = ModelRhp2::new(params2_sample()).unwrap();
        let dets: Vec<C64> = [
            C64::new(0.7, 0.4),
            C64::new(-1.3, 0.9),
            C64::new(2.0, -1.1),
            C64::new(-0.2, -2.2),
        ]
        .iter()
        .map(|&z| m.psi().eval(z).unwrap().det())
        .collect();
        for d in &dets[1..] {
            assert!((d - dets[0]).norm() < 1e-8, "det psi varies: {d} vs {}", dets[0]);
        }
    }

    #[test]
    fn psi_ode_residual() {
        // (d psi) psi^{-1} = -(i z / 2) sigma~ + [[0,0,0],[0,0,i b12],[0,-i b21,0]]
        let m = ModelRhp2::new(params2_sample()).unwrap();
        let (b12, b21) = m.beta();
        let i = C64::new(0.0, 1.0);
        for &z in &[
            C64::new(0.9, 0.7),
            C64::new(-1.4, 1.2),
            C64::new(0.3, -1.0),
            C64::new(-2.0, -0.4),
            C64::new(1.7, 2.0),
            C64::new(-0.6, 0.5),
        ] {
            let h = 1e-5;
            let psi = m.psi().eval(z).unwrap();
            let dpsi = (m.psi().eval(z + h).unwrap() - m.psi().eval(z - h).unwrap())
                .scale(C64::new(1.0 / (2.0 * h), 0.0));
            let lhs = dpsi * psi.inv().unwrap();
            let mut rhs = M3::zero();
            rhs.0[1][1] = -i * z / 2.0;
            rhs.0[2][2] = i * z / 2.0;
            rhs.0[1][2] = i * b12;
            rhs.0[2][1] = -i * b21;
            assert!(
                (lhs - rhs).norm_max() < 1e-7,
                "ODE residual {:.3e} at z = {z}",
                (lhs - rhs).norm_max()
            );
        }
    }

    #[test]
    fn model1_identity_at_q_zero() {
        let m = ModelRhp1::new(C64::new(0.0, 0.0)).unwrap();
        let z = C64::new(0.8, 0.9);
        assert!((m.eval(z).unwrap() - M3::identity()).norm_max() == 0.0);
    }

    fn jump_residual_on_ray<F>(eval: F, v: M3, z0: C64) -> f64
    where
        F: Fn(C64) -> M3,
    {
        // normal offsets with Richardson extrapolation toward the ray
        let n = C64::new(0.0, 1.0) * z0 / z0.norm(); // left normal
        let m_at = |d: f64| -> M3 {
            let p = eval(z0 + n * d);
            let q = eval(z0 - n * d);
            p - q * v
        };
        let r1 = m_at(1e-6);
        let r2 = m_at(5e-7);
        (r2 + (r2 - r1)).norm_max()
    }

    #[test]
    fn model1_jump_residuals() {
        let m = ModelRhp1::new(C64::from_polar(0.55, 0.8)).unwrap();
        for (ray, ang) in [
            (CrossRay::X1, PI / 4.0),
            (CrossRay::X2, 3.0 * PI / 4.0),
            (CrossRay::X3, -3.0 * PI / 4.0),
            (CrossRay::X4, -PI / 4.0),
        ] {
            for r in [1.0, 2.5] {
                let z0 = C64::from_polar(r, ang);
                let v = v_cross_1(&m.params, z0, ray).unwrap();
                let res = jump_residual_on_ray(|z| m.eval(z).unwrap(), v, z0);
                assert!(res < 1e-7, "{ray:?} at |z| = {r}: residual {res:.3e}");
            }
        }
    }

    #[test]
    fn model2_jump_residuals() {
        let m = ModelRhp2::new(params2_sample()).unwrap();
        for (ray, ang) in [
            (CrossRay::X1, PI / 4.0),
            (CrossRay::X2, 3.0 * PI / 4.0),
            (CrossRay::X3, -3.0 * PI / 4.0),
            (CrossRay::X4, -PI / 4.0),
        ] {
            for r in [1.0, 2.5] {
                let z0 = C64::from_polar(r, ang);
                let v = v_cross_2(&m.params, z0, ray).unwrap();
                let res = jump_residual_on_ray(|z| m.eval(z).unwrap(), v, z0);
                assert!(res < 1e-7, "{ray:?} at |z| = {r}: residual {res:.3e}");
            }
        }
    }

    #[test]
    fn model2_jump_residual_on_real_line_vanishes() {
        // the jumps of psi, B and the diagonal powers cancel across R
        let m = ModelRhp2::new(params2_sample()).unwrap();
        for &x in &[-1.5f64, 0.8] {
            let z0 = C64::new(x, 0.0);
            let res = jump_residual_on_ray(|z| m.eval(z).unwrap(), M3::identity(), z0);
            assert!(res < 1e-7, "residual {res:.3e} across R at {x}");
        }
    }

    fn check_large_z(name: &str, eval: &dyn Fn(C64) -> M3, coeff: M3) {
        let mut worst50: f64 = 0.0;
        let mut worst200: f64 = 0.0;
        for &ang in &[PI / 8.0, 5.0 * PI / 8.0, -5.0 * PI / 8.0, -PI / 8.0] {
            for r in [50.0, 200.0] {
                let z = C64::from_polar(r, ang);
                let got = (eval(z) - M3::identity()).scale(z);
                let dev = (got - coeff).norm_max();
                if r == 50.0 {
                    worst50 = worst50.max(dev);
                } else {
                    worst200 = worst200.max(dev);
                }
            }
        }
        assert!(worst50 < 1e-3, "{name}: z(m - I) off by {worst50:.3e} at |z| = 50");
        assert!(
            worst200 < worst50 * 0.5,
            "{name}: no improvement at |z| = 200 ({worst200:.3e} vs {worst50:.3e})"
        );
    }

    #[test]
    fn large_z_coefficient_matches_beta_pattern() {
        let m1 = ModelRhp1::new(C64::from_polar(0.55, 0.8)).unwrap();
        check_large_z("model1", &|z| m1.eval(z).unwrap(), m1.m1_coefficient());
        let m2 = ModelRhp2::new(params2_sample()).unwrap();
        check_large_z("model2", &|z| m2.eval(z).unwrap(), m2.m1_coefficient());
    }

    #[test]
    fn degenerate_beta_limit() {
        // q6 = q2 q5 makes nu_hat2 = 0; off-diagonals collapse to the limit 0
        let q2 = C64::new(0.3, 0.1);
        let q5 = C64::new(0.2, -0.3);
        let q6 = q2 * q5;
        let p = ModelParams2::from_q2q5q6(q2, q5, q6).unwrap();
        assert!(p.nu_hat2.abs() < 1e-14);
        let m = ModelRhp2::new(p).unwrap();
        let psi = m.psi().eval(C64::new(0.7, 0.8)).unwrap();
        assert_eq!(psi.0[1][2], C64::new(0.0, 0.0));
        assert_eq!(psi.0[2][1], C64::new(0.0, 0.0));
    }
}

#[cfg(test)]
mod triviality_tests {
    use super::*;

    #[test]
    fn psi_first_row_and_column_trivial() {
        let p = ModelParams2::from_q2q5q6(
            C64::new(0.31, 0.12),
            C64::new(-0.22, 0.18),
            C64::new(0.35, -0.27),
        )
        .unwrap();
        let m = ModelRhp2::new(p).unwrap();
        let psi = m.psi().eval(C64::new(0.7, -1.1)).unwrap();
        assert_eq!(psi.0[0][0], C64::new(1.0, 0.0));
        for i in 1..3 {
            assert_eq!(psi.0[0][i], C64::new(0.0, 0.0));
            assert_eq!(psi.0[i][0], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn m1_zero_patterns() {
        // model 1 couples only (1,3)/(3,1); model 2 only (2,3)/(3,2)
        let m1 = ModelRhp1::new(C64::from_polar(0.5, 0.4)).unwrap();
        let c1 = m1.m1_coefficient();
        for i in 0..3 {
            for j in 0..3 {
                let expect_nonzero = (i, j) == (0, 2) || (i, j) == (2, 0);
                assert_eq!(c1.0[i][j].norm() > 0.0, expect_nonzero, "model1 ({i},{j})");
            }
        }
        let p = ModelParams2::from_q2q5q6(
            C64::new(0.31, 0.12),
            C64::new(-0.22, 0.18),
            C64::new(0.35, -0.27),
        )
        .unwrap();
        let m2 = ModelRhp2::new(p).unwrap();
        let c2 = m2.m1_coefficient();
        for i in 0..3 {
            for j in 0..3 {
                let expect_nonzero = (i, j) == (1, 2) || (i, j) == (2, 1);
                assert_eq!(c2.0[i][j].norm() > 0.0, expect_nonzero, "model2 ({i},{j})");
            }
        }
    }
}
