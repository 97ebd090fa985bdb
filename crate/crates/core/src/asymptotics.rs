//! The leading long-time term of the solution in the sector
//! `0 < x/t < 1/sqrt(3)`: two modulated cosines decaying like t^{-1/2},
//!
//! ```text
//! u(x,t) ~ A1~(zeta)/sqrt(t) cos a1~(zeta,t) + A2(zeta)/sqrt(t) cos a2~(zeta,t),
//! ```
//!
//! with amplitudes carrying sqrt(nu_1), sqrt(nu-hat_2) and phases combining
//! arg Gamma(i nu), the continuous arguments of d~_{1,0}, d~_{2,0}, and the
//! linear carriers -t Im Phi at the moving saddle points.
//!
//! The subleading error is O(ln t / t) and is not modeled; see
//! [`ERROR_ORDER`].

use crate::error::{Error, Result};
use crate::parametrix::ParametrixBundle;
use crate::phase::{l_func, omega, phi, r_tilde, PhaseId, SQRT3};
use crate::special::arg_gamma_i_nu;
use crate::spectral::SpectralData;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

/// Order of the unmodeled correction term.
pub const ERROR_ORDER: &str = "ln t / t";

/// Total zeta-derivative of Im Phi_id at the moving saddle point. The
/// stationarity of the saddle kills the k-derivative, leaving
/// Im(l_i - l_j) evaluated there.
pub fn dphi_dzeta(id: PhaseId, zeta: f64) -> Result<f64> {
    let s = crate::parametrix::Saddles::new(zeta)?;
    let k = match id {
        PhaseId::P31 => s.wk4,
        PhaseId::P32 => s.w2k2,
        PhaseId::P21 => {
            return Err(Error::domain(
                "the leading term tracks the saddles of Phi_31 and Phi_32",
            ))
        }
    };
    let (i, j) = id.indices();
    Ok((l_func(i, k)? - l_func(j, k)?).im)
}

/// The q coefficients entering the local model problem near w^2 k2 and the
/// amplitude/phase of the first term.
#[derive(Clone, Copy, Debug)]
pub struct QCoefficients {
    pub q_tilde1: C64,
    pub q2: C64,
    pub q4: C64,
    pub q5: C64,
    pub q6: C64,
    /// residual of q4 - conj(q5) - q2 conj(q6) after the branch audit
    pub admissibility_residual: f64,
    /// true when the principal branch of r_tilde(w^2 k2)^{1/2} had to be
    /// flipped to satisfy the constraint
    pub q2_sign_flipped: bool,
}

pub fn q_coefficients(zeta: f64, sd: &SpectralData) -> Result<QCoefficients> {
    let s = crate::parametrix::Saddles::new(zeta)?;
    let k4 = s.set.k4;
    let k2 = s.set.k2;
    let k_star = s.w2k2;
    let sqrt_abs = |k: C64| -> Result<f64> { Ok(r_tilde(k)?.norm().sqrt()) };
    let q_tilde1 = sqrt_abs(k4)? * sd.r1(k4)?;
    let q5 = sqrt_abs(omega() * k2)? * sd.r1(omega() * k2)?;
    let q6 = sqrt_abs(1.0 / k2)? * sd.r1(1.0 / k2)?;
    // q4 = |r~(1/(w^2 k*))|^{1/2} r1(1/(w^2 k*)), 1/(w^2 k*) = 1/(w k2)
    let q4_arg = 1.0 / (omega() * k2);
    let q4 = sqrt_abs(q4_arg)? * sd.r1(q4_arg)?;
    // q2 carries the complex square root of r_tilde; principal branch with a
    // sign audit against the admissibility constraint
    let mut q2 = r_tilde(k_star)?.sqrt() * sd.r1(k_star)?;
    let res = |q2: C64| (q4 - q5.conj() - q2 * q6.conj()).norm();
    let mut flipped = false;
    if res(q2) > 1e-9 && res(-q2) < res(q2) {
        q2 = -q2;
        flipped = true;
    }
    Ok(QCoefficients {
        q_tilde1,
        q2,
        q4,
        q5,
        q6,
        admissibility_residual: res(q2),
        q2_sign_flipped: flipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WhichSaddle {
    /// the term from the saddle at omega k4 (Phi_31 family)
    OmegaK4,
    /// the term from the saddle at omega^2 k2 (Phi_32 family)
    Omega2K2,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticTerm {
    pub amplitude: f64,
    /// full phase (radians, unreduced)
    pub phase: f64,
    /// the t-linear carrier part, -t Im Phi at the saddle
    pub carrier: f64,
    pub nu: f64,
    pub which: WhichSaddle,
}

impl AsymptoticTerm {
    pub fn contribution(&self, t: f64) -> f64 {
        self.amplitude / t.sqrt() * self.phase.cos()
    }
}

/// Both terms of the leading asymptotics at (zeta, t).
pub fn leading_term(
    bundle: &ParametrixBundle,
    q: &QCoefficients,
) -> Result<(f64, [AsymptoticTerm; 2])> {
    let zeta = bundle.zeta;
    let t = bundle.t;
    let n = &bundle.nus;
    let tol = 1e-12;
    if n.nu1 < -tol || n.nu_hat2 < -tol {
        return Err(Error::Admissibility(format!(
            "nu1 = {}, nu_hat2 = {} must be nonnegative",
            n.nu1, n.nu_hat2
        )));
    }
    let s = &bundle.saddles;
    let k4 = s.set.k4;
    let k2 = s.set.k2;

    // real positive denominators -i w k4 z1* and -i w^2 k2 z2*
    let den1 = (-C64::new(0.0, 1.0) * s.wk4 * bundle.z.z1).re;
    let den2 = (-C64::new(0.0, 1.0) * s.w2k2 * bundle.z.z2).re;

    let dphi31 = dphi_dzeta(PhaseId::P31, zeta)?;
    let dphi32 = dphi_dzeta(PhaseId::P32, zeta)?;

    let term1 = if n.nu1 <= 0.0 {
        AsymptoticTerm {
            amplitude: 0.0,
            phase: 0.0,
            carrier: -t * phi(PhaseId::P31, zeta, s.wk4)?.im,
            nu: n.nu1.max(0.0),
            which: WhichSaddle::OmegaK4,
        }
    } else {
        let amp = -4.0 * SQRT3 * n.nu1.sqrt() * dphi31
            / (den1 * r_tilde(1.0 / k4)?.norm().sqrt())
            * s.a1.sin();
        let carrier = -t * phi(PhaseId::P31, zeta, s.wk4)?.im;
        let phase = 3.0 * PI / 4.0 - q.q_tilde1.arg() + arg_gamma_i_nu(n.nu1)
            + bundle.arg_d10()
            + carrier;
        AsymptoticTerm {
            amplitude: amp,
            phase,
            carrier,
            nu: n.nu1,
            which: WhichSaddle::OmegaK4,
        }
    };

    let combo = q.q6 - q.q2 * q.q5;
    let term2 = if n.nu_hat2 <= 0.0 || combo.norm() == 0.0 {
        AsymptoticTerm {
            amplitude: 0.0,
            phase: 0.0,
            carrier: -t * phi(PhaseId::P32, zeta, s.w2k2)?.im,
            nu: n.nu_hat2.max(0.0),
            which: WhichSaddle::Omega2K2,
        }
    } else {
        let amp = -4.0 * SQRT3 * n.nu_hat2.sqrt() * r_tilde(1.0 / k2)?.norm().sqrt() * dphi32
            / den2
            * s.beta.sin();
        let carrier = -t * phi(PhaseId::P32, zeta, s.w2k2)?.im;
        let phase = 3.0 * PI / 4.0 - combo.arg() + arg_gamma_i_nu(n.nu_hat2)
            + bundle.arg_d20()
            + carrier;
        AsymptoticTerm {
            amplitude: amp,
            phase,
            carrier,
            nu: n.nu_hat2,
            which: WhichSaddle::Omega2K2,
        }
    };

    let u = term1.contribution(t) + term2.contribution(t);
    Ok((u, [term1, term2]))
}

// ---------------------------------------------------------------------------
// grid evaluation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub zeta: f64,
    pub t: f64,
    pub x: f64,
    pub u_leading: f64,
    pub amp1: f64,
    pub amp2: f64,
    pub phase1: f64,
    pub phase2: f64,
    pub nu1: f64,
    pub nu_hat2: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GridTable {
    pub rows: Vec<GridRow>,
    pub defects: Vec<String>,
    /// proximity warnings for zeta values close to the ends of the sector,
    /// where saddle points approach the sixth roots of unity
    pub warnings: Vec<String>,
}

fn grid_column(
    zeta: f64,
    ts: &[f64],
    sd: &SpectralData,
) -> (Vec<GridRow>, Vec<String>, Vec<String>) {
    let mut rows = Vec::new();
    let mut defects = Vec::new();
    let mut warnings = Vec::new();
    let margin = crate::phase::saddle_margin(zeta);
    if margin < 0.02 {
        warnings.push(format!(
            "zeta = {zeta}: saddle points within {margin:.3} of the sector ends"
        ));
    }
    // bundle at the smallest t; only the carrier and the t^{-i nu} factor
    // move with t, so rebuilds reuse the zeta-dependent quadratures via the
    // phase-increment law
    let t0 = ts.first().copied().unwrap_or(2.0);
    let base = match ParametrixBundle::build(zeta, t0, sd) {
        Ok(b) => b,
        Err(e) => {
            defects.push(format!("zeta = {zeta}: {e}"));
            return (rows, defects, warnings);
        }
    };
    let q = match q_coefficients(zeta, sd) {
        Ok(q) => q,
        Err(e) => {
            defects.push(format!("zeta = {zeta}: {e}"));
            return (rows, defects, warnings);
        }
    };
    for &t in ts {
        let bundle = match base.at_time(t) {
            Ok(b) => b,
            Err(e) => {
                defects.push(format!("zeta = {zeta}, t = {t}: {e}"));
                continue;
            }
        };
        match leading_term(&bundle, &q) {
            Ok((u, [t1, t2])) => rows.push(GridRow {
                zeta,
                t,
                x: zeta * t,
                u_leading: u,
                amp1: t1.amplitude,
                amp2: t2.amplitude,
                phase1: t1.phase,
                phase2: t2.phase,
                nu1: t1.nu,
                nu_hat2: t2.nu,
            }),
            Err(e) => defects.push(format!("zeta = {zeta}, t = {t}: {e}")),
        }
    }
    (rows, defects, warnings)
}

/// Term-level snapshot rows for JSON dumps.
#[derive(Clone, Debug, Serialize)]
pub struct TermSnapshot {
    pub zeta: f64,
    pub t: f64,
    pub terms: [AsymptoticTerm; 2],
}

/// Evaluate both cosine terms over a grid (snapshot form; the CSV-oriented
/// [`evaluate_grid`] carries the same numbers column-wise).
pub fn evaluate_terms(zetas: &[f64], ts: &[f64], sd: &SpectralData) -> Vec<TermSnapshot> {
    let cols = crate::par::map(zetas, |&zeta| {
        let mut out = Vec::new();
        let t0 = ts.first().copied().unwrap_or(2.0);
        let (Ok(base), Ok(q)) = (ParametrixBundle::build(zeta, t0, sd), q_coefficients(zeta, sd))
        else {
            return out;
        };
        for &t in ts {
            if let Ok(b) = base.at_time(t) {
                if let Ok((_, terms)) = leading_term(&b, &q) {
                    out.push(TermSnapshot { zeta, t, terms });
                }
            }
        }
        out
    });
    cols.into_iter().flatten().collect()
}

/// Evaluate the leading term over a (zeta, t) grid. Parallel over zeta with
/// the `parallel` feature; per-zeta bundles are shared across the t-axis.
pub fn evaluate_grid(zetas: &[f64], ts: &[f64], sd: &SpectralData) -> GridTable {
    let cols = crate::par::map(zetas, |&z| grid_column(z, ts, sd));
    collect_grid(cols)
}

/// Sequential twin of [`evaluate_grid`] (benchmark baseline).
pub fn evaluate_grid_seq(zetas: &[f64], ts: &[f64], sd: &SpectralData) -> GridTable {
    let cols = crate::par::map_seq(zetas, |&z| grid_column(z, ts, sd));
    collect_grid(cols)
}

fn collect_grid(cols: Vec<(Vec<GridRow>, Vec<String>, Vec<String>)>) -> GridTable {
    let mut table = GridTable::default();
    for (rows, defects, warnings) in cols {
        table.rows.extend(rows);
        table.defects.extend(defects);
        table.warnings.extend(warnings);
    }
    table
}


#[cfg(test)]
mod suppressed_window_tests {
    use super::*;
    use crate::spectral::synthetic::SyntheticParams;

    /// Killing the spectral window at the k4 saddle makes nu_1 vanish and
    /// short-circuits the first cosine term while the second stays active.
    #[test]
    fn nu1_zero_data_kills_first_term_only() {
        let mut params = SyntheticParams::from_seed(7);
        params.windows[0].amp = C64::new(0.0, 0.0);
        let sd = crate::spectral::SpectralData::synthetic_from_params(&params, 7);
        let zeta = 0.35;
        let b = crate::parametrix::ParametrixBundle::build(zeta, 50.0, &sd).unwrap();
        assert!(b.nus.nu1.abs() < 1e-12, "nu1 = {}", b.nus.nu1);
        assert!(b.nus.nu_hat2 > 1e-4, "nu_hat2 = {}", b.nus.nu_hat2);
        let q = q_coefficients(zeta, &sd).unwrap();
        let (_, [t1, t2]) = leading_term(&b, &q).unwrap();
        assert!(t1.amplitude.abs() < 1e-10, "amp1 = {}", t1.amplitude);
        assert!(t2.amplitude.abs() > 1e-4, "amp2 = {}", t2.amplitude);
    }

    /// The parallel and sequential grid evaluators produce identical bytes.
    #[test]
    fn parallel_and_sequential_grids_identical() {
        let sd = crate::spectral::SpectralData::synthetic(7);
        let zetas = [0.28, 0.36, 0.44];
        let ts = [10.0, 100.0];
        let a = evaluate_grid(&zetas, &ts, &sd);
        let b = evaluate_grid_seq(&zetas, &ts, &sd);
        assert_eq!(
            serde_json::to_string(&a.rows).unwrap(),
            serde_json::to_string(&b.rows).unwrap()
        );
    }
}
