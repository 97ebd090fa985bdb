//! Small dense 3x3 complex matrices.
//!
//! The Riemann-Hilbert jump algebra only ever touches 3x3 matrices, so a
//! fixed-size type beats pulling in a linear-algebra crate.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct M3(pub [[C64; 3]; 3]);

impl M3 {
    pub fn zero() -> Self {
        M3([[C64::new(0.0, 0.0); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Matrix with a single off-diagonal entry `v` at (row, col), ones on the diagonal.
    pub fn elementary(row: usize, col: usize, v: C64) -> Self {
        let mut m = Self::identity();
        m.0[row][col] = v;
        m
    }

    pub fn diag(d1: C64, d2: C64, d3: C64) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = d1;
        m.0[1][1] = d2;
        m.0[2][2] = d3;
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn det(&self) -> C64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn inv(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return Err(Error::domain("singular 3x3 matrix"));
        }
        let a = &self.0;
        let mut c = Self::zero();
        // adjugate / det
        c.0[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d;
        c.0[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / d;
        c.0[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d;
        c.0[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / d;
        c.0[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d;
        c.0[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / d;
        c.0[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d;
        c.0[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / d;
        c.0[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d;
        Ok(c)
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        let mut n: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                n = n.max(self.0[i][j].norm());
            }
        }
        n
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] *= c;
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }
}

impl Mul for M3 {
    type Output = M3;
    fn mul(self, rhs: M3) -> M3 {
        let mut m = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..3 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }
}

impl Add for M3 {
    type Output = M3;
    fn add(self, rhs: M3) -> M3 {
        let mut m = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for M3 {
    type Output = M3;
    fn sub(self, rhs: M3) -> M3 {
        let mut m = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        m
    }
}

/// Cyclic symmetry matrix: maps e1 -> e2 -> e3 -> e1.
pub fn mat_a() -> M3 {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    M3([[o, o, l], [l, o, o], [o, l, o]])
}

/// Transposition symmetry matrix: swaps e1 and e2.
pub fn mat_b() -> M3 {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    M3([[o, l, o], [l, o, o], [o, o, l]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn symmetry_matrices_satisfy_group_relations() {
        let a = mat_a();
        let b = mat_b();
        assert!(((a * a * a) - M3::identity()).norm_max() == 0.0);
        assert!(((b * b) - M3::identity()).norm_max() == 0.0);
    }

    #[test]
    fn inverse_round_trip() {
        let m = M3([
            [c(1.0, 0.5), c(0.2, -0.1), c(0.0, 0.3)],
            [c(-0.4, 0.0), c(2.0, 0.1), c(0.5, 0.5)],
            [c(0.1, 0.1), c(0.0, -0.7), c(1.5, -0.2)],
        ]);
        let inv = m.inv().unwrap();
        assert!(((m * inv) - M3::identity()).norm_max() < 1e-14);
    }
}
