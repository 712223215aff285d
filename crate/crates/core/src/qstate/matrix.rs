use core::ops::{Add, AddAssign, Mul, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// Eigen-decomposition of a Hermitian 2×2 matrix. `values[0] <= values[1]`,
/// `vectors[k]` is the unit eigenvector for `values[k]`.
#[derive(Debug, Clone, Copy)]
pub struct Eigh {
    pub values: [f64; 2],
    pub vectors: [[C64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: [C64; 2], v: [C64; 2]) -> Self {
        Mat2([
            [u[0] * v[0].conj(), u[0] * v[1].conj()],
            [u[1] * v[0].conj(), u[1] * v[1].conj()],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        d.0.iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Closed-form decomposition. Only the Hermitian part of `self` is used.
    pub fn eigh(&self) -> Eigh {
        let h = self.hermitian_part();
        let a = h.0[0][0].re;
        let d = h.0[1][1].re;
        let c = h.0[0][1];
        let mean = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let r = (half * half + c.norm_sqr()).sqrt();
        let hi = mean + r;
        let lo = mean - r;

        // Two candidate null vectors of (H - hi·I); keep the better conditioned one.
        let v1 = [c, C64::from(hi - a)];
        let v2 = [C64::from(hi - d), c.conj()];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        let top = if n > 1e-300 {
            let s = 1.0 / n.sqrt();
            [v[0] * s, v[1] * s]
        } else if a >= d {
            [ONE, ZERO]
        } else {
            [ZERO, ONE]
        };
        // Orthogonal complement of `top`.
        let bottom = [-top[1].conj(), top[0].conj()];
        Eigh {
            values: [lo, hi],
            vectors: [bottom, top],
        }
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.eigh().values
    }

    /// Applies `f` to the spectrum of the Hermitian part.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let e = self.eigh();
        let lo = Mat2::outer(e.vectors[0], e.vectors[0]).scale(f(e.values[0]));
        let hi = Mat2::outer(e.vectors[1], e.vectors[1]).scale(f(e.values[1]));
        lo + hi
    }

    /// Sum of absolute eigenvalues of the Hermitian part.
    pub fn trace_norm(&self) -> f64 {
        let [lo, hi] = self.eigenvalues();
        lo.abs() + hi.abs()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.eigenvalues()[0] >= -tol
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl core::iter::Sum for Mat2 {
    fn sum<I: Iterator<Item = Mat2>>(iter: I) -> Mat2 {
        iter.fold(Mat2::ZERO, |acc, m| acc + m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hermitian(a: f64, d: f64, re: f64, im: f64) -> Mat2 {
        let c = C64::new(re, im);
        Mat2::new(a.into(), c, c.conj(), d.into())
    }

    #[test]
    fn diagonal_and_degenerate_spectra() {
        let e = Mat2::real(3.0, 0.0, 0.0, -1.0).eigh();
        assert_eq!(e.values, [-1.0, 3.0]);
        let e = Mat2::IDENTITY.eigh();
        assert_eq!(e.values, [1.0, 1.0]);
        let rebuilt = Mat2::IDENTITY.map_spectrum(|x| x);
        assert!(rebuilt.max_abs_diff(&Mat2::IDENTITY) < 1e-15);
    }

    #[test]
    fn pauli_x_trace_norm() {
        let x = Mat2::real(0.0, 1.0, 1.0, 0.0);
        assert_eq!(x.eigenvalues(), [-1.0, 1.0]);
        assert!((x.trace_norm() - 2.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn eigh_reconstructs(a in -3.0..3.0f64, d in -3.0..3.0f64, re in -2.0..2.0f64, im in -2.0..2.0f64) {
            let h = hermitian(a, d, re, im);
            let e = h.eigh();
            for k in 0..2 {
                let v = e.vectors[k];
                let hv = [h.0[0][0] * v[0] + h.0[0][1] * v[1], h.0[1][0] * v[0] + h.0[1][1] * v[1]];
                for i in 0..2 {
                    prop_assert!((hv[i] - v[i] * e.values[k]).norm() < 1e-10);
                }
            }
            prop_assert!(h.map_spectrum(|x| x).max_abs_diff(&h) < 1e-10);
            let sq = h.map_spectrum(|x| x * x);
            prop_assert!(sq.max_abs_diff(&(h * h)) < 1e-9);
        }
    }
}
