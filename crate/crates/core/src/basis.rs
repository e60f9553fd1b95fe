//! The basis `E_0 = 1, E_2 = wp, E_3 = -wp'/2, E_4 = wp^2, E_5 = -wp' wp/2, ...`
//! and exact arithmetic on its span.
//!
//! `E_{2k} = wp^k` and `E_{2k+3} = -wp' wp^k / 2`, so `E_m` has a pole of
//! order exactly `m` at the origin with Laurent head `z^{-m}`. There is no
//! `E_1`. Coefficient vectors are stored densely by degree with slot
//! `pos(m) = m - 1` for `m >= 2` and `pos(0) = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weierstrass::{TorusLattice, WpValues};

/// Storage slot of basis degree `m` (`m != 1`).
#[inline]
pub fn pos(m: usize) -> usize {
    debug_assert!(m != 1);
    if m == 0 {
        0
    } else {
        m - 1
    }
}

/// Basis degree stored in slot `p`.
#[inline]
pub fn degree_at(p: usize) -> usize {
    if p == 0 {
        0
    } else {
        p + 1
    }
}

/// Degrees `0, 2, 3, ..., n`.
pub fn degrees_up_to(n: usize) -> impl Iterator<Item = usize> {
    (0..=n).filter(|&m| m != 1)
}

pub fn check_degree(m: i64) -> Result<usize> {
    if m < 0 {
        return Err(Error::InvalidDegree {
            degree: 0,
            reason: "negative degree",
        });
    }
    if m == 1 {
        return Err(Error::InvalidDegree {
            degree: 1,
            reason: "the basis has no element of degree 1",
        });
    }
    Ok(m as usize)
}

/// `E_n(z)`.
pub fn basis_eval(lattice: &TorusLattice, n: i64, z: Complex64) -> Result<Complex64> {
    let n = check_degree(n)?;
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let v = lattice.wp_all(z)?;
    Ok(basis_from_values(n, v.wp, v.wp_prime))
}

fn basis_from_values(n: usize, wp: Complex64, wpp: Complex64) -> Complex64 {
    if n.is_multiple_of(2) {
        wp.powi((n / 2) as i32)
    } else {
        -0.5 * wpp * wp.powi(((n - 3) / 2) as i32)
    }
}

/// Real combination of basis elements of degree at most `degree()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticPoly {
    coeffs: Vec<f64>,
}

impl EllipticPoly {
    pub fn zero() -> Self {
        EllipticPoly { coeffs: vec![0.0] }
    }

    /// `E_m`.
    pub fn basis(m: usize) -> Self {
        assert!(m != 1, "no basis element of degree 1");
        let mut p = Self::with_capacity_degree(m);
        p.coeffs[pos(m)] = 1.0;
        p
    }

    fn with_capacity_degree(m: usize) -> Self {
        EllipticPoly {
            coeffs: vec![0.0; pos(m) + 1],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        EllipticPoly { coeffs }
    }

    /// Coefficients by slot, see [`pos`].
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `E_m` (zero when absent or `m = 1`).
    pub fn coeff(&self, m: usize) -> f64 {
        if m == 1 {
            return 0.0;
        }
        self.coeffs.get(pos(m)).copied().unwrap_or(0.0)
    }

    /// Highest degree with a nonzero coefficient, or 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).map(degree_at).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficient of `z^{-degree}` at the origin, i.e. the leading
    /// coefficient, since every `E_m` has unit head.
    pub fn laurent_head(&self) -> f64 {
        self.coeff(self.degree())
    }

    fn ensure(&mut self, m: usize) {
        let need = pos(m) + 1;
        if self.coeffs.len() < need {
            self.coeffs.resize(need, 0.0);
        }
    }

    fn add_at(&mut self, m: usize, v: f64) {
        self.ensure(m);
        self.coeffs[pos(m)] += v;
    }

    pub fn scale(&self, s: f64) -> Self {
        EllipticPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &EllipticPoly) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    pub fn sub(&self, other: &EllipticPoly) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Largest absolute coefficient difference.
    pub fn max_diff(&self, other: &EllipticPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0.0);
                let b = other.coeffs.get(i).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Zero-padded coefficients up to degree `n`.
    pub fn padded(&self, n: usize) -> Vec<f64> {
        let len = pos(n) + 1;
        let mut v = self.coeffs.clone();
        v.resize(len.max(v.len()), 0.0);
        v
    }

    fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(p, c)| (degree_at(p), *c))
    }

    /// `wp * self`: `wp E_m = E_{m+2}`.
    pub fn mul_wp(&self) -> Self {
        let mut out = EllipticPoly::zero();
        for (m, c) in self.terms() {
            out.add_at(m + 2, c);
        }
        out
    }

    /// `wp' * self`, reduced with `wp'^2 = 4 wp^3 - g2 wp - g3`.
    pub fn mul_wp_prime(&self, g2: f64, g3: f64) -> Self {
        let mut out = EllipticPoly::zero();
        for (m, c) in self.terms() {
            if m % 2 == 0 {
                // wp' wp^k = -2 E_{2k+3}
                out.add_at(m + 3, -2.0 * c);
            } else {
                // wp' E_{2k+3} = -wp'^2 wp^k / 2
                let k = (m - 3) / 2;
                out.add_at(2 * k + 6, -2.0 * c);
                out.add_at(2 * k + 2, 0.5 * g2 * c);
                out.add_at(2 * k, 0.5 * g3 * c);
            }
        }
        out
    }

    /// `d/dz self`, reduced with the curve equation and `wp'' = 6 wp^2 - g2/2`.
    pub fn derivative(&self, g2: f64, g3: f64) -> Self {
        let mut out = EllipticPoly::zero();
        for (m, c) in self.terms() {
            if m % 2 == 0 {
                let k = m / 2;
                if k > 0 {
                    out.add_at(2 * k + 1, -2.0 * k as f64 * c);
                }
            } else {
                let k = (m - 3) / 2;
                let kf = k as f64;
                out.add_at(2 * k + 4, -(3.0 + 2.0 * kf) * c);
                out.add_at(2 * k, 0.25 * g2 * (1.0 + 2.0 * kf) * c);
                if k > 0 {
                    out.add_at(2 * k - 2, 0.5 * kf * g3 * c);
                }
            }
        }
        out
    }

    /// Value from `wp(z)` and `wp'(z)`, by Horner in `wp` on the even and
    /// odd parts separately.
    pub fn eval_values(&self, wp: Complex64, wp_prime: Complex64) -> Complex64 {
        let (even, odd) = self.horner(wp);
        even - 0.5 * wp_prime * odd
    }

    /// Real version of [`eval_values`](Self::eval_values).
    pub fn eval_real(&self, wp: f64, wp_prime: f64) -> f64 {
        let mut even = 0.0;
        let mut odd = 0.0;
        let mut p = self.coeffs.len();
        while p > 0 {
            p -= 1;
            if degree_at(p).is_multiple_of(2) {
                even = even * wp + self.coeffs[p];
            } else {
                odd = odd * wp + self.coeffs[p];
            }
        }
        even - 0.5 * wp_prime * odd
    }

    fn horner(&self, wp: Complex64) -> (Complex64, Complex64) {
        let mut even = Complex64::new(0.0, 0.0);
        let mut odd = Complex64::new(0.0, 0.0);
        let mut p = self.coeffs.len();
        while p > 0 {
            p -= 1;
            let m = degree_at(p);
            if m.is_multiple_of(2) {
                even = even * wp + self.coeffs[p];
            } else {
                odd = odd * wp + self.coeffs[p];
            }
        }
        (even, odd)
    }

    pub fn eval_at(&self, v: &WpValues) -> Complex64 {
        self.eval_values(v.wp, v.wp_prime)
    }

    pub fn eval(&self, lattice: &TorusLattice, z: Complex64) -> Result<Complex64> {
        if self.degree() == 0 {
            return Ok(Complex64::new(self.coeff(0), 0.0));
        }
        let v = lattice.wp_all(z)?;
        Ok(self.eval_at(&v))
    }
}
