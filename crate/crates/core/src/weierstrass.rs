//! Weierstrass functions on the rectangular torus `C / (Z + tau Z)` with
//! `tau = i * tau_im`.
//!
//! Every evaluation first reduces `z` into the period cell
//! `|Re z| <= 1/2, |Im z| <= tau_im / 2` and then sums the trigonometric
//! q-series with nome `q = exp(i pi tau) = exp(-pi tau_im)`. Inside that cell
//! the `n`-th series term is bounded by `exp(-n pi tau_im)`, so the default
//! 32 terms reach machine precision for `tau_im >= 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_SERIES_TERMS: usize = 32;
pub const MIN_SERIES_TERMS: usize = 8;

/// Distance from a lattice point below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-12;

const CONSISTENCY_TOL: f64 = 1e-10;

/// Lattice data for `Z + tau Z`, `tau = i * tau_im`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusLattice {
    tau_im: f64,
    series_terms: usize,
    q: f64,
    /// `q^{2n}` and `1 / (1 - q^{2n})` for `n = 1..=series_terms`.
    q2n: Vec<f64>,
    inv_1mq2n: Vec<f64>,
    eta1: f64,
    g2: f64,
    g3: f64,
    e1: f64,
    e2: f64,
    e3: f64,
}

/// `wp`, `wp'` and `wp''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpValues {
    pub wp: Complex64,
    pub wp_prime: Complex64,
    pub wp_second: Complex64,
}

struct Reduced {
    z: Complex64,
    /// `z_in = z + m + k tau`
    m: f64,
    k: f64,
}

impl TorusLattice {
    pub fn new(tau_im: f64) -> Result<Self> {
        Self::with_series_terms(tau_im, DEFAULT_SERIES_TERMS)
    }

    pub fn with_series_terms(tau_im: f64, series_terms: usize) -> Result<Self> {
        if !(tau_im > 0.0) || !tau_im.is_finite() {
            return Err(Error::NonPositiveTau(tau_im));
        }
        if series_terms < MIN_SERIES_TERMS {
            return Err(Error::InvalidParameter(format!(
                "series_terms must be >= {MIN_SERIES_TERMS}, got {series_terms}"
            )));
        }
        let q = (-PI * tau_im).exp();
        let q2 = q * q;
        let mut q2n = Vec::with_capacity(series_terms);
        let mut inv_1mq2n = Vec::with_capacity(series_terms);
        let mut power = 1.0;
        for _ in 0..series_terms {
            power *= q2;
            q2n.push(power);
            inv_1mq2n.push(1.0 / (1.0 - power));
        }

        // Lambert sums  sum_n n^j q^{2n} / (1 - q^{2n})  for j = 1, 3, 5.
        let lambert = |j: i32| -> f64 {
            q2n.iter()
                .zip(&inv_1mq2n)
                .enumerate()
                .map(|(i, (p, inv))| ((i + 1) as f64).powi(j) * p * inv)
                .rev()
                .sum()
        };
        let e2_series = 1.0 - 24.0 * lambert(1);
        let e4_series = 1.0 + 240.0 * lambert(3);
        let e6_series = 1.0 - 504.0 * lambert(5);

        let eta1 = PI * PI / 6.0 * e2_series;
        let g2 = 4.0 * PI.powi(4) / 3.0 * e4_series;
        let g3 = 8.0 * PI.powi(6) / 27.0 * e6_series;

        let mut lattice = TorusLattice {
            tau_im,
            series_terms,
            q,
            q2n,
            inv_1mq2n,
            eta1,
            g2,
            g3,
            e1: 0.0,
            e2: 0.0,
            e3: 0.0,
        };

        let tau = lattice.tau();
        lattice.e1 = lattice.wp(Complex64::new(0.5, 0.0))?.re;
        lattice.e2 = lattice.wp(0.5 * (1.0 + tau))?.re;
        lattice.e3 = lattice.wp(0.5 * tau)?.re;

        let residual = lattice.consistency_residual();
        if !(residual <= CONSISTENCY_TOL) {
            return Err(Error::TruncationTooCoarse {
                residual,
                terms: series_terms,
            });
        }
        Ok(lattice)
    }

    /// Largest violation of `e1+e2+e3 = 0` and of the symmetric-function
    /// identities for `g2`, `g3` (the latter relative to `max(1, |g|)`).
    pub fn consistency_residual(&self) -> f64 {
        let (e1, e2, e3) = (self.e1, self.e2, self.e3);
        let sum = (e1 + e2 + e3).abs();
        let g2_sym = -4.0 * (e1 * e2 + e2 * e3 + e3 * e1);
        let g3_sym = 4.0 * e1 * e2 * e3;
        let d2 = (g2_sym - self.g2).abs() / self.g2.abs().max(1.0);
        let d3 = (g3_sym - self.g3).abs() / self.g3.abs().max(1.0);
        sum.max(d2).max(d3)
    }

    pub fn tau_im(&self) -> f64 {
        self.tau_im
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, self.tau_im)
    }

    pub fn nome(&self) -> f64 {
        self.q
    }

    pub fn series_terms(&self) -> usize {
        self.series_terms
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn g3(&self) -> f64 {
        self.g3
    }

    /// `wp(1/2)`
    pub fn e1(&self) -> f64 {
        self.e1
    }

    /// `wp((1 + tau)/2)`
    pub fn e2(&self) -> f64 {
        self.e2
    }

    /// `wp(tau/2)`
    pub fn e3(&self) -> f64 {
        self.e3
    }

    /// `zeta(z + 1) = zeta(z) + 2 eta1`
    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    /// `zeta(z + tau) = zeta(z) + 2 eta3`, fixed by the Legendre relation
    /// `eta1 tau - eta3 = i pi`.
    pub fn eta3(&self) -> Complex64 {
        self.eta1 * self.tau() - Complex64::new(0.0, PI)
    }

    /// Point `tau/2 + t` on the A-cycle.
    pub fn gamma_point(&self, t: f64) -> Complex64 {
        Complex64::new(t, 0.5 * self.tau_im)
    }

    /// Signed vertical offset of `z` from the A-cycle through `tau/2`.
    pub fn gamma_offset(&self, z: Complex64) -> f64 {
        z.im - 0.5 * self.tau_im
    }

    fn reduce(&self, z: Complex64) -> Result<Reduced> {
        let k = (z.im / self.tau_im).round();
        let shifted = Complex64::new(z.re, z.im - k * self.tau_im);
        let m = shifted.re.round();
        let z = Complex64::new(shifted.re - m, shifted.im);
        if z.norm() <= POLE_GUARD {
            return Err(Error::PoleProximity {
                re: z.re + m,
                im: z.im + k * self.tau_im,
            });
        }
        Ok(Reduced { z, m, k })
    }

    /// Sums `sum_n n^j A_n (x^n +- y^n)` where `A_n = q^{2n}/(1-q^{2n})`,
    /// `x = e^{2 pi i z}`, `y = e^{-2 pi i z}`. Returns the `+` and `-`
    /// combinations for `j = 0..=3`.
    fn trig_sums(&self, z: Complex64) -> ([Complex64; 4], [Complex64; 4]) {
        let u = (Complex64::new(0.0, 2.0 * PI) * z).exp();
        let q2 = self.q * self.q;
        // |q^2 u|, |q^2 / u| <= exp(-pi tau_im) inside the reduced cell.
        let xu = q2 * u;
        let yu = q2 / u;
        let mut xp = Complex64::new(1.0, 0.0);
        let mut yp = Complex64::new(1.0, 0.0);
        let mut plus = [Complex64::new(0.0, 0.0); 4];
        let mut minus = [Complex64::new(0.0, 0.0); 4];
        for (i, inv) in self.inv_1mq2n.iter().enumerate() {
            xp *= xu;
            yp *= yu;
            let n = (i + 1) as f64;
            let s = (xp + yp) * *inv;
            let d = (xp - yp) * *inv;
            let mut nj = 1.0;
            for j in 0..4 {
                plus[j] += s * nj;
                minus[j] += d * nj;
                nj *= n;
            }
        }
        (plus, minus)
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        let r = self.reduce(z)?;
        let (plus, _) = self.trig_sums(r.z);
        let s = (PI * r.z).sin();
        // sum n A_n cos(2 n pi z) = plus[1] / 2
        Ok(-2.0 * self.eta1 + PI * PI / (s * s) - 4.0 * PI * PI * plus[1])
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        let r = self.reduce(z)?;
        Ok(self.wp_prime_reduced(r.z))
    }

    pub fn wp_second(&self, z: Complex64) -> Result<Complex64> {
        let r = self.reduce(z)?;
        Ok(self.wp_second_reduced(r.z))
    }

    fn wp_prime_reduced(&self, z: Complex64) -> Complex64 {
        let (_, minus) = self.trig_sums(z);
        let s = (PI * z).sin();
        let c = (PI * z).cos();
        // sum n^2 A_n sin(2 n pi z) = minus[2] / (2i)
        let i = Complex64::new(0.0, 1.0);
        -2.0 * PI.powi(3) * c / (s * s * s) + 8.0 * PI.powi(3) * minus[2] / i
    }

    fn wp_second_reduced(&self, z: Complex64) -> Complex64 {
        let (plus, _) = self.trig_sums(z);
        let s = (PI * z).sin();
        let c = (PI * z).cos();
        let s2 = s * s;
        2.0 * PI.powi(4) * (2.0 * c * c + 1.0) / (s2 * s2) + 16.0 * PI.powi(4) * plus[3]
    }

    /// `wp`, `wp'`, `wp''` from one reduction and one series pass.
    pub fn wp_all(&self, z: Complex64) -> Result<WpValues> {
        let r = self.reduce(z)?;
        let z = r.z;
        let (plus, minus) = self.trig_sums(z);
        let s = (PI * z).sin();
        let c = (PI * z).cos();
        let s2 = s * s;
        let i = Complex64::new(0.0, 1.0);
        let pi2 = PI * PI;
        Ok(WpValues {
            wp: -2.0 * self.eta1 + pi2 / s2 - 4.0 * pi2 * plus[1],
            wp_prime: -2.0 * PI * pi2 * c / (s2 * s) + 8.0 * PI * pi2 * minus[2] / i,
            wp_second: 2.0 * pi2 * pi2 * (2.0 * c * c + 1.0) / (s2 * s2) + 16.0 * pi2 * pi2 * plus[3],
        })
    }

    /// Weierstrass zeta, continued quasi-periodically from the reduced cell.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let r = self.reduce(z)?;
        let (_, minus) = self.trig_sums(r.z);
        let i = Complex64::new(0.0, 1.0);
        let base = 2.0 * self.eta1 * r.z + PI / (PI * r.z).tan() + 2.0 * PI * minus[0] / i;
        Ok(base + 2.0 * self.eta1 * r.m + 2.0 * r.k * self.eta3())
    }

    /// Residual of `wp'^2 = 4 wp^3 - g2 wp - g3` at `z`.
    pub fn curve_residual(&self, z: Complex64) -> Result<f64> {
        let v = self.wp_all(z)?;
        let rhs = 4.0 * v.wp * v.wp * v.wp - self.g2 * v.wp - self.g3;
        Ok((v.wp_prime * v.wp_prime - rhs).norm())
    }

    /// Real values of `(wp, wp')` at `tau/2 + t`.
    pub fn wp_on_gamma(&self, t: f64) -> Result<(f64, f64)> {
        let v = self.wp_all(self.gamma_point(t))?;
        Ok((v.wp.re, v.wp_prime.re))
    }

    /// Solves `wp(tau/2 + t) = value` for `t` in `[0, 1/2]`, where `wp` rises
    /// monotonically from `e3` to `e2`. Fixed 60 bisection steps.
    pub fn invert_wp_on_half_gamma(&self, value: f64) -> Result<f64> {
        let slack = 1e-12 * (self.e2 - self.e3).abs().max(1.0);
        if value < self.e3 - slack || value > self.e2 + slack {
            return Err(Error::InversionFailure { value });
        }
        let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let (wp, _) = self.wp_on_gamma(mid)?;
            if wp < value {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
