//! Riemann-Hilbert matrix
//!
//! ```text
//! Y_n(z) = [ P_n(z)                    C(P_n)(z)                   ]
//!          [ (2 pi i / h_{n-1}) P_{n-1}  (2 pi i / h_{n-1}) C(P_{n-1}) ]
//! ```
//!
//! with the weighted elliptic Cauchy transform
//! `C(p)(z) = (1 / 2 pi i) int_gamma p(w) w(w) (zeta(w - z) - zeta(w)) dw`.
//! The weight has to sit inside the transform for the jump
//! `Y_+ = Y_- [[1, w], [0, 1]]` to hold.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::basis::EllipticPoly;
use crate::error::{Error, Result};
use crate::family::EopFamily;
use crate::quadrature::QuadratureRule;
use crate::recurrence::FiveTermCoefficients;

/// Closer than this to `gamma` the transform refuses to evaluate.
pub const MIN_CONTOUR_DISTANCE: f64 = 1e-6;
/// Below this distance the pole of `zeta(w - z)` is subtracted out.
const SUBTRACT_BELOW: f64 = 0.1;
const MIN_RULE_ORDER: usize = 256;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// Cauchy transform of one polynomial against the family's weight, with the
/// `z`-independent pieces precomputed on the nodes.
#[derive(Debug, Clone)]
pub struct CauchyTransform<'a> {
    fam: &'a EopFamily,
    poly: EllipticPoly,
    nodes: Vec<Complex64>,
    qw: Vec<f64>,
    /// `p w` at the nodes
    f: Vec<f64>,
    /// `int p w`
    total: f64,
    /// `int p w zeta(w)`
    zeta_moment: Complex64,
}

impl<'a> CauchyTransform<'a> {
    pub fn new(fam: &'a EopFamily, poly: EllipticPoly) -> Result<Self> {
        let lat = fam.lattice();
        let rule = QuadratureRule::new(lat, fam.rule().order().max(MIN_RULE_ORDER))?;
        let nodes = rule.nodes();
        let qw = rule.weights().to_vec();
        let mut f = Vec::with_capacity(nodes.len());
        let mut zeta_moment = Complex64::new(0.0, 0.0);
        let mut total = 0.0;
        for (z, q) in nodes.iter().zip(&qw) {
            let v = lat.wp_all(*z)?;
            let (wp, wpp) = (v.wp.re, v.wp_prime.re);
            let fj = poly.eval_real(wp, wpp) * fam.weight().value_from(wp, wpp);
            total += q * fj;
            zeta_moment += q * fj * lat.zeta(*z)?;
            f.push(fj);
        }
        Ok(CauchyTransform {
            fam,
            poly,
            nodes,
            qw,
            f,
            total,
            zeta_moment,
        })
    }

    pub fn poly(&self) -> &EllipticPoly {
        &self.poly
    }

    /// `int_gamma p w`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `p(z) w(z)` continued off `gamma`.
    pub fn density(&self, z: Complex64) -> Result<Complex64> {
        let lat = self.fam.lattice();
        let v = lat.wp_all(z)?;
        Ok(self.poly.eval_values(v.wp, v.wp_prime) * self.fam.weight().eval_analytic(lat, z)?)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let lat = self.fam.lattice();
        let t = lat.tau_im();
        // shift into the strip 0 < Im z' <= t around gamma
        let k = (z.im / t).ceil() - 1.0;
        let zr = Complex64::new(z.re, z.im - k * t);
        let s = lat.gamma_offset(zr);
        if s.abs() < MIN_CONTOUR_DISTANCE {
            return Err(Error::TooCloseToContour { distance: s.abs() });
        }
        let eta1 = lat.eta1();
        let mut acc = Complex64::new(0.0, 0.0);
        if s.abs() > SUBTRACT_BELOW {
            for ((w, q), fj) in self.nodes.iter().zip(&self.qw).zip(&self.f) {
                acc += q * fj * lat.zeta(w - zr)?;
            }
            acc -= self.zeta_moment;
        } else {
            // p w is 1-periodic, so (f(w) - f(z)) zeta(w - z) is regular at
            // w = z and at its real translates.
            let fz = self.density(zr)?;
            for ((w, q), fj) in self.nodes.iter().zip(&self.qw).zip(&self.f) {
                acc += q * (fj - fz) * lat.zeta(w - zr)?;
            }
            // int_gamma zeta(w - z) dw, linear in z on each side of gamma
            let side = if s > 0.0 { I * PI } else { -I * PI };
            let g = -2.0 * eta1 * zr + eta1 * (1.0 + lat.tau()) + side;
            acc += fz * g - self.zeta_moment;
        }
        let shift = 2.0 * k * lat.eta3() * self.total;
        Ok((acc - shift) / two_pi_i())
    }
}

/// `Y_n` assembled from the monic polynomials of a family.
#[derive(Debug, Clone)]
pub struct RhSolution<'a> {
    fam: &'a EopFamily,
    n: usize,
    upper: CauchyTransform<'a>,
    lower: CauchyTransform<'a>,
    kappa: Complex64,
}

pub fn assemble_y(fam: &EopFamily, n: usize) -> Result<RhSolution<'_>> {
    if n < 3 || n > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "Riemann-Hilbert matrix needs 3 <= n <= N",
        });
    }
    Ok(RhSolution {
        fam,
        n,
        upper: CauchyTransform::new(fam, fam.monic(n)?)?,
        lower: CauchyTransform::new(fam, fam.monic(n - 1)?)?,
        kappa: two_pi_i() / fam.h(n - 1)?,
    })
}

impl<'a> RhSolution<'a> {
    pub fn degree(&self) -> usize {
        self.n
    }

    /// First column only. It has no jump across `gamma`.
    pub fn first_column(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let v = self.fam.lattice().wp_all(z)?;
        Ok((
            self.upper.poly().eval_values(v.wp, v.wp_prime),
            self.kappa * self.lower.poly().eval_values(v.wp, v.wp_prime),
        ))
    }

    pub fn eval(&self, z: Complex64) -> Result<Matrix2<Complex64>> {
        let (y11, y21) = self.first_column(z)?;
        Ok(Matrix2::new(
            y11,
            self.upper.eval(z)?,
            y21,
            self.kappa * self.lower.eval(z)?,
        ))
    }

    pub fn det(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z)?.determinant())
    }

    /// `max |Y(x + i eps) - Y(x - i eps) [[1, w(x)], [0, 1]]|` for a point of
    /// `gamma` given by its parameter `t`.
    pub fn jump_residual(&self, t: f64, eps: f64) -> Result<f64> {
        let lat = self.fam.lattice();
        let x = lat.gamma_point(t);
        let w = self.fam.weight().eval(lat, x)?;
        let plus = self.eval(x + I * eps)?;
        let minus = self.eval(x - I * eps)?;
        let jump = Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(w, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        Ok((plus - minus * jump).iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

pub fn det_y(fam: &EopFamily, n: usize, z: Complex64) -> Result<Complex64> {
    assemble_y(fam, n)?.det(z)
}

/// `(0 1) adj(Y_a(y)) Y_b(x) (1 0)^T`.
fn bracket(ya: &Matrix2<Complex64>, yb: &Matrix2<Complex64>) -> Complex64 {
    -ya[(1, 0)] * yb[(0, 0)] + ya[(0, 0)] * yb[(1, 0)]
}

/// Kernel from the Riemann-Hilbert matrices at `x + i eps`, `y + i eps`.
fn rhp_kernel(
    fam: &EopFamily,
    c5: &FiveTermCoefficients,
    ys: &[RhSolution<'_>; 3],
    n: usize,
    x: Complex64,
    y: Complex64,
) -> Result<Complex64> {
    let [y2, y1, y0] = ys;
    let h = |k: usize| fam.h(k);
    let (yx0, yy0) = (y0.eval(x)?, y0.eval(y)?);
    let (yx1, yy1) = (y1.eval(x)?, y1.eval(y)?);
    let (yx2, yy2) = (y2.eval(x)?, y2.eval(y)?);
    let ni = n as i64;
    let scale = |lo: f64, hi: f64| -lo / (two_pi_i() * (hi * lo).sqrt());
    let t_a1 = c5.a(ni - 1) * scale(h(n - 2)?, h(n)?) * (bracket(&yy1, &yx0) - bracket(&yx1, &yy0));
    let t_a2 = c5.a(ni - 2) * scale(h(n - 3)?, h(n - 1)?) * (bracket(&yy2, &yx1) - bracket(&yx2, &yy1));
    // already antisymmetric
    let t_b = c5.b(ni - 1) * scale(h(n - 2)?, h(n - 1)?) * bracket(&yy1, &yx1);
    let lat = fam.lattice();
    Ok((t_a1 + t_a2 + t_b) / (lat.wp(x)? - lat.wp(y)?))
}

/// `|K^_n(x, y) - K_RHP(x, y)|` with the right side evaluated at offset
/// `eps` above `gamma` and one Richardson step in `eps`.
///
/// `K^_n` is real on `gamma x gamma` and the first columns are analytic
/// across it, so the `O(eps)` part of the boundary value is `i eps` times a
/// real tangential derivative. The real part is even in `eps` and the step
/// `(4 F(eps/2) - F(eps)) / 3` leaves `O(eps^4)`.
pub fn cd_rhp_identity(
    fam: &EopFamily,
    c5: &FiveTermCoefficients,
    n: usize,
    x: Complex64,
    y: Complex64,
    eps: f64,
) -> Result<f64> {
    if n < 5 || n > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "Riemann-Hilbert kernel identity needs 5 <= n <= N",
        });
    }
    let lat = fam.lattice();
    for z in [x, y] {
        if lat.gamma_offset(z).abs() > 1e-12 {
            return Err(Error::OffContour { re: z.re, im: z.im });
        }
    }
    let gap = (lat.wp(x)? - lat.wp(y)?).norm();
    if gap < crate::cd_kernel::SWITCH_THRESHOLD {
        return Err(Error::NearConfluent { gap });
    }
    let ys = [assemble_y(fam, n - 2)?, assemble_y(fam, n - 1)?, assemble_y(fam, n)?];
    let at = |e: f64| rhp_kernel(fam, c5, &ys, n, x + I * e, y + I * e);
    let rich = (4.0 * at(0.5 * eps)?.re - at(eps)?.re) / 3.0;
    let k = crate::cd_kernel::CdKernel::with_coefficients(fam, n, c5.clone())?.kernel_sum(x, y)?;
    Ok((rich - k).abs())
}
