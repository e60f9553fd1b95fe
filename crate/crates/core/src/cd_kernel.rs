//! Christoffel-Darboux kernel `K^_n(x, y) = sum_{j <= n-2, j != 1} pi_j(x) pi_j(y)`
//! in sum and closed form, its diagonal limits, and the weighted
//! correlation kernel `K_n(x, y) = sqrt(w(x) w(y)) K^_{n+1}(x, y)`.
//!
//! Closed form, with `N(x, y)` the numerator:
//!
//! ```text
//! (wp(x) - wp(y)) K^_n(x, y) = a_{n-1} [pi_n(x) pi_{n-2}(y) - pi_n(y) pi_{n-2}(x)]
//!                            + a_{n-2} [pi_{n-1}(x) pi_{n-3}(y) - pi_{n-1}(y) pi_{n-3}(x)]
//!                            + b_{n-1} [pi_{n-1}(x) pi_{n-2}(y) - pi_{n-1}(y) pi_{n-2}(x)]
//! ```
//!
//! On the diagonal `K^_n(x, x) = d_x N / wp'(x)`, and where `wp'(x) = 0` the
//! second-order limit gives `K^_n(x, x) = (second-derivative brackets) / wp''(x)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::EllipticPoly;
use crate::error::{Error, Result};
use crate::family::EopFamily;
use crate::recurrence::{extract_five_term, FiveTermCoefficients};

/// Below this `|wp(x) - wp(y)|` the closed form is not used.
pub const SWITCH_THRESHOLD: f64 = 1e-4;
/// `|wp'(x)|` at or below this is a degenerate point.
pub const DEGENERATE_SLOPE: f64 = 1e-8;

const CONTOUR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPath {
    ClosedForm,
    Confluent,
    Degenerate,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub path: KernelPath,
}

/// Everything the kernel formulas need at one point of `gamma`.
#[derive(Debug, Clone)]
pub struct GammaPoint {
    pub z: Complex64,
    pub wp: f64,
    pub wp_prime: f64,
    pub wp_second: f64,
    pub w: f64,
    /// `pi_j`, `pi_j'`, `pi_j''` for `j = 0..=n` (index 1 is zero)
    pub pi: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub struct CdKernel<'a> {
    fam: &'a EopFamily,
    n: usize,
    c5: Option<FiveTermCoefficients>,
    d1: Vec<EllipticPoly>,
    d2: Vec<EllipticPoly>,
}

fn on_gamma(fam: &EopFamily, z: Complex64) -> Result<()> {
    if fam.lattice().gamma_offset(z).abs() > CONTOUR_TOL {
        return Err(Error::OffContour { re: z.re, im: z.im });
    }
    Ok(())
}

impl<'a> CdKernel<'a> {
    /// Kernel of order `n` (`2 <= n <= N`). The closed form additionally
    /// needs `n >= 4` and `N >= 4`.
    pub fn new(fam: &'a EopFamily, n: usize) -> Result<Self> {
        let c5 = if fam.max_degree() >= 4 {
            Some(extract_five_term(fam)?)
        } else {
            None
        };
        Self::build(fam, n, c5)
    }

    pub fn with_coefficients(fam: &'a EopFamily, n: usize, c5: FiveTermCoefficients) -> Result<Self> {
        Self::build(fam, n, Some(c5))
    }

    fn build(fam: &'a EopFamily, n: usize, c5: Option<FiveTermCoefficients>) -> Result<Self> {
        if n < 2 || n > fam.max_degree() {
            return Err(Error::InvalidDegree {
                degree: n,
                reason: "kernel order must satisfy 2 <= n <= N",
            });
        }
        let (g2, g3) = (fam.lattice().g2(), fam.lattice().g3());
        let polys: Vec<EllipticPoly> = (0..=n).map(|j| fam.ortho(j).expect("j <= N")).collect();
        let d1: Vec<EllipticPoly> = polys.iter().map(|p| p.derivative(g2, g3)).collect();
        let d2 = d1.iter().map(|p| p.derivative(g2, g3)).collect();
        Ok(CdKernel { fam, n, c5, d1, d2 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &EopFamily {
        self.fam
    }

    pub fn point(&self, z: Complex64) -> Result<GammaPoint> {
        on_gamma(self.fam, z)?;
        let v = self.fam.lattice().wp_all(z)?;
        let (wp, wpp) = (v.wp.re, v.wp_prime.re);
        let mut pi = self.fam.eval_all_real(wp, wpp);
        pi.truncate(self.n + 1);
        Ok(GammaPoint {
            z,
            wp,
            wp_prime: wpp,
            wp_second: v.wp_second.re,
            w: self.fam.weight().value_from(wp, wpp),
            d1: self.d1.iter().map(|p| p.eval_real(wp, wpp)).collect(),
            d2: self.d2.iter().map(|p| p.eval_real(wp, wpp)).collect(),
            pi,
        })
    }

    fn sum_at(&self, x: &GammaPoint, y: &GammaPoint) -> f64 {
        (0..=self.n - 2).filter(|&j| j != 1).map(|j| x.pi[j] * y.pi[j]).sum()
    }

    pub fn kernel_sum(&self, x: Complex64, y: Complex64) -> Result<f64> {
        let (px, py) = (self.point(x)?, self.point(y)?);
        Ok(self.sum_at(&px, &py))
    }

    fn coefficients(&self) -> Result<(f64, f64, f64)> {
        if self.n < 4 {
            return Err(Error::InvalidDegree {
                degree: self.n,
                reason: "closed form needs n >= 4",
            });
        }
        let c5 = self.c5.as_ref().ok_or(Error::InsufficientDegree {
            have: self.fam.max_degree(),
            need: 4,
        })?;
        let n = self.n as i64;
        Ok((c5.a(n - 1), c5.a(n - 2), c5.b(n - 1)))
    }

    /// The three antisymmetric brackets, with `f` and `g` selecting which
    /// derivative order of `pi` sits in each slot.
    fn brackets(&self, f: &[f64], g: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let (a1, a2, b1) = self.coefficients()?;
        let n = self.n;
        Ok(a1 * (f[n] * g[n - 2] - u[n] * v[n - 2])
            + a2 * (f[n - 1] * g[n - 3] - u[n - 1] * v[n - 3])
            + b1 * (f[n - 1] * g[n - 2] - u[n - 1] * v[n - 2]))
    }

    /// Closed form without any switching. Fails near the diagonal.
    pub fn closed_form(&self, x: Complex64, y: Complex64) -> Result<f64> {
        let (px, py) = (self.point(x)?, self.point(y)?);
        self.closed_form_at(&px, &py)
    }

    fn closed_form_at(&self, px: &GammaPoint, py: &GammaPoint) -> Result<f64> {
        let num = self.brackets(&px.pi, &py.pi, &py.pi, &px.pi)?;
        Ok(num / (px.wp - py.wp))
    }

    /// Closed form away from the diagonal; confluent or degenerate limit
    /// when `x = y`; the plain sum for distinct points with nearly equal
    /// `wp` (mirror pairs). The path taken is reported.
    pub fn kernel_cd(&self, x: Complex64, y: Complex64) -> Result<KernelValue> {
        let (px, py) = (self.point(x)?, self.point(y)?);
        self.kernel_cd_at(&px, &py)
    }

    /// [`kernel_cd`](Self::kernel_cd) on points already evaluated by
    /// [`point`](Self::point), for grids.
    pub fn kernel_cd_at(&self, px: &GammaPoint, py: &GammaPoint) -> Result<KernelValue> {
        let (x, y) = (px.z, py.z);
        if (px.wp - py.wp).abs() >= SWITCH_THRESHOLD {
            return Ok(KernelValue {
                value: self.closed_form_at(px, py)?,
                path: KernelPath::ClosedForm,
            });
        }
        if (x - y).norm() < 1e-12 {
            if px.wp_prime.abs() > DEGENERATE_SLOPE {
                return Ok(KernelValue {
                    value: self.confluent_at(px)?,
                    path: KernelPath::Confluent,
                });
            }
            return Ok(KernelValue {
                value: self.degenerate_at(px)?,
                path: KernelPath::Degenerate,
            });
        }
        Ok(KernelValue {
            value: self.sum_at(px, py),
            path: KernelPath::Sum,
        })
    }

    fn confluent_at(&self, p: &GammaPoint) -> Result<f64> {
        if p.wp_prime.abs() <= DEGENERATE_SLOPE {
            return Err(Error::DegeneratePoint);
        }
        Ok(self.brackets(&p.d1, &p.pi, &p.pi, &p.d1)? / p.wp_prime)
    }

    /// `K^_n(x, x)` from first derivatives.
    pub fn kernel_confluent(&self, x: Complex64) -> Result<f64> {
        let p = self.point(x)?;
        self.confluent_at(&p)
    }

    fn degenerate_at(&self, p: &GammaPoint) -> Result<f64> {
        Ok(self.brackets(&p.d2, &p.pi, &p.pi, &p.d2)? / p.wp_second)
    }

    fn check_degenerate(&self, x: Complex64) -> Result<()> {
        let frac = x.re - x.re.floor();
        let near = |c: f64| (frac - c).abs() < 1e-10 || (frac - c - 1.0).abs() < 1e-10;
        if near(0.0) || near(0.5) {
            Ok(())
        } else {
            Err(Error::NotDegenerate)
        }
    }

    /// `K^_n(x, x)` at `x in {tau/2, (1 + tau)/2}` from second derivatives.
    pub fn kernel_degenerate(&self, x: Complex64) -> Result<f64> {
        self.check_degenerate(x)?;
        let p = self.point(x)?;
        self.degenerate_at(&p)
    }

    /// First-derivative bracket with the sign pattern
    /// `a(pi pi'' - pi' pi)` on the first two terms, as it is often printed.
    pub fn confluent_printed(&self, x: Complex64) -> Result<f64> {
        let p = self.point(x)?;
        if p.wp_prime.abs() <= DEGENERATE_SLOPE {
            return Err(Error::DegeneratePoint);
        }
        Ok(self.printed_brackets(&p.pi, &p.d1)? / p.wp_prime)
    }

    /// Second-derivative analogue of [`confluent_printed`](Self::confluent_printed).
    pub fn degenerate_printed(&self, x: Complex64) -> Result<f64> {
        self.check_degenerate(x)?;
        let p = self.point(x)?;
        Ok(self.printed_brackets(&p.pi, &p.d2)? / p.wp_second)
    }

    fn printed_brackets(&self, pi: &[f64], d: &[f64]) -> Result<f64> {
        let (a1, a2, b1) = self.coefficients()?;
        let n = self.n;
        Ok(a1 * (pi[n] * d[n - 2] - d[n] * pi[n - 2])
            + a2 * (pi[n - 1] * d[n - 3] - d[n - 1] * pi[n - 3])
            + b1 * (d[n - 1] * pi[n - 2] - pi[n - 1] * d[n - 2]))
    }
}

// ---------------------------------------------------------------------------
// correlation kernel

/// Number of nonzero members in `K_n`: degrees `{0, 2, ..., n-1}`.
pub fn member_count(n: usize) -> usize {
    n.saturating_sub(1).max(1)
}

fn member_degrees(n: usize) -> Vec<usize> {
    (0..n.max(1)).filter(|&j| j != 1).collect()
}

fn check_correlation_order(fam: &EopFamily, n: usize) -> Result<()> {
    if n == 0 || n + 1 > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "correlation kernel needs 1 <= n and n + 1 <= N",
        });
    }
    Ok(())
}

/// `sqrt(w) pi_j` for the members of `K_n` at a point of `gamma`.
fn weighted_members(fam: &EopFamily, n: usize, z: Complex64) -> Result<Vec<f64>> {
    on_gamma(fam, z)?;
    let v = fam.lattice().wp_all(z)?;
    let (wp, wpp) = (v.wp.re, v.wp_prime.re);
    let sw = fam.weight().value_from(wp, wpp).sqrt();
    Ok(member_degrees(n)
        .into_iter()
        .map(|j| sw * fam.ortho_ref(j).expect("member degree <= N").eval_real(wp, wpp))
        .collect())
}

/// `K_n(x, y) = sqrt(w(x) w(y)) sum_{j <= n-1, j != 1} pi_j(x) pi_j(y)`.
pub fn correlation_kernel(fam: &EopFamily, n: usize, x: Complex64, y: Complex64) -> Result<f64> {
    check_correlation_order(fam, n)?;
    let a = weighted_members(fam, n, x)?;
    let b = weighted_members(fam, n, y)?;
    Ok(a.iter().zip(&b).map(|(u, v)| u * v).sum())
}

/// Node values of the weighted members on the family's rule.
fn member_node_values(fam: &EopFamily, n: usize) -> Vec<Vec<f64>> {
    let sw: Vec<f64> = fam.node_data().w.iter().map(|w| w.sqrt()).collect();
    member_degrees(n)
        .into_iter()
        .map(|j| fam.node_values(j).iter().zip(&sw).map(|(a, b)| a * b).collect())
        .collect()
}

/// `int_gamma K_n(x, x) dx`; equals [`member_count`].
pub fn correlation_trace(fam: &EopFamily, n: usize) -> Result<f64> {
    check_correlation_order(fam, n)?;
    let qw = fam.rule().weights();
    let members = member_node_values(fam, n);
    Ok((0..qw.len())
        .map(|i| qw[i] * members.iter().map(|m| m[i] * m[i]).sum::<f64>())
        .sum())
}

/// `|int K_n(x, s) K_n(s, y) ds - K_n(x, y)|`.
pub fn reproducing_residual(fam: &EopFamily, n: usize, x: Complex64, y: Complex64) -> Result<f64> {
    check_correlation_order(fam, n)?;
    let a = weighted_members(fam, n, x)?;
    let b = weighted_members(fam, n, y)?;
    let members = member_node_values(fam, n);
    let qw = fam.rule().weights();
    let mut integral = 0.0;
    for i in 0..qw.len() {
        let kxs: f64 = a.iter().zip(&members).map(|(u, m)| u * m[i]).sum();
        let ksy: f64 = b.iter().zip(&members).map(|(u, m)| u * m[i]).sum();
        integral += qw[i] * kxs * ksy;
    }
    let direct: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum();
    Ok((integral - direct).abs())
}

/// `[K_n(x_i, x_j)]`.
pub fn kernel_matrix(fam: &EopFamily, n: usize, points: &[Complex64]) -> Result<DMatrix<f64>> {
    check_correlation_order(fam, n)?;
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&z| weighted_members(fam, n, z))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(points.len(), points.len(), |i, j| {
        rows[i].iter().zip(&rows[j]).map(|(u, v)| u * v).sum()
    }))
}

pub fn gram_determinant(fam: &EopFamily, n: usize, points: &[Complex64]) -> Result<f64> {
    Ok(kernel_matrix(fam, n, points)?.determinant())
}

/// `(det [sqrt(w(x_j)) pi_k(x_j)])^2` with `k` over the first `len(points)`
/// members. Equals `det [K_n(x_i, x_j)]` when `member_count(n) = len(points)`.
pub fn squared_member_determinant(fam: &EopFamily, points: &[Complex64]) -> Result<f64> {
    let m = points.len();
    let n = m + 1;
    check_correlation_order(fam, n)?;
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&z| weighted_members(fam, n, z))
        .collect::<Result<_>>()?;
    let d = DMatrix::from_fn(m, m, |i, k| rows[i][k]).determinant();
    Ok(d * d)
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Joint density of `m = len(points)` points: `det [K(x_i, x_j)] / m!`
/// using the kernel with exactly `m` members.
pub fn joint_pdf(fam: &EopFamily, points: &[Complex64]) -> Result<f64> {
    let m = points.len();
    if m == 0 {
        return Err(Error::InvalidParameter("joint_pdf needs at least one point".into()));
    }
    for i in 0..m {
        for j in 0..i {
            if (points[i] - points[j]).norm() < 1e-14 {
                return Err(Error::DuplicatePoints);
            }
        }
    }
    Ok(gram_determinant(fam, m + 1, points)? / factorial(m))
}

/// Compressed eigenproblem at a zero `x0` of `pi_{n+1}`: the first `n` rows
/// (degrees `0..n-1`, the `pi_1` row included) of the pentadiagonal matrix,
/// restricted to columns `0..=n`, applied to `(pi_0, ..., pi_n)(x0)` must
/// reproduce `wp(x0)` times the first `n` entries.
pub fn spectral_remark_residual(fam: &EopFamily, c5: &FiveTermCoefficients, n: usize, x0: Complex64) -> Result<f64> {
    if n < 2 || n > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "needs 2 <= n <= N",
        });
    }
    on_gamma(fam, x0)?;
    let v = fam.lattice().wp_all(x0)?;
    let pi = fam.eval_all_real(v.wp.re, v.wp_prime.re);
    let mut worst = 0.0_f64;
    for r in 0..n {
        let row: f64 = (0..=n)
            .map(|k| {
                if r == 1 && k == 1 {
                    c5.c(1) * pi[1]
                } else {
                    c5.coef(r as i64, k as i64) * pi[k]
                }
            })
            .sum();
        worst = worst.max((row - v.wp.re * pi[r]).abs());
    }
    Ok(worst)
}
