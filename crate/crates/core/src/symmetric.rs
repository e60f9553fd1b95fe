//! Symmetric weights, `w(1/2 + tau/2 + s) = w(1/2 + tau/2 - s)`.
//!
//! The family splits into even members `P_{2k} = sum_i a_{i,2k} wp^i` and odd
//! members `P_{2k+3} = -1/2 wp' sum_i a_{i,2k+3} wp^i`, each an ordinary
//! orthogonal family in the variable `wp`: the even one against `w dx`, the
//! odd one against `1/4 wp'^2 w dx`. Everything classical then applies.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::EllipticPoly;
use crate::error::{Error, Result};
use crate::family::EopFamily;
use crate::quadrature::{MomentTable, NodeData, QuadratureRule};
use crate::recurrence::{FiveTermCoefficients, SevenTermCoefficients};

/// Per-axis order of the tensor rules behind the multidimensional integrals.
pub const TENSOR_ORDER_2D: usize = 96;
pub const TENSOR_ORDER_3D: usize = 48;

fn require_symmetric(fam: &EopFamily) -> Result<()> {
    if fam.weight().is_symmetric() {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

// ---------------------------------------------------------------------------
// split

/// Coefficients of the monic members in powers of `wp`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitFamily {
    /// `even[k][i] = a_{i,2k}`
    pub even: Vec<Vec<f64>>,
    /// `odd[k][i] = a_{i,2k+3}`
    pub odd: Vec<Vec<f64>>,
    /// Largest wrong-parity coefficient in any orthonormal member.
    pub leak: f64,
}

pub fn split_family(fam: &EopFamily) -> Result<SplitFamily> {
    require_symmetric(fam)?;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut leak = 0.0_f64;
    for n in fam.degrees() {
        let p = fam.monic(n)?;
        let ortho = fam.ortho_ref(n).expect("listed degree");
        let parity_even = n % 2 == 0;
        for m in 0..=n {
            if m == 1 {
                continue;
            }
            if (m % 2 == 0) != parity_even {
                leak = leak.max(ortho.coeff(m).abs());
            }
        }
        if parity_even {
            even.push((0..=n / 2).map(|i| p.coeff(2 * i)).collect());
        } else {
            odd.push((0..=(n - 3) / 2).map(|i| p.coeff(2 * i + 3)).collect());
        }
    }
    Ok(SplitFamily { even, odd, leak })
}

// ---------------------------------------------------------------------------
// short recurrences

fn pi_at(fam: &EopFamily, z: Complex64) -> Result<Vec<Complex64>> {
    fam.eval_all(z)
}

/// `|wp pi_n - (a_{n+1} pi_{n+2} + c_n pi_n + a_{n-1} pi_{n-2})|`.
pub fn three_term_residual(fam: &EopFamily, c5: &FiveTermCoefficients, n: usize, z: Complex64) -> Result<f64> {
    require_symmetric(fam)?;
    if n == 1 || n + 2 > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "three-term relation needs n != 1 and n + 2 <= N",
        });
    }
    let pi = pi_at(fam, z)?;
    let wp = fam.lattice().wp(z)?;
    let ni = n as i64;
    let mut rhs = c5.c(ni) * pi[n] + c5.a(ni + 1) * pi[n + 2];
    if n >= 2 {
        rhs += c5.coef(ni, ni - 2) * pi[n - 2];
    }
    Ok((wp * pi[n] - rhs).norm())
}

/// `|wp' pi_n - (p_{n+3} pi_{n+3} + r_{n+1} pi_{n+1} + r_n pi_{n-1} + p_n pi_{n-3})|`.
pub fn four_term_residual(fam: &EopFamily, c7: &SevenTermCoefficients, n: usize, z: Complex64) -> Result<f64> {
    require_symmetric(fam)?;
    if n == 1 || n + 3 > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "four-term relation needs n != 1 and n + 3 <= N",
        });
    }
    let pi = pi_at(fam, z)?;
    let wpp = fam.lattice().wp_prime(z)?;
    let ni = n as i64;
    let mut rhs = Complex64::new(0.0, 0.0);
    for d in [-3_i64, -1, 1, 3] {
        let k = ni + d;
        if k >= 0 {
            rhs += c7.coef(ni, k) * pi[k as usize];
        }
    }
    Ok((wpp * pi[n] - rhs).norm())
}

/// `max |b|` and `max(|q|, |s|)`; both vanish for symmetric weights.
pub fn parity_leaks(c5: &FiveTermCoefficients, c7: &SevenTermCoefficients) -> (f64, f64) {
    let m = |v: &[f64]| v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    (m(&c5.b), m(&c7.q).max(m(&c7.s)))
}

// ---------------------------------------------------------------------------
// Jacobi matrix

/// Tridiagonal matrix of `wp` on `pi_0, pi_2, ..., pi_{2n-2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiMatrix {
    /// `beta_k = c_{2k}`
    pub beta: Vec<f64>,
    /// `alpha_k = a_{2k+1}`, coupling `pi_{2k}` and `pi_{2k+2}`
    pub alpha: Vec<f64>,
}

impl JacobiMatrix {
    pub fn size(&self) -> usize {
        self.beta.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.beta[i]
            } else if i + 1 == j {
                self.alpha[i]
            } else if j + 1 == i {
                self.alpha[j]
            } else {
                0.0
            }
        })
    }
}

pub fn build_jacobi(c5: &FiveTermCoefficients, n: usize) -> Result<JacobiMatrix> {
    if n == 0 || 2 * n - 2 > c5.n_max {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "Jacobi matrix of size n needs 1 <= n and 2n - 2 <= N",
        });
    }
    Ok(JacobiMatrix {
        beta: (0..n).map(|k| c5.c(2 * k as i64)).collect(),
        alpha: (0..n - 1).map(|k| c5.a(2 * k as i64 + 1)).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// ascending
    pub values: Vec<f64>,
    /// unit eigenvectors, `vectors[k]` belongs to `values[k]`
    pub vectors: Vec<Vec<f64>>,
    pub min_gap: f64,
}

pub fn jacobi_spectrum(j: &JacobiMatrix) -> Spectrum {
    let eig = SymmetricEigen::new(j.to_dense());
    let mut order: Vec<usize> = (0..j.size()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    let min_gap = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    Spectrum {
        values,
        vectors,
        min_gap,
    }
}

/// Smallest margin in `lo_1 < hi_1 < lo_2 < ... < hi_{n-1} < lo_n`, where
/// `lo` has one more eigenvalue than `hi`. Positive iff strict interlacing.
pub fn interlacing_margin(outer: &Spectrum, inner: &Spectrum) -> Result<f64> {
    let (a, b) = (&outer.values, &inner.values);
    if a.len() != b.len() + 1 {
        return Err(Error::InvalidParameter("interlacing needs sizes n and n - 1".into()));
    }
    let mut margin = f64::INFINITY;
    for (i, v) in b.iter().enumerate() {
        margin = margin.min(v - a[i]).min(a[i + 1] - v);
    }
    Ok(margin)
}

// ---------------------------------------------------------------------------
// Christoffel weights

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteMeasure {
    /// `t` with atom at `tau/2 + t`, `t in [0, 1/2]`
    pub params: Vec<f64>,
    pub wp: Vec<f64>,
    pub masses: Vec<f64>,
    /// `values[k][i] = pi_{2i}` at atom `k`
    pub values: Vec<Vec<f64>>,
}

impl DiscreteMeasure {
    pub fn atoms(&self, fam: &EopFamily) -> Vec<Complex64> {
        self.params.iter().map(|&t| fam.lattice().gamma_point(t)).collect()
    }

    /// `max |sum_k lambda_k pi_{2i} pi_{2j} - delta_ij|`.
    pub fn quadrature_residual(&self) -> f64 {
        let n = self.masses.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n)
                    .map(|k| self.masses[k] * self.values[k][i] * self.values[k][j])
                    .sum();
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - d).abs());
            }
        }
        worst
    }
}

pub fn christoffel_weights(fam: &EopFamily, spec: &Spectrum) -> Result<DiscreteMeasure> {
    require_symmetric(fam)?;
    let n = spec.values.len();
    if 2 * n - 2 > fam.max_degree() {
        return Err(Error::InsufficientDegree {
            have: fam.max_degree(),
            need: 2 * n - 2,
        });
    }
    let lat = fam.lattice();
    let mut out = DiscreteMeasure {
        params: Vec::with_capacity(n),
        wp: Vec::with_capacity(n),
        masses: Vec::with_capacity(n),
        values: Vec::with_capacity(n),
    };
    for &e in &spec.values {
        let t = lat.invert_wp_on_half_gamma(e)?;
        let (wp, wpp) = lat.wp_on_gamma(t)?;
        let all = fam.eval_all_real(wp, wpp);
        let v: Vec<f64> = (0..n).map(|i| all[2 * i]).collect();
        out.masses.push(1.0 / v.iter().map(|x| x * x).sum::<f64>());
        out.params.push(t);
        out.wp.push(wp);
        out.values.push(v);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Heine

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Degree of the `k`-th member of this parity.
    pub fn degree(self, k: usize) -> usize {
        match self {
            Parity::Even => 2 * k,
            Parity::Odd => 2 * k + 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeineReport {
    pub k: usize,
    pub parity: Parity,
    /// relative to `max |P|` over the test points
    pub det_vs_gs: f64,
    pub integral_vs_gs: Option<f64>,
    pub det_vs_integral: Option<f64>,
    /// least-squares constant `c` with `integral ~ c P`; 1 when the
    /// prefactor is right
    pub prefactor_fit: Option<f64>,
}

fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// Monic `P_{2k}` or `P_{2k+3}` from Hankel determinants of the moments.
pub fn heine_determinant(moments: &MomentTable, k: usize, parity: Parity, wp: f64, wp_prime: f64) -> Result<f64> {
    let m = match parity {
        Parity::Even => &moments.nu,
        Parity::Odd => &moments.nuhat,
    };
    if k == 0 {
        return Ok(match parity {
            Parity::Even => 1.0,
            Parity::Odd => -0.5 * wp_prime,
        });
    }
    if 2 * k > m.len() {
        return Err(Error::InsufficientDegree {
            have: m.len() / 2,
            need: k,
        });
    }
    let scale = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -0.5 * wp_prime,
    };
    let mut rows: Vec<Vec<f64>> = (0..k).map(|i| (0..=k).map(|j| m[i + j]).collect()).collect();
    rows.push((0..=k).map(|j| scale * wp.powi(j as i32)).collect());
    let hankel = det(&(0..k).map(|i| (0..k).map(|j| m[i + j]).collect()).collect::<Vec<_>>());
    Ok(det(&rows) / hankel)
}

fn vandermonde_sq(x: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..x.len() {
        for j in 0..i {
            let d = x[i] - x[j];
            p *= d * d;
        }
    }
    p
}

/// Visit every point of the `dim`-fold tensor product of `data` with its
/// product quadrature weight.
fn tensor_for_each(data: &NodeData, dim: usize, mut f: impl FnMut(&[usize], f64)) {
    let m = data.dmu.len();
    let mut idx = vec![0usize; dim];
    loop {
        f(&idx, idx.iter().map(|&i| data.dmu[i]).product());
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Heine integral for `P_{2k}` or `P_{2k+3}` at the given `wp(z)` values
/// (`k <= 2`), evaluated by a tensor rule.
pub fn heine_integral(
    fam: &EopFamily,
    moments: &MomentTable,
    k: usize,
    parity: Parity,
    points: &[(f64, f64)],
) -> Result<Vec<f64>> {
    if k > 2 {
        return Err(Error::DimensionTooLarge { dim: k, max: 2 });
    }
    let rule = QuadratureRule::new(fam.lattice(), TENSOR_ORDER_2D)?;
    let data = NodeData::new(fam.lattice(), fam.weight(), &rule)?;
    let (hankel, pref) = match parity {
        Parity::Even => (moments.hankel[k], 1.0),
        Parity::Odd => (moments.hankel_hat[k], (-0.5_f64).powi(2 * k as i32 + 1)),
    };
    let mut out = vec![0.0; points.len()];
    let mut xs = vec![0.0; k];
    tensor_for_each(&data, k, |idx, w| {
        let mut weight = w;
        for (x, &i) in xs.iter_mut().zip(idx) {
            *x = data.wp[i];
            if parity == Parity::Odd {
                weight *= data.wp_prime[i] * data.wp_prime[i];
            }
        }
        let base = weight * vandermonde_sq(&xs);
        for (o, &(wp, _)) in out.iter_mut().zip(points) {
            *o += base * xs.iter().map(|x| wp - x).product::<f64>();
        }
    });
    let norm = pref / (factorial(k) * hankel);
    Ok(out
        .iter()
        .zip(points)
        .map(|(v, &(_, wpp))| {
            let lead = if parity == Parity::Odd { wpp } else { 1.0 };
            v * norm * lead
        })
        .collect())
}

/// Three-way comparison at 10 points of `gamma`. The integral route is run
/// only when `with_integral` is set, and then needs `k <= 2`.
pub fn heine_verify(
    fam: &EopFamily,
    moments: &MomentTable,
    k: usize,
    parity: Parity,
    with_integral: bool,
) -> Result<HeineReport> {
    require_symmetric(fam)?;
    let n = parity.degree(k);
    let p = fam.monic(n)?;
    let points: Vec<(f64, f64)> = (0..10)
        .map(|j| fam.lattice().wp_on_gamma((j as f64 + 0.37) / 10.0))
        .collect::<Result<_>>()?;
    let gs: Vec<f64> = points.iter().map(|&(a, b)| p.eval_real(a, b)).collect();
    let dets: Vec<f64> = points
        .iter()
        .map(|&(a, b)| heine_determinant(moments, k, parity, a, b))
        .collect::<Result<_>>()?;
    let scale = gs.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let rel = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale;
    let mut report = HeineReport {
        k,
        parity,
        det_vs_gs: rel(&dets, &gs),
        integral_vs_gs: None,
        det_vs_integral: None,
        prefactor_fit: None,
    };
    if with_integral {
        let ints = heine_integral(fam, moments, k, parity, &points)?;
        report.integral_vs_gs = Some(rel(&ints, &gs));
        report.det_vs_integral = Some(rel(&ints, &dets));
        let num: f64 = ints.iter().zip(&gs).map(|(a, b)| a * b).sum();
        let den: f64 = gs.iter().map(|b| b * b).sum();
        report.prefactor_fit = Some(num / den);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// even CD kernel and partition function

fn weighted_even(fam: &EopFamily, n: usize, z: Complex64) -> Result<(f64, f64, Vec<f64>)> {
    let lat = fam.lattice();
    if lat.gamma_offset(z).abs() > 1e-12 {
        return Err(Error::OffContour { re: z.re, im: z.im });
    }
    let v = lat.wp_all(z)?;
    let (wp, wpp) = (v.wp.re, v.wp_prime.re);
    let all = fam.eval_all_real(wp, wpp);
    let sw = fam.weight().value_from(wp, wpp).sqrt();
    Ok((wp, sw, (0..=n).map(|i| all[2 * i]).collect()))
}

fn check_even_order(fam: &EopFamily, n: usize) -> Result<()> {
    require_symmetric(fam)?;
    if n == 0 || 2 * n > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "even kernel needs 1 <= n and 2n <= N",
        });
    }
    Ok(())
}

/// `sqrt(w(x) w(y)) sum_{i < n} pi_{2i}(x) pi_{2i}(y)`.
pub fn even_kernel_sum(fam: &EopFamily, n: usize, x: Complex64, y: Complex64) -> Result<f64> {
    check_even_order(fam, n)?;
    let (_, sx, px) = weighted_even(fam, n, x)?;
    let (_, sy, py) = weighted_even(fam, n, y)?;
    Ok(sx * sy * (0..n).map(|i| px[i] * py[i]).sum::<f64>())
}

/// Closed form with `alpha_n = a_{2n-1}`.
pub fn even_cd_kernel(fam: &EopFamily, c5: &FiveTermCoefficients, n: usize, x: Complex64, y: Complex64) -> Result<f64> {
    check_even_order(fam, n)?;
    let (wx, sx, px) = weighted_even(fam, n, x)?;
    let (wy, sy, py) = weighted_even(fam, n, y)?;
    let gap = wx - wy;
    if gap.abs() < crate::cd_kernel::SWITCH_THRESHOLD {
        return Err(Error::NearConfluent { gap: gap.abs() });
    }
    let alpha = c5.a(2 * n as i64 - 1);
    Ok(alpha * sx * sy * (px[n] * py[n - 1] - py[n] * px[n - 1]) / gap)
}

/// `Z_n = n! prod_{i < n} h_{2i}`.
pub fn partition_function(fam: &EopFamily, n: usize) -> Result<f64> {
    require_symmetric(fam)?;
    if n == 0 || 2 * n - 2 > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "partition function needs 1 <= n and 2n - 2 <= N",
        });
    }
    let mut z = factorial(n);
    for i in 0..n {
        z *= fam.h(2 * i)?;
    }
    Ok(z)
}

/// `Z_n` as an `n`-fold integral (`n <= 3`).
pub fn partition_function_quadrature(fam: &EopFamily, n: usize) -> Result<f64> {
    require_symmetric(fam)?;
    if n == 0 {
        return Err(Error::InvalidParameter("partition function needs n >= 1".into()));
    }
    if n > 3 {
        return Err(Error::DimensionTooLarge { dim: n, max: 3 });
    }
    let order = if n == 3 { TENSOR_ORDER_3D } else { TENSOR_ORDER_2D };
    let rule = QuadratureRule::new(fam.lattice(), order)?;
    let data = NodeData::new(fam.lattice(), fam.weight(), &rule)?;
    let mut total = 0.0;
    let mut xs = vec![0.0; n];
    tensor_for_each(&data, n, |idx, w| {
        for (x, &i) in xs.iter_mut().zip(idx) {
            *x = data.wp[i];
        }
        total += w * vandermonde_sq(&xs);
    });
    Ok(total)
}

/// Relative gap between `det[K_n(x_i, x_j)] / n!` and
/// `prod |wp(x_i) - wp(x_j)|^2 prod w(x_i) / Z_n` with `n = len(points)`.
pub fn determinantal_identity_residual(fam: &EopFamily, points: &[Complex64], z_n: f64) -> Result<f64> {
    let n = points.len();
    check_even_order(fam, n)?;
    let rows: Vec<(f64, f64, Vec<f64>)> = points
        .iter()
        .map(|&z| weighted_even(fam, n, z))
        .collect::<Result<_>>()?;
    let k = DMatrix::from_fn(n, n, |i, j| {
        rows[i].1 * rows[j].1 * (0..n).map(|m| rows[i].2[m] * rows[j].2[m]).sum::<f64>()
    });
    let lhs = k.determinant() / factorial(n);
    let wps: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs = vandermonde_sq(&wps) * rows.iter().map(|r| r.1 * r.1).product::<f64>() / z_n;
    Ok((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE))
}

// ---------------------------------------------------------------------------
// derivative expansion for the unit weight

#[derive(Debug, Clone, Serialize)]
pub struct CuriousReport {
    pub n: usize,
    /// `(j, c_{j,n})` for `j = 0, 2, ..., n+1`
    pub coefficients: Vec<(usize, f64)>,
    /// `max |c_{j,n}|` over `j <= n - 2`
    pub max_low: f64,
    /// `max |pi_n' - sum_{j=n-1}^{n+1} c_{j,n} pi_j|` at 20 points, relative
    /// to `max |pi_n'|` there
    pub reconstruction: f64,
}

/// `c_{j,n} = int pi_n' pi_j`, which vanishes for `j <= n - 2` when `w = 1`.
pub fn curious_identity_check(fam: &EopFamily, n: usize) -> Result<CuriousReport> {
    if !fam.weight().is_unity() {
        return Err(Error::RequiresUnityWeight);
    }
    if n == 1 || n + 1 > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "needs n != 1 and n + 1 <= N",
        });
    }
    let lat = fam.lattice();
    let d: EllipticPoly = fam.ortho(n)?.derivative(lat.g2(), lat.g3());
    let data = fam.node_data();
    let dv: Vec<f64> = data
        .wp
        .iter()
        .zip(&data.wp_prime)
        .map(|(&a, &b)| d.eval_real(a, b))
        .collect();
    let mut coefficients = Vec::new();
    let mut max_low = 0.0_f64;
    for j in (0..=n + 1).filter(|&j| j != 1) {
        let c = fam.integrate_product(&dv, fam.node_values(j));
        if j + 2 <= n {
            max_low = max_low.max(c.abs());
        }
        coefficients.push((j, c));
    }
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..20 {
        let (wp, wpp) = lat.wp_on_gamma((i as f64 + 0.29) / 20.0)?;
        let pi = fam.eval_all_real(wp, wpp);
        let lhs = d.eval_real(wp, wpp);
        let rhs: f64 = coefficients
            .iter()
            .filter(|(j, _)| j + 1 >= n)
            .map(|&(j, c)| c * pi[j])
            .sum();
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs());
    }
    Ok(CuriousReport {
        n,
        coefficients,
        max_low,
        reconstruction: worst / scale.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{compute_moments, WeightSpec};
    use crate::recurrence::{extract_five_term, extract_seven_term};

    fn fam(w: WeightSpec) -> EopFamily {
        EopFamily::build(1.0, &w, 8, 256).unwrap()
    }

    #[test]
    fn rejects_asymmetric() {
        let f = fam(WeightSpec::ExpPPrime(0.3));
        assert!(matches!(split_family(&f), Err(Error::NotSymmetric)));
        assert!(matches!(partition_function_quadrature(&f, 2), Err(Error::NotSymmetric)));
        assert!(matches!(curious_identity_check(&f, 3), Err(Error::RequiresUnityWeight)));
    }

    #[test]
    fn parity_split() {
        let f = fam(WeightSpec::ExpP(0.5));
        let s = split_family(&f).unwrap();
        assert!(s.leak < 1e-9, "{}", s.leak);
        assert_eq!(s.even.len(), 5);
        assert_eq!(s.odd.len(), 3);
        for (k, e) in s.even.iter().enumerate() {
            assert_eq!(e[k], 1.0);
        }
        let c5 = extract_five_term(&f).unwrap();
        let c7 = extract_seven_term(&f).unwrap();
        let (b, qs) = parity_leaks(&c5, &c7);
        assert!(b < 1e-9 && qs < 1e-9, "{b} {qs}");
        for n in [0, 2, 3, 4, 5, 6] {
            for i in 0..30 {
                let z = f.lattice().gamma_point(i as f64 / 30.0 + 0.011);
                assert!(three_term_residual(&f, &c5, n, z).unwrap() < 1e-8);
                if n + 3 <= 8 {
                    assert!(four_term_residual(&f, &c7, n, z).unwrap() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn jacobi_and_christoffel() {
        let f = fam(WeightSpec::Unity);
        let c5 = extract_five_term(&f).unwrap();
        let j1 = jacobi_spectrum(&build_jacobi(&c5, 1).unwrap());
        assert!((j1.values[0] - c5.c(0)).abs() < 1e-14);
        let mut prev = j1;
        for n in 2..=5 {
            let sp = jacobi_spectrum(&build_jacobi(&c5, n).unwrap());
            assert!(interlacing_margin(&sp, &prev).unwrap() > 1e-10);
            let mu = christoffel_weights(&f, &sp).unwrap();
            assert!(mu.quadrature_residual() < 1e-7, "n={n}");
            assert!(mu.masses.iter().all(|&m| m > 0.0));
            let s: f64 = mu.masses.iter().zip(&mu.values).map(|(m, v)| m * v[0] * v[0]).sum();
            assert!((s - 1.0).abs() < 1e-8);
            if 2 * n <= 8 {
                for (k, &t) in mu.params.iter().enumerate() {
                    let v = f.eval_all_on_gamma(t).unwrap();
                    assert!(v[2 * n].abs() < 1e-8 * v[2 * n - 2].abs().max(1.0));
                    let u: Vec<f64> = (0..n).map(|i| v[2 * i]).collect();
                    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let cos: f64 = u.iter().zip(&sp.vectors[k]).map(|(a, b)| a * b).sum::<f64>() / nu;
                    assert!(cos.abs() > 1.0 - 1e-8);
                }
            }
            prev = sp;
        }
        assert!(build_jacobi(&c5, 6).is_err());
    }

    #[test]
    fn nuhat_relation() {
        let f = fam(WeightSpec::ExpP(0.5));
        let m = compute_moments(f.lattice(), f.rule(), f.weight(), 4).unwrap();
        let (g2, g3) = (f.lattice().g2(), f.lattice().g3());
        for k in 0..4 {
            let r = m.nu[k + 3] - 0.25 * g2 * m.nu[k + 1] - 0.25 * g3 * m.nu[k];
            assert!((r - m.nuhat[k]).abs() < 1e-9 * m.nuhat[k].abs().max(1.0));
        }
    }

    #[test]
    fn heine_routes_agree() {
        let f = fam(WeightSpec::Unity);
        let m = compute_moments(f.lattice(), f.rule(), f.weight(), 4).unwrap();
        for k in 0..=2 {
            for parity in [Parity::Even, Parity::Odd] {
                if parity.degree(k) > 8 {
                    continue;
                }
                let r = heine_verify(&f, &m, k, parity, true).unwrap();
                assert!(r.det_vs_gs < 1e-6, "{r:?}");
                assert!(r.integral_vs_gs.unwrap() < 1e-5, "{r:?}");
                assert!((r.prefactor_fit.unwrap() - 1.0).abs() < 1e-5, "{r:?}");
            }
        }
        for k in 3..=4 {
            let r = heine_verify(&f, &m, k, Parity::Even, false).unwrap();
            assert!(r.det_vs_gs < 1e-6, "{r:?}");
        }
        assert!(matches!(
            heine_verify(&f, &m, 3, Parity::Even, true),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn even_kernel_and_partition() {
        let f = fam(WeightSpec::ExpP(0.5));
        let c5 = extract_five_term(&f).unwrap();
        for n in 1..=4 {
            for (tx, ty) in [(0.1, 0.3), (0.05, 0.45), (0.7, 0.2)] {
                let x = f.lattice().gamma_point(tx);
                let y = f.lattice().gamma_point(ty);
                let a = even_cd_kernel(&f, &c5, n, x, y).unwrap();
                let b = even_kernel_sum(&f, n, x, y).unwrap();
                assert!((a - b).abs() < 1e-8, "n={n}: {a} {b}");
            }
        }
        assert!((partition_function(&f, 1).unwrap() - f.h(0).unwrap()).abs() < 1e-14);
        for n in 1..=3 {
            let zq = partition_function_quadrature(&f, n).unwrap();
            let zf = partition_function(&f, n).unwrap();
            assert!((zq - zf).abs() < 1e-6 * zf, "n={n}: {zq} {zf}");
        }
        let z2 = partition_function(&f, 2).unwrap();
        let pts = [f.lattice().gamma_point(0.13), f.lattice().gamma_point(0.58)];
        assert!(determinantal_identity_residual(&f, &pts, z2).unwrap() < 1e-6);
    }

    #[test]
    fn curious_identity() {
        let f = fam(WeightSpec::Unity);
        for n in [2, 3, 4, 5, 6, 7] {
            let r = curious_identity_check(&f, n).unwrap();
            assert!(r.max_low < 1e-8, "{r:?}");
            assert!(r.reconstruction < 1e-8, "{r:?}");
        }
    }
}
