//! Five-term (`wp * pi_n`) and seven-term (`wp' * pi_n`) recurrences.
//!
//! Index conventions:
//!
//! ```text
//! a_m = <wp pi_{m-1}, pi_{m+1}>   b_m = <wp pi_{m-1}, pi_m>   c_m = <wp pi_m, pi_m>
//! p_m = <wp' pi_{m-3}, pi_m>      q_m = <wp' pi_{m-2}, pi_m>
//! r_m = <wp' pi_{m-1}, pi_m>      s_m = <wp' pi_m, pi_m>
//!
//! wp  pi_n = a_{n+1} pi_{n+2} + b_{n+1} pi_{n+1} + c_n pi_n + b_n pi_{n-1} + a_{n-1} pi_{n-2}
//! wp' pi_n = p_{n+3} pi_{n+3} + q_{n+2} pi_{n+2} + r_{n+1} pi_{n+1} + s_n pi_n
//!          + r_n pi_{n-1} + q_n pi_{n-2} + p_n pi_{n-3}
//! ```
//!
//! Any coefficient touching `pi_1` or a negative degree is 0, except the
//! fixed convention `c_1 = 1`.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::EllipticPoly;
use crate::error::{Error, Result};
use crate::family::EopFamily;

pub const SF_TOL: f64 = 1e-5;

/// Inner products `<wp pi_n, pi_k>` (`which = Wp`) or `<wp' pi_n, pi_k>`
/// for all `k, n <= N`; row/column 1 are zero.
fn multiplication_matrix(fam: &EopFamily, prime: bool) -> DMatrix<f64> {
    let n = fam.max_degree();
    let d = fam.node_data();
    let mult = if prime { &d.wp_prime } else { &d.wp };
    let scaled: Vec<Vec<f64>> = (0..=n)
        .map(|j| fam.node_values(j).iter().zip(mult).map(|(a, b)| a * b).collect())
        .collect();
    DMatrix::from_fn(n + 1, n + 1, |k, j| {
        fam.integrate_product(&scaled[j], fam.node_values(k))
    })
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest `|m[k, n]|` with `|k - n| > band`.
fn band_leak(m: &DMatrix<f64>, band: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i.abs_diff(j) > band {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst
}

fn get(v: &[f64], i: i64) -> f64 {
    if i < 0 {
        0.0
    } else {
        v.get(i as usize).copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiveTermCoefficients {
    pub n_max: usize,
    /// `a_0..=a_{N-1}`
    pub a: Vec<f64>,
    /// `b_0..=b_N`
    pub b: Vec<f64>,
    /// `c_0..=c_N`
    pub c: Vec<f64>,
    /// `max |c_{k,n} - c_{n,k}|`
    pub max_asymmetry: f64,
    /// `max |c_{k,n}|` over `|k - n| > 2`
    pub max_band_leak: f64,
}

impl FiveTermCoefficients {
    /// `a_i`; zero for negative `i`, NaN beyond the extracted range.
    pub fn a(&self, i: i64) -> f64 {
        get(&self.a, i)
    }

    pub fn b(&self, i: i64) -> f64 {
        get(&self.b, i)
    }

    pub fn c(&self, i: i64) -> f64 {
        get(&self.c, i)
    }

    /// Coefficient of `pi_k` in `wp pi_m`.
    pub fn coef(&self, m: i64, k: i64) -> f64 {
        if m < 0 || k < 0 || m == 1 || k == 1 {
            return 0.0;
        }
        match k - m {
            2 => self.a(m + 1),
            1 => self.b(m + 1),
            0 => self.c(m),
            -1 => self.b(m),
            -2 => self.a(m - 1),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SevenTermCoefficients {
    pub n_max: usize,
    /// `p_0..=p_N` and likewise below
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub max_asymmetry: f64,
    /// `max |<wp' pi_n, pi_k>|` over `|k - n| > 3`
    pub max_band_leak: f64,
}

impl SevenTermCoefficients {
    pub fn p(&self, i: i64) -> f64 {
        get(&self.p, i)
    }

    pub fn q(&self, i: i64) -> f64 {
        get(&self.q, i)
    }

    pub fn r(&self, i: i64) -> f64 {
        get(&self.r, i)
    }

    pub fn s(&self, i: i64) -> f64 {
        get(&self.s, i)
    }

    /// Coefficient of `pi_k` in `wp' pi_m`.
    pub fn coef(&self, m: i64, k: i64) -> f64 {
        if m < 0 || k < 0 || m == 1 || k == 1 {
            return 0.0;
        }
        let hi = m.max(k);
        match (k - m).abs() {
            3 => self.p(hi),
            2 => self.q(hi),
            1 => self.r(hi),
            0 => self.s(m),
            _ => 0.0,
        }
    }
}

pub fn extract_five_term(fam: &EopFamily) -> Result<FiveTermCoefficients> {
    let n = fam.max_degree();
    if n < 4 {
        return Err(Error::InsufficientDegree { have: n, need: 4 });
    }
    let m = multiplication_matrix(fam, false);
    let entry = |k: i64, j: i64| -> f64 {
        if k < 0 || j < 0 || k == 1 || j == 1 {
            0.0
        } else {
            m[(k as usize, j as usize)]
        }
    };
    let a = (0..n as i64).map(|i| entry(i + 1, i - 1)).collect();
    let b = (0..=n as i64).map(|i| entry(i, i - 1)).collect();
    let mut c: Vec<f64> = (0..=n as i64).map(|i| entry(i, i)).collect();
    c[1] = 1.0;
    Ok(FiveTermCoefficients {
        n_max: n,
        a,
        b,
        c,
        max_asymmetry: asymmetry(&m),
        max_band_leak: band_leak(&m, 2),
    })
}

pub fn extract_seven_term(fam: &EopFamily) -> Result<SevenTermCoefficients> {
    let n = fam.max_degree();
    if n < 5 {
        return Err(Error::InsufficientDegree { have: n, need: 5 });
    }
    let m = multiplication_matrix(fam, true);
    let entry = |k: i64, j: i64| -> f64 {
        if k < 0 || j < 0 || k == 1 || j == 1 {
            0.0
        } else {
            m[(k as usize, j as usize)]
        }
    };
    let col = |off: i64| (0..=n as i64).map(|i| entry(i, i - off)).collect::<Vec<_>>();
    Ok(SevenTermCoefficients {
        n_max: n,
        p: col(3),
        q: col(2),
        r: col(1),
        s: col(0),
        max_asymmetry: asymmetry(&m),
        max_band_leak: band_leak(&m, 3),
    })
}

fn check_range(n: usize, lo: usize, hi: Option<usize>) -> Result<()> {
    if n == 1 || n < lo || hi.is_none_or(|h| n > h) {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "outside the range where the recurrence is fully resolved",
        });
    }
    Ok(())
}

/// `|wp pi_n - (five-term expansion)|` at `z`, for `n <= N - 2`.
pub fn residual_five_term(fam: &EopFamily, c5: &FiveTermCoefficients, n: usize, z: Complex64) -> Result<f64> {
    check_range(n, 0, fam.max_degree().checked_sub(2))?;
    let v = fam.lattice().wp_all(z)?;
    let pi = fam.eval_all_values(v.wp, v.wp_prime);
    let ni = n as i64;
    let rhs: Complex64 = (-2..=2)
        .filter(|d| ni + d >= 0)
        .map(|d| c5.coef(ni, ni + d) * pi[(ni + d) as usize])
        .sum();
    Ok((v.wp * pi[n] - rhs).norm())
}

/// `|wp' pi_n - (seven-term expansion)|` at `z`, for `n <= N - 3`.
pub fn residual_seven_term(fam: &EopFamily, c7: &SevenTermCoefficients, n: usize, z: Complex64) -> Result<f64> {
    check_range(n, 0, fam.max_degree().checked_sub(3))?;
    let v = fam.lattice().wp_all(z)?;
    let pi = fam.eval_all_values(v.wp, v.wp_prime);
    let ni = n as i64;
    let rhs: Complex64 = (-3..=3)
        .filter(|d| ni + d >= 0)
        .map(|d| c7.coef(ni, ni + d) * pi[(ni + d) as usize])
        .sum();
    Ok((v.wp_prime * pi[n] - rhs).norm())
}

/// Block form `wp Pi_{2n} = A_{2n+2} Pi_{2n+2} + B_{2n} Pi_{2n} + A_{2n}^T Pi_{2n-2}`
/// with `Pi_{2n} = (pi_{2n+1}, pi_{2n})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRecurrence {
    /// `a_blocks[k] = A_{2k}`
    pub a_blocks: Vec<Matrix2<f64>>,
    /// `b_blocks[k] = B_{2k}`
    pub b_blocks: Vec<Matrix2<f64>>,
}

impl MatrixRecurrence {
    pub fn from_five_term(c5: &FiveTermCoefficients) -> Self {
        let blocks = c5.n_max / 2 + 1;
        let a_blocks = (0..blocks as i64)
            .map(|k| {
                let m = 2 * k;
                Matrix2::new(c5.a(m), c5.b(m), 0.0, c5.a(m - 1))
            })
            .collect();
        let b_blocks = (0..blocks as i64)
            .map(|k| {
                let m = 2 * k;
                let c_odd = if m + 1 == 1 { 0.0 } else { c5.c(m + 1) };
                Matrix2::new(c_odd, c5.b(m + 1), c5.b(m + 1), c5.c(m))
            })
            .collect();
        MatrixRecurrence { a_blocks, b_blocks }
    }

    pub fn a_block(&self, two_n: usize) -> Matrix2<f64> {
        self.a_blocks.get(two_n / 2).copied().unwrap_or_else(Matrix2::zeros)
    }

    pub fn b_block(&self, two_n: usize) -> Matrix2<f64> {
        self.b_blocks.get(two_n / 2).copied().unwrap_or_else(Matrix2::zeros)
    }
}

/// Residual norm of the block recurrence at block index `n` (`2n + 3 <= N`).
pub fn matrix_recurrence_residual(fam: &EopFamily, m: &MatrixRecurrence, n: usize, z: Complex64) -> Result<f64> {
    let top = 2 * n + 3;
    if top > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: top,
            reason: "block recurrence needs pi_{2n+3}",
        });
    }
    let v = fam.lattice().wp_all(z)?;
    let pi = fam.eval_all_values(v.wp, v.wp_prime);
    let block = |k: i64| -> Vector2<Complex64> {
        if k < 0 {
            Vector2::zeros()
        } else {
            let k = k as usize;
            Vector2::new(pi[2 * k + 1], pi[2 * k])
        }
    };
    let c = |m: Matrix2<f64>| m.map(|x| Complex64::new(x, 0.0));
    let ni = n as i64;
    let lhs = block(ni) * v.wp;
    let rhs = c(m.a_block(2 * n + 2)) * block(ni + 1)
        + c(m.b_block(2 * n)) * block(ni)
        + c(m.a_block(2 * n).transpose()) * block(ni - 1);
    Ok((lhs - rhs).norm())
}

/// `B_{n+i}` coefficients of `wp'^2 pi_n` from both expansions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixBReport {
    pub n: usize,
    /// `from_five[i + 6]` is `B_{n+i}` from `(4 wp^3 - g2 wp - g3) pi_n`
    pub from_five: Vec<f64>,
    /// `from_seven[i + 6]` is `B_{n+i}` from `wp' (wp' pi_n)`
    pub from_seven: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl AppendixBReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &r| a.max(r))
    }
}

/// Cross-checks the two expansions of `wp'^2 pi_n` by enumerating paths
/// through the recurrence coefficients. Needs `n + 6 <= N`.
pub fn verify_appendix_b(
    c5: &FiveTermCoefficients,
    c7: &SevenTermCoefficients,
    g2: f64,
    g3: f64,
    n: usize,
) -> Result<AppendixBReport> {
    let n_max = c5.n_max.min(c7.n_max);
    if n == 1 || n + 6 > n_max {
        return Err(Error::IndexOutOfRange { index: n as i64 + 6 });
    }
    let ni = n as i64;
    let mut from_five = Vec::with_capacity(13);
    let mut from_seven = Vec::with_capacity(13);
    for i in -6..=6_i64 {
        let target = ni + i;
        let mut cube = 0.0;
        for j1 in ni - 2..=ni + 2 {
            for j2 in j1 - 2..=j1 + 2 {
                cube += c5.coef(ni, j1) * c5.coef(j1, j2) * c5.coef(j2, target);
            }
        }
        let delta = if i == 0 { 1.0 } else { 0.0 };
        let five = 4.0 * cube - g2 * c5.coef(ni, target) - g3 * delta;
        let seven: f64 = (ni - 3..=ni + 3).map(|j| c7.coef(ni, j) * c7.coef(j, target)).sum();
        // B entries vanish for a target of pi_1 or negative degree
        let (five, seven) = if target < 0 || target == 1 {
            (0.0, 0.0)
        } else {
            (five, seven)
        };
        from_five.push(five);
        from_seven.push(seven);
    }
    let residuals = from_five.iter().zip(&from_seven).map(|(a, b)| (a - b).abs()).collect();
    Ok(AppendixBReport {
        n,
        from_five,
        from_seven,
        residuals,
    })
}

/// Output of the Shohat-Favard reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// `polys[m]` is `pi_m`; `polys[1]` is zero.
    pub polys: Vec<EllipticPoly>,
    /// Largest relative coefficient residual among the seven-term
    /// relations not used in the construction.
    pub max_residual: f64,
}

/// Rebuilds `pi_0..=pi_N` from recurrence coefficients alone.
///
/// `pi_0 = 1/sqrt(lambda1)`, `pi_2` from the five-term relation at `n = 0`,
/// `pi_3` from the seven-term relation at `n = 0`, then the five-term
/// relation at `n = m - 2` for every `m >= 4`. The seven-term relations at
/// `n = 2..=N-3` are not used and serve as the consistency test.
pub fn shohat_favard_reconstruct(
    c5: &FiveTermCoefficients,
    c7: &SevenTermCoefficients,
    g2: f64,
    g3: f64,
    lambda1: f64,
    n_max: usize,
) -> Result<Reconstruction> {
    if !(lambda1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda1 must be positive, got {lambda1}"
        )));
    }
    if n_max < 3 || n_max > c5.n_max || n_max > c7.n_max {
        return Err(Error::InsufficientDegree {
            have: n_max.min(c5.n_max).min(c7.n_max),
            need: 3,
        });
    }
    let mut pi: Vec<EllipticPoly> = vec![EllipticPoly::zero(); n_max + 1];
    pi[0] = EllipticPoly::basis(0).scale(1.0 / lambda1.sqrt());

    let a1 = c5.a(1);
    check_pivot(a1, 2)?;
    let mut p2 = pi[0].mul_wp();
    p2.axpy(-c5.c(0), &pi[0]);
    pi[2] = p2.scale(1.0 / a1);

    let p3 = c7.p(3);
    check_pivot(p3, 3)?;
    let mut t = pi[0].mul_wp_prime(g2, g3);
    t.axpy(-c7.q(2), &pi[2]);
    t.axpy(-c7.s(0), &pi[0]);
    pi[3] = t.scale(1.0 / p3);

    for m in 4..=n_max {
        let mi = m as i64;
        let lead = c5.a(mi - 1);
        check_pivot(lead, m)?;
        let mut t = pi[m - 2].mul_wp();
        t.axpy(-c5.b(mi - 1), &pi[m - 1]);
        t.axpy(-c5.c(mi - 2), &pi[m - 2]);
        t.axpy(-c5.b(mi - 2), &pi[m - 3]);
        t.axpy(-c5.a(mi - 3), &pi[m - 4]);
        pi[m] = t.scale(1.0 / lead);
    }

    let mut worst = 0.0_f64;
    let mut worst_degree = 0;
    for n in 2..=n_max.saturating_sub(3) {
        let lhs = pi[n].mul_wp_prime(g2, g3);
        let mut rhs = EllipticPoly::zero();
        let ni = n as i64;
        for d in -3..=3_i64 {
            let k = ni + d;
            if k >= 0 {
                rhs.axpy(c7.coef(ni, k), &pi[k as usize]);
            }
        }
        let res = lhs.max_diff(&rhs) / lhs.max_abs().max(f64::MIN_POSITIVE);
        if !(res <= worst) {
            worst = res;
            worst_degree = n;
        }
    }
    if !(worst <= SF_TOL) {
        return Err(Error::InconsistentCoefficients {
            residual: worst,
            degree: worst_degree,
        });
    }
    Ok(Reconstruction {
        polys: pi,
        max_residual: worst,
    })
}

fn check_pivot(v: f64, degree: usize) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::InconsistentCoefficients {
            residual: f64::INFINITY,
            degree,
        });
    }
    Ok(())
}
