//! Zeros of `pi_n`. An even-degree member has all `n` zeros on `gamma`; an
//! odd one has `n - 1` there and the last on the real segment `(0, 1)`. All
//! of them are simple and their sum is a lattice point.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::EllipticPoly;
use crate::error::{Error, Result};
use crate::family::EopFamily;
use crate::quadrature::{Accumulation, QuadratureRule};

pub const DEFAULT_GRID: usize = 1024;
pub const MAX_GRID: usize = 65536;
/// Excluded neighbourhood of the poles at `0` and `1` on the real segment.
pub const POLE_EXCLUSION: f64 = 1e-4;
const BISECT_TOL: f64 = 1e-12;
const NEAR_DOUBLE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSet {
    pub degree: usize,
    /// `t` in `[0, 1)` with the zero at `tau/2 + t`, ascending
    pub gamma_zeros: Vec<f64>,
    /// `|pi_n|` at each gamma zero
    pub residuals: Vec<f64>,
    /// `|pi_n'| / max_gamma |pi_n|` at each gamma zero
    pub margins: Vec<f64>,
    pub real_zero: Option<f64>,
    pub real_residual: Option<f64>,
    /// grid size the scan settled on
    pub grid: usize,
}

impl ZeroSet {
    pub fn expected_gamma_count(&self) -> usize {
        expected_gamma_count(self.degree)
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Complete when the gamma count is right and, for odd degree, the
    /// real zero is present.
    pub fn is_complete(&self) -> bool {
        self.gamma_zeros.len() == self.expected_gamma_count()
            && (self.degree.is_multiple_of(2) || self.real_zero.is_some())
    }
}

pub fn expected_gamma_count(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n
    } else {
        n - 1
    }
}

/// `pi_n` and its derivative as closures over a point.
struct Member<'a> {
    fam: &'a EopFamily,
    p: EllipticPoly,
    d: EllipticPoly,
}

impl<'a> Member<'a> {
    fn new(fam: &'a EopFamily, n: usize) -> Result<Self> {
        let p = fam.ortho(n)?;
        let d = p.derivative(fam.lattice().g2(), fam.lattice().g3());
        Ok(Member { fam, p, d })
    }

    fn at(&self, z: Complex64) -> Result<(f64, f64)> {
        let v = self.fam.lattice().wp_all(z)?;
        let (wp, wpp) = (v.wp.re, v.wp_prime.re);
        Ok((self.p.eval_real(wp, wpp), self.d.eval_real(wp, wpp)))
    }
}

/// Bisection on a sign change of `f` in `[a, b]`, then Newton steps kept
/// inside the final bracket.
fn refine(mut a: f64, mut b: f64, fa: f64, f: &dyn Fn(f64) -> Result<(f64, f64)>) -> Result<f64> {
    let sa = fa.signum();
    while b - a > BISECT_TOL {
        let m = 0.5 * (a + b);
        let (fm, _) = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    let mut t = 0.5 * (a + b);
    for _ in 0..3 {
        let (v, dv) = f(t)?;
        if dv == 0.0 {
            break;
        }
        let next = t - v / dv;
        if next < a - BISECT_TOL || next > b + BISECT_TOL {
            break;
        }
        t = next;
    }
    Ok(t)
}

fn scan_gamma(fam: &EopFamily, n: usize, grid: usize) -> Result<ZeroSet> {
    let member = Member::new(fam, n)?;
    let lat = fam.lattice();
    let f = |t: f64| member.at(lat.gamma_point(t));
    let vals: Vec<f64> = (0..grid)
        .map(|j| f(j as f64 / grid as f64).map(|v| v.0))
        .collect::<Result<_>>()?;
    let (seam, scale) = vals.iter().enumerate().fold(
        (0, 0.0_f64),
        |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) },
    );
    let mut zeros = Vec::new();
    // periodic walk starting at the largest value, so no zero sits on the seam
    for step in 0..grid {
        let i = (seam + step) % grid;
        let j = (i + 1) % grid;
        let (va, vb) = (vals[i], vals[j]);
        if va == 0.0 {
            zeros.push(i as f64 / grid as f64);
            continue;
        }
        if va.signum() != vb.signum() && vb != 0.0 {
            let a = (seam + step) as f64 / grid as f64;
            let t = refine(a, a + 1.0 / grid as f64, va, &f)?;
            zeros.push(t.rem_euclid(1.0));
        }
    }
    zeros.sort_by(f64::total_cmp);
    let mut residuals = Vec::with_capacity(zeros.len());
    let mut margins = Vec::with_capacity(zeros.len());
    for &t in &zeros {
        let (v, d) = f(t)?;
        residuals.push(v.abs());
        margins.push(d.abs() / scale.max(f64::MIN_POSITIVE));
    }
    Ok(ZeroSet {
        degree: n,
        gamma_zeros: zeros,
        residuals,
        margins,
        real_zero: None,
        real_residual: None,
        grid,
    })
}

fn has_near_double(zs: &ZeroSet) -> bool {
    zs.gamma_zeros.windows(2).any(|w| w[1] - w[0] < NEAR_DOUBLE)
}

/// Sign-change scan of `pi_n` on `gamma` with grid escalation. If the count
/// is still off at [`MAX_GRID`] and two zeros nearly coincide, the family is
/// rebuilt with twice the nodes and compensated sums before giving up.
pub fn find_gamma_zeros(fam: &EopFamily, n: usize, grid: usize) -> Result<ZeroSet> {
    let expected = expected_gamma_count(n);
    let mut m = grid.max(16);
    loop {
        let zs = scan_gamma(fam, n, m)?;
        if zs.gamma_zeros.len() == expected {
            return Ok(zs);
        }
        if m >= MAX_GRID {
            if has_near_double(&zs) && fam.accumulation() != Accumulation::Dd {
                let rule = QuadratureRule::new(fam.lattice(), 2 * fam.rule().order())?;
                let finer = EopFamily::gram_schmidt_with(
                    fam.lattice(),
                    fam.weight(),
                    &rule,
                    fam.max_degree(),
                    Accumulation::Dd,
                )?;
                return find_gamma_zeros(&finer, n, grid);
            }
            return Err(Error::CountMismatch {
                degree: n,
                found: zs.gamma_zeros.len(),
                expected,
            });
        }
        m = (m * 2).min(MAX_GRID);
    }
}

/// The zero of an odd-degree member on `(0, 1)`, away from the poles.
pub fn find_real_zero(fam: &EopFamily, n: usize) -> Result<(f64, f64)> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "real zero exists only for odd n >= 3",
        });
    }
    let member = Member::new(fam, n)?;
    let f = |t: f64| member.at(Complex64::new(t, 0.0));
    let (lo, hi) = (POLE_EXCLUSION, 1.0 - POLE_EXCLUSION);
    let m = DEFAULT_GRID * 4;
    let grid: Vec<f64> = (0..=m).map(|j| lo + (hi - lo) * j as f64 / m as f64).collect();
    let mut found = Vec::new();
    let mut prev = f(grid[0])?.0;
    for w in grid.windows(2) {
        let next = f(w[1])?.0;
        if prev.signum() != next.signum() {
            found.push(refine(w[0], w[1], prev, &f)?);
        }
        prev = next;
    }
    match found.as_slice() {
        [t] => Ok((*t, f(*t)?.0.abs())),
        _ => Err(Error::NotFound { degree: n }),
    }
}

/// Gamma zeros plus, for odd `n`, the real zero.
pub fn zero_set(fam: &EopFamily, n: usize, grid: usize) -> Result<ZeroSet> {
    let mut zs = find_gamma_zeros(fam, n, grid)?;
    if n % 2 == 1 {
        let (t, r) = find_real_zero(fam, n)?;
        zs.real_zero = Some(t);
        zs.real_residual = Some(r);
    }
    Ok(zs)
}

/// Distance of the sum of all zeros to the lattice `Z + tau Z`.
pub fn abel_sum_check(fam: &EopFamily, zs: &ZeroSet) -> Result<f64> {
    if !zs.is_complete() {
        return Err(Error::IncompleteZeroSet { degree: zs.degree });
    }
    let lat = fam.lattice();
    let mut s: Complex64 = zs.gamma_zeros.iter().map(|&t| lat.gamma_point(t)).sum();
    if let Some(t) = zs.real_zero {
        s += t;
    }
    let ti = lat.tau_im();
    let im = s.im - (s.im / ti).round() * ti;
    let re = s.re - s.re.round();
    Ok(Complex64::new(re, im).norm())
}

/// `max |wp(z_i) - wp(z_j)|` over mirror pairs `t`, `1 - t` of gamma zeros.
pub fn mirror_pair_gap(fam: &EopFamily, zs: &ZeroSet) -> Result<f64> {
    let k = zs.gamma_zeros.len();
    let mut worst = 0.0_f64;
    for i in 0..k / 2 {
        let a = fam.lattice().wp_on_gamma(zs.gamma_zeros[i])?.0;
        let b = fam.lattice().wp_on_gamma(zs.gamma_zeros[k - 1 - i])?.0;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::WeightSpec;

    #[test]
    fn count_law_and_simplicity() {
        for w in [WeightSpec::Unity, WeightSpec::ExpPPrime(0.3)] {
            let f = EopFamily::build(1.0, &w, 8, 256).unwrap();
            for n in 2..=8 {
                let zs = zero_set(&f, n, DEFAULT_GRID).unwrap();
                assert_eq!(zs.gamma_zeros.len(), expected_gamma_count(n));
                assert!(zs.min_margin() > 1e-8);
                assert!(zs.residuals.iter().all(|&r| r < 1e-10));
                assert!(abel_sum_check(&f, &zs).unwrap() < 1e-8, "n={n}");
            }
        }
    }

    #[test]
    fn symmetric_cases() {
        let f = EopFamily::build(1.0, &WeightSpec::Unity, 8, 256).unwrap();
        let zs = zero_set(&f, 2, DEFAULT_GRID).unwrap();
        assert!((zs.gamma_zeros[0] + zs.gamma_zeros[1] - 1.0).abs() < 1e-10);
        let (t, r) = find_real_zero(&f, 3).unwrap();
        assert!((t - 0.5).abs() < 1e-12 && r < 1e-10);
        for n in [4, 6, 8] {
            let zs = zero_set(&f, n, DEFAULT_GRID).unwrap();
            assert!(mirror_pair_gap(&f, &zs).unwrap() < 1e-9);
        }
        assert!(find_real_zero(&f, 4).is_err());
        let empty = zero_set(&f, 0, 64).unwrap();
        assert!(empty.gamma_zeros.is_empty());
        assert_eq!(abel_sum_check(&f, &empty).unwrap(), 0.0);
    }

    #[test]
    fn incomplete_sets_rejected() {
        let f = EopFamily::build(1.0, &WeightSpec::Unity, 6, 256).unwrap();
        let mut zs = find_gamma_zeros(&f, 5, DEFAULT_GRID).unwrap();
        assert!(matches!(abel_sum_check(&f, &zs), Err(Error::IncompleteZeroSet { .. })));
        zs.real_zero = Some(find_real_zero(&f, 5).unwrap().0);
        assert!(abel_sum_check(&f, &zs).unwrap() < 1e-8);
    }
}
