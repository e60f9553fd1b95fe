//! Integration along the A-cycle `gamma = [tau/2, 1 + tau/2]`, the weight
//! DSL, and moment tables.
//!
//! Integrals use the parameterization `z = tau/2 + t`, `t in [0, 1]`, so the
//! complex line element is just `dt`.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weierstrass::TorusLattice;

pub const DEFAULT_QUAD_ORDER: usize = 256;
pub const MAX_QUAD_ORDER: usize = 4096;
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Imaginary parts below this are treated as roundoff in real integrals.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

const CONTOUR_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// accumulation

/// Summation mode for inner products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accumulation {
    #[default]
    Double,
    /// Compensated dot product (Ogita-Rump-Oishi Dot2).
    Dd,
}

impl Accumulation {
    /// Reads `EOPK_PRECISION` (`double` or `dd`); anything else is `Double`.
    pub fn from_env() -> Self {
        match std::env::var("EOPK_PRECISION").as_deref() {
            Ok("dd") => Accumulation::Dd,
            _ => Accumulation::Double,
        }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `sum_i a_i b_i c_i`, with `c` typically the quadrature-times-weight vector.
pub fn dot3(a: &[f64], b: &[f64], c: &[f64], mode: Accumulation) -> f64 {
    debug_assert!(a.len() == b.len() && b.len() == c.len());
    match mode {
        Accumulation::Double => a.iter().zip(b).zip(c).map(|((x, y), z)| x * y * z).sum(),
        Accumulation::Dd => {
            let (mut s, mut err) = (0.0, 0.0);
            for ((x, y), z) in a.iter().zip(b).zip(c) {
                let (p, e1) = two_prod(*x, *y);
                let (p2, e2) = two_prod(p, *z);
                let (s2, e3) = two_sum(s, p2);
                s = s2;
                err += e1 * z + e2 + e3;
            }
            s + err
        }
    }
}

/// `sum_i a_i c_i`.
pub fn dot(a: &[f64], c: &[f64], mode: Accumulation) -> f64 {
    match mode {
        Accumulation::Double => a.iter().zip(c).map(|(x, z)| x * z).sum(),
        Accumulation::Dd => {
            let (mut s, mut err) = (0.0, 0.0);
            for (x, z) in a.iter().zip(c) {
                let (p, e1) = two_prod(*x, *z);
                let (s2, e2) = two_sum(s, p);
                s = s2;
                err += e1 + e2;
            }
            s + err
        }
    }
}

// ---------------------------------------------------------------------------
// weights

/// Positive weight on `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Unity,
    /// `exp(alpha * wp(z))`
    ExpP(f64),
    /// `exp(beta * wp'(z))`
    ExpPPrime(f64),
    Product(Vec<WeightSpec>),
}

impl WeightSpec {
    /// True when `w(1/2 + tau/2 + s) = w(1/2 + tau/2 - s)` holds identically.
    pub fn is_symmetric(&self) -> bool {
        // wp is even about the midpoint and wp' odd, and exponents add
        self.log_coefficients().1 == 0.0
    }

    pub fn is_unity(&self) -> bool {
        self.log_coefficients() == (0.0, 0.0)
    }

    /// `(alpha, beta)` with `log w = alpha wp + beta wp'`.
    pub fn log_coefficients(&self) -> (f64, f64) {
        match self {
            WeightSpec::Unity => (0.0, 0.0),
            WeightSpec::ExpP(a) => (*a, 0.0),
            WeightSpec::ExpPPrime(b) => (0.0, *b),
            WeightSpec::Product(parts) => parts.iter().fold((0.0, 0.0), |acc, p| {
                let (a, b) = p.log_coefficients();
                (acc.0 + a, acc.1 + b)
            }),
        }
    }

    /// Weight from precomputed `wp`, `wp'` on `gamma`.
    #[inline]
    pub fn value_from(&self, wp: f64, wp_prime: f64) -> f64 {
        let (a, b) = self.log_coefficients();
        (a * wp + b * wp_prime).exp()
    }

    /// Weight at a point of `gamma`.
    pub fn eval(&self, lattice: &TorusLattice, z: Complex64) -> Result<f64> {
        if (lattice.gamma_offset(z)).abs() > CONTOUR_TOL {
            return Err(Error::OffContour { re: z.re, im: z.im });
        }
        let v = lattice.wp_all(z)?;
        Ok(self.value_from(v.wp.re, v.wp_prime.re))
    }

    /// Analytic continuation of the weight off `gamma`.
    pub fn eval_analytic(&self, lattice: &TorusLattice, z: Complex64) -> Result<Complex64> {
        let (a, b) = self.log_coefficients();
        if a == 0.0 && b == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let v = lattice.wp_all(z)?;
        Ok((a * v.wp + b * v.wp_prime).exp())
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Unity => write!(f, "unity"),
            WeightSpec::ExpP(a) => write!(f, "exp_p:{a}"),
            WeightSpec::ExpPPrime(b) => write!(f, "exp_pp:{b}"),
            WeightSpec::Product(parts) => {
                write!(f, "prod(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Grammar: `unity | exp_p:<f64> | exp_pp:<f64> | prod(<spec>,<spec>[,...])`.
    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::WeightParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        if t == "unity" {
            return Ok(WeightSpec::Unity);
        }
        let number = |v: &str| -> Result<f64> {
            let x: f64 = v.trim().parse().map_err(|_| fail("bad number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(fail("non-finite parameter"))
            }
        };
        if let Some(v) = t.strip_prefix("exp_pp:") {
            return Ok(WeightSpec::ExpPPrime(number(v)?));
        }
        if let Some(v) = t.strip_prefix("exp_p:") {
            return Ok(WeightSpec::ExpP(number(v)?));
        }
        if let Some(inner) = t.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
            let mut parts = Vec::new();
            let mut depth = 0usize;
            let mut start = 0;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.checked_sub(1).ok_or_else(|| fail("unbalanced parentheses"))?,
                    ',' if depth == 0 => {
                        parts.push(inner[start..i].parse::<WeightSpec>()?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            if depth != 0 {
                return Err(fail("unbalanced parentheses"));
            }
            parts.push(inner[start..].parse::<WeightSpec>()?);
            if parts.len() < 2 {
                return Err(fail("prod needs at least two factors"));
            }
            return Ok(WeightSpec::Product(parts));
        }
        Err(fail("expected unity, exp_p:<a>, exp_pp:<b> or prod(..)"))
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// rule

/// Gauss-Legendre rule on `t in [0, 1]`, mapped onto `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    tau_im: f64,
    t: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(lattice: &TorusLattice, order: usize) -> Result<Self> {
        Self::on_unit_interval(order).map(|(t, weights)| QuadratureRule {
            tau_im: lattice.tau_im(),
            t,
            weights,
        })
    }

    /// Raw `(t, weight)` pairs on `[0, 1]`, ascending in `t`.
    pub fn on_unit_interval(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if order < 4 {
            return Err(Error::InvalidParameter(format!(
                "quadrature order must be >= 4, got {order}"
            )));
        }
        let gl = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 4"));
        let mut pairs: Vec<(f64, f64)> = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pairs.into_iter().unzip())
    }

    pub fn order(&self) -> usize {
        self.t.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, j: usize) -> Complex64 {
        Complex64::new(self.t[j], 0.5 * self.tau_im)
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.order()).map(|j| self.node(j)).collect()
    }

    /// `int_gamma f dz`.
    pub fn integrate<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Complex64 {
        (0..self.order()).map(|j| f(self.node(j)) * self.weights[j]).sum()
    }
}

/// `wp`, `wp'`, weight and `quad weight * w` at every node of a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeData {
    pub wp: Vec<f64>,
    pub wp_prime: Vec<f64>,
    pub w: Vec<f64>,
    /// quadrature weight times `w`
    pub dmu: Vec<f64>,
}

impl NodeData {
    pub fn new(lattice: &TorusLattice, weight: &WeightSpec, rule: &QuadratureRule) -> Result<Self> {
        let n = rule.order();
        let mut d = NodeData {
            wp: Vec::with_capacity(n),
            wp_prime: Vec::with_capacity(n),
            w: Vec::with_capacity(n),
            dmu: Vec::with_capacity(n),
        };
        for j in 0..n {
            let v = lattice.wp_all(rule.node(j))?;
            let w = weight.value_from(v.wp.re, v.wp_prime.re);
            d.wp.push(v.wp.re);
            d.wp_prime.push(v.wp_prime.re);
            d.w.push(w);
            d.dmu.push(w * rule.weights()[j]);
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.wp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wp.is_empty()
    }
}

/// Real inner product with its discarded imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealIntegral {
    pub value: f64,
    pub max_imag_residue: f64,
    /// Number of integrand samples whose imaginary part exceeded the tolerance.
    pub flagged: usize,
}

/// `<f, g> = int_gamma f g w dz` for functions that are real on `gamma`.
pub fn inner_product<F, G>(
    lattice: &TorusLattice,
    rule: &QuadratureRule,
    weight: &WeightSpec,
    f: F,
    g: G,
) -> Result<RealIntegral>
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    let mut fv = Vec::with_capacity(rule.order());
    let mut gv = Vec::with_capacity(rule.order());
    let mut max_imag = 0.0_f64;
    let mut flagged = 0;
    for j in 0..rule.order() {
        let z = rule.node(j);
        let (a, b) = (f(z), g(z));
        for v in [a, b] {
            let im = v.im.abs() / v.re.abs().max(1.0);
            max_imag = max_imag.max(im);
            if im > IMAG_RESIDUE_TOL {
                flagged += 1;
            }
        }
        fv.push(a.re);
        gv.push(b.re);
    }
    let data = NodeData::new(lattice, weight, rule)?;
    // f g is formed pointwise so that <f,g> and <g,f> sum identical terms
    let prod: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
    Ok(RealIntegral {
        value: dot(&prod, &data.dmu, Accumulation::from_env()),
        max_imag_residue: max_imag,
        flagged,
    })
}

// ---------------------------------------------------------------------------
// moments

/// Moments `nu_k = int wp^k w`, `nuhat_k = 1/4 int wp'^2 wp^k w` and their
/// Hankel determinants. `hankel[k]` is the `k x k` determinant, with
/// `hankel[0] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub nu: Vec<f64>,
    pub nuhat: Vec<f64>,
    pub hankel: Vec<f64>,
    pub hankel_hat: Vec<f64>,
    /// Set when some Hankel matrix has condition number above `1/(100 eps)`.
    pub ill_conditioned: bool,
}

/// Moments up to `nu_{2K}` and Hankel determinants up to size `K + 1`.
pub fn compute_moments(
    lattice: &TorusLattice,
    rule: &QuadratureRule,
    weight: &WeightSpec,
    k_max: usize,
) -> Result<MomentTable> {
    let data = NodeData::new(lattice, weight, rule)?;
    let mode = Accumulation::from_env();
    let len = 2 * k_max + 1;
    let mut nu = Vec::with_capacity(len);
    let mut nuhat = Vec::with_capacity(len);
    let mut power = vec![1.0; data.len()];
    let wpp2: Vec<f64> = data.wp_prime.iter().map(|d| 0.25 * d * d).collect();
    for _ in 0..len {
        nu.push(dot(&power, &data.dmu, mode));
        nuhat.push(dot3(&power, &wpp2, &data.dmu, mode));
        for (p, x) in power.iter_mut().zip(&data.wp) {
            *p *= x;
        }
    }
    let mut ill = false;
    let mut hankel_dets = |m: &[f64]| -> Vec<f64> {
        let mut out = vec![1.0];
        for k in 1..=k_max + 1 {
            let h = DMatrix::from_fn(k, k, |i, j| m[i + j]);
            if condition_number(&h) > 1.0 / (100.0 * f64::EPSILON) {
                ill = true;
            }
            out.push(h.lu().determinant());
        }
        out
    };
    let hankel = hankel_dets(&nu);
    let hankel_hat = hankel_dets(&nuhat);
    Ok(MomentTable {
        nu,
        nuhat,
        hankel,
        hankel_hat,
        ill_conditioned: ill,
    })
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let ev = m.clone().symmetric_eigenvalues();
    let max = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let min = ev.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Largest relative change of `int wp^k w` and `int wp' wp^k w`
/// (`k <= max_power`) between two rules, scaled by `int |wp|^k w`.
pub fn moment_change(
    lattice: &TorusLattice,
    weight: &WeightSpec,
    a: &QuadratureRule,
    b: &QuadratureRule,
    max_power: usize,
) -> Result<f64> {
    let probe = |rule: &QuadratureRule| -> Result<Vec<(f64, f64)>> {
        let d = NodeData::new(lattice, weight, rule)?;
        let mut out = Vec::new();
        let mut power = vec![1.0_f64; d.len()];
        for _ in 0..=max_power {
            let abs: Vec<f64> = power.iter().map(|p| p.abs()).collect();
            let scale = dot(&abs, &d.dmu, Accumulation::Double);
            out.push((dot(&power, &d.dmu, Accumulation::Double), scale));
            let odd: Vec<f64> = power.iter().zip(&d.wp_prime).map(|(p, q)| p * q).collect();
            let oabs: Vec<f64> = odd.iter().map(|p| p.abs()).collect();
            out.push((
                dot(&odd, &d.dmu, Accumulation::Double),
                dot(&oabs, &d.dmu, Accumulation::Double),
            ));
            for (p, x) in power.iter_mut().zip(&d.wp) {
                *p *= x;
            }
        }
        Ok(out)
    };
    let pa = probe(a)?;
    let pb = probe(b)?;
    let mut worst = 0.0_f64;
    for ((va, sa), (vb, _)) in pa.iter().zip(&pb) {
        let c = (va - vb).abs() / sa.max(f64::MIN_POSITIVE);
        if !c.is_finite() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(c);
    }
    Ok(worst)
}

/// Doubles the order from `start` until moments up to `wp^max_power` (and
/// `wp' wp^max_power`) change by less than `1e-10`, giving up above 4096.
pub fn converged_rule(
    lattice: &TorusLattice,
    weight: &WeightSpec,
    start: usize,
    max_power: usize,
) -> Result<QuadratureRule> {
    let mut order = start;
    let mut rule = QuadratureRule::new(lattice, order)?;
    let mut change = f64::INFINITY;
    while 2 * order <= MAX_QUAD_ORDER {
        let finer = QuadratureRule::new(lattice, 2 * order)?;
        change = moment_change(lattice, weight, &rule, &finer, max_power)?;
        if change < CONVERGENCE_TOL {
            return Ok(rule);
        }
        order *= 2;
        rule = finer;
    }
    Err(Error::QuadratureNotConverged {
        max_order: MAX_QUAD_ORDER,
        change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> TorusLattice {
        TorusLattice::new(1.0).unwrap()
    }

    #[test]
    fn rule_has_unit_mass_and_interior_nodes() {
        let l = lat();
        for n in [4, 17, 256] {
            let r = QuadratureRule::new(&l, n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            assert!(r.params().iter().all(|&t| t > 0.0 && t < 1.0));
            assert!(r.nodes().iter().all(|z| z.im == 0.5));
        }
        assert!(QuadratureRule::new(&l, 3).is_err());
    }

    #[test]
    fn wp_integral_self_converges_and_equals_minus_two_eta1() {
        let l = lat();
        let i64_ = QuadratureRule::new(&l, 64).unwrap().integrate(|z| l.wp(z).unwrap());
        let i128_ = QuadratureRule::new(&l, 128).unwrap().integrate(|z| l.wp(z).unwrap());
        assert!((i64_ - i128_).norm() < 1e-12);
        assert!((i128_.re + 2.0 * l.eta1()).abs() < 1e-12);
    }

    #[test]
    fn weight_dsl_round_trip() {
        for s in [
            "unity",
            "exp_p:0.5",
            "exp_pp:-0.3",
            "prod(exp_p:1,prod(unity,exp_pp:2))",
        ] {
            let w: WeightSpec = s.parse().unwrap();
            let again: WeightSpec = w.to_string().parse().unwrap();
            assert_eq!(w, again);
        }
        for bad in [
            "",
            "exp_p:",
            "exp_p:x",
            "prod(unity)",
            "prod(unity,",
            "gauss:1",
            "exp_p:inf",
        ] {
            assert!(
                matches!(bad.parse::<WeightSpec>(), Err(Error::WeightParse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn symmetry_flags() {
        assert!(WeightSpec::Unity.is_symmetric());
        assert!(WeightSpec::ExpP(0.5).is_symmetric());
        assert!(!WeightSpec::ExpPPrime(0.3).is_symmetric());
        assert!(!"prod(exp_p:1,exp_pp:0.2)".parse::<WeightSpec>().unwrap().is_symmetric());
        assert!("prod(exp_pp:0.2,exp_pp:-0.2)"
            .parse::<WeightSpec>()
            .unwrap()
            .is_symmetric());
    }

    #[test]
    fn weight_values_and_mirror_behaviour() {
        let l = lat();
        let z = l.gamma_point(0.2);
        let m = l.gamma_point(0.8);
        assert_eq!(WeightSpec::Unity.eval(&l, z).unwrap(), 1.0);
        let p = WeightSpec::ExpP(0.5);
        assert!((p.eval(&l, z).unwrap() - p.eval(&l, m).unwrap()).abs() < 1e-12);
        let q = WeightSpec::ExpPPrime(0.3);
        assert!((q.eval(&l, z).unwrap() - q.eval(&l, m).unwrap()).abs() > 1e-3);
        assert!(matches!(
            p.eval(&l, Complex64::new(0.2, 0.1)),
            Err(Error::OffContour { .. })
        ));
    }

    #[test]
    fn inner_product_basics() {
        let l = lat();
        let r = QuadratureRule::new(&l, 128).unwrap();
        let one = |_: Complex64| Complex64::new(1.0, 0.0);
        let wp = |z: Complex64| l.wp(z).unwrap();
        let unit = inner_product(&l, &r, &WeightSpec::Unity, one, one).unwrap();
        assert!((unit.value - 1.0).abs() < 1e-14);
        let w = WeightSpec::ExpPPrime(0.3);
        let fg = inner_product(&l, &r, &w, wp, |z| l.wp_prime(z).unwrap()).unwrap();
        let gf = inner_product(&l, &r, &w, |z| l.wp_prime(z).unwrap(), wp).unwrap();
        assert_eq!(fg.value, gf.value);
        let m = compute_moments(&l, &r, &w, 1).unwrap();
        let p1 = inner_product(&l, &r, &w, wp, one).unwrap();
        assert!((p1.value - m.nu[1]).abs() < 1e-12);
        assert_eq!(p1.flagged, 0);
    }

    #[test]
    fn moment_relations_and_hankel_positivity() {
        let l = lat();
        let r = QuadratureRule::new(&l, 256).unwrap();
        let m = compute_moments(&l, &r, &WeightSpec::Unity, 6).unwrap();
        for k in 0..8 {
            let rhs = m.nu[k + 3] - 0.25 * l.g2() * m.nu[k + 1] - 0.25 * l.g3() * m.nu[k];
            assert!((m.nuhat[k] - rhs).abs() < 1e-9 * m.nuhat[k].abs().max(1.0));
        }
        assert_eq!(m.hankel[0], 1.0);
        assert!((m.hankel[1] - m.nu[0]).abs() < 1e-15);
        assert!(m.hankel.iter().all(|&d| d > 0.0));
        assert!(m.hankel_hat.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn odd_integrals_vanish_for_symmetric_weight() {
        let l = lat();
        let r = QuadratureRule::new(&l, 256).unwrap();
        let d = NodeData::new(&l, &WeightSpec::ExpP(0.5), &r).unwrap();
        for k in 0..=5 {
            let f: Vec<f64> = d.wp.iter().zip(&d.wp_prime).map(|(p, q)| q * p.powi(k)).collect();
            assert!(dot(&f, &d.dmu, Accumulation::Double).abs() < 1e-10);
        }
    }

    #[test]
    fn compensated_dot_beats_naive_on_cancellation() {
        let a = [1e16, 1.0, -1e16];
        let c = [1.0, 1.0, 1.0];
        assert_eq!(dot(&a, &c, Accumulation::Dd), 1.0);
        assert_eq!(dot3(&a, &c, &c, Accumulation::Dd), 1.0);
    }

    #[test]
    fn convergence_gate() {
        let l = lat();
        let r = converged_rule(&l, &WeightSpec::ExpPPrime(0.3), 64, 8).unwrap();
        assert!(r.order() >= 64);
        assert!(matches!(
            converged_rule(&l, &WeightSpec::ExpPPrime(40.0), 2048, 30),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }
}
