//! Orthonormal elliptic polynomials `pi_0, pi_2, pi_3, ..., pi_N` for a
//! weight on `gamma`, built by Gram-Schmidt in the basis `E_m`.
//!
//! The candidate for degree `m >= 4` is `wp * pi_{m-2}` rather than the bare
//! basis element `E_m`; both have a pole of order `m`, but the former keeps
//! the Gram-Schmidt input well conditioned (Stieltjes style). Modified
//! Gram-Schmidt runs twice. `pi_1` is identically zero.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{degree_at, degrees_up_to, pos, EllipticPoly};
use crate::error::{Error, Result};
use crate::quadrature::{dot3, Accumulation, NodeData, QuadratureRule, WeightSpec};
use crate::weierstrass::TorusLattice;

/// `h_n < DEGENERATE_RATIO * h_0` is treated as breakdown.
pub const DEGENERATE_RATIO: f64 = 1e-13;
pub const MAX_DEGREE_CAP: usize = 20;
pub const DEFAULT_MAX_DEGREE: usize = 8;

#[derive(Debug, Clone)]
pub struct EopFamily {
    lattice: TorusLattice,
    weight: WeightSpec,
    rule: QuadratureRule,
    data: NodeData,
    mode: Accumulation,
    max_degree: usize,
    /// orthonormal `pi`, by slot
    ortho: Vec<EllipticPoly>,
    /// `h_n = <P_n, P_n>`, by slot
    h: Vec<f64>,
    /// `pi` at the rule nodes, by slot
    values: Vec<Vec<f64>>,
    zero_values: Vec<f64>,
}

/// On-disk form. `coeffs[i]` holds the orthonormal `pi_{degrees[i]}` with
/// coefficient `j` multiplying basis element `E_{degrees[j]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub schema: u32,
    pub tau_im: f64,
    pub series_terms: usize,
    pub weight_spec: WeightSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub quad_order: usize,
    pub precision: Accumulation,
    pub degrees: Vec<usize>,
    pub h: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
}

impl EopFamily {
    /// Gram-Schmidt with accumulation mode taken from `EOPK_PRECISION`.
    pub fn gram_schmidt(
        lattice: &TorusLattice,
        weight: &WeightSpec,
        rule: &QuadratureRule,
        max_degree: usize,
    ) -> Result<Self> {
        Self::gram_schmidt_with(lattice, weight, rule, max_degree, Accumulation::from_env())
    }

    pub fn gram_schmidt_with(
        lattice: &TorusLattice,
        weight: &WeightSpec,
        rule: &QuadratureRule,
        max_degree: usize,
        mode: Accumulation,
    ) -> Result<Self> {
        if max_degree > MAX_DEGREE_CAP {
            return Err(Error::InvalidParameter(format!(
                "max degree {max_degree} exceeds the cap {MAX_DEGREE_CAP}"
            )));
        }
        let data = NodeData::new(lattice, weight, rule)?;
        let ip = |a: &[f64], b: &[f64]| dot3(a, b, &data.dmu, mode);
        let mut ortho: Vec<EllipticPoly> = Vec::new();
        let mut vals: Vec<Vec<f64>> = Vec::new();
        let mut h = Vec::new();
        for m in degrees_up_to(max_degree) {
            let (mut poly, mut v) = match m {
                0 => (EllipticPoly::basis(0), vec![1.0; data.len()]),
                3 => (EllipticPoly::basis(3), data.wp_prime.iter().map(|d| -0.5 * d).collect()),
                _ => {
                    let prev = pos(m - 2);
                    let p = ortho[prev].mul_wp();
                    let v = vals[prev].iter().zip(&data.wp).map(|(a, b)| a * b).collect();
                    (p, v)
                }
            };
            let head = poly.laurent_head();
            poly = poly.scale(1.0 / head);
            v.iter_mut().for_each(|x| *x /= head);
            for _ in 0..2 {
                for (q, qv) in ortho.iter().zip(&vals) {
                    let c = ip(&v, qv);
                    poly.axpy(-c, q);
                    v.iter_mut().zip(qv).for_each(|(x, y)| *x -= c * y);
                }
            }
            let hm = ip(&v, &v);
            let h0 = h.first().copied().unwrap_or(hm);
            if !(hm >= DEGENERATE_RATIO * h0) || !hm.is_finite() {
                return Err(Error::DegenerateNorm { degree: m, h: hm, h0 });
            }
            let s = 1.0 / hm.sqrt();
            ortho.push(poly.scale(s));
            vals.push(v.iter().map(|x| x * s).collect());
            h.push(hm);
        }
        Ok(Self::from_parts(
            lattice.clone(),
            weight.clone(),
            rule.clone(),
            data,
            mode,
            max_degree,
            ortho,
            h,
        ))
    }

    /// Node values are recomputed from the coefficients so that a family
    /// loaded from JSON is bit-identical to the one that was saved.
    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        lattice: TorusLattice,
        weight: WeightSpec,
        rule: QuadratureRule,
        data: NodeData,
        mode: Accumulation,
        max_degree: usize,
        ortho: Vec<EllipticPoly>,
        h: Vec<f64>,
    ) -> Self {
        let values = ortho
            .iter()
            .map(|p| {
                data.wp
                    .iter()
                    .zip(&data.wp_prime)
                    .map(|(a, b)| p.eval_real(*a, *b))
                    .collect()
            })
            .collect();
        let zero_values = vec![0.0; data.len()];
        EopFamily {
            lattice,
            weight,
            rule,
            data,
            mode,
            max_degree,
            ortho,
            h,
            values,
            zero_values,
        }
    }

    /// Convenience constructor: lattice, rule of the given order, Gram-Schmidt.
    pub fn build(tau_im: f64, weight: &WeightSpec, max_degree: usize, quad_order: usize) -> Result<Self> {
        let lattice = TorusLattice::new(tau_im)?;
        let rule = QuadratureRule::new(&lattice, quad_order)?;
        Self::gram_schmidt(&lattice, weight, &rule, max_degree)
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn node_data(&self) -> &NodeData {
        &self.data
    }

    pub fn accumulation(&self) -> Accumulation {
        self.mode
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Degrees `0, 2, 3, ..., N` of the nonzero members.
    pub fn degrees(&self) -> Vec<usize> {
        degrees_up_to(self.max_degree).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.max_degree {
            return Err(Error::InvalidDegree {
                degree: n,
                reason: "exceeds the family's maximum degree",
            });
        }
        Ok(())
    }

    /// Orthonormal `pi_n` (the zero polynomial for `n = 1`).
    pub fn ortho(&self, n: usize) -> Result<EllipticPoly> {
        self.check(n)?;
        Ok(if n == 1 {
            EllipticPoly::zero()
        } else {
            self.ortho[pos(n)].clone()
        })
    }

    pub fn ortho_ref(&self, n: usize) -> Option<&EllipticPoly> {
        if n == 1 || n > self.max_degree {
            None
        } else {
            Some(&self.ortho[pos(n)])
        }
    }

    /// Monic `P_n = sqrt(h_n) pi_n`.
    pub fn monic(&self, n: usize) -> Result<EllipticPoly> {
        self.check(n)?;
        Ok(if n == 1 {
            EllipticPoly::zero()
        } else {
            let p = &self.ortho[pos(n)];
            let mut c = p.scale(1.0 / p.laurent_head()).coeffs().to_vec();
            c[pos(n)] = 1.0;
            EllipticPoly::from_coeffs(c)
        })
    }

    /// `h_n`; `n = 1` has no norm.
    pub fn h(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        if n == 1 {
            return Err(Error::InvalidDegree {
                degree: 1,
                reason: "pi_1 vanishes and has no norm",
            });
        }
        Ok(self.h[pos(n)])
    }

    /// Norms in slot order (degrees 0, 2, 3, ...).
    pub fn norms(&self) -> &[f64] {
        &self.h
    }

    /// Values of `pi_n` at the rule nodes.
    pub fn node_values(&self, n: usize) -> &[f64] {
        if n == 1 || n > self.max_degree {
            &self.zero_values
        } else {
            &self.values[pos(n)]
        }
    }

    /// `int f g w` for node-value vectors.
    pub fn integrate_product(&self, f: &[f64], g: &[f64]) -> f64 {
        dot3(f, g, &self.data.dmu, self.mode)
    }

    pub fn eval(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.check(n)?;
        if n == 1 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.ortho[pos(n)].eval(&self.lattice, z)
    }

    /// `pi_j(z)` for all `j = 0..=N` (index 1 is zero), from a single
    /// evaluation of `wp`, `wp'`.
    pub fn eval_all(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let v = self.lattice.wp_all(z)?;
        Ok(self.eval_all_values(v.wp, v.wp_prime))
    }

    pub fn eval_all_values(&self, wp: Complex64, wp_prime: Complex64) -> Vec<Complex64> {
        (0..=self.max_degree)
            .map(|n| {
                if n == 1 {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.ortho[pos(n)].eval_values(wp, wp_prime)
                }
            })
            .collect()
    }

    /// Real values of all `pi_j` at `tau/2 + t`.
    pub fn eval_all_on_gamma(&self, t: f64) -> Result<Vec<f64>> {
        let (wp, wpp) = self.lattice.wp_on_gamma(t)?;
        Ok(self.eval_all_real(wp, wpp))
    }

    pub fn eval_all_real(&self, wp: f64, wp_prime: f64) -> Vec<f64> {
        (0..=self.max_degree)
            .map(|n| {
                if n == 1 {
                    0.0
                } else {
                    self.ortho[pos(n)].eval_real(wp, wp_prime)
                }
            })
            .collect()
    }

    /// `<pi_n, pi_m>` over all nonzero members, slot order.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let k = self.values.len();
        DMatrix::from_fn(k, k, |i, j| self.integrate_product(&self.values[i], &self.values[j]))
    }

    /// Largest entry of `G - I`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.gram_matrix();
        let k = g.nrows();
        let mut worst = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson {
            schema: 1,
            tau_im: self.lattice.tau_im(),
            series_terms: self.lattice.series_terms(),
            weight_spec: self.weight.clone(),
            n: self.max_degree,
            quad_order: self.rule.order(),
            precision: self.mode,
            degrees: self.degrees(),
            h: self.h.clone(),
            coeffs: self
                .ortho
                .iter()
                .enumerate()
                .map(|(i, p)| p.padded(degree_at(i)))
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(j: &FamilyJson) -> Result<Self> {
        if j.schema != 1 {
            return Err(Error::Serialization(format!("unsupported schema {}", j.schema)));
        }
        let expected: Vec<usize> = degrees_up_to(j.n).collect();
        if j.degrees != expected || j.h.len() != expected.len() || j.coeffs.len() != expected.len() {
            return Err(Error::Serialization("degree list does not match N".into()));
        }
        let lattice = TorusLattice::with_series_terms(j.tau_im, j.series_terms)?;
        let rule = QuadratureRule::new(&lattice, j.quad_order)?;
        let data = NodeData::new(&lattice, &j.weight_spec, &rule)?;
        let ortho = j.coeffs.iter().map(|c| EllipticPoly::from_coeffs(c.clone())).collect();
        Ok(Self::from_parts(
            lattice,
            j.weight_spec.clone(),
            rule,
            data,
            j.precision,
            j.n,
            ortho,
            j.h.clone(),
        ))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: FamilyJson = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_json(&j)
    }
}
