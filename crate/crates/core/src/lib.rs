//! Elliptic orthogonal polynomials on the rectangular torus `C / (Z + tau Z)`.
//!
//! The polynomials live in the span of `1, wp, wp', wp^2, wp' wp, ...` and are
//! orthonormal over the horizontal cycle `gamma = [tau/2, 1 + tau/2]` against
//! a positive weight. Everything downstream (recurrences, kernels, the
//! Riemann-Hilbert matrix, zero sets) is built from an [`EopFamily`].

// `!(x <= tol)` is deliberate throughout: NaN must fail the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod cd_kernel;
pub mod error;
pub mod family;
pub mod quadrature;
pub mod recurrence;
pub mod rhp;
pub mod symmetric;
pub mod verify;
pub mod weierstrass;
pub mod zeros;

pub use basis::EllipticPoly;
pub use error::{Error, Result};
pub use family::{EopFamily, FamilyJson};
pub use num_complex::Complex64 as C64;
pub use quadrature::{Accumulation, MomentTable, QuadratureRule, WeightSpec};
pub use weierstrass::{TorusLattice, WpValues};
