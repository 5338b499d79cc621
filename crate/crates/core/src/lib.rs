//! Asymptotic expansions for the high-dimensional Bingham distribution.
//!
//! A random unit vector `X` in `R^d` is Bingham distributed with symmetric
//! parameter `S` when its density on the sphere is proportional to
//! `exp(x'Sx)`. This crate evaluates truncations of the zonal-polynomial
//! series for the normalizing constant `Psi_d(S)`, its matrix gradient and
//! `Cov(X)`, together with explicit bounds on what the truncation leaves
//! out, valid whenever `||S|| <= gamma0 d^{r/2}` and `d` is large enough.
//!
//! ```
//! use bingham_core::{power_sums, psi_truncated, SymmetricMatrix};
//!
//! let s = SymmetricMatrix::scaled_identity(100, 0.1).unwrap();
//! let ps = power_sums(&s, 19).unwrap();
//! // on the sphere x'(tI)x = t, so Psi_d(tI) = e^t
//! assert!((psi_truncated(&ps, 20).unwrap() - 0.1f64.exp()).abs() < 1e-14);
//! ```
//!
//! Module map:
//! - [`symmat`]: matrix ingestion, power sums, matrix polynomials
//! - [`partitions`]: multiplicity-form integer partitions and exact weights
//! - [`zonal`]: zonal polynomials `C_(k)`, their gradients, `a_k`
//! - [`series`]: truncated expansions of `Psi`, `1/Psi`, `grad Psi`, `Cov(X)`
//! - [`bounds`]: remainder bounds, thresholds, order selection, tables
//! - [`oracle`]: Monte-Carlo, Kummer, finite-difference and quadrature references

// `!(x > y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod partitions;
pub mod series;
pub mod symmat;
pub mod zonal;

pub use bounds::{
    bound_comparison, bounds_table, choose_m, constants, grad_remainder_bound,
    inverse_remainder_bound, psi_remainder_bound, regime_check, threshold_inverse, threshold_psi,
    BoundKind, BoundOrdering, BoundsTable, Constants, OrderChoice,
};
pub use error::{Error, Result};
pub use exact::ExactRational;
pub use oracle::{fd_gradient, kummer_scalar, mc_cov, mc_psi, McEstimate};
pub use partitions::{enumerate_partitions, partition_weight, PartitionMultiplicity};
pub use series::{
    cov_bounded, cov_closed_lm23, cov_expansion, cov_polynomial, grad_bounded, grad_psi_truncated,
    pochhammer_ratio, psi_bounded, psi_inverse_truncated, psi_truncated, BoundedValue,
    GrowthRegime, RemainderBound,
};
pub use symmat::{
    frobenius_norm, load_matrix, materialize, power_sums, GradientPolynomial, PowerSums,
    SymmetricMatrix,
};
pub use zonal::{a_k_closed, a_k_multisum, zonal_c, zonal_grad};
