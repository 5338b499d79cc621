//! Truncated zonal-series expansions of the Bingham normalizing constant
//! `Psi_d(S) = 1F1(1/2; d/2; S)`, its reciprocal, its gradient and the
//! covariance matrix `Cov(X) = Psi^{-1} grad Psi`.
//!
//! The `k`-th series term is `(1/2)_k/(d/2)_k * C_(k)(S)/k!`; the ratio of
//! rising factorials is accumulated factor by factor and `C_(k)/k!` comes from
//! exact coefficients, so no factorial is ever formed in floating point.

use crate::bounds;
use crate::error::{Error, Result};
use crate::symmat::{frobenius_norm, materialize, GradientPolynomial, PowerSums, SymmetricMatrix};
use crate::zonal;

/// Relative rounding slack used by [`GrowthRegime::admits_norm`].
pub const REGIME_SLACK: f64 = 1e-12;

/// The growth assumption `||S|| <= gamma0 * d^(r/2)` under which every
/// remainder bound holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRegime {
    gamma0: f64,
    r: f64,
}

impl GrowthRegime {
    pub fn new(gamma0: f64, r: f64) -> Result<Self> {
        if gamma0 > 0.0 && gamma0.is_finite() && (0.0..1.0).contains(&r) {
            Ok(Self { gamma0, r })
        } else {
            Err(Error::InvalidRegime { gamma0, r })
        }
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `gamma0 * d^(r/2)`, the largest admissible Frobenius norm.
    pub fn norm_limit(&self, d: f64) -> f64 {
        self.gamma0 * d.powf(self.r / 2.0)
    }

    /// `norm <= gamma0 d^{r/2}`, with a relative slack of [`REGIME_SLACK`]
    /// so that boundary cases such as `||0.1 I_100|| = 1` are not lost to
    /// rounding.
    pub fn admits_norm(&self, norm: f64, d: f64) -> bool {
        norm <= self.norm_limit(d) * (1.0 + REGIME_SLACK)
    }

    /// Order `alpha` of the covariance remainder `O(d^-alpha)`:
    /// `(2-r)/2` for `m = 2` and `(3-2r)/2` for `m >= 3`.
    pub fn covariance_alpha(&self, m: u32) -> f64 {
        let r = self.r;
        0.5 * (3.0 - 2.0 * r).min(1.0 + (f64::from(m) - 1.0) * (1.0 - r))
    }
}

/// Remainder information attached to a truncated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemainderBound {
    /// Explicit upper bound on the absolute (or Frobenius) remainder.
    Explicit(f64),
    /// Only the rate `O(d^-alpha)` is known. `proof_trace` is an explicit
    /// bound assembled from the constants of the scalar and gradient
    /// remainder bounds and the geometric series for `1/(1 + R_1)`.
    Asymptotic {
        alpha: f64,
        proof_trace: Option<f64>,
    },
}

/// A truncated value paired with its order, remainder bound and regime.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedValue<T> {
    pub value: T,
    pub m: u32,
    pub bound: RemainderBound,
    pub regime: GrowthRegime,
    pub d: usize,
}

/// `(1/2)_k / (d/2)_k`; every factor is below one when `d > 1`.
pub fn pochhammer_ratio(k: u32, d: f64) -> f64 {
    (0..k).fold(1.0, |acc, i| {
        let i = f64::from(i);
        acc * (0.5 + i) / (d / 2.0 + i)
    })
}

fn series_term(k: u32, ps: &PowerSums) -> Result<f64> {
    Ok(pochhammer_ratio(k, ps.d() as f64) * zonal::zonal_c_over_factorial(k, ps)?)
}

fn need_order(ps: &PowerSums, order: u32) -> Result<()> {
    if order > 0 {
        ps.require(order as usize)?;
    }
    Ok(())
}

/// Sum of the first `m` series terms, `k = 0..m-1`.
pub fn psi_truncated(ps: &PowerSums, m: u32) -> Result<f64> {
    if m < 1 {
        return Err(Error::OutOfRange {
            what: "truncation order m",
            value: f64::from(m),
            allowed: "m >= 1",
        });
    }
    need_order(ps, m - 1)?;
    if ps.is_zero() {
        return Ok(1.0);
    }
    let mut total = 1.0;
    for k in 1..m {
        total += series_term(k, ps)?;
    }
    Ok(total)
}

/// `1 - sum_{j=1}^{l-1} (1/2)_j/(d/2)_j C_(j)/j!`, the truncated expansion of
/// `1/Psi_d(S)`.
pub fn psi_inverse_truncated(ps: &PowerSums, l: u32) -> Result<f64> {
    if l < 2 {
        return Err(Error::OutOfRange {
            what: "inverse truncation order l",
            value: f64::from(l),
            allowed: "l >= 2",
        });
    }
    need_order(ps, l - 1)?;
    if ps.is_zero() {
        return Ok(1.0);
    }
    let mut total = 1.0;
    for j in 1..l {
        total -= series_term(j, ps)?;
    }
    Ok(total)
}

/// `sum_{k=1}^{m-1} (1/2)_k/(d/2)_k grad C_(k)/k!` as a matrix polynomial of
/// degree `m - 2`.
pub fn grad_psi_truncated(ps: &PowerSums, m: u32) -> Result<GradientPolynomial> {
    if m < 2 {
        return Err(Error::OutOfRange {
            what: "gradient truncation order m",
            value: f64::from(m),
            allowed: "m >= 2",
        });
    }
    need_order(ps, m - 1)?;
    let d = ps.d() as f64;
    let mut acc = GradientPolynomial::zero(ps.d());
    for k in 1..m {
        let g = zonal::zonal_grad_over_factorial(k, ps)?;
        acc.add_scaled(pochhammer_ratio(k, d), &g);
    }
    Ok(acc)
}

/// The product `psi_inverse_truncated(l) * grad_psi_truncated(m)` as a
/// matrix polynomial of degree `m - 2`.
pub fn cov_polynomial(ps: &PowerSums, l: u32, m: u32) -> Result<GradientPolynomial> {
    let inverse = psi_inverse_truncated(ps, l)?;
    Ok(grad_psi_truncated(ps, m)?.scaled(inverse))
}

/// Truncated covariance `Cov(X)` for the pair of orders `(l, m)`.
pub fn cov_expansion(
    ps: &PowerSums,
    s: &SymmetricMatrix,
    l: u32,
    m: u32,
) -> Result<SymmetricMatrix> {
    if ps.d() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.d(),
            found: s.dim(),
        });
    }
    if ps.is_zero() && l >= 2 && m >= 2 {
        return SymmetricMatrix::scaled_identity(s.dim(), 1.0 / s.dim() as f64);
    }
    materialize(&cov_polynomial(ps, l, m)?, s)
}

/// The `(l, m) = (2, 3)` covariance in expanded form:
/// `(1/d - 2t/(d^2(d+2)) - t^2/(d^2(d+2))) I + (2/(d(d+2)) - 2t/(d^2(d+2))) S`
/// with `t = tr(S)`.
pub fn cov_closed_lm23(s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let d = s.dim() as f64;
    let t = s.trace();
    let dd2 = d * d * (d + 2.0);
    let c0 = 1.0 / d - 2.0 * t / dd2 - t * t / dd2;
    let c1 = 2.0 / (d * (d + 2.0)) - 2.0 * t / dd2;
    materialize(&GradientPolynomial::new(s.dim(), vec![c0, c1]), s)
}

fn check_regime(ps: &PowerSums, regime: &GrowthRegime) -> Result<()> {
    let limit = regime.norm_limit(ps.d() as f64);
    if !regime.admits_norm(ps.frobenius(), ps.d() as f64) {
        return Err(Error::RegimeViolation {
            norm: ps.frobenius(),
            limit,
        });
    }
    Ok(())
}

/// [`psi_truncated`] with the explicit remainder bound; fails when `S` is
/// outside the regime or `d` is below the admissibility threshold.
pub fn psi_bounded(ps: &PowerSums, m: u32, regime: GrowthRegime) -> Result<BoundedValue<f64>> {
    check_regime(ps, &regime)?;
    let bound = bounds::psi_remainder_bound(m, ps.d() as f64, &regime)?;
    Ok(BoundedValue {
        value: psi_truncated(ps, m)?,
        m,
        bound: RemainderBound::Explicit(bound),
        regime,
        d: ps.d(),
    })
}

/// [`grad_psi_truncated`] with the explicit Frobenius-norm remainder bound.
pub fn grad_bounded(
    ps: &PowerSums,
    m: u32,
    regime: GrowthRegime,
) -> Result<BoundedValue<GradientPolynomial>> {
    check_regime(ps, &regime)?;
    let bound = bounds::grad_remainder_bound(m, ps.d() as f64, &regime)?;
    Ok(BoundedValue {
        value: grad_psi_truncated(ps, m)?,
        m,
        bound: RemainderBound::Explicit(bound),
        regime,
        d: ps.d(),
    })
}

/// [`cov_expansion`] with the `O(d^-alpha)` descriptor and a bound traced
/// through the proofs.
///
/// Writing `A` for the truncated inverse, `B` for the truncated gradient and
/// `e_A`, `e_B` for their remainder bounds, the Frobenius error of `A B` is
/// at most `e_A ||B|| + |A| e_B + e_A e_B`.
pub fn cov_bounded(
    ps: &PowerSums,
    s: &SymmetricMatrix,
    l: u32,
    m: u32,
    regime: GrowthRegime,
) -> Result<BoundedValue<SymmetricMatrix>> {
    check_regime(ps, &regime)?;
    let d = ps.d() as f64;
    let inverse_err = bounds::inverse_remainder_bound(l, d, &regime)?;
    let grad_err = bounds::grad_remainder_bound(m, d, &regime)?;
    let inverse = psi_inverse_truncated(ps, l)?;
    let grad = materialize(&grad_psi_truncated(ps, m)?, s)?;
    let value = cov_expansion(ps, s, l, m)?;
    let proof_trace =
        inverse_err * frobenius_norm(&grad) + inverse.abs() * grad_err + inverse_err * grad_err;
    Ok(BoundedValue {
        value,
        m,
        bound: RemainderBound::Asymptotic {
            alpha: regime.covariance_alpha(m),
            proof_trace: Some(proof_trace),
        },
        regime,
        d: ps.d(),
    })
}
