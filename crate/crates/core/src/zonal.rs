//! Single-row zonal polynomials `C_(k)(S)` written through power sums,
//! their matrix gradients, and the `a_k` coefficients that control their
//! growth.
//!
//! ```text
//! C_(k)(S) = k!/(1/2)_k * sum_{i_1 + 2 i_2 + ... + k i_k = k} prod_j tr(S^j)^{i_j} / (i_j! (2j)^{i_j})
//! ```
//!
//! Products are evaluated on power sums rescaled by `||S||^j` and the common
//! factor `||S||^k` is applied at the end, which keeps every intermediate
//! O(1) even for large `d` and `k`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, ExactRational};
use crate::partitions::{self, PartitionTerm, MAX_ORDER};
use crate::symmat::{GradientPolynomial, PowerSums};

fn check_k(k: u32) -> Result<()> {
    if k > MAX_ORDER {
        Err(Error::OutOfRange {
            what: "zonal order k",
            value: f64::from(k),
            allowed: "0 <= k <= 40",
        })
    } else {
        Ok(())
    }
}

/// `p_j / ||S||^j` for `j = 0..=k` (the entry for `j = 0` is unused).
fn normalized(ps: &PowerSums, k: u32, scale: f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(k as usize + 1);
    let mut sj = 1.0;
    for j in 0..=k as usize {
        q.push(ps.get(j) / sj);
        sj *= scale;
    }
    q
}

fn weighted_sum(k: u32, ps: &PowerSums, coeff: impl Fn(&PartitionTerm) -> f64) -> Result<f64> {
    check_k(k)?;
    if k == 0 {
        return Ok(1.0);
    }
    ps.require(k as usize)?;
    let scale = ps.frobenius();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let q = normalized(ps, k, scale);
    let total: f64 = partitions::terms(k)?
        .iter()
        .map(|t| {
            coeff(t)
                * t.parts
                    .iter()
                    .map(|&(j, n)| q[j].powi(n as i32))
                    .product::<f64>()
        })
        .sum();
    Ok(total * scale.powi(k as i32))
}

/// `C_(k)(S)`; `C_(0) = 1`.
pub fn zonal_c(k: u32, ps: &PowerSums) -> Result<f64> {
    weighted_sum(k, ps, |t| t.zonal_coeff)
}

/// `C_(k)(S) / k!` with the factorial folded into the exact coefficients.
pub fn zonal_c_over_factorial(k: u32, ps: &PowerSums) -> Result<f64> {
    weighted_sum(k, ps, |t| t.series_coeff)
}

fn gradient_coeffs(
    k: u32,
    ps: &PowerSums,
    coeff: impl Fn(&PartitionTerm) -> f64,
) -> Result<GradientPolynomial> {
    check_k(k)?;
    let d = ps.d();
    if k == 0 {
        return Ok(GradientPolynomial::zero(d));
    }
    ps.require(k as usize)?;
    let scale = ps.frobenius();
    let mut c = vec![0.0; k as usize];
    if scale == 0.0 {
        // only the (k)=(1) path survives at S = 0: grad tr(S) = I
        if k == 1 {
            c[0] = 1.0;
        }
        return Ok(GradientPolynomial::new(d, c));
    }
    let q = normalized(ps, k, scale);
    for t in partitions::terms(k)? {
        let base = coeff(t);
        for &(l, il) in &t.parts {
            // product rule on tr(S^l)^{i_l}: l i_l tr(S^l)^{i_l - 1} S^{l-1};
            // q^0 = 1 covers the i_l = 1 case
            let mut prod = base * (l as f64) * f64::from(il) * q[l].powi(il as i32 - 1);
            for &(j, n) in &t.parts {
                if j != l {
                    prod *= q[j].powi(n as i32);
                }
            }
            c[l - 1] += prod;
        }
    }
    // homogeneous of degree k - l in the coefficient of S^{l-1}
    for (idx, cl) in c.iter_mut().enumerate() {
        let l = idx as i32 + 1;
        *cl *= scale.powi(k as i32 - l);
    }
    Ok(GradientPolynomial::new(d, c))
}

/// `grad C_(k)(S)` as a polynomial `sum_{l=1}^{k} c_{l-1} S^{l-1}`, under the
/// gradient convention `(1/2)(1 + delta_ij) d/d s_ij`.
pub fn zonal_grad(k: u32, ps: &PowerSums) -> Result<GradientPolynomial> {
    gradient_coeffs(k, ps, |t| t.zonal_coeff)
}

/// `grad C_(k)(S) / k!`.
pub fn zonal_grad_over_factorial(k: u32, ps: &PowerSums) -> Result<GradientPolynomial> {
    gradient_coeffs(k, ps, |t| t.series_coeff)
}

/// `k! / (1/2)_k`, exactly.
pub fn zonal_prefactor(k: u32) -> ExactRational {
    ExactRational::from_integer(BigInt::from(exact::factorial(k)))
        / exact::rising(&exact::half(), k)
}

/// `C_(k)` evaluated entirely in rational arithmetic from exact power sums
/// `p = [p_0, p_1, ..., p_K]` (`p_0` is ignored).
pub fn zonal_c_exact(k: u32, p: &[ExactRational]) -> Result<ExactRational> {
    check_k(k)?;
    if k == 0 {
        return Ok(ExactRational::one());
    }
    if p.len() <= k as usize {
        return Err(Error::InsufficientPowerSums {
            needed: k as usize,
            available: p.len().saturating_sub(1),
        });
    }
    let mut total = ExactRational::zero();
    for t in partitions::terms(k)? {
        let mut prod = t.weight.clone();
        for &(j, n) in &t.parts {
            prod *= num_traits::pow(p[j].clone(), n as usize);
        }
        total += prod;
    }
    Ok(total * zonal_prefactor(k))
}

/// `a_k = sum_{partitions of k} d^{i_1/2} / prod_j (i_j! (2j)^{i_j})`; `a_0 = 1`.
pub fn a_k_multisum(k: u32, d: f64) -> Result<f64> {
    check_k(k)?;
    if k == 0 {
        return Ok(1.0);
    }
    let root = d.sqrt();
    Ok(partitions::terms(k)?
        .iter()
        .map(|t| exact::to_f64(&t.weight) * root.powi(t.i1() as i32))
        .sum())
}

/// Single-sum form `a_k = sum_{l=0}^{k} ((sqrt(d)-1)/2)^l / l! * (1/2)_{k-l} / (k-l)!`.
pub fn a_k_closed(k: u32, d: f64) -> Result<f64> {
    check_k(k)?;
    let x = (d.sqrt() - 1.0) / 2.0;
    // x^l / l! and (1/2)_n / n! built up incrementally
    let mut half_terms = Vec::with_capacity(k as usize + 1);
    let mut h = 1.0;
    for n in 0..=k {
        half_terms.push(h);
        h *= (0.5 + f64::from(n)) / f64::from(n + 1);
    }
    let mut total = 0.0;
    let mut xl = 1.0;
    for l in 0..=k {
        total += xl * half_terms[(k - l) as usize];
        xl *= x / f64::from(l + 1);
    }
    Ok(total)
}

/// [`a_k_multisum`] with `sqrt(d)` given as an exact rational `root`.
pub fn a_k_multisum_exact(k: u32, root: &ExactRational) -> Result<ExactRational> {
    check_k(k)?;
    if k == 0 {
        return Ok(ExactRational::one());
    }
    Ok(partitions::terms(k)?
        .iter()
        .map(|t| &t.weight * num_traits::pow(root.clone(), t.i1() as usize))
        .fold(ExactRational::zero(), |a, b| a + b))
}

/// [`a_k_closed`] with `sqrt(d)` given as an exact rational `root`.
pub fn a_k_closed_exact(k: u32, root: &ExactRational) -> Result<ExactRational> {
    check_k(k)?;
    let x = (root - ExactRational::one()) / ExactRational::from_integer(BigInt::from(2));
    let fact = |n: u32| ExactRational::from_integer(BigInt::from(exact::factorial(n)));
    Ok((0..=k)
        .map(|l| {
            num_traits::pow(x.clone(), l as usize) / fact(l) * exact::rising(&exact::half(), k - l)
                / fact(k - l)
        })
        .fold(ExactRational::zero(), |a, b| a + b))
}
