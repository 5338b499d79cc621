//! Explicit remainder bounds, admissibility thresholds and order selection.
//!
//! With `g1 = (1 + sqrt 3)/2`, `g2 = gamma0 g1` and `g3 = 2^{3/2} e^{1/2} / g1`:
//!
//! ```text
//! |R_m|        <= g3 g2^m / sqrt((m+1)!) * d^{-m(1-r)/2}                  (m >= 1)
//! ||grad R_m|| <= sqrt(2e) g2^{m-1} / sqrt((m-1)!) * d^{-[1+(m-1)(1-r)]/2} (m >= 2)
//! ```
//!
//! both valid for `d >= (2 g2^2)^{1/(1-r)}`. The reciprocal expansion needs
//! the stricter `d > (6 g2^2)^{1/(1-r)}`.
//!
//! `d` is a real number throughout; thresholds such as `13.93` are not
//! integers.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exact::factorial_f64;
use crate::series::GrowthRegime;
use crate::symmat::{frobenius_norm, SymmetricMatrix};

/// Largest order accepted by [`choose_m`].
pub const MAX_CHOSEN_ORDER: u32 = 40;

/// Largest order accepted by the bound formulas.
pub const MAX_BOUND_ORDER: u32 = 150;

/// `(1 + sqrt 3) / 2`.
pub fn gamma1() -> f64 {
    (1.0 + 3f64.sqrt()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

pub fn constants(regime: &GrowthRegime) -> Constants {
    let gamma1 = gamma1();
    Constants {
        gamma1,
        gamma2: regime.gamma0() * gamma1,
        gamma3: 2f64.powf(1.5) * 0.5f64.exp() / gamma1,
    }
}

/// `(2 g2^2)^{1/(1-r)}`.
pub fn threshold_psi(regime: &GrowthRegime) -> f64 {
    let g2 = constants(regime).gamma2;
    (2.0 * g2 * g2).powf(1.0 / (1.0 - regime.r()))
}

/// `(6 g2^2)^{1/(1-r)}`.
pub fn threshold_inverse(regime: &GrowthRegime) -> f64 {
    let g2 = constants(regime).gamma2;
    (6.0 * g2 * g2).powf(1.0 / (1.0 - regime.r()))
}

fn admissible(d: f64, regime: &GrowthRegime) -> Result<()> {
    let threshold = threshold_psi(regime);
    if d >= threshold {
        Ok(())
    } else {
        Err(Error::InadmissibleDimension {
            d,
            threshold,
            relation: ">=",
        })
    }
}

fn check_order(what: &'static str, m: u32, min: u32) -> Result<()> {
    if m < min || m > MAX_BOUND_ORDER {
        return Err(Error::OutOfRange {
            what,
            value: f64::from(m),
            allowed: if min == 1 {
                "1 <= m <= 150"
            } else {
                "2 <= m <= 150"
            },
        });
    }
    Ok(())
}

/// Bound on `|R_m(S)|`, the tail of the normalizing-constant series.
pub fn psi_remainder_bound(m: u32, d: f64, regime: &GrowthRegime) -> Result<f64> {
    check_order("truncation order m", m, 1)?;
    admissible(d, regime)?;
    let c = constants(regime);
    let m_f = f64::from(m);
    Ok(
        c.gamma3 * c.gamma2.powi(m as i32) / factorial_f64(m + 1).sqrt()
            * d.powf(-m_f * (1.0 - regime.r()) / 2.0),
    )
}

/// Bound on `||grad R_m(S)||` (Frobenius norm).
pub fn grad_remainder_bound(m: u32, d: f64, regime: &GrowthRegime) -> Result<f64> {
    check_order("gradient truncation order m", m, 2)?;
    admissible(d, regime)?;
    let c = constants(regime);
    let m_f = f64::from(m);
    Ok(
        (2.0 * std::f64::consts::E).sqrt() * c.gamma2.powi(m as i32 - 1)
            / factorial_f64(m - 1).sqrt()
            * d.powf(-(1.0 + (m_f - 1.0) * (1.0 - regime.r())) / 2.0),
    )
}

/// Bound on `|R_1(S)|`: `2 e^{1/2} g2 / g1 * d^{-(1-r)/2}`.
pub fn r1_bound(d: f64, regime: &GrowthRegime) -> f64 {
    let c = constants(regime);
    2.0 * 0.5f64.exp() * c.gamma2 / c.gamma1 * d.powf(-(1.0 - regime.r()) / 2.0)
}

/// Explicit bound on `|1/Psi - psi_inverse_truncated(l)|`, assembled from
/// the reciprocal expansion `1/(1 + R_1) = 1 - R_1 + sum_{j>=2} (-R_1)^j`:
/// `|R_l| + b1^2 / (1 - b1)` with `b1` from [`r1_bound`].
pub fn inverse_remainder_bound(l: u32, d: f64, regime: &GrowthRegime) -> Result<f64> {
    if l < 2 {
        return Err(Error::OutOfRange {
            what: "inverse truncation order l",
            value: f64::from(l),
            allowed: "l >= 2",
        });
    }
    let threshold = threshold_inverse(regime);
    if !(d > threshold) {
        return Err(Error::InadmissibleDimension {
            d,
            threshold,
            relation: ">",
        });
    }
    let b1 = r1_bound(d, regime);
    Ok(psi_remainder_bound(l, d, regime)? + b1 * b1 / (1.0 - b1))
}

/// `||S|| <= gamma0 d^{r/2}` with `d` the dimension of `S`.
pub fn regime_check(s: &SymmetricMatrix, regime: &GrowthRegime) -> bool {
    regime.admits_norm(frobenius_norm(s), s.dim() as f64)
}

/// Result of [`choose_m`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderChoice {
    pub m: u32,
    pub psi_bound: f64,
    pub grad_bound: f64,
}

impl OrderChoice {
    pub fn max_bound(&self) -> f64 {
        self.psi_bound.max(self.grad_bound)
    }
}

/// Smallest `m >= 2` whose two remainder bounds are both at most `eps`.
pub fn choose_m(regime: &GrowthRegime, d: f64, eps: f64) -> Result<OrderChoice> {
    if !(eps > 0.0) {
        return Err(Error::OutOfRange {
            what: "tolerance eps",
            value: eps,
            allowed: "eps > 0",
        });
    }
    admissible(d, regime)?;
    let mut last = None;
    for m in 2..=MAX_CHOSEN_ORDER {
        let choice = OrderChoice {
            m,
            psi_bound: psi_remainder_bound(m, d, regime)?,
            grad_bound: grad_remainder_bound(m, d, regime)?,
        };
        if choice.max_bound() <= eps {
            return Ok(choice);
        }
        last = Some(choice);
    }
    Err(Error::Capacity {
        eps,
        max_m: MAX_CHOSEN_ORDER,
        best_bound: last.map_or(f64::INFINITY, |c| c.max_bound()),
    })
}

/// Which of the two remainder bounds is the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundOrdering {
    PsiLarger,
    Equal,
    GradLarger,
}

impl From<Ordering> for BoundOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Greater => BoundOrdering::PsiLarger,
            Ordering::Equal => BoundOrdering::Equal,
            Ordering::Less => BoundOrdering::GradLarger,
        }
    }
}

/// Compares the two bounds through their ratio,
/// `psi / grad = 2 gamma0 d^{r/2} / sqrt(m(m+1))`, so the scalar bound is the
/// larger one exactly when `4 gamma0^2 d^r > m(m+1)`.
///
/// The same comparison is sometimes quoted as `d^r >= m(m+1)/(4 gamma0)`
/// with the opposite conclusion; that form disagrees with the bound formulas
/// whenever `gamma0 != 1` and is not used here.
pub fn bound_comparison(m: u32, d: f64, regime: &GrowthRegime) -> Result<BoundOrdering> {
    check_order("truncation order m", m, 2)?;
    admissible(d, regime)?;
    let g0 = regime.gamma0();
    let lhs = 4.0 * g0 * g0 * d.powf(regime.r());
    let rhs = f64::from(m) * f64::from(m + 1);
    Ok(lhs.partial_cmp(&rhs).unwrap_or(Ordering::Equal).into())
}

/// The `d` at which the two bounds coincide, `(m(m+1) / (4 gamma0^2))^{1/r}`;
/// `None` for `r = 0`, where the ordering does not depend on `d`.
pub fn comparison_crossover(m: u32, regime: &GrowthRegime) -> Option<f64> {
    if regime.r() == 0.0 {
        return None;
    }
    let g0 = regime.gamma0();
    Some((f64::from(m) * f64::from(m + 1) / (4.0 * g0 * g0)).powf(1.0 / regime.r()))
}

/// Both bounds over a grid of dimensions (rows) and orders (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable {
    pub regime: GrowthRegime,
    pub d_list: Vec<f64>,
    pub m_list: Vec<u32>,
    /// `psi_bounds[row][col]` for `d_list[row]`, `m_list[col]`.
    pub psi_bounds: Vec<Vec<f64>>,
    pub grad_bounds: Vec<Vec<f64>>,
}

/// Which half of a [`BoundsTable`] to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Psi,
    Grad,
}

impl BoundsTable {
    pub fn grid(&self, kind: BoundKind) -> &[Vec<f64>] {
        match kind {
            BoundKind::Psi => &self.psi_bounds,
            BoundKind::Grad => &self.grad_bounds,
        }
    }

    /// One row per `d`, one column per `m`, 17 significant digits.
    pub fn to_csv(&self, kind: BoundKind) -> String {
        let mut out = String::from("d");
        for m in &self.m_list {
            let _ = write!(out, ",m={m}");
        }
        out.push('\n');
        for (d, row) in self.d_list.iter().zip(self.grid(kind)) {
            out.push_str(&format_d(*d));
            for v in row {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    /// Two subtables, values rounded half-up to 5 decimals.
    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "Bounds for |R_m(S)| and ||grad R_m(S)|| with (gamma0, r) = ({}, {})\n",
            self.regime.gamma0(),
            self.regime.r()
        );
        for (kind, title) in [
            (BoundKind::Psi, "(a) Bounds for |R_m(S)|"),
            (BoundKind::Grad, "(b) Bounds for ||grad R_m(S)||"),
        ] {
            let _ = write!(out, "\n{title}\n\n| d |");
            for m in &self.m_list {
                let _ = write!(out, " m={m} |");
            }
            out.push_str("\n|---:|");
            for _ in &self.m_list {
                out.push_str("---:|");
            }
            out.push('\n');
            for (d, row) in self.d_list.iter().zip(self.grid(kind)) {
                let _ = write!(out, "| {} |", format_d(*d));
                for v in row {
                    let _ = write!(out, " {} |", round_half_up_5(*v));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn format_d(d: f64) -> String {
    if d.fract() == 0.0 && d.abs() < 1e15 {
        format!("{}", d as i64)
    } else {
        format!("{d}")
    }
}

/// Renders a nonnegative value rounded half-up to 5 decimals.
pub fn round_half_up_5(x: f64) -> String {
    let scaled = (x * 1e5 + 0.5).floor();
    format!("{:.5}", scaled / 1e5)
}

/// Fills both grids; fails on the first inadmissible `d` or invalid `m`.
pub fn bounds_table(regime: GrowthRegime, d_list: &[f64], m_list: &[u32]) -> Result<BoundsTable> {
    let mut psi_bounds = Vec::with_capacity(d_list.len());
    let mut grad_bounds = Vec::with_capacity(d_list.len());
    for &d in d_list {
        psi_bounds.push(
            m_list
                .iter()
                .map(|&m| psi_remainder_bound(m, d, &regime))
                .collect::<Result<Vec<_>>>()?,
        );
        grad_bounds.push(
            m_list
                .iter()
                .map(|&m| grad_remainder_bound(m, d, &regime))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(BoundsTable {
        regime,
        d_list: d_list.to_vec(),
        m_list: m_list.to_vec(),
        psi_bounds,
        grad_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regime(g0: f64, r: f64) -> GrowthRegime {
        GrowthRegime::new(g0, r).unwrap()
    }

    #[test]
    fn constant_values() {
        let c = constants(&regime(1.0, 0.5));
        assert!((c.gamma1 - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((c.gamma1 - 1.3660).abs() < 5e-5);
        assert!((c.gamma3 - 3.4138).abs() < 5e-5);
        assert_eq!(c.gamma2, c.gamma1);
        let c2 = constants(&regime(2.0, 0.5));
        assert!((c2.gamma2 - 2.7321).abs() < 5e-5);
        assert!((c.gamma3 - 2f64.powf(1.5) * 0.5f64.exp() / c.gamma1).abs() < 1e-15);
    }

    #[test]
    fn thresholds() {
        let t = threshold_psi(&regime(1.0, 0.5));
        assert!((13.9..=14.0).contains(&t));
        let t = threshold_psi(&regime(1.0, 0.75));
        assert!((193.9..=194.1).contains(&t));
        let t = threshold_psi(&regime(1.0, 0.0));
        assert!((t - 2.0 * gamma1() * gamma1()).abs() < 1e-14);
        assert!((t - 3.732).abs() < 1e-3);
    }

    #[test]
    fn psi_bound_table_cells() {
        let b = psi_remainder_bound(3, 20.0, &regime(1.0, 0.5)).unwrap();
        assert!((b - 0.18782).abs() <= 1e-5);
        let b = psi_remainder_bound(3, 200.0, &regime(1.0, 0.75)).unwrap();
        assert!((b - 0.24357).abs() <= 1e-4);
        let b = psi_remainder_bound(3, 62501.0, &regime(1.0, 0.5)).unwrap();
        assert!((b - 0.00045).abs() <= 1e-5);
    }

    #[test]
    fn grad_bound_table_cells() {
        let b = grad_remainder_bound(3, 20.0, &regime(1.0, 0.5)).unwrap();
        assert!((b - 0.15383).abs() <= 1e-5);
        let b = grad_remainder_bound(3, 200.0, &regime(1.0, 0.75)).unwrap();
        assert!((b - 0.05785).abs() <= 1e-5);
        let b = grad_remainder_bound(6, 100.0, &regime(1.0, 0.5)).unwrap();
        assert!((b - 0.00032).abs() <= 1e-5);
    }

    #[test]
    fn inadmissible_dimension() {
        let r = regime(1.0, 0.5);
        match psi_remainder_bound(3, 13.0, &r) {
            Err(Error::InadmissibleDimension { threshold, .. }) => {
                assert!((threshold - 13.928).abs() < 1e-3)
            }
            other => panic!("{other:?}"),
        }
        assert!(grad_remainder_bound(3, 13.0, &r).is_err());
        assert!(grad_remainder_bound(1, 100.0, &r).is_err());
        assert!(psi_remainder_bound(0, 100.0, &r).is_err());
    }

    #[test]
    fn inverse_bound() {
        let r = regime(1.0, 0.0);
        let t = threshold_inverse(&r);
        // b1 at the threshold is 2 e^{1/2} / (g1 sqrt 6)
        let b1 = r1_bound(t, &r);
        assert!((b1 - 2.0 * 0.5f64.exp() / (gamma1() * 6f64.sqrt())).abs() < 1e-12);
        assert!(b1 < 1.0 && b1 > 0.985);
        let a = inverse_remainder_bound(2, 100.0, &r).unwrap();
        let b = inverse_remainder_bound(2, 200.0, &r).unwrap();
        assert!(a.is_finite() && a > 0.0 && b < a);
        assert!(matches!(
            inverse_remainder_bound(2, t, &r),
            Err(Error::InadmissibleDimension { .. })
        ));
        assert!(inverse_remainder_bound(2, 5.0, &r).is_err());
        assert!(inverse_remainder_bound(1, 100.0, &r).is_err());
    }

    #[test]
    fn regime_examples() {
        let r = regime(1.0, 0.5);
        assert!(regime_check(&SymmetricMatrix::zeros(4).unwrap(), &r));
        assert!(!regime_check(&SymmetricMatrix::identity(4).unwrap(), &r));
        assert!(regime_check(
            &SymmetricMatrix::scaled_identity(100, 0.1).unwrap(),
            &regime(1.0, 0.0)
        ));
    }

    #[test]
    fn order_selection() {
        let r = regime(1.0, 0.5);
        let c = choose_m(&r, 20.0, 0.01).unwrap();
        assert_eq!(c.m, 6);
        assert!((c.psi_bound - 0.00349).abs() < 1e-5);
        assert!((c.grad_bound - 0.00535).abs() < 1e-5);
        let c = choose_m(&r, 62501.0, 0.001).unwrap();
        assert_eq!(c.m, 3);
        assert_eq!(choose_m(&r, 20.0, 10.0).unwrap().m, 2);
        assert!(matches!(
            choose_m(&r, 20.0, 1e-300),
            Err(Error::Capacity { .. })
        ));
        assert!(choose_m(&r, 20.0, 0.0).is_err());
        assert!(choose_m(&r, 10.0, 0.1).is_err());
    }

    #[test]
    fn comparison_examples() {
        let r = regime(1.0, 0.5);
        assert_eq!(
            bound_comparison(3, 20.0, &r).unwrap(),
            BoundOrdering::PsiLarger
        );
        assert_eq!(
            bound_comparison(6, 20.0, &r).unwrap(),
            BoundOrdering::GradLarger
        );
        assert_eq!(
            bound_comparison(6, 110.0, &r).unwrap(),
            BoundOrdering::GradLarger
        );
        assert_eq!(
            bound_comparison(6, 111.0, &r).unwrap(),
            BoundOrdering::PsiLarger
        );
        let x = comparison_crossover(6, &r).unwrap();
        assert!((x - 110.25).abs() < 1e-9);
        assert_eq!(bound_comparison(6, x, &r).unwrap(), BoundOrdering::Equal);
        assert_eq!(comparison_crossover(3, &regime(1.0, 0.0)), None);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up_5(0.187816), "0.18782");
        assert_eq!(round_half_up_5(0.000004), "0.00000");
        assert_eq!(round_half_up_5(0.0000051), "0.00001");
        assert_eq!(round_half_up_5(0.0), "0.00000");
    }

    #[test]
    fn table_single_cell() {
        let t = bounds_table(regime(1.0, 0.5), &[50.0], &[3]).unwrap();
        assert_eq!(round_half_up_5(t.psi_bounds[0][0]), "0.09447");
        assert_eq!(round_half_up_5(t.grad_bounds[0][0]), "0.06153");
        assert!(t.to_csv(BoundKind::Psi).starts_with("d,m=3\n50,9.44"));
        assert!(t.to_markdown().contains("| 50 | 0.09447 |"));
        assert!(bounds_table(regime(1.0, 0.5), &[10.0], &[3]).is_err());
    }
}
