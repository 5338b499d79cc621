//! Symmetric matrices, their power-sum traces, and matrix polynomials.
//!
//! Everything downstream of ingestion only ever needs `tr(S^j)` for a few
//! small `j`, plus the ability to evaluate a polynomial `sum_l c_l S^l` at the
//! end. Diagonal inputs keep a compact representation so that power sums for
//! very large `d` (tens of thousands) never allocate a dense matrix.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative asymmetry `|a_ij - a_ji| / (1 + |a_ij|)` accepted on ingestion.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(DMatrix<f64>),
    Diagonal(Vec<f64>),
}

/// A real symmetric `d x d` matrix with `d >= 2`.
///
/// Entries are exactly symmetric: dense input is replaced by `(A + A')/2`
/// when it is constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    repr: Repr,
}

impl SymmetricMatrix {
    /// Validates symmetry to [`SYMMETRY_TOLERANCE`] and symmetrizes.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let d = check_square(&m)?;
        for i in 0..d {
            for j in (i + 1)..d {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                let deviation = (a - b).abs() / (1.0 + a.abs());
                if deviation > SYMMETRY_TOLERANCE {
                    return Err(Error::Asymmetric {
                        i: i + 1,
                        j: j + 1,
                        deviation,
                        tolerance: SYMMETRY_TOLERANCE,
                    });
                }
            }
        }
        Ok(Self::symmetrize(m))
    }

    /// Replaces `m` by `(m + m')/2` without any tolerance check.
    ///
    /// # Panics
    /// If `m` is not square or smaller than 2x2.
    pub fn symmetrize(m: DMatrix<f64>) -> Self {
        check_square(&m).expect("symmetrize needs a square matrix with d >= 2");
        let s = (&m + m.transpose()) * 0.5;
        Self {
            repr: Repr::Dense(s),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Parse {
                    row: i + 1,
                    col: row.len().min(d) + 1,
                    msg: format!("expected {d} entries, found {}", row.len()),
                });
            }
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    /// `diag(values)`, stored compactly.
    pub fn from_diagonal(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DimensionTooSmall(values.len()));
        }
        Ok(Self {
            repr: Repr::Diagonal(values),
        })
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::from_diagonal(vec![0.0; d])
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::from_diagonal(vec![1.0; d])
    }

    /// `theta * I_d`.
    pub fn scaled_identity(d: usize, theta: f64) -> Result<Self> {
        Self::from_diagonal(vec![theta; d])
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Dense(m) => m.nrows(),
            Repr::Diagonal(v) => v.len(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Dense(m) => m[(i, j)],
            Repr::Diagonal(v) => {
                if i == j {
                    v[i]
                } else {
                    0.0
                }
            }
        }
    }

    /// Dense copy of the matrix.
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Diagonal(v) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v)),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Dense(m) => m.trace(),
            Repr::Diagonal(v) => v.iter().sum(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(m * t),
            Repr::Diagonal(v) => Repr::Diagonal(v.iter().map(|x| x * t).collect()),
        };
        Self { repr }
    }

    /// `Q S Q'` for a square `Q` of matching size.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.nrows(),
            });
        }
        Ok(Self::symmetrize(q * self.to_dmatrix() * q.transpose()))
    }

    /// Adds `delta` to entry `(i, j)` and, when `i != j`, to `(j, i)`.
    pub fn perturbed(&self, i: usize, j: usize, delta: f64) -> Self {
        match &self.repr {
            Repr::Diagonal(v) if i == j => {
                let mut v = v.clone();
                v[i] += delta;
                Self {
                    repr: Repr::Diagonal(v),
                }
            }
            _ => {
                let mut m = self.to_dmatrix();
                m[(i, j)] += delta;
                if i != j {
                    m[(j, i)] += delta;
                }
                Self {
                    repr: Repr::Dense(m),
                }
            }
        }
    }

    /// Eigenvalues in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match &self.repr {
            Repr::Diagonal(v) => {
                if v.iter().all(|x| x.is_finite()) {
                    Ok(v.clone())
                } else {
                    Err(Error::Numeric("non-finite diagonal entry".into()))
                }
            }
            Repr::Dense(m) => {
                if !m.iter().all(|x| x.is_finite()) {
                    return Err(Error::Numeric(
                        "eigen-decomposition needs finite entries".into(),
                    ));
                }
                let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
                    .ok_or_else(|| Error::Numeric("eigen-decomposition did not converge".into()))?;
                Ok(eig.eigenvalues.iter().copied().collect())
            }
        }
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.get(i, j) - other.get(i, j)).abs());
            }
        }
        worst
    }

    /// Serializes in the matrix text format read by [`load_matrix`].
    pub fn to_text(&self) -> String {
        let d = self.dim();
        let mut out = format!("{d}\n");
        for i in 0..d {
            for j in 0..d {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:?}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() < 2 {
        return Err(Error::DimensionTooSmall(m.nrows()));
    }
    Ok(m.nrows())
}

/// Parses the plain-text matrix format: a header line holding `d`, then `d`
/// lines of `d` whitespace-separated decimal numbers. Blank lines and lines
/// starting with `#` are ignored.
pub fn load_matrix(text: &str) -> Result<SymmetricMatrix> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let header = lines.next().ok_or_else(|| Error::Parse {
        row: 0,
        col: 0,
        msg: "empty input, expected dimension header".into(),
    })?;
    let mut head_tokens = header.split_whitespace();
    let d_token = head_tokens.next().unwrap_or_default();
    let d: usize = d_token.parse().map_err(|_| Error::Parse {
        row: 0,
        col: 1,
        msg: format!("dimension header {d_token:?} is not a positive integer"),
    })?;
    if head_tokens.next().is_some() {
        return Err(Error::Parse {
            row: 0,
            col: 2,
            msg: "header line must contain only the dimension".into(),
        });
    }
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }

    let mut m = DMatrix::<f64>::zeros(d, d);
    let mut rows_read = 0;
    for line in lines {
        let row = rows_read + 1;
        if rows_read == d {
            return Err(Error::Parse {
                row,
                col: 1,
                msg: format!("unexpected extra row, matrix has only {d} rows"),
            });
        }
        let mut cols_read = 0;
        for token in line.split_whitespace() {
            let col = cols_read + 1;
            if cols_read == d {
                return Err(Error::Parse {
                    row,
                    col,
                    msg: format!("too many entries, expected {d}"),
                });
            }
            let value: f64 = token
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    col,
                    msg: format!("{token:?} is not a finite decimal number"),
                })?;
            m[(rows_read, cols_read)] = value;
            cols_read += 1;
        }
        if cols_read < d {
            return Err(Error::Parse {
                row,
                col: cols_read + 1,
                msg: format!("too few entries, expected {d}, found {cols_read}"),
            });
        }
        rows_read += 1;
    }
    if rows_read < d {
        return Err(Error::Parse {
            row: rows_read + 1,
            col: 1,
            msg: format!("missing row, expected {d} rows, found {rows_read}"),
        });
    }
    SymmetricMatrix::new(m)
}

/// Root-sum-of-squares of the entries.
pub fn frobenius_norm(s: &SymmetricMatrix) -> f64 {
    match &s.repr {
        Repr::Dense(m) => m.norm(),
        Repr::Diagonal(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// Dimension plus the traces `p_j = tr(S^j)` for `j = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    d: usize,
    // p[0] = tr(S^0) = d
    p: Vec<f64>,
    norm: f64,
}

impl PowerSums {
    /// Power sums of the given eigenvalues up to order `max_order`.
    pub fn from_eigenvalues(eigenvalues: &[f64], max_order: usize) -> Result<Self> {
        if max_order == 0 {
            return Err(Error::OutOfRange {
                what: "max power-sum order K",
                value: 0.0,
                allowed: "K >= 1",
            });
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite eigenvalue".into()));
        }
        let d = eigenvalues.len();
        let mut sums = vec![Neumaier::default(); max_order];
        let mut sq = Neumaier::default();
        for &lambda in eigenvalues {
            sq.add(lambda * lambda);
            let mut pow = lambda;
            for s in sums.iter_mut() {
                s.add(pow);
                pow *= lambda;
            }
        }
        let mut p = Vec::with_capacity(max_order + 1);
        p.push(d as f64);
        p.extend(sums.iter().map(Neumaier::total));
        Ok(Self {
            d,
            p,
            norm: sq.total().sqrt(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Largest order `K` available.
    pub fn max_order(&self) -> usize {
        self.p.len() - 1
    }

    /// `tr(S^j)`; `j = 0` gives `d`.
    ///
    /// # Panics
    /// If `j > K`.
    pub fn get(&self, j: usize) -> f64 {
        self.p[j]
    }

    /// `[tr(S^0), tr(S^1), ..., tr(S^K)]`.
    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    /// Frobenius norm `sqrt(tr(S^2))`.
    pub fn frobenius(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    pub(crate) fn require(&self, order: usize) -> Result<()> {
        if order > self.max_order() {
            Err(Error::InsufficientPowerSums {
                needed: order,
                available: self.max_order(),
            })
        } else {
            Ok(())
        }
    }
}

/// `tr(S^j)` for `j = 1..=max_order` from a symmetric eigen-decomposition
/// (the diagonal entries directly, for diagonal input).
pub fn power_sums(s: &SymmetricMatrix, max_order: usize) -> Result<PowerSums> {
    PowerSums::from_eigenvalues(&s.eigenvalues()?, max_order)
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The matrix polynomial `sum_{l=0}^{L} c_l S^l` in a `d x d` symmetric `S`;
/// `c_0` multiplies the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPolynomial {
    d: usize,
    coeffs: Vec<f64>,
}

impl GradientPolynomial {
    pub fn new(d: usize, coeffs: Vec<f64>) -> Self {
        Self { d, coeffs }
    }

    pub fn zero(d: usize) -> Self {
        Self { d, coeffs: vec![] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest power of `S` with a stored coefficient, `None` when empty.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    /// Coefficient-wise `self += t * other`.
    pub fn add_scaled(&mut self, t: f64, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += t * o;
        }
    }

    /// Evaluates the polynomial at a scalar (e.g. an eigenvalue).
    pub fn eval_scalar(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Evaluates `g` at `s` by Horner's scheme.
pub fn materialize(g: &GradientPolynomial, s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let d = s.dim();
    if g.d != d {
        return Err(Error::DimensionMismatch {
            expected: g.d,
            found: d,
        });
    }
    match &s.repr {
        Repr::Diagonal(v) => {
            SymmetricMatrix::from_diagonal(v.iter().map(|&x| g.eval_scalar(x)).collect())
        }
        Repr::Dense(m) => {
            let mut acc = DMatrix::<f64>::zeros(d, d);
            for &c in g.coeffs.iter().rev() {
                acc = &acc * m;
                for i in 0..d {
                    acc[(i, i)] += c;
                }
            }
            Ok(SymmetricMatrix::symmetrize(acc))
        }
    }
}
