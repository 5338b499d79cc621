//! Independent reference computations: Monte-Carlo integration over the
//! unit sphere, the scalar Kummer series, central finite differences under
//! the symmetric-matrix gradient convention, and adaptive quadrature.
//!
//! None of these touch the zonal-series code path, which is what makes them
//! usable as oracles for it.
//!
//! # Random streams
//!
//! Sampling uses `ChaCha8Rng` seeded with `seed_from_u64(seed)`, one stream
//! per block (`set_stream(block)`), and ziggurat standard normals from
//! `rand_distr::StandardNormal`. Every estimate is split into [`MC_BLOCKS`]
//! blocks whose partial sums are reduced in block order, so results are
//! bit-identical for a given `(seed, n, S)` whatever the thread count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symmat::SymmetricMatrix;

/// Number of independent blocks (and jackknife replicates) per estimate.
pub const MC_BLOCKS: usize = 50;

/// Smallest sample count accepted by the Monte-Carlo estimators.
pub const MIN_SAMPLES: usize = 1000;

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub n_samples: usize,
    pub seed: u64,
}

/// Uniform points on `S^{d-1}` from normalized Gaussian vectors.
pub struct SphereSampler {
    rng: ChaCha8Rng,
    d: usize,
}

impl SphereSampler {
    pub fn new(d: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, d }
    }

    /// Writes the next point into `x` (length `d`).
    pub fn sample_into(&mut self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.d);
        loop {
            let mut sq = 0.0;
            for xi in x.iter_mut() {
                let z: f64 = self.rng.sample(StandardNormal);
                *xi = z;
                sq += z * z;
            }
            if sq > 0.0 {
                let inv = sq.sqrt().recip();
                x.iter_mut().for_each(|xi| *xi *= inv);
                return;
            }
        }
    }
}

/// `x' S x`, precomputed for repeated evaluation.
enum QuadraticForm {
    Diagonal(Vec<f64>),
    // row-major upper triangle, off-diagonal entries doubled
    Dense { d: usize, upper: Vec<f64> },
}

impl QuadraticForm {
    fn new(s: &SymmetricMatrix) -> Self {
        let d = s.dim();
        if s.is_diagonal() {
            return Self::Diagonal((0..d).map(|i| s.get(i, i)).collect());
        }
        let mut upper = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            upper.push(s.get(i, i));
            for j in (i + 1)..d {
                upper.push(2.0 * s.get(i, j));
            }
        }
        Self::Dense { d, upper }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Diagonal(v) => v.iter().zip(x).map(|(l, xi)| l * xi * xi).sum(),
            Self::Dense { d, upper } => {
                let mut total = 0.0;
                let mut idx = 0;
                for i in 0..*d {
                    let xi = x[i];
                    let mut row = 0.0;
                    for &xj in &x[i..] {
                        row += upper[idx] * xj;
                        idx += 1;
                    }
                    total += xi * row;
                }
                total
            }
        }
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::OutOfRange {
            what: "Monte-Carlo sample count",
            value: n as f64,
            allowed: "n >= 1000",
        });
    }
    Ok(())
}

fn block_sizes(n: usize) -> impl Iterator<Item = (usize, usize)> {
    let base = n / MC_BLOCKS;
    let extra = n % MC_BLOCKS;
    (0..MC_BLOCKS).map(move |b| (b, base + usize::from(b < extra)))
}

fn weight(form: &QuadraticForm, x: &[f64]) -> Result<f64> {
    let q = form.eval(x);
    let w = q.exp();
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Overflow(q))
    }
}

/// Monte-Carlo estimate of `Psi_d(S)`, the mean of `exp(x'Sx)` over uniform
/// `x` on the sphere.
pub fn mc_psi(s: &SymmetricMatrix, n: usize, seed: u64) -> Result<McEstimate<f64>> {
    check_samples(n)?;
    let d = s.dim();
    let form = QuadraticForm::new(s);
    let blocks: Vec<(f64, f64)> = block_sizes(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, size)| {
            let mut sampler = SphereSampler::new(d, seed, b as u64);
            let mut x = vec![0.0; d];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..size {
                sampler.sample_into(&mut x);
                let w = weight(&form, &x)?;
                sum += w;
                sum_sq += w * w;
            }
            Ok((sum, sum_sq))
        })
        .collect::<Result<_>>()?;
    let (sum, sum_sq) = blocks
        .iter()
        .fold((0.0, 0.0), |(a, b), (s1, s2)| (a + s1, b + s2));
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(McEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
        seed,
    })
}

/// Ratio estimator of `Cov(X) = E[x x' exp(x'Sx)] / E[exp(x'Sx)]` with
/// per-entry standard errors from a jackknife over the [`MC_BLOCKS`] blocks.
pub fn mc_cov(s: &SymmetricMatrix, n: usize, seed: u64) -> Result<McEstimate<SymmetricMatrix>> {
    check_samples(n)?;
    let d = s.dim();
    let tri = d * (d + 1) / 2;
    let form = QuadraticForm::new(s);
    let blocks: Vec<(f64, Vec<f64>)> = block_sizes(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, size)| {
            let mut sampler = SphereSampler::new(d, seed, b as u64);
            let mut x = vec![0.0; d];
            let mut w_sum = 0.0;
            let mut m_sum = vec![0.0; tri];
            for _ in 0..size {
                sampler.sample_into(&mut x);
                let w = weight(&form, &x)?;
                w_sum += w;
                let mut idx = 0;
                for i in 0..d {
                    let wxi = w * x[i];
                    for &xj in &x[i..] {
                        m_sum[idx] += wxi * xj;
                        idx += 1;
                    }
                }
            }
            Ok((w_sum, m_sum))
        })
        .collect::<Result<_>>()?;

    let mut w_total = 0.0;
    let mut m_total = vec![0.0; tri];
    for (w, m) in &blocks {
        w_total += w;
        m_total.iter_mut().zip(m).for_each(|(a, b)| *a += b);
    }
    let full: Vec<f64> = m_total.iter().map(|m| m / w_total).collect();

    let replicates: Vec<Vec<f64>> = blocks
        .iter()
        .map(|(w, m)| {
            let w_rest = w_total - w;
            m_total
                .iter()
                .zip(m)
                .map(|(mt, mb)| (mt - mb) / w_rest)
                .collect()
        })
        .collect();
    let nb = replicates.len() as f64;
    let mut se = vec![0.0; tri];
    for (e, s_e) in se.iter_mut().enumerate() {
        let mean = replicates.iter().map(|r| r[e]).sum::<f64>() / nb;
        let ss: f64 = replicates.iter().map(|r| (r[e] - mean).powi(2)).sum();
        *s_e = ((nb - 1.0) / nb * ss).sqrt();
    }

    Ok(McEstimate {
        value: unpack_upper(d, &full),
        std_error: unpack_upper(d, &se),
        n_samples: n,
        seed,
    })
}

fn unpack_upper(d: usize, upper: &[f64]) -> SymmetricMatrix {
    let mut m = DMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            m[(i, j)] = upper[idx];
            m[(j, i)] = upper[idx];
            idx += 1;
        }
    }
    SymmetricMatrix::symmetrize(m)
}

/// Scalar Kummer function `1F1(1/2; b; theta)`, summed until the terms drop
/// below `1e-16` of the running total.
pub fn kummer_scalar(b: f64, theta: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::OutOfRange {
            what: "Kummer parameter b",
            value: b,
            allowed: "b > 0",
        });
    }
    if !(theta.abs() <= 50.0) {
        return Err(Error::OutOfRange {
            what: "Kummer argument theta",
            value: theta,
            allowed: "|theta| <= 50",
        });
    }
    const MAX_TERMS: usize = 500;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (0.5 + kf) / (b + kf) * theta / (kf + 1.0);
        sum += term;
        if kf > theta.abs() && term.abs() < 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(MAX_TERMS))
}

/// First `terms` terms (`k = 0..terms-1`) of the scalar Kummer series.
pub fn kummer_partial_sum(b: f64, theta: f64, terms: u32) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..terms {
        sum += term;
        let kf = f64::from(k);
        term *= (0.5 + kf) / (b + kf) * theta / (kf + 1.0);
    }
    sum
}

/// Central-difference gradient under the convention
/// `(1/2)(1 + delta_ij) d f / d s_ij`, treating `s_ij = s_ji` as one variable.
pub fn fd_gradient<F>(f: F, s: &SymmetricMatrix, h: f64) -> Result<SymmetricMatrix>
where
    F: Fn(&SymmetricMatrix) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::OutOfRange {
            what: "finite-difference step h",
            value: h,
            allowed: "h > 0",
        });
    }
    let d = s.dim();
    let mut g = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let up = f(&s.perturbed(i, j, h))?;
            let down = f(&s.perturbed(i, j, -h))?;
            if !(up.is_finite() && down.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite evaluation at entry ({i},{j})"
                )));
            }
            let scale = if i == j { 1.0 } else { 0.5 };
            let v = scale * (up - down) / (2.0 * h);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(SymmetricMatrix::symmetrize(g))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Symmetric matrix with independent standard-normal entries on and above the
/// diagonal.
pub fn random_symmetric<R: Rng>(d: usize, rng: &mut R) -> SymmetricMatrix {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let z: f64 = rng.sample(StandardNormal);
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    SymmetricMatrix::symmetrize(m)
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `R`'s diagonal folded into `Q`.
pub fn random_orthogonal<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random symmetric matrix with trace zero rescaled to Frobenius norm `norm`.
pub fn random_trace_zero<R: Rng>(d: usize, norm: f64, rng: &mut R) -> SymmetricMatrix {
    let mut m = random_symmetric(d, rng).to_dmatrix();
    let shift = m.trace() / d as f64;
    for i in 0..d {
        m[(i, i)] -= shift;
    }
    let scale = norm / m.norm();
    SymmetricMatrix::symmetrize(m * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_of_zero_is_exact() {
        let est = mc_psi(&SymmetricMatrix::zeros(4).unwrap(), 5000, 1).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.n_samples, 5000);
    }

    #[test]
    fn sample_count_checked() {
        assert!(mc_psi(&SymmetricMatrix::zeros(4).unwrap(), 999, 1).is_err());
        assert!(mc_cov(&SymmetricMatrix::zeros(4).unwrap(), 10, 1).is_err());
    }

    #[test]
    fn overflow_reported() {
        let s = SymmetricMatrix::scaled_identity(3, 1000.0).unwrap();
        assert!(matches!(mc_psi(&s, 1000, 1), Err(Error::Overflow(_))));
    }

    #[test]
    fn quadratic_form_dense_matches_direct() {
        let s = crate::symmat::load_matrix("3\n1 2 3\n2 -1 0.5\n3 0.5 2").unwrap();
        let form = QuadraticForm::new(&s);
        let x = [0.3, -0.4, 0.5];
        let m = s.to_dmatrix();
        let v = nalgebra::DVector::from_column_slice(&x);
        let expect = (v.transpose() * m * &v)[(0, 0)];
        assert!((form.eval(&x) - expect).abs() < 1e-14);
    }

    #[test]
    fn sampler_is_on_sphere_and_reproducible() {
        let mut a = SphereSampler::new(5, 42, 3);
        let mut b = SphereSampler::new(5, 42, 3);
        let mut c = SphereSampler::new(5, 42, 4);
        let (mut x, mut y, mut z) = ([0.0; 5], [0.0; 5], [0.0; 5]);
        a.sample_into(&mut x);
        b.sample_into(&mut y);
        c.sample_into(&mut z);
        assert_eq!(x, y);
        assert_ne!(x, z);
        assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_scalar(3.0, 0.0).unwrap(), 1.0);
        for theta in [-3.0, -0.5, 0.7, 4.0] {
            let v = kummer_scalar(0.5, theta).unwrap();
            assert!((v / f64::exp(theta) - 1.0).abs() < 1e-14);
        }
        assert!(kummer_scalar(0.0, 1.0).is_err());
        assert!(kummer_scalar(1.0, 51.0).is_err());
        assert_eq!(kummer_partial_sum(2.0, 1.0, 1), 1.0);
        assert!((kummer_partial_sum(2.0, 1.0, 2) - 1.25).abs() < 1e-16);
    }

    #[test]
    fn quadrature_smooth_integrand() {
        let v = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn fd_of_trace_is_identity() {
        let s = crate::symmat::load_matrix("3\n1 2 3\n2 -1 0.5\n3 0.5 2").unwrap();
        let g = fd_gradient(|m| Ok(m.trace()), &s, 1e-4).unwrap();
        assert!(g.max_abs_diff(&SymmetricMatrix::identity(3).unwrap()) < 1e-10);
        assert!(fd_gradient(|m| Ok(m.trace()), &s, 0.0).is_err());
    }

    #[test]
    fn random_helpers() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_orthogonal(6, &mut rng);
        assert!((q.transpose() * &q - DMatrix::identity(6, 6)).amax() < 1e-13);
        let s = random_trace_zero(7, 0.8, &mut rng);
        assert!(s.trace().abs() < 1e-14);
        assert!((crate::symmat::frobenius_norm(&s) - 0.8).abs() < 1e-14);
    }
}
