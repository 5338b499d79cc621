//! Fixtures shared by the benchmarks.

use bingham_core::oracle::random_trace_zero;
use bingham_core::SymmetricMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dense trace-zero matrix of Frobenius norm `norm`, fixed by `seed`.
pub fn dense_fixture(d: usize, norm: f64, seed: u64) -> SymmetricMatrix {
    random_trace_zero(d, norm, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Diagonal matrix with evenly spread entries of Frobenius norm `norm`.
pub fn diagonal_fixture(d: usize, norm: f64) -> SymmetricMatrix {
    let raw: Vec<f64> = (0..d).map(|i| (i as f64 + 0.5) / d as f64 - 0.5).collect();
    let scale = norm / raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    SymmetricMatrix::from_diagonal(raw.into_iter().map(|x| x * scale).collect()).unwrap()
}
