//! Multiplicity vectors `(i_1, ..., i_k)` with `i_1 + 2 i_2 + ... + k i_k = k`
//! and their exact weights `1 / prod_j (i_j! (2j)^{i_j})`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{self, ExactRational};

/// Largest `k` for which partitions are enumerated.
pub const MAX_ORDER: u32 = 40;

/// A partition of `k` in multiplicity form: `i[j-1]` copies of part `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionMultiplicity {
    i: Vec<u32>,
}

impl PartitionMultiplicity {
    /// Checks `sum_j j * i_j == i.len()`.
    pub fn new(i: Vec<u32>) -> Result<Self> {
        let k = i.len() as u64;
        let weighted: u64 = i
            .iter()
            .enumerate()
            .map(|(idx, &n)| (idx as u64 + 1) * u64::from(n))
            .sum();
        if k == 0 || weighted != k {
            return Err(Error::OutOfRange {
                what: "weighted multiplicity sum",
                value: weighted as f64,
                allowed: "must equal the vector length k >= 1",
            });
        }
        Ok(Self { i })
    }

    pub fn k(&self) -> u32 {
        self.i.len() as u32
    }

    /// `(i_1, ..., i_k)`.
    pub fn multiplicities(&self) -> &[u32] {
        &self.i
    }

    /// Multiplicity of part `j` (1-based).
    pub fn of(&self, j: usize) -> u32 {
        self.i[j - 1]
    }

    /// Pairs `(j, i_j)` with `i_j > 0`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.i
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(idx, &n)| (idx + 1, n))
    }
}

fn check_order(k: u32) -> Result<()> {
    if (1..=MAX_ORDER).contains(&k) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "partition order k",
            value: f64::from(k),
            allowed: "1 <= k <= 40",
        })
    }
}

/// All partitions of `k`, each exactly once, in descending lexicographic
/// order of `(i_1, ..., i_k)`, so `(k, 0, ..., 0)` comes first and
/// `(0, ..., 0, 1)` last.
pub fn enumerate_partitions(k: u32) -> Result<Vec<PartitionMultiplicity>> {
    check_order(k)?;
    let mut out = Vec::new();
    let mut current = vec![0u32; k as usize];
    descend(1, k, &mut current, &mut out);
    Ok(out)
}

// Chooses i_part for part = 1, 2, ... in turn, largest multiplicity first.
fn descend(
    part: u32,
    remaining: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<PartitionMultiplicity>,
) {
    let k = current.len() as u32;
    if part > k {
        if remaining == 0 {
            out.push(PartitionMultiplicity { i: current.clone() });
        }
        return;
    }
    for n in (0..=remaining / part).rev() {
        let left = remaining - n * part;
        // what is left must be expressible with parts larger than `part`
        if left != 0 && left <= part {
            continue;
        }
        current[part as usize - 1] = n;
        descend(part + 1, left, current, out);
    }
    current[part as usize - 1] = 0;
}

/// `1 / prod_j (i_j! (2j)^{i_j})` in exact arithmetic.
pub fn partition_weight(pm: &PartitionMultiplicity) -> ExactRational {
    let mut den = BigInt::one();
    for (j, n) in pm.nonzero() {
        den *= BigInt::from(exact::factorial(n));
        den *= BigInt::from(2 * j as u64).pow(n);
    }
    ExactRational::new(BigInt::one(), den)
}

/// A partition together with the precomputed weights the series code needs.
#[derive(Debug, Clone)]
pub(crate) struct PartitionTerm {
    pub parts: Vec<(usize, u32)>,
    pub mult: PartitionMultiplicity,
    pub weight: ExactRational,
    /// `weight / (1/2)_k`, rounded once.
    pub series_coeff: f64,
    /// `k! weight / (1/2)_k`, rounded once.
    pub zonal_coeff: f64,
}

impl PartitionTerm {
    pub fn i1(&self) -> u32 {
        self.mult.of(1)
    }
}

static TERMS: [OnceLock<Vec<PartitionTerm>>; MAX_ORDER as usize + 1] =
    [const { OnceLock::new() }; MAX_ORDER as usize + 1];

/// Memoized partitions of `k` with weights; built on first use.
pub(crate) fn terms(k: u32) -> Result<&'static [PartitionTerm]> {
    check_order(k)?;
    Ok(TERMS[k as usize].get_or_init(|| {
        let half_k = exact::rising(&exact::half(), k);
        let k_fact = ExactRational::from_integer(BigInt::from(exact::factorial(k)));
        enumerate_partitions(k)
            .expect("order already checked")
            .into_iter()
            .map(|mult| {
                let weight = partition_weight(&mult);
                let series = &weight / &half_k;
                let zonal = &series * &k_fact;
                PartitionTerm {
                    parts: mult.nonzero().collect(),
                    series_coeff: exact::to_f64(&series),
                    zonal_coeff: exact::to_f64(&zonal),
                    weight,
                    mult,
                }
            })
            .collect()
    }))
}
