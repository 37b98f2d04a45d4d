//! Pair statistics and resemblance estimators.

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sketch::{MinwiseVector, OphSketch, Slot};

/// Bin counts for a pair of sketches built under the same permutation(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairStats {
    /// Bins empty in both sketches.
    pub n_emp: usize,
    /// Bins non-empty in both with equal values.
    pub n_mat: usize,
    /// Empty bins of the first sketch.
    pub n_emp1: usize,
    /// Empty bins of the second sketch.
    pub n_emp2: usize,
    pub k: usize,
}

pub fn pair_stats(a: &OphSketch, b: &OphSketch) -> Result<PairStats> {
    a.check_compatible(b)?;
    let mut st = PairStats {
        n_emp: 0,
        n_mat: 0,
        n_emp1: 0,
        n_emp2: 0,
        k: a.k(),
    };
    for (x, y) in a.slots().iter().zip(b.slots()) {
        match (x, y) {
            (Slot::Empty, Slot::Empty) => {
                st.n_emp += 1;
                st.n_emp1 += 1;
                st.n_emp2 += 1;
            }
            (Slot::Empty, _) => st.n_emp1 += 1,
            (_, Slot::Empty) => st.n_emp2 += 1,
            (Slot::Value(u), Slot::Value(v)) => st.n_mat += (u == v) as usize,
        }
    }
    Ok(st)
}

/// `N_mat / (k - N_emp)`, unbiased for the resemblance.
pub fn estimate_r_mat(st: &PairStats) -> f64 {
    st.n_mat as f64 / (st.k - st.n_emp) as f64
}

/// Zero-coding estimator `N_mat / sqrt((k - N_emp1)(k - N_emp2))`, the value of
/// the normalized inner product of two zero-coded expansions.
pub fn estimate_r_zero(st: &PairStats) -> f64 {
    let d1 = (st.k - st.n_emp1) as f64;
    let d2 = (st.k - st.n_emp2) as f64;
    st.n_mat as f64 / (d1.sqrt() * d2.sqrt())
}

/// Fraction of coordinates with equal minima.
pub fn estimate_r_kperm(v1: &MinwiseVector, v2: &MinwiseVector) -> Result<f64> {
    if v1.k() != v2.k() || v1.seeds() != v2.seeds() || v1.dim() != v2.dim() {
        return Err(Error::Incompatible(
            "minwise vectors use different permutations".into(),
        ));
    }
    let hits = v1
        .values()
        .iter()
        .zip(v2.values())
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / v1.k() as f64)
}

/// Random coding: every empty slot gets a uniform value from the bin's value
/// domain, drawn from a stream keyed by `(seed, vector_id, bin)`.
pub fn fill_random(sk: &OphSketch, vector_id: u64, seed: u64) -> OphSketch {
    let cap = sk.bin_capacity();
    let slots = sk
        .slots()
        .iter()
        .enumerate()
        .map(|(j, s)| match s {
            Slot::Empty => {
                let h = derive_seed(seed, &[vector_id, j as u64]);
                Slot::Value(((h as u128 * cap as u128) >> 64) as u64)
            }
            v => *v,
        })
        .collect();
    sk.with_slots(slots)
}

/// Random-coding resemblance estimate: matches among filled sketches over `k`.
pub fn estimate_r_random(
    a: &OphSketch,
    b: &OphSketch,
    id_a: u64,
    id_b: u64,
    seed: u64,
) -> Result<f64> {
    let st = pair_stats(&fill_random(a, id_a, seed), &fill_random(b, id_b, seed))?;
    debug_assert_eq!(st.n_emp, 0);
    Ok(st.n_mat as f64 / st.k as f64)
}
