//! Closed-form moments and distributions for one permutation hashing.
//!
//! Everything is a function of `(D, k, f1, f2, a)`. The fixed-length results
//! are built from the falling-factorial ratios
//!
//! ```text
//! P_m = ∏_{t=0}^{f-1} (D(1 - m/k) - t) / (D - t)
//! ```
//!
//! the probability that `m` given bins are all jointly empty. `P_m` is taken
//! as zero whenever `D(1 - m/k) < f`, which is also what the product gives for
//! integral `D(1 - m/k)`. Floating-point evaluation works with `ln P_m` and
//! `expm1` so that neither tiny products nor `1 - P_m` lose precision; the
//! [`exact`] module evaluates the same quantities in rational arithmetic.

pub mod dist;
pub mod exact;

pub use dist::{dist_nemp, NempDistribution, EXACT_MAX_D, EXACT_MAX_F};

use crate::datamodel::PairSpec;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TheoryInput {
    pub d: u64,
    pub k: u64,
    pub f1: u64,
    pub f2: u64,
    pub a: u64,
}

impl TheoryInput {
    pub fn new(d: u64, k: u64, f1: u64, f2: u64, a: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        PairSpec::new(f1, f2, a, d)?;
        Ok(Self { d, k, f1, f2, a })
    }

    /// Input with only the union size known (`f1 = f`, `f2 = a = 0`).
    pub fn from_union(d: u64, k: u64, f: u64) -> Result<Self> {
        Self::new(d, k, f, 0, 0)
    }

    pub fn from_pair(pair: &PairSpec, k: u64) -> Result<Self> {
        Self::new(pair.d, k, pair.f1, pair.f2, pair.a)
    }

    /// `f = f1 + f2 - a`.
    pub fn union(&self) -> u64 {
        self.f1 + self.f2 - self.a
    }

    pub fn resemblance(&self) -> f64 {
        let f = self.union();
        if f == 0 {
            0.0
        } else {
            self.a as f64 / f as f64
        }
    }

    /// `(a - 1)/(f - 1)`: the chance that a second union element drawn after a
    /// shared one is also shared. Zero when fewer than two elements exist.
    fn r_tilde(&self) -> f64 {
        let f = self.union();
        if f < 2 || self.a == 0 {
            0.0
        } else {
            (self.a - 1) as f64 / (f - 1) as f64
        }
    }
}

/// Mean and variance of `N_emp` normalized as `E/k` and `Var/k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NempMoments {
    pub mean_ratio: f64,
    pub var_ratio: f64,
}

/// Whether `P_m` is structurally zero, i.e. `D(k - m) < f k`.
pub(crate) fn removal_is_zero(d: u64, k: u64, m: u64, f: u64) -> bool {
    m > k || (d as u128) * ((k - m) as u128) < (f as u128) * (k as u128)
}

/// `ln P_m`, or `None` when `P_m = 0`.
pub(crate) fn ln_removal(d: u64, k: u64, m: u64, f: u64) -> Option<f64> {
    if f == 0 {
        return Some(0.0);
    }
    if removal_is_zero(d, k, m, f) {
        return None;
    }
    if m == 0 {
        return Some(0.0);
    }
    let removed = d as f64 * (m as f64 / k as f64);
    let d = d as f64;
    let mut acc = 0.0;
    for t in 0..f {
        acc += (-removed / (d - t as f64)).ln_1p();
    }
    Some(acc)
}

/// `ln(P_2 / P_1) = ln ∏ (D(1-2/k) - t)/(D(1-1/k) - t)`, `None` when `P_2 = 0`.
fn ln_second_over_first(d: u64, k: u64, f: u64) -> Option<f64> {
    if removal_is_zero(d, k, 2, f) {
        return None;
    }
    let bin = d as f64 / k as f64;
    let base = d as f64 * (1.0 - 1.0 / k as f64);
    let mut acc = 0.0;
    for t in 0..f {
        acc += (-bin / (base - t as f64)).ln_1p();
    }
    Some(acc)
}

/// The pieces every fixed-length closed form is assembled from.
#[derive(Debug, Clone, Copy)]
struct Removal {
    /// `P_1`.
    p1: f64,
    /// `1 - P_1`.
    q1: f64,
    /// `1 - P_2/P_1` (1 when `P_2 = 0`).
    one_minus_rho: f64,
}

fn removal(t: &TheoryInput) -> Removal {
    let f = t.union();
    match ln_removal(t.d, t.k, 1, f) {
        None => Removal {
            p1: 0.0,
            q1: 1.0,
            one_minus_rho: 1.0,
        },
        Some(l1) => {
            let p1 = l1.exp();
            let q1 = -l1.exp_m1();
            let one_minus_rho = match ln_second_over_first(t.d, t.k, f) {
                Some(lr) => -lr.exp_m1(),
                None => 1.0,
            };
            Removal {
                p1,
                q1,
                one_minus_rho,
            }
        }
    }
}

/// `E(N_emp) = k·P_1`; zero when `D(1 - 1/k) < f`.
pub fn e_nemp(t: &TheoryInput) -> f64 {
    t.k as f64 * removal(t).p1
}

/// `Var(N_emp)`. Covers both boundary regimes: when `D(1 - 2/k) < f` two bins
/// cannot be jointly empty together and the variance reduces to `E - E²`.
pub fn var_nemp(t: &TheoryInput) -> f64 {
    let k = t.k as f64;
    let r = removal(t);
    // P1² - P2 = P1·((1 - ρ) - (1 - P1))
    let excess = r.p1 * (r.one_minus_rho - r.q1);
    let ratio = r.p1 * r.q1 / k - (1.0 - 1.0 / k) * excess;
    (ratio * k * k).max(0.0)
}

/// The "binomial analog" `(1/k)(E/k)(1 - E/k)` that bounds `Var(N_emp)/k²`.
pub fn binomial_analog(mean_ratio: f64, k: u64) -> f64 {
    mean_ratio * (1.0 - mean_ratio) / k as f64
}

/// `(1 - x)^f` for `x` in `[0, 1]` computed as `exp(f·ln1p(-x))`.
fn pow_one_minus(x: f64, f: u64) -> f64 {
    if f == 0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        (f as f64 * (-x).ln_1p()).exp()
    }
}

/// Sparse-data approximations `E/k ≈ (1-1/k)^f` and the matching leading-order
/// variance, with the `O(f²/(kD))` terms dropped.
pub fn approx_nemp_moments(t: &TheoryInput) -> Result<NempMoments> {
    let f = t.union();
    if removal_is_zero(t.d, t.k, 1, f) {
        return Err(invalid(format!(
            "approximation needs f <= D(1 - 1/k); f = {f}, D = {}, k = {}",
            t.d, t.k
        )));
    }
    let k = t.k as f64;
    let q = pow_one_minus(1.0 / k, f);
    if t.k == 1 {
        return Ok(NempMoments {
            mean_ratio: q,
            var_ratio: 0.0,
        });
    }
    let r = pow_one_minus(1.0 / (k - 1.0), f);
    let var = q * (1.0 - q) / k - pow_one_minus(1.0 / k, f + 1) * (q - r);
    Ok(NempMoments {
        mean_ratio: q,
        var_ratio: var,
    })
}

/// `E(N_mat) = kR(1 - P_1)`.
pub fn e_nmat(t: &TheoryInput) -> f64 {
    t.k as f64 * t.resemblance() * removal(t).q1
}

/// `Var(N_mat)`.
pub fn var_nmat(t: &TheoryInput) -> f64 {
    let k = t.k as f64;
    let rr = t.resemblance();
    if rr == 0.0 {
        return 0.0;
    }
    let r = removal(t);
    let mean_ratio = rr * r.q1;
    // Pr(two given bins both non-empty) = 1 - 2P1 + P2
    let both = r.q1 - r.p1 * r.one_minus_rho;
    let ratio = mean_ratio * (1.0 - mean_ratio) / k + (1.0 - 1.0 / k) * rr * t.r_tilde() * both
        - (1.0 - 1.0 / k) * rr * rr * r.q1 * r.q1;
    (ratio * k * k).max(0.0)
}

/// `Cov(N_mat, N_emp)`, never positive.
pub fn cov_nmat_nemp(t: &TheoryInput) -> f64 {
    let k = t.k as f64;
    let r = removal(t);
    // Cov/k² = R·P1·((1 - 1/k)(1 - ρ) - (1 - P1))
    let ratio = t.resemblance() * r.p1 * ((1.0 - 1.0 / k) * r.one_minus_rho - r.q1);
    ratio * k * k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarMode {
    /// `E[1/(k - N_emp)]` summed over the distribution of `N_emp`.
    ExactViaDist,
    /// `E[1/(k - N_emp)]` replaced by `1/(k - E(N_emp))`.
    Approximation,
}

/// `Var(R̂_mat) = R(1-R)·(E[1/(k - N_emp)]·(1 + 1/(f-1)) - 1/(f-1))`.
///
/// `ExactViaDist` uses the rational distribution when the input is within the
/// exact-mode guards and the floating-point distribution otherwise; the latter
/// fails if it is flagged ill-conditioned.
pub fn var_rmat(t: &TheoryInput, mode: VarMode) -> Result<f64> {
    let rr = t.resemblance();
    let f = t.union();
    if rr == 0.0 || rr == 1.0 || f < 2 {
        return Ok(0.0);
    }
    let k = t.k as f64;
    let inv = match mode {
        VarMode::Approximation => 1.0 / (k - e_nemp(t)),
        VarMode::ExactViaDist => {
            let exact = t.d <= EXACT_MAX_D && f <= EXACT_MAX_F;
            let dist = dist_nemp(t, exact)?;
            if dist.is_ill_conditioned() {
                return Err(Error::IllConditioned(format!(
                    "Pr(N_emp = j) cancels catastrophically for D = {}, k = {}, f = {f}; use the approximation",
                    t.d, t.k
                )));
            }
            dist.expected_inverse_nonempty()
        }
    };
    let fm1 = (f - 1) as f64;
    Ok(rr * (1.0 - rr) * (inv * (1.0 + 1.0 / fm1) - 1.0 / fm1))
}

/// Approximate ratio of `Var(R̂_mat)` to the k-permutation variance `R(1-R)/k`:
/// `g(f; k) = (1 + 1/(f-1)) / (1 - (1-1/k)^f) - k/(f-1)`.
pub fn g_ratio(f: u64, k: u64) -> Result<f64> {
    if f < 2 {
        return Err(invalid("g(f; k) needs f >= 2"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let fm1 = (f - 1) as f64;
    // 1 - (1 - 1/k)^f without cancellation
    let filled = if k == 1 {
        1.0
    } else {
        -(f as f64 * (-1.0 / k as f64).ln_1p()).exp_m1()
    };
    Ok((1.0 + 1.0 / fm1) / filled - k as f64 / fm1)
}

/// `N_emp` moments under the variable-length scheme: `E/k = (1-1/k)^f` and
/// `Var/k² = (1/k)E/k(1-E/k) - (1-1/k)((1-1/k)^{2f} - (1-2/k)^f)`.
pub fn nemp_moments_variable(t: &TheoryInput) -> NempMoments {
    let f = t.union();
    let k = t.k as f64;
    let q = pow_one_minus(1.0 / k, f);
    if t.k == 1 || f == 0 {
        return NempMoments {
            mean_ratio: q,
            var_ratio: 0.0,
        };
    }
    let q2 = pow_one_minus(2.0 / k, f);
    let var = q * (1.0 - q) / k - (1.0 - 1.0 / k) * (q * q - q2);
    NempMoments {
        mean_ratio: q,
        var_ratio: var,
    }
}

/// Fixed-length `E(N_emp)/k` as a ratio (the `P_1` product).
pub fn e_nemp_ratio(t: &TheoryInput) -> f64 {
    removal(t).p1
}
