//! Distribution of the number of jointly empty bins.
//!
//! `Pr(N_emp = j) = Σ_{s} (-1)^s k!/(j! s! (k-j-s)!) · P_{j+s}`. Only `j` with
//! `k - f <= j` and `P_j > 0` can have mass, so the work is bounded by roughly
//! `min(k, f)²` terms regardless of `k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{ln_removal, removal_is_zero, TheoryInput};
use crate::error::{invalid, Error, Result};

/// Largest `D` accepted in exact (rational) mode.
pub const EXACT_MAX_D: u64 = 1 << 14;
/// Largest union size accepted in exact (rational) mode.
pub const EXACT_MAX_F: u64 = 1 << 10;
/// Float-mode results whose largest summand exceeds the result by this factor
/// are flagged.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub enum NempDistribution {
    /// `Pr(N_emp = j)` for `j = 0..k`, as exact rationals.
    Exact(Vec<BigRational>),
    Float {
        probs: Vec<f64>,
        /// Largest summand magnitude over the largest probability.
        condition: f64,
        /// Bound on the absolute rounding error of any single probability.
        error_bound: f64,
        ill_conditioned: bool,
    },
}

impl NempDistribution {
    pub fn len(&self) -> usize {
        match self {
            Self::Exact(p) => p.len(),
            Self::Float { probs, .. } => probs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    pub fn is_ill_conditioned(&self) -> bool {
        matches!(self, Self::Float { ill_conditioned: true, .. })
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        match self {
            Self::Exact(p) => p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            Self::Float { probs, .. } => probs.clone(),
        }
    }

    pub fn prob(&self, j: usize) -> f64 {
        match self {
            Self::Exact(p) => p.get(j).and_then(|x| x.to_f64()).unwrap_or(0.0),
            Self::Float { probs, .. } => probs.get(j).copied().unwrap_or(0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exact(p) => {
                let mut acc = BigRational::zero();
                for (j, x) in p.iter().enumerate() {
                    acc += x * BigRational::from(BigInt::from(j));
                }
                acc.to_f64().unwrap_or(f64::NAN)
            }
            Self::Float { probs, .. } => probs.iter().enumerate().map(|(j, p)| j as f64 * p).sum(),
        }
    }

    /// `E[1/(k - N_emp)]`. Needs `Pr(N_emp = k) = 0`, which holds for `f >= 1`.
    pub fn expected_inverse_nonempty(&self) -> f64 {
        let k = self.len();
        match self {
            Self::Exact(p) => {
                let mut acc = BigRational::zero();
                for (j, x) in p.iter().enumerate() {
                    if !x.is_zero() {
                        acc += x / BigRational::from(BigInt::from(k - j));
                    }
                }
                acc.to_f64().unwrap_or(f64::NAN)
            }
            Self::Float { probs, .. } => probs
                .iter()
                .enumerate()
                .map(|(j, p)| p / (k - j) as f64)
                .sum(),
        }
    }
}

/// Range of `m` with `P_m > 0`: `m <= max_m`.
fn max_nonzero(t: &TheoryInput, f: u64) -> u64 {
    // largest m with D(k - m) >= f k
    let mut hi = t.k;
    while hi > 0 && removal_is_zero(t.d, t.k, hi, f) {
        hi -= 1;
    }
    hi
}

/// `Pr(N_emp = j)` for `j = 0..k`.
///
/// `exact = true` computes in rationals and is limited to `D <= 2^14` and
/// `f <= 2^10`; otherwise the float path sums log-space terms with compensated
/// summation and reports how ill-conditioned the alternating sums were.
pub fn dist_nemp(t: &TheoryInput, exact: bool) -> Result<NempDistribution> {
    let f = t.union();
    if f == 0 {
        return Err(invalid("distribution of N_emp needs a non-empty union"));
    }
    if t.k > usize::MAX as u64 / 2 {
        return Err(Error::ResourceGuard(format!("k = {} too large", t.k)));
    }
    if exact {
        if t.d > EXACT_MAX_D || f > EXACT_MAX_F {
            return Err(Error::ResourceGuard(format!(
                "exact mode needs D <= {EXACT_MAX_D} and f <= {EXACT_MAX_F} (D = {}, f = {f})",
                t.d
            )));
        }
        Ok(NempDistribution::Exact(exact_dist(t, f)))
    } else {
        Ok(float_dist(t, f))
    }
}

fn exact_dist(t: &TheoryInput, f: u64) -> Vec<BigRational> {
    let k = t.k;
    let mut out = vec![BigRational::zero(); k as usize];
    let lo = k.saturating_sub(f);
    let hi = max_nonzero(t, f);
    if lo > hi {
        return out;
    }
    // numerators of P_m over the common denominator ∏ (D - s)·k
    let mut den = BigInt::one();
    for s in 0..f {
        den *= BigInt::from((t.d - s) * k);
    }
    let nums: Vec<BigInt> = (lo..=hi)
        .map(|m| {
            let mut n = BigInt::one();
            for s in 0..f {
                n *= BigInt::from(t.d * (k - m) - s * k);
            }
            n
        })
        .collect();
    let mut c_kj = binom(k, lo);
    for j in lo..=hi.min(k - 1) {
        let mut acc = BigInt::zero();
        let mut c = BigInt::one();
        for s in 0..=(hi - j) {
            let term = &c * &nums[(j + s - lo) as usize];
            if s % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            c = c * BigInt::from(k - j - s) / BigInt::from(s + 1);
        }
        out[j as usize] = BigRational::new(acc * &c_kj, den.clone());
        c_kj = c_kj * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    out
}

fn binom(n: u64, r: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..r {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

fn float_dist(t: &TheoryInput, f: u64) -> NempDistribution {
    let k = t.k;
    let mut probs = vec![0.0; k as usize];
    let lo = k.saturating_sub(f);
    let hi = max_nonzero(t, f);
    let mut ln_max_term = f64::NEG_INFINITY;
    let mut error_bound: f64 = 0.0;
    if lo <= hi {
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..=k).scan(0.0, |acc, i| {
                *acc += (i as f64).ln();
                Some(*acc)
            }))
            .collect();
        let ln_p: Vec<f64> = (lo..=hi)
            .map(|m| ln_removal(t.d, k, m, f).unwrap_or(f64::NEG_INFINITY))
            .collect();
        for j in lo..=hi.min(k - 1) {
            let base = ln_fact[k as usize] - ln_fact[j as usize];
            let logs: Vec<f64> = (0..=(hi - j))
                .map(|s| {
                    base - ln_fact[s as usize] - ln_fact[(k - j - s) as usize]
                        + ln_p[(j + s - lo) as usize]
                })
                .collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                continue;
            }
            // Neumaier summation of the alternating terms scaled by exp(top)
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            for (s, l) in logs.iter().enumerate() {
                let v = (l - top).exp();
                let v = if s % 2 == 0 { v } else { -v };
                let next = sum + v;
                comp += if sum.abs() >= v.abs() {
                    (sum - next) + v
                } else {
                    (v - next) + sum
                };
                sum = next;
            }
            let scaled = sum + comp;
            let p = scaled * top.exp();
            let n_terms = logs.len() as f64;
            // summand rounding plus the relative error of each log-space term
            let term_err = (4.0 + n_terms) * f64::EPSILON * (1.0 + top.abs() + f as f64 * 1e-3);
            error_bound = error_bound.max(term_err * top.exp());
            ln_max_term = ln_max_term.max(top);
            probs[j as usize] = p;
        }
    }
    let peak = probs.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let condition = if peak > 0.0 && peak.is_finite() && probs.iter().all(|p| p.is_finite()) {
        (ln_max_term - peak.ln()).exp()
    } else {
        f64::INFINITY
    };
    NempDistribution::Float {
        probs,
        condition,
        error_bound,
        ill_conditioned: condition > CONDITION_LIMIT,
    }
}
