//! Rational-arithmetic versions of the closed forms, used as a reference for
//! the floating-point evaluation and for small brute-force comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{removal_is_zero, TheoryInput};

fn int(v: u64) -> BigInt {
    BigInt::from(v)
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(int(n), int(d))
}

/// `P_m` exactly.
pub fn p_m(t: &TheoryInput, m: u64) -> BigRational {
    let f = t.union();
    if removal_is_zero(t.d, t.k, m, f) {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for s in 0..f {
        num *= int(t.d * (t.k - m) - s * t.k);
        den *= int((t.d - s) * t.k);
    }
    BigRational::new(num, den)
}

fn resemblance(t: &TheoryInput) -> BigRational {
    let f = t.union();
    if f == 0 {
        BigRational::zero()
    } else {
        ratio(t.a, f)
    }
}

fn r_tilde(t: &TheoryInput) -> BigRational {
    let f = t.union();
    if f < 2 || t.a == 0 {
        BigRational::zero()
    } else {
        ratio(t.a - 1, f - 1)
    }
}

pub fn e_nemp(t: &TheoryInput) -> BigRational {
    BigRational::from(int(t.k)) * p_m(t, 1)
}

pub fn var_nemp(t: &TheoryInput) -> BigRational {
    let k = BigRational::from(int(t.k));
    let p1 = p_m(t, 1);
    let p2 = p_m(t, 2);
    let km1 = &k - BigRational::one();
    &k * &km1 * p2 + &k * &p1 - &k * &k * &p1 * &p1
}

pub fn e_nmat(t: &TheoryInput) -> BigRational {
    let k = BigRational::from(int(t.k));
    k * resemblance(t) * (BigRational::one() - p_m(t, 1))
}

pub fn var_nmat(t: &TheoryInput) -> BigRational {
    let one = BigRational::one();
    let k = BigRational::from(int(t.k));
    let km1 = &k - &one;
    let r = resemblance(t);
    let p1 = p_m(t, 1);
    let p2 = p_m(t, 2);
    let q1 = &one - &p1;
    let both = &one - &p1 - &p1 + &p2;
    &k * &km1 * &r * r_tilde(t) * both + &k * &r * &q1 - &k * &k * &r * &r * &q1 * &q1
}

pub fn cov_nmat_nemp(t: &TheoryInput) -> BigRational {
    let one = BigRational::one();
    let k = BigRational::from(int(t.k));
    let km1 = &k - &one;
    let r = resemblance(t);
    let p1 = p_m(t, 1);
    let p2 = p_m(t, 2);
    &k * &km1 * &r * (&p1 - &p2) - &k * &k * &r * (&one - &p1) * &p1
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory;

    #[test]
    fn p1_small_case() {
        let t = TheoryInput::from_union(16, 4, 6).unwrap();
        assert_eq!(p_m(&t, 1), ratio(3, 26));
        assert_eq!(e_nemp(&t), ratio(6, 13));
    }

    #[test]
    fn float_forms_agree() {
        for d in [8u64, 16, 64, 256, 1024] {
            for k in [1u64, 2, 4, 8] {
                if d % k != 0 {
                    continue;
                }
                for f in [1u64, 2, 3, 7, 15] {
                    if f > d {
                        continue;
                    }
                    for a in 0..=f.min(3) {
                        let t = TheoryInput::new(d, k, f, a, a).unwrap();
                        let pairs = [
                            (theory::e_nemp(&t), e_nemp(&t)),
                            (theory::var_nemp(&t), var_nemp(&t)),
                            (theory::e_nmat(&t), e_nmat(&t)),
                            (theory::var_nmat(&t), var_nmat(&t)),
                            (theory::cov_nmat_nemp(&t), cov_nmat_nemp(&t)),
                        ];
                        for (fl, ex) in pairs {
                            let ex = to_f64(&ex);
                            assert!(
                                (fl - ex).abs() <= 1e-10 * ex.abs().max(1.0),
                                "d={d} k={k} f={f} a={a}: {fl} vs {ex}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn covariance_never_positive() {
        for d in [16u64, 64, 200] {
            for k in [2u64, 4, 8] {
                for f in 1..=12u64 {
                    let t = TheoryInput::new(d, k, f, 1, 1).unwrap();
                    assert!(cov_nmat_nemp(&t) <= BigRational::zero());
                }
            }
        }
    }
}
