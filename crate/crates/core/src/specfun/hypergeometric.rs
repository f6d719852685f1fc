use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exact rational number, always reduced with a positive denominator.
pub type BigRational = num_rational::BigRational;

/// Terminating Gauss series `₂F₁(-k, b; c; z)` in exact arithmetic.
///
/// The series stops after `k + 1` terms because `(-k)_j = 0` for `j > k`.
/// `c` must not be a non-positive integer `>= -k`.
pub fn hyp2f1_terminating_general(
    k: u32,
    b: &BigRational,
    c: &BigRational,
    z: &BigRational,
) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let minus_k = BigRational::from_integer(BigInt::from(-(k as i64)));
    for j in 0..k {
        let jr = BigRational::from_integer(BigInt::from(j));
        let denom = (c + &jr) * (&jr + BigRational::one());
        debug_assert!(!denom.is_zero(), "c must not hit a non-positive integer");
        term = term * (&minus_k + &jr) * (b + &jr) * z / denom;
        sum += &term;
    }
    sum
}

/// `₂F₁(-k, 1/2; 3/2; 2)`, the hypergeometric value entering the closed
/// series for the 1s constant.
///
/// In floating point the terms reach `~2^k / k` in magnitude while the sum
/// is `O(k^{-1/2})`, so the evaluation is done exactly.
pub fn hyp2f1_terminating(k: u32) -> BigRational {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
    let two = BigRational::from_integer(BigInt::from(2));
    hyp2f1_terminating_general(k, &half, &three_halves, &two)
}
