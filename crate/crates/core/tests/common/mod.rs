//! Independent brute-force oracles. None of these call into the library.

#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Property N by trying every assignment of each index to I1, I2 or neither.
pub fn property_n_oracle(coeffs: &[i64]) -> bool {
    let h = coeffs.len();
    let total = 3usize.pow(h as u32);
    for code in 1..total {
        let (mut left, mut right, mut rest) = (0i64, 0i64, code);
        let (mut left_used, mut right_used) = (false, false);
        for &c in coeffs {
            match rest % 3 {
                1 => {
                    left += c;
                    left_used = true;
                }
                2 => {
                    right += c;
                    right_used = true;
                }
                _ => {}
            }
            rest /= 3;
        }
        if (left_used || right_used) && left == right {
            return false;
        }
    }
    true
}

/// Calls `visit` with every tuple in `values^h`.
fn for_each_tuple<T>(values: &[T], h: usize, mut visit: impl FnMut(&[&T])) {
    if values.is_empty() {
        return;
    }
    let mut idx = vec![0usize; h];
    loop {
        let tuple: Vec<&T> = idx.iter().map(|&i| &values[i]).collect();
        visit(&tuple);
        let mut pos = h;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Whether `sum c_i x_i` is injective on `set^h`, integer version.
pub fn sidon_oracle(coeffs: &[i64], set: &[i64]) -> bool {
    let distinct: HashSet<i64> = set.iter().copied().collect();
    assert_eq!(
        distinct.len(),
        set.len(),
        "oracle expects distinct elements"
    );
    let mut seen = HashSet::new();
    let mut ok = true;
    for_each_tuple(set, coeffs.len(), |t| {
        let v: i128 = coeffs
            .iter()
            .zip(t)
            .map(|(&c, &&x)| c as i128 * x as i128)
            .sum();
        ok &= seen.insert(v);
    });
    ok
}

/// Rational version of [`sidon_oracle`].
pub fn sidon_oracle_rational(coeffs: &[BigRational], set: &[BigRational]) -> bool {
    let distinct: HashSet<&BigRational> = set.iter().collect();
    assert_eq!(
        distinct.len(),
        set.len(),
        "oracle expects distinct elements"
    );
    let mut seen = HashSet::new();
    let mut ok = true;
    for_each_tuple(set, coeffs.len(), |t| {
        let v: BigRational = coeffs.iter().zip(t).map(|(c, &x)| c * x).sum();
        ok &= seen.insert(v);
    });
    ok
}

/// Largest subset of {1..n} with distinct subset sums, over all 2^n subsets.
pub fn g_oracle(n: u32) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members: Vec<u64> = (1..=n as u64)
            .filter(|i| mask >> (i - 1) & 1 == 1)
            .collect();
        let mut sums = HashSet::new();
        let distinct = (0u32..(1 << size)).all(|sub| {
            let s: u64 = (0..size)
                .filter(|j| sub >> j & 1 == 1)
                .map(|j| members[j])
                .sum();
            sums.insert(s)
        });
        if distinct {
            best = size;
        }
    }
    best
}

/// p-adic valuation by repeated division; `None` for zero.
pub fn valuation_oracle(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

/// Whether `|x|_p < 1/d`, i.e. `p^(-v) < 1/d`, i.e. `p^v > d`.
pub fn padic_abs_below(x: &BigInt, p: u64, d: u64) -> bool {
    match valuation_oracle(x, p) {
        None => true,
        Some(v) => BigInt::from(p).pow(v) > BigInt::from(d),
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
