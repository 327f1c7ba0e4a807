//! Linear forms `c_1 x_1 + ... + c_h x_h` with rational coefficients, their
//! index-subset sums, and the property-N test.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Result, SidonError};
use crate::scalar::{lcm_of_denominators, Scalar};
use crate::Limits;

/// Hard ceiling on `h`: index subsets are stored as `u64` bitmasks.
pub const MAX_FORM_LEN: usize = 64;

/// A subset of the coefficient positions `{1, ..., h}`, stored as a bitmask
/// (bit `i - 1` set means position `i` is in the subset).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSubset(u64);

impl IndexSubset {
    pub const EMPTY: IndexSubset = IndexSubset(0);

    pub fn from_bits(bits: u64) -> Self {
        IndexSubset(bits)
    }

    /// Builds a subset from 1-based positions.
    pub fn from_positions(positions: impl IntoIterator<Item = usize>) -> Self {
        IndexSubset(
            positions
                .into_iter()
                .fold(0u64, |acc, i| acc | (1u64 << (i - 1))),
        )
    }

    /// `{1, ..., h}`.
    pub fn full(h: usize) -> Self {
        if h >= 64 {
            IndexSubset(u64::MAX)
        } else {
            IndexSubset((1u64 << h) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Membership of the 1-based position `i`.
    pub fn contains(self, i: usize) -> bool {
        (1..=64).contains(&i) && self.0 & (1u64 << (i - 1)) != 0
    }

    /// Complement relative to `{1, ..., h}`.
    pub fn complement(self, h: usize) -> Self {
        IndexSubset(!self.0 & IndexSubset::full(h).0)
    }

    pub fn union(self, other: Self) -> Self {
        IndexSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSubset(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn fits(self, h: usize) -> bool {
        self.0 & !IndexSubset::full(h).0 == 0
    }

    /// 1-based positions in increasing order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i + 1)
        })
    }

    /// Every subset of `{1, ..., h}` in increasing bitmask order.
    pub fn all(h: usize) -> impl Iterator<Item = IndexSubset> {
        assert!(h < 64, "cannot enumerate subsets of {h} positions");
        (0..1u64 << h).map(IndexSubset)
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.positions().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for IndexSubset {
    /// Serializes as the array of 1-based positions.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.positions())
    }
}

/// `phi(x_1, ..., x_h) = c_1 x_1 + ... + c_h x_h`.
///
/// Zero or repeated coefficients are accepted here; [`LinearForm::has_property_n`]
/// is where such forms are rejected.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: Vec<Scalar>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SidonError::EmptyCoefficientList);
        }
        if coeffs.len() > MAX_FORM_LEN {
            return Err(SidonError::FormTooLarge {
                h: coeffs.len(),
                limit: MAX_FORM_LEN,
            });
        }
        Ok(LinearForm { coeffs })
    }

    /// Convenience constructor for integer coefficients.
    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        LinearForm::new(coeffs.iter().map(|&c| Scalar::from(c)).collect())
    }

    pub fn h(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// `c_i` for the 1-based position `i`.
    pub fn coeff(&self, i: usize) -> &Scalar {
        &self.coeffs[i - 1]
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_integer)
    }

    /// `C = |c_1| + ... + |c_h|`.
    pub fn abs_sum(&self) -> Scalar {
        self.coeffs.iter().map(Scalar::abs).sum()
    }

    /// `phi(x_1, ..., x_h)`. Panics if the argument count differs from `h`.
    pub fn eval(&self, xs: &[Scalar]) -> Scalar {
        assert_eq!(xs.len(), self.h(), "argument count must equal h");
        self.coeffs.iter().zip(xs).map(|(c, x)| c * x).sum()
    }

    fn check_subset(&self, set: IndexSubset) -> Result<()> {
        if set.fits(self.h()) {
            Ok(())
        } else {
            Err(SidonError::SubsetOutOfRange {
                mask: set.bits(),
                h: self.h(),
            })
        }
    }

    /// `s(I)`, the sum of the coefficients indexed by `set`; `s({}) = 0`.
    pub fn subset_sum(&self, set: IndexSubset) -> Scalar {
        debug_assert!(set.fits(self.h()));
        set.positions().map(|i| self.coeff(i)).sum()
    }

    /// `phi_J`: the coefficients at the positions of `set`, in increasing order.
    pub fn contraction(&self, set: IndexSubset) -> Result<LinearForm> {
        if set.is_empty() {
            return Err(SidonError::EmptySubset);
        }
        self.check_subset(set)?;
        LinearForm::new(set.positions().map(|i| self.coeff(i).clone()).collect())
    }

    /// Whether all `2^h` index-subset sums are pairwise distinct.
    pub fn has_property_n(&self, limits: &Limits) -> Result<bool> {
        Ok(self.first_subset_sum_collision(limits)?.is_none())
    }

    /// A pair of disjoint index subsets, not both empty, with equal sums.
    ///
    /// Subsets are visited in increasing bitmask order; the first subset whose
    /// sum was already seen is paired with the smallest earlier subset having
    /// that sum, and their intersection is removed from both.
    pub fn witness_obstruction(
        &self,
        limits: &Limits,
    ) -> Result<Option<(IndexSubset, IndexSubset)>> {
        Ok(self
            .first_subset_sum_collision(limits)?
            .map(|(earlier, later)| {
                let common = earlier.intersection(later);
                (earlier.difference(common), later.difference(common))
            }))
    }

    fn first_subset_sum_collision(
        &self,
        limits: &Limits,
    ) -> Result<Option<(IndexSubset, IndexSubset)>> {
        if self.h() > limits.max_form_len {
            return Err(SidonError::FormTooLarge {
                h: self.h(),
                limit: limits.max_form_len,
            });
        }
        // Scaling by a common denominator preserves equality of sums.
        let scale = lcm_of_denominators(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&scale / c.denom()))
            .collect();
        let total: BigInt = ints.iter().map(|c| c.abs()).sum();
        let collision = if total.bits() < 126 {
            let small: Vec<i128> = ints.iter().map(|c| c.to_i128().unwrap()).collect();
            first_collision(&small, 0i128)
        } else {
            first_collision(&ints, BigInt::zero())
        };
        Ok(collision.map(|(a, b)| (IndexSubset(a), IndexSubset(b))))
    }

    /// The equivalent form with coprime integer coefficients: `c'_i = m c_i / d`
    /// where `m` is the lcm of the denominators and `d` the gcd of the `m c_i`.
    pub fn normalize(&self) -> Result<LinearForm> {
        if let Some(i) = self.coeffs.iter().position(Scalar::is_zero) {
            return Err(SidonError::ZeroCoefficient { index: i + 1 });
        }
        let m = lcm_of_denominators(&self.coeffs);
        let scaled: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&m / c.denom()))
            .collect();
        let d = scaled.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        LinearForm::new(
            scaled
                .into_iter()
                .map(|c| Scalar::from_integer(c / &d))
                .collect(),
        )
    }
}

fn first_collision<T>(coeffs: &[T], zero: T) -> Option<(u64, u64)>
where
    T: Clone + Eq + Hash,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let h = coeffs.len();
    let count = 1usize << h;
    let mut sums: Vec<T> = Vec::with_capacity(count);
    let mut first_seen: HashMap<T, u64> = HashMap::with_capacity(count);
    sums.push(zero.clone());
    first_seen.insert(zero, 0);
    for mask in 1..count as u64 {
        let low = mask.trailing_zeros() as usize;
        let sum = &sums[(mask & (mask - 1)) as usize] + &coeffs[low];
        if let Some(&earlier) = first_seen.get(&sum) {
            return Some((earlier, mask));
        }
        first_seen.insert(sum.clone(), mask);
        sums.push(sum);
    }
    None
}

impl FromStr for LinearForm {
    type Err = SidonError;

    /// Comma-separated rationals, e.g. `"1,2,-3/4"`.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Err(SidonError::EmptyCoefficientList);
        }
        LinearForm::new(Scalar::parse_list(s)?)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearForm[{self}]")
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}
