//! phi-images, contractions, translates, and the two Sidon tests.
//!
//! Conventions: `phi_J(A)` is enumerated over tuples of element positions in
//! lexicographic order, the first coordinate varying slowest. For an empty set
//! `phi_J(A) = {0}` for every `J`, so `Phi_J({}, b) = {s(J^c) b}`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

use crate::error::{Result, SidonError};
use crate::linear_form::{IndexSubset, LinearForm};
use crate::scalar::{lcm_of_denominators, Scalar};
use crate::Limits;

/// All `phi`-values of `A^h`, keyed by value.
///
/// Each value maps to the tuples of element positions (0-based, in the order
/// of the element list) that attain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiImage {
    elements: Vec<Scalar>,
    map: BTreeMap<Scalar, Vec<Vec<usize>>>,
}

impl PhiImage {
    pub fn elements(&self) -> &[Scalar] {
        &self.elements
    }

    pub fn map(&self) -> &BTreeMap<Scalar, Vec<Vec<usize>>> {
        &self.map
    }

    pub fn get(&self, value: &Scalar) -> Option<&[Vec<usize>]> {
        self.map.get(value).map(Vec::as_slice)
    }

    /// Number of distinct values.
    pub fn distinct_values(&self) -> usize {
        self.map.len()
    }

    pub fn tuple_count(&self) -> usize {
        self.map.values().map(Vec::len).sum()
    }

    /// The tuples attaining `value`, written with element values instead of positions.
    pub fn value_tuples(&self, value: &Scalar) -> Vec<Vec<Scalar>> {
        self.get(value)
            .unwrap_or_default()
            .iter()
            .map(|t| t.iter().map(|&i| self.elements[i].clone()).collect())
            .collect()
    }

    /// JSON object from each value (as a rational string) to the list of
    /// element tuples attaining it. Keys follow numeric order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = serde_json::Map::new();
        for value in self.map.keys() {
            out.insert(
                value.to_string(),
                serde_json::to_value(self.value_tuples(value)).expect("scalars serialize"),
            );
        }
        serde_json::Value::Object(out)
    }
}

/// Two distinct `h`-tuples of set elements with the same `phi`-value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionWitness {
    pub first: Vec<Scalar>,
    pub second: Vec<Scalar>,
    pub value: Scalar,
}

impl fmt::Display for CollisionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuple = |t: &[Scalar]| {
            t.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "phi({}) = phi({}) = {}",
            tuple(&self.first),
            tuple(&self.second),
            self.value
        )
    }
}

/// Outcome of [`is_sidon_bruteforce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteVerdict {
    Sidon,
    Collision(CollisionWitness),
}

impl BruteVerdict {
    pub fn is_sidon(&self) -> bool {
        matches!(self, BruteVerdict::Sidon)
    }

    pub fn witness(&self) -> Option<&CollisionWitness> {
        match self {
            BruteVerdict::Sidon => None,
            BruteVerdict::Collision(w) => Some(w),
        }
    }
}

/// Outcome of [`verify_incremental`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IncrementalVerdict {
    Sidon(SidonSet),
    /// `elements[..position - 1]` is Sidon but adding the element at the
    /// 1-based `position` breaks it.
    Rejected {
        position: usize,
        element: Scalar,
    },
}

/// A finite set of distinct scalars in insertion order, tied to the form it
/// was checked against.
///
/// `verified` is true only when the elements were shown to be Sidon for
/// `form`, either by enumeration or by a chain of checked extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidonSet {
    form: LinearForm,
    elements: Vec<Scalar>,
    verified: bool,
}

impl SidonSet {
    /// The empty set, which is trivially Sidon.
    pub fn empty(form: &LinearForm) -> Self {
        SidonSet {
            form: form.clone(),
            elements: Vec::new(),
            verified: true,
        }
    }

    /// Wraps elements without checking the Sidon property.
    pub fn unverified(form: &LinearForm, elements: Vec<Scalar>) -> Result<Self> {
        ensure_distinct(&elements)?;
        Ok(SidonSet {
            form: form.clone(),
            elements,
            verified: false,
        })
    }

    /// Verifies by enumerating `A^h`.
    pub fn from_bruteforce(
        form: &LinearForm,
        elements: Vec<Scalar>,
        limits: &Limits,
    ) -> Result<Self> {
        match is_sidon_bruteforce(form, &elements, limits)? {
            BruteVerdict::Sidon => Ok(SidonSet {
                form: form.clone(),
                elements,
                verified: true,
            }),
            BruteVerdict::Collision(w) => Err(SidonError::NotSidon(Box::new(w))),
        }
    }

    pub fn form(&self) -> &LinearForm {
        &self.form
    }

    pub fn elements(&self) -> &[Scalar] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Scalar> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Whether the set is verified for exactly this form.
    pub fn is_verified_for(&self, form: &LinearForm) -> bool {
        self.verified && &self.form == form
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.elements.contains(x)
    }

    /// Adds `b` if the extension stays Sidon; returns whether it was added.
    pub fn try_extend(&mut self, b: Scalar, limits: &Limits) -> Result<bool> {
        if !self.verified {
            return Err(SidonError::PreconditionNotSidon);
        }
        if self.contains(&b) {
            return Err(SidonError::ElementAlreadyPresent(b));
        }
        // Every singleton is Sidon.
        let ok = self.elements.is_empty() || is_extension_sidon(&self.form, self, &b, limits)?;
        if ok {
            self.elements.push(b);
        }
        Ok(ok)
    }

    /// Appends an element already known to keep the set Sidon.
    pub(crate) fn push_trusted(&mut self, b: Scalar) {
        debug_assert!(!self.elements.contains(&b));
        self.elements.push(b);
    }
}

fn ensure_distinct(elements: &[Scalar]) -> Result<()> {
    let mut seen = HashSet::with_capacity(elements.len());
    for x in elements {
        if !seen.insert(x) {
            return Err(SidonError::DuplicateElement(x.clone()));
        }
    }
    Ok(())
}

/// `k^e` as an exact count.
fn power_count(k: usize, e: usize) -> BigUint {
    Pow::pow(BigUint::from(k), e)
}

/// `sum_i c_i a_{t_i}` over every tuple `t`, lexicographic in the positions.
/// One coefficient list of length zero yields `[0]`; so does an empty set.
fn image_values(coeffs: &[&Scalar], elements: &[Scalar]) -> Vec<Scalar> {
    if elements.is_empty() {
        return vec![Scalar::zero()];
    }
    let mut values = vec![Scalar::zero()];
    for c in coeffs {
        let dilate: Vec<Scalar> = elements.iter().map(|a| *c * a).collect();
        let mut next = Vec::with_capacity(values.len() * dilate.len());
        for v in &values {
            for d in &dilate {
                next.push(v + d);
            }
        }
        values = next;
    }
    values
}

fn contraction_coeffs(form: &LinearForm, set: IndexSubset) -> Vec<&Scalar> {
    set.positions().map(|i| form.coeff(i)).collect()
}

/// Decodes the lexicographic rank of a tuple into element positions.
fn decode_tuple(mut rank: usize, base: usize, h: usize) -> Vec<usize> {
    let mut digits = vec![0; h];
    for slot in digits.iter_mut().rev() {
        *slot = rank % base;
        rank /= base;
    }
    digits
}

/// `phi(A)` with the tuples attaining each value. `phi({}) = {0}`.
pub fn phi_image(form: &LinearForm, elements: &[Scalar], limits: &Limits) -> Result<PhiImage> {
    limits.check_tuples(&power_count(elements.len(), form.h()))?;
    let mut map: BTreeMap<Scalar, Vec<Vec<usize>>> = BTreeMap::new();
    if elements.is_empty() {
        map.insert(Scalar::zero(), vec![Vec::new()]);
    } else {
        let coeffs: Vec<&Scalar> = form.coeffs().iter().collect();
        for (rank, value) in image_values(&coeffs, elements).into_iter().enumerate() {
            map.entry(value)
                .or_default()
                .push(decode_tuple(rank, elements.len(), form.h()));
        }
    }
    Ok(PhiImage {
        elements: elements.to_vec(),
        map,
    })
}

/// `Phi_J(A, b) = phi_J(A) + s(J^c) b`.
pub fn phi_translate(
    form: &LinearForm,
    elements: &[Scalar],
    set: IndexSubset,
    b: &Scalar,
    limits: &Limits,
) -> Result<BTreeSet<Scalar>> {
    if !set.fits(form.h()) {
        return Err(SidonError::SubsetOutOfRange {
            mask: set.bits(),
            h: form.h(),
        });
    }
    limits.check_tuples(&power_count(elements.len(), set.len()))?;
    let shift = form.subset_sum(set.complement(form.h())) * b;
    Ok(image_values(&contraction_coeffs(form, set), elements)
        .into_iter()
        .map(|v| v + &shift)
        .collect())
}

/// Decides the Sidon property by enumerating all of `A^h`.
///
/// On failure the witness is the first tuple (in lexicographic position
/// order) whose value repeats, paired with the earliest tuple having that
/// value. The empty set counts as Sidon.
pub fn is_sidon_bruteforce(
    form: &LinearForm,
    elements: &[Scalar],
    limits: &Limits,
) -> Result<BruteVerdict> {
    ensure_distinct(elements)?;
    limits.check_tuples(&power_count(elements.len(), form.h()))?;
    if elements.is_empty() {
        return Ok(BruteVerdict::Sidon);
    }
    let coeffs: Vec<&Scalar> = form.coeffs().iter().collect();
    let values = image_values(&coeffs, elements);
    let mut first_rank: HashMap<&Scalar, usize> = HashMap::with_capacity(values.len());
    for (rank, value) in values.iter().enumerate() {
        if let Some(&earlier) = first_rank.get(value) {
            let tuple = |r| {
                decode_tuple(r, elements.len(), form.h())
                    .into_iter()
                    .map(|i| elements[i].clone())
                    .collect()
            };
            return Ok(BruteVerdict::Collision(CollisionWitness {
                first: tuple(earlier),
                second: tuple(rank),
                value: value.clone(),
            }));
        }
        first_rank.insert(value, rank);
    }
    Ok(BruteVerdict::Sidon)
}

/// Whether `A ∪ {b}` is Sidon, decided by checking that the `2^h` translates
/// `Phi_J(A, b)` are pairwise disjoint. `A` must already be verified Sidon
/// for `form`.
///
/// For nonempty `A` this agrees with [`is_sidon_bruteforce`] on `A ∪ {b}`.
/// For empty `A` it is true exactly when `b != 0` and `form` has property N.
pub fn is_extension_sidon(
    form: &LinearForm,
    set: &SidonSet,
    b: &Scalar,
    limits: &Limits,
) -> Result<bool> {
    if !set.is_verified_for(form) {
        return Err(SidonError::PreconditionNotSidon);
    }
    if set.contains(b) {
        return Err(SidonError::ElementAlreadyPresent(b.clone()));
    }
    let h = form.h();
    if h >= 64 {
        return Err(SidonError::FormTooLarge { h, limit: 63 });
    }
    limits.check_tuples(&power_count(set.len() + 1, h))?;
    let mut owner: HashMap<Scalar, IndexSubset> = HashMap::new();
    for j in IndexSubset::all(h) {
        let shift = form.subset_sum(j.complement(h)) * b;
        for v in image_values(&contraction_coeffs(form, j), set.elements()) {
            let value = v + &shift;
            match owner.get(&value) {
                Some(&other) if other != j => return Ok(false),
                Some(_) => {}
                None => {
                    owner.insert(value, j);
                }
            }
        }
    }
    Ok(true)
}

/// Number of equations `forbidden_values` solves: one per unordered pair of
/// distinct index subsets and per choice of set elements at their positions.
fn forbidden_equation_count(k: usize, h: usize) -> BigUint {
    if k == 0 {
        let n = BigUint::one() << h;
        return &n * (&n - 1u32) / 2u32;
    }
    let all = power_count(k + 1, 2 * h);
    let diagonal = power_count(k * k + 1, h);
    (all - diagonal) / 2u32
}

/// The values `b` at which some pair of translates `Phi_J1(A, b)`,
/// `Phi_J2(A, b)` meets.
///
/// Each meeting point solves `(s(J2^c) - s(J1^c)) b = u - v` with
/// `u ∈ phi_J1(A)` and `v ∈ phi_J2(A)`; property N makes the coefficient
/// nonzero, so every configuration contributes at most one value. Any
/// `b` outside this set and outside `A` extends `A` to a larger Sidon set.
pub fn forbidden_values(
    form: &LinearForm,
    elements: &[Scalar],
    limits: &Limits,
) -> Result<BTreeSet<Scalar>> {
    if !form.has_property_n(limits)? {
        return Err(SidonError::PropertyNViolated);
    }
    let h = form.h();
    limits.check_tuples(&forbidden_equation_count(elements.len(), h))?;

    Ok(forbidden_values_small(form, elements)
        .unwrap_or_else(|| forbidden_values_exact(form, elements)))
}

fn forbidden_values_exact(form: &LinearForm, elements: &[Scalar]) -> BTreeSet<Scalar> {
    let h = form.h();
    let subsets: Vec<IndexSubset> = IndexSubset::all(h).collect();
    let images: Vec<Vec<Scalar>> = subsets
        .iter()
        .map(|&j| image_values(&contraction_coeffs(form, j), elements))
        .collect();
    let complement_sums: Vec<Scalar> = subsets
        .iter()
        .map(|&j| form.subset_sum(j.complement(h)))
        .collect();

    let mut found: HashSet<Scalar> = HashSet::new();
    for (i1, img1) in images.iter().enumerate() {
        for (i2, img2) in images.iter().enumerate().skip(i1 + 1) {
            let c = &complement_sums[i2] - &complement_sums[i1];
            let inv = c.recip().expect("property N keeps subset sums distinct");
            for u in img1 {
                for v in img2 {
                    found.insert((u - v) * &inv);
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Same values as the rational path, computed on scaled integers when every
/// intermediate fits in an `i128`.
///
/// With coefficients scaled by `lc` and elements by `la`, a forbidden value is
/// `(U - V) / (la * (C2 - C1))` for integer images `U`, `V` and integer
/// complement sums `C1`, `C2`.
fn forbidden_values_small(form: &LinearForm, elements: &[Scalar]) -> Option<BTreeSet<Scalar>> {
    let lc = lcm_of_denominators(form.coeffs());
    let la = lcm_of_denominators(elements);
    let scale = |x: &Scalar, m: &BigInt| (x.numer() * (m / x.denom())).to_i128();
    let coeffs: Vec<i128> = form
        .coeffs()
        .iter()
        .map(|c| scale(c, &lc))
        .collect::<Option<_>>()?;
    let values: Vec<i128> = elements
        .iter()
        .map(|a| scale(a, &la))
        .collect::<Option<_>>()?;
    let la = la.to_i128()?;
    // Every image and denominator is bounded by coefficient mass times the
    // largest element (or times `la`); keep that well inside i128.
    let mass = coeffs
        .iter()
        .try_fold(0i128, |acc, c| acc.checked_add(c.checked_abs()?))?;
    let top = values
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or(0)
        .max(la)
        .max(1);
    if mass.checked_mul(top)?.checked_mul(4)? > i128::MAX >> 4 {
        return None;
    }

    let h = form.h();
    let subsets: Vec<IndexSubset> = IndexSubset::all(h).collect();
    let images: Vec<Vec<i128>> = subsets
        .iter()
        .map(|&j| {
            let mut acc = vec![0i128];
            if values.is_empty() {
                return acc;
            }
            for i in j.positions() {
                let c = coeffs[i - 1];
                acc = acc
                    .iter()
                    .flat_map(|v| values.iter().map(move |a| v + c * a))
                    .collect();
            }
            acc
        })
        .collect();
    let complement_sums: Vec<i128> = subsets
        .iter()
        .map(|&j| j.complement(h).positions().map(|i| coeffs[i - 1]).sum())
        .collect();

    // Numerators grouped by their (positive) denominator; reduction happens
    // once per distinct fraction.
    let mut by_denominator: HashMap<i128, HashSet<i128>> = HashMap::new();
    for (i1, img1) in images.iter().enumerate() {
        for (i2, img2) in images.iter().enumerate().skip(i1 + 1) {
            let c = complement_sums[i2] - complement_sums[i1];
            let (sign, d) = if c < 0 { (-1, -c * la) } else { (1, c * la) };
            let bucket = by_denominator.entry(d).or_default();
            for u in img1 {
                for v in img2 {
                    bucket.insert(sign * (u - v));
                }
            }
        }
    }
    let mut reduced: Vec<(i128, i128)> = by_denominator
        .into_iter()
        .flat_map(|(d, numerators)| {
            numerators.into_iter().map(move |n| {
                let g = n.gcd(&d);
                (n / g, d / g)
            })
        })
        .collect();
    // Sorting here keeps BigRational comparisons out of the set build.
    reduced.sort_unstable_by(|a, b| compare_fractions(*a, *b));
    reduced.dedup();
    Some(
        reduced
            .into_iter()
            .map(|(n, d)| Scalar::from(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
            .collect(),
    )
}

/// Orders `n1/d1` against `n2/d2` for positive denominators.
fn compare_fractions((n1, d1): (i128, i128), (n2, d2): (i128, i128)) -> std::cmp::Ordering {
    match (n1.checked_mul(d2), n2.checked_mul(d1)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => (BigInt::from(n1) * BigInt::from(d2)).cmp(&(BigInt::from(n2) * BigInt::from(d1))),
    }
}

/// Folds the elements in order through [`is_extension_sidon`], reporting the
/// first element that breaks the Sidon property.
pub fn verify_incremental(
    form: &LinearForm,
    elements: &[Scalar],
    limits: &Limits,
) -> Result<IncrementalVerdict> {
    ensure_distinct(elements)?;
    let mut set = SidonSet::empty(form);
    for (i, x) in elements.iter().enumerate() {
        if !set.try_extend(x.clone(), limits)? {
            return Ok(IncrementalVerdict::Rejected {
                position: i + 1,
                element: x.clone(),
            });
        }
    }
    Ok(IncrementalVerdict::Sidon(set))
}
