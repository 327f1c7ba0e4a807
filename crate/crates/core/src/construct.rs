//! Incremental construction of Sidon sets: the greedy integer sequence and
//! extension from a caller-supplied candidate stream.

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::error::{Result, SidonError};
use crate::linear_form::LinearForm;
use crate::scalar::Scalar;
use crate::sidon_core::{forbidden_values, verify_incremental, IncrementalVerdict, SidonSet};
use crate::Limits;

/// `4^h k^(2h-1) + k`, the ceiling on the `(k+1)`-th greedy element when the
/// sequence starts at 1.
pub fn greedy_bound(form: &LinearForm, k: u64) -> BigInt {
    let h = form.h();
    let four_h: BigInt = Pow::pow(BigInt::from(4u32), h);
    let k_pow: BigInt = Pow::pow(BigInt::from(k), 2 * h - 1);
    four_h * k_pow + BigInt::from(k)
}

/// One greedy step: `element` is `a_{k+1}`, chosen after `k` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyStep {
    pub k: usize,
    pub element: Scalar,
    /// `4^h k^(2h-1) + k`, present when the sequence started at 1.
    pub bound: Option<BigInt>,
}

/// A growing greedy Sidon sequence of positive integers.
///
/// Each new element is the smallest integer above the current maximum that
/// avoids the forbidden values of the current set.
#[derive(Clone, Debug)]
pub struct GreedyState {
    set: SidonSet,
    enforce_bound: bool,
}

impl GreedyState {
    /// Starts a sequence at `first`. The form must have property N and
    /// integer coefficients.
    pub fn new(form: &LinearForm, first: BigInt, limits: &Limits) -> Result<Self> {
        check_greedy_form(form, limits)?;
        if first < BigInt::one() {
            return Err(SidonError::InvalidArgument(format!(
                "greedy sequences start at a positive integer, got {first}"
            )));
        }
        let enforce_bound = first == BigInt::one();
        let mut set = SidonSet::empty(form);
        set.push_trusted(Scalar::from(first));
        Ok(GreedyState { set, enforce_bound })
    }

    /// Continues from a stored prefix after re-verifying it.
    pub fn resume(form: &LinearForm, prefix: Vec<Scalar>, limits: &Limits) -> Result<Self> {
        check_greedy_form(form, limits)?;
        let Some(first) = prefix.first() else {
            return Err(SidonError::InvalidArgument("empty greedy prefix".into()));
        };
        if let Some(bad) = prefix.iter().find(|x| !x.is_integer() || !x.is_positive()) {
            return Err(SidonError::InvalidArgument(format!(
                "greedy prefix must hold positive integers, found {bad}"
            )));
        }
        if prefix.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SidonError::InvalidArgument(
                "greedy prefix must be strictly increasing".into(),
            ));
        }
        let enforce_bound = *first == Scalar::one();
        match verify_incremental(form, &prefix, limits)? {
            IncrementalVerdict::Sidon(set) => Ok(GreedyState { set, enforce_bound }),
            IncrementalVerdict::Rejected { position, element } => Err(SidonError::InvalidArgument(
                format!("greedy prefix is not Sidon: element {element} at position {position}"),
            )),
        }
    }

    pub fn set(&self) -> &SidonSet {
        &self.set
    }

    pub fn into_set(self) -> SidonSet {
        self.set
    }

    /// Number of elements so far.
    pub fn step_count(&self) -> usize {
        self.set.len()
    }

    /// Appends `a_{k+1}` and reports it.
    pub fn step(&mut self, limits: &Limits) -> Result<GreedyStep> {
        let k = self.set.len();
        let last = self
            .set
            .elements()
            .last()
            .expect("greedy state is never empty");
        let forbidden = forbidden_values(self.set.form(), self.set.elements(), limits)?;
        let mut candidate = last + &Scalar::one();
        for f in forbidden.range(candidate.clone()..) {
            if *f == candidate {
                candidate = candidate + Scalar::one();
            } else if *f > candidate {
                break;
            }
        }
        let bound = self
            .enforce_bound
            .then(|| greedy_bound(self.set.form(), k as u64));
        if let Some(bound) = &bound {
            if candidate > Scalar::from(bound.clone()) {
                return Err(SidonError::GrowthBoundViolated {
                    index: k + 1,
                    value: Box::new(candidate),
                    bound: Box::new(Scalar::from(bound.clone())),
                });
            }
        }
        self.set.push_trusted(candidate.clone());
        Ok(GreedyStep {
            k,
            element: candidate,
            bound,
        })
    }
}

fn check_greedy_form(form: &LinearForm, limits: &Limits) -> Result<()> {
    if !form.has_property_n(limits)? {
        return Err(SidonError::PropertyNViolated);
    }
    if !form.is_integral() {
        return Err(SidonError::NonIntegerCoefficients);
    }
    Ok(())
}

/// The first `n` greedy elements starting from `first`.
pub fn greedy_integer_sidon(
    form: &LinearForm,
    n: usize,
    first: BigInt,
    limits: &Limits,
) -> Result<SidonSet> {
    Ok(greedy_with_steps(form, n, first, limits)?.0)
}

/// Like [`greedy_integer_sidon`], also returning the per-step records.
pub fn greedy_with_steps(
    form: &LinearForm,
    n: usize,
    first: BigInt,
    limits: &Limits,
) -> Result<(SidonSet, Vec<GreedyStep>)> {
    if n == 0 {
        return Err(SidonError::InvalidArgument(
            "count must be at least 1".into(),
        ));
    }
    let mut state = GreedyState::new(form, first, limits)?;
    extend_greedy(&mut state, n, limits).map(|steps| (state.into_set(), steps))
}

/// Grows `state` until it holds `n` elements.
pub fn extend_greedy(
    state: &mut GreedyState,
    n: usize,
    limits: &Limits,
) -> Result<Vec<GreedyStep>> {
    let mut steps = Vec::new();
    while state.step_count() < n {
        steps.push(state.step(limits)?);
    }
    Ok(steps)
}

/// The first candidate that extends `set` to a larger Sidon set.
///
/// Members of `set` are skipped. Any stream that enumerates infinitely many
/// distinct rationals yields a result, since only finitely many values are
/// forbidden.
pub fn extend_in_stream<I>(
    form: &LinearForm,
    set: &SidonSet,
    candidates: I,
    limits: &Limits,
) -> Result<Scalar>
where
    I: IntoIterator<Item = Scalar>,
{
    if !set.is_verified_for(form) {
        return Err(SidonError::PreconditionNotSidon);
    }
    let forbidden = forbidden_values(form, set.elements(), limits)?;
    candidates
        .into_iter()
        .find(|b| !set.contains(b) && !forbidden.contains(b))
        .ok_or(SidonError::StreamExhausted)
}
