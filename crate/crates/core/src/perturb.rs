//! Turning arbitrary target sequences into Sidon sequences by small moves,
//! measured either with the usual absolute value or with p-adic ones.

use std::collections::BTreeSet;
use std::ops::Bound;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, SidonError};
use crate::linear_form::LinearForm;
use crate::scalar::Scalar;
use crate::sidon_core::{forbidden_values, SidonSet};
use crate::Limits;

/// Trial division; the primes used here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(SidonError::NotPrime(p))
    }
}

/// An integer with its p-adic valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicValue {
    pub x: BigInt,
    pub p: u64,
    /// Exponent of `p` in `x`; `None` stands for the infinite valuation of 0.
    pub valuation: Option<u32>,
}

impl PadicValue {
    pub fn new(x: BigInt, p: u64) -> Result<Self> {
        require_prime(p)?;
        let valuation = valuation(&x, p);
        Ok(PadicValue { x, p, valuation })
    }

    /// `|x|_p = p^(-v_p(x))`, and `|0|_p = 0`.
    pub fn abs(&self) -> Scalar {
        match self.valuation {
            None => Scalar::zero(),
            Some(v) => Scalar::from(self.p).pow(-(v as i32)),
        }
    }
}

fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut rest = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        rest = q;
        v += 1;
    }
}

/// The p-adic absolute value of an integer.
pub fn padic_abs(x: &BigInt, p: u64) -> Result<Scalar> {
    Ok(PadicValue::new(x.clone(), p)?.abs())
}

/// Targets `b_k` and tolerances `eps_k` for the archimedean perturbation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub targets: Vec<Scalar>,
    pub tolerances: Vec<Scalar>,
    pub count: usize,
}

impl PerturbationSpec {
    /// Uses every target.
    pub fn new(targets: Vec<Scalar>, tolerances: Vec<Scalar>) -> Self {
        let count = targets.len();
        PerturbationSpec {
            targets,
            tolerances,
            count,
        }
    }

    fn validate(&self) -> Result<()> {
        validate_shape(self.count, self.targets.len(), &self.tolerances)
    }
}

/// Targets, primes and tolerances for the p-adic perturbation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicSpec {
    pub targets: Vec<BigInt>,
    pub primes: Vec<u64>,
    pub tolerances: Vec<Scalar>,
    pub count: usize,
}

impl PadicSpec {
    pub fn new(targets: Vec<BigInt>, primes: Vec<u64>, tolerances: Vec<Scalar>) -> Self {
        let count = targets.len();
        PadicSpec {
            targets,
            primes,
            tolerances,
            count,
        }
    }

    fn validate(&self) -> Result<()> {
        validate_shape(self.count, self.targets.len(), &self.tolerances)?;
        if self.primes.len() < self.count {
            return Err(SidonError::InvalidArgument(format!(
                "need {} primes, got {}",
                self.count,
                self.primes.len()
            )));
        }
        self.primes[..self.count]
            .iter()
            .try_for_each(|&p| require_prime(p))
    }
}

fn validate_shape(count: usize, targets: usize, tolerances: &[Scalar]) -> Result<()> {
    if count == 0 {
        return Err(SidonError::InvalidArgument(
            "count must be at least 1".into(),
        ));
    }
    if targets < count || tolerances.len() < count {
        return Err(SidonError::InvalidArgument(format!(
            "need {count} targets and tolerances, got {targets} and {}",
            tolerances.len()
        )));
    }
    match tolerances[..count].iter().position(|e| !e.is_positive()) {
        Some(i) => Err(SidonError::NonPositiveTolerance {
            index: i + 1,
            value: tolerances[i].clone(),
        }),
        None => Ok(()),
    }
}

/// Per-step record of a perturbation run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbStep {
    pub a_k: Scalar,
    pub b_k: Scalar,
    /// `|a_k - b_k|`, or the largest `|a_k - b_k|_p` over the primes in play.
    pub achieved_error: Scalar,
    pub bound: Scalar,
}

fn require_property_n(form: &LinearForm, limits: &Limits) -> Result<()> {
    if form.has_property_n(limits)? {
        Ok(())
    } else {
        Err(SidonError::PropertyNViolated)
    }
}

/// A Sidon set `a_1, ..., a_n` of rationals with `|a_k - b_k| < eps_k`.
///
/// `a_1 = b_1`. Afterwards `a_k = b_k` when `b_k` neither is forbidden nor
/// already used; otherwise `a_k = b_k + 2^-m` for the least `m` with
/// `2^-m < min(eps_k, delta)`, `delta` being the distance from `b_k` to the
/// nearest other excluded value.
pub fn perturb_rational(
    form: &LinearForm,
    spec: &PerturbationSpec,
    limits: &Limits,
) -> Result<(SidonSet, Vec<PerturbStep>)> {
    spec.validate()?;
    require_property_n(form, limits)?;
    let mut set = SidonSet::empty(form);
    let mut steps = Vec::with_capacity(spec.count);
    for k in 0..spec.count {
        let target = &spec.targets[k];
        let eps = &spec.tolerances[k];
        let a = if set.is_empty() {
            target.clone()
        } else {
            let mut excluded = forbidden_values(form, set.elements(), limits)?;
            excluded.extend(set.elements().iter().cloned());
            nearby_admissible(target, eps, &excluded)
        };
        steps.push(PerturbStep {
            achieved_error: (&a - target).abs(),
            a_k: a.clone(),
            b_k: target.clone(),
            bound: eps.clone(),
        });
        set.push_trusted(a);
    }
    Ok((set, steps))
}

fn nearby_admissible(target: &Scalar, eps: &Scalar, excluded: &BTreeSet<Scalar>) -> Scalar {
    if !excluded.contains(target) {
        return target.clone();
    }
    // Only the nearest excluded neighbours on either side matter.
    let below = excluded.range(..target.clone()).next_back();
    let above = excluded
        .range((Bound::Excluded(target.clone()), Bound::Unbounded))
        .next();
    let radius = below
        .map(|x| target - x)
        .into_iter()
        .chain(above.map(|x| x - target))
        .chain(std::iter::once(eps.clone()))
        .min()
        .expect("eps is always present");
    let mut m = 0u32;
    while Scalar::dyadic(m) >= radius {
        m += 1;
    }
    target + &Scalar::dyadic(m)
}

/// A strictly increasing Sidon sequence of positive integers with
/// `|a_k - b_k|_{p_j} < eps_k` for every `j <= k`.
///
/// Step `k` takes `e` minimal with `q^-e < eps_k`, `q` the smallest of
/// `p_1, ..., p_k`, sets `M` to the product of `p^e` over those primes, and
/// picks `a_k = b_k + r M` with the least `r >= 1` that puts `a_k` above
/// `a_{k-1}` (and above 0) outside the forbidden values.
pub fn perturb_padic(
    form: &LinearForm,
    spec: &PadicSpec,
    limits: &Limits,
) -> Result<(SidonSet, Vec<PerturbStep>)> {
    spec.validate()?;
    require_property_n(form, limits)?;
    let mut set = SidonSet::empty(form);
    let mut steps = Vec::with_capacity(spec.count);
    let mut previous = BigInt::zero();
    for k in 0..spec.count {
        let target = &spec.targets[k];
        let eps = &spec.tolerances[k];
        let primes: BTreeSet<u64> = spec.primes[..=k].iter().copied().collect();
        let smallest = *primes.first().expect("at least one prime");
        let e = padic_exponent(smallest, eps);
        let modulus: BigInt = primes
            .iter()
            .map(|&p| Pow::pow(BigInt::from(p), e))
            .product();

        let forbidden = forbidden_values(form, set.elements(), limits)?;
        // Least r >= 1 with target + r M > previous.
        let gap: BigInt = &previous - target;
        let mut r: BigInt = (Integer::div_floor(&gap, &modulus) + BigInt::one()).max(BigInt::one());
        let mut a = target + &r * &modulus;
        while forbidden.contains(&Scalar::from(a.clone())) {
            r += 1;
            a += &modulus;
        }

        let diff = &a - target;
        let achieved_error = primes
            .iter()
            .map(|&p| padic_abs(&diff, p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .expect("at least one prime");
        steps.push(PerturbStep {
            a_k: Scalar::from(a.clone()),
            b_k: Scalar::from(target.clone()),
            achieved_error,
            bound: eps.clone(),
        });
        set.push_trusted(Scalar::from(a.clone()));
        previous = a;
    }
    Ok((set, steps))
}

/// Least `e >= 0` with `p^-e < eps`.
fn padic_exponent(p: u64, eps: &Scalar) -> u32 {
    let p = Scalar::from(p);
    let mut e = 0u32;
    let mut scale = Scalar::one();
    while scale >= *eps {
        scale = scale / &p;
        e += 1;
    }
    e
}
