//! Counting functions, the upper growth bound for integer Sidon sets, and the
//! largest distinct-subset-sum subsets of `{1, ..., n}`.

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use serde::Serialize;

use crate::construct::greedy_bound;
use crate::error::{Result, SidonError};
use crate::linear_form::LinearForm;
use crate::scalar::Scalar;
use crate::sidon_core::SidonSet;
use crate::Limits;

fn require_nonnegative(t: &Scalar) -> Result<()> {
    if t.is_negative() {
        Err(SidonError::NegativeThreshold(t.clone()))
    } else {
        Ok(())
    }
}

/// Number of elements with `|a| <= t`.
pub fn counting_function(elements: &[Scalar], t: &Scalar) -> Result<usize> {
    require_nonnegative(t)?;
    Ok(elements.iter().filter(|a| a.abs() <= *t).count())
}

/// `2 floor(C t) + 1`, the number of integers in `[-C t, C t]`, with
/// `C = |c_1| + ... + |c_h|`.
pub fn growth_radicand(form: &LinearForm, t: &Scalar) -> Result<BigInt> {
    require_nonnegative(t)?;
    let ct = form.abs_sum() * t;
    Ok(BigInt::from(2) * ct.floor() + 1)
}

/// `(2 floor(C t) + 1)^(1/h)` as a float. Display only: pass/fail decisions
/// compare `count^h` with the integer radicand.
pub fn growth_upper_bound(form: &LinearForm, t: &Scalar) -> Result<f64> {
    let radicand = growth_radicand(form, t)?;
    let value = radicand.to_f64().unwrap_or(f64::INFINITY);
    Ok(if form.h() == 1 {
        value
    } else {
        value.powf(1.0 / form.h() as f64)
    })
}

/// Largest `k >= 1` with `4^h k^(2h-1) + k <= t`, if any. A greedy sequence
/// started at 1 has at least `k + 1` elements up to `t`.
pub fn greedy_floor(form: &LinearForm, t: &Scalar) -> Option<u64> {
    let fits = |k: u64| Scalar::from(greedy_bound(form, k)) <= *t;
    if !fits(1) {
        return None;
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while fits(hi) {
        lo = hi;
        hi = hi.checked_mul(2)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSample {
    pub t: Scalar,
    pub count: usize,
    /// `2 floor(C t) + 1`; the check is `count^h <= radicand`.
    #[serde(serialize_with = "bigint_as_string")]
    pub radicand: BigInt,
    /// `radicand^(1/h)`, for display.
    pub upper: f64,
    pub passes: bool,
    /// See [`greedy_floor`].
    pub greedy_floor: Option<u64>,
}

fn bigint_as_string<S: serde::Serializer>(
    n: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    /// The integer form whose `C` and `h` the bound uses.
    pub form: LinearForm,
    pub samples: Vec<GrowthSample>,
}

impl GrowthReport {
    /// Indices of samples where `count^h > 2 floor(C t) + 1`.
    pub fn violations(&self) -> Vec<usize> {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.passes)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_ok(&self) -> bool {
        self.samples.iter().all(|s| s.passes)
    }
}

/// Compares the counting function of an integer Sidon set with
/// `(2 floor(C t) + 1)^(1/h)` at each threshold.
///
/// A form with non-integer coefficients is replaced by its normalized integer
/// form, which has the same Sidon sets.
pub fn check_growth(form: &LinearForm, set: &SidonSet, ts: &[Scalar]) -> Result<GrowthReport> {
    if !set.is_verified_for(form) {
        return Err(SidonError::PreconditionNotSidon);
    }
    if let Some(bad) = set.elements().iter().find(|a| !a.is_integer()) {
        return Err(SidonError::NonIntegerElements(bad.clone()));
    }
    let form = if form.is_integral() {
        form.clone()
    } else {
        form.normalize()?
    };
    let h = form.h();
    let samples = ts
        .iter()
        .map(|t| {
            let count = counting_function(set.elements(), t)?;
            let radicand = growth_radicand(&form, t)?;
            let power: BigInt = Pow::pow(BigInt::from(count), h);
            Ok(GrowthSample {
                t: t.clone(),
                count,
                passes: power <= radicand,
                upper: growth_upper_bound(&form, t)?,
                radicand,
                greedy_floor: greedy_floor(&form, t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthReport { form, samples })
}

/// A largest subset of `{1, ..., n}` whose subset sums are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinctSubsetSums {
    pub n: u64,
    pub g: usize,
    /// Lexicographically smallest among the largest such subsets.
    pub witness: Vec<u64>,
}

/// `g(n)` by depth-first search in increasing-element order.
pub fn g_of_n(n: u64, limits: &Limits) -> Result<DistinctSubsetSums> {
    if n == 0 {
        return Err(SidonError::InvalidArgument("n must be positive".into()));
    }
    if n > limits.max_subset_sum_n {
        return Err(SidonError::CapExceeded {
            n,
            cap: limits.max_subset_sum_n,
        });
    }
    let total = (n * (n + 1) / 2) as usize;
    let mut search = SubsetSearch {
        n,
        present: vec![false; total + 1],
        sums: vec![0],
        chosen: Vec::new(),
        best: Vec::new(),
    };
    search.present[0] = true;
    search.run(1);
    Ok(DistinctSubsetSums {
        n,
        g: search.best.len(),
        witness: search.best,
    })
}

struct SubsetSearch {
    n: u64,
    present: Vec<bool>,
    sums: Vec<usize>,
    chosen: Vec<u64>,
    best: Vec<u64>,
}

impl SubsetSearch {
    fn run(&mut self, from: u64) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        for x in from..=self.n {
            // Even taking every remaining element cannot beat the incumbent.
            if self.chosen.len() as u64 + (self.n - x + 1) <= self.best.len() as u64 {
                return;
            }
            let shift = x as usize;
            if self.sums.iter().any(|&s| self.present[s + shift]) {
                continue;
            }
            let before = self.sums.len();
            for i in 0..before {
                let s = self.sums[i] + shift;
                self.present[s] = true;
                self.sums.push(s);
            }
            self.chosen.push(x);
            self.run(x + 1);
            self.chosen.pop();
            for s in self.sums.drain(before..) {
                self.present[s] = false;
            }
        }
    }
}

/// The heuristic band `log2(n) - 2 <= g <= log2(n) + 3`. It is a sanity
/// check, not a theorem: falling outside is reported, never treated as failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorridorCheck {
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    pub heuristic: bool,
}

pub fn erdos_moser_corridor(n: u64, g: usize) -> CorridorCheck {
    let log = (n as f64).log2();
    let (lower, upper) = (log - 2.0, log + 3.0);
    let g = g as f64;
    CorridorCheck {
        lower,
        upper,
        within: lower <= g && g <= upper,
        heuristic: true,
    }
}

/// Whether the subset sums of `values` are pairwise distinct.
pub fn has_distinct_subset_sums(values: &[u64]) -> bool {
    let total: u64 = values.iter().sum();
    let mut present = vec![false; total as usize + 1];
    let mut sums = vec![0usize];
    present[0] = true;
    for &x in values {
        let before = sums.len();
        for i in 0..before {
            let s = sums[i] + x as usize;
            if present[s] {
                return false;
            }
            present[s] = true;
            sums.push(s);
        }
    }
    true
}

impl DistinctSubsetSums {
    /// The witness read as a linear form.
    pub fn as_form(&self) -> LinearForm {
        LinearForm::new(self.witness.iter().map(|&x| Scalar::from(x)).collect())
            .expect("g(n) >= 1 for n >= 1")
    }
}
