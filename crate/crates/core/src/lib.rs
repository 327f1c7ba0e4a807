//! Sidon sets for linear forms.
//!
//! A set `A` is *phi-Sidon* for the linear form `phi = c_1 x_1 + ... + c_h x_h`
//! when `phi` is one-to-one on `A^h`. Sets with more than one element exist
//! exactly when the coefficients have distinct subset sums ("property N").
//! This crate decides property N, verifies the Sidon property two ways (by
//! enumerating `A^h` and through the disjoint-translate criterion), computes
//! the finite set of values that block a one-element extension, and builds
//! Sidon sets greedily or as perturbations of arbitrary target sequences.
//!
//! All arithmetic is exact over the rationals.

pub mod analysis;
pub mod cli;
pub mod construct;
pub mod error;
pub mod linear_form;
pub mod perturb;
pub mod scalar;
pub mod sidon_core;

use num_bigint::BigUint;

pub use error::{Result, SidonError};
pub use linear_form::{IndexSubset, LinearForm};
pub use scalar::Scalar;
pub use sidon_core::{CollisionWitness, PhiImage, SidonSet};

/// Enumeration limits shared by every exponential operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `h` for which the `2^h` subset sums are enumerated.
    pub max_form_len: usize,
    /// Largest number of tuples (or candidate equations) a single call may enumerate.
    pub max_tuples: u64,
    /// Largest `n` accepted by the distinct-subset-sum search.
    pub max_subset_sum_n: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_form_len: 30,
            max_tuples: 10_000_000,
            max_subset_sum_n: 20,
        }
    }
}

impl Limits {
    pub fn with_max_tuples(max_tuples: u64) -> Self {
        Limits {
            max_tuples,
            ..Limits::default()
        }
    }

    pub(crate) fn check_tuples(&self, required: &BigUint) -> Result<()> {
        if *required > BigUint::from(self.max_tuples) {
            Err(SidonError::BudgetExceeded {
                required: required.to_string(),
                budget: self.max_tuples,
            })
        } else {
            Ok(())
        }
    }
}
