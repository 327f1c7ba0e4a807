use thiserror::Error;

use crate::scalar::Scalar;
use crate::sidon_core::CollisionWitness;

pub type Result<T> = std::result::Result<T, SidonError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SidonError {
    #[error("a linear form needs at least one coefficient")]
    EmptyCoefficientList,
    #[error("form has {h} coefficients; the limit is {limit}")]
    FormTooLarge { h: usize, limit: usize },
    #[error("coefficient c_{index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("form does not have property N")]
    PropertyNViolated,
    #[error("form coefficients must be integers")]
    NonIntegerCoefficients,
    #[error("enumeration needs {required} tuples; the budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error("empty index subset")]
    EmptySubset,
    #[error("index subset {mask:#b} does not fit a form with h = {h}")]
    SubsetOutOfRange { mask: u64, h: usize },
    #[error("element {0} is already in the set")]
    ElementAlreadyPresent(Scalar),
    #[error("element {0} appears more than once")]
    DuplicateElement(Scalar),
    #[error("set is not verified as Sidon for this form")]
    PreconditionNotSidon,
    #[error("set is not Sidon: {0}")]
    NotSidon(Box<CollisionWitness>),
    #[error("candidate stream ended without a valid extension")]
    StreamExhausted,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("tolerance {value} at position {index} is not positive")]
    NonPositiveTolerance { index: usize, value: Scalar },
    #[error("negative threshold {0}")]
    NegativeThreshold(Scalar),
    #[error("set contains the non-integer {0}")]
    NonIntegerElements(Scalar),
    #[error("n = {n} exceeds the search cap {cap}")]
    CapExceeded { n: u64, cap: u64 },
    #[error("element a_{index} = {value} exceeds the greedy bound {bound}")]
    GrowthBoundViolated {
        index: usize,
        value: Box<Scalar>,
        bound: Box<Scalar>,
    },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("{0}")]
    InvalidArgument(String),
}

impl SidonError {
    /// Stable snake_case tag used in machine-readable output.
    pub fn reason(&self) -> &'static str {
        match self {
            SidonError::EmptyCoefficientList => "empty_coefficient_list",
            SidonError::FormTooLarge { .. } => "form_too_large",
            SidonError::ZeroCoefficient { .. } => "zero_coefficient",
            SidonError::PropertyNViolated => "property_n_violated",
            SidonError::NonIntegerCoefficients => "non_integer_coefficients",
            SidonError::BudgetExceeded { .. } => "budget_exceeded",
            SidonError::EmptySubset => "empty_subset",
            SidonError::SubsetOutOfRange { .. } => "subset_out_of_range",
            SidonError::ElementAlreadyPresent(_) => "element_already_present",
            SidonError::DuplicateElement(_) => "duplicate_element",
            SidonError::PreconditionNotSidon => "precondition_not_sidon",
            SidonError::NotSidon(_) => "not_sidon",
            SidonError::StreamExhausted => "stream_exhausted",
            SidonError::NotPrime(_) => "not_prime",
            SidonError::NonPositiveTolerance { .. } => "non_positive_tolerance",
            SidonError::NegativeThreshold(_) => "negative_threshold",
            SidonError::NonIntegerElements(_) => "non_integer_elements",
            SidonError::CapExceeded { .. } => "cap_exceeded",
            SidonError::GrowthBoundViolated { .. } => "growth_bound_violated",
            SidonError::Parse { .. } => "parse_error",
            SidonError::InvalidArgument(_) => "invalid_argument",
        }
    }
}
