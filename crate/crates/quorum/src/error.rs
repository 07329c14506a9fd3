//! Error type shared by every fallible operation in the crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building datasets, fitting learners
/// or combining their ratings.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A dataset with zero rows or zero feature columns.
    EmptyDataset,
    /// Fewer than two classes present; classification needs at least two.
    SingleClass,
    /// An instance vector whose length does not match the model's feature count.
    DimensionMismatch { expected: usize, got: usize },
    /// Two sequences that must be equally long are not.
    LengthMismatch { left: usize, right: usize },
    /// A class label outside `0..classes`.
    LabelOutOfRange { label: usize, classes: usize },
    /// A class too small to be split across both sides of a partition.
    ClassTooSmall { class: usize, count: usize },
    /// A fraction that must lie strictly between 0 and 1.
    InvalidFraction(f64),
    /// NaN or infinity where a finite number is required.
    NonFinite(&'static str),
    /// A hyperparameter value outside its legal range.
    BadHyperparameter { learner: &'static str, message: String },
    /// A hyperparameter key not in the learner's schema.
    UnknownHyperparameter { learner: &'static str, key: String },
    /// The ridge system of the least-squares learner was not positive
    /// definite; a larger ridge usually fixes it.
    SingularSystem,
    /// A committee with no members.
    EmptyCommittee,
    /// Committee members that disagree on the number of classes.
    MixedClassCounts { expected: usize, got: usize },
    /// A rating or weight entry outside its contractual range.
    ValueOutOfRange { what: &'static str, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDataset => write!(f, "dataset has no rows or no feature columns"),
            Error::SingleClass => write!(f, "single-class dataset; need at least two classes"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "expected an instance of {expected} features, got {got}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "sequence lengths differ: {left} vs {right}")
            }
            Error::LabelOutOfRange { label, classes } => {
                write!(f, "label {label} out of range for {classes} classes")
            }
            Error::ClassTooSmall { class, count } => write!(
                f,
                "class {class} has only {count} instance(s); cannot place one on each side of the split"
            ),
            Error::InvalidFraction(x) => {
                write!(f, "fraction {x} must lie strictly between 0 and 1")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::BadHyperparameter { learner, message } => {
                write!(f, "{learner}: {message}")
            }
            Error::UnknownHyperparameter { learner, key } => {
                write!(f, "{learner}: unknown hyperparameter `{key}`")
            }
            Error::SingularSystem => write!(
                f,
                "normal equations not positive definite; increase the ridge parameter"
            ),
            Error::EmptyCommittee => write!(f, "committee needs at least one member"),
            Error::MixedClassCounts { expected, got } => {
                write!(f, "committee members disagree on class count: {expected} vs {got}")
            }
            Error::ValueOutOfRange { what, value } => {
                write!(f, "{what} out of range: {value}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
