//! Committee-based ensemble classification.
//!
//! `quorum` treats an ensemble as a committee: every base learner rates each
//! candidate class for an instance, the learner's per-class track record
//! (one-vs-rest precision and recall plus accuracy, measured on held-out
//! data) becomes its per-class weight, and the committee picks the class
//! with the highest weighted sum of ratings.
//!
//! The crate ships four from-scratch reference learners (k-nearest
//! neighbours, softmax logistic regression, a Gini/CART random forest and a
//! random-projection single-hidden-layer network trained by ridge least
//! squares) plus two optional ones (a backprop MLP and one-vs-rest linear
//! SVMs). All of them hide behind [`learners::TrainedModel`], so the
//! combiner never cares which learner produced a rating.
//!
//! Everything is deterministic: all randomness flows from explicit 64-bit
//! seeds through counter-based streams ([`rng`]), so a fit is a pure
//! function of its inputs and may be re-run or parallelised freely.
//!
//! The crate is `no_std`-compatible (it requires `alloc`); disable the
//! default `std` feature for embedded use. IO, file formats and the
//! experiment CLI live in the companion `quorum-cli` crate.
//!
//! ```
//! use quorum::dataset::{stratified_split, Dataset};
//! use quorum::ensemble::{fit_committee, RatingMode, WeightProtocol};
//! use quorum::learners::{LearnerKind, LearnerSpec};
//!
//! let rows = vec![
//!     vec![0.1, 1.0], vec![0.2, 0.9], vec![0.0, 1.1], vec![0.3, 1.2],
//!     vec![1.0, 0.0], vec![1.1, 0.2], vec![0.9, 0.1], vec![1.2, 0.3],
//! ];
//! let labels = vec![0, 0, 0, 0, 1, 1, 1, 1];
//! let ds = Dataset::from_rows(rows, labels).unwrap();
//! let split = stratified_split(&ds, 0.75, 7).unwrap();
//!
//! let specs = vec![
//!     LearnerSpec::new(LearnerKind::Knn).with("k", 3.0).unwrap(),
//!     LearnerSpec::new(LearnerKind::LogReg),
//! ];
//! let committee = fit_committee(
//!     &split.train,
//!     &specs,
//!     &WeightProtocol::Resubstitution,
//!     RatingMode::Scores,
//!     7,
//! )
//! .unwrap();
//! let predicted = committee.predict(split.test.row(0)).unwrap();
//! assert!(predicted < ds.n_classes());
//! ```
#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod learners;
mod math;
pub mod metrics;
pub mod rng;

pub use dataset::{
    split, standardize, stratified_split, Dataset, Rounding, Scaler, SplitMode, SplitPair,
};
pub use ensemble::{
    aggregate, fit_committee, fit_committee_with, fit_member, plan_protocol, predict_committee,
    rate, Committee, CommitteeMember, ProtocolPlan, RatingMode, RatingRow, ScoredMember,
    WeightProtocol,
};
pub use error::{Error, Result};
pub use learners::{fit, LearnerKind, LearnerSpec, ParamSchema, TrainedModel};
pub use metrics::{
    accuracy, confusion_matrix, learner_weights, ovr_accuracy, per_class_metrics,
    per_class_metrics_with, precision, recall, AccuracyMode, ConfusionMatrix, PerClassMetrics,
    WeightVector,
};
