//! The committee combiner: collect per-class ratings from every member,
//! weight them by each member's per-class track record, and pick the class
//! with the highest weighted sum.
//!
//! Weights come from a [`WeightProtocol`]: by default each member is
//! evaluated on a stratified validation slice of the training data (then
//! refit on all of it), but resubstitution and an explicit external
//! evaluation set are also available. The weight of member k for class j is
//! `precision + recall + accuracy` of class j on that evaluation set, so
//! every weight lies in [0, 3].

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{stratified_split, Dataset};
use crate::error::{Error, Result};
use crate::learners::{fit, LearnerSpec, TrainedModel};
use crate::math;
use crate::metrics::{
    confusion_matrix, learner_weights, per_class_metrics_with, AccuracyMode, PerClassMetrics,
    WeightVector,
};
use crate::rng;

/// One member's ratings of every class for a single instance; entries in
/// [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRow(Vec<f64>);

impl RatingRow {
    /// Validate and wrap a rating vector.
    pub fn new(ratings: Vec<f64>) -> Result<Self> {
        if ratings.is_empty() {
            return Err(Error::ValueOutOfRange { what: "rating row length", value: 0.0 });
        }
        for &r in &ratings {
            if !r.is_finite() {
                return Err(Error::NonFinite("rating"));
            }
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::ValueOutOfRange { what: "rating", value: r });
            }
        }
        Ok(RatingRow(ratings))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How members express their opinion of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatingMode {
    /// 1 for the predicted class, 0 elsewhere: classical weighted voting.
    OneHot,
    /// The model's scores verbatim: soft voting. The default.
    #[default]
    Scores,
}

impl RatingMode {
    pub fn name(self) -> &'static str {
        match self {
            RatingMode::OneHot => "onehot",
            RatingMode::Scores => "scores",
        }
    }

    pub fn parse(name: &str) -> Option<RatingMode> {
        match name {
            "onehot" => Some(RatingMode::OneHot),
            "scores" => Some(RatingMode::Scores),
            _ => None,
        }
    }
}

/// One member's rating row for `x` under the given mode.
pub fn rate(model: &TrainedModel, x: &[f64], mode: RatingMode) -> Result<RatingRow> {
    match mode {
        RatingMode::Scores => RatingRow::new(model.predict_scores(x)?),
        RatingMode::OneHot => {
            let c = model.predict(x)?;
            let mut row = vec![0.0; model.n_classes()];
            row[c] = 1.0;
            Ok(RatingRow(row))
        }
    }
}

/// Weighted-argmax fusion: `score[j] = Σ_k ratings[k][j] · weights[k][j]`,
/// returning the smallest index attaining the maximum.
pub fn aggregate(ratings: &[RatingRow], weights: &[WeightVector]) -> Result<usize> {
    if ratings.is_empty() {
        return Err(Error::EmptyCommittee);
    }
    if ratings.len() != weights.len() {
        return Err(Error::LengthMismatch { left: ratings.len(), right: weights.len() });
    }
    let m = ratings[0].len();
    let mut scores = vec![0.0; m];
    for (r, w) in ratings.iter().zip(weights) {
        if r.len() != m {
            return Err(Error::MixedClassCounts { expected: m, got: r.len() });
        }
        if w.len() != m {
            return Err(Error::MixedClassCounts { expected: m, got: w.len() });
        }
        for ((s, rj), wj) in scores.iter_mut().zip(r.as_slice()).zip(w.as_slice()) {
            *s += rj * wj;
        }
    }
    Ok(math::argmax(&scores))
}

/// Where a member's per-class weights are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightProtocol<'a> {
    /// Hold out this fraction of the training set (stratified) for
    /// weighting, then refit each member on the full training set.
    Validation(f64),
    /// Evaluate on the very data the member was fit on. Optimistic, but
    /// leak-free.
    Resubstitution,
    /// Evaluate on a caller-supplied set. Passing the test set here leaks
    /// it into the weights — only do that to mirror published setups.
    External(&'a Dataset),
}

impl Default for WeightProtocol<'_> {
    fn default() -> Self {
        WeightProtocol::Validation(0.25)
    }
}

/// The concrete fit/evaluate datasets a protocol resolves to.
#[derive(Debug, Clone)]
pub struct ProtocolPlan {
    /// What members are fit on before weighting.
    pub fit_set: Dataset,
    /// Where their per-class metrics are measured.
    pub eval_set: Dataset,
    /// Whether members are refit on the full training set afterwards.
    pub refit: bool,
}

/// Resolve a protocol against a training set.
pub fn plan_protocol(
    train: &Dataset,
    protocol: &WeightProtocol<'_>,
    seed: u64,
) -> Result<ProtocolPlan> {
    match protocol {
        WeightProtocol::Validation(held_out) => {
            if !(*held_out > 0.0 && *held_out < 1.0) {
                return Err(Error::InvalidFraction(*held_out));
            }
            let pair = stratified_split(
                train,
                1.0 - held_out,
                rng::derive(seed, rng::STREAM_VALIDATION),
            )?;
            Ok(ProtocolPlan { fit_set: pair.train, eval_set: pair.test, refit: true })
        }
        WeightProtocol::Resubstitution => {
            Ok(ProtocolPlan { fit_set: train.clone(), eval_set: train.clone(), refit: false })
        }
        WeightProtocol::External(eval) => {
            if eval.n_features() != train.n_features() {
                return Err(Error::DimensionMismatch {
                    expected: train.n_features(),
                    got: eval.n_features(),
                });
            }
            if eval.n_classes() != train.n_classes() {
                return Err(Error::MixedClassCounts {
                    expected: train.n_classes(),
                    got: eval.n_classes(),
                });
            }
            Ok(ProtocolPlan { fit_set: train.clone(), eval_set: (*eval).clone(), refit: false })
        }
    }
}

/// A voting member: its recipe, fitted model and per-class weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitteeMember {
    pub spec: LearnerSpec,
    pub model: TrainedModel,
    pub weights: WeightVector,
}

/// A member together with the evaluation metrics its weights came from;
/// what [`fit_member`] hands back so callers can report the track record.
#[derive(Debug, Clone)]
pub struct ScoredMember {
    pub member: CommitteeMember,
    pub eval_metrics: PerClassMetrics,
}

/// Fit one member under an already-resolved plan. `train` is the full
/// training set used for the final refit when the plan calls for one.
pub fn fit_member(
    spec: &LearnerSpec,
    plan: &ProtocolPlan,
    train: &Dataset,
    acc_mode: AccuracyMode,
) -> Result<ScoredMember> {
    let mut model = fit(spec, &plan.fit_set)?;
    let preds = model.predict_batch(&plan.eval_set)?;
    let cm = confusion_matrix(plan.eval_set.labels(), &preds, train.n_classes())?;
    let metrics = per_class_metrics_with(&cm, acc_mode);
    let weights = learner_weights(&metrics);
    if plan.refit {
        model = fit(spec, train)?;
    }
    Ok(ScoredMember {
        member: CommitteeMember { spec: spec.clone(), model, weights },
        eval_metrics: metrics,
    })
}

/// A fitted committee, ready to classify.
#[derive(Debug, Clone)]
pub struct Committee {
    members: Vec<CommitteeMember>,
    m: usize,
    rating_mode: RatingMode,
}

impl Committee {
    /// Assemble a committee from already-fitted members.
    pub fn new(
        members: Vec<CommitteeMember>,
        m: usize,
        rating_mode: RatingMode,
    ) -> Result<Committee> {
        if members.is_empty() {
            return Err(Error::EmptyCommittee);
        }
        for member in &members {
            if member.model.n_classes() != m {
                return Err(Error::MixedClassCounts { expected: m, got: member.model.n_classes() });
            }
            if member.weights.len() != m {
                return Err(Error::MixedClassCounts { expected: m, got: member.weights.len() });
            }
        }
        Ok(Committee { members, m, rating_mode })
    }

    pub fn members(&self) -> &[CommitteeMember] {
        &self.members
    }

    pub fn n_classes(&self) -> usize {
        self.m
    }

    pub fn rating_mode(&self) -> RatingMode {
        self.rating_mode
    }

    /// Weighted-argmax vote over all members, same semantics as
    /// [`aggregate`].
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let mut scores = vec![0.0; self.m];
        for member in &self.members {
            let row = rate(&member.model, x, self.rating_mode)?;
            for ((s, rj), wj) in
                scores.iter_mut().zip(row.as_slice()).zip(member.weights.as_slice())
            {
                *s += rj * wj;
            }
        }
        Ok(math::argmax(&scores))
    }

    /// Committee predictions for every row of `ds`, in row order.
    pub fn predict_batch(&self, ds: &Dataset) -> Result<Vec<usize>> {
        (0..ds.n_rows()).map(|i| self.predict(ds.row(i))).collect()
    }
}

/// Free-function spelling of [`Committee::predict`].
pub fn predict_committee(committee: &Committee, x: &[f64]) -> Result<usize> {
    committee.predict(x)
}

/// Fit a whole committee: resolve the protocol once, then fit and weight
/// each spec. Member k trains with seed `derive(seed, k)`, so a roster may
/// repeat a spec and still get distinct members.
pub fn fit_committee(
    train: &Dataset,
    specs: &[LearnerSpec],
    protocol: &WeightProtocol<'_>,
    rating_mode: RatingMode,
    seed: u64,
) -> Result<Committee> {
    fit_committee_with(train, specs, protocol, rating_mode, seed, AccuracyMode::Overall)
}

/// [`fit_committee`] with an explicit accuracy definition for the weight
/// computation.
pub fn fit_committee_with(
    train: &Dataset,
    specs: &[LearnerSpec],
    protocol: &WeightProtocol<'_>,
    rating_mode: RatingMode,
    seed: u64,
    acc_mode: AccuracyMode,
) -> Result<Committee> {
    if specs.is_empty() {
        return Err(Error::EmptyCommittee);
    }
    let plan = plan_protocol(train, protocol, seed)?;
    let mut members = Vec::with_capacity(specs.len());
    for (k, spec) in specs.iter().enumerate() {
        let spec = spec.clone().with_seed(rng::derive(seed, k as u64));
        members.push(fit_member(&spec, &plan, train, acc_mode)?.member);
    }
    Committee::new(members, train.n_classes(), rating_mode)
}
