//! Base learners — the committee's decision makers.
//!
//! Every learner is specified by a [`LearnerSpec`] (kind + hyperparameters +
//! seed) and trains into a [`TrainedModel`], an enum the combiner treats
//! uniformly: `predict_scores` yields one score per class, all in [0, 1],
//! and `predict` takes the argmax with ties going to the smaller class
//! index.
//!
//! Four kinds are first-class citizens (`knn`, `logreg`, `random_forest`,
//! `elm`); `mlp_bp` and `linear_svm` round out a classical six-learner
//! roster. All are trained from scratch here — no external ML crates — and
//! all randomness comes from the spec's seed, so `fit` is a pure function.

pub mod elm;
pub mod forest;
pub mod knn;
pub mod logreg;
pub mod mlp;
pub mod svm;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math;

/// The supported base-learner families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LearnerKind {
    Knn,
    LogReg,
    RandomForest,
    Elm,
    MlpBp,
    LinearSvm,
}

impl LearnerKind {
    /// Every kind, in roster order.
    pub const ALL: [LearnerKind; 6] = [
        LearnerKind::Knn,
        LearnerKind::LogReg,
        LearnerKind::RandomForest,
        LearnerKind::Elm,
        LearnerKind::MlpBp,
        LearnerKind::LinearSvm,
    ];

    /// Stable lower-case identifier used in config files and reports.
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Knn => "knn",
            LearnerKind::LogReg => "logreg",
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::Elm => "elm",
            LearnerKind::MlpBp => "mlp_bp",
            LearnerKind::LinearSvm => "linear_svm",
        }
    }

    /// Inverse of [`LearnerKind::name`].
    pub fn parse(name: &str) -> Option<LearnerKind> {
        LearnerKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// The hyperparameters this kind accepts, with defaults and bounds.
    pub fn schema(self) -> &'static [ParamSchema] {
        match self {
            LearnerKind::Knn => KNN_PARAMS,
            LearnerKind::LogReg => LOGREG_PARAMS,
            LearnerKind::RandomForest => FOREST_PARAMS,
            LearnerKind::Elm => ELM_PARAMS,
            LearnerKind::MlpBp => MLP_PARAMS,
            LearnerKind::LinearSvm => SVM_PARAMS,
        }
    }
}

/// One hyperparameter a learner kind accepts. Bounds are inclusive;
/// `integer` means the value must have no fractional part.
#[derive(Debug, Clone, Copy)]
pub struct ParamSchema {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
    pub help: &'static str,
}

const fn param(
    name: &'static str,
    default: f64,
    min: f64,
    max: f64,
    integer: bool,
    help: &'static str,
) -> ParamSchema {
    ParamSchema { name, default, min, max, integer, help }
}

const KNN_PARAMS: &[ParamSchema] =
    &[param("k", 5.0, 1.0, 1e9, true, "number of neighbours consulted per query")];

const LOGREG_PARAMS: &[ParamSchema] = &[
    param("lambda", 1e-4, 0.0, f64::INFINITY, false, "L2 penalty on weights (bias excluded)"),
    param("learning_rate", 0.1, 1e-12, 1e6, false, "fixed gradient-descent step"),
    param("max_iters", 2000.0, 1.0, 1e9, true, "iteration cap for gradient descent"),
    param("tolerance", 1e-6, 0.0, f64::INFINITY, false, "stop once the gradient norm drops below this"),
];

const FOREST_PARAMS: &[ParamSchema] = &[
    param("trees", 100.0, 1.0, 1e6, true, "number of trees"),
    param("max_depth", 0.0, 0.0, 1e9, true, "depth cap per tree; 0 = unlimited"),
    param("min_split", 2.0, 2.0, 1e9, true, "smallest node size still considered for splitting"),
    param("features_per_split", 0.0, 0.0, 1e9, true, "random features tried per split; 0 = ceil(sqrt(d))"),
    param("bootstrap", 1.0, 0.0, 1.0, true, "1 = bootstrap-resample each tree's data, 0 = use all rows"),
];

const ELM_PARAMS: &[ParamSchema] = &[
    param("hidden", 100.0, 1.0, 1e6, true, "random hidden nodes"),
    param("ridge", 1e-6, 0.0, f64::INFINITY, false, "ridge term in the output-weight least squares"),
];

const MLP_PARAMS: &[ParamSchema] = &[
    param("hidden", 16.0, 1.0, 1e6, true, "hidden-layer width"),
    param("learning_rate", 0.5, 1e-12, 1e6, false, "fixed backprop step"),
    param("max_iters", 500.0, 1.0, 1e9, true, "full-batch epochs"),
];

const SVM_PARAMS: &[ParamSchema] = &[
    param("lambda", 1e-3, 0.0, f64::INFINITY, false, "L2 penalty per one-vs-rest classifier"),
    param("learning_rate", 0.1, 1e-12, 1e6, false, "fixed subgradient step"),
    param("max_iters", 1000.0, 1.0, 1e9, true, "subgradient iterations per classifier"),
];

/// Recipe for one committee member: learner kind, hyperparameter overrides
/// and the seed feeding all of its randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSpec {
    kind: LearnerKind,
    seed: u64,
    overrides: BTreeMap<String, f64>,
}

impl LearnerSpec {
    /// A spec with every hyperparameter at its schema default and seed 0.
    pub fn new(kind: LearnerKind) -> Self {
        LearnerSpec { kind, seed: 0, overrides: BTreeMap::new() }
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Builder-style seed override.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Builder-style hyperparameter override; rejects unknown keys and
    /// out-of-schema values.
    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        self.set(key, value)?;
        Ok(self)
    }

    /// In-place hyperparameter override.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let schema = self
            .kind
            .schema()
            .iter()
            .find(|p| p.name == key)
            .ok_or_else(|| Error::UnknownHyperparameter {
                learner: self.kind.name(),
                key: key.to_string(),
            })?;
        if !value.is_finite() {
            return Err(Error::BadHyperparameter {
                learner: self.kind.name(),
                message: format!("{key} must be finite"),
            });
        }
        if value < schema.min || value > schema.max {
            return Err(Error::BadHyperparameter {
                learner: self.kind.name(),
                message: format!("{key}={value} outside [{}, {}]", schema.min, schema.max),
            });
        }
        if schema.integer && math::floor(value) != value {
            return Err(Error::BadHyperparameter {
                learner: self.kind.name(),
                message: format!("{key}={value} must be an integer"),
            });
        }
        self.overrides.insert(key.to_string(), value);
        Ok(())
    }

    /// Effective value of `key`: the override if set, else the schema
    /// default. Panics on keys outside the kind's schema — that is a
    /// programming error, not an input error.
    pub fn param(&self, key: &str) -> f64 {
        if let Some(&v) = self.overrides.get(key) {
            return v;
        }
        self.kind
            .schema()
            .iter()
            .find(|p| p.name == key)
            .unwrap_or_else(|| panic!("{} has no hyperparameter {key}", self.kind.name()))
            .default
    }

    /// [`LearnerSpec::param`] narrowed to integer-valued hyperparameters.
    pub fn param_usize(&self, key: &str) -> usize {
        self.param(key) as usize
    }

    /// Only the explicitly overridden pairs, in key order.
    pub fn overrides(&self) -> impl Iterator<Item = (&str, f64)> {
        self.overrides.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Every hyperparameter with overrides applied, in schema order.
    pub fn effective_params(&self) -> Vec<(&'static str, f64)> {
        self.kind.schema().iter().map(|p| (p.name, self.param(p.name))).collect()
    }
}

/// A fitted base learner. Learned parameters are public so models can be
/// serialized and reloaded without retraining.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Knn(knn::KnnModel),
    LogReg(logreg::LogRegModel),
    RandomForest(forest::ForestModel),
    Elm(elm::ElmModel),
    MlpBp(mlp::MlpModel),
    LinearSvm(svm::SvmModel),
}

/// Train `spec` on `train`. Pure: the result depends only on the arguments
/// (the seed lives inside the spec).
pub fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<TrainedModel> {
    Ok(match spec.kind() {
        LearnerKind::Knn => TrainedModel::Knn(knn::fit(spec, train)?),
        LearnerKind::LogReg => TrainedModel::LogReg(logreg::fit(spec, train)?),
        LearnerKind::RandomForest => TrainedModel::RandomForest(forest::fit(spec, train)?),
        LearnerKind::Elm => TrainedModel::Elm(elm::fit(spec, train)?),
        LearnerKind::MlpBp => TrainedModel::MlpBp(mlp::fit(spec, train)?),
        LearnerKind::LinearSvm => TrainedModel::LinearSvm(svm::fit(spec, train)?),
    })
}

impl TrainedModel {
    pub fn kind(&self) -> LearnerKind {
        match self {
            TrainedModel::Knn(_) => LearnerKind::Knn,
            TrainedModel::LogReg(_) => LearnerKind::LogReg,
            TrainedModel::RandomForest(_) => LearnerKind::RandomForest,
            TrainedModel::Elm(_) => LearnerKind::Elm,
            TrainedModel::MlpBp(_) => LearnerKind::MlpBp,
            TrainedModel::LinearSvm(_) => LearnerKind::LinearSvm,
        }
    }

    /// Feature count the model expects.
    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Knn(m) => m.cols,
            TrainedModel::LogReg(m) => m.d,
            TrainedModel::RandomForest(m) => m.d,
            TrainedModel::Elm(m) => m.d,
            TrainedModel::MlpBp(m) => m.d,
            TrainedModel::LinearSvm(m) => m.d,
        }
    }

    /// Class count the model scores over.
    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::Knn(m) => m.m,
            TrainedModel::LogReg(m) => m.m,
            TrainedModel::RandomForest(m) => m.m,
            TrainedModel::Elm(m) => m.m,
            TrainedModel::MlpBp(m) => m.m,
            TrainedModel::LinearSvm(m) => m.m,
        }
    }

    /// Per-class scores for one instance, each in [0, 1].
    pub fn predict_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch { expected: self.n_features(), got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("instance"));
        }
        Ok(match self {
            TrainedModel::Knn(m) => m.scores(x),
            TrainedModel::LogReg(m) => m.scores(x),
            TrainedModel::RandomForest(m) => m.scores(x),
            TrainedModel::Elm(m) => m.scores(x),
            TrainedModel::MlpBp(m) => m.scores(x),
            TrainedModel::LinearSvm(m) => m.scores(x),
        })
    }

    /// Predicted class: argmax of [`TrainedModel::predict_scores`], ties to
    /// the smallest index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(math::argmax(&self.predict_scores(x)?))
    }

    /// Predictions for every row of `ds`, in row order.
    pub fn predict_batch(&self, ds: &Dataset) -> Result<Vec<usize>> {
        (0..ds.n_rows()).map(|i| self.predict(ds.row(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy() -> Dataset {
        Dataset::from_rows(
            vec![
                vec![0.0, 0.0],
                vec![0.1, 0.2],
                vec![0.2, 0.1],
                vec![1.0, 1.0],
                vec![0.9, 1.1],
                vec![1.1, 0.9],
            ],
            vec![0, 0, 0, 1, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in LearnerKind::ALL {
            assert_eq!(LearnerKind::parse(k.name()), Some(k));
        }
        assert_eq!(LearnerKind::parse("boosted_stump"), None);
    }

    #[test]
    fn spec_defaults_and_overrides() {
        let spec = LearnerSpec::new(LearnerKind::Knn);
        assert_eq!(spec.param_usize("k"), 5);
        let spec = spec.with("k", 3.0).unwrap();
        assert_eq!(spec.param_usize("k"), 3);
        assert_eq!(spec.overrides().collect::<Vec<_>>(), vec![("k", 3.0)]);
    }

    #[test]
    fn spec_rejects_bad_params() {
        let spec = LearnerSpec::new(LearnerKind::Knn);
        assert!(matches!(
            spec.clone().with("neighbours", 3.0),
            Err(Error::UnknownHyperparameter { .. })
        ));
        assert!(matches!(spec.clone().with("k", 0.0), Err(Error::BadHyperparameter { .. })));
        assert!(matches!(spec.clone().with("k", 2.5), Err(Error::BadHyperparameter { .. })));
        assert!(matches!(spec.with("k", f64::NAN), Err(Error::BadHyperparameter { .. })));
    }

    #[test]
    fn effective_params_cover_schema() {
        let spec = LearnerSpec::new(LearnerKind::RandomForest).with("trees", 7.0).unwrap();
        let eff = spec.effective_params();
        assert_eq!(eff.len(), FOREST_PARAMS.len());
        assert!(eff.contains(&("trees", 7.0)));
        assert!(eff.contains(&("min_split", 2.0)));
    }

    #[test]
    fn every_kind_fits_and_scores_in_range() {
        let ds = toy();
        for kind in LearnerKind::ALL {
            let spec = match kind {
                // keep the tiny test fast and within n
                LearnerKind::Knn => LearnerSpec::new(kind).with("k", 3.0).unwrap(),
                LearnerKind::RandomForest => LearnerSpec::new(kind).with("trees", 10.0).unwrap(),
                LearnerKind::Elm => LearnerSpec::new(kind).with("hidden", 8.0).unwrap(),
                _ => LearnerSpec::new(kind),
            }
            .with_seed(11);
            let model = fit(&spec, &ds).unwrap();
            assert_eq!(model.kind(), kind);
            assert_eq!(model.n_features(), 2);
            assert_eq!(model.n_classes(), 2);
            for i in 0..ds.n_rows() {
                let s = model.predict_scores(ds.row(i)).unwrap();
                assert_eq!(s.len(), 2);
                assert!(s.iter().all(|&v| (0.0..=1.0).contains(&v) && v.is_finite()), "{kind:?}: {s:?}");
                assert_eq!(model.predict(ds.row(i)).unwrap(), math::argmax(&s));
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let model = fit(&LearnerSpec::new(LearnerKind::Knn).with("k", 1.0).unwrap(), &toy()).unwrap();
        assert!(matches!(
            model.predict_scores(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(model.predict_scores(&[f64::NAN, 0.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn fit_is_deterministic_per_seed() {
        let ds = toy();
        for kind in LearnerKind::ALL {
            let spec = match kind {
                LearnerKind::Knn => LearnerSpec::new(kind).with("k", 3.0).unwrap(),
                LearnerKind::RandomForest => LearnerSpec::new(kind).with("trees", 5.0).unwrap(),
                LearnerKind::Elm => LearnerSpec::new(kind).with("hidden", 8.0).unwrap(),
                _ => LearnerSpec::new(kind),
            }
            .with_seed(42);
            let a = fit(&spec, &ds).unwrap();
            let b = fit(&spec, &ds).unwrap();
            assert_eq!(a, b, "{kind:?} not deterministic");
        }
    }
}
