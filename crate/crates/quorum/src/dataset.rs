//! In-memory datasets, deterministic train/test splitting and feature
//! standardisation.
//!
//! A [`Dataset`] is immutable after construction: a row-major feature
//! matrix, integer labels in `0..m`, and the class/feature names that give
//! those integers meaning. Splitting and scaling never mutate their input;
//! they build new datasets, so shared read-only access across threads is
//! safe by construction.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::math;
use crate::rng;

/// Immutable feature matrix plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    rows: usize,
    cols: usize,
    labels: Vec<usize>,
    class_names: Vec<String>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Build a dataset from parts, validating every invariant: at least one
    /// row and feature, at least two classes, all labels in range, every
    /// class present, all feature values finite.
    pub fn new(
        features: Vec<f64>,
        cols: usize,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if cols == 0 || labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if features.len() != labels.len() * cols {
            return Err(Error::LengthMismatch { left: features.len(), right: labels.len() * cols });
        }
        if feature_names.len() != cols {
            return Err(Error::LengthMismatch { left: feature_names.len(), right: cols });
        }
        let m = class_names.len();
        if m < 2 {
            return Err(Error::SingleClass);
        }
        let mut seen = vec![false; m];
        for &label in &labels {
            if label >= m {
                return Err(Error::LabelOutOfRange { label, classes: m });
            }
            seen[label] = true;
        }
        if seen.iter().any(|&s| !s) {
            // A named class with no instances means the caller's label
            // encoding is out of sync with its data.
            let class = seen.iter().position(|&s| !s).unwrap();
            return Err(Error::ClassTooSmall { class, count: 0 });
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        let rows = labels.len();
        Ok(Dataset { features, rows, cols, labels, class_names, feature_names })
    }

    /// Convenience constructor with generated names: features `x0..x{d-1}`,
    /// classes `c0..c{m-1}`.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let cols = rows[0].len();
        let mut features = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch { left: row.len(), right: cols });
            }
            features.extend_from_slice(row);
        }
        let m = labels.iter().copied().max().map_or(0, |x| x + 1);
        let class_names = (0..m).map(|c| format!("c{c}")).collect();
        let feature_names = (0..cols).map(|j| format!("x{j}")).collect();
        Dataset::new(features, cols, labels, class_names, feature_names)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_features(&self) -> usize {
        self.cols
    }

    /// Number of classes `m`. Fixed by the class-name table, not by which
    /// labels happen to occur in this subset.
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Instances per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &label in &self.labels {
            counts[label] += 1;
        }
        counts
    }

    /// New dataset holding the given rows (in the given order).
    ///
    /// Class and feature names are carried over unchanged, so a subset may
    /// legitimately miss some classes; `n_classes` still reports the full
    /// count. Panics if an index is out of bounds.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.cols);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features,
            rows: indices.len(),
            cols: self.cols,
            labels,
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    fn with_features(&self, features: Vec<f64>) -> Dataset {
        debug_assert_eq!(features.len(), self.features.len());
        Dataset {
            features,
            rows: self.rows,
            cols: self.cols,
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// A train/test partition of one source dataset.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub seed: u64,
    pub train_fraction: f64,
}

/// How the train share of each class (or of the whole set) is rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Nearest integer, half-way cases up. The default.
    HalfUp,
    /// Always up.
    Up,
    /// Always down.
    Down,
}

impl Rounding {
    fn apply(self, x: f64) -> usize {
        let r = match self {
            Rounding::HalfUp => math::round_half_up(x),
            Rounding::Up => math::ceil(x),
            Rounding::Down => math::floor(x),
        };
        r as usize
    }
}

/// Whether the split preserves class proportions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    /// Per-class split; every class lands on both sides. The default.
    Stratified,
    /// One shuffle of all rows; small classes may miss the test set.
    Uniform,
}

/// Stratified split with half-up rounding; the common case.
pub fn stratified_split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<SplitPair> {
    split(ds, train_fraction, seed, SplitMode::Stratified, Rounding::HalfUp)
}

/// Deterministic train/test split.
///
/// The shuffle is driven entirely by `seed`; identical inputs give
/// byte-identical splits. Row order within each side follows the source
/// dataset. Stratified mode keeps the train share of every class within one
/// instance of `train_fraction` and therefore needs at least two instances
/// per class.
pub fn split(
    ds: &Dataset,
    train_fraction: f64,
    seed: u64,
    mode: SplitMode,
    rounding: Rounding,
) -> Result<SplitPair> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidFraction(train_fraction));
    }
    let n = ds.n_rows();
    let mut shuffled: Vec<usize> = (0..n).collect();
    let mut rng = rng::stream(seed, rng::STREAM_SPLIT);
    shuffled.shuffle(&mut rng);

    let mut train_idx: Vec<usize> = Vec::new();
    let mut test_idx: Vec<usize> = Vec::new();
    match mode {
        SplitMode::Stratified => {
            let counts = ds.class_counts();
            for (class, &count) in counts.iter().enumerate() {
                if count < 2 {
                    return Err(Error::ClassTooSmall { class, count });
                }
            }
            // Walk the shuffled order once per class; the first
            // `take` indices of each class train, the rest test.
            let takes: Vec<usize> = counts
                .iter()
                .map(|&c| rounding.apply(train_fraction * c as f64).clamp(1, c - 1))
                .collect();
            let mut placed = vec![0usize; counts.len()];
            for &i in &shuffled {
                let c = ds.label(i);
                if placed[c] < takes[c] {
                    train_idx.push(i);
                } else {
                    test_idx.push(i);
                }
                placed[c] += 1;
            }
        }
        SplitMode::Uniform => {
            if n < 2 {
                return Err(Error::EmptyDataset);
            }
            let take = rounding.apply(train_fraction * n as f64).clamp(1, n - 1);
            train_idx.extend_from_slice(&shuffled[..take]);
            test_idx.extend_from_slice(&shuffled[take..]);
        }
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(SplitPair {
        train: ds.subset(&train_idx),
        test: ds.subset(&test_idx),
        seed,
        train_fraction,
    })
}

/// Per-feature location/scale fitted on a training set.
///
/// A feature with zero spread on the training set is only centred; its
/// stored `stddev` is 0 and the applied divisor is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

impl Scaler {
    /// Fit means and population (divide-by-n) standard deviations.
    pub fn fit(train: &Dataset) -> Scaler {
        let n = train.n_rows() as f64;
        let d = train.n_features();
        let mut means = vec![0.0; d];
        for i in 0..train.n_rows() {
            for (j, x) in train.row(i).iter().enumerate() {
                means[j] += x;
            }
        }
        for mean in &mut means {
            *mean /= n;
        }
        let mut vars = vec![0.0; d];
        for i in 0..train.n_rows() {
            for (j, x) in train.row(i).iter().enumerate() {
                let diff = x - means[j];
                vars[j] += diff * diff;
            }
        }
        let stddevs = vars.iter().map(|v| math::sqrt(v / n)).collect();
        Scaler { means, stddevs }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stddevs))
            .map(|(x, (mean, std))| (x - mean) / if *std > 0.0 { *std } else { 1.0 })
            .collect()
    }

    pub fn transform(&self, ds: &Dataset) -> Dataset {
        let mut features = Vec::with_capacity(ds.n_rows() * ds.n_features());
        for i in 0..ds.n_rows() {
            features.extend(self.transform_row(ds.row(i)));
        }
        ds.with_features(features)
    }
}

/// Standardise train and test with statistics fitted on train only.
pub fn standardize(train: &Dataset, test: &Dataset) -> (Dataset, Dataset, Scaler) {
    let scaler = Scaler::fit(train);
    (scaler.transform(train), scaler.transform(test), scaler)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n_per_class: &[usize]) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, &count) in n_per_class.iter().enumerate() {
            for i in 0..count {
                rows.push(vec![c as f64, i as f64]);
                labels.push(c);
            }
        }
        Dataset::from_rows(rows, labels).unwrap()
    }

    #[test]
    fn new_rejects_bad_labels() {
        let err = Dataset::from_rows(vec![vec![1.0], vec![2.0]], vec![0, 0]).unwrap_err();
        assert_eq!(err, Error::SingleClass);
        let err = Dataset::new(
            vec![1.0, 2.0],
            1,
            vec![0, 2],
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into()],
        )
        .unwrap_err();
        assert_eq!(err, Error::ClassTooSmall { class: 1, count: 0 });
    }

    #[test]
    fn new_rejects_non_finite() {
        let err = Dataset::from_rows(vec![vec![1.0], vec![f64::NAN]], vec![0, 1]).unwrap_err();
        assert_eq!(err, Error::NonFinite("feature matrix"));
    }

    #[test]
    fn exact_stratification() {
        // 5+5 instances at fraction 0.8: 4+4 train, 1+1 test.
        let ds = toy(&[5, 5]);
        let pair = stratified_split(&ds, 0.8, 3).unwrap();
        assert_eq!(pair.train.n_rows(), 8);
        assert_eq!(pair.test.n_rows(), 2);
        assert_eq!(pair.train.class_counts(), vec![4, 4]);
        assert_eq!(pair.test.class_counts(), vec![1, 1]);
    }

    #[test]
    fn split_is_deterministic() {
        let ds = toy(&[7, 9, 4]);
        let a = stratified_split(&ds, 0.8, 99).unwrap();
        let b = stratified_split(&ds, 0.8, 99).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        let c = stratified_split(&ds, 0.8, 100).unwrap();
        assert!(a.train != c.train || a.test != c.test);
    }

    #[test]
    fn split_rejects_tiny_class() {
        let ds = toy(&[5, 1]);
        let err = stratified_split(&ds, 0.8, 0).unwrap_err();
        assert_eq!(err, Error::ClassTooSmall { class: 1, count: 1 });
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ds = toy(&[3, 3]);
        assert!(matches!(stratified_split(&ds, 0.0, 0), Err(Error::InvalidFraction(_))));
        assert!(matches!(stratified_split(&ds, 1.0, 0), Err(Error::InvalidFraction(_))));
    }

    #[test]
    fn uniform_split_sizes_follow_rounding() {
        let ds = toy(&[5, 5]);
        let up = split(&ds, 0.75, 1, SplitMode::Uniform, Rounding::Up).unwrap();
        assert_eq!(up.train.n_rows(), 8);
        let down = split(&ds, 0.75, 1, SplitMode::Uniform, Rounding::Down).unwrap();
        assert_eq!(down.train.n_rows(), 7);
    }

    #[test]
    fn standardize_hand_check() {
        // Column [1,2,3]: mean 2, population stddev sqrt(2/3).
        let train = Dataset::from_rows(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 1, 0]).unwrap();
        let test = Dataset::from_rows(vec![vec![2.0], vec![4.0]], vec![0, 1]).unwrap();
        let (strain, stest, scaler) = standardize(&train, &test);
        assert!((strain.row(0)[0] + 1.2247).abs() < 1e-4);
        assert!((strain.row(1)[0]).abs() < 1e-12);
        assert!((strain.row(2)[0] - 1.2247).abs() < 1e-4);
        assert!((stest.row(0)[0]).abs() < 1e-12);
        assert!((scaler.means[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn standardize_constant_column() {
        let train =
            Dataset::from_rows(vec![vec![5.0, 1.0], vec![5.0, 2.0], vec![5.0, 3.0]], vec![0, 1, 0])
                .unwrap();
        let (strain, _, scaler) = standardize(&train, &train);
        for i in 0..3 {
            assert_eq!(strain.row(i)[0], 0.0);
        }
        assert_eq!(scaler.stddevs[0], 0.0);
    }

    #[test]
    fn test_transformed_with_train_statistics() {
        let train = Dataset::from_rows(vec![vec![0.0], vec![2.0]], vec![0, 1]).unwrap();
        let test = Dataset::from_rows(vec![vec![10.0], vec![0.0]], vec![0, 1]).unwrap();
        let (_, stest, _) = standardize(&train, &test);
        // Train mean 1, population stddev 1; test uses those, not its own.
        assert_eq!(stest.row(0)[0], 9.0);
        assert_eq!(stest.row(1)[0], -1.0);
    }
}
