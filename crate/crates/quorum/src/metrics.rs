//! Confusion matrices, one-vs-rest precision/recall, accuracy, and the
//! per-class member weights derived from them.
//!
//! Multi-class precision and recall are obtained by collapsing the m×m
//! confusion matrix one class at a time: the chosen class is "positive",
//! everything else "negative" ([`ConfusionMatrix::ovr`]). A member's weight
//! for a class is simply `precision + recall + accuracy` of that class, so
//! better track records earn more say in the vote.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// m×m table of true-vs-predicted counts. Rows are truth, columns are
/// predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    m: usize,
    n: u64,
}

/// Binary collapse of one class against the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OvrCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub false_neg: u64,
    pub true_neg: u64,
}

impl ConfusionMatrix {
    /// Count matrix from parallel truth/prediction label vectors.
    pub fn from_labels(y_true: &[usize], y_pred: &[usize], m: usize) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::LengthMismatch { left: y_true.len(), right: y_pred.len() });
        }
        if y_true.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut counts = vec![0u64; m * m];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if t >= m {
                return Err(Error::LabelOutOfRange { label: t, classes: m });
            }
            if p >= m {
                return Err(Error::LabelOutOfRange { label: p, classes: m });
            }
            counts[t * m + p] += 1;
        }
        Ok(ConfusionMatrix { counts, m, n: y_true.len() as u64 })
    }

    /// Number of classes.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of counted instances.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Instances of true class `t` predicted as class `p`.
    pub fn count(&self, t: usize, p: usize) -> u64 {
        self.counts[t * self.m + p]
    }

    /// Correctly classified instances (the diagonal).
    pub fn trace(&self) -> u64 {
        (0..self.m).map(|i| self.count(i, i)).sum()
    }

    /// Collapse to binary counts with `class` as the positive class.
    pub fn ovr(&self, class: usize) -> OvrCounts {
        assert!(class < self.m, "class {class} out of range for m={}", self.m);
        let true_pos = self.count(class, class);
        let false_pos = (0..self.m).filter(|&i| i != class).map(|i| self.count(i, class)).sum();
        let false_neg = (0..self.m).filter(|&j| j != class).map(|j| self.count(class, j)).sum();
        let true_neg = self.n - true_pos - false_pos - false_neg;
        OvrCounts { true_pos, false_pos, false_neg, true_neg }
    }
}

/// Build a confusion matrix; free-function spelling of
/// [`ConfusionMatrix::from_labels`].
pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], m: usize) -> Result<ConfusionMatrix> {
    ConfusionMatrix::from_labels(y_true, y_pred, m)
}

fn ratio(num: u64, den: u64) -> f64 {
    // 0/0 is defined as 0: a learner that never predicts a class gets no
    // credit for it rather than poisoning downstream sums with NaN.
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// TP / (TP + FP) for `class` against the rest; 0 when the class is never
/// predicted.
pub fn precision(cm: &ConfusionMatrix, class: usize) -> f64 {
    let o = cm.ovr(class);
    ratio(o.true_pos, o.true_pos + o.false_pos)
}

/// TP / (TP + FN) for `class` against the rest; 0 when the class never
/// occurs in the truth.
pub fn recall(cm: &ConfusionMatrix, class: usize) -> f64 {
    let o = cm.ovr(class);
    ratio(o.true_pos, o.true_pos + o.false_neg)
}

/// Fraction of correctly classified instances, trace / n.
pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    cm.trace() as f64 / cm.n() as f64
}

/// (TP + TN) / n for `class` against the rest. Coincides with [`accuracy`]
/// only for m = 2.
pub fn ovr_accuracy(cm: &ConfusionMatrix, class: usize) -> f64 {
    let o = cm.ovr(class);
    ratio(o.true_pos + o.true_neg, cm.n())
}

/// Which accuracy fills the per-class accuracy vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AccuracyMode {
    /// Overall accuracy replicated for every class. The default.
    #[default]
    Overall,
    /// Per-class one-vs-rest accuracy (TP + TN) / n.
    OneVsRest,
}

/// One learner's per-class track record: precision, recall and accuracy
/// vectors, all entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PerClassMetrics {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub accuracy: Vec<f64>,
}

impl PerClassMetrics {
    pub fn n_classes(&self) -> usize {
        self.precision.len()
    }
}

/// Per-class metrics with overall accuracy replicated across classes.
pub fn per_class_metrics(cm: &ConfusionMatrix) -> PerClassMetrics {
    per_class_metrics_with(cm, AccuracyMode::Overall)
}

/// Per-class metrics with a caller-chosen accuracy definition.
pub fn per_class_metrics_with(cm: &ConfusionMatrix, mode: AccuracyMode) -> PerClassMetrics {
    let m = cm.m();
    let precision_vec = (0..m).map(|c| precision(cm, c)).collect();
    let recall_vec = (0..m).map(|c| recall(cm, c)).collect();
    let accuracy_vec = match mode {
        AccuracyMode::Overall => {
            let a = accuracy(cm);
            vec![a; m]
        }
        AccuracyMode::OneVsRest => (0..m).map(|c| ovr_accuracy(cm, c)).collect(),
    };
    PerClassMetrics { precision: precision_vec, recall: recall_vec, accuracy: accuracy_vec }
}

/// Per-class voting weight of one committee member; each entry lies in
/// [0, 3].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Wrap raw weights, checking range and finiteness.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        for &x in &w {
            if !x.is_finite() {
                return Err(Error::NonFinite("weight vector"));
            }
            if !(0.0..=3.0).contains(&x) {
                return Err(Error::ValueOutOfRange { what: "weight", value: x });
            }
        }
        Ok(WeightVector(w))
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

/// Sum the three indicator vectors into per-class weights.
///
/// The sum is evaluated as `precision + recall + accuracy`, in that order,
/// so equal inputs give bit-equal weights everywhere.
pub fn learner_weights(pm: &PerClassMetrics) -> WeightVector {
    let w = pm
        .precision
        .iter()
        .zip(pm.recall.iter().zip(&pm.accuracy))
        .map(|(p, (r, a))| p + r + a)
        .collect();
    WeightVector(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Shared fixture: truth [0,0,1,1,2], predictions [0,1,1,1,2].
    fn fixture() -> ConfusionMatrix {
        confusion_matrix(&[0, 0, 1, 1, 2], &[0, 1, 1, 1, 2], 3).unwrap()
    }

    #[test]
    fn hand_counted_matrix() {
        let cm = fixture();
        let expected = [[1, 1, 0], [0, 2, 0], [0, 0, 1]];
        for t in 0..3 {
            for p in 0..3 {
                assert_eq!(cm.count(t, p), expected[t][p]);
            }
        }
        assert_eq!(cm.n(), 5);
    }

    #[test]
    fn perfect_prediction_is_diagonal() {
        let y = [0, 1, 2, 1, 0];
        let cm = confusion_matrix(&y, &y, 3).unwrap();
        assert_eq!(cm.trace(), 5);
        assert_eq!(accuracy(&cm), 1.0);
    }

    #[test]
    fn unpredicted_class_column_is_zero() {
        let cm = confusion_matrix(&[0, 1, 2], &[0, 1, 1], 3).unwrap();
        for t in 0..3 {
            assert_eq!(cm.count(t, 2), 0);
        }
        assert_eq!(precision(&cm, 2), 0.0);
    }

    #[test]
    fn rejects_length_mismatch_and_bad_labels() {
        assert!(matches!(
            confusion_matrix(&[0, 1], &[0], 2),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            confusion_matrix(&[0, 3], &[0, 1], 3),
            Err(Error::LabelOutOfRange { label: 3, classes: 3 })
        ));
    }

    #[test]
    fn ovr_hand_check() {
        let o = fixture().ovr(1);
        assert_eq!(o, OvrCounts { true_pos: 2, false_pos: 1, false_neg: 0, true_neg: 2 });
    }

    #[test]
    fn diagonal_matrix_has_no_fp_fn() {
        let y = [0, 1, 2];
        let cm = confusion_matrix(&y, &y, 3).unwrap();
        for c in 0..3 {
            let o = cm.ovr(c);
            assert_eq!(o.false_pos, 0);
            assert_eq!(o.false_neg, 0);
        }
    }

    #[test]
    fn precision_recall_hand_check() {
        let cm = fixture();
        assert!((precision(&cm, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(recall(&cm, 1), 1.0);
        assert_eq!(accuracy(&cm), 0.8);
    }

    #[test]
    fn constant_predictor_has_recall_one() {
        // Predicting only class c makes recall(c) = 1 by definition.
        let y_true = [0, 1, 2, 1, 0, 2, 2];
        let y_pred = [1; 7];
        let cm = confusion_matrix(&y_true, &y_pred, 3).unwrap();
        assert_eq!(recall(&cm, 1), 1.0);
        assert!(precision(&cm, 1) < 0.5);
    }

    #[test]
    fn all_off_diagonal_accuracy_zero() {
        let cm = confusion_matrix(&[0, 1], &[1, 0], 2).unwrap();
        assert_eq!(accuracy(&cm), 0.0);
    }

    #[test]
    fn per_class_metrics_modes() {
        let cm = fixture();
        let overall = per_class_metrics(&cm);
        assert_eq!(overall.accuracy, vec![0.8, 0.8, 0.8]);
        let ovr = per_class_metrics_with(&cm, AccuracyMode::OneVsRest);
        // Class 0: TP=1 TN=3 over 5.
        assert!((ovr.accuracy[0] - 0.8).abs() < 1e-15);
        // Class 2: TP=1 TN=4 over 5.
        assert!((ovr.accuracy[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_classifier_metrics_all_one() {
        let y = [0, 1, 0, 1];
        let cm = confusion_matrix(&y, &y, 2).unwrap();
        let pm = per_class_metrics(&cm);
        assert!(pm.precision.iter().all(|&x| x == 1.0));
        assert!(pm.recall.iter().all(|&x| x == 1.0));
        assert!(pm.accuracy.iter().all(|&x| x == 1.0));
        let w = learner_weights(&pm);
        assert!(w.as_slice().iter().all(|&x| x == 3.0));
    }

    #[test]
    fn weights_follow_indicator_sums() {
        let pm = PerClassMetrics {
            precision: vec![0.8440, 0.5000],
            recall: vec![0.9200, 0.6800],
            accuracy: vec![0.5119, 0.5119],
        };
        let w = learner_weights(&pm);
        assert_eq!(w.as_slice()[0], 0.8440 + 0.9200 + 0.5119);
        assert_eq!(w.as_slice()[0], 2.2759);
        assert_eq!(w.as_slice()[1], 0.5000 + 0.6800 + 0.5119);
    }

    #[test]
    fn zero_metrics_zero_weight() {
        let pm = PerClassMetrics {
            precision: vec![0.0],
            recall: vec![0.0],
            accuracy: vec![0.0],
        };
        assert_eq!(learner_weights(&pm).as_slice(), &[0.0]);
    }

    #[test]
    fn weight_vector_rejects_out_of_range() {
        assert!(WeightVector::new(vec![3.5]).is_err());
        assert!(WeightVector::new(vec![-0.1]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::new(vec![0.0, 3.0]).is_ok());
    }
}
