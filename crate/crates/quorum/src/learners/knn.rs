//! k-nearest neighbours with vote-fraction scores.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;
use crate::math;

/// A lazy learner: the "parameters" are the training set itself.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    /// Training features, row-major.
    pub features: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub labels: Vec<usize>,
    pub k: usize,
    pub m: usize,
}

pub(crate) fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<KnnModel> {
    let k = spec.param_usize("k");
    if k > train.n_rows() {
        return Err(Error::BadHyperparameter {
            learner: "knn",
            message: format!("k={k} exceeds the {} training rows", train.n_rows()),
        });
    }
    let mut features = Vec::with_capacity(train.n_rows() * train.n_features());
    for i in 0..train.n_rows() {
        features.extend_from_slice(train.row(i));
    }
    Ok(KnnModel {
        features,
        rows: train.n_rows(),
        cols: train.n_features(),
        labels: train.labels().to_vec(),
        k,
        m: train.n_classes(),
    })
}

impl KnnModel {
    fn train_row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    /// Fraction of the k nearest training rows voting for each class.
    /// Distance ties are broken towards the lower training-row index, so
    /// the neighbour set is unambiguous.
    pub(crate) fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut order: Vec<(f64, usize)> = (0..self.rows)
            .map(|i| (math::squared_distance(self.train_row(i), x), i))
            .collect();
        order.sort_unstable_by(|a, b| {
            a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
        });
        let mut votes = vec![0usize; self.m];
        for &(_, i) in order.iter().take(self.k) {
            votes[self.labels[i]] += 1;
        }
        votes.iter().map(|&v| v as f64 / self.k as f64).collect()
    }
}
