//! Multinomial (softmax) logistic regression trained by full-batch
//! gradient descent.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::learners::LearnerSpec;
use crate::math;

/// Softmax regression parameters: one weight row and bias per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    /// m×d weight matrix, row-major (row c scores class c).
    pub weights: Vec<f64>,
    /// One bias per class.
    pub bias: Vec<f64>,
    pub d: usize,
    pub m: usize,
}

fn logits(w: &[f64], b: &[f64], x: &[f64], m: usize, d: usize) -> Vec<f64> {
    (0..m).map(|c| math::dot(&w[c * d..(c + 1) * d], x) + b[c]).collect()
}

/// Mean cross-entropy loss with an L2 penalty on the weights (biases are
/// not penalized), plus its gradient in `(weights, biases)` order.
///
/// Public so the gradient can be checked against finite differences.
/// Panics if `w`/`b` don't match the dataset's m×d shape.
pub fn loss_and_grad(
    w: &[f64],
    b: &[f64],
    train: &Dataset,
    lambda: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let (n, d, m) = (train.n_rows(), train.n_features(), train.n_classes());
    assert_eq!(w.len(), m * d);
    assert_eq!(b.len(), m);
    let inv_n = 1.0 / n as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; m * d];
    let mut gb = vec![0.0; m];
    for i in 0..n {
        let x = train.row(i);
        let y = train.label(i);
        let mut p = logits(w, b, x, m, d);
        math::softmax_inplace(&mut p);
        loss -= math::ln(p[y].max(1e-300)) * inv_n;
        for c in 0..m {
            let coef = (p[c] - if c == y { 1.0 } else { 0.0 }) * inv_n;
            for (gwj, xj) in gw[c * d..(c + 1) * d].iter_mut().zip(x) {
                *gwj += coef * xj;
            }
            gb[c] += coef;
        }
    }
    for (gwj, wj) in gw.iter_mut().zip(w) {
        *gwj += lambda * wj;
        loss += 0.5 * lambda * wj * wj;
    }
    (loss, gw, gb)
}

pub(crate) fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<LogRegModel> {
    let lambda = spec.param("lambda");
    let lr = spec.param("learning_rate");
    let max_iters = spec.param_usize("max_iters");
    let tol = spec.param("tolerance");
    let (d, m) = (train.n_features(), train.n_classes());
    let mut w = vec![0.0; m * d];
    let mut b = vec![0.0; m];
    for _ in 0..max_iters {
        let (_, gw, gb) = loss_and_grad(&w, &b, train, lambda);
        let norm2: f64 = gw.iter().chain(&gb).map(|g| g * g).sum();
        if math::sqrt(norm2) <= tol {
            break;
        }
        for (wj, gwj) in w.iter_mut().zip(&gw) {
            *wj -= lr * gwj;
        }
        for (bc, gbc) in b.iter_mut().zip(&gb) {
            *bc -= lr * gbc;
        }
    }
    Ok(LogRegModel { weights: w, bias: b, d, m })
}

impl LogRegModel {
    /// Softmax probabilities; entries in [0, 1] summing to 1.
    pub(crate) fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut p = logits(&self.weights, &self.bias, x, self.m, self.d);
        math::softmax_inplace(&mut p);
        p
    }
}
