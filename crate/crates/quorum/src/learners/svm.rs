//! One-vs-rest linear SVMs trained by full-batch subgradient descent on
//! the L2-regularized hinge loss.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::learners::LearnerSpec;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    /// m×d weight matrix, row-major; row c is the "class c vs rest"
    /// separator.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub d: usize,
    pub m: usize,
}

pub(crate) fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<SvmModel> {
    let lambda = spec.param("lambda");
    let lr = spec.param("learning_rate");
    let max_iters = spec.param_usize("max_iters");
    let (n, d, m) = (train.n_rows(), train.n_features(), train.n_classes());
    let inv_n = 1.0 / n as f64;

    let mut weights = vec![0.0; m * d];
    let mut bias = vec![0.0; m];
    for c in 0..m {
        let w = &mut weights[c * d..(c + 1) * d];
        let b = &mut bias[c];
        for _ in 0..max_iters {
            // Subgradient of (lambda/2)|w|^2 + mean hinge(1 - y f(x)).
            let mut gw = vec![0.0; d];
            let mut gb = 0.0;
            for (wj, gwj) in w.iter().zip(gw.iter_mut()) {
                *gwj = lambda * wj;
            }
            for i in 0..n {
                let x = train.row(i);
                let y = if train.label(i) == c { 1.0 } else { -1.0 };
                if y * (math::dot(w, x) + *b) < 1.0 {
                    for (gwj, xj) in gw.iter_mut().zip(x) {
                        *gwj -= y * xj * inv_n;
                    }
                    gb -= y * inv_n;
                }
            }
            for (wj, gwj) in w.iter_mut().zip(&gw) {
                *wj -= lr * gwj;
            }
            *b -= lr * gb;
        }
    }
    Ok(SvmModel { weights, bias, d, m })
}

impl SvmModel {
    /// Per-class margins rescaled to [0, 1] by the instance's min-max
    /// range; all 0.5 when every margin ties.
    pub(crate) fn scores(&self, x: &[f64]) -> Vec<f64> {
        let margins: Vec<f64> = (0..self.m)
            .map(|c| math::dot(&self.weights[c * self.d..(c + 1) * self.d], x) + self.bias[c])
            .collect();
        let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let max = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max > min {
            margins.iter().map(|g| (g - min) / (max - min)).collect()
        } else {
            vec![0.5; self.m]
        }
    }
}
