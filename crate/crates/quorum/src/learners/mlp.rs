//! Single-hidden-layer feedforward network trained by full-batch
//! backpropagation: sigmoid hidden units, softmax output, fixed step.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::learners::LearnerSpec;
use crate::math;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    /// hidden×d first-layer weights, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// m×hidden output weights, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub hidden: usize,
    pub d: usize,
    pub m: usize,
}

fn forward(model: &MlpModel, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let MlpModel { w1, b1, w2, b2, hidden, d, m } = model;
    let a1: Vec<f64> =
        (0..*hidden).map(|j| math::sigmoid(math::dot(&w1[j * d..(j + 1) * d], x) + b1[j])).collect();
    let mut p: Vec<f64> =
        (0..*m).map(|c| math::dot(&w2[c * hidden..(c + 1) * hidden], &a1) + b2[c]).collect();
    math::softmax_inplace(&mut p);
    (a1, p)
}

pub(crate) fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<MlpModel> {
    let hidden = spec.param_usize("hidden");
    let lr = spec.param("learning_rate");
    let max_iters = spec.param_usize("max_iters");
    let (n, d, m) = (train.n_rows(), train.n_features(), train.n_classes());

    let mut r = rng::stream(spec.seed(), rng::STREAM_MLP_INIT);
    let mut model = MlpModel {
        w1: (0..hidden * d).map(|_| r.gen::<f64>() - 0.5).collect(),
        b1: vec![0.0; hidden],
        w2: (0..m * hidden).map(|_| r.gen::<f64>() - 0.5).collect(),
        b2: vec![0.0; m],
        hidden,
        d,
        m,
    };

    let inv_n = 1.0 / n as f64;
    let mut gw1 = vec![0.0; hidden * d];
    let mut gb1 = vec![0.0; hidden];
    let mut gw2 = vec![0.0; m * hidden];
    let mut gb2 = vec![0.0; m];
    for _ in 0..max_iters {
        gw1.iter_mut().for_each(|g| *g = 0.0);
        gb1.iter_mut().for_each(|g| *g = 0.0);
        gw2.iter_mut().for_each(|g| *g = 0.0);
        gb2.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..n {
            let x = train.row(i);
            let y = train.label(i);
            let (a1, p) = forward(&model, x);
            for c in 0..m {
                let d2 = (p[c] - if c == y { 1.0 } else { 0.0 }) * inv_n;
                for (g, a) in gw2[c * hidden..(c + 1) * hidden].iter_mut().zip(&a1) {
                    *g += d2 * a;
                }
                gb2[c] += d2;
            }
            for j in 0..hidden {
                let upstream: f64 = (0..m)
                    .map(|c| {
                        model.w2[c * hidden + j] * (p[c] - if c == y { 1.0 } else { 0.0 }) * inv_n
                    })
                    .sum();
                let d1 = upstream * a1[j] * (1.0 - a1[j]);
                for (g, xv) in gw1[j * d..(j + 1) * d].iter_mut().zip(x) {
                    *g += d1 * xv;
                }
                gb1[j] += d1;
            }
        }
        for (w, g) in model.w1.iter_mut().zip(&gw1) {
            *w -= lr * g;
        }
        for (b, g) in model.b1.iter_mut().zip(&gb1) {
            *b -= lr * g;
        }
        for (w, g) in model.w2.iter_mut().zip(&gw2) {
            *w -= lr * g;
        }
        for (b, g) in model.b2.iter_mut().zip(&gb2) {
            *b -= lr * g;
        }
    }
    Ok(model)
}

impl MlpModel {
    /// Softmax output probabilities.
    pub(crate) fn scores(&self, x: &[f64]) -> Vec<f64> {
        forward(self, x).1
    }
}
