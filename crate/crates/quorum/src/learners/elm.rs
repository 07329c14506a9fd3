//! Extreme learning machine: a fixed random sigmoid hidden layer whose
//! output weights are the ridge least-squares fit to one-hot targets.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;
use crate::math;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    /// hidden×d input weights, row-major, drawn uniform in [-1, 1].
    pub w: Vec<f64>,
    /// One bias per hidden node, drawn uniform in [-1, 1] after `w`.
    pub b: Vec<f64>,
    /// hidden×m output weights, row-major.
    pub beta: Vec<f64>,
    pub hidden: usize,
    pub d: usize,
    pub m: usize,
}

/// In-place lower-triangular Cholesky factor of a symmetric matrix.
/// Fails when a pivot is non-positive, i.e. the system is not positive
/// definite.
fn cholesky(a: &mut [f64], h: usize) -> Result<()> {
    for j in 0..h {
        let mut diag = a[j * h + j];
        for k in 0..j {
            diag -= a[j * h + k] * a[j * h + k];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(Error::SingularSystem);
        }
        let l = math::sqrt(diag);
        a[j * h + j] = l;
        for i in j + 1..h {
            let mut v = a[i * h + j];
            for k in 0..j {
                v -= a[i * h + k] * a[j * h + k];
            }
            a[i * h + j] = v / l;
        }
    }
    Ok(())
}

/// Solve L Lᵀ x = b in place given the lower factor `l`.
fn cholesky_solve(l: &[f64], x: &mut [f64], h: usize) {
    for i in 0..h {
        let mut v = x[i];
        for k in 0..i {
            v -= l[i * h + k] * x[k];
        }
        x[i] = v / l[i * h + i];
    }
    for i in (0..h).rev() {
        let mut v = x[i];
        for k in i + 1..h {
            v -= l[k * h + i] * x[k];
        }
        x[i] = v / l[i * h + i];
    }
}

fn hidden_activations(w: &[f64], b: &[f64], x: &[f64], h: usize, d: usize) -> Vec<f64> {
    (0..h).map(|j| math::sigmoid(math::dot(&w[j * d..(j + 1) * d], x) + b[j])).collect()
}

pub(crate) fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<ElmModel> {
    let h = spec.param_usize("hidden");
    let ridge = spec.param("ridge");
    let (n, d, m) = (train.n_rows(), train.n_features(), train.n_classes());

    let mut r = rng::stream(spec.seed(), rng::STREAM_ELM_INIT);
    let w: Vec<f64> = (0..h * d).map(|_| r.gen::<f64>() * 2.0 - 1.0).collect();
    let b: Vec<f64> = (0..h).map(|_| r.gen::<f64>() * 2.0 - 1.0).collect();

    let mut hmat = vec![0.0; n * h];
    for i in 0..n {
        hmat[i * h..(i + 1) * h].copy_from_slice(&hidden_activations(&w, &b, train.row(i), h, d));
    }

    // Normal equations: (HᵀH + ridge·I) β = HᵀT, T the one-hot targets.
    let mut a = vec![0.0; h * h];
    for i in 0..n {
        let hi = &hmat[i * h..(i + 1) * h];
        for j in 0..h {
            let hij = hi[j];
            for k in j..h {
                a[j * h + k] += hij * hi[k];
            }
        }
    }
    for j in 0..h {
        for k in j + 1..h {
            a[k * h + j] = a[j * h + k];
        }
        a[j * h + j] += ridge;
    }
    let mut rhs = vec![0.0; h * m];
    for i in 0..n {
        let c = train.label(i);
        for j in 0..h {
            rhs[j * m + c] += hmat[i * h + j];
        }
    }

    cholesky(&mut a, h)?;
    let mut beta = vec![0.0; h * m];
    let mut col = vec![0.0; h];
    for c in 0..m {
        for j in 0..h {
            col[j] = rhs[j * m + c];
        }
        cholesky_solve(&a, &mut col, h);
        for j in 0..h {
            beta[j * m + c] = col[j];
        }
    }
    Ok(ElmModel { w, b, beta, hidden: h, d, m })
}

impl ElmModel {
    /// Raw least-squares outputs clamped to [0, 1] and renormalized to sum
    /// 1; a uniform distribution if everything clamps to zero.
    pub(crate) fn scores(&self, x: &[f64]) -> Vec<f64> {
        let act = hidden_activations(&self.w, &self.b, x, self.hidden, self.d);
        let mut out = vec![0.0; self.m];
        for j in 0..self.hidden {
            let aj = act[j];
            for c in 0..self.m {
                out[c] += aj * self.beta[j * self.m + c];
            }
        }
        let mut sum = 0.0;
        for o in out.iter_mut() {
            *o = o.clamp(0.0, 1.0);
            sum += *o;
        }
        if sum == 0.0 {
            vec![1.0 / self.m as f64; self.m]
        } else {
            for o in out.iter_mut() {
                *o /= sum;
            }
            out
        }
    }
}
