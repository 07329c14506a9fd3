//! Random forest of CART trees: Gini splits, bootstrap resampling and a
//! uniform random feature subset at every split.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::learners::LearnerSpec;
use crate::math;
use crate::rng;

/// One tree node. Children are indices into the owning tree's node vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Class distribution of the training rows that reached this leaf.
    Leaf { dist: Vec<f64> },
    /// Send `x[feature] <= threshold` left, everything else right.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// A single CART tree; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CartTree {
    pub nodes: Vec<Node>,
}

impl CartTree {
    /// Class distribution of the leaf `x` falls into.
    pub fn leaf_dist(&self, x: &[f64]) -> &[f64] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { dist } => return dist,
                Node::Split { feature, threshold, left, right } => {
                    id = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Majority class of the reached leaf, ties to the smaller index.
    pub fn predict(&self, x: &[f64]) -> usize {
        math::argmax(self.leaf_dist(x))
    }
}

/// Bagged CART trees voting by majority.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<CartTree>,
    pub d: usize,
    pub m: usize,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

struct Grower<'a> {
    train: &'a Dataset,
    max_depth: usize,
    min_split: usize,
    features_try: usize,
    m: usize,
}

impl Grower<'_> {
    /// Distinct feature indices, `features_try` of them, in ascending order
    /// so the split search visits them deterministically.
    fn sample_features(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let d = self.train.n_features();
        let mut pool: Vec<usize> = (0..d).collect();
        for i in 0..self.features_try {
            let j = rng.gen_range(i..d);
            pool.swap(i, j);
        }
        pool.truncate(self.features_try);
        pool.sort_unstable();
        pool
    }

    /// Grow the subtree over the training rows `idx`, append its nodes to
    /// `nodes`, and return the subtree root's index.
    fn grow(&self, idx: &[usize], depth: usize, rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>) -> usize {
        let mut counts = vec![0usize; self.m];
        for &i in idx {
            counts[self.train.label(i)] += 1;
        }
        let n = idx.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() == 1;
        let depth_capped = self.max_depth > 0 && depth >= self.max_depth;
        if pure || n < self.min_split || depth_capped {
            return push_leaf(nodes, &counts, n);
        }

        let parent = gini(&counts, n);
        let mut best: Option<(f64, usize, f64)> = None;
        for f in self.sample_features(rng) {
            let mut vals: Vec<(f64, usize)> =
                idx.iter().map(|&i| (self.train.row(i)[f], self.train.label(i))).collect();
            vals.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
            let mut left = vec![0usize; self.m];
            let mut right = counts.clone();
            for t in 0..n - 1 {
                left[vals[t].1] += 1;
                right[vals[t].1] -= 1;
                if vals[t].0 < vals[t + 1].0 {
                    let nl = t + 1;
                    let nr = n - nl;
                    let w = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                    if best.map_or(true, |(b, _, _)| w < b) {
                        best = Some((w, f, vals[t].0));
                    }
                }
            }
        }

        match best {
            Some((impurity, feature, threshold)) if impurity < parent - 1e-12 => {
                let (li, ri): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.train.row(i)[feature] <= threshold);
                let id = nodes.len();
                // Reserve the parent slot so children may be appended below it.
                nodes.push(Node::Leaf { dist: Vec::new() });
                let left = self.grow(&li, depth + 1, rng, nodes);
                let right = self.grow(&ri, depth + 1, rng, nodes);
                nodes[id] = Node::Split { feature, threshold, left, right };
                id
            }
            _ => push_leaf(nodes, &counts, n),
        }
    }
}

fn push_leaf(nodes: &mut Vec<Node>, counts: &[usize], n: usize) -> usize {
    let dist = counts.iter().map(|&c| c as f64 / n as f64).collect();
    nodes.push(Node::Leaf { dist });
    nodes.len() - 1
}

pub(crate) fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<ForestModel> {
    let n = train.n_rows();
    let d = train.n_features();
    let trees_n = spec.param_usize("trees");
    let features_param = spec.param_usize("features_per_split");
    let features_try = if features_param == 0 {
        (math::ceil(math::sqrt(d as f64)) as usize).clamp(1, d)
    } else {
        features_param.min(d)
    };
    let bootstrap = spec.param("bootstrap") != 0.0;
    let grower = Grower {
        train,
        max_depth: spec.param_usize("max_depth"),
        min_split: spec.param_usize("min_split"),
        features_try,
        m: train.n_classes(),
    };
    let mut trees = Vec::with_capacity(trees_n);
    for t in 0..trees_n {
        let mut r = rng::stream(spec.seed(), rng::STREAM_TREE_BASE + t as u64);
        let idx: Vec<usize> = if bootstrap {
            (0..n).map(|_| r.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let mut nodes = Vec::new();
        grower.grow(&idx, 0, &mut r, &mut nodes);
        trees.push(CartTree { nodes });
    }
    Ok(ForestModel { trees, d, m: train.n_classes() })
}

impl ForestModel {
    /// Fraction of trees voting for each class.
    pub(crate) fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0usize; self.m];
        for tree in &self.trees {
            votes[tree.predict(x)] += 1;
        }
        votes.iter().map(|&v| v as f64 / self.trees.len() as f64).collect()
    }
}
