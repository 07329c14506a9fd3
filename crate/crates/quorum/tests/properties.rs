//! Property tests for the dataset, metrics and combiner invariants.

use proptest::prelude::*;

use quorum::{
    aggregate, confusion_matrix, learner_weights, ovr_accuracy, per_class_metrics, split,
    standardize, Dataset, RatingRow, Rounding, SplitMode, WeightVector,
};

/// A labelled dataset whose classes all have at least two members, so any
/// stratified split is feasible.
fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (2usize..=4, 1usize..=4)
        .prop_flat_map(|(m, d)| {
            let class_counts = prop::collection::vec(2usize..=12, m);
            (Just(m), Just(d), class_counts)
        })
        .prop_flat_map(|(_m, d, counts)| {
            let n: usize = counts.iter().sum();
            let features = prop::collection::vec(-1000.0f64..1000.0, n * d);
            (Just(d), Just(counts), features)
        })
        .prop_map(|(d, counts, features)| {
            let mut labels = Vec::new();
            for (c, &k) in counts.iter().enumerate() {
                labels.extend(std::iter::repeat(c).take(k));
            }
            let rows = labels
                .iter()
                .enumerate()
                .map(|(i, _)| features[i * d..(i + 1) * d].to_vec())
                .collect();
            Dataset::from_rows(rows, labels).unwrap()
        })
}

/// Ratings/weights on a dyadic grid (multiples of 1/16). Products and sums
/// of a handful of such values are exact in f64, so argmax comparisons are
/// free of reassociation noise.
fn grid_committee() -> impl Strategy<Value = (Vec<RatingRow>, Vec<WeightVector>)> {
    (1usize..=5, 2usize..=6).prop_flat_map(|(k, m)| {
        let ratings = prop::collection::vec(prop::collection::vec(0u8..=16, m), k);
        let weights = prop::collection::vec(prop::collection::vec(0u8..=16, m), k);
        (ratings, weights).prop_map(|(rs, ws)| {
            let rows = rs
                .into_iter()
                .map(|r| RatingRow::new(r.into_iter().map(|v| v as f64 / 16.0).collect()).unwrap())
                .collect();
            let weights = ws
                .into_iter()
                .map(|w| {
                    WeightVector::new(w.into_iter().map(|v| v as f64 / 16.0).collect()).unwrap()
                })
                .collect();
            (rows, weights)
        })
    })
}

/// The combiner re-implemented as naively as possible: score every class
/// with explicit loops, then scan for the first maximum.
fn naive_combiner(ratings: &[RatingRow], weights: &[WeightVector]) -> usize {
    let m = ratings[0].len();
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for j in 0..m {
        let mut score = 0.0;
        for k in 0..ratings.len() {
            score += ratings[k].as_slice()[j] * weights[k].as_slice()[j];
        }
        if score > best_score {
            best_score = score;
            best = j;
        }
    }
    best
}

proptest! {
    #[test]
    fn split_partitions_every_class(ds in dataset_strategy(), frac in 0.2f64..0.9, seed in any::<u64>()) {
        let pair = split(&ds, frac, seed, SplitMode::Stratified, Rounding::HalfUp).unwrap();
        prop_assert_eq!(pair.train.n_rows() + pair.test.n_rows(), ds.n_rows());
        let count = |set: &Dataset, c: usize| set.labels().iter().filter(|&&l| l == c).count();
        for c in 0..ds.n_classes() {
            let (tr, te) = (count(&pair.train, c), count(&pair.test, c));
            prop_assert_eq!(tr + te, count(&ds, c));
            prop_assert!(tr >= 1, "class {} missing from train", c);
            prop_assert!(te >= 1, "class {} missing from test", c);
        }
    }

    #[test]
    fn split_is_deterministic(ds in dataset_strategy(), seed in any::<u64>()) {
        let a = split(&ds, 0.8, seed, SplitMode::Stratified, Rounding::HalfUp).unwrap();
        let b = split(&ds, 0.8, seed, SplitMode::Stratified, Rounding::HalfUp).unwrap();
        prop_assert_eq!(a.train, b.train);
        prop_assert_eq!(a.test, b.test);
    }

    #[test]
    fn aggregate_matches_naive_combiner((ratings, weights) in grid_committee()) {
        prop_assert_eq!(aggregate(&ratings, &weights).unwrap(), naive_combiner(&ratings, &weights));
    }

    #[test]
    fn aggregate_is_member_order_invariant((ratings, weights) in grid_committee(), rot in 0usize..5) {
        let baseline = aggregate(&ratings, &weights).unwrap();
        let k = ratings.len();
        let rot = rot % k;
        let r2: Vec<RatingRow> = ratings.iter().cycle().skip(rot).take(k).cloned().collect();
        let w2: Vec<WeightVector> = weights.iter().cycle().skip(rot).take(k).cloned().collect();
        prop_assert_eq!(aggregate(&r2, &w2).unwrap(), baseline);
    }

    #[test]
    fn zero_weight_member_never_changes_outcome((ratings, weights) in grid_committee(), extra in prop::collection::vec(0u8..=16, 6)) {
        let baseline = aggregate(&ratings, &weights).unwrap();
        let m = ratings[0].len();
        let mut ratings = ratings;
        let mut weights = weights;
        ratings.push(RatingRow::new(extra[..m].iter().map(|&v| v as f64 / 16.0).collect()).unwrap());
        weights.push(WeightVector::new(vec![0.0; m]).unwrap());
        prop_assert_eq!(aggregate(&ratings, &weights).unwrap(), baseline);
    }

    #[test]
    fn common_weight_scaling_preserves_argmax((ratings, weights) in grid_committee(), numer in 1u8..=8) {
        // Scale by numer/4 <= 2 so scaled weights stay dyadic and within [0,3]
        // once the originals are halved.
        let halved: Vec<WeightVector> = weights
            .iter()
            .map(|w| WeightVector::new(w.as_slice().iter().map(|x| x / 2.0).collect()).unwrap())
            .collect();
        let scaled: Vec<WeightVector> = halved
            .iter()
            .map(|w| {
                WeightVector::new(
                    w.as_slice().iter().map(|x| x * (numer as f64 / 4.0)).collect(),
                )
                .unwrap()
            })
            .collect();
        prop_assert_eq!(
            aggregate(&ratings, &halved).unwrap(),
            aggregate(&ratings, &scaled).unwrap()
        );
    }

    #[test]
    fn unanimous_onehot_vote_wins(k in 1usize..=5, m in 2usize..=6, c_raw in 0usize..6, w in prop::collection::vec(prop::collection::vec(0u8..=16, 6), 5)) {
        let c = c_raw % m;
        let mut ratings = Vec::new();
        let mut weights = Vec::new();
        let mut any_positive = false;
        for member in 0..k {
            let mut row = vec![0.0; m];
            row[c] = 1.0;
            ratings.push(RatingRow::new(row).unwrap());
            let wv: Vec<f64> = w[member][..m].iter().map(|&v| v as f64 / 16.0).collect();
            any_positive |= wv[c] > 0.0;
            weights.push(WeightVector::new(wv).unwrap());
        }
        prop_assume!(any_positive);
        prop_assert_eq!(aggregate(&ratings, &weights).unwrap(), c);
    }

    #[test]
    fn dominant_class_wins((ratings, weights) in grid_committee()) {
        // If some class's per-member products dominate every rival's, with a
        // strict edge against each rival, the combiner must pick it.
        let k = ratings.len();
        let m = ratings[0].len();
        let product = |kk: usize, j: usize| ratings[kk].as_slice()[j] * weights[kk].as_slice()[j];
        'class: for j in 0..m {
            for rival in 0..m {
                if rival == j {
                    continue;
                }
                let all_ge = (0..k).all(|kk| product(kk, j) >= product(kk, rival));
                let some_gt = (0..k).any(|kk| product(kk, j) > product(kk, rival));
                if !(all_ge && some_gt) {
                    continue 'class;
                }
            }
            prop_assert_eq!(aggregate(&ratings, &weights).unwrap(), j);
            break;
        }
    }

    #[test]
    fn weights_are_bounded_sums(y in prop::collection::vec(0usize..3, 5..60), preds in prop::collection::vec(0usize..3, 60)) {
        let n = y.len();
        let mut y = y;
        // Force every class to appear so the fixture is a legal labelling.
        y[0] = 0;
        if n > 1 { y[1] = 1; }
        if n > 2 { y[2] = 2; }
        let preds = &preds[..n];
        let cm = confusion_matrix(&y, preds, 3).unwrap();
        let pm = per_class_metrics(&cm);
        let w = learner_weights(&pm);
        for (j, &wj) in w.as_slice().iter().enumerate() {
            prop_assert!((0.0..=3.0).contains(&wj));
            prop_assert_eq!(wj, pm.precision[j] + pm.recall[j] + pm.accuracy[j]);
        }
    }

    #[test]
    fn adding_a_correct_prediction_never_hurts(seed in any::<u64>()) {
        // Deterministic pseudo-random label vectors from the seed.
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        let n = 10 + next() % 40;
        let m = 3;
        let mut y_true: Vec<usize> = (0..n).map(|_| next() % m).collect();
        y_true[0] = 0;
        y_true[1] = 1;
        y_true[2] = 2;
        let y_pred: Vec<usize> = (0..n).map(|_| next() % m).collect();
        let c = next() % m;
        let before = confusion_matrix(&y_true, &y_pred, m).unwrap();
        let mut y_true2 = y_true.clone();
        let mut y_pred2 = y_pred.clone();
        y_true2.push(c);
        y_pred2.push(c);
        let after = confusion_matrix(&y_true2, &y_pred2, m).unwrap();
        prop_assert!(quorum::precision(&after, c) >= quorum::precision(&before, c));
        prop_assert!(quorum::recall(&after, c) >= quorum::recall(&before, c));
        prop_assert!(quorum::accuracy(&after) >= quorum::accuracy(&before));
    }

    #[test]
    fn binary_ovr_accuracy_equals_overall(y in prop::collection::vec(0usize..2, 4..40), p in prop::collection::vec(0usize..2, 40)) {
        let mut y = y;
        y[0] = 0;
        y[1] = 1;
        let n = y.len();
        let cm = confusion_matrix(&y, &p[..n], 2).unwrap();
        for c in 0..2 {
            prop_assert_eq!(ovr_accuracy(&cm, c), quorum::accuracy(&cm));
        }
    }

    #[test]
    fn standardize_is_idempotent(ds in dataset_strategy()) {
        let (once, _, _) = standardize(&ds, &ds);
        let (twice, _, _) = standardize(&once, &once);
        for i in 0..ds.n_rows() {
            for (a, b) in once.row(i).iter().zip(twice.row(i)) {
                prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
            }
        }
    }
}
