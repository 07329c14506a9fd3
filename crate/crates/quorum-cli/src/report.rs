//! Experiment results and their renderings (CSV, markdown, JSON).
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! parsing a CSV report back yields bit-identical values.

use anyhow::{bail, Context, Result};
use serde::Serialize;

/// One committee member's showing on a single (dataset, seed) cell.
#[derive(Debug, Clone, Serialize)]
pub struct MemberResult {
    pub learner: String,
    pub test_accuracy: f64,
    /// Per-class values from the weighting pass, indexed by class.
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub weights: Vec<f64>,
    pub predictions: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedReport {
    pub seed: u64,
    pub members: Vec<MemberResult>,
    /// Present iff the committee fit succeeded.
    pub ensemble_accuracy: Option<f64>,
    pub ensemble_predictions: Vec<usize>,
    pub truth: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LearnerAggregate {
    pub learner: String,
    pub mean: f64,
    pub std: f64,
    pub best: bool,
    pub worst: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetReport {
    pub name: String,
    pub n_train: usize,
    pub n_test: usize,
    pub n_classes: usize,
    /// Set when the dataset could not be processed at all.
    pub failed: Option<String>,
    pub seeds: Vec<SeedReport>,
    pub aggregates: Vec<LearnerAggregate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub datasets: Vec<DatasetReport>,
}

impl ExperimentReport {
    pub fn all_succeeded(&self) -> bool {
        !self.datasets.is_empty() && self.datasets.iter().all(|d| d.failed.is_none())
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Accuracy series per learner (union over seeds, first-appearance order),
/// with `ensemble` last when any seed produced one.
pub fn compute_aggregates(seeds: &[SeedReport]) -> Vec<LearnerAggregate> {
    let mut order: Vec<String> = Vec::new();
    let mut series: Vec<Vec<f64>> = Vec::new();
    let push = |name: &str, value: f64, order: &mut Vec<String>, series: &mut Vec<Vec<f64>>| {
        match order.iter().position(|n| n == name) {
            Some(i) => series[i].push(value),
            None => {
                order.push(name.to_string());
                series.push(vec![value]);
            }
        }
    };
    for seed in seeds {
        for member in &seed.members {
            push(&member.learner, member.test_accuracy, &mut order, &mut series);
        }
        if let Some(acc) = seed.ensemble_accuracy {
            push("ensemble", acc, &mut order, &mut series);
        }
    }
    let mut aggregates: Vec<LearnerAggregate> = order
        .into_iter()
        .zip(&series)
        .map(|(learner, values)| {
            let (mean, std) = mean_std(values);
            LearnerAggregate { learner, mean, std, best: false, worst: false }
        })
        .collect();
    if !aggregates.is_empty() {
        let best = aggregates.iter().map(|a| a.mean).fold(f64::NEG_INFINITY, f64::max);
        let worst = aggregates.iter().map(|a| a.mean).fold(f64::INFINITY, f64::min);
        for a in &mut aggregates {
            a.best = a.mean == best;
            a.worst = a.mean == worst;
        }
    }
    aggregates
}

/// Long-form CSV: one row per (dataset, seed, learner) accuracy, with the
/// committee listed as learner `ensemble`.
pub fn format_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("dataset,seed,learner,accuracy\n");
    for ds in &report.datasets {
        for seed in &ds.seeds {
            for member in &seed.members {
                out.push_str(&format!(
                    "{},{},{},{:?}\n",
                    ds.name, seed.seed, member.learner, member.test_accuracy
                ));
            }
            if let Some(acc) = seed.ensemble_accuracy {
                out.push_str(&format!("{},{},ensemble,{:?}\n", ds.name, seed.seed, acc));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub dataset: String,
    pub seed: u64,
    pub learner: String,
    pub accuracy: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("dataset,seed,learner,accuracy") => {}
        other => bail!("unexpected report header {other:?}"),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            bail!("row {}: expected 4 fields, got {}", i + 2, fields.len());
        }
        rows.push(CsvRow {
            dataset: fields[0].to_string(),
            seed: fields[1].parse().with_context(|| format!("row {}: bad seed", i + 2))?,
            learner: fields[2].to_string(),
            accuracy: fields[3]
                .parse()
                .with_context(|| format!("row {}: bad accuracy", i + 2))?,
        });
    }
    Ok(rows)
}

/// Summary table, one row per dataset, `mean ± std` cells; the best mean
/// in each row is bold (ties all bold).
pub fn format_markdown(report: &ExperimentReport) -> String {
    let mut columns: Vec<String> = Vec::new();
    for ds in &report.datasets {
        for agg in &ds.aggregates {
            if !columns.contains(&agg.learner) {
                columns.push(agg.learner.clone());
            }
        }
    }
    // Keep the committee in the last column regardless of fit order.
    if let Some(i) = columns.iter().position(|c| c == "ensemble") {
        let c = columns.remove(i);
        columns.push(c);
    }
    let mut out = String::from("# Test accuracy (mean \u{b1} std over seeds)\n\n");
    out.push_str("| dataset |");
    for c in &columns {
        out.push_str(&format!(" {c} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(columns.len()));
    out.push('\n');
    for ds in &report.datasets {
        out.push_str(&format!("| {} |", ds.name));
        if let Some(reason) = &ds.failed {
            let mut cells = vec![String::new(); columns.len()];
            if let Some(first) = cells.first_mut() {
                *first = format!("failed: {reason}");
            }
            for cell in cells {
                out.push_str(&format!(" {cell} |"));
            }
            out.push('\n');
            continue;
        }
        for c in &columns {
            match ds.aggregates.iter().find(|a| &a.learner == c) {
                Some(a) => {
                    let cell = format!("{:.4} \u{b1} {:.4}", a.mean, a.std);
                    if a.best {
                        out.push_str(&format!(" **{cell}** |"));
                    } else {
                        out.push_str(&format!(" {cell} |"));
                    }
                }
                None => out.push_str("  |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn format_json(report: &ExperimentReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

/// Per-seed weighting detail: `learner,class,precision,recall,accuracy,weight`.
pub fn format_seed_metrics(seed: &SeedReport) -> String {
    let mut out = String::from("learner,class,precision,recall,accuracy,weight\n");
    for member in &seed.members {
        for c in 0..member.weights.len() {
            out.push_str(&format!(
                "{},{},{:?},{:?},{:?},{:?}\n",
                member.learner,
                c,
                member.precision[c],
                member.recall[c],
                member.accuracy[c],
                member.weights[c]
            ));
        }
    }
    out
}

/// Per-seed predictions: `row,truth,<member kinds...>[,ensemble]`.
pub fn format_predictions(seed: &SeedReport) -> String {
    let mut out = String::from("row,truth");
    for member in &seed.members {
        out.push_str(&format!(",{}", member.learner));
    }
    let has_ensemble = seed.ensemble_accuracy.is_some();
    if has_ensemble {
        out.push_str(",ensemble");
    }
    out.push('\n');
    for (i, &truth) in seed.truth.iter().enumerate() {
        out.push_str(&format!("{i},{truth}"));
        for member in &seed.members {
            out.push_str(&format!(",{}", member.predictions[i]));
        }
        if has_ensemble {
            out.push_str(&format!(",{}", seed.ensemble_predictions[i]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(name: &str, acc: f64, predictions: Vec<usize>) -> MemberResult {
        MemberResult {
            learner: name.to_string(),
            test_accuracy: acc,
            precision: vec![0.5, 0.5],
            recall: vec![1.0, 0.25],
            accuracy: vec![0.75, 0.75],
            weights: vec![2.25, 1.5],
            predictions,
        }
    }

    fn sample_report() -> ExperimentReport {
        let seeds = vec![
            SeedReport {
                seed: 0,
                members: vec![member("knn", 0.75, vec![0, 1, 0, 1]), member("elm", 0.5, vec![0, 1, 0, 0])],
                ensemble_accuracy: Some(0.75),
                ensemble_predictions: vec![0, 1, 0, 1],
                truth: vec![0, 1, 1, 1],
                warnings: vec![],
            },
            SeedReport {
                seed: 1,
                members: vec![member("knn", 0.25, vec![1, 0, 1, 0]), member("elm", 1.0, vec![0, 1, 1, 1])],
                ensemble_accuracy: Some(1.0),
                ensemble_predictions: vec![0, 1, 1, 1],
                truth: vec![0, 1, 1, 1],
                warnings: vec![],
            },
        ];
        let aggregates = compute_aggregates(&seeds);
        ExperimentReport {
            datasets: vec![DatasetReport {
                name: "toy".into(),
                n_train: 16,
                n_test: 4,
                n_classes: 2,
                failed: None,
                seeds,
                aggregates,
            }],
        }
    }

    #[test]
    fn aggregates_mean_std_and_flags() {
        let report = sample_report();
        let aggs = &report.datasets[0].aggregates;
        assert_eq!(aggs.len(), 3);
        assert_eq!(aggs[0].learner, "knn");
        assert_eq!(aggs[0].mean, 0.5);
        assert_eq!(aggs[0].std, 0.25);
        assert!(aggs[0].worst && !aggs[0].best);
        let ens = aggs.iter().find(|a| a.learner == "ensemble").unwrap();
        assert_eq!(ens.mean, 0.875);
        assert!(ens.best);
    }

    #[test]
    fn csv_round_trips_exactly() {
        let report = sample_report();
        let text = format_csv(&report);
        let rows = parse_csv(&text).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0], CsvRow { dataset: "toy".into(), seed: 0, learner: "knn".into(), accuracy: 0.75 });
        // Re-rendering the parsed rows reproduces the bytes.
        let mut again = String::from("dataset,seed,learner,accuracy\n");
        for r in &rows {
            again.push_str(&format!("{},{},{},{:?}\n", r.dataset, r.seed, r.learner, r.accuracy));
        }
        assert_eq!(text, again);
    }

    #[test]
    fn csv_round_trips_awkward_floats() {
        let mut report = sample_report();
        report.datasets[0].seeds[0].members[0].test_accuracy = 0.1 + 0.2;
        let rows = parse_csv(&format_csv(&report)).unwrap();
        assert_eq!(rows[0].accuracy, 0.1 + 0.2);
    }

    #[test]
    fn markdown_bolds_the_best_column() {
        let text = format_markdown(&sample_report());
        assert!(text.contains("| dataset | knn | elm | ensemble |"));
        assert!(text.contains("**0.8750"));
        assert!(!text.contains("**0.5000"));
    }

    #[test]
    fn markdown_marks_failed_datasets() {
        let mut report = sample_report();
        report.datasets.push(DatasetReport {
            name: "missing".into(),
            n_train: 0,
            n_test: 0,
            n_classes: 0,
            failed: Some("file not found".into()),
            seeds: vec![],
            aggregates: vec![],
        });
        let text = format_markdown(&report);
        assert!(text.contains("| missing | failed: file not found |"));
        assert!(!report.all_succeeded());
    }

    #[test]
    fn seed_metrics_layout() {
        let report = sample_report();
        let text = format_seed_metrics(&report.datasets[0].seeds[0]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "learner,class,precision,recall,accuracy,weight");
        assert_eq!(lines[1], "knn,0,0.5,1.0,0.75,2.25");
        assert_eq!(lines.len(), 1 + 2 * 2);
    }

    #[test]
    fn predictions_layout() {
        let report = sample_report();
        let text = format_predictions(&report.datasets[0].seeds[0]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "row,truth,knn,elm,ensemble");
        assert_eq!(lines[1], "0,0,0,0,0");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_is_parseable() {
        let report = sample_report();
        let text = format_json(&report).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["datasets"][0]["name"], "toy");
        assert_eq!(value["datasets"][0]["seeds"][1]["ensemble_accuracy"], 1.0);
    }

    #[test]
    fn mean_recomputable_from_stored_predictions() {
        let report = sample_report();
        let ds = &report.datasets[0];
        for agg in &ds.aggregates {
            let mut accs = Vec::new();
            for seed in &ds.seeds {
                let (predictions, stated) = if agg.learner == "ensemble" {
                    (&seed.ensemble_predictions, seed.ensemble_accuracy.unwrap())
                } else {
                    let m = seed.members.iter().find(|m| m.learner == agg.learner).unwrap();
                    (&m.predictions, m.test_accuracy)
                };
                let hits = predictions.iter().zip(&seed.truth).filter(|(p, t)| p == t).count();
                let recomputed = hits as f64 / seed.truth.len() as f64;
                assert_eq!(recomputed, stated);
                accs.push(recomputed);
            }
            let (mean, _) = mean_std(&accs);
            assert!((mean - agg.mean).abs() <= 1e-12);
        }
    }
}
