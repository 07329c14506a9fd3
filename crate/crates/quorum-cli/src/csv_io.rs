//! Loading labelled datasets from delimiter-separated text files.
//!
//! UCI-style files: no header row, one instance per line, the label in a
//! fixed column. Labels may be arbitrary tokens ("R"/"M") or numbers; they
//! are encoded to contiguous class indices either in a caller-pinned order
//! or sorted (numerically when every label parses as a number).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use quorum::Dataset;

/// Which raw column holds the class label (after column drops).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    First,
    Last,
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Whitespace,
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: Delimiter,
    pub label: LabelColumn,
    /// Raw column indices to discard before anything else (id columns).
    pub drop_columns: Vec<usize>,
    /// Pin the class-index order; tokens outside the list are an error.
    pub class_order: Option<Vec<String>>,
    /// Rewrite raw label tokens before encoding (e.g. collapse classes).
    pub label_map: Vec<(String, String)>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: Delimiter::Comma,
            label: LabelColumn::Last,
            drop_columns: Vec::new(),
            class_order: None,
            label_map: Vec::new(),
        }
    }
}

fn tokenize(path: &Path, delimiter: Delimiter) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read dataset file {}", path.display()))?;
    let rows = match delimiter {
        Delimiter::Whitespace => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(str::to_string).collect())
            .collect(),
        Delimiter::Comma => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .flexible(true)
                .from_reader(text.as_bytes());
            let mut rows = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let record =
                    record.with_context(|| format!("{}: malformed row {}", path.display(), i + 1))?;
                let row: Vec<String> = record.iter().map(str::to_string).collect();
                if row.iter().any(|t| !t.is_empty()) {
                    rows.push(row);
                }
            }
            rows
        }
    };
    Ok(rows)
}

/// Load a dataset file according to `opts`.
pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let mut rows = tokenize(path, opts.delimiter)?;
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let raw_width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != raw_width {
            bail!(
                "{}: row {} has {} columns, expected {}",
                path.display(),
                i + 1,
                row.len(),
                raw_width
            );
        }
    }

    let mut drops = opts.drop_columns.clone();
    drops.sort_unstable();
    drops.dedup();
    if let Some(&bad) = drops.iter().find(|&&c| c >= raw_width) {
        bail!("{}: drop column {} out of range (width {})", path.display(), bad, raw_width);
    }
    for row in &mut rows {
        for &c in drops.iter().rev() {
            row.remove(c);
        }
    }
    let width = raw_width - drops.len();
    if width < 2 {
        bail!("{}: need at least one feature and a label column", path.display());
    }

    let label_idx = match opts.label {
        LabelColumn::First => 0,
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if i < width => i,
        LabelColumn::Index(i) => {
            bail!("{}: label column {} out of range (width {})", path.display(), i, width)
        }
    };

    let mut label_tokens = Vec::with_capacity(rows.len());
    let mut features = Vec::with_capacity(rows.len() * (width - 1));
    for (i, row) in rows.iter().enumerate() {
        for (j, token) in row.iter().enumerate() {
            if j == label_idx {
                let mapped = opts
                    .label_map
                    .iter()
                    .find(|(from, _)| from == token)
                    .map(|(_, to)| to.clone())
                    .unwrap_or_else(|| token.clone());
                label_tokens.push(mapped);
            } else {
                let value: f64 = token.parse().with_context(|| {
                    format!(
                        "{}: row {} column {}: {:?} is not a number",
                        path.display(),
                        i + 1,
                        j + 1,
                        token
                    )
                })?;
                features.push(value);
            }
        }
    }

    let class_names = match &opts.class_order {
        Some(order) => order.clone(),
        None => {
            let mut distinct: Vec<String> = label_tokens.clone();
            distinct.sort();
            distinct.dedup();
            // Numeric labels sort as numbers so class 10 follows class 2.
            if distinct.iter().all(|t| t.parse::<f64>().is_ok()) {
                distinct.sort_by(|a, b| {
                    a.parse::<f64>().unwrap().partial_cmp(&b.parse::<f64>().unwrap()).unwrap()
                });
            }
            distinct
        }
    };
    let labels = label_tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            class_names.iter().position(|c| c == t).with_context(|| {
                format!("{}: row {}: label {:?} not among classes {:?}", path.display(), i + 1, t, class_names)
            })
        })
        .collect::<Result<Vec<usize>>>()?;

    let feature_names = (0..width - 1).map(|j| format!("x{j}")).collect();
    Dataset::new(features, width - 1, labels, class_names, feature_names)
        .with_context(|| format!("{}: invalid dataset", path.display()))
}
