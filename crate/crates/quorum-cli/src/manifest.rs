//! Dataset manifests: one small key-value file per dataset recording where
//! the raw file lives (or can be downloaded from) and how to read it.
//!
//! ```text
//! name = glass
//! url = https://…/glass.data
//! file = ../raw/glass.data
//! delimiter = comma
//! label_column = last
//! drop_columns = 0
//! classes = 1,2,3,5,6,7
//! expect_rows = 214
//! expect_features = 9
//! expect_classes = 6
//! ```
//!
//! `file` is resolved relative to the manifest's directory. `drop_columns`
//! are raw column indices removed before the label column is located.
//! `label_map = from:to,…` rewrites label tokens before encoding.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quorum::Dataset;

use crate::csv_io::{load_csv, CsvOptions, Delimiter, LabelColumn};

#[derive(Debug, Clone)]
pub struct Manifest {
    pub name: String,
    pub url: Option<String>,
    /// Resolved location of the raw data file.
    pub file: PathBuf,
    pub options: CsvOptions,
    pub expect_rows: Option<usize>,
    pub expect_features: Option<usize>,
    pub expect_classes: Option<usize>,
}

/// Parse `key = value` lines; `#` starts a comment, blank lines ignored.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got {:?}", i + 1, raw);
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

pub fn parse_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut man = Manifest {
        name: String::new(),
        url: None,
        file: PathBuf::new(),
        options: CsvOptions::default(),
        expect_rows: None,
        expect_features: None,
        expect_classes: None,
    };
    for (key, value) in parse_key_values(&text)
        .with_context(|| format!("manifest {}", path.display()))?
    {
        match key.as_str() {
            "name" => man.name = value,
            "url" => man.url = Some(value),
            "file" => man.file = dir.join(value),
            "delimiter" => {
                man.options.delimiter = match value.as_str() {
                    "comma" => Delimiter::Comma,
                    "whitespace" => Delimiter::Whitespace,
                    other => bail!("{}: unknown delimiter {:?}", path.display(), other),
                }
            }
            "label_column" => {
                man.options.label = match value.as_str() {
                    "first" => LabelColumn::First,
                    "last" => LabelColumn::Last,
                    n => LabelColumn::Index(n.parse().with_context(|| {
                        format!("{}: bad label_column {:?}", path.display(), n)
                    })?),
                }
            }
            "drop_columns" => {
                man.options.drop_columns = split_list(&value)
                    .map(|t| {
                        t.parse::<usize>()
                            .with_context(|| format!("{}: bad drop column {:?}", path.display(), t))
                    })
                    .collect::<Result<_>>()?;
            }
            "classes" => {
                man.options.class_order = Some(split_list(&value).map(str::to_string).collect())
            }
            "label_map" => {
                man.options.label_map = split_list(&value)
                    .map(|pair| {
                        pair.split_once(':')
                            .map(|(f, t)| (f.trim().to_string(), t.trim().to_string()))
                            .with_context(|| {
                                format!("{}: label_map entry {:?} is not from:to", path.display(), pair)
                            })
                    })
                    .collect::<Result<_>>()?;
            }
            "expect_rows" => man.expect_rows = Some(parse_count(path, &key, &value)?),
            "expect_features" => man.expect_features = Some(parse_count(path, &key, &value)?),
            "expect_classes" => man.expect_classes = Some(parse_count(path, &key, &value)?),
            other => bail!("{}: unknown manifest key {:?}", path.display(), other),
        }
    }
    if man.name.is_empty() {
        bail!("{}: missing `name`", path.display());
    }
    if man.file.as_os_str().is_empty() {
        bail!("{}: missing `file`", path.display());
    }
    Ok(man)
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_count(path: &Path, key: &str, value: &str) -> Result<usize> {
    value.parse().with_context(|| format!("{}: bad {} value {:?}", path.display(), key, value))
}

/// Load the dataset a manifest describes and verify its shape against the
/// manifest's expectations.
pub fn load_dataset(man: &Manifest) -> Result<Dataset> {
    if !man.file.exists() {
        match &man.url {
            Some(url) => bail!(
                "dataset {}: file {} not present; run `quorum fetch` to download it from {}",
                man.name,
                man.file.display(),
                url
            ),
            None => bail!("dataset {}: file {} not present", man.name, man.file.display()),
        }
    }
    let ds = load_csv(&man.file, &man.options)?;
    if let Some(rows) = man.expect_rows {
        if ds.n_rows() != rows {
            bail!("dataset {}: expected {} rows, found {}", man.name, rows, ds.n_rows());
        }
    }
    if let Some(features) = man.expect_features {
        if ds.n_features() != features {
            bail!(
                "dataset {}: expected {} features, found {}",
                man.name,
                features,
                ds.n_features()
            );
        }
    }
    if let Some(classes) = man.expect_classes {
        if ds.n_classes() != classes {
            bail!("dataset {}: expected {} classes, found {}", man.name, classes, ds.n_classes());
        }
    }
    Ok(ds)
}
