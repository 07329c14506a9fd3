//! Dataset download and verification.
//!
//! Raw data files are not committed; each manifest carries its source URL
//! and expected shape. `fetch` downloads whatever is missing, verifies
//! everything it can, and leaves present files alone.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::manifest::{load_dataset, Manifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Present,
    Downloaded,
}

#[derive(Debug, Clone)]
pub struct FetchOutcome {
    pub name: String,
    pub action: Action,
    /// Hex SHA-256 of the raw file, when requested.
    pub sha256: Option<String>,
    /// rows × features × classes after parsing.
    pub shape: (usize, usize, usize),
}

fn download(url: &str) -> Result<Vec<u8>> {
    let mut response = ureq::get(url).call().with_context(|| format!("GET {url}"))?;
    let bytes = response
        .body_mut()
        .read_to_vec()
        .with_context(|| format!("reading response body of {url}"))?;
    if bytes.is_empty() {
        bail!("{url} returned an empty body");
    }
    Ok(bytes)
}

fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Ensure the manifest's data file exists and parses to the expected
/// shape, downloading it first if needed.
pub fn fetch_one(manifest: &Manifest, checksums: bool) -> Result<FetchOutcome> {
    let action = if manifest.file.is_file() {
        Action::Present
    } else {
        let url = manifest.url.as_deref().ok_or_else(|| {
            anyhow::anyhow!(
                "{}: data file {} is missing and the manifest has no url",
                manifest.name,
                manifest.file.display()
            )
        })?;
        let bytes = download(url)?;
        if let Some(dir) = manifest.file.parent() {
            fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))?;
        }
        fs::write(&manifest.file, &bytes)
            .with_context(|| format!("cannot write {}", manifest.file.display()))?;
        Action::Downloaded
    };
    let ds = load_dataset(manifest)?;
    let sha256 = if checksums {
        let bytes = fs::read(&manifest.file)
            .with_context(|| format!("cannot read {}", manifest.file.display()))?;
        Some(hex_sha256(&bytes))
    } else {
        None
    };
    Ok(FetchOutcome {
        name: manifest.name.clone(),
        action,
        sha256,
        shape: (ds.n_rows(), ds.n_features(), ds.n_classes()),
    })
}

pub fn describe(outcome: &FetchOutcome) -> String {
    let action = match outcome.action {
        Action::Present => "present",
        Action::Downloaded => "downloaded",
    };
    let (rows, features, classes) = outcome.shape;
    let mut line =
        format!("{}: {action}, {rows} rows x {features} features, {classes} classes", outcome.name);
    if let Some(sha) = &outcome.sha256 {
        line.push_str(&format!(", sha256 {sha}"));
    }
    line
}

/// Verify a file on disk against an expected checksum (hex, any case).
pub fn verify_checksum(path: &Path, expected: &str) -> Result<()> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let got = hex_sha256(&bytes);
    if !got.eq_ignore_ascii_case(expected) {
        bail!("{}: sha256 mismatch: expected {expected}, got {got}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csv_io::CsvOptions;

    fn toy_manifest(dir: &Path, with_file: bool, url: Option<&str>) -> Manifest {
        let file = dir.join("toy.csv");
        if with_file {
            fs::write(&file, "1.0,2.0,a\n2.0,1.0,b\n3.0,4.0,a\n4.0,3.0,b\n").unwrap();
        }
        Manifest {
            name: "toy".into(),
            url: url.map(str::to_string),
            file,
            options: CsvOptions::default(),
            expect_rows: Some(4),
            expect_features: Some(2),
            expect_classes: Some(2),
        }
    }

    #[test]
    fn present_file_is_verified_not_downloaded() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = toy_manifest(dir.path(), true, None);
        let outcome = fetch_one(&manifest, true).unwrap();
        assert_eq!(outcome.action, Action::Present);
        assert_eq!(outcome.shape, (4, 2, 2));
        let sha = outcome.sha256.unwrap();
        assert_eq!(sha.len(), 64);
        verify_checksum(&manifest.file, &sha).unwrap();
        assert!(verify_checksum(&manifest.file, &"0".repeat(64)).is_err());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = toy_manifest(dir.path(), true, None);
        manifest.expect_rows = Some(5);
        assert!(fetch_one(&manifest, false).is_err());
    }

    #[test]
    fn missing_file_without_url_names_the_problem() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = toy_manifest(dir.path(), false, None);
        let err = fetch_one(&manifest, false).unwrap_err().to_string();
        assert!(err.contains("no url"), "{err}");
    }

    #[test]
    fn checksum_is_stable() {
        assert_eq!(
            hex_sha256(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
