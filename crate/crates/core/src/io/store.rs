//! On-disk registry: `DIR/<m>x<n>x<p>/rank<r>_c<complexity>.json`.
//!
//! Storing only ever adds files. A scheme is written when it is at least as
//! good as the best file already present for its format and not equivalent
//! (same canonical key) to one of them. Loading verifies every file and
//! skips the ones that fail, with a warning.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::file::{parse, serialize, Provenance};
use crate::error::{Error, Result};
use crate::scheme::{Format, Scheme};
use crate::search::BestRegistry;

/// A file that could not be loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub path: PathBuf,
    pub reason: String,
}

pub fn file_name(rank: usize, complexity: i64) -> String {
    format!("rank{rank}_c{complexity}.json")
}

/// Reads `(rank, complexity)` back from a file name.
pub fn parse_file_name(name: &str) -> Option<(usize, i64)> {
    let stem = name.strip_suffix(".json")?.strip_prefix("rank")?;
    let (rank, rest) = stem.split_once("_c")?;
    let complexity = rest.split('_').next()?;
    Some((rank.parse().ok()?, complexity.parse().ok()?))
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(files),
        Err(e) => return Err(Error::io(dir, e)),
    };
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn short_hash(key: &[u8]) -> String {
    Sha256::digest(key)[..4]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes `s` into its format directory unless something at least as good
/// and equivalent is already there, or something strictly better exists.
/// Returns the path written, if any.
pub fn store_scheme(
    dir: &Path,
    s: &Scheme,
    provenance: Option<Provenance>,
) -> Result<Option<PathBuf>> {
    if !s.verify().passed() {
        return Err(Error::NotVerified(format!("refusing to store {s}")));
    }
    let sub = dir.join(s.format().to_string());
    let (rank, complexity) = (s.rank(), s.additive_complexity());
    let key = s.canonical_key();
    for path in json_files(&sub)? {
        let Some(existing) = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(parse_file_name)
        else {
            continue;
        };
        if existing < (rank, complexity) {
            return Ok(None);
        }
        if existing == (rank, complexity) {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            if parse(&text).is_ok_and(|other| other.canonical_key() == key) {
                return Ok(None);
            }
        }
    }
    fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    let mut path = sub.join(file_name(rank, complexity));
    if path.exists() {
        path = sub.join(format!(
            "rank{rank}_c{complexity}_{}.json",
            short_hash(&key)
        ));
    }
    let text = serialize(s, provenance);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(Some(path))
}

/// Stores every registry entry; returns the files written.
pub fn registry_store(
    dir: &Path,
    registry: &BestRegistry,
    provenance: Option<Provenance>,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (_, entry) in registry.iter() {
        if let Some(path) = store_scheme(dir, &entry.scheme, provenance.clone())? {
            written.push(path);
        }
    }
    Ok(written)
}

/// Loads the best verified scheme per format from `dir`.
pub fn registry_load(dir: &Path) -> Result<(BestRegistry, Vec<LoadWarning>)> {
    let mut registry = BestRegistry::new();
    let mut warnings = Vec::new();
    let mut subdirs = Vec::new();
    match fs::read_dir(dir) {
        Ok(entries) => {
            for entry in entries {
                let path = entry.map_err(|e| Error::io(dir, e))?.path();
                if path.is_dir() {
                    subdirs.push(path);
                }
            }
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((registry, warnings)),
        Err(e) => return Err(Error::io(dir, e)),
    }
    subdirs.sort();
    for sub in subdirs {
        let expected: Option<Format> = sub
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.parse().ok());
        for path in json_files(&sub)? {
            let outcome = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| parse(&text).map_err(|e| e.to_string()))
                .and_then(|s| {
                    if expected.is_some_and(|f| f != s.format()) {
                        Err(format!(
                            "format {} does not match its directory",
                            s.format()
                        ))
                    } else if let Some(failure) = s.verify().failure {
                        Err(format!("fails verification at {failure}"))
                    } else {
                        Ok(s)
                    }
                });
            match outcome {
                Ok(s) => {
                    registry.offer(&s);
                }
                Err(reason) => {
                    log::warn!("skipping {}: {reason}", path.display());
                    warnings.push(LoadWarning { path, reason });
                }
            }
        }
    }
    Ok((registry, warnings))
}
