use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::grammar::parse_constraint_document_with;
use crate::model::{ConstraintSet, GameConfig, ManualWeights};

use super::IngestError;

fn round_number(path: &Path) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    name.strip_prefix("round-")?.strip_suffix(".json")?.parse().ok()
}

/// Loads `round-<k>.json` files from `dir`, ordered by `k`, which must run
/// 1, 2, .. without gaps. Other files are ignored. Each constraint is stamped
/// with its file's round.
pub fn load_constraint_rounds(dir: &Path, config: &GameConfig) -> Result<Vec<ConstraintSet>, IngestError> {
    load_constraint_rounds_with(dir, config, &ManualWeights::default())
}

pub fn load_constraint_rounds_with(
    dir: &Path,
    config: &GameConfig,
    weights: &ManualWeights,
) -> Result<Vec<ConstraintSet>, IngestError> {
    let mut files: BTreeMap<usize, PathBuf> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| IngestError::io(dir, e))? {
        let path = entry.map_err(|e| IngestError::io(dir, e))?.path();
        if let Some(k) = round_number(&path) {
            if let Some(prev) = files.insert(k, path.clone()) {
                return Err(IngestError::DuplicateRound { round: k, files: vec![prev, path] });
            }
        }
    }
    let mut out = Vec::with_capacity(files.len());
    for (expected, (k, path)) in (1..).zip(files) {
        if k != expected {
            return Err(IngestError::MissingRound(expected));
        }
        let text = fs::read(&path).map_err(|e| IngestError::io(&path, e))?;
        let set = parse_constraint_document_with(&text, config, weights)
            .map_err(|e| IngestError::Grammar { context: path.display().to_string(), source: e })?;
        out.push(set.with_round(k));
    }
    Ok(out)
}
