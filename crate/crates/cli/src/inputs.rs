//! Loading the shared file formats.

use std::fs;
use std::path::Path;

use rolecsp::ingestion::load_constraint_rounds_with;
use rolecsp::{parse_constraint_document, ConstraintSet, GameConfig, Preset, SolverSettings};

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn game_config(path: &Path) -> Result<GameConfig, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Settings from an optional JSON file, with `preset` overriding its preset.
pub fn settings(file: Option<&Path>, preset: Option<&str>) -> Result<SolverSettings, CliError> {
    let mut s = match file {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => SolverSettings::default(),
    };
    if let Some(name) = preset {
        s.preset = preset_arg(name)?;
    }
    s.validate().map_err(CliError::input)?;
    Ok(s)
}

pub fn preset_arg(name: &str) -> Result<Preset, CliError> {
    name.parse().map_err(CliError::input)
}

/// A single document, or a directory of `round-<k>.json` files merged in
/// round order.
pub fn constraints(path: &Path, config: &GameConfig, settings: &SolverSettings) -> Result<ConstraintSet, CliError> {
    if path.is_dir() {
        let rounds = load_constraint_rounds_with(path, config, &settings.manual_weights)?;
        let mut set = ConstraintSet::new();
        for r in rounds {
            set.extend(r.iter().cloned());
        }
        Ok(set)
    } else {
        let text = read(path)?;
        rolecsp::grammar::parse_constraint_document_with(&text, config, &settings.manual_weights)
            .map_err(|e| CliError::input(format!("{}: [{}] {e}", path.display(), e.code())))
    }
}

/// Entries of a constraint document used as seat knowledge; only evidence is accepted.
pub fn knowledge(path: &Path, config: &GameConfig) -> Result<Vec<rolecsp::Constraint>, CliError> {
    let set = parse_constraint_document(read(path)?, config)
        .map_err(|e| CliError::input(format!("{}: [{}] {e}", path.display(), e.code())))?;
    Ok(set.iter().cloned().collect())
}
