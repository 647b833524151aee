use std::fs::{self, File};
use std::io;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rolecsp::evaluation::{replay_game, sort_rows, write_metrics_csv, MetricsRow};
use rolecsp::ingestion::{load_record, GameRecord};
use rolecsp::views::Viewpoint;
use rolecsp::Preset;

use crate::{inputs, CliError};

#[derive(clap::Args)]
pub struct Args {
    /// Directory of game record files.
    #[arg(long)]
    records: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "STRICT")]
    presets: Vec<String>,
    /// Views such as `objective`, `merlin` or `merlin:player-1`.
    #[arg(long, value_delimiter = ',', default_value = "objective")]
    views: Vec<String>,
    /// Solver settings JSON; each preset overrides its preset.
    #[arg(long)]
    settings: Option<PathBuf>,
    /// Metrics CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep one randomly chosen round per game.
    #[arg(long)]
    sample_one_round: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let presets: Vec<Preset> = a.presets.iter().map(|p| inputs::preset_arg(p)).collect::<Result<_, _>>()?;
    let views: Vec<Viewpoint> = a.views.iter().map(|v| v.parse().map_err(CliError::input)).collect::<Result<_, _>>()?;
    let settings = inputs::settings(a.settings.as_deref(), None)?;

    let mut paths: Vec<PathBuf> = fs::read_dir(&a.records)
        .map_err(|e| CliError::io(&a.records, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::input(format!("{}: no record files", a.records.display())));
    }

    let mut failures: Vec<String> = Vec::new();
    let mut records: Vec<GameRecord> = Vec::new();
    for p in &paths {
        match load_record(p) {
            Ok(r) => records.push(r),
            Err(e) => failures.push(format!("[{}] {e}", e.code())),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let picks: Vec<Option<usize>> = records
        .iter()
        .map(|r| match (a.sample_one_round, r.rounds.len()) {
            (true, n) if n > 0 => Some(r.rounds[rng.random_range(0..n)].index),
            _ => None,
        })
        .collect();

    let results: Vec<Result<Vec<MetricsRow>, String>> = records
        .par_iter()
        .zip(&picks)
        .map(|(record, pick)| {
            let mut rows = Vec::new();
            for preset in &presets {
                for view in &views {
                    let metrics = replay_game(record, *preset, view, &settings)
                        .map_err(|e| format!("{} {preset} {view}: [{}] {e}", record.id, e.code()))?;
                    rows.extend(
                        metrics
                            .iter()
                            .filter(|m| pick.is_none_or(|k| m.round == k))
                            .map(|m| MetricsRow::new(record, *preset, view, m)),
                    );
                }
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::new();
    let mut replayed = 0;
    for r in results {
        match r {
            Ok(mut v) => {
                replayed += 1;
                rows.append(&mut v);
            }
            Err(e) => failures.push(e),
        }
    }
    sort_rows(&mut rows);
    match &a.out {
        Some(p) => write_metrics_csv(&rows, File::create(p).map_err(|e| CliError::io(p, e))?),
        None => write_metrics_csv(&rows, io::stdout().lock()),
    }
    .map_err(|e| CliError::input(format!("[{}] {e}", e.code())))?;

    for f in &failures {
        eprintln!("skipped: {f}");
    }
    eprintln!("{} rows from {replayed} of {} records", rows.len(), paths.len());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::input(format!("{} of {} records failed", failures.len(), paths.len())))
    }
}
