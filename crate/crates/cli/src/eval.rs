use std::fs::File;
use std::path::{Path, PathBuf};

use rolecsp::evaluation::{aggregate, compare, read_metrics_csv, AggregateMetrics, EvalError, MetricsRow};

use crate::CliError;

#[derive(clap::Args)]
pub struct Args {
    /// Metrics CSV of the first method.
    a: PathBuf,
    /// Metrics CSV of the second method, with the same (game, round, view) keys.
    b: PathBuf,
}

fn eval_err(e: EvalError) -> CliError {
    CliError::input(format!("[{}] {e}", e.code()))
}

fn load(path: &Path) -> Result<Vec<MetricsRow>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_metrics_csv(f).map_err(|e| CliError::input(format!("{}: [{}] {e}", path.display(), e.code())))
}

fn print_aggregates(label: &Path, groups: &[AggregateMetrics]) {
    println!("{}", label.display());
    println!("{:<10} {:<20} {:<10} {:>6} {:>17} {:>17}", "preset", "view", "condition", "games", "MA", "MAP");
    for g in groups {
        println!(
            "{:<10} {:<20} {:<10} {:>6} {:>8.4} ± {:<6.4} {:>8.4} ± {:<6.4}",
            g.key.preset,
            g.key.view,
            g.key.condition,
            g.per_game.len(),
            g.ma.mean,
            g.ma.sd,
            g.map.mean,
            g.map.sd
        );
    }
    println!();
}

pub fn run(a: Args) -> Result<(), CliError> {
    let rows_a = load(&a.a)?;
    let rows_b = load(&a.b)?;
    let report = compare(&rows_a, &rows_b).map_err(eval_err)?;
    print_aggregates(&a.a, &aggregate(&rows_a).map_err(eval_err)?);
    print_aggregates(&a.b, &aggregate(&rows_b).map_err(eval_err)?);
    print!("{report}");
    Ok(())
}
