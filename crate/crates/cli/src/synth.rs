use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use rolecsp::evaluation::{synth_games, SynthOptions};
use rolecsp::ingestion::Condition;
use rolecsp::GameConfig;

use crate::{inputs, CliError};

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Avalon,
    Mafia,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TRUTH or LIE.
    #[arg(long, default_value = "TRUTH")]
    condition: String,
    /// Output directory for `<id>.json` record files.
    #[arg(long)]
    out: PathBuf,
    /// Game config JSON; overrides --kind and --players.
    #[arg(long)]
    game: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "avalon")]
    kind: Kind,
    #[arg(long, default_value_t = 6)]
    players: usize,
    /// Mafiosi in a generated Mafia table.
    #[arg(long, default_value_t = 1)]
    mafia: usize,
    /// Rounds for Mafia games.
    #[arg(long)]
    max_rounds: Option<usize>,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let config = match (&a.game, a.kind) {
        (Some(p), _) => inputs::game_config(p)?,
        (None, Kind::Avalon) => GameConfig::avalon(a.players)
            .ok_or_else(|| CliError::input(format!("no Avalon board for {} players", a.players)))?,
        (None, Kind::Mafia) => GameConfig::mafia(a.players, a.mafia).map_err(CliError::input)?,
    };
    let condition: Condition = a.condition.parse().map_err(CliError::input)?;
    let mut options = SynthOptions::default();
    if let Some(r) = a.max_rounds {
        options.max_rounds = r;
    }
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let games = synth_games(&config, a.count, a.seed, condition, &options);
    for g in &games {
        let path = a.out.join(format!("{}.json", g.id));
        fs::write(&path, g.to_json()).map_err(|e| CliError::io(&path, e))?;
    }
    eprintln!("wrote {} records to {}", games.len(), a.out.display());
    Ok(())
}
