use std::fs;
use std::path::PathBuf;

use rolecsp::grammar::constraint_to_value;
use rolecsp::views::Viewpoint;
use rolecsp::{ConstraintSet, GameConfig, Posterior, View, WorldSpace};
use serde_json::{json, Value};

use crate::{inputs, CliError};

#[derive(clap::Args)]
pub struct Args {
    /// Game config JSON.
    #[arg(long)]
    game: PathBuf,
    /// Constraint document, or a directory of round-<k>.json files.
    #[arg(long)]
    constraints: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Solver settings JSON; --preset overrides its preset.
    #[arg(long)]
    settings: Option<PathBuf>,
    /// `objective` or `<role>:<viewer>`.
    #[arg(long, default_value = "objective")]
    view: String,
    /// Constraint document whose evidence is the seat's knowledge.
    #[arg(long)]
    knowledge: Option<PathBuf>,
    /// Number of most probable worlds to list.
    #[arg(long, default_value_t = 0)]
    topk: usize,
    /// Write the result document here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let config = inputs::game_config(&a.game)?;
    let settings = inputs::settings(a.settings.as_deref(), a.preset.as_deref())?;
    let view = match a.view.parse::<Viewpoint>().map_err(CliError::input)? {
        Viewpoint::Objective => View::objective(),
        Viewpoint::Role { role, viewer: Some(viewer) } => {
            let knowledge = match &a.knowledge {
                Some(p) => inputs::knowledge(p, &config)?,
                None => Vec::new(),
            };
            View::role(&config, &viewer, &role, knowledge)
                .map_err(|e| CliError::input(format!("[{}] {e}", e.code())))?
        }
        Viewpoint::Role { role, viewer: None } => {
            return Err(CliError::input(format!("view `{role}` needs a viewer: use `{role}:<player>`")))
        }
    };
    let mut set: ConstraintSet = view.knowledge().iter().cloned().collect();
    if let Some(p) = &a.constraints {
        set.extend(inputs::constraints(p, &config, &settings)?.iter().cloned());
    }
    let current = set.iter().map(|c| c.round()).max().unwrap_or(0);
    let space = WorldSpace::new(config.clone())?;
    let post: Posterior = space.posterior_at(&set, &settings, current)?;

    print!("{}", table(&config, &post));
    if a.topk > 0 {
        println!();
        for w in post.top_k(a.topk) {
            println!("{:.6}  {}", w.probability, w.world.role_names(&config).join(" "));
        }
    }
    if let Some(out) = &a.out {
        let doc = result_document(&config, &view, &post, a.topk);
        let text = serde_json::to_string_pretty(&doc).expect("result serializes");
        fs::write(out, text + "\n").map_err(|e| CliError::io(out, e))?;
    }
    Ok(())
}

fn table(config: &GameConfig, post: &Posterior) -> String {
    let name_w = config.players().iter().map(String::len).max().unwrap_or(0).max(6);
    let col_w = config.roles().iter().map(|r| r.name.len()).max().unwrap_or(0).max(6);
    let mut s = format!("{:<name_w$}", "player");
    for r in config.roles() {
        s += &format!("  {:>col_w$}", r.name);
    }
    s.push('\n');
    for (p, name) in config.players().iter().enumerate() {
        s += &format!("{name:<name_w$}");
        for x in &post.marginals[p] {
            s += &format!("  {x:>col_w$.4}");
        }
        s.push('\n');
    }
    let map = post.map_world().role_names(config);
    let pairs: Vec<String> = config.players().iter().zip(map).map(|(p, r)| format!("{p}={r}")).collect();
    s += &format!("\nMAP: {}\n", pairs.join(" "));
    s += &format!("entropy: {:.4} bits, feasible worlds: {}\n", post.entropy_bits, post.feasible_count);
    s
}

fn result_document(config: &GameConfig, view: &View, post: &Posterior, topk: usize) -> Value {
    let names = |w: &rolecsp::World| w.role_names(config);
    json!({
        "players": config.players(),
        "roles": config.roles().iter().map(|r| r.name.as_str()).collect::<Vec<_>>(),
        "view": view.label(),
        "marginals": post.marginals,
        "map": names(post.map_world()),
        "entropy_bits": post.entropy_bits,
        "feasible_count": post.feasible_count,
        "active_assertions": post.active_assertions,
        "hypotheses": post.hypothesis_weights.iter().map(|h| json!({
            "constraint": constraint_to_value(&h.hypothesis),
            "applied_weight": h.applied_weight,
            "ig_bits": h.ig.as_ref().map(|r| r.ig_bits),
        })).collect::<Vec<_>>(),
        "top_k": post.top_k(topk).into_iter().map(|w| json!({
            "roles": names(&w.world),
            "probability": w.probability,
            "log_score": w.log_score,
        })).collect::<Vec<_>>(),
    })
}
