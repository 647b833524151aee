use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::replay::MetricsRow;
use super::stats::{paired_t_test, significant, wilcoxon_signed_rank, StatsError, TTestResult, WilcoxonResult};
use super::EvalError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub preset: String,
    pub view: String,
    pub condition: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameMeans {
    pub ma: f64,
    pub map: f64,
    pub rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation across games.
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateMetrics {
    pub key: GroupKey,
    pub per_game: BTreeMap<String, GameMeans>,
    pub ma: Summary,
    pub map: Summary,
}

fn summarize(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Summary { mean, sd: var.sqrt() }
}

/// Per-game means over rounds.
pub fn game_means(rows: &[&MetricsRow]) -> BTreeMap<String, GameMeans> {
    let mut acc: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.game_id.clone()).or_default();
        e.0 += r.ma;
        e.1 += r.map;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(g, (ma, map, n))| (g, GameMeans { ma: ma / n as f64, map: map / n as f64, rounds: n }))
        .collect()
}

/// Aggregates one group of rows: each game averaged over its rounds, then
/// games averaged with equal weight.
pub fn aggregate_group(key: GroupKey, rows: &[&MetricsRow]) -> Result<AggregateMetrics, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyGroup(format!("{}/{}/{}", key.preset, key.view, key.condition)));
    }
    let per_game = game_means(rows);
    let ma: Vec<f64> = per_game.values().map(|g| g.ma).collect();
    let map: Vec<f64> = per_game.values().map(|g| g.map).collect();
    Ok(AggregateMetrics { key, ma: summarize(&ma), map: summarize(&map), per_game })
}

/// Groups rows by (preset, view, condition) and aggregates each group.
pub fn aggregate(rows: &[MetricsRow]) -> Result<Vec<AggregateMetrics>, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyGroup("no rows".into()));
    }
    let mut groups: BTreeMap<GroupKey, Vec<&MetricsRow>> = BTreeMap::new();
    for r in rows {
        let key = GroupKey { preset: r.preset.clone(), view: r.view.clone(), condition: r.condition.clone() };
        groups.entry(key).or_default().push(r);
    }
    groups.into_iter().map(|(k, rs)| aggregate_group(k, &rs)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Ma,
    Map,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Ma, Metric::Map];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Ma => "MA",
            Metric::Map => "MAP",
        }
    }

    fn pick(self, g: &GameMeans) -> f64 {
        match self {
            Metric::Ma => g.ma,
            Metric::Map => g.map,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceRow {
    pub view: String,
    pub metric: Metric,
    pub games: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub wilcoxon: Result<WilcoxonResult, StatsError>,
    pub t_test: Result<TTestResult, StatsError>,
}

impl SignificanceRow {
    /// Both tests ran and both are below the level.
    pub fn significant(&self) -> bool {
        match (&self.wilcoxon, &self.t_test) {
            (Ok(w), Ok(t)) => significant(w.p_value, t.p_value),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceReport {
    pub rows: Vec<SignificanceRow>,
}

type RowKey = (String, usize, String);

fn keys(rows: &[MetricsRow]) -> BTreeSet<RowKey> {
    rows.iter().map(|r| (r.game_id.clone(), r.round, r.view.clone())).collect()
}

/// Pairs two metric tables per game and view and runs both tests on each
/// metric. Each table should hold a single preset.
pub fn compare(a: &[MetricsRow], b: &[MetricsRow]) -> Result<SignificanceReport, EvalError> {
    let (ka, kb) = (keys(a), keys(b));
    if ka != kb {
        let only_a = ka.difference(&kb).next();
        let only_b = kb.difference(&ka).next();
        let (side, k) = match (only_a, only_b) {
            (Some(k), _) => ("first", k),
            (None, Some(k)) => ("second", k),
            (None, None) => unreachable!(),
        };
        return Err(EvalError::KeyMismatch(format!(
            "game {} round {} view {} only in the {side} table",
            k.0, k.1, k.2
        )));
    }
    if ka.len() != a.len() || kb.len() != b.len() {
        return Err(EvalError::KeyMismatch("duplicate (game, round, view) rows".into()));
    }
    if a.is_empty() {
        return Err(EvalError::EmptyGroup("no rows".into()));
    }

    let by_view = |rows: &[MetricsRow]| -> BTreeMap<String, BTreeMap<String, GameMeans>> {
        let mut m: BTreeMap<String, Vec<&MetricsRow>> = BTreeMap::new();
        for r in rows {
            m.entry(r.view.clone()).or_default().push(r);
        }
        m.into_iter().map(|(v, rs)| (v, game_means(&rs))).collect()
    };
    let (va, vb) = (by_view(a), by_view(b));
    let mut rows = Vec::new();
    for (view, ga) in &va {
        let gb = &vb[view];
        for metric in Metric::ALL {
            let pairs: Vec<(f64, f64)> = ga.iter().map(|(g, m)| (metric.pick(m), metric.pick(&gb[g]))).collect();
            let n = pairs.len() as f64;
            rows.push(SignificanceRow {
                view: view.clone(),
                metric,
                games: pairs.len(),
                mean_a: pairs.iter().map(|p| p.0).sum::<f64>() / n,
                mean_b: pairs.iter().map(|p| p.1).sum::<f64>() / n,
                wilcoxon: wilcoxon_signed_rank(&pairs),
                t_test: paired_t_test(&pairs),
            });
        }
    }
    Ok(SignificanceReport { rows })
}

fn p_cell<R>(r: &Result<R, StatsError>, p: impl Fn(&R) -> f64) -> String {
    match r {
        Ok(v) => format!("{:.4}", p(v)),
        Err(e) => e.code().to_string(),
    }
}

impl fmt::Display for SignificanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<24} {:<6} {:>5} {:>8} {:>8} {:>22} {:>22} sig",
            "view", "metric", "games", "mean_a", "mean_b", "wilcoxon_p", "t_p"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<24} {:<6} {:>5} {:>8.4} {:>8.4} {:>22} {:>22} {}",
                r.view,
                r.metric.as_str(),
                r.games,
                r.mean_a,
                r.mean_b,
                p_cell(&r.wilcoxon, |w| w.p_value),
                p_cell(&r.t_test, |t| t.p_value),
                if r.significant() { "*" } else { "" }
            )?;
        }
        Ok(())
    }
}
