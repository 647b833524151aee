//! Perspective evidence for each evaluation seat.

use std::fmt;
use std::str::FromStr;

use crate::model::{Alignment, Constraint, GameConfig, View, ViewError, World};

/// A requested perspective before it is resolved against a truth world.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Viewpoint {
    Objective,
    /// `viewer: None` picks the first player holding `role` in the truth.
    Role {
        role: String,
        viewer: Option<String>,
    },
}

impl Viewpoint {
    pub fn role(role: impl Into<String>) -> Self {
        Viewpoint::Role { role: role.into(), viewer: None }
    }

    pub fn seat(role: impl Into<String>, viewer: impl Into<String>) -> Self {
        Viewpoint::Role { role: role.into(), viewer: Some(viewer.into()) }
    }
}

impl fmt::Display for Viewpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Viewpoint::Objective => f.write_str("objective"),
            Viewpoint::Role { role, viewer: None } => f.write_str(role),
            Viewpoint::Role { role, viewer: Some(v) } => write!(f, "{role}:{v}"),
        }
    }
}

impl FromStr for Viewpoint {
    type Err = String;

    /// `objective`, `<role>` or `<role>:<viewer>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty view".into());
        }
        if s.eq_ignore_ascii_case("objective") {
            return Ok(Viewpoint::Objective);
        }
        match s.split_once(':') {
            Some((role, viewer)) if !role.is_empty() && !viewer.is_empty() => {
                Ok(Viewpoint::seat(role.to_ascii_lowercase(), viewer))
            }
            Some(_) => Err(format!("malformed view `{s}`")),
            None => Ok(Viewpoint::role(s.to_ascii_lowercase())),
        }
    }
}

/// Hard knowledge available to `viewpoint` given the true world.
///
/// Merlin knows every evil player's alignment. Percival knows which two
/// players are Merlin and Morgana, not which is which. An evil seat knows its
/// fellow evils. Anyone else knows only their own role.
pub fn build_view(config: &GameConfig, viewpoint: &Viewpoint, truth: &World) -> Result<View, ViewError> {
    let (role, viewer) = match viewpoint {
        Viewpoint::Objective => return Ok(View::objective()),
        Viewpoint::Role { role, viewer } => (role, viewer),
    };
    let mismatch = |viewer: &str| ViewError::ViewerRoleMismatch { viewer: viewer.into(), role: role.clone() };
    let role_idx = config.role_index(role).ok_or_else(|| mismatch(viewer.as_deref().unwrap_or("")))?;
    let viewer_idx = match viewer {
        Some(v) => {
            let i = config.player_index(v).ok_or_else(|| mismatch(v))?;
            if truth.role(i) != role_idx {
                return Err(mismatch(v));
            }
            i
        }
        None => (0..config.num_players()).find(|&p| truth.role(p) == role_idx).ok_or_else(|| mismatch(""))?,
    };
    let viewer_name = &config.players()[viewer_idx];

    let evil_roles = config.roles_aligned(Alignment::Evil);
    let players_where = |pred: &dyn Fn(usize) -> bool| -> Vec<usize> {
        (0..config.num_players()).filter(|&p| p != viewer_idx && pred(truth.role(p))).collect()
    };

    let mut knowledge = vec![Constraint::role_is(viewer_name, role)];
    let alignment = config.alignment(role_idx);
    if alignment == Alignment::Evil {
        for p in players_where(&|r| config.alignment(r) == Alignment::Evil) {
            knowledge.push(Constraint::role_in(&config.players()[p], &evil_roles));
        }
    } else if role == "merlin" {
        for p in players_where(&|r| config.alignment(r) == Alignment::Evil) {
            knowledge.push(Constraint::role_in(&config.players()[p], &evil_roles));
        }
    } else if role == "percival" {
        let candidates: Vec<String> =
            ["merlin", "morgana"].iter().filter(|r| config.role_index(r).is_some()).map(|r| r.to_string()).collect();
        let idx: Vec<usize> = candidates.iter().filter_map(|r| config.role_index(r)).collect();
        for p in players_where(&|r| idx.contains(&r)) {
            knowledge.push(Constraint::role_in(&config.players()[p], &candidates));
        }
    }
    View::role(config, viewer_name, role, knowledge)
}
