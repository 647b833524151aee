use crate::model::{GameConfig, World, MAX_PLAYERS};

use super::SolverError;

/// Number of distinct worlds: n! / prod(count_r!).
pub fn world_count(config: &GameConfig) -> u64 {
    // Product of binomials avoids overflowing n!.
    let mut total = 1u64;
    let mut placed = 0u64;
    for spec in config.roles() {
        for k in 1..=spec.count as u64 {
            placed += 1;
            total = total * placed / k;
        }
    }
    total
}

/// Every assignment respecting the role multiset, in canonical order:
/// players in config order, and at each player the roles in config order.
/// Canonical order coincides with lexicographic order of role indices.
pub fn enumerate_worlds(config: &GameConfig) -> Result<Vec<World>, SolverError> {
    let n = config.num_players();
    if n > MAX_PLAYERS {
        return Err(SolverError::ConfigTooLarge { players: n });
    }
    let mut remaining = config.counts();
    let mut current = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(world_count(config) as usize);
    extend(&mut remaining, &mut current, n, &mut out);
    Ok(out)
}

fn extend(remaining: &mut [usize], current: &mut Vec<u8>, n: usize, out: &mut Vec<World>) {
    if current.len() == n {
        out.push(World::from_raw(current.clone()));
        return;
    }
    for r in 0..remaining.len() {
        if remaining[r] == 0 {
            continue;
        }
        remaining[r] -= 1;
        current.push(r as u8);
        extend(remaining, current, n, out);
        current.pop();
        remaining[r] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alignment, GameKind, RoleSpec};

    #[test]
    fn six_player_avalon_has_360_worlds() {
        let cfg = GameConfig::avalon_six();
        assert_eq!(enumerate_worlds(&cfg).unwrap().len(), 360);
        assert_eq!(world_count(&cfg), 360);
    }

    #[test]
    fn two_distinct_roles_give_two_worlds() {
        let cfg = GameConfig::new(
            GameKind::Custom,
            ["x", "y"],
            vec![RoleSpec::new("a", 1, Alignment::Good), RoleSpec::new("b", 1, Alignment::Evil)],
        )
        .unwrap();
        let worlds = enumerate_worlds(&cfg).unwrap();
        assert_eq!(worlds.len(), 2);
        assert_eq!(worlds[0].role_names(&cfg), ["a", "b"]);
        assert_eq!(worlds[1].role_names(&cfg), ["b", "a"]);
    }

    #[test]
    fn five_player_mafia_chooses_the_mafioso() {
        let cfg = GameConfig::mafia(5, 1).unwrap();
        assert_eq!(enumerate_worlds(&cfg).unwrap().len(), 5);
    }

    #[test]
    fn order_is_lexicographic_and_distinct() {
        let cfg = GameConfig::avalon(7).unwrap();
        let worlds = enumerate_worlds(&cfg).unwrap();
        assert_eq!(worlds.len() as u64, world_count(&cfg));
        assert!(worlds.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ten_players_is_the_limit() {
        let cfg = GameConfig::avalon(10).unwrap();
        assert_eq!(world_count(&cfg), 3_628_800 / (24 * 2));
        let eleven = GameConfig::new(
            GameKind::Custom,
            (0..11).map(|i| i.to_string()),
            vec![RoleSpec::new("a", 11, Alignment::Good)],
        )
        .unwrap();
        assert!(matches!(enumerate_worlds(&eleven), Err(SolverError::ConfigTooLarge { players: 11 })));
    }
}
