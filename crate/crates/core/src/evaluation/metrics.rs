use crate::model::World;
use crate::scalar::Real;

use super::EvalError;

/// Mean over players of the posterior mass on each player's true role.
pub fn marginal_accuracy<T: Real>(marginals: &[Vec<T>], truth: &World) -> Result<T, EvalError> {
    if marginals.len() != truth.len() || marginals.is_empty() {
        return Err(EvalError::ShapeMismatch(format!("{} marginal rows for {} players", marginals.len(), truth.len())));
    }
    let mut sum = T::zero();
    for (p, row) in marginals.iter().enumerate() {
        let r = truth.role(p);
        if r >= row.len() {
            return Err(EvalError::ShapeMismatch(format!("row {p} has {} roles", row.len())));
        }
        sum = sum + row[r];
    }
    Ok(sum / T::count(marginals.len()))
}

/// Fraction of players whose MAP role is their true role.
pub fn map_accuracy<T: Real>(map_world: &World, truth: &World) -> Result<T, EvalError> {
    if map_world.len() != truth.len() || truth.is_empty() {
        return Err(EvalError::ShapeMismatch(format!("{} vs {} players", map_world.len(), truth.len())));
    }
    let hits = (0..truth.len()).filter(|&p| map_world.role(p) == truth.role(p)).count();
    Ok(T::count(hits) / T::count(truth.len()))
}
