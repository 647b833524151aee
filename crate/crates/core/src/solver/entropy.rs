use crate::scalar::Real;

use super::SolverError;

/// Base-2 entropy of a probability vector, with 0 log 0 taken as 0.
pub fn entropy_bits<T: Real>(probabilities: &[T]) -> Result<T, SolverError> {
    if probabilities.iter().any(|p| p.is_nan() || *p < T::zero()) {
        return Err(SolverError::NotNormalized { sum: f64::NAN });
    }
    let sum: T = probabilities.iter().copied().sum();
    if (sum - T::one()).abs() > T::normalization_tolerance(probabilities.len()) {
        return Err(SolverError::NotNormalized { sum: sum.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(entropy_unchecked(probabilities.iter().copied()))
}

pub(crate) fn entropy_unchecked<T: Real>(probabilities: impl Iterator<Item = T>) -> T {
    let h = probabilities.filter(|p| *p > T::zero()).fold(T::zero(), |acc, p| acc - p * p.log2());
    // -0.0 for point masses.
    h.max(T::zero())
}
