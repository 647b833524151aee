//! Scalar abstraction for the numeric parts of the solver.
//!
//! Scores, probabilities and entropies are computed in any [`Real`] type.
//! `f64` is the working precision everywhere else in the workspace; `f32`
//! is supported for memory-constrained callers at a correspondingly looser
//! normalization tolerance.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal or configuration value.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 is representable")
    }

    /// Converts a count.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    /// Tolerance used when checking that `n` probabilities sum to one.
    fn normalization_tolerance(n: usize) -> Self {
        let floor = Self::lit(1e-9);
        let rounding = Self::epsilon() * Self::count(n.max(1)) * Self::lit(4.0);
        floor.max(rounding)
    }
}

impl Real for f32 {}
impl Real for f64 {}
