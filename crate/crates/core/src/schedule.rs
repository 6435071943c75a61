//! Angle schedules for the alternating oracle/diffusion sequence.

use serde::Serialize;

use crate::scalar::Real;

/// One oracle/diffusion pair: the oracle phase `alpha` followed by the
/// diffusion phase `beta`, both kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepAngles<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> StepAngles<T> {
    pub fn new(alpha: T, beta: T) -> Self {
        Self {
            alpha: alpha.wrap_angle(),
            beta: beta.wrap_angle(),
        }
    }

    /// Standard Grover step: both phases equal to π.
    pub fn grover() -> Self {
        Self::new(T::PI(), T::PI())
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// The same step with both angles negated (mod 2π).
    pub fn negated(&self) -> Self {
        Self::new(-self.alpha, -self.beta)
    }
}

/// Ordered list of steps; step 0 acts first on the initial state.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AngleSchedule<T> {
    steps: Vec<StepAngles<T>>,
}

impl<T: Real> AngleSchedule<T> {
    pub fn new(steps: Vec<StepAngles<T>>) -> Self {
        Self { steps }
    }

    pub fn empty() -> Self {
        Self { steps: Vec::new() }
    }

    /// `p` repetitions of the same step.
    pub fn repeated(step: StepAngles<T>, p: usize) -> Self {
        Self {
            steps: vec![step; p],
        }
    }

    pub fn grover(p: usize) -> Self {
        Self::repeated(StepAngles::grover(), p)
    }

    pub fn from_pairs(pairs: &[(T, T)]) -> Self {
        Self::new(pairs.iter().map(|&(a, b)| StepAngles::new(a, b)).collect())
    }

    pub fn steps(&self) -> &[StepAngles<T>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self::new(self.steps.iter().map(StepAngles::negated).collect())
    }
}
