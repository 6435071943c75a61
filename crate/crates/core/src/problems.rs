//! The four constrained search problems as maps from free parameters to
//! angle schedules, and the objective each one exposes to the optimizer.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schedule::{AngleSchedule, StepAngles};
use crate::subspace::{cost, SearchSize};

/// Which angles are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ProblemKind {
    /// Oracle fixed at π, one diffusion angle per step.
    P1,
    /// Oracle fixed at π, one diffusion angle shared by all steps.
    P2,
    /// One angle shared by every oracle and diffusion phase.
    P3,
    /// Independent oracle and diffusion angles for every step.
    P4,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [Self::P1, Self::P2, Self::P3, Self::P4];

    pub fn number(&self) -> u8 {
        match self {
            Self::P1 => 1,
            Self::P2 => 2,
            Self::P3 => 3,
            Self::P4 => 4,
        }
    }

    /// True for the single-parameter problems.
    pub fn is_one_dimensional(&self) -> bool {
        matches!(self, Self::P2 | Self::P3)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['P', 'p']) {
            "1" => Ok(Self::P1),
            "2" => Ok(Self::P2),
            "3" => Ok(Self::P3),
            "4" => Ok(Self::P4),
            _ => Err(Error::InvalidConfig(format!(
                "unknown problem {s:?}, expected 1-4"
            ))),
        }
    }
}

/// Closed interval `[lo, hi]` for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidConfig(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn clamp(&self, x: T) -> T {
        x.max(self.lo).min(self.hi)
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Per-coordinate box constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds<T> {
    intervals: Vec<Interval<T>>,
}

impl<T: Real> Bounds<T> {
    pub fn new(intervals: Vec<Interval<T>>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidConfig(
                "bounds must have at least one coordinate".into(),
            ));
        }
        Ok(Self { intervals })
    }

    pub fn uniform(interval: Interval<T>, dim: usize) -> Result<Self> {
        Self::new(vec![interval; dim])
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.intervals).all(|(v, i)| i.contains(*v))
    }

    pub fn clamp_in_place(&self, x: &mut [T]) {
        for (v, i) in x.iter_mut().zip(&self.intervals) {
            *v = i.clamp(*v);
        }
    }

    pub fn midpoint(&self) -> Vec<T> {
        self.intervals
            .iter()
            .map(|i| (i.lo + i.hi) * T::lit(0.5))
            .collect()
    }
}

/// Parameter values together with the box they must stay in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterVector<T> {
    values: Vec<T>,
    bounds: Bounds<T>,
}

impl<T: Real> ParameterVector<T> {
    pub fn new(values: Vec<T>, bounds: Bounds<T>) -> Result<Self> {
        if values.len() != bounds.dim() {
            return Err(Error::ParameterLength {
                expected: bounds.dim(),
                got: values.len(),
            });
        }
        if !bounds.contains(&values) {
            return Err(Error::InvalidConfig(
                "parameter vector outside its bounds".into(),
            ));
        }
        Ok(Self { values, bounds })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn bounds(&self) -> &Bounds<T> {
        &self.bounds
    }
}

pub fn dimension(problem: ProblemKind, p: usize) -> usize {
    match problem {
        ProblemKind::P1 => p,
        ProblemKind::P2 | ProblemKind::P3 => 1,
        ProblemKind::P4 => 2 * p,
    }
}

/// Builds the `p`-step schedule encoded by `params`.
pub fn expand<T: Real>(problem: ProblemKind, params: &[T], p: usize) -> Result<AngleSchedule<T>> {
    let expected = dimension(problem, p);
    if params.len() != expected {
        return Err(Error::ParameterLength {
            expected,
            got: params.len(),
        });
    }
    let pi = T::PI();
    let steps = match problem {
        ProblemKind::P1 => params.iter().map(|&b| StepAngles::new(pi, b)).collect(),
        ProblemKind::P2 => vec![StepAngles::new(pi, params[0]); p],
        ProblemKind::P3 => vec![StepAngles::new(params[0], params[0]); p],
        ProblemKind::P4 => (0..p)
            .map(|i| StepAngles::new(params[i], params[p + i]))
            .collect(),
    };
    Ok(AngleSchedule::new(steps))
}

/// Cost `1 − P(success)` of the schedule encoded by `params` at `N = 2ⁿ`.
pub fn objective<T: Real>(
    problem: ProblemKind,
    params: &[T],
    size: SearchSize,
    p: usize,
) -> Result<T> {
    Ok(cost(&expand(problem, params, p)?, size))
}

/// `[0, π]` for the shared-angle problems, the full period otherwise.
pub fn default_bounds<T: Real>(problem: ProblemKind, p: usize) -> Bounds<T> {
    let hi = if problem.is_one_dimensional() {
        T::PI()
    } else {
        T::two_pi()
    };
    Bounds {
        intervals: vec![Interval { lo: T::zero(), hi }; dimension(problem, p)],
    }
}

/// The parameters reproducing plain Grover (every free angle equal to π).
pub fn grover_params<T: Real>(problem: ProblemKind, p: usize) -> Vec<T> {
    vec![T::PI(); dimension(problem, p)]
}

/// Maps an angle to its mirror in `[0, π]` (`α → 2π − α` above π).
pub fn canonical_half_period<T: Real>(angle: T) -> T {
    let a = angle.wrap_angle();
    if a > T::PI() {
        T::two_pi() - a
    } else {
        a
    }
}

/// Objective bound to a problem, size and depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemObjective {
    pub problem: ProblemKind,
    pub size: SearchSize,
    pub p: usize,
}

impl ProblemObjective {
    pub fn new(problem: ProblemKind, size: SearchSize, p: usize) -> Self {
        Self { problem, size, p }
    }

    pub fn eval<T: Real>(&self, params: &[T]) -> Result<T> {
        objective(self.problem, params, self.size, self.p)
    }

    pub fn dimension(&self) -> usize {
        dimension(self.problem, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{grover_pmax, grover_probability};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn size(n: u32) -> SearchSize {
        SearchSize::new(n).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(ProblemKind::P4, 3), 6);
        assert_eq!(dimension(ProblemKind::P3, 5), 1);
        assert_eq!(dimension(ProblemKind::P1, 2), 2);
        assert_eq!(dimension(ProblemKind::P2, 7), 1);
    }

    #[test]
    fn expand_examples() {
        let s = expand(ProblemKind::P3, &[2.12], 2).unwrap();
        assert_eq!(s, AngleSchedule::from_pairs(&[(2.12, 2.12), (2.12, 2.12)]));
        assert_eq!(
            expand(ProblemKind::P3, &[PI], 4).unwrap(),
            AngleSchedule::grover(4)
        );
        assert_eq!(
            expand(ProblemKind::P1, &[PI, PI], 2).unwrap(),
            AngleSchedule::grover(2)
        );
        let s = expand(ProblemKind::P4, &[0.1, 0.2, 0.3, 0.4], 2).unwrap();
        assert_eq!(s, AngleSchedule::from_pairs(&[(0.1, 0.3), (0.2, 0.4)]));
        let s = expand(ProblemKind::P2, &[1.5], 3).unwrap();
        assert_eq!(s, AngleSchedule::from_pairs(&[(PI, 1.5); 3]));
    }

    #[test]
    fn expand_rejects_wrong_length() {
        assert_eq!(
            expand(ProblemKind::P4, &[1.0, 2.0], 2),
            Err(Error::ParameterLength {
                expected: 4,
                got: 2
            })
        );
        assert!(objective(ProblemKind::P1, &[1.0], size(3), 2).is_err());
    }

    #[test]
    fn objective_examples() {
        assert_abs_diff_eq!(
            objective(ProblemKind::P3, &[PI], size(3), 2).unwrap(),
            0.054_687_5,
            epsilon = 1e-13
        );
        assert!(objective(ProblemKind::P3, &[2.12], size(3), 2).unwrap() < 1e-3);
        for n in 2..=10 {
            let p = grover_pmax(size(n)) as usize;
            let c = objective(ProblemKind::P2, &[PI], size(n), p).unwrap();
            assert_abs_diff_eq!(
                c,
                1.0 - grover_probability::<f64>(p as u64, size(n)),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn default_bounds_examples() {
        for p in 1..6 {
            let b = default_bounds::<f64>(ProblemKind::P3, p);
            assert_eq!(b.intervals(), &[Interval { lo: 0.0, hi: PI }]);
            let b = default_bounds::<f64>(ProblemKind::P2, p);
            assert_eq!(b.intervals(), &[Interval { lo: 0.0, hi: PI }]);
        }
        let b = default_bounds::<f64>(ProblemKind::P4, 1);
        assert_eq!(b.dim(), 2);
        assert!(b
            .intervals()
            .iter()
            .all(|i| i.lo == 0.0 && i.hi == 2.0 * PI));
    }

    #[test]
    fn grover_setting_is_feasible() {
        for problem in ProblemKind::ALL {
            for p in 1..8 {
                let b = default_bounds::<f64>(problem, p);
                assert!(b.contains(&grover_params(problem, p)));
            }
        }
    }

    #[test]
    fn parse_problem_kind() {
        assert_eq!("3".parse::<ProblemKind>().unwrap(), ProblemKind::P3);
        assert_eq!("P1".parse::<ProblemKind>().unwrap(), ProblemKind::P1);
        assert!("5".parse::<ProblemKind>().is_err());
    }

    #[test]
    fn canonicalization() {
        assert_abs_diff_eq!(
            canonical_half_period(2.0 * PI - 2.12),
            2.12,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(canonical_half_period(2.12), 2.12, epsilon = 1e-15);
        assert_abs_diff_eq!(canonical_half_period(PI), PI, epsilon = 1e-15);
    }

    #[test]
    fn parameter_vector_validation() {
        let b = default_bounds::<f64>(ProblemKind::P3, 2);
        assert!(ParameterVector::new(vec![1.0], b.clone()).is_ok());
        assert!(ParameterVector::new(vec![4.0], b.clone()).is_err());
        assert!(ParameterVector::new(vec![1.0, 1.0], b).is_err());
    }

    proptest! {
        #[test]
        fn shared_angle_mirror_symmetry(alpha in 0.0..(2.0 * PI), n in 2u32..=10, p in 1usize..8) {
            let a = objective(ProblemKind::P3, &[alpha], size(n), p).unwrap();
            let b = objective(ProblemKind::P3, &[2.0 * PI - alpha], size(n), p).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn expand_is_injective_on_p4(
            x in proptest::collection::vec(0.0..(2.0 * PI), 6),
            y in proptest::collection::vec(0.0..(2.0 * PI), 6),
        ) {
            let sx = expand(ProblemKind::P4, &x, 3).unwrap();
            let sy = expand(ProblemKind::P4, &y, 3).unwrap();
            prop_assert_eq!(sx == sy, x == y);
        }
    }
}
