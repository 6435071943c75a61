use rayon::prelude::*;
use serde::Serialize;

use super::density::{simulate_noisy, DensityMatrix};
use super::kraus::NoiseModel;
use crate::circuit::build_search_circuit;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schedule::AngleSchedule;
use crate::statevector::SearchInstance;

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space<T: Real>(lo: T, hi: T, count: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo) || count == 0 {
        return Err(Error::InvalidConfig(format!(
            "bad log range [{lo}, {hi}] with {count} points"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::lit((count - 1) as f64);
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            _ if i == count - 1 => hi,
            _ => (a + (b - a) * T::lit(i as f64) / last).exp(),
        })
        .collect())
}

/// Cartesian `T₁ × T₂` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    pub t1: Vec<T>,
    pub t2: Vec<T>,
}

impl<T: Real> SweepGrid<T> {
    pub fn log(t1: (T, T), t2: (T, T), points: usize) -> Result<Self> {
        Ok(Self {
            t1: log_space(t1.0, t1.1, points)?,
            t2: log_space(t2.0, t2.1, points)?,
        })
    }

    pub fn len(&self) -> usize {
        self.t1.len() * self.t2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major over `t1`, then `t2`.
    pub fn points(&self) -> Vec<(T, T)> {
        self.t1
            .iter()
            .flat_map(|&a| self.t2.iter().map(move |&b| (a, b)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub t1: T,
    pub t2: T,
    /// `false` when `T₂ > 2T₁`; such points are not simulated.
    pub physical: bool,
    pub probability: Option<T>,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult<T> {
    pub rows: Vec<SweepRow<T>>,
    /// Indices into `rows` where the flag is set.
    pub significant: Vec<usize>,
}

impl<T: Real> SweepResult<T> {
    /// Rows with `T₁ = T₂`, in grid order.
    pub fn diagonal(&self) -> Vec<&SweepRow<T>> {
        self.rows.iter().filter(|r| r.t1 == r.t2).collect()
    }

    /// Fraction of physical points that carry the flag.
    pub fn significant_fraction(&self) -> f64 {
        let physical = self.rows.iter().filter(|r| r.physical).count();
        if physical == 0 {
            0.0
        } else {
            self.significant.len() as f64 / physical as f64
        }
    }
}

/// Significance test for one grid point: the noisy probability beats the
/// reference by more than 5 % of the reference.
pub fn exceeds_threshold<T: Real>(probability: T, reference: T) -> bool {
    (probability - reference) / reference > T::lit(0.05)
}

/// Simulates the compiled search circuit at every grid point, starting from
/// `|0…0⟩`, and records the probability of the marked item.
///
/// `durations` are `(duration_1q, duration_2q)`. Points are evaluated in
/// parallel; the output order follows [`SweepGrid::points`].
pub fn t1t2_sweep<T: Real>(
    instance: &SearchInstance,
    schedule: &AngleSchedule<T>,
    grid: &SweepGrid<T>,
    durations: (T, T),
    reference_probability: T,
) -> Result<SweepResult<T>> {
    let circuit = build_search_circuit(instance, schedule)?;
    let initial = DensityMatrix::basis(instance.qubits() as usize, 0)?;
    let omega = instance.omega() as usize;

    let rows: Vec<SweepRow<T>> = grid
        .points()
        .into_par_iter()
        .map(|(t1, t2)| {
            if t2 > T::lit(2.0) * t1 {
                return Ok(SweepRow {
                    t1,
                    t2,
                    physical: false,
                    probability: None,
                    exceeds: false,
                });
            }
            let noise = NoiseModel::with_durations(t1, t2, durations.0, durations.1)?;
            let rho = simulate_noisy(&circuit, &noise, &initial)?;
            let p = rho.probability(omega);
            Ok(SweepRow {
                t1,
                t2,
                physical: true,
                probability: Some(p),
                exceeds: exceeds_threshold(p, reference_probability),
            })
        })
        .collect::<Result<_>>()?;

    if !rows.iter().any(|r| r.physical) {
        return Err(Error::Unphysical(
            "no grid point satisfies T2 <= 2*T1".into(),
        ));
    }
    let significant = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.exceeds)
        .map(|(i, _)| i)
        .collect();
    Ok(SweepResult { rows, significant })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_endpoints_are_exact() {
        let v = log_space(1e-6f64, 1e-2, 5).unwrap();
        assert_eq!(v[0], 1e-6);
        assert_eq!(v[4], 1e-2);
        assert!((v[2] - 1e-4).abs() < 1e-18);
        assert!(log_space(0.0, 1.0, 3).is_err());
        assert!(log_space(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn unphysical_points_are_marked_not_simulated() {
        let w = SearchInstance::from_bitstring("11").unwrap();
        let grid = SweepGrid {
            t1: vec![1e-6],
            t2: vec![1e-6, 3e-6],
        };
        let res = t1t2_sweep(&w, &AngleSchedule::grover(1), &grid, (50e-9, 150e-9), 1.0).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert!(res.rows[0].physical && res.rows[0].probability.is_some());
        assert!(!res.rows[1].physical && res.rows[1].probability.is_none());
    }

    #[test]
    fn fully_unphysical_grid_is_an_error() {
        let w = SearchInstance::from_bitstring("11").unwrap();
        let grid = SweepGrid {
            t1: vec![1e-6],
            t2: vec![1e-5],
        };
        assert!(t1t2_sweep(&w, &AngleSchedule::grover(1), &grid, (50e-9, 150e-9), 1.0).is_err());
    }

    #[test]
    fn threshold_is_relative() {
        assert!(exceeds_threshold(0.9999, 0.9453));
        assert!(!exceeds_threshold(0.99, 0.9453));
    }
}
