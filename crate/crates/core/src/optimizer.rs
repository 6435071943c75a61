//! Derivative-free minimization: a bounded Nelder–Mead simplex, a
//! basin-hopping driver around it, and an exhaustive grid scanner used to
//! validate both in one and two dimensions.
//!
//! Objectives are `Fn(&[T]) -> Result<T>`; an evaluation error aborts the run
//! and is returned unchanged.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::{Bounds, ParameterVector};
use crate::scalar::Real;

/// Stopping rules for [`local_minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOptions<T> {
    /// Simplex diameter below which the search stops.
    pub x_tol: T,
    /// Evaluation budget per coordinate.
    pub evals_per_dim: usize,
    /// Initial simplex edge as a fraction of each coordinate's bound width.
    pub initial_step: T,
}

impl<T: Real> Default for LocalOptions<T> {
    fn default() -> Self {
        Self {
            x_tol: T::lit(1e-8),
            evals_per_dim: 500,
            initial_step: T::lit(0.05),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum<T> {
    pub params: Vec<T>,
    pub cost: T,
    pub evaluations: usize,
}

/// Bounded Nelder–Mead. Proposals leaving the box are clamped onto it.
///
/// The start point is a simplex vertex, so the returned cost never exceeds
/// the cost at `start`.
pub fn local_minimize<T, F>(
    objective: F,
    start: &[T],
    bounds: &Bounds<T>,
    options: &LocalOptions<T>,
) -> Result<LocalMinimum<T>>
where
    T: Real,
    F: Fn(&[T]) -> Result<T>,
{
    let dim = bounds.dim();
    if start.len() != dim {
        return Err(Error::ParameterLength {
            expected: dim,
            got: start.len(),
        });
    }
    if !bounds.contains(start) {
        return Err(Error::InvalidConfig(
            "local search start lies outside the bounds".into(),
        ));
    }

    let budget = options.evals_per_dim * dim;
    let evals = Cell::new(0usize);
    let eval = |x: &[T]| -> Result<T> {
        evals.set(evals.get() + 1);
        objective(x)
    };

    // Vertex 0 is the start; vertex i moves coordinate i-1 towards the
    // interior so the initial simplex is never flattened by clamping.
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    let f0 = eval(start)?;
    simplex.push((start.to_vec(), f0));
    for (i, interval) in bounds.intervals().iter().enumerate() {
        let mut x = start.to_vec();
        let mut step = interval.width() * options.initial_step;
        if step == T::zero() {
            step = options.initial_step;
        }
        x[i] = if x[i] + step <= interval.hi {
            x[i] + step
        } else {
            x[i] - step
        };
        bounds.clamp_in_place(&mut x);
        let fx = eval(&x)?;
        simplex.push((x, fx));
    }

    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));

    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if evals.get() >= budget || diameter(&simplex) < options.x_tol {
            break;
        }

        let centroid = {
            let mut c = vec![T::zero(); dim];
            for (x, _) in &simplex[..dim] {
                for (ci, xi) in c.iter_mut().zip(x) {
                    *ci = *ci + *xi;
                }
            }
            let k = T::lit(dim as f64);
            c.iter_mut().for_each(|ci| *ci = *ci / k);
            c
        };
        let along = |t: T| -> Vec<T> {
            let worst = &simplex[dim].0;
            let mut x: Vec<T> = centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect();
            bounds.clamp_in_place(&mut x);
            x
        };

        let best_f = simplex[0].1;
        let second_worst_f = simplex[dim - 1].1;
        let worst_f = simplex[dim].1;

        let xr = along(alpha);
        let fr = eval(&xr)?;
        if fr < best_f {
            let xe = along(gamma);
            let fe = eval(&xe)?;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst_f {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst_f {
            let xc = along(rho * alpha);
            let fc = eval(&xc)?;
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc)?;
            (xc, fc)
        };
        if fc < worst_f.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // Shrink towards the best vertex.
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (v, b) in vertex.0.iter_mut().zip(&best) {
                *v = *b + sigma * (*v - *b);
            }
            vertex.1 = eval(&vertex.0)?;
        }
    }

    let (params, cost) = simplex.swap_remove(0);
    Ok(LocalMinimum {
        params,
        cost,
        evaluations: evals.get(),
    })
}

fn diameter<T: Real>(simplex: &[(Vec<T>, T)]) -> T {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
        })
        .fold(T::zero(), T::max)
}

/// Settings of the basin-hopping chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinHoppingConfig<T> {
    pub hop_count: usize,
    pub perturbation_scale: T,
    pub temperature: T,
    pub rng_seed: u64,
    pub bounds: Bounds<T>,
    /// Starting point; the midpoint of `bounds` when absent.
    pub start: Option<Vec<T>>,
}

impl<T: Real> BasinHoppingConfig<T> {
    /// 100 hops, 0.5 rad steps, temperature 0.01, seed 0.
    pub fn with_defaults(bounds: Bounds<T>) -> Self {
        Self {
            hop_count: 100,
            perturbation_scale: T::lit(0.5),
            temperature: T::lit(0.01),
            rng_seed: 0,
            bounds,
            start: None,
        }
    }

    // Negated comparisons so NaN fails validation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.hop_count < 1 {
            return Err(Error::InvalidConfig("hop_count must be at least 1".into()));
        }
        if !(self.perturbation_scale > T::zero()) {
            return Err(Error::InvalidConfig(
                "perturbation_scale must be positive".into(),
            ));
        }
        if !(self.temperature >= T::zero()) {
            return Err(Error::InvalidConfig(
                "temperature must be non-negative".into(),
            ));
        }
        if let Some(start) = &self.start {
            if start.len() != self.bounds.dim() {
                return Err(Error::ParameterLength {
                    expected: self.bounds.dim(),
                    got: start.len(),
                });
            }
        }
        Ok(())
    }
}

/// One hop of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry<T> {
    /// 0 is the initial local minimization.
    pub hop: usize,
    pub candidate_cost: T,
    pub accepted: bool,
    /// Cost of the chain's current point after this hop.
    pub accepted_cost: T,
    pub best_cost: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult<T> {
    pub best_params: ParameterVector<T>,
    pub best_cost: T,
    pub success_probability: T,
    pub evaluations: usize,
    pub trace: Vec<TraceEntry<T>>,
}

/// Basin hopping: perturb the current point uniformly by at most
/// `perturbation_scale` per coordinate, clamp, minimize locally, then accept
/// on improvement or with Metropolis probability `exp(−Δ/temperature)`.
///
/// Deterministic for a fixed config (ChaCha8 seeded from `rng_seed`).
pub fn basin_hop<T, F>(
    objective: F,
    config: &BasinHoppingConfig<T>,
) -> Result<OptimizationResult<T>>
where
    T: Real,
    F: Fn(&[T]) -> Result<T>,
{
    config.validate()?;
    let bounds = &config.bounds;
    let local = LocalOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let mut start = config.start.clone().unwrap_or_else(|| bounds.midpoint());
    bounds.clamp_in_place(&mut start);

    let first = local_minimize(&objective, &start, bounds, &local)?;
    let mut evaluations = first.evaluations;
    let mut current = (first.params, first.cost);
    let mut best = current.clone();
    let mut trace = vec![TraceEntry {
        hop: 0,
        candidate_cost: best.1,
        accepted: true,
        accepted_cost: best.1,
        best_cost: best.1,
    }];

    let scale = config.perturbation_scale.to_f64_lossy();
    for hop in 1..=config.hop_count {
        let mut trial: Vec<T> = current
            .0
            .iter()
            .map(|&x| x + T::lit(rng.gen_range(-scale..=scale)))
            .collect();
        bounds.clamp_in_place(&mut trial);

        let found = local_minimize(&objective, &trial, bounds, &local)?;
        evaluations += found.evaluations;

        let delta = found.cost - current.1;
        // Draw unconditionally so the random stream does not depend on costs.
        let u: f64 = rng.gen();
        let accepted = if delta < T::zero() {
            true
        } else if config.temperature > T::zero() {
            u < (-(delta / config.temperature)).exp().to_f64_lossy()
        } else {
            false
        };
        let candidate_cost = found.cost;
        if accepted {
            current = (found.params, found.cost);
            if current.1 < best.1 {
                best = current.clone();
            }
        }
        trace.push(TraceEntry {
            hop,
            candidate_cost,
            accepted,
            accepted_cost: current.1,
            best_cost: best.1,
        });
    }

    let (params, best_cost) = best;
    Ok(OptimizationResult {
        best_params: ParameterVector::new(params, bounds.clone())?,
        best_cost,
        success_probability: T::one() - best_cost,
        evaluations,
        trace,
    })
}

/// Exhaustive evaluation on a uniform grid (endpoints included).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScan<T> {
    /// Axis-major: the first coordinate varies slowest.
    pub points: Vec<(Vec<T>, T)>,
    /// Index into `points` of the smallest cost (lowest index on ties).
    pub argmin: usize,
}

impl<T: Real> GridScan<T> {
    pub fn best(&self) -> &(Vec<T>, T) {
        &self.points[self.argmin]
    }
}

/// Points per axis, including both endpoints.
pub fn grid_axis<T: Real>(lo: T, hi: T, resolution: usize) -> Vec<T> {
    let steps = T::lit((resolution - 1) as f64);
    (0..resolution)
        .map(|k| lo + (hi - lo) * T::lit(k as f64) / steps)
        .collect()
}

pub fn grid_scan<T, F>(objective: F, bounds: &Bounds<T>, resolution: usize) -> Result<GridScan<T>>
where
    T: Real,
    F: Fn(&[T]) -> Result<T> + Sync,
{
    if bounds.dim() > 2 {
        return Err(Error::InvalidConfig(format!(
            "grid scan supports at most 2 dimensions, got {}",
            bounds.dim()
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidConfig(
            "grid resolution must be at least 2".into(),
        ));
    }
    let axes: Vec<Vec<T>> = bounds
        .intervals()
        .iter()
        .map(|i| grid_axis(i.lo, i.hi, resolution))
        .collect();
    let coords: Vec<Vec<T>> = match axes.as_slice() {
        [x] => x.iter().map(|&a| vec![a]).collect(),
        [x, y] => x
            .iter()
            .flat_map(|&a| y.iter().map(move |&b| vec![a, b]))
            .collect(),
        _ => unreachable!(),
    };
    let costs: Vec<T> = coords
        .par_iter()
        .map(|c| objective(c))
        .collect::<Result<_>>()?;

    let mut argmin = 0;
    for (i, c) in costs.iter().enumerate() {
        if *c < costs[argmin] {
            argmin = i;
        }
    }
    Ok(GridScan {
        points: coords.into_iter().zip(costs).collect(),
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{default_bounds, Interval, ProblemKind, ProblemObjective};
    use crate::subspace::SearchSize;
    use std::f64::consts::PI;

    fn box1(lo: f64, hi: f64) -> Bounds<f64> {
        Bounds::new(vec![Interval::new(lo, hi).unwrap()]).unwrap()
    }

    #[test]
    fn convex_one_dimensional() {
        let f = |x: &[f64]| Ok((x[0] - 1.0).powi(2));
        let m = local_minimize(f, &[2.5], &box1(0.0, PI), &LocalOptions::default()).unwrap();
        assert!((m.params[0] - 1.0).abs() < 1e-6, "{:?}", m.params);
    }

    #[test]
    fn optimum_at_start_is_kept() {
        let f = |x: &[f64]| Ok((x[0] - 1.0).powi(2) + (x[1] + 0.5).powi(2));
        let b = Bounds::uniform(Interval::new(-2.0, 2.0).unwrap(), 2).unwrap();
        let m = local_minimize(f, &[1.0, -0.5], &b, &LocalOptions::default()).unwrap();
        assert_eq!(m.cost, 0.0);
        assert_eq!(m.params, vec![1.0, -0.5]);
    }

    #[test]
    fn minimum_on_the_boundary_is_reached_by_clamping() {
        let f = |x: &[f64]| Ok(x[0] + x[1]);
        let b = Bounds::uniform(Interval::new(0.0, 1.0).unwrap(), 2).unwrap();
        let m = local_minimize(f, &[0.7, 0.4], &b, &LocalOptions::default()).unwrap();
        assert!(m.cost < 1e-7);
        assert!(b.contains(&m.params));
    }

    #[test]
    fn shared_angle_local_search_from_three_radians() {
        let obj = ProblemObjective::new(ProblemKind::P3, SearchSize::new(3).unwrap(), 2);
        let b = default_bounds(ProblemKind::P3, 2);
        let start_cost = obj.eval(&[3.0]).unwrap();
        let m = local_minimize(
            |x: &[f64]| obj.eval(x),
            &[3.0],
            &b,
            &LocalOptions::default(),
        )
        .unwrap();
        let grover_cost = obj.eval(&[PI]).unwrap();
        assert!(m.cost <= start_cost);
        assert!(m.cost <= grover_cost + 1e-12);
    }

    #[test]
    fn evaluation_errors_propagate() {
        let f = |_: &[f64]| -> Result<f64> { Err(Error::InvariantViolation("boom".into())) };
        assert!(local_minimize(f, &[0.5], &box1(0.0, 1.0), &LocalOptions::default()).is_err());
        let cfg = BasinHoppingConfig::with_defaults(box1(0.0, 1.0));
        assert!(basin_hop(f, &cfg).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = BasinHoppingConfig::with_defaults(box1(0.0, 1.0));
        cfg.hop_count = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = BasinHoppingConfig::with_defaults(box1(0.0, 1.0));
        cfg.perturbation_scale = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = BasinHoppingConfig::with_defaults(box1(0.0, 1.0));
        cfg.temperature = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn basin_hop_escapes_local_minimum() {
        // Double well on [-2, 2], deeper well at x = -1.
        let f = |x: &[f64]| Ok((x[0] * x[0] - 1.0).powi(2) + 0.3 * x[0]);
        let mut cfg = BasinHoppingConfig::with_defaults(box1(-2.0, 2.0));
        cfg.start = Some(vec![1.0]);
        cfg.perturbation_scale = 1.5;
        let r = basin_hop(f, &cfg).unwrap();
        assert!(r.best_params.values()[0] < 0.0);
        assert!((r.success_probability - (1.0 - r.best_cost)).abs() < 1e-12);
    }

    #[test]
    fn trace_best_is_monotone_and_minimal() {
        let f = |x: &[f64]| Ok((3.0 * x[0]).sin() + (5.0 * x[1]).cos() + 0.1 * x[0] * x[1]);
        let b = Bounds::uniform(Interval::new(-3.0, 3.0).unwrap(), 2).unwrap();
        let cfg = BasinHoppingConfig::with_defaults(b);
        let r = basin_hop(f, &cfg).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1].best_cost <= w[0].best_cost);
        }
        let min_accepted = r
            .trace
            .iter()
            .map(|t| t.accepted_cost)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min_accepted, r.best_cost);
        assert_eq!(r.trace.len(), cfg.hop_count + 1);
    }

    #[test]
    fn basin_hop_is_deterministic() {
        let f = |x: &[f64]| Ok((3.0 * x[0]).sin() * (2.0 * x[1]).cos());
        let b = Bounds::uniform(Interval::new(0.0, 6.0).unwrap(), 2).unwrap();
        let mut cfg = BasinHoppingConfig::with_defaults(b);
        cfg.rng_seed = 42;
        let a = basin_hop(f, &cfg).unwrap();
        let b = basin_hop(f, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_scan_constant_objective_ties_to_first_point() {
        let g = grid_scan(|_: &[f64]| Ok(1.0), &box1(0.0, 1.0), 11).unwrap();
        assert_eq!(g.argmin, 0);
        assert!(g.points.iter().all(|(_, c)| *c == 1.0));
        assert_eq!(g.points.len(), 11);
        assert_eq!(g.points[10].0, vec![1.0]);
    }

    #[test]
    fn grid_scan_two_dimensional_order() {
        let b = Bounds::uniform(Interval::new(0.0, 1.0).unwrap(), 2).unwrap();
        let g = grid_scan(
            |x: &[f64]| Ok((x[0] - 0.5).powi(2) + (x[1] - 1.0).powi(2)),
            &b,
            3,
        )
        .unwrap();
        assert_eq!(g.points.len(), 9);
        assert_eq!(g.points[1].0, vec![0.0, 0.5]);
        assert_eq!(g.best().0, vec![0.5, 1.0]);
    }

    #[test]
    fn grid_scan_rejects_bad_input() {
        let b = Bounds::uniform(Interval::new(0.0, 1.0).unwrap(), 3).unwrap();
        assert!(grid_scan(|_: &[f64]| Ok(0.0), &b, 5).is_err());
        assert!(grid_scan(|_: &[f64]| Ok(0.0), &box1(0.0, 1.0), 1).is_err());
    }
}
