//! Experiment runners behind the command-line front end.
//!
//! Every function returns plain rows; [`render`] turns them into CSV or JSON.
//! All work is deterministic for a fixed seed, and rows are assembled in a
//! fixed order even where the computation fans out across threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{t1t2_sweep, NoiseModel, SweepGrid, SweepRow};
use crate::optimizer::{basin_hop, grid_scan, BasinHoppingConfig, OptimizationResult};
use crate::problems::{
    canonical_half_period, default_bounds, expand, grover_params, Bounds, Interval, ProblemKind,
    ProblemObjective,
};
use crate::scalar::Real;
use crate::schedule::AngleSchedule;
use crate::statevector::{run_sequence, SearchInstance};
use crate::subspace::{grover_angle, grover_pmax, grover_probability, SearchSize};

/// Largest `n` cross-checked against the statevector after optimizing.
const STATEVECTOR_CHECK_QUBITS: u32 = 12;

/// 12 significant digits, trailing zeros trimmed; scientific outside
/// `[1e-5, 1e12)`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

/// Number of oracle calls: fixed or Grover's optimum for the size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PSpec {
    #[default]
    Auto,
    Fixed(usize),
}

impl PSpec {
    pub fn resolve(self, size: SearchSize) -> usize {
        match self {
            PSpec::Auto => grover_pmax(size) as usize,
            PSpec::Fixed(p) => p,
        }
    }
}

impl FromStr for PSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(PSpec::Auto);
        }
        match s.parse::<usize>() {
            Ok(p) if p >= 1 => Ok(PSpec::Fixed(p)),
            _ => Err(Error::InvalidConfig(format!(
                "p must be a positive integer or 'auto', got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for PSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PSpec::Auto => f.write_str("auto"),
            PSpec::Fixed(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub hops: usize,
    pub seed: u64,
    pub step: f64,
    pub temperature: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            hops: 100,
            seed: 0,
            step: 0.5,
            temperature: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown format {other:?} (csv or json)"
            ))),
        }
    }
}

/// A row with a fixed CSV schema.
pub trait Record: Serialize {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn render<R: Record>(rows: &[R], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::InvalidConfig(format!("csv output failed: {e}"));
            w.write_record(R::header()).map_err(io)?;
            for r in rows {
                w.write_record(r.fields()).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::InvalidConfig(format!("csv output failed: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Json => to_json(&rows),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("json output failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn size_in(n: u32, lo: u32, hi: u32) -> Result<SearchSize> {
    if !(lo..=hi).contains(&n) {
        return Err(Error::QubitCount {
            n,
            min: lo,
            max: hi,
        });
    }
    SearchSize::new(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverRow {
    pub n: u32,
    pub big_n: u64,
    pub phi: f64,
    pub p_max: u64,
    pub probability: f64,
}

impl Record for GroverRow {
    fn header() -> &'static [&'static str] {
        &["n", "N", "phi", "p_max", "probability"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.big_n.to_string(),
            fmt_sig(self.phi),
            self.p_max.to_string(),
            fmt_sig(self.probability),
        ]
    }
}

/// Closed-form Grover baseline for `n_min..=n_max` (2 ≤ n ≤ 24).
pub fn grover_table(n_min: u32, n_max: u32) -> Result<Vec<GroverRow>> {
    if n_min > n_max {
        return Err(Error::InvalidConfig(format!(
            "empty qubit range {n_min}..={n_max}"
        )));
    }
    (n_min..=n_max)
        .map(|n| {
            let size = size_in(n, 2, 24)?;
            let p_max = grover_pmax(size);
            Ok(GroverRow {
                n,
                big_n: size.dim(),
                phi: grover_angle::<f64>(size).phi,
                p_max,
                probability: grover_probability(p_max, size),
            })
        })
        .collect()
}

/// Optimized probability against Grover's at the same number of calls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub problem: ProblemKind,
    pub n: u32,
    pub big_n: u64,
    pub p: usize,
    pub grover_probability: f64,
    pub variational_probability: f64,
    pub improvement_percent: f64,
    /// Shared-angle problems report the angle folded into `[0, π]`.
    pub best_angles: Vec<f64>,
}

impl ComparisonRow {
    pub fn new(
        problem: ProblemKind,
        size: SearchSize,
        p: usize,
        variational: f64,
        angles: Vec<f64>,
    ) -> Self {
        let grover = grover_probability::<f64>(p as u64, size);
        Self {
            problem,
            n: size.qubits(),
            big_n: size.dim(),
            p,
            grover_probability: grover,
            variational_probability: variational,
            improvement_percent: 100.0 * (variational - grover) / grover,
            best_angles: angles,
        }
    }
}

impl Record for ComparisonRow {
    fn header() -> &'static [&'static str] {
        &[
            "problem",
            "n",
            "N",
            "p_max",
            "grover_probability",
            "variational_probability",
            "improvement_percent",
            "best_angles",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.problem.to_string(),
            self.n.to_string(),
            self.big_n.to_string(),
            self.p.to_string(),
            fmt_sig(self.grover_probability),
            fmt_sig(self.variational_probability),
            fmt_sig(self.improvement_percent),
            self.best_angles
                .iter()
                .map(|&a| fmt_sig(a))
                .collect::<Vec<_>>()
                .join(";"),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimized {
    pub row: ComparisonRow,
    pub result: OptimizationResult<f64>,
}

/// Basin hopping on the subspace cost, started at the Grover point.
///
/// For `n ≤ 12` the winning schedule is replayed on the statevector; a
/// disagreement above `1e-9` is reported as [`Error::InvariantViolation`].
pub fn optimize(
    problem: ProblemKind,
    n: u32,
    p: PSpec,
    settings: &OptimizerSettings,
) -> Result<Optimized> {
    let size = size_in(n, 1, 30)?;
    let p = p.resolve(size);
    if p == 0 {
        return Err(Error::InvalidConfig(format!(
            "no oracle calls to optimize at n={n}"
        )));
    }
    let objective = ProblemObjective::new(problem, size, p);
    let config = BasinHoppingConfig {
        hop_count: settings.hops,
        perturbation_scale: settings.step,
        temperature: settings.temperature,
        rng_seed: settings.seed,
        bounds: default_bounds::<f64>(problem, p),
        start: Some(grover_params(problem, p)),
    };
    let result = basin_hop(|x: &[f64]| objective.eval(x), &config)?;

    let params = result.best_params.values();
    let angles: Vec<f64> = if problem.is_one_dimensional() {
        params.iter().map(|&a| canonical_half_period(a)).collect()
    } else {
        params.to_vec()
    };
    let variational = result.success_probability;

    if n <= STATEVECTOR_CHECK_QUBITS {
        let schedule = expand(problem, params, p)?;
        let instance = SearchInstance::new(n, (1u64 << n) - 1)?;
        let sv: f64 = run_sequence(&instance, &schedule)?;
        if (sv - variational).abs() > 1e-9 {
            return Err(Error::InvariantViolation(format!(
                "subspace probability {variational} disagrees with statevector {sv} at n={n}"
            )));
        }
    }

    Ok(Optimized {
        row: ComparisonRow::new(problem, size, p, variational, angles),
        result,
    })
}

/// Shared-angle problem 3 at `p_max` for `N = 2³…2⁶`.
pub fn table1(settings: &OptimizerSettings) -> Result<Vec<ComparisonRow>> {
    (3u32..=6)
        .into_par_iter()
        .map(|n| optimize(ProblemKind::P3, n, PSpec::Auto, settings).map(|o| o.row))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub angle: f64,
    pub probability: f64,
}

impl Record for LandscapeRow {
    fn header() -> &'static [&'static str] {
        &["angle", "probability"]
    }

    fn fields(&self) -> Vec<String> {
        vec![fmt_sig(self.angle), fmt_sig(self.probability)]
    }
}

/// Success probability over a grid of the shared angle (problems 2 and 3),
/// on `[0, π]` or on `[0, 2π]` with `full_period`.
pub fn landscape(
    problem: ProblemKind,
    n: u32,
    p: PSpec,
    resolution: usize,
    full_period: bool,
) -> Result<Vec<LandscapeRow>> {
    if !problem.is_one_dimensional() {
        return Err(Error::InvalidConfig(format!(
            "{problem} has more than one angle; sweep needs P2 or P3"
        )));
    }
    let size = size_in(n, 1, 30)?;
    let p = p.resolve(size);
    let hi = if full_period {
        std::f64::consts::TAU
    } else {
        std::f64::consts::PI
    };
    let bounds = Bounds::new(vec![Interval::new(0.0, hi)?])?;
    let objective = ProblemObjective::new(problem, size, p);
    let scan = grid_scan(|x: &[f64]| objective.eval(x), &bounds, resolution)?;
    Ok(scan
        .points
        .into_iter()
        .map(|(x, cost)| LandscapeRow {
            angle: x[0],
            probability: 1.0 - cost,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitRow {
    pub n: u32,
    pub p_max: usize,
    pub grover_probability: f64,
    pub variational_probability: f64,
    /// `P_var − P_G`, in probability units.
    pub difference: f64,
}

impl Record for QubitRow {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "p_max",
            "grover_probability",
            "variational_probability",
            "difference",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.p_max.to_string(),
            fmt_sig(self.grover_probability),
            fmt_sig(self.variational_probability),
            fmt_sig(self.difference),
        ]
    }
}

pub const MAX_QUBIT_SWEEP: u32 = 14;

/// One optimization per `n = 2..=n_max` at Grover's optimal depth.
pub fn qubit_sweep(
    problem: ProblemKind,
    n_max: u32,
    settings: &OptimizerSettings,
) -> Result<Vec<QubitRow>> {
    if !(2..=MAX_QUBIT_SWEEP).contains(&n_max) {
        return Err(Error::QubitCount {
            n: n_max,
            min: 2,
            max: MAX_QUBIT_SWEEP,
        });
    }
    (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let o = optimize(problem, n, PSpec::Auto, settings)?;
            Ok(QubitRow {
                n,
                p_max: o.row.p,
                grover_probability: o.row.grover_probability,
                variational_probability: o.row.variational_probability,
                difference: o.row.variational_probability - o.row.grover_probability,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSweepConfig {
    pub n: u32,
    pub problem: ProblemKind,
    /// Marked item; all ones when absent.
    pub omega: Option<u64>,
    pub t1: (f64, f64),
    pub t2: (f64, f64),
    pub grid_points: usize,
    pub duration_1q: f64,
    pub duration_2q: f64,
    pub optimizer: OptimizerSettings,
}

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        Self {
            n: 3,
            problem: ProblemKind::P3,
            omega: None,
            t1: (1e-6, 1e-2),
            t2: (1e-6, 1e-2),
            grid_points: 9,
            duration_1q: NoiseModel::<f64>::DEFAULT_DURATION_1Q,
            duration_2q: NoiseModel::<f64>::DEFAULT_DURATION_2Q,
            optimizer: OptimizerSettings::default(),
        }
    }
}

impl Record for SweepRow<f64> {
    fn header() -> &'static [&'static str] {
        &["t1", "t2", "physical", "probability", "exceeds_5pct"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_sig(self.t1),
            fmt_sig(self.t2),
            self.physical.to_string(),
            self.probability.map(fmt_sig).unwrap_or_default(),
            self.exceeds.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSweepReport {
    pub schedule: AngleSchedule<f64>,
    /// Grover's noiseless optimum, the flag's reference.
    pub reference_probability: f64,
    pub noiseless_probability: f64,
    pub rows: Vec<SweepRow<f64>>,
    pub significant_fraction: f64,
}

/// Optimizes the schedule noiselessly, compiles it, and sweeps T₁ × T₂.
pub fn noise_sweep(config: &NoiseSweepConfig) -> Result<NoiseSweepReport> {
    let size = size_in(config.n, 2, 4)?;
    let omega = config.omega.unwrap_or((1u64 << config.n) - 1);
    let instance = SearchInstance::new(config.n, omega)?;
    let opt = optimize(config.problem, config.n, PSpec::Auto, &config.optimizer)?;
    let schedule = expand(config.problem, opt.result.best_params.values(), opt.row.p)?;

    let grid = SweepGrid::log(config.t1, config.t2, config.grid_points)?;
    let reference = grover_probability::<f64>(grover_pmax(size), size);
    let sweep = t1t2_sweep(
        &instance,
        &schedule,
        &grid,
        (config.duration_1q, config.duration_2q),
        reference,
    )?;
    let significant_fraction = sweep.significant_fraction();
    Ok(NoiseSweepReport {
        schedule,
        reference_probability: reference,
        noiseless_probability: opt.row.variational_probability,
        rows: sweep.rows,
        significant_fraction,
    })
}

/// Rounds to 12 significant digits, matching what the CSV output carries.
pub fn round_sig<T: Real>(x: T) -> f64 {
    fmt_sig(x.to_f64_lossy()).parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.9453125), "0.9453125");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_sig(-2.5e-3), "-0.0025");
        assert_eq!(fmt_sig(1e-6), "1e-6");
        assert_eq!(fmt_sig(0.999_999_999_999_9), "1");
        assert_eq!(fmt_sig(123456.0), "123456");
        assert_eq!(round_sig(1.0f64 / 3.0), 0.333333333333);
    }

    #[test]
    fn p_spec_parsing() {
        assert_eq!("auto".parse::<PSpec>().unwrap(), PSpec::Auto);
        assert_eq!("4".parse::<PSpec>().unwrap(), PSpec::Fixed(4));
        assert!("0".parse::<PSpec>().is_err());
        assert!("x".parse::<PSpec>().is_err());
        assert_eq!(PSpec::Auto.resolve(SearchSize::new(6).unwrap()), 6);
    }

    #[test]
    fn grover_rows() {
        let rows = grover_table(2, 6).unwrap();
        assert_eq!(rows[0].p_max, 1);
        assert!((rows[0].probability - 1.0).abs() < 1e-15);
        assert_eq!(rows[1].p_max, 2);
        assert!((rows[1].probability - 0.9453125).abs() < 1e-12);
        assert_eq!(rows[4].p_max, 6);
        assert!(grover_table(1, 3).is_err());
        assert!(grover_table(5, 4).is_err());
    }

    #[test]
    fn improvement_recomputes_from_row() {
        let size = SearchSize::new(3).unwrap();
        let row = ComparisonRow::new(ProblemKind::P3, size, 2, 0.99, vec![2.0]);
        let again =
            100.0 * (row.variational_probability - row.grover_probability) / row.grover_probability;
        assert!((row.improvement_percent - again).abs() < 1e-9);
    }

    #[test]
    fn optimize_p3_n5() {
        let o = optimize(
            ProblemKind::P3,
            5,
            PSpec::Auto,
            &OptimizerSettings::default(),
        )
        .unwrap();
        assert_eq!(o.row.p, 4);
        assert!((o.row.improvement_percent - 0.08).abs() < 0.05);
        assert!((o.row.best_angles[0] - 2.76).abs() < 0.02);
    }

    #[test]
    fn optimize_p2_has_no_advantage() {
        let o = optimize(
            ProblemKind::P2,
            4,
            PSpec::Auto,
            &OptimizerSettings::default(),
        )
        .unwrap();
        assert!(o.row.improvement_percent < 0.1);
        assert!(o.row.improvement_percent > -1e-9);
    }

    #[test]
    fn landscape_endpoints_and_grover_point() {
        let rows = landscape(ProblemKind::P3, 3, PSpec::Auto, 101, false).unwrap();
        assert_eq!(rows.len(), 101);
        assert!((rows[0].probability - 0.125).abs() < 1e-12);
        assert!((rows[100].angle - std::f64::consts::PI).abs() < 1e-15);
        assert!((rows[100].probability - 0.9453125).abs() < 1e-12);
        assert!(landscape(ProblemKind::P1, 3, PSpec::Auto, 11, false).is_err());
    }

    #[test]
    fn csv_and_json_rendering() {
        let rows = vec![LandscapeRow {
            angle: 0.5,
            probability: 0.25,
        }];
        assert_eq!(
            render(&rows, Format::Csv).unwrap(),
            "angle,probability\n0.5,0.25\n"
        );
        let json: serde_json::Value =
            serde_json::from_str(&render(&rows, Format::Json).unwrap()).unwrap();
        assert_eq!(json[0]["probability"], 0.25);
    }

    #[test]
    fn noise_sweep_rejects_wide_registers() {
        let config = NoiseSweepConfig {
            n: 5,
            ..NoiseSweepConfig::default()
        };
        assert!(matches!(
            noise_sweep(&config),
            Err(Error::QubitCount { .. })
        ));
    }
}
