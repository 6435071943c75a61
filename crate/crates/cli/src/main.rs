use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use varsearch::report::{self, render, Format, NoiseSweepConfig, OptimizerSettings, PSpec};
use varsearch::{Error, ProblemKind, SearchInstance};

/// Variational phase schedules for Grover search: baselines, optimization,
/// landscapes and noise sweeps.
#[derive(Parser, Debug)]
#[command(name = "varsearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Closed-form Grover baseline for a range of qubit counts.
    Grover,
    /// Basin-hopping optimization of one problem instance.
    Optimize,
    /// Problem 3 against Grover for N = 8, 16, 32, 64.
    Table1,
    /// Probability over the shared angle (problems 2 and 3).
    Sweep,
    /// Variational minus Grover probability for n = 2..n-max.
    QubitSweep,
    /// Compiled circuit under a log-spaced T1 x T2 grid.
    NoiseSweep,
}

/// Every flag may also be given as `key=value` in the `--config` file, using
/// the flag name without dashes (`n-max=8`). Flags win over the file.
#[derive(Args, Debug, Default)]
struct Opts {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,
    /// Oracle calls, or `auto` for Grover's optimum.
    #[arg(long, global = true)]
    p: Option<String>,
    /// 1, 2, 3 or 4.
    #[arg(long, global = true)]
    problem: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    hops: Option<usize>,
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Sweep over [0, 2pi] instead of [0, pi].
    #[arg(long = "full-period", global = true)]
    full_period: bool,
    #[arg(long = "t1-min", global = true)]
    t1_min: Option<f64>,
    #[arg(long = "t1-max", global = true)]
    t1_max: Option<f64>,
    #[arg(long = "t2-min", global = true)]
    t2_min: Option<f64>,
    #[arg(long = "t2-max", global = true)]
    t2_max: Option<f64>,
    #[arg(long = "grid-points", global = true)]
    grid_points: Option<usize>,
    /// Marked bitstring for the noise sweep (default all ones).
    #[arg(long, global = true)]
    omega: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

const CONFIG_KEYS: &[&str] = &[
    "n",
    "n-max",
    "p",
    "problem",
    "seed",
    "hops",
    "resolution",
    "full-period",
    "t1-min",
    "t1-max",
    "t2-min",
    "t2-max",
    "grid-points",
    "omega",
    "format",
    "out",
];

fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, Error> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("config line {}: expected key=value", i + 1))
        })?;
        let k = k.trim().to_string();
        if !CONFIG_KEYS.contains(&k.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "config line {}: unknown key {k:?}",
                i + 1
            )));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

/// Flags merged over the config file.
struct Resolved {
    opts: Opts,
    file: BTreeMap<String, String>,
}

impl Resolved {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidConfig(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    fn n(&self) -> Result<Option<u32>, Error> {
        self.get(self.opts.n, "n")
    }

    fn n_max(&self) -> Result<Option<u32>, Error> {
        self.get(self.opts.n_max, "n-max")
    }

    fn p(&self) -> Result<PSpec, Error> {
        Ok(self
            .get::<String>(self.opts.p.clone(), "p")?
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or_default())
    }

    fn problem(&self) -> Result<ProblemKind, Error> {
        match self.get::<String>(self.opts.problem.clone(), "problem")? {
            None => Ok(ProblemKind::P3),
            Some(s) => s.parse(),
        }
    }

    fn full_period(&self) -> Result<bool, Error> {
        if self.opts.full_period {
            return Ok(true);
        }
        Ok(self.get::<bool>(None, "full-period")?.unwrap_or(false))
    }

    fn format(&self) -> Result<Format, Error> {
        Ok(self
            .get::<String>(self.opts.format.clone(), "format")?
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or_default())
    }

    fn out(&self) -> Result<Option<PathBuf>, Error> {
        self.get(self.opts.out.clone(), "out")
    }

    fn optimizer(&self) -> Result<OptimizerSettings, Error> {
        let d = OptimizerSettings::default();
        Ok(OptimizerSettings {
            hops: self.get(self.opts.hops, "hops")?.unwrap_or(d.hops),
            seed: self.get(self.opts.seed, "seed")?.unwrap_or(d.seed),
            ..d
        })
    }
}

fn run(command: Command, cfg: &Resolved) -> Result<String, Error> {
    let format = cfg.format()?;
    match command {
        Command::Grover => {
            let lo = cfg.n()?.unwrap_or(2);
            let hi = cfg
                .n_max()?
                .unwrap_or(if cfg.n()?.is_some() { lo } else { 10 });
            render(&report::grover_table(lo, hi)?, format)
        }
        Command::Optimize => {
            let o = report::optimize(
                cfg.problem()?,
                cfg.n()?.unwrap_or(3),
                cfg.p()?,
                &cfg.optimizer()?,
            )?;
            match format {
                Format::Csv => render(&[o.row], format),
                Format::Json => report::to_json(&o),
            }
        }
        Command::Table1 => render(&report::table1(&cfg.optimizer()?)?, format),
        Command::Sweep => {
            let resolution = cfg.get(cfg.opts.resolution, "resolution")?.unwrap_or(1001);
            let rows = report::landscape(
                cfg.problem()?,
                cfg.n()?.unwrap_or(3),
                cfg.p()?,
                resolution,
                cfg.full_period()?,
            )?;
            render(&rows, format)
        }
        Command::QubitSweep => {
            let n_max = cfg.n_max()?.unwrap_or(12);
            render(
                &report::qubit_sweep(cfg.problem()?, n_max, &cfg.optimizer()?)?,
                format,
            )
        }
        Command::NoiseSweep => {
            let d = NoiseSweepConfig::default();
            let n = cfg.n()?.unwrap_or(d.n);
            let omega = match cfg.get::<String>(cfg.opts.omega.clone(), "omega")? {
                None => None,
                Some(bits) => {
                    let w = SearchInstance::from_bitstring(&bits)?;
                    if w.qubits() != n {
                        return Err(Error::InvalidConfig(format!(
                            "omega {bits:?} does not have {n} bits"
                        )));
                    }
                    Some(w.omega())
                }
            };
            let config = NoiseSweepConfig {
                n,
                problem: cfg.problem()?,
                omega,
                t1: (
                    cfg.get(cfg.opts.t1_min, "t1-min")?.unwrap_or(d.t1.0),
                    cfg.get(cfg.opts.t1_max, "t1-max")?.unwrap_or(d.t1.1),
                ),
                t2: (
                    cfg.get(cfg.opts.t2_min, "t2-min")?.unwrap_or(d.t2.0),
                    cfg.get(cfg.opts.t2_max, "t2-max")?.unwrap_or(d.t2.1),
                ),
                grid_points: cfg
                    .get(cfg.opts.grid_points, "grid-points")?
                    .unwrap_or(d.grid_points),
                optimizer: cfg.optimizer()?,
                ..d
            };
            let rep = report::noise_sweep(&config)?;
            match format {
                Format::Csv => render(&rep.rows, format),
                Format::Json => report::to_json(&rep),
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.opts.config {
        None => Ok(BTreeMap::new()),
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))
            .and_then(|t| parse_config_file(&t)),
    };
    let result = file.and_then(|file| {
        let cfg = Resolved {
            opts: cli.opts,
            file,
        };
        let text = run(cli.command, &cfg)?;
        match cfg.out()? {
            Some(path) => fs::write(&path, text)
                .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
