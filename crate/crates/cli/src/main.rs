//! `surrband`: confidence bands, constants, bounds and Monte Carlo checks from
//! the command line.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 statistically
//! infeasible request (γ below the minimal feasible value).

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use surrband::bands::{bonferroni_band, subspace_band, AdaptiveProcedure, Band};
use surrband::bounds::{surrogate_lower_bound, w_target, LowerBoundInputs};
use surrband::simulate::{run_with_widths, Procedure};
use surrband::specfun::{econst, kappa, qconst, tau_inv};
use surrband::surrogate::optimal_tuning;
use surrband::{Error, Subspace, SurrogateTuning};

use config::{BandConfig, BoundsConfig, ScenarioConfig, TuningSpec};

#[derive(Debug, Parser)]
#[command(name = "surrband", version, about = "Adaptive surrogate confidence bands")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceKind {
    Dyadic,
    Cosine,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print τ⁻¹, κ, Q, E, Ω and w_F for a subspace as JSON.
    Constants {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "dyadic")]
        subspace: SpaceKind,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Fit a band to a CSV with columns `x,y`.
    Band {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Band CSV; a JSON sidecar is written next to it with extension `.json`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Evaluate the width lower bound for a subspace and tuning.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Run a seeded Monte Carlo scenario.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-replication widths, one per line.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u64>,
        #[arg(long, env = "SURRBAND_THREADS", default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Infeasible(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| io_err(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(path, e))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Constants { alpha, gamma, n, d, subspace, sigma } => {
            cmd_constants(alpha, gamma, n, d, subspace, sigma)
        }
        Command::Band { config, input, out, alpha, gamma, sigma } => {
            let mut cfg: BandConfig = read_json(&config)?;
            cfg.apply_overrides(alpha, gamma, sigma);
            cmd_band(&cfg, &input, &out)
        }
        Command::Bounds { config, out, alpha, gamma, sigma } => {
            let mut cfg: BoundsConfig = read_json(&config)?;
            if alpha.is_some() {
                cfg.alpha = alpha;
            }
            if gamma.is_some() {
                cfg.gamma = gamma;
            }
            if let Some(s) = sigma {
                cfg.sigma = s;
            }
            cmd_bounds(&cfg, out.as_deref())
        }
        Command::Simulate { config, out, csv, seed, reps, threads, alpha, gamma, sigma } => {
            let mut cfg: ScenarioConfig = read_json(&config)?;
            cfg.band.apply_overrides(alpha, gamma, sigma);
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = reps {
                cfg.reps = r;
            }
            cmd_simulate(&cfg, &out, csv.as_deref(), threads)
        }
    }
}

fn space_for(kind: SpaceKind, n: usize, d: usize) -> CliResult<Subspace> {
    Ok(match kind {
        SpaceKind::Dyadic => Subspace::blocks(n, d)?,
        SpaceKind::Cosine => Subspace::cosine(n, d)?,
        SpaceKind::Full => Subspace::full(n)?,
    })
}

fn cmd_constants(alpha: f64, gamma: f64, n: usize, d: usize, kind: SpaceKind, sigma: f64) -> CliResult<()> {
    let k = kappa(alpha, gamma)?;
    let space = space_for(kind, n, d)?;
    let d = space.dim();
    let t_inv = tau_inv(1.0 - 2.0 * alpha - gamma)?;
    let w_f = w_target(space.omega(), alpha, gamma, sigma)?;
    let (q, e) = if d < n {
        (Some(qconst(n - d, alpha / 2.0, gamma)?), Some(econst(n - d, alpha / 2.0, gamma)?))
    } else {
        (None, None)
    };
    let out = json!({
        "config": { "alpha": alpha, "gamma": gamma, "n": n, "d": d, "subspace": format!("{kind:?}").to_lowercase(), "sigma": sigma },
        "tauInv": t_inv,
        "kappa": k,
        "q": q,
        "e": e,
        "qArgs": { "m": n - d, "beta": alpha / 2.0, "xi": gamma },
        "omega": space.omega(),
        "wF": w_f,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json value"));
    Ok(())
}

#[derive(Debug, Deserialize)]
struct Row {
    x: f64,
    y: f64,
}

fn read_xy(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let headers = rdr.headers().map_err(|e| io_err(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(CliError::Input(format!("{}: header must be `x,y`", path.display())));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = i + 1;
        let r = rec.map_err(|e| CliError::Input(format!("{}: row {row}: {e}", path.display())))?;
        if !(r.x.is_finite() && r.y.is_finite()) {
            return Err(CliError::Input(format!("{}: row {row}: non-finite value", path.display())));
        }
        if xs.last().is_some_and(|&prev| r.x <= prev) {
            return Err(CliError::Input(format!("{}: row {row}: x must be strictly increasing", path.display())));
        }
        xs.push(r.x);
        ys.push(r.y);
    }
    if ys.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    Ok((xs, ys))
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn fit_band(cfg: &BandConfig, y: &[f64]) -> CliResult<(Band, SurrogateTuning)> {
    let r = cfg.resolve(y.len())?;
    let p = &r.params;
    let need = || {
        r.scale
            .as_ref()
            .ok_or_else(|| CliError::Input(format!("{:?} requires spaces", r.procedure)))
    };
    let band = match r.procedure {
        Procedure::Bonferroni => bonferroni_band(y, p.sigma, p.alpha)?,
        Procedure::Subspace => {
            let scale = need()?;
            if scale.len() != 1 {
                return Err(CliError::Input("subspace procedure takes a single level".into()));
            }
            subspace_band(y, &scale.levels()[0], p.sigma, p.alpha, r.coordinate_width)?
        }
        Procedure::AdaptiveSingle => AdaptiveProcedure::single(need()?, p)?.fit(y)?,
        Procedure::AdaptiveNested => AdaptiveProcedure::nested(need()?, p)?.fit(y)?,
    };
    Ok((band, p.tuning.clone()))
}

fn cmd_band(cfg: &BandConfig, input: &Path, out: &Path) -> CliResult<()> {
    let (xs, ys) = read_xy(input)?;
    let (band, tuning) = fit_band(cfg, &ys)?;

    let mut w = csv::Writer::from_path(out).map_err(|e| io_err(out, e))?;
    w.write_record(["x", "lower", "center", "upper"]).map_err(|e| io_err(out, e))?;
    for (i, x) in xs.iter().enumerate() {
        w.serialize((x, band.lower[i], band.center[i], band.upper[i]))
            .map_err(|e| io_err(out, e))?;
    }
    w.flush().map_err(|e| io_err(out, e))?;

    let side = json!({
        "config": cfg,
        "n": ys.len(),
        "tuning": tuning,
        "width": band.width,
        "selectedLevel": band.selected_level,
        "accepted": band.accepted,
        "statistics": band.statistics,
        "thresholds": band.thresholds,
    });
    write_json(&sidecar_path(out), &side)
}

fn cmd_bounds(cfg: &BoundsConfig, out: Option<&Path>) -> CliResult<()> {
    if cfg.version != config::VERSION {
        return Err(CliError::Input(format!("unsupported config version {}", cfg.version)));
    }
    let alpha = cfg.alpha.ok_or_else(|| CliError::Input("alpha is required".into()))?;
    let gamma = cfg.gamma.ok_or_else(|| CliError::Input("gamma is required".into()))?;
    let scale = cfg.spaces.build(cfg.n)?;
    let space = &scale.levels()[0];
    let (eps2, eps_inf) = match &cfg.tuning {
        TuningSpec::Rule { rule } => {
            let t = optimal_tuning(space, alpha, gamma, cfg.sigma, *rule)?;
            (t.eps2[0], t.eps_inf[0])
        }
        TuningSpec::Explicit { eps2, eps_inf } => match (eps2.first(), eps_inf.first()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(CliError::Input("explicit tuning needs eps2 and epsInf".into())),
        },
    };
    let report = surrogate_lower_bound(LowerBoundInputs {
        n: cfg.n,
        d: space.dim(),
        eps2,
        eps_inf,
        alpha,
        gamma,
        sigma: cfg.sigma,
        omega: space.omega(),
    })?;
    let value = json!({ "config": cfg, "report": report });
    match out {
        Some(p) => write_json(p, &value),
        None => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json value"));
            Ok(())
        }
    }
}

fn cmd_simulate(cfg: &ScenarioConfig, out: &Path, csv_out: Option<&Path>, threads: usize) -> CliResult<()> {
    if threads == 0 {
        return Err(CliError::Input("threads must be at least 1".into()));
    }
    let scenario = cfg.to_scenario()?;
    let (report, widths) = run_with_widths(&scenario, cfg.width_threshold, threads)?;
    write_json(out, &json!({ "config": cfg, "tuning": scenario.params.tuning, "report": report }))?;
    if let Some(path) = csv_out {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
        w.write_record(["width"]).map_err(|e| io_err(path, e))?;
        for x in &widths {
            w.serialize(x).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    Ok(())
}
