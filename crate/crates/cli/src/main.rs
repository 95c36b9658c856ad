//! Command-line front end for the privacy-aware estimation game.
//!
//! Exit status: 0 success, 1 internal or I/O failure, 2 config or input
//! error, 3 solver or dynamics non-convergence, 4 `verify` found a gap
//! larger than ε.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use privgame::dynamics::{self, TrajectoryRecord};
use privgame::harness::{self, GameConfig, Method, Mode, SweepRow};
use privgame::multi;
use privgame::{presets, solver, Error, GameInstance, LogBase};

const EXIT_INTERNAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_NOT_NASH: u8 = 4;

#[derive(Parser)]
#[command(name = "privgame", version, about = "Privacy-aware estimation game solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a config.
    Validate(Common),
    /// Extract the explicit equilibrium (or run dynamics) at one ρ.
    Solve(Common),
    /// Thresholded best-response dynamics from the default initial pair.
    Dynamics(Common),
    /// Randomized best-response dynamics for a multi-sender config.
    Multi(Common),
    /// Sweep ρ over the config's grid and locate the critical ρ.
    Sweep(Common),
    /// Audit a policy pair for the ε-Nash property.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Config file, or the name of a bundled preset (`five_symbol`).
    #[arg(long, value_name = "PATH")]
    config: String,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Unit for reported information values.
    #[arg(long, value_enum)]
    log_base: Option<BaseArg>,
    /// Privacy ratio; required for single-ρ commands when the config holds a sweep.
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "PATH")]
    alpha: PathBuf,
    #[arg(long, value_name = "PATH")]
    beta: PathBuf,
    /// Defaults to the config's dynamics epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Explicit,
    Dynamics,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Nats,
    Bits,
}

enum Failure {
    Config(anyhow::Error),
    NotConverged(String),
    NotNash,
    Internal(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundExceeded { .. } => Failure::NotConverged(e.to_string()),
            Error::InvariantViolation(_) => Failure::Internal(e.into()),
            _ => Failure::Config(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .parse_default_env()
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::NotConverged(msg)) => {
            eprintln!("did not converge: {msg}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::NotNash) => ExitCode::from(EXIT_NOT_NASH),
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate(c) => cmd_validate(&c),
        Command::Solve(c) => cmd_solve(&c),
        Command::Dynamics(c) => cmd_dynamics(&c),
        Command::Multi(c) => cmd_multi(&c),
        Command::Sweep(c) => cmd_sweep(&c),
        Command::Verify(v) => cmd_verify(&v),
    }
}

fn load(c: &Common) -> std::result::Result<GameConfig, Failure> {
    let text = match presets::config_text(&c.config) {
        Some(t) if !Path::new(&c.config).exists() => t.to_string(),
        _ => fs::read_to_string(&c.config)
            .with_context(|| format!("reading {}", c.config))
            .map_err(Failure::Config)?,
    };
    let mut cfg = harness::load_config(&text)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(m) = c.method {
        cfg.method = match m {
            MethodArg::Explicit => Method::Explicit,
            MethodArg::Dynamics => Method::Dynamics,
        };
    }
    if let Some(b) = c.log_base {
        cfg.log_base = match b {
            BaseArg::Nats => LogBase::Nats,
            BaseArg::Bits => LogBase::Bits,
        };
    }
    Ok(cfg)
}

fn scalar_rho(c: &Common, cfg: &GameConfig) -> std::result::Result<f64, Failure> {
    match c.rho.or(cfg.scalar_rho()) {
        Some(r) if r.is_finite() && r >= 0.0 => Ok(r),
        Some(r) => Err(Failure::Config(anyhow::anyhow!("rho must be finite and >= 0, got {r}"))),
        None => Err(Failure::Config(anyhow::anyhow!(
            "config holds a rho sweep; pass --rho for this command"
        ))),
    }
}

fn single_game(c: &Common, cfg: &GameConfig) -> std::result::Result<GameInstance, Failure> {
    let rho = scalar_rho(c, cfg)?;
    Ok(cfg.single_game(rho)?)
}

fn out_dir(c: &Common) -> anyhow::Result<&Path> {
    fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
    Ok(&c.out)
}

fn write(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<()> {
    write(dir, name, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> anyhow::Result<()> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Information value in both units.
fn info(nats: f64) -> serde_json::Value {
    json!({ "nats": nats, "bits": LogBase::Bits.from_nats(nats) })
}

fn cmd_validate(c: &Common) -> Outcome {
    let cfg = load(c)?;
    match cfg.mode {
        Mode::Single => {
            let g = cfg.single_game(cfg.scalar_rho().unwrap_or(0.0))?;
            let [ny, nz, nw] = g.sender_dims();
            println!("ok: single-sender game, |X| = {nz}, |W| = {nw}, |Y| = {ny}");
        }
        Mode::Multi => {
            let g = cfg.multi_game(cfg.scalar_rho().unwrap_or(0.0))?;
            println!("ok: {}-sender game, |X| = {}", g.n(), g.nx());
        }
    }
    Ok(())
}

fn cmd_solve(c: &Common) -> Outcome {
    let cfg = load(c)?;
    let g = single_game(c, &cfg)?;
    let sol = harness::solve_point(&g, cfg.method, &cfg.solver, &cfg.dynamics)?;
    let eps = cfg.dynamics.epsilon;
    let nash = solver::epsilon_nash_check(&g, &sol.alpha, &sol.beta, eps, &cfg.solver)?;
    let xi = g.expected_distortion(&sol.alpha, &sol.beta)?;
    let zeta = g.leakage(&sol.alpha)?;
    let dir = out_dir(c)?;
    write(dir, "alpha.json", &(harness::sender_policy_to_json(&sol.alpha)? + "\n"))?;
    write(dir, "beta.json", &(harness::receiver_policy_to_json(&sol.beta)? + "\n"))?;
    write_json(
        dir,
        "report.json",
        &json!({
            "command": "solve",
            "method": cfg.method.name(),
            "rho": g.rho(),
            "expected_distortion": xi,
            "mutual_information": info(zeta),
            "potential": g.potential(&sol.alpha, &sol.beta)?,
            "iterations": sol.iterations,
            "converged": sol.converged,
            "nash": nash,
        }),
    )?;
    println!(
        "rho = {}  E{{d}} = {xi:.6}  I(Y;W) = {:.6} {}  iterations = {}",
        g.rho(),
        cfg.log_base.from_nats(zeta),
        cfg.log_base.name(),
        sol.iterations
    );
    println!(
        "eps-Nash at {eps}: {} (sender gap {:.3e}, receiver gap {:.3e})",
        nash.member, nash.sender_gap, nash.receiver_gap
    );
    if !sol.converged {
        return Err(Failure::NotConverged("sender best response hit max_iters".into()));
    }
    Ok(())
}

fn cmd_dynamics(c: &Common) -> Outcome {
    let cfg = load(c)?;
    let g = single_game(c, &cfg)?;
    let eps = cfg.dynamics.epsilon;
    let (a0, b0) = dynamics::default_initial_pair(&g);
    let r = dynamics::thresholded_dynamics(&g, &a0, &b0, eps, &cfg.solver)?;
    let nash = solver::epsilon_nash_check(&g, &r.final_alpha, &r.final_beta, eps, &cfg.solver)?;
    let dir = out_dir(c)?;
    write_csv(dir, "trajectory.csv", &r.trajectory)?;
    write(dir, "alpha.json", &(harness::sender_policy_to_json(&r.final_alpha)? + "\n"))?;
    write(dir, "beta.json", &(harness::receiver_policy_to_json(&r.final_beta)? + "\n"))?;
    let last = r.trajectory.last().expect("trajectory starts with k = 0");
    write_json(
        dir,
        "report.json",
        &json!({
            "command": "dynamics",
            "rho": g.rho(),
            "epsilon": eps,
            "iterations": r.iterations_used,
            "iteration_bound": r.iteration_bound,
            "accepted_moves": r.accepted_moves(),
            "initial_potential": r.trajectory[0].potential,
            "final_potential": last.potential,
            "mutual_information": info(g.leakage(&r.final_alpha)?),
            "reached_eps_nash": r.reached_eps_nash,
            "nash": nash,
        }),
    )?;
    println!(
        "iterations = {} (bound {}), accepted moves = {}, potential {:.6} -> {:.6}",
        r.iterations_used,
        r.iteration_bound.unwrap_or(0),
        r.accepted_moves(),
        r.trajectory[0].potential,
        last.potential
    );
    println!("eps-Nash at {eps}: {}", nash.member);
    Ok(())
}

fn cmd_multi(c: &Common) -> Outcome {
    let cfg = load(c)?;
    let rho = scalar_rho(c, &cfg)?;
    let g = cfg.multi_game(rho)?;
    let eps = cfg.dynamics.epsilon;
    let (a0, b0) = g.initial_profile()?;
    let r = multi::random_best_response_dynamics(&g, &a0, &b0, eps, &cfg.solver, cfg.dynamics.max_rounds, cfg.seed)?;
    let nash = multi::epsilon_nash_check(&g, &r.final_alpha, &r.final_beta, eps, &cfg.solver)?;
    let dir = out_dir(c)?;
    write_csv(dir, "trajectory.csv", &r.trajectory)?;
    write(dir, "alpha.json", &(harness::sender_policies_to_json(&r.final_alpha)? + "\n"))?;
    write(dir, "beta.json", &(harness::multi_receiver_policy_to_json(&r.final_beta)? + "\n"))?;
    let leak = (1..=g.n())
        .map(|j| g.leakage(&r.final_alpha, j).map(info))
        .collect::<privgame::Result<Vec<_>>>()?;
    let coalition = (1..=g.n())
        .map(|j| g.coalition_leakage(&r.final_alpha, j).map(info))
        .collect::<privgame::Result<Vec<_>>>()?;
    write_json(
        dir,
        "report.json",
        &json!({
            "command": "multi",
            "rho": rho,
            "epsilon": eps,
            "seed": cfg.seed,
            "rounds": r.iterations_used,
            "max_rounds": cfg.dynamics.max_rounds,
            "accepted_moves": r.accepted_moves(),
            "settled": r.reached_eps_nash,
            "final_potential": r.trajectory.last().map(|t: &TrajectoryRecord| t.potential),
            "mutual_information": leak,
            "coalition_leakage": coalition,
            "nash": nash,
        }),
    )?;
    println!(
        "rounds = {}, accepted moves = {}, settled = {}, eps-Nash at {eps}: {}",
        r.iterations_used,
        r.accepted_moves(),
        r.reached_eps_nash,
        nash.member
    );
    if !r.reached_eps_nash {
        return Err(Failure::NotConverged(format!(
            "no settled profile within {} rounds",
            cfg.dynamics.max_rounds
        )));
    }
    Ok(())
}

fn cmd_sweep(c: &Common) -> Outcome {
    let cfg = load(c)?;
    if cfg.mode != Mode::Single {
        return Err(Failure::Config(anyhow::anyhow!("sweep needs a single-sender config")));
    }
    let rows: Vec<SweepRow> = harness::run_sweep(&cfg, cfg.method)?;
    let base = cfg.single_game(0.0)?;
    let critical = if base.ny() == base.nx() {
        Some(harness::critical_report(&base, &cfg.sweep_spec().grid(), &cfg.solver)?)
    } else {
        None
    };
    let failed = rows.iter().filter(|r| !r.converged).count();
    let dir = out_dir(c)?;
    write_csv(dir, "sweep.csv", &rows)?;
    write_json(
        dir,
        "report.json",
        &json!({
            "command": "sweep",
            "method": cfg.method.name(),
            "log_base": cfg.log_base,
            "points": rows.len(),
            "unconverged_points": failed,
            "critical_rho": critical,
        }),
    )?;
    println!("{} points written to {}", rows.len(), dir.join("sweep.csv").display());
    if let Some(cr) = &critical {
        for c in [&cr.nats, &cr.bits].into_iter().flatten() {
            println!(
                "critical rho ({}): {:.4} in [{:.4}, {:.4}]",
                c.base.name(),
                c.estimate,
                c.lower,
                c.upper
            );
        }
        if let Some(b) = cr.nearest_reference {
            println!("nearest to {}: {}", cr.reference, b.name());
        }
    }
    if failed > 0 {
        return Err(Failure::NotConverged(format!("{failed} sweep points did not converge")));
    }
    Ok(())
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Config)
}

fn cmd_verify(v: &VerifyArgs) -> Outcome {
    let c = &v.common;
    let cfg = load(c)?;
    let eps = v.epsilon.unwrap_or(cfg.dynamics.epsilon);
    let alpha_text = read(&v.alpha)?;
    let beta_text = read(&v.beta)?;
    let (member, report) = match cfg.mode {
        Mode::Single => {
            let g = single_game(c, &cfg)?;
            let a = harness::sender_policy_from_json(&alpha_text)?;
            let b = harness::receiver_policy_from_json(&beta_text)?;
            let r = solver::epsilon_nash_check(&g, &a, &b, eps, &cfg.solver)?;
            println!(
                "sender gap {:.3e}, receiver gap {:.3e}, member at eps = {eps}: {}",
                r.sender_gap, r.receiver_gap, r.member
            );
            (r.member, serde_json::to_value(&r).map_err(anyhow::Error::from)?)
        }
        Mode::Multi => {
            let g = cfg.multi_game(scalar_rho(c, &cfg)?)?;
            let a = harness::sender_policies_from_json(&alpha_text)?;
            let b = harness::multi_receiver_policy_from_json(&beta_text)?;
            let r = multi::epsilon_nash_check(&g, &a, &b, eps, &cfg.solver)?;
            println!(
                "sender gaps {:?}, receiver gap {:.3e}, member at eps = {eps}: {}",
                r.sender_gaps, r.receiver_gap, r.member
            );
            (r.member, serde_json::to_value(&r).map_err(anyhow::Error::from)?)
        }
    };
    let dir = out_dir(c)?;
    write_json(dir, "report.json", &json!({ "command": "verify", "nash": report }))?;
    if member {
        Ok(())
    } else {
        Err(Failure::NotNash)
    }
}
