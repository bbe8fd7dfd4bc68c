//! Deterrence analysis runner.
//!
//! Every subcommand reads an optional JSON config, fills documented
//! defaults, writes `<command>.<format>` into the output directory, and
//! prints a one-line summary. Exit codes: 0 on success, 1 on validation
//! errors, 2 on solver failures (including a cutoff search that ends in a
//! corner instead of a crossing).

mod config;
mod output;

use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};

use config::{
    resolve_game, resolve_model, resolve_sim, resolve_sweep, CliError, EnvironmentSection,
    RawConfig,
};
use deterrence_core::{
    calibration_report, corner_test, equilibrium_report, iso_curves, simulate, solve_cutoff,
    tornado, v_safe, CrossingDirection, CutoffOutcome, ModelParams, SimConfig, SimEnvironment,
    SweepMetric,
};
use output::{Format, Report};

#[derive(Parser)]
#[command(
    name = "deterrence",
    version,
    about = "Cost-of-collusion analysis for k-of-n threshold custody",
    propagate_version = true
)]
struct Cli {
    /// JSON experiment config; defaults apply when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory for reports.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Report file format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Master seed for simulation; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether no-join and all-join are equilibria.
    Corner,
    /// Closed-form deterrence thresholds and the full equilibrium report.
    Thresholds,
    /// Safe custodied stock: the largest value the all-join corner tolerates.
    Vsafe,
    /// Solve the signal-game cutoff equilibrium.
    Cutoff,
    /// Monte Carlo simulation of the configured strategy profile.
    Simulate,
    /// One-at-a-time parameter sweep, widest effect first.
    Tornado,
    /// Iso-metric curves in the (p_k, beta) plane.
    Iso,
    /// Baseline calibration summary.
    Calibrate,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}

fn load_config(path: Option<&Path>) -> Result<RawConfig, CliError> {
    match path {
        None => Ok(RawConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("config {}: {e}", p.display())))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Corner => cmd_corner(&cli, &cfg),
        Command::Thresholds => cmd_thresholds(&cli, &cfg),
        Command::Vsafe => cmd_vsafe(&cli, &cfg),
        Command::Cutoff => cmd_cutoff(&cli, &cfg),
        Command::Simulate => cmd_simulate(&cli, &cfg),
        Command::Tornado => cmd_tornado(&cli, &cfg),
        Command::Iso => cmd_iso(&cli, &cfg),
        Command::Calibrate => cmd_calibrate(&cli, &cfg),
    }
}

/// Writes the uniform `{config, result}` report in the chosen format.
fn emit<T: serde::Serialize>(
    cli: &Cli,
    name: &str,
    echo: &RawConfig,
    result: &T,
) -> Result<PathBuf, CliError> {
    let report = Report { config: echo, result };
    let text = match cli.format {
        Format::Json => output::json_text(&report),
        Format::Csv => output::key_value_csv(&report),
    };
    output::write_report(&cli.out, name, cli.format, &text)
}

fn model_echo(model: config::ModelSection) -> RawConfig {
    RawConfig { seed: None, model: Some(model), global_game: None, sim: None, sweep: None }
}

fn cmd_corner(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let result = corner_test(&rm.params)?;
    let path = emit(cli, "corner", &model_echo(rm.echo), &result)?;
    println!(
        "corner: no_join={} all_join={} u_join_at_one={:.6} -> {}",
        result.no_join_is_equilibrium,
        result.all_join_is_equilibrium,
        result.u_join_at_one,
        path.display()
    );
    Ok(())
}

fn cmd_thresholds(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let result = equilibrium_report(&rm.params)?;
    let path = emit(cli, "thresholds", &model_echo(rm.echo), &result)?;
    let k_star = result.k_star.map_or(String::from("none"), |k| k.to_string());
    let q_star = result.q_star.map_or(String::from("none"), |q| format!("{q:.6}"));
    println!(
        "thresholds: k_star={} q_star={} v_safe={:.4} all_join={} -> {}",
        k_star,
        q_star,
        result.v_safe,
        result.all_join_is_equilibrium,
        path.display()
    );
    Ok(())
}

fn cmd_vsafe(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let safe = v_safe(&rm.params)?;
    #[derive(serde::Serialize)]
    struct VsafeResult {
        v_safe_billions: f64,
        v_safe_trillions: f64,
    }
    let result = VsafeResult { v_safe_billions: safe, v_safe_trillions: safe / 1000.0 };
    let path = emit(cli, "vsafe", &model_echo(rm.echo), &result)?;
    println!("V_safe ≈ ${:.2}T ({safe:.4} billions) -> {}", safe / 1000.0, path.display());
    Ok(())
}

fn crossing_name(direction: CrossingDirection) -> &'static str {
    match direction {
        CrossingDirection::Decreasing => "decreasing",
        CrossingDirection::Increasing => "increasing",
    }
}

fn cmd_cutoff(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let rg = resolve_game(cfg, &rm.params)?;
    let outcome = solve_cutoff(&rg.spec)?;
    let echo = RawConfig {
        seed: None,
        model: Some(rm.echo),
        global_game: Some(rg.echo),
        sim: None,
        sweep: None,
    };
    let path = emit(cli, "cutoff", &echo, &outcome)?;
    match outcome {
        CutoffOutcome::Solved(sol) => {
            println!(
                "cutoff: tau={:.6} residual={:.3e} theta_star={:.6} crossing={} -> {}",
                sol.tau,
                sol.residual,
                sol.theta_star,
                crossing_name(sol.crossing),
                path.display()
            );
            Ok(())
        }
        CutoffOutcome::AlwaysDeterred { max_conditional_payoff } => {
            println!(
                "cutoff: always deterred, max conditional payoff {:.6} -> {}",
                max_conditional_payoff,
                path.display()
            );
            Err(CliError::Solver(format!(
                "no cutoff: joining is unprofitable at every signal (max conditional payoff {max_conditional_payoff:.6})"
            )))
        }
        CutoffOutcome::NeverDeterred { min_conditional_payoff } => {
            println!(
                "cutoff: never deterred, min conditional payoff {:.6} -> {}",
                min_conditional_payoff,
                path.display()
            );
            Err(CliError::Solver(format!(
                "no cutoff: joining is profitable at every signal (min conditional payoff {min_conditional_payoff:.6})"
            )))
        }
    }
}

fn cmd_simulate(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let seed = cli.seed.or(cfg.seed).ok_or_else(|| {
        CliError::Validation(String::from(
            "simulate requires a seed: pass --seed or set top-level \"seed\" in the config",
        ))
    })?;
    let rm = resolve_model(cfg)?;
    let rs = resolve_sim(cfg)?;
    let (environment, game_echo) = match rs.environment {
        EnvironmentSection::Complete => {
            (SimEnvironment::Complete { params: rm.params.clone() }, None)
        }
        EnvironmentSection::Dispersed => {
            let rg = resolve_game(cfg, &rm.params)?;
            (SimEnvironment::Dispersed { spec: rg.spec, theta: rs.theta }, Some(rg.echo))
        }
    };
    let sim_config = SimConfig {
        environment,
        strategy: rs.strategy,
        replications: rs.replications,
        seed,
    };
    let result = simulate(&sim_config)?;
    let echo = RawConfig {
        seed: Some(seed),
        model: Some(rm.echo),
        global_game: game_echo,
        sim: Some(rs.echo),
        sweep: None,
    };
    let path = emit(cli, "simulate", &echo, &result)?;
    let deviation = result
        .deviation_gain
        .as_ref()
        .map_or(String::new(), |g| format!(" deviation_gain={:.6}(se {:.1e})", g.value, g.std_error));
    println!(
        "simulate: reps={} join_rate={:.4} success={:.4} payoff={:.6}(se {:.1e}){} -> {}",
        result.replications,
        result.empirical_join_rate,
        result.empirical_success_rate.value,
        result.mean_realized_payoff,
        result.payoff_std_error,
        deviation,
        path.display()
    );
    Ok(())
}

fn cmd_tornado(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let rw = resolve_sweep(cfg, &rm.params)?;
    let result = tornado(&rw.spec)?;
    let echo = RawConfig {
        seed: None,
        model: Some(rm.echo),
        global_game: None,
        sim: None,
        sweep: Some(rw.echo),
    };
    let text = match cli.format {
        Format::Json => output::json_text(&Report { config: &echo, result: &result }),
        Format::Csv => output::tornado_csv(&result.tornado_rows),
    };
    let path = output::write_report(&cli.out, "tornado", cli.format, &text)?;
    let widest = result
        .tornado_rows
        .first()
        .map_or(String::from("none"), |row| row.parameter.clone());
    println!(
        "tornado: {} parameters, widest swing {} -> {}",
        result.tornado_rows.len(),
        widest,
        path.display()
    );
    Ok(())
}

/// Baseline metric value, used as the default iso level.
fn default_level(params: &ModelParams, metric: SweepMetric) -> Result<f64, CliError> {
    match metric {
        SweepMetric::VSafe => Ok(v_safe(params)?),
        SweepMetric::UJoinAtOne => Ok(corner_test(params)?.u_join_at_one),
        SweepMetric::QStar => equilibrium_report(params)?.q_star.ok_or_else(|| {
            CliError::Validation(String::from(
                "iso: the baseline has no finite q_star; provide sweep.levels",
            ))
        }),
        SweepMetric::KStar => {
            equilibrium_report(params)?.k_star.map(f64::from).ok_or_else(|| {
                CliError::Validation(String::from(
                    "iso: the baseline has no deterring threshold in range; provide sweep.levels",
                ))
            })
        }
    }
}

fn cmd_iso(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let rw = resolve_sweep(cfg, &rm.params)?;
    let levels = match rw.levels {
        Some(levels) => levels,
        None => vec![default_level(&rm.params, rw.spec.metric)?],
    };
    let result = iso_curves(&rw.spec, &levels)?;
    let mut sweep_echo = rw.echo;
    sweep_echo.levels = Some(levels);
    let echo = RawConfig {
        seed: None,
        model: Some(rm.echo),
        global_game: None,
        sim: None,
        sweep: Some(sweep_echo),
    };
    let text = match cli.format {
        Format::Json => output::json_text(&Report { config: &echo, result: &result }),
        Format::Csv => output::iso_csv(&result.iso_curves),
    };
    let path = output::write_report(&cli.out, "iso", cli.format, &text)?;
    let points: usize = result.iso_curves.iter().map(|c| c.points.len()).sum();
    println!(
        "iso: {} levels, {} points -> {}",
        result.iso_curves.len(),
        points,
        path.display()
    );
    Ok(())
}

fn cmd_calibrate(cli: &Cli, cfg: &RawConfig) -> Result<(), CliError> {
    let rm = resolve_model(cfg)?;
    let result = calibration_report(&rm.params)?;
    let path = emit(cli, "calibrate", &model_echo(rm.echo), &result)?;
    println!(
        "V_safe ≈ ${:.2}T at p_k={:.1}% (q={:.2}%), F_eff=${:.0}B -> {}",
        result.v_safe / 1000.0,
        result.p_k * 100.0,
        result.q * 100.0,
        result.f_eff,
        path.display()
    );
    Ok(())
}
