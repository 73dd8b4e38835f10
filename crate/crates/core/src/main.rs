use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cartwing::config::load_config;
use cartwing::driver::{build_problem, run_config};
use cartwing::error::{Error, Result};
use cartwing::extrapolation::{extrapolate, ExtrapParams, ExtrapStencil};
use cartwing::harness::{kernel_smooth, kernel_step, spatial_convergence, temporal_convergence};
use cartwing::mesh::dump;
use cartwing::solver::configure_threads;

#[derive(Parser)]
#[command(
    name = "cartwing",
    version,
    about = "WENO Euler solver on Cartesian grids with embedded boundaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write its output fields.
    Run {
        config: PathBuf,
        /// Skip writing field files.
        #[arg(long)]
        no_output: bool,
    },
    /// Spatial and temporal refinement study of an analytic case.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Print the node classification and ghost recipes.
    MeshDump {
        config: PathBuf,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Property checks of the extrapolation kernel alone.
    KernelTest,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<u8> {
    let threads = configure_threads()?;
    log::debug!("using {threads} worker thread(s)");
    match command {
        Command::Run { config, no_output } => {
            let cfg = load_config(&config)?;
            let outcome = run_config(&cfg, !no_output)?;
            let s = &outcome.summary;
            println!(
                "finished: {} steps, t = {:.6}, wall {:.1} s, mass {:.12e} -> {:.12e}, low-omega fills {}, clamped {}",
                s.steps, s.time, s.wall_seconds, s.initial_mass, s.final_mass, s.low_omega_fills, s.clamped_fills
            );
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::Converge { config, levels } => {
            if levels < 2 {
                return Err(Error::Config("--levels must be at least 2".into()));
            }
            let cfg = load_config(&config)?;
            println!("{}", spatial_convergence(&cfg, levels)?);
            println!("{}", temporal_convergence(&cfg, levels)?);
            Ok(0)
        }
        Command::MeshDump { config, out } => {
            let cfg = load_config(&config)?;
            let problem = build_problem(&cfg)?;
            let text = dump(&problem.grid, &problem.ghosts);
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|source| Error::Io { path, source })?
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::KernelTest => kernel_battery(),
    }
}

fn kernel_battery() -> Result<u8> {
    let params = ExtrapParams::default();
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };
    let n = params.stencil_degree + 1;
    let run = |values: Vec<f64>| -> Result<f64> {
        Ok(extrapolate(&ExtrapStencil::new(0.0, 0.1, values, -0.1)?, &params)?.omega)
    };
    let constant = run(vec![3.0; n])?;
    check(
        "omega on constant data",
        constant == 1.0,
        format!("{constant}"),
    );
    let linear = run((0..n).map(|j| 0.7 - 0.3 * j as f64).collect())?;
    check("omega on linear data", linear == 1.0, format!("{linear}"));
    let wavy: Vec<f64> = (0..n)
        .map(|j| (0.9 * j as f64).sin() + 0.1 * j as f64)
        .collect();
    let a = run(wavy.clone())?;
    let b = run(wavy.iter().map(|v| v * 1e3).collect())?;
    check(
        "omega invariant under scaling",
        (a - b).abs() < 1e-12,
        format!("{a} vs {b}"),
    );

    let smooth = kernel_smooth(&params, 0.1, 4)?;
    println!("{smooth}");
    let orders = smooth.orders();
    check(
        "smooth extrapolation order >= r + 0.5",
        orders.iter().all(|o| *o >= params.fit_degree as f64 + 0.5),
        format!("{orders:.3?}"),
    );
    let slopes: Vec<f64> = smooth
        .rows
        .windows(2)
        .map(|w| (w[0].linf / w[1].linf).log2())
        .collect();
    check(
        "slope of log(1 - omega) is 4 +- 0.5",
        slopes.iter().all(|s| (s - 4.0).abs() <= 0.5),
        format!("{slopes:.3?}"),
    );
    let step = kernel_step(&params, 0.1, 3)?;
    println!("{step}");
    let decay = step.orders();
    check(
        "slope of log(omega) at a jump is 2 +- 0.5",
        decay.iter().all(|s| (s - 2.0).abs() <= 0.5),
        format!("{decay:.3?}"),
    );
    Ok(if ok { 0 } else { 2 })
}
