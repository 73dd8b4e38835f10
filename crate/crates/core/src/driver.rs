//! Assemble a run from a [`SimConfig`] and execute it, writing snapshots.

use std::path::PathBuf;

use crate::config::{OutputFormat, SimConfig};
use crate::error::Result;
use crate::io::write_field;
use crate::mesh::{build_all_stencils, classify};
use crate::solver::{run, FieldState, Problem, RunSummary, TimeControls};

/// Classify the grid and build every ghost recipe.
pub fn build_problem(config: &SimConfig) -> Result<Problem> {
    config.validate()?;
    let grid = classify(config.nx, config.ny, &config.domain)?;
    let ghosts = build_all_stencils(
        &grid,
        &config.domain,
        &config.boundaries,
        &config.extrapolation,
    )?;
    Ok(Problem {
        grid,
        ghosts,
        gas: config.gas,
        free_stream: config.free_stream(),
        split: config.split,
        fill: config.fill,
    })
}

/// Initial field of `config` on the problem lattice.
pub fn initial_field(config: &SimConfig, problem: &Problem) -> Result<FieldState> {
    FieldState::from_fn(problem, |x, y| config.initial_state(x, y))
}

/// Result of a configured run.
#[derive(Debug)]
pub struct RunOutcome {
    pub problem: Problem,
    pub state: FieldState,
    pub summary: RunSummary,
    pub written: Vec<PathBuf>,
}

/// Run `config` to its end time. With `write` set, snapshots are written
/// every `output.every` time units plus the final field, in every configured
/// format.
pub fn run_config(config: &SimConfig, write: bool) -> Result<RunOutcome> {
    let problem = build_problem(config)?;
    log::info!(
        "grid {} × {}: {} fluid, {} ghost ({} periodic) nodes",
        config.nx,
        config.ny,
        problem.grid.count(crate::mesh::NodeClass::Fluid),
        problem.ghosts.stencils.len() + problem.ghosts.periodic.len(),
        problem.ghosts.periodic.len()
    );
    let mut state = initial_field(config, &problem)?;
    let mut written = Vec::new();
    let emit = |state: &FieldState, tag: &str, written: &mut Vec<PathBuf>| -> Result<()> {
        if !write {
            return Ok(());
        }
        for format in &config.output.formats {
            let path = config
                .output
                .dir
                .join(format!("{tag}.{}", format.extension()));
            write_field(
                &problem.grid,
                &state.u,
                problem.gas,
                problem.free_stream,
                *format,
                &path,
            )?;
            written.push(path);
        }
        Ok(())
    };

    let every = config.output.every;
    let mut summary = RunSummary::default();
    let mut segment = 0usize;
    loop {
        let target = if every > 0.0 {
            (((segment + 1) as f64) * every).min(config.time.t_end)
        } else {
            config.time.t_end
        };
        let controls = TimeControls {
            t_end: target,
            max_steps: config
                .time
                .max_steps
                .map(|m| m.saturating_sub(summary.steps)),
            ..config.time
        };
        let part = run(&problem, &mut state, &controls)?;
        if segment == 0 {
            summary.initial_mass = part.initial_mass;
            summary.min_omega = part.min_omega;
        }
        summary.steps += part.steps;
        summary.time = part.time;
        summary.wall_seconds += part.wall_seconds;
        summary.final_mass = part.final_mass;
        summary.low_omega_fills += part.low_omega_fills;
        summary.clamped_fills += part.clamped_fills;
        summary.min_omega = summary.min_omega.min(part.min_omega);
        segment += 1;
        let done = state.time >= config.time.t_end - 1e-12 * config.time.t_end.max(1.0)
            || config.time.max_steps.is_some_and(|m| summary.steps >= m);
        if every > 0.0 && !done {
            emit(&state, &format!("field_{segment:04}"), &mut written)?;
        }
        if done {
            break;
        }
    }
    emit(&state, "final", &mut written)?;
    Ok(RunOutcome {
        problem,
        state,
        summary,
        written,
    })
}

/// Formats in the order they are written.
pub fn format_names(formats: &[OutputFormat]) -> String {
    formats
        .iter()
        .map(|f| f.name())
        .collect::<Vec<_>>()
        .join(",")
}
