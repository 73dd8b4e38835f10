//! Semi-discrete WENO operator on the classified lattice and the third-order
//! strong-stability-preserving Runge–Kutta time integrator.

use std::time::Instant;

use rayon::prelude::*;

use crate::boundary::{fill_all, FillOptions, FillReport};
use crate::error::{Error, Result};
use crate::euler::{
    max_wave_speed, primitive_to_conserved, Axis, ConservedState, GasModel, PrimitiveState,
};
use crate::mesh::{GhostSet, Grid, NodeClass};
use crate::weno::{global_lf_flux, marquina_flux, NodeData, SplitMode};

/// Everything that stays fixed during a run.
#[derive(Clone, Debug)]
pub struct Problem {
    pub grid: Grid,
    pub ghosts: GhostSet,
    pub gas: GasModel,
    /// State prescribed on inflow and far-field boundaries.
    pub free_stream: PrimitiveState,
    pub split: SplitMode,
    pub fill: FillOptions,
}

/// Conserved field on the padded lattice and its time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub u: Vec<ConservedState>,
    pub time: f64,
}

impl FieldState {
    /// Field with `init(x, y)` at fluid nodes and the free stream elsewhere;
    /// ghosts are filled by the first call to [`refill_ghosts`].
    pub fn from_fn(problem: &Problem, init: impl Fn(f64, f64) -> PrimitiveState) -> Result<Self> {
        let grid = &problem.grid;
        let filler = primitive_to_conserved(problem.free_stream, problem.gas)?;
        let u = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.coords(k);
                if grid.class_at(k) == NodeClass::Fluid {
                    let [x, y] = grid.position(i, j);
                    primitive_to_conserved(init(x, y), problem.gas).map_err(|e| e.at_node((i, j)))
                } else {
                    Ok(filler)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { u, time: 0.0 })
    }

    /// `Σ rho hx hy` over fluid nodes.
    pub fn mass(&self, grid: &Grid) -> f64 {
        self.integral(grid, |s| s.rho)
    }

    pub fn integral(&self, grid: &Grid, f: impl Fn(&ConservedState) -> f64) -> f64 {
        let sum: f64 = self
            .u
            .iter()
            .zip(grid.classes())
            .filter(|(_, c)| **c == NodeClass::Fluid)
            .map(|(s, _)| f(s))
            .sum();
        sum * grid.hx * grid.hy
    }
}

/// Stopping and step-size rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeControls {
    pub cfl: f64,
    pub t_end: f64,
    /// Use this step instead of the CFL rule (still capped at `t_end`).
    pub fixed_dt: Option<f64>,
    pub max_steps: Option<usize>,
    /// Log progress every this many steps (0 disables).
    pub log_every: usize,
}

impl Default for TimeControls {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            t_end: 1.0,
            fixed_dt: None,
            max_steps: None,
            log_every: 100,
        }
    }
}

impl TimeControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!(
                    "fixed dt must be positive, got {dt}"
                )));
            }
        }
        Ok(())
    }
}

/// Summary of a completed run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub time: f64,
    pub wall_seconds: f64,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Ghost fills with a global weight below 0.5, summed over all stages.
    pub low_omega_fills: usize,
    pub clamped_fills: usize,
    pub min_omega: f64,
}

/// Fill every ghost of `field` from its fluid nodes.
pub fn refill_ghosts(problem: &Problem, u: &mut [ConservedState]) -> Result<FillReport> {
    fill_all(
        &problem.grid,
        &problem.ghosts,
        problem.free_stream,
        problem.gas,
        u,
        problem.fill,
    )
}

fn global_alpha(problem: &Problem, u: &[ConservedState]) -> Result<(f64, f64)> {
    let used = u
        .iter()
        .zip(problem.grid.classes())
        .filter(|(_, c)| **c != NodeClass::UnusedExterior)
        .map(|(s, _)| s);
    max_wave_speed(used, problem.gas)
}

/// Flux differences along one lattice line: `out[q] += -(F_{q+1/2} - F_{q-1/2}) / h`
/// for every fluid position `q`. `node(q)` is the flat index of position `q`.
#[allow(clippy::too_many_arguments)]
fn sweep_line(
    problem: &Problem,
    u: &[ConservedState],
    axis: Axis,
    len: usize,
    node: impl Fn(usize) -> usize,
    alpha: f64,
    h: f64,
    out: &mut [[f64; 4]],
) -> Result<()> {
    let grid = &problem.grid;
    let fluid: Vec<bool> = (0..len)
        .map(|q| grid.class_at(node(q)) == NodeClass::Fluid)
        .collect();
    if !fluid.iter().any(|f| *f) {
        return Ok(());
    }
    let mut data: Vec<Option<NodeData>> = Vec::with_capacity(len);
    for q in 0..len {
        let k = node(q);
        data.push(if grid.class_at(k) == NodeClass::UnusedExterior {
            None
        } else {
            Some(NodeData::new(u[k], problem.gas, axis).map_err(|e| e.at_node(grid.coords(k)))?)
        });
    }
    let flux_at = |q: usize| -> [f64; 4] {
        // interface between q and q+1
        let nodes: [&NodeData; 6] = std::array::from_fn(|m| {
            data[q + m - 2]
                .as_ref()
                .expect("interface stencil reaches an unused node")
        });
        match problem.split {
            SplitMode::DonatMarquina => marquina_flux(nodes),
            SplitMode::GlobalLaxFriedrichs => global_lf_flux(nodes, alpha),
        }
    };
    let mut prev: Option<(usize, [f64; 4])> = None;
    for q in 0..len {
        if !fluid[q] {
            continue;
        }
        let left = match prev {
            Some((p, f)) if p == q - 1 => f,
            _ => flux_at(q - 1),
        };
        let right = flux_at(q);
        for c in 0..4 {
            out[q][c] -= (right[c] - left[c]) / h;
        }
        prev = Some((q, right));
    }
    Ok(())
}

/// `L(u)` at every node (zero away from fluid nodes). Ghosts must be filled.
pub fn semidiscrete_rhs(
    problem: &Problem,
    u: &[ConservedState],
    rhs: &mut [[f64; 4]],
) -> Result<()> {
    let grid = &problem.grid;
    let (w, h) = (grid.width(), grid.height());
    let (ax, ay) = match problem.split {
        SplitMode::GlobalLaxFriedrichs => global_alpha(problem, u)?,
        SplitMode::DonatMarquina => (0.0, 0.0),
    };
    rhs.par_chunks_mut(w).enumerate().try_for_each(|(j, row)| {
        row.iter_mut().for_each(|r| *r = [0.0; 4]);
        sweep_line(
            problem,
            u,
            Axis::X,
            w,
            |i| grid.index(i, j),
            ax,
            grid.hx,
            row,
        )
    })?;
    let columns: Vec<Vec<[f64; 4]>> = (0..w)
        .into_par_iter()
        .map(|i| {
            let mut col = vec![[0.0; 4]; h];
            sweep_line(
                problem,
                u,
                Axis::Y,
                h,
                |j| grid.index(i, j),
                ay,
                grid.hy,
                &mut col,
            )?;
            Ok(col)
        })
        .collect::<Result<_>>()?;
    for (i, col) in columns.iter().enumerate() {
        for (j, d) in col.iter().enumerate() {
            let r = &mut rhs[j * w + i];
            for c in 0..4 {
                r[c] += d[c];
            }
        }
    }
    Ok(())
}

/// Largest stable step `cfl / (sx/hx + sy/hy)` over fluid nodes.
pub fn cfl_timestep(problem: &Problem, u: &[ConservedState], cfl: f64) -> Result<f64> {
    let grid = &problem.grid;
    let fluid = u
        .iter()
        .zip(grid.classes())
        .enumerate()
        .filter(|(_, (_, c))| **c == NodeClass::Fluid);
    // locate an offending node for the error message
    for (k, (s, _)) in fluid.clone() {
        if !(s.rho > 0.0) || !(s.pressure_unchecked(problem.gas) > 0.0) {
            return Err(Error::Unphysical {
                node: Some(grid.coords(k)),
                rho: s.rho,
                p: s.pressure_unchecked(problem.gas),
            });
        }
    }
    let (sx, sy) = max_wave_speed(fluid.map(|(_, (s, _))| s), problem.gas)?;
    Ok(cfl / (sx / grid.hx + sy / grid.hy))
}

/// Work arrays reused across steps.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    rhs: Vec<[f64; 4]>,
    stage: Vec<ConservedState>,
}

#[allow(clippy::too_many_arguments)]
fn combine(
    grid: &Grid,
    out: &mut [ConservedState],
    base: &[ConservedState],
    a: f64,
    stage: &[ConservedState],
    b: f64,
    rhs: &[[f64; 4]],
    dt: f64,
) {
    out.par_iter_mut()
        .zip(grid.classes().par_iter())
        .enumerate()
        .filter(|(_, (_, c))| **c == NodeClass::Fluid)
        .for_each(|(k, (o, _))| {
            let u0 = base[k].to_array();
            let us = stage[k].to_array();
            let r = rhs[k];
            *o = ConservedState::from_array(std::array::from_fn(|c| {
                a * u0[c] + b * (us[c] + dt * r[c])
            }));
        });
}

/// One Shu–Osher RK3 step of size `dt`, ghosts refilled after every stage.
pub fn rk3_step(
    problem: &Problem,
    u: &mut [ConservedState],
    dt: f64,
    scratch: &mut Scratch,
) -> Result<FillReport> {
    let grid = &problem.grid;
    scratch.rhs.resize(u.len(), [0.0; 4]);
    scratch.stage.clear();
    scratch.stage.extend_from_slice(u);
    let mut report = FillReport {
        min_omega: 1.0,
        ..Default::default()
    };
    let mut merge = |r: FillReport| {
        report.filled += r.filled;
        report.low_omega += r.low_omega;
        report.clamped += r.clamped;
        report.min_omega = report.min_omega.min(r.min_omega);
    };

    // u1 = u + dt L(u)
    semidiscrete_rhs(problem, u, &mut scratch.rhs)?;
    let base = u.to_vec();
    combine(
        grid,
        &mut scratch.stage,
        &base,
        0.0,
        &base,
        1.0,
        &scratch.rhs,
        dt,
    );
    merge(refill_ghosts(problem, &mut scratch.stage)?);

    // u2 = 3/4 u + 1/4 (u1 + dt L(u1))
    semidiscrete_rhs(problem, &scratch.stage, &mut scratch.rhs)?;
    let u1 = scratch.stage.clone();
    combine(
        grid,
        &mut scratch.stage,
        &base,
        0.75,
        &u1,
        0.25,
        &scratch.rhs,
        dt,
    );
    merge(refill_ghosts(problem, &mut scratch.stage)?);

    // u = 1/3 u + 2/3 (u2 + dt L(u2))
    semidiscrete_rhs(problem, &scratch.stage, &mut scratch.rhs)?;
    combine(
        grid,
        u,
        &base,
        1.0 / 3.0,
        &scratch.stage,
        2.0 / 3.0,
        &scratch.rhs,
        dt,
    );
    merge(refill_ghosts(problem, u)?);
    Ok(report)
}

/// Integrate from `state.time` to `controls.t_end`.
pub fn run(
    problem: &Problem,
    state: &mut FieldState,
    controls: &TimeControls,
) -> Result<RunSummary> {
    controls.validate()?;
    let start = Instant::now();
    let first = refill_ghosts(problem, &mut state.u)?;
    let mut summary = RunSummary {
        initial_mass: state.mass(&problem.grid),
        min_omega: first.min_omega,
        ..Default::default()
    };
    let mut scratch = Scratch::default();
    let tol = 1e-12 * controls.t_end.max(1.0);
    while state.time < controls.t_end - tol {
        if controls.max_steps.is_some_and(|m| summary.steps >= m) {
            break;
        }
        let wrap = |e: Error, step: usize, time: f64| Error::Step {
            step,
            time,
            source: Box::new(e),
        };
        let dt = match controls.fixed_dt {
            Some(dt) => dt,
            None => cfl_timestep(problem, &state.u, controls.cfl)
                .map_err(|e| wrap(e, summary.steps + 1, state.time))?,
        }
        .min(controls.t_end - state.time);
        let report = rk3_step(problem, &mut state.u, dt, &mut scratch)
            .map_err(|e| wrap(e, summary.steps + 1, state.time))?;
        state.time += dt;
        summary.steps += 1;
        summary.low_omega_fills += report.low_omega;
        summary.clamped_fills += report.clamped;
        summary.min_omega = summary.min_omega.min(report.min_omega);
        if controls.log_every > 0 && summary.steps.is_multiple_of(controls.log_every) {
            log::info!(
                "step {:>6}  t = {:.5}  dt = {:.3e}  mass = {:.10e}  low-omega fills = {}",
                summary.steps,
                state.time,
                dt,
                state.mass(&problem.grid),
                report.low_omega
            );
        }
    }
    summary.time = state.time;
    summary.final_mass = state.mass(&problem.grid);
    summary.wall_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Size the global worker pool from `CARTWING_THREADS` (unset or 0: one
/// worker per core). Only the first call has an effect.
pub fn configure_threads() -> Result<usize> {
    let threads = match std::env::var("CARTWING_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::Config(format!(
                "CARTWING_THREADS must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(rayon::current_num_threads())
}
