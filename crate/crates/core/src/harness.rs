//! Refinement studies: scheme order on an exactly advected density wave and
//! the asymptotics of the extrapolation kernel.

use std::fmt;

use crate::config::{InitialCondition, SimConfig};
use crate::driver::{build_problem, initial_field};
use crate::error::{Error, Result};
use crate::euler::conserved_to_primitive;
use crate::extrapolation::{extrapolate, ExtrapParams, ExtrapStencil};
use crate::mesh::NodeClass;
use crate::solver::{run, FieldState, Problem, TimeControls};

/// One refinement level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderRow {
    /// Resolution label (grid points or inverse step).
    pub n: usize,
    pub h: f64,
    pub l1: f64,
    pub linf: f64,
    /// `log2(e_prev / e)` against the previous row.
    pub order_l1: Option<f64>,
    pub order_linf: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderTable {
    pub title: String,
    pub rows: Vec<OrderRow>,
}

impl OrderTable {
    fn from_errors(title: &str, data: Vec<(usize, f64, f64, f64)>) -> Self {
        let mut rows: Vec<OrderRow> = Vec::with_capacity(data.len());
        for (n, h, l1, linf) in data {
            let (order_l1, order_linf) = match rows.last() {
                Some(prev) => (
                    Some((prev.l1 / l1).ln() / (prev.h / h).ln()),
                    Some((prev.linf / linf).ln() / (prev.h / h).ln()),
                ),
                None => (None, None),
            };
            rows.push(OrderRow {
                n,
                h,
                l1,
                linf,
                order_l1,
                order_linf,
            });
        }
        Self {
            title: title.to_string(),
            rows,
        }
    }

    /// Observed L1 orders, one per refinement.
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order_l1).collect()
    }
}

impl fmt::Display for OrderTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        writeln!(
            f,
            "{:>8} {:>12} {:>12} {:>8} {:>12} {:>8}",
            "n", "h", "L1", "order", "Linf", "order"
        )?;
        for r in &self.rows {
            let o = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
            writeln!(
                f,
                "{:>8} {:>12.4e} {:>12.4e} {:>8} {:>12.4e} {:>8}",
                r.n,
                r.h,
                r.l1,
                o(r.order_l1),
                r.linf,
                o(r.order_linf)
            )?;
        }
        Ok(())
    }
}

fn require_wave(config: &SimConfig) -> Result<()> {
    match config.initial {
        InitialCondition::DensityWave { .. } => Ok(()),
        _ => Err(Error::Unsupported(format!(
            "convergence studies need the analytic `density_wave` case, got `{}`",
            config.initial.name()
        ))),
    }
}

/// Density errors against the exactly advected initial profile.
fn wave_errors(config: &SimConfig, problem: &Problem, state: &FieldState) -> Result<(f64, f64)> {
    let fs = config.free_stream();
    let grid = &problem.grid;
    let (mut l1, mut linf, mut count) = (0.0, 0.0f64, 0usize);
    for k in 0..grid.len() {
        if grid.class_at(k) != NodeClass::Fluid {
            continue;
        }
        let (i, j) = grid.coords(k);
        let [x, y] = grid.position(i, j);
        let lx = config.domain.xmax - config.domain.xmin;
        let shifted =
            config.domain.xmin + (x - fs.u * state.time - config.domain.xmin).rem_euclid(lx);
        let exact = config.initial_state(shifted, y).rho;
        let got = conserved_to_primitive(state.u[k], problem.gas)
            .map_err(|e| e.at_node((i, j)))?
            .rho;
        let e = (got - exact).abs();
        l1 += e;
        linf = linf.max(e);
        count += 1;
    }
    Ok((l1 / count as f64, linf))
}

fn refine(config: &SimConfig, level: usize) -> SimConfig {
    let mut c = config.clone();
    c.nx = config.nx << level;
    if config.ny > 1 {
        c.ny = config.ny << level;
    }
    c
}

fn run_to_end(config: &SimConfig, dt: f64) -> Result<(Problem, FieldState)> {
    let problem = build_problem(config)?;
    let mut state = initial_field(config, &problem)?;
    let steps = (config.time.t_end / dt).round().max(1.0);
    let controls = TimeControls {
        fixed_dt: Some(config.time.t_end / steps),
        max_steps: None,
        log_every: 0,
        ..config.time
    };
    run(&problem, &mut state, &controls)?;
    Ok((problem, state))
}

/// Step size from the CFL rule on the initial field of `config`.
fn cfl_dt(config: &SimConfig) -> Result<f64> {
    let problem = build_problem(config)?;
    let mut state = initial_field(config, &problem)?;
    crate::solver::refill_ghosts(&problem, &mut state.u)?;
    crate::solver::cfl_timestep(&problem, &state.u, config.time.cfl)
}

/// Spatial order: `levels` grids with x spacing halved each time. The step
/// shrinks like `h^(5/3)` so the third-order time error stays below the
/// fifth-order spatial error.
pub fn spatial_convergence(config: &SimConfig, levels: usize) -> Result<OrderTable> {
    require_wave(config)?;
    let dt0 = cfl_dt(config)?;
    let mut data = Vec::new();
    for level in 0..levels {
        let c = refine(config, level);
        let dt = dt0 * 0.5f64.powf(level as f64 * 5.0 / 3.0);
        let (problem, state) = run_to_end(&c, dt)?;
        let (l1, linf) = wave_errors(&c, &problem, &state)?;
        data.push((c.nx, problem.grid.hx, l1, linf));
    }
    Ok(OrderTable::from_errors(
        "spatial convergence (density, exact advection)",
        data,
    ))
}

/// Temporal order on the configured grid: step halved per level, errors
/// measured between consecutive levels so the spatial error cancels.
pub fn temporal_convergence(config: &SimConfig, levels: usize) -> Result<OrderTable> {
    require_wave(config)?;
    let dt0 = cfl_dt(config)?;
    let mut fields = Vec::new();
    for level in 0..=levels {
        let dt = dt0 * 0.5f64.powi(level as i32);
        let (problem, state) = run_to_end(config, dt)?;
        fields.push((dt, problem, state));
    }
    let mut data = Vec::new();
    for w in fields.windows(2) {
        let (dt, problem, a) = (&w[0].0, &w[0].1, &w[0].2);
        let b = &w[1].2;
        let (mut l1, mut linf, mut count) = (0.0, 0.0f64, 0usize);
        for k in problem.grid.fluid_nodes() {
            let e = (a.u[k].rho - b.u[k].rho).abs();
            l1 += e;
            linf = linf.max(e);
            count += 1;
        }
        let steps = (config.time.t_end / dt).round() as usize;
        data.push((steps, *dt, l1 / count as f64, linf));
    }
    Ok(OrderTable::from_errors(
        "temporal convergence (density, successive step halving)",
        data,
    ))
}

/// Smooth-data kernel study: `sin` sampled on `R + 1` nodes from `x0 = 2`
/// with spacing `h0 / 2^l`, extrapolated one spacing to the left. Rows hold
/// the extrapolation error (`l1`) and `1 - omega` (`linf`).
pub fn kernel_smooth(params: &ExtrapParams, h0: f64, levels: usize) -> Result<OrderTable> {
    let mut data = Vec::new();
    for level in 0..levels {
        let h = h0 * 0.5f64.powi(level as i32);
        let x0 = 2.0;
        let values = (0..=params.stencil_degree)
            .map(|j| (x0 + j as f64 * h).sin())
            .collect();
        let st = ExtrapStencil::new(x0, h, values, x0 - h)?;
        let r = extrapolate(&st, params)?;
        data.push((
            1usize << level,
            h,
            (r.u_star - (x0 - h).sin()).abs(),
            1.0 - r.omega,
        ));
    }
    Ok(OrderTable::from_errors(
        "extrapolation kernel, smooth data (L1 = |error|, Linf = 1 - omega)",
        data,
    ))
}

/// Discontinuous-data kernel study: a unit jump at mid-stencil superposed on
/// the ramp `u = x`, spacing `h0 / 2^l`. Rows hold omega in both columns; the
/// observed "order" is the decay rate of omega.
pub fn kernel_step(params: &ExtrapParams, h0: f64, levels: usize) -> Result<OrderTable> {
    let mut data = Vec::new();
    for level in 0..levels {
        let h = h0 * 0.5f64.powi(level as i32);
        let mid = params.stencil_degree as f64 / 2.0 + 0.5;
        let values = (0..=params.stencil_degree)
            .map(|j| {
                let x = j as f64 * h;
                x + if (j as f64) > mid { 1.0 } else { 0.0 }
            })
            .collect();
        let st = ExtrapStencil::new(0.0, h, values, -h)?;
        let r = extrapolate(&st, params)?;
        data.push((1usize << level, h, r.omega, r.omega));
    }
    Ok(OrderTable::from_errors(
        "extrapolation kernel, step on a ramp (omega)",
        data,
    ))
}
