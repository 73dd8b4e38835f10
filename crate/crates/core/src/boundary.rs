//! Ghost-node filling from the precomputed recipes of [`crate::mesh`].
//!
//! Every fill reads fluid nodes only, so the order in which ghosts are
//! processed is irrelevant and refilling is idempotent.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euler::{
    conserved_to_primitive, primitive_to_conserved, ConservedState, GasModel, PrimitiveState,
};
use crate::geometry::BoundaryFoot;
use crate::mesh::{BcKind, FillPlan, GhostSet, GhostStencil, Grid};

/// Resolved boundary treatment for one boundary component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryConditionSpec {
    DirichletInflow(PrimitiveState),
    OutflowExtrapolate,
    ReflectingWall,
}

impl BoundaryConditionSpec {
    /// Treatment of a boundary kind with `free_stream` as the prescribed
    /// state; `None` for periodic sides, which have no stencil.
    pub fn resolve(kind: BcKind, free_stream: PrimitiveState) -> Option<Self> {
        match kind {
            BcKind::Inflow | BcKind::FarField => Some(Self::DirichletInflow(free_stream)),
            BcKind::Outflow => Some(Self::OutflowExtrapolate),
            BcKind::Reflecting => Some(Self::ReflectingWall),
            BcKind::Periodic => None,
        }
    }
}

/// Options for [`fill_all`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FillOptions {
    /// Diagnostic mode: replace non-positive ghost density or pressure by a
    /// small floor instead of failing.
    pub clamp: bool,
}

/// Counters from one sweep over all ghosts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FillReport {
    pub filled: usize,
    /// Ghosts where at least one extrapolation had a global weight below 0.5.
    pub low_omega: usize,
    pub min_omega: f64,
    /// Ghosts repaired in clamp mode.
    pub clamped: usize,
}

const CLAMP_FLOOR: f64 = 1e-8;

/// Values of the conserved field at the crossings `N_i`.
pub fn interpolate_to_line(stencil: &GhostStencil, field: &[ConservedState]) -> Vec<[f64; 4]> {
    stencil
        .lines
        .iter()
        .map(|line| {
            let mut acc = [0.0; 4];
            for (node, w) in line.nodes.iter().zip(&line.weights) {
                let u = field[*node].to_array();
                for c in 0..4 {
                    acc[c] += w * u[c];
                }
            }
            acc
        })
        .collect()
}

/// Outcome of one ghost fill before validation.
struct Filled {
    state: [f64; 4],
    min_omega: f64,
}

fn column(values: &[[f64; 4]], c: usize) -> Vec<f64> {
    values.iter().map(|v| v[c]).collect()
}

/// Extrapolate every component of `N_i` straight to the ghost.
pub fn fill_outflow(stencil: &GhostStencil, line_values: &[[f64; 4]]) -> ([f64; 4], f64) {
    match &stencil.plan {
        FillPlan::Outflow { ghost } => {
            let mut out = [0.0; 4];
            let mut min_omega = 1.0f64;
            for (c, o) in out.iter_mut().enumerate() {
                let (v, w) = ghost.apply(&column(line_values, c));
                *o = v;
                min_omega = min_omega.min(w);
            }
            (out, min_omega)
        }
        _ => (line_values[0], 1.0),
    }
}

/// Transfer line values to the wall points `P_1..P_R`, component by component.
fn to_wall(
    plans: &[crate::extrapolation::ExtrapPlan],
    line_values: &[[f64; 4]],
    min_omega: &mut f64,
) -> Vec<[f64; 4]> {
    let cols: Vec<Vec<f64>> = (0..4).map(|c| column(line_values, c)).collect();
    plans
        .iter()
        .map(|plan| {
            let mut v = [0.0; 4];
            for c in 0..4 {
                let (x, w) = plan.apply(&cols[c]);
                v[c] = x;
                *min_omega = min_omega.min(w);
            }
            v
        })
        .collect()
}

/// Prescribed state at `P_0`, interior values at `P_1..P_R`, extrapolated
/// to the ghost.
pub fn fill_dirichlet(
    stencil: &GhostStencil,
    line_values: &[[f64; 4]],
    boundary: ConservedState,
) -> ([f64; 4], f64) {
    match &stencil.plan {
        FillPlan::Dirichlet {
            to_wall: plans,
            ghost,
        } => {
            let mut min_omega = 1.0f64;
            let wall = to_wall(plans, line_values, &mut min_omega);
            let b = boundary.to_array();
            let mut out = [0.0; 4];
            let mut values = Vec::with_capacity(wall.len() + 1);
            for c in 0..4 {
                values.clear();
                values.push(b[c]);
                values.extend(wall.iter().map(|v| v[c]));
                let (x, w) = ghost.apply(&values);
                out[c] = x;
                min_omega = min_omega.min(w);
            }
            (out, min_omega)
        }
        _ => (boundary.to_array(), 1.0),
    }
}

/// Normal and tangential components `(v_n, v_t)` of `(u, v)` at a foot.
pub fn decompose_velocity(u: f64, v: f64, foot: &BoundaryFoot) -> (f64, f64) {
    (
        u * foot.normal[0] + v * foot.normal[1],
        u * foot.tangent[0] + v * foot.tangent[1],
    )
}

/// Inverse of [`decompose_velocity`].
pub fn recompose_velocity(vn: f64, vt: f64, foot: &BoundaryFoot) -> (f64, f64) {
    (
        vn * foot.normal[0] + vt * foot.tangent[0],
        vn * foot.normal[1] + vt * foot.tangent[1],
    )
}

/// `(rho, v_n, v_t, p)` in the frame of the foot.
fn to_normal_frame(u: [f64; 4], foot: &BoundaryFoot, gas: GasModel) -> Result<[f64; 4]> {
    let prim = conserved_to_primitive(ConservedState::from_array(u), gas)?;
    let (vn, vt) = decompose_velocity(prim.u, prim.v, foot);
    Ok([prim.rho, vn, vt, prim.p])
}

fn from_normal_frame(w: [f64; 4], foot: &BoundaryFoot, gas: GasModel) -> [f64; 4] {
    let [rho, vn, vt, p] = w;
    let (u, v) = recompose_velocity(vn, vt, foot);
    [
        rho,
        rho * u,
        rho * v,
        p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v),
    ]
}

/// Slip wall: density, pressure and tangential velocity are extrapolated from
/// the interior alone, the normal velocity with `v_n = 0` prescribed at the
/// wall.
pub fn fill_reflecting(
    stencil: &GhostStencil,
    line_values: &[[f64; 4]],
    gas: GasModel,
) -> Result<([f64; 4], f64)> {
    let local = line_values
        .iter()
        .map(|u| to_normal_frame(*u, &stencil.foot, gas))
        .collect::<Result<Vec<_>>>()?;
    match &stencil.plan {
        FillPlan::Reflecting {
            to_wall: plans,
            from_interior,
            with_wall,
        } => {
            let mut min_omega = 1.0f64;
            let mut out = [0.0; 4];
            for c in [0, 2, 3] {
                let (x, w) = from_interior.apply(&column(&local, c));
                out[c] = x;
                min_omega = min_omega.min(w);
            }
            let wall = to_wall(plans, &local, &mut min_omega);
            let mut vn = Vec::with_capacity(wall.len() + 1);
            vn.push(0.0);
            vn.extend(wall.iter().map(|v| v[1]));
            let (x, w) = with_wall.apply(&vn);
            out[1] = x;
            min_omega = min_omega.min(w);
            Ok((from_normal_frame(out, &stencil.foot, gas), min_omega))
        }
        _ => {
            let mut mirrored = local[0];
            mirrored[1] = -mirrored[1];
            Ok((from_normal_frame(mirrored, &stencil.foot, gas), 1.0))
        }
    }
}

fn fill_one(
    stencil: &GhostStencil,
    field: &[ConservedState],
    boundary: ConservedState,
    gas: GasModel,
) -> Result<Filled> {
    let line_values = interpolate_to_line(stencil, field);
    let (state, min_omega) = match stencil.bc {
        BcKind::Outflow => fill_outflow(stencil, &line_values),
        BcKind::Inflow | BcKind::FarField => fill_dirichlet(stencil, &line_values, boundary),
        BcKind::Reflecting => fill_reflecting(stencil, &line_values, gas)?,
        BcKind::Periodic => unreachable!("periodic ghosts have no stencil"),
    };
    Ok(Filled { state, min_omega })
}

/// Fill every ghost of `ghosts` in `field`.
///
/// `free_stream` is the state prescribed on inflow and far-field boundaries.
/// Failures are collected over all ghosts and reported together.
pub fn fill_all(
    grid: &Grid,
    ghosts: &GhostSet,
    free_stream: PrimitiveState,
    gas: GasModel,
    field: &mut [ConservedState],
    options: FillOptions,
) -> Result<FillReport> {
    debug_assert_eq!(field.len(), grid.len());
    let boundary = primitive_to_conserved(free_stream, gas)?;
    let snapshot: &[ConservedState] = field;
    let results: Vec<Result<(ConservedState, f64, bool)>> = ghosts
        .stencils
        .par_iter()
        .map(|s| {
            let filled =
                fill_one(s, snapshot, boundary, gas).map_err(|e| Error::UnphysicalGhost {
                    node: s.node,
                    reason: format!("interior data unusable: {e}"),
                })?;
            let mut state = ConservedState::from_array(filled.state);
            let mut clamped = false;
            if conserved_to_primitive(state, gas).is_err() {
                if !options.clamp {
                    return Err(Error::UnphysicalGhost {
                        node: s.node,
                        reason: format!(
                            "rho = {:.6e}, p = {:.6e} ({} boundary)",
                            state.rho,
                            state.pressure_unchecked(gas),
                            s.bc.name()
                        ),
                    });
                }
                state = clamp_state(state, gas);
                clamped = true;
            }
            Ok((state, filled.min_omega, clamped))
        })
        .collect();

    let mut report = FillReport {
        min_omega: 1.0,
        ..Default::default()
    };
    let mut failures = 0;
    let mut first = None;
    for (s, r) in ghosts.stencils.iter().zip(results) {
        match r {
            Ok((state, omega, clamped)) => {
                field[grid.index(s.node.0, s.node.1)] = state;
                report.filled += 1;
                if omega < 0.5 {
                    report.low_omega += 1;
                }
                report.min_omega = report.min_omega.min(omega);
                report.clamped += clamped as usize;
            }
            Err(e) => {
                failures += 1;
                first.get_or_insert(e);
            }
        }
    }
    if let Some(first) = first {
        return Err(Error::GhostFill {
            failures,
            first: Box::new(first),
        });
    }
    for p in &ghosts.periodic {
        field[p.ghost] = field[p.source];
        report.filled += 1;
    }
    Ok(report)
}

fn clamp_state(state: ConservedState, gas: GasModel) -> ConservedState {
    let rho = if state.rho.is_finite() {
        state.rho.max(CLAMP_FLOOR)
    } else {
        CLAMP_FLOOR
    };
    let (u, v) = if state.rho > 0.0 && state.mx.is_finite() && state.my.is_finite() {
        (state.mx / state.rho, state.my / state.rho)
    } else {
        (0.0, 0.0)
    };
    let p = ConservedState::new(rho, rho * u, rho * v, state.energy).pressure_unchecked(gas);
    let p = if p.is_finite() {
        p.max(CLAMP_FLOOR)
    } else {
        CLAMP_FLOOR
    };
    ConservedState::new(
        rho,
        rho * u,
        rho * v,
        p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v),
    )
}
