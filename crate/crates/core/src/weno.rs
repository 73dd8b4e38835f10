//! Fifth-order WENO flux reconstruction and the flux splittings that feed it.
//!
//! Point values of a split flux on the six nodes `j-2 ..= j+3` determine the
//! numerical flux at the interface `j+1/2`. The positive part is reconstructed
//! from the left-biased five-point window `j-2 ..= j+2`, the negative part
//! from the mirrored window `j+3 ..= j-1`.

use crate::error::{Error, Result};
use crate::euler::{
    conserved_to_primitive, eigensystem_from_primitive, flux_from_primitive, Axis, ConservedState,
    EigenSystem, GasModel,
};

/// Half-width of the WENO5 stencil: each interface reads `2 * STENCIL_HALF` nodes.
pub const STENCIL_HALF: usize = 3;

/// Regularization added to the smoothness indicators in the nonlinear weights.
pub const WENO_EPS: f64 = 1e-6;

const IDEAL_WEIGHTS: [f64; 3] = [0.1, 0.6, 0.3];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitMode {
    /// Component-wise splitting with a single global viscosity, kept as a
    /// cross-check for the characteristic scheme.
    GlobalLaxFriedrichs,
    #[default]
    DonatMarquina,
}

impl SplitMode {
    pub fn name(self) -> &'static str {
        match self {
            SplitMode::GlobalLaxFriedrichs => "global_lax_friedrichs",
            SplitMode::DonatMarquina => "donat_marquina",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "global_lax_friedrichs" | "lax_friedrichs" | "lf" => {
                Some(SplitMode::GlobalLaxFriedrichs)
            }
            "donat_marquina" | "marquina" => Some(SplitMode::DonatMarquina),
            _ => None,
        }
    }
}

/// Jiang–Shu smoothness indicators of the three quadratic substencils.
#[inline]
pub fn jiang_shu_indicators(v: &[f64; 5]) -> [f64; 3] {
    let d0 = v[0] - 2.0 * v[1] + v[2];
    let d1 = v[1] - 2.0 * v[2] + v[3];
    let d2 = v[2] - 2.0 * v[3] + v[4];
    let e0 = v[0] - 4.0 * v[1] + 3.0 * v[2];
    let e1 = v[1] - v[3];
    let e2 = 3.0 * v[2] - 4.0 * v[3] + v[4];
    const C: f64 = 13.0 / 12.0;
    [
        C * d0 * d0 + 0.25 * e0 * e0,
        C * d1 * d1 + 0.25 * e1 * e1,
        C * d2 * d2 + 0.25 * e2 * e2,
    ]
}

/// Left-biased WENO5 value at the right interface of the central node `v[2]`.
#[inline]
pub fn weno5_reconstruct_left(v: &[f64; 5], eps: f64) -> f64 {
    let q0 = (2.0 * v[0] - 7.0 * v[1] + 11.0 * v[2]) / 6.0;
    let q1 = (-v[1] + 5.0 * v[2] + 2.0 * v[3]) / 6.0;
    let q2 = (2.0 * v[2] + 5.0 * v[3] - v[4]) / 6.0;
    let beta = jiang_shu_indicators(v);
    let a0 = IDEAL_WEIGHTS[0] / ((eps + beta[0]) * (eps + beta[0]));
    let a1 = IDEAL_WEIGHTS[1] / ((eps + beta[1]) * (eps + beta[1]));
    let a2 = IDEAL_WEIGHTS[2] / ((eps + beta[2]) * (eps + beta[2]));
    (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
}

/// Point values of one split flux component around an interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxStencil {
    /// Values on nodes `j-2 ..= j+3`.
    pub values: [f64; 6],
    pub h: f64,
}

impl FluxStencil {
    /// Upwind reconstruction at `j+1/2` of the positive part (from the left)
    /// or the negative part (from the right).
    pub fn reconstruct(&self, positive: bool) -> f64 {
        let v = &self.values;
        if positive {
            weno5_reconstruct_left(&[v[0], v[1], v[2], v[3], v[4]], WENO_EPS)
        } else {
            weno5_reconstruct_left(&[v[5], v[4], v[3], v[2], v[1]], WENO_EPS)
        }
    }
}

/// Global Lax–Friedrichs splitting `f± = (f ± alpha u) / 2`.
pub fn split_flux_global_lf(u: &[f64], f: &[f64], alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(alpha > 0.0) {
        return Err(Error::Config(format!(
            "splitting speed must be positive, got {alpha}"
        )));
    }
    if u.len() != f.len() {
        return Err(Error::Domain(
            "state and flux arrays differ in length".into(),
        ));
    }
    let plus = u
        .iter()
        .zip(f)
        .map(|(u, f)| 0.5 * (f + alpha * u))
        .collect();
    let minus = u
        .iter()
        .zip(f)
        .map(|(u, f)| 0.5 * (f - alpha * u))
        .collect();
    Ok((plus, minus))
}

/// Per-node data used by the interface flux formulas: conserved values,
/// physical flux and the local characteristic system along the sweep axis.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NodeData {
    pub u: [f64; 4],
    pub f: [f64; 4],
    pub eig: EigenSystem,
}

impl NodeData {
    pub fn new(cons: ConservedState, gas: GasModel, axis: Axis) -> Result<Self> {
        let prim = conserved_to_primitive(cons, gas)?;
        Ok(Self {
            u: cons.to_array(),
            f: flux_from_primitive(&cons, &prim, axis),
            eig: eigensystem_from_primitive(&prim, gas, axis),
        })
    }
}

#[inline]
fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Donat–Marquina numerical flux from six consecutive nodes, the interface
/// lying between `nodes[2]` and `nodes[3]`.
pub(crate) fn marquina_flux(nodes: [&NodeData; 6]) -> [f64; 4] {
    let left = &nodes[2].eig;
    let right = &nodes[3].eig;
    let mut out = [0.0; 4];
    for p in 0..4 {
        let lam_l = left.eigenvalues[p];
        let lam_r = right.eigenvalues[p];
        let ll = &left.left[p];
        let lr = &right.left[p];
        let (plus, minus) = if lam_l > 0.0 && lam_r > 0.0 {
            let w: [f64; 5] = std::array::from_fn(|i| dot4(ll, &nodes[i].f));
            (weno5_reconstruct_left(&w, WENO_EPS), 0.0)
        } else if lam_l < 0.0 && lam_r < 0.0 {
            let w: [f64; 5] = std::array::from_fn(|i| dot4(lr, &nodes[5 - i].f));
            (0.0, weno5_reconstruct_left(&w, WENO_EPS))
        } else {
            let alpha = lam_l.abs().max(lam_r.abs());
            let wp: [f64; 5] = std::array::from_fn(|i| {
                let n = nodes[i];
                0.5 * (dot4(ll, &n.f) + alpha * dot4(ll, &n.u))
            });
            let wm: [f64; 5] = std::array::from_fn(|i| {
                let n = nodes[5 - i];
                0.5 * (dot4(lr, &n.f) - alpha * dot4(lr, &n.u))
            });
            (
                weno5_reconstruct_left(&wp, WENO_EPS),
                weno5_reconstruct_left(&wm, WENO_EPS),
            )
        };
        for (row, o) in out.iter_mut().enumerate() {
            *o += plus * left.right[row][p] + minus * right.right[row][p];
        }
    }
    out
}

/// Component-wise global Lax–Friedrichs numerical flux with viscosity `alpha`.
pub(crate) fn global_lf_flux(nodes: [&NodeData; 6], alpha: f64) -> [f64; 4] {
    std::array::from_fn(|c| {
        let wp: [f64; 5] = std::array::from_fn(|i| 0.5 * (nodes[i].f[c] + alpha * nodes[i].u[c]));
        let wm: [f64; 5] =
            std::array::from_fn(|i| 0.5 * (nodes[5 - i].f[c] - alpha * nodes[5 - i].u[c]));
        weno5_reconstruct_left(&wp, WENO_EPS) + weno5_reconstruct_left(&wm, WENO_EPS)
    })
}

/// Donat–Marquina numerical flux at the interface between `states[2]` and
/// `states[3]`.
pub fn marquina_interface_flux(
    states: &[ConservedState; 6],
    gas: GasModel,
    axis: Axis,
) -> Result<[f64; 4]> {
    let data = node_data(states, gas, axis)?;
    Ok(marquina_flux(std::array::from_fn(|i| &data[i])))
}

/// Global Lax–Friedrichs numerical flux at the interface between `states[2]`
/// and `states[3]`.
pub fn lax_friedrichs_interface_flux(
    states: &[ConservedState; 6],
    alpha: f64,
    gas: GasModel,
    axis: Axis,
) -> Result<[f64; 4]> {
    if !(alpha > 0.0) {
        return Err(Error::Config(format!(
            "splitting speed must be positive, got {alpha}"
        )));
    }
    let data = node_data(states, gas, axis)?;
    Ok(global_lf_flux(std::array::from_fn(|i| &data[i]), alpha))
}

fn node_data(states: &[ConservedState; 6], gas: GasModel, axis: Axis) -> Result<Vec<NodeData>> {
    states
        .iter()
        .map(|s| NodeData::new(*s, gas, axis))
        .collect()
}
