//! Cartesian lattice, node classification and the per-ghost stencil recipes.
//!
//! Nodes sit at cell centres of an `nx × ny` partition of the bounding box,
//! padded by [`GHOST_DEPTH`] nodes on every side so that the WENO stencils of
//! the outermost fluid nodes stay inside the array.
//!
//! Each ghost node `P` is filled from data on the line through `P` and its
//! closest boundary point `P0`. The recipe for that line is geometry only and
//! is built once:
//!
//! * a block of `R + 1` grid lines (columns when the normal is closer to the
//!   x axis, rows otherwise), each contributing a 1D interpolation of fluid
//!   nodes to the point `N_i` where the normal line crosses it;
//! * equally spaced wall points `P_i = P0 + i d n` for boundaries that carry
//!   a prescribed value;
//! * precomputed extrapolation plans for every 1D transfer along the normal.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, NodeIndex, Result};
use crate::extrapolation::{ExtrapParams, ExtrapPlan};
use crate::geometry::{BoundaryComponent, BoundaryFoot, DomainSpec, Point, Region};
use crate::weno::STENCIL_HALF;

/// Leading block lines that may be skipped when they fail.
const MAX_SKIPPED_LINES: usize = 2;

/// Ghost layers needed on each side of a grid line (`k` for WENO5).
pub const GHOST_DEPTH: usize = STENCIL_HALF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeClass {
    Fluid,
    Ghost,
    UnusedExterior,
}

impl NodeClass {
    pub fn code(self) -> u8 {
        match self {
            NodeClass::Fluid => 0,
            NodeClass::Ghost => 1,
            NodeClass::UnusedExterior => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeClass::Fluid => "fluid",
            NodeClass::Ghost => "ghost",
            NodeClass::UnusedExterior => "unused",
        }
    }
}

/// Boundary treatment attached to a boundary component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    /// Full free-stream state prescribed at the boundary.
    Inflow,
    /// Free-stream state prescribed at a far-field side.
    FarField,
    /// Pure extrapolation from the interior.
    Outflow,
    /// Slip wall.
    Reflecting,
    /// Copy from the opposite side of the box.
    Periodic,
}

impl BcKind {
    pub fn name(self) -> &'static str {
        match self {
            BcKind::Inflow => "inflow",
            BcKind::FarField => "far_field",
            BcKind::Outflow => "outflow",
            BcKind::Reflecting => "reflecting",
            BcKind::Periodic => "periodic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "inflow" => Some(BcKind::Inflow),
            "far_field" => Some(BcKind::FarField),
            "outflow" => Some(BcKind::Outflow),
            "reflecting" | "wall" => Some(BcKind::Reflecting),
            "periodic" => Some(BcKind::Periodic),
            _ => None,
        }
    }

    pub fn is_dirichlet(self) -> bool {
        matches!(self, BcKind::Inflow | BcKind::FarField)
    }
}

/// Boundary kind for every boundary component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryTable {
    pub left: BcKind,
    pub right: BcKind,
    pub bottom: BcKind,
    pub top: BcKind,
    pub airfoil: BcKind,
}

impl Default for BoundaryTable {
    /// Supersonic stream entering from the left.
    fn default() -> Self {
        Self {
            left: BcKind::Inflow,
            right: BcKind::Outflow,
            bottom: BcKind::Outflow,
            top: BcKind::Outflow,
            airfoil: BcKind::Reflecting,
        }
    }
}

impl BoundaryTable {
    pub fn kind(&self, component: BoundaryComponent) -> BcKind {
        match component {
            BoundaryComponent::Airfoil => self.airfoil,
            BoundaryComponent::Left => self.left,
            BoundaryComponent::Right => self.right,
            BoundaryComponent::Bottom => self.bottom,
            BoundaryComponent::Top => self.top,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.left == BcKind::Periodic) != (self.right == BcKind::Periodic)
            || (self.bottom == BcKind::Periodic) != (self.top == BcKind::Periodic)
        {
            return Err(Error::Config(
                "periodic sides must come in opposite pairs".into(),
            ));
        }
        if self.airfoil == BcKind::Periodic {
            return Err(Error::Config("the airfoil cannot be periodic".into()));
        }
        Ok(())
    }
}

/// Cartesian node lattice with per-node classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    /// Nodes inside the box along x and y.
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// Position of the first node inside the box.
    pub xbar: f64,
    pub ybar: f64,
    classes: Vec<NodeClass>,
}

impl Grid {
    /// Padded array extent along x.
    #[inline]
    pub fn width(&self) -> usize {
        self.nx + 2 * GHOST_DEPTH
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.ny + 2 * GHOST_DEPTH
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width() + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width(), idx / self.width())
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.xbar + (i as f64 - GHOST_DEPTH as f64) * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.ybar + (j as f64 - GHOST_DEPTH as f64) * self.hy
    }

    pub fn position(&self, i: usize, j: usize) -> Point {
        [self.x(i), self.y(j)]
    }

    #[inline]
    pub fn class(&self, i: usize, j: usize) -> NodeClass {
        self.classes[self.index(i, j)]
    }

    #[inline]
    pub fn class_at(&self, idx: usize) -> NodeClass {
        self.classes[idx]
    }

    pub fn classes(&self) -> &[NodeClass] {
        &self.classes
    }

    pub fn count(&self, class: NodeClass) -> usize {
        self.classes.iter().filter(|c| **c == class).count()
    }

    /// Flat indices of all fluid nodes, in lattice order.
    pub fn fluid_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|i| self.classes[*i] == NodeClass::Fluid)
            .collect()
    }
}

/// Lattice for `nx × ny` cell-centred nodes in the box of `domain`, with each
/// node classified as fluid, ghost or unused.
pub fn classify(nx: usize, ny: usize, domain: &DomainSpec) -> Result<Grid> {
    if nx == 0 || ny == 0 {
        return Err(Error::Config(format!(
            "grid dimensions must be positive, got {nx} × {ny}"
        )));
    }
    domain.validate()?;
    let hx = (domain.xmax - domain.xmin) / nx as f64;
    let hy = (domain.ymax - domain.ymin) / ny as f64;
    let mut grid = Grid {
        nx,
        ny,
        hx,
        hy,
        xbar: domain.xmin + 0.5 * hx,
        ybar: domain.ymin + 0.5 * hy,
        classes: Vec::new(),
    };
    let (w, h) = (grid.width(), grid.height());
    let fluid: Vec<bool> = (0..w * h)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % w, idx / w);
            domain.contains(grid.position(i, j)) == Region::Interior
        })
        .collect();
    let mut classes: Vec<NodeClass> = fluid
        .iter()
        .map(|f| {
            if *f {
                NodeClass::Fluid
            } else {
                NodeClass::UnusedExterior
            }
        })
        .collect();
    for j in 0..h {
        for i in 0..w {
            if !fluid[j * w + i] {
                continue;
            }
            for step in 1..=GHOST_DEPTH {
                let neighbours = [
                    (i.checked_sub(step), Some(j)),
                    (Some(i + step).filter(|v| *v < w), Some(j)),
                    (Some(i), j.checked_sub(step)),
                    (Some(i), Some(j + step).filter(|v| *v < h)),
                ];
                for (ni, nj) in neighbours {
                    let (Some(ni), Some(nj)) = (ni, nj) else {
                        return Err(Error::MeshResolution {
                            node: (i, j),
                            reason: "fluid node too close to the lattice edge".into(),
                        });
                    };
                    let k = nj * w + ni;
                    if !fluid[k] {
                        classes[k] = NodeClass::Ghost;
                    }
                }
            }
        }
    }
    grid.classes = classes;
    Ok(grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Each block line is a lattice column, interpolated in y.
    ByColumns,
    /// Each block line is a lattice row, interpolated in x.
    ByRows,
}

/// Interpolation of one block line to its crossing with the normal line.
#[derive(Clone, Debug, PartialEq)]
pub struct LineInterp {
    /// Flat indices of the fluid nodes used on this line.
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
}

/// 1D transfers along the normal line, with their plans.
#[derive(Clone, Debug)]
pub enum FillPlan {
    /// Fewer than three block lines: copy the nearest line value.
    Nearest,
    /// Extrapolate the line values `N_i` straight to the ghost.
    Outflow { ghost: ExtrapPlan },
    /// Line values to wall points `P_1..P_R`, then prescribed `P_0` plus wall
    /// points to the ghost.
    Dirichlet {
        to_wall: Vec<ExtrapPlan>,
        ghost: ExtrapPlan,
    },
    /// Density, pressure and tangential velocity are extrapolated from the
    /// line values like an outflow (`from_interior`); the normal velocity goes
    /// through the wall points with `v_n(P_0) = 0` (`with_wall`).
    Reflecting {
        to_wall: Vec<ExtrapPlan>,
        from_interior: ExtrapPlan,
        with_wall: ExtrapPlan,
    },
}

/// Geometry-only recipe for filling one ghost node.
#[derive(Clone, Debug)]
pub struct GhostStencil {
    /// Lattice index of the ghost `P`.
    pub node: (usize, usize),
    pub position: Point,
    pub foot: BoundaryFoot,
    pub bc: BcKind,
    pub axis: SweepAxis,
    /// One entry per block line, ordered by distance from `P0`.
    pub lines: Vec<LineInterp>,
    /// Crossings `N_i` of the normal line with the block lines.
    pub line_points: Vec<Point>,
    /// Distance of `N_1` from `P0` along the normal.
    pub line_offset: f64,
    /// Spacing between consecutive `N_i`.
    pub line_spacing: f64,
    /// `P_0..P_R`; empty when no boundary value is prescribed.
    pub wall_points: Vec<Point>,
    pub wall_spacing: f64,
    /// Distance from `P` to `P0`; the ghost sits at `-ghost_distance` along
    /// the normal coordinate.
    pub ghost_distance: f64,
    pub plan: FillPlan,
}

impl GhostStencil {
    /// All lattice nodes read by this stencil.
    pub fn block_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .lines
            .iter()
            .flat_map(|l| l.nodes.iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_reduced(&self, params: &ExtrapParams) -> bool {
        self.lines.len() < params.stencil_degree + 1
    }
}

/// Ghost filled by copying a fluid node from the opposite side of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodicImage {
    pub ghost: usize,
    pub source: usize,
}

/// Every ghost recipe of a classified grid.
#[derive(Clone, Debug)]
pub struct GhostSet {
    pub stencils: Vec<GhostStencil>,
    pub periodic: Vec<PeriodicImage>,
    /// Ghosts built with fewer than `R + 1` block lines.
    pub reduced: Vec<(usize, usize)>,
}

/// Lagrange weights at fractional position `t` for nodes `0..n`.
fn lagrange_weights(n: usize, t: f64) -> Vec<f64> {
    (0..n)
        .map(|a| {
            (0..n)
                .filter(|b| *b != a)
                .map(|b| (t - b as f64) / (a as f64 - b as f64))
                .product()
        })
        .collect()
}

/// Choose interpolation nodes along one lattice line.
///
/// `t` is the fractional lattice index of the crossing, `is_fluid(q)` tells
/// whether index `q` along the line is fluid and `len` is the line length.
fn line_window(
    t: f64,
    len: usize,
    count: usize,
    is_fluid: impl Fn(usize) -> bool,
) -> Option<(usize, Vec<f64>)> {
    if !(t > -0.5 && t < len as f64 - 0.5) {
        return None;
    }
    let near = t.round();
    if (t - near).abs() <= 1e-9 && is_fluid(near as usize) {
        return Some((near as usize, vec![1.0]));
    }
    let lo = t.floor();
    if lo < 0.0 || lo as usize + 1 >= len {
        return None;
    }
    let (a, b) = (lo as usize, lo as usize + 1);
    if !is_fluid(a) || !is_fluid(b) {
        return None;
    }
    let mut run_lo = a;
    while run_lo > 0 && is_fluid(run_lo - 1) {
        run_lo -= 1;
    }
    let mut run_hi = b;
    while run_hi + 1 < len && is_fluid(run_hi + 1) {
        run_hi += 1;
    }
    if run_hi - run_lo + 1 < count {
        return None;
    }
    let centred = (t - (count - 1) as f64 / 2.0).round();
    let start = (centred.max(run_lo as f64) as usize).min(run_hi + 1 - count);
    Some((start, lagrange_weights(count, t - start as f64)))
}

/// Block lines for one ghost: interpolation recipes, crossing points, first
/// crossing distance and spacing. Stops at the first incomplete line.
pub fn select_block(
    grid: &Grid,
    foot: &BoundaryFoot,
    params: &ExtrapParams,
) -> (SweepAxis, Vec<LineInterp>, Vec<Point>, f64, f64) {
    let [nx_, ny_] = foot.normal;
    let [px, py] = foot.point;
    let wanted = params.stencil_degree + 1;
    let axis = if nx_.abs() >= ny_.abs() {
        SweepAxis::ByColumns
    } else {
        SweepAxis::ByRows
    };
    // `along` runs over lines, `across` inside a line
    let (
        n_along,
        n_across,
        p_along,
        p_across,
        h_along,
        h_across,
        base_along,
        base_across,
        len_along,
        len_across,
    ) = match axis {
        SweepAxis::ByColumns => (
            nx_,
            ny_,
            px,
            py,
            grid.hx,
            grid.hy,
            grid.x(0),
            grid.y(0),
            grid.width(),
            grid.height(),
        ),
        SweepAxis::ByRows => (
            ny_,
            nx_,
            py,
            px,
            grid.hy,
            grid.hx,
            grid.y(0),
            grid.x(0),
            grid.height(),
            grid.width(),
        ),
    };
    let dir: isize = if n_along > 0.0 { 1 } else { -1 };
    // first lattice line strictly beyond P0 in the normal direction
    let t0 = (p_along - base_along) / h_along;
    let first = if dir > 0 {
        t0.floor() as isize + 1
    } else {
        t0.ceil() as isize - 1
    };
    let spacing = h_along / n_along.abs();
    let mut lines = Vec::new();
    let mut points = Vec::new();
    let mut offset = 0.0;
    // a line grazing the boundary may cross it between body nodes; such
    // leading lines are skipped, later failures end the block
    let mut skipped = 0isize;
    for m in 0..(wanted + MAX_SKIPPED_LINES) as isize {
        if lines.len() == wanted {
            break;
        }
        let line = first + dir * m;
        if line < 0 || line >= len_along as isize {
            break;
        }
        let line = line as usize;
        let coord = base_along + line as f64 * h_along;
        let s = (coord - p_along) / n_along;
        let cross = p_across + s * n_across;
        let t = (cross - base_across) / h_across;
        let idx = |q: usize| match axis {
            SweepAxis::ByColumns => grid.index(line, q),
            SweepAxis::ByRows => grid.index(q, line),
        };
        let Some((start, weights)) = line_window(t, len_across, wanted, |q| {
            grid.class_at(idx(q)) == NodeClass::Fluid
        }) else {
            if lines.is_empty() && skipped < MAX_SKIPPED_LINES as isize {
                skipped += 1;
                continue;
            }
            break;
        };
        if lines.is_empty() {
            offset = s;
        }
        let nodes = (start..start + weights.len()).map(idx).collect();
        lines.push(LineInterp { nodes, weights });
        points.push([px + s * nx_, py + s * ny_]);
    }
    (axis, lines, points, offset, spacing)
}

/// `P_i = P0 + i d n` for `i = 0..=R`.
pub fn build_wall_points(foot: &BoundaryFoot, spacing: f64, stencil_degree: usize) -> Vec<Point> {
    (0..=stencil_degree)
        .map(|i| {
            let s = i as f64 * spacing;
            [
                foot.point[0] + s * foot.normal[0],
                foot.point[1] + s * foot.normal[1],
            ]
        })
        .collect()
}

fn build_plan(
    bc: BcKind,
    lines: usize,
    offset: f64,
    spacing: f64,
    wall_spacing: f64,
    ghost_distance: f64,
    params: &ExtrapParams,
) -> Result<FillPlan> {
    let Some(line_params) = params.shrunk(lines) else {
        return Ok(FillPlan::Nearest);
    };
    let rel = |x: f64| (x - offset) / spacing;
    let plan = match bc {
        BcKind::Outflow => FillPlan::Outflow {
            ghost: ExtrapPlan::new(rel(-ghost_distance), line_params)?,
        },
        BcKind::Inflow | BcKind::FarField | BcKind::Reflecting => {
            let r = params.stencil_degree;
            let to_wall = (1..=r)
                .map(|i| ExtrapPlan::new(rel(i as f64 * wall_spacing), line_params))
                .collect::<Result<Vec<_>>>()?;
            // wall stencil starts at P_0 (t = 0) or, without it, at P_1
            let ghost_t = -ghost_distance / wall_spacing;
            if bc == BcKind::Reflecting {
                FillPlan::Reflecting {
                    to_wall,
                    from_interior: ExtrapPlan::new(rel(-ghost_distance), line_params)?,
                    with_wall: ExtrapPlan::new(ghost_t, *params)?,
                }
            } else {
                FillPlan::Dirichlet {
                    to_wall,
                    ghost: ExtrapPlan::new(ghost_t, *params)?,
                }
            }
        }
        BcKind::Periodic => unreachable!("periodic ghosts have no stencil"),
    };
    Ok(plan)
}

fn foot_for(grid: &Grid, domain: &DomainSpec, i: usize, j: usize) -> BoundaryFoot {
    let p = grid.position(i, j);
    match domain.contains(p) {
        Region::ExteriorAirfoil => domain
            .closest_on_airfoil(p)
            .unwrap_or_else(|| domain.closest_on_box(p)),
        Region::ExteriorBox => domain.closest_on_box(p),
        Region::Interior => domain.closest_boundary_point(p),
    }
}

fn build_stencil(
    grid: &Grid,
    domain: &DomainSpec,
    table: &BoundaryTable,
    params: &ExtrapParams,
    i: usize,
    j: usize,
) -> Result<GhostStencil, String> {
    let position = grid.position(i, j);
    let foot = foot_for(grid, domain, i, j);
    let bc = table.kind(foot.component);
    let (axis, lines, line_points, line_offset, line_spacing) = select_block(grid, &foot, params);
    if lines.is_empty() {
        return Err(format!(
            "no complete fluid line along the normal ({:.3}, {:.3}) from foot ({:.4}, {:.4})",
            foot.normal[0], foot.normal[1], foot.point[0], foot.point[1]
        ));
    }
    let wall_spacing = grid.hx.min(grid.hy);
    let wall_points = if bc == BcKind::Outflow {
        Vec::new()
    } else {
        build_wall_points(&foot, wall_spacing, params.stencil_degree)
    };
    let ghost_distance = (position[0] - foot.point[0]).hypot(position[1] - foot.point[1]);
    let plan = build_plan(
        bc,
        lines.len(),
        line_offset,
        line_spacing,
        wall_spacing,
        ghost_distance,
        params,
    )
    .map_err(|e| e.to_string())?;
    Ok(GhostStencil {
        node: (i, j),
        position,
        foot,
        bc,
        axis,
        lines,
        line_points,
        line_offset,
        line_spacing,
        wall_points,
        wall_spacing,
        ghost_distance,
        plan,
    })
}

/// Recipes for every ghost node of `grid`.
pub fn build_all_stencils(
    grid: &Grid,
    domain: &DomainSpec,
    table: &BoundaryTable,
    params: &ExtrapParams,
) -> Result<GhostSet> {
    table.validate()?;
    params.validate()?;
    let ghosts: Vec<usize> = (0..grid.len())
        .filter(|k| grid.class_at(*k) == NodeClass::Ghost)
        .collect();

    let mut periodic = Vec::new();
    let mut regular = Vec::new();
    for &k in &ghosts {
        let (i, j) = grid.coords(k);
        let p = grid.position(i, j);
        if domain.contains(p) == Region::ExteriorBox {
            let side = domain.closest_on_box(p).component;
            if table.kind(side) == BcKind::Periodic {
                let (si, sj) = periodic_source(grid, i, j);
                let source = grid.index(si, sj);
                if grid.class_at(source) != NodeClass::Fluid {
                    return Err(Error::MeshResolution {
                        node: (i, j),
                        reason: format!("periodic image ({si}, {sj}) is not a fluid node"),
                    });
                }
                periodic.push(PeriodicImage { ghost: k, source });
                continue;
            }
        }
        regular.push(k);
    }

    let built: Vec<Result<GhostStencil, (NodeIndex, String)>> = regular
        .par_iter()
        .map(|&k| {
            let (i, j) = grid.coords(k);
            build_stencil(grid, domain, table, params, i, j).map_err(|e| ((i, j), e))
        })
        .collect();
    let mut stencils = Vec::with_capacity(built.len());
    let mut failures = Vec::new();
    for b in built {
        match b {
            Ok(s) => stencils.push(s),
            Err(f) => failures.push(f),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Stencils(failures));
    }
    let reduced: Vec<(usize, usize)> = stencils
        .iter()
        .filter(|s| s.is_reduced(params))
        .map(|s| s.node)
        .collect();
    if !reduced.is_empty() {
        log::debug!(
            "{} ghost stencil(s) use fewer than {} block lines",
            reduced.len(),
            params.stencil_degree + 1
        );
    }
    Ok(GhostSet {
        stencils,
        periodic,
        reduced,
    })
}

fn periodic_source(grid: &Grid, i: usize, j: usize) -> (usize, usize) {
    let wrap = |q: usize, n: usize| {
        let lo = GHOST_DEPTH as isize;
        (lo + (q as isize - lo).rem_euclid(n as isize)) as usize
    };
    (wrap(i, grid.nx), wrap(j, grid.ny))
}

/// Plain-text dump: one line per ghost with index, class, foot and normal,
/// followed by one line per unused node count summary.
pub fn dump(grid: &Grid, ghosts: &GhostSet) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# nx={} ny={} hx={:.17e} hy={:.17e} fluid={} ghost={} unused={}",
        grid.nx,
        grid.ny,
        grid.hx,
        grid.hy,
        grid.count(NodeClass::Fluid),
        grid.count(NodeClass::Ghost),
        grid.count(NodeClass::UnusedExterior)
    );
    let _ = writeln!(out, "# i j class bc foot_x foot_y normal_x normal_y lines");
    let mut rows: Vec<(usize, String)> = Vec::new();
    for s in &ghosts.stencils {
        rows.push((
            grid.index(s.node.0, s.node.1),
            format!(
                "{} {} ghost {} {:.17e} {:.17e} {:.17e} {:.17e} {}",
                s.node.0,
                s.node.1,
                s.bc.name(),
                s.foot.point[0],
                s.foot.point[1],
                s.foot.normal[0],
                s.foot.normal[1],
                s.lines.len()
            ),
        ));
    }
    for p in &ghosts.periodic {
        let (i, j) = grid.coords(p.ghost);
        let (si, sj) = grid.coords(p.source);
        rows.push((p.ghost, format!("{i} {j} ghost periodic source {si} {sj}")));
    }
    rows.sort_by_key(|r| r.0);
    for (_, r) in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NacaProfile;

    #[test]
    fn rectangle_classification() {
        let d = DomainSpec::box_only(0.0, 1.0, 0.0, 1.0);
        let g = classify(20, 20, &d).unwrap();
        assert_eq!(g.count(NodeClass::Fluid), 400);
        assert_eq!(g.count(NodeClass::Ghost), 4 * 3 * 20);
        assert_eq!(g.count(NodeClass::UnusedExterior), 4 * 9);
        assert_eq!(g.class(0, 0), NodeClass::UnusedExterior);
        assert_eq!(g.class(2, 10), NodeClass::Ghost);
        assert!((g.x(GHOST_DEPTH) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn lagrange_weights_reproduce_polynomials() {
        let w = lagrange_weights(5, 1.3);
        let v: f64 = (0..5).map(|a| w[a] * (a as f64).powi(3)).sum();
        assert!((v - 1.3f64.powi(3)).abs() < 1e-13);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn window_prefers_centring_and_shifts_at_walls() {
        let all = |_q: usize| true;
        let (start, w) = line_window(10.3, 30, 4, all).unwrap();
        assert_eq!(start, 9);
        assert_eq!(w.len(), 4);
        let blocked = |q: usize| q >= 9;
        let (start, _) = line_window(9.3, 30, 4, blocked).unwrap();
        assert_eq!(start, 9);
        assert!(line_window(8.5, 30, 4, blocked).is_none());
        let (start, w) = line_window(12.0, 30, 4, all).unwrap();
        assert_eq!((start, w), (12, vec![1.0]));
    }

    #[test]
    fn axis_aligned_block() {
        let d = DomainSpec::box_only(0.0, 1.0, 0.0, 1.0);
        let g = classify(20, 20, &d).unwrap();
        let params = ExtrapParams::default();
        let foot = d.closest_boundary_point(g.position(2, 10));
        let (axis, lines, points, offset, spacing) = select_block(&g, &foot, &params);
        assert_eq!(axis, SweepAxis::ByColumns);
        assert_eq!(lines.len(), 9);
        assert!((offset - 0.025).abs() < 1e-14 && (spacing - 0.05).abs() < 1e-14);
        for (m, (l, p)) in lines.iter().zip(&points).enumerate() {
            assert_eq!(l.nodes, vec![g.index(GHOST_DEPTH + m, 10)]);
            assert!((p[1] - g.y(10)).abs() < 1e-15);
        }
        // the transpose for a bottom ghost
        let foot = d.closest_boundary_point(g.position(10, 1));
        let (axis, lines, _, _, _) = select_block(&g, &foot, &params);
        assert_eq!(axis, SweepAxis::ByRows);
        for (m, l) in lines.iter().enumerate() {
            assert_eq!(l.nodes, vec![g.index(10, GHOST_DEPTH + m)]);
        }
    }

    #[test]
    fn wall_points_progression() {
        let foot = BoundaryFoot {
            point: [0.0, 0.0],
            normal: [1.0, 0.0],
            tangent: [0.0, 1.0],
            component: BoundaryComponent::Left,
        };
        let p = build_wall_points(&foot, 0.01, 3);
        assert_eq!(p, vec![[0.0, 0.0], [0.01, 0.0], [0.02, 0.0], [0.03, 0.0]]);
    }

    #[test]
    fn naca_stencils_build() {
        let d = DomainSpec::default();
        let g = classify(120, 90, &d).unwrap();
        let set = build_all_stencils(&g, &d, &BoundaryTable::default(), &ExtrapParams::default())
            .unwrap();
        assert_eq!(set.stencils.len(), g.count(NodeClass::Ghost));
        assert!(set.periodic.is_empty());
        let foil = set
            .stencils
            .iter()
            .filter(|s| s.foot.component == BoundaryComponent::Airfoil)
            .count();
        assert!(foil > 50, "{foil}");
        let _ = NacaProfile::naca0012();
    }
}
