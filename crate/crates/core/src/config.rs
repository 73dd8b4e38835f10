//! Run configuration: a line-oriented `key = value` format with `[section]`
//! headers.
//!
//! ```text
//! [geometry]
//! profile = naca0012
//! chord = 1.0
//! box = -1, 2, -1.5, 1.5
//! [grid]
//! nx = 200
//! ny = 150
//! [flow]
//! mach = 2
//! [time]
//! t_end = 5
//! ```
//!
//! Omitted keys take their documented defaults; unknown keys and duplicated
//! keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::boundary::FillOptions;
use crate::error::{Error, Result};
use crate::euler::{GasModel, PrimitiveState};
use crate::extrapolation::ExtrapParams;
use crate::geometry::{DomainSpec, NacaProfile};
use crate::mesh::{BcKind, BoundaryTable};
use crate::solver::TimeControls;
use crate::weno::SplitMode;

/// Field output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    VtkLegacy,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::VtkLegacy => "vtk_legacy",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::VtkLegacy => "vtk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "vtk_legacy" | "vtk" => Some(OutputFormat::VtkLegacy),
            _ => None,
        }
    }
}

/// When and where fields are written.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputPlan {
    /// Snapshot interval in simulation time; 0 writes the final field only.
    pub every: f64,
    pub dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputPlan {
    fn default() -> Self {
        Self {
            every: 0.0,
            dir: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv],
        }
    }
}

/// Initial data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    /// Free stream everywhere (impulsive start).
    FreeStream,
    /// Free stream with the density multiplied by `1 + amplitude sin(2π ξ)`,
    /// `ξ` the position along the box in x; advected exactly by the stream.
    DensityWave { amplitude: f64 },
    /// Two constant states separated at `x = interface`.
    Sod {
        interface: f64,
        left: PrimitiveState,
        right: PrimitiveState,
    },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::FreeStream => "free_stream",
            InitialCondition::DensityWave { .. } => "density_wave",
            InitialCondition::Sod { .. } => "sod",
        }
    }
}

pub const SOD_LEFT: PrimitiveState = PrimitiveState::new(1.0, 0.0, 0.0, 1.0);
pub const SOD_RIGHT: PrimitiveState = PrimitiveState::new(0.125, 0.0, 0.0, 0.1);

/// Complete description of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub domain: DomainSpec,
    pub nx: usize,
    pub ny: usize,
    pub gas: GasModel,
    pub mach: f64,
    /// Flow angle in degrees from the x axis.
    pub angle_deg: f64,
    pub boundaries: BoundaryTable,
    pub extrapolation: ExtrapParams,
    pub split: SplitMode,
    pub fill: FillOptions,
    pub time: TimeControls,
    pub output: OutputPlan,
    pub initial: InitialCondition,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            domain: DomainSpec::default(),
            nx: 200,
            ny: 150,
            gas: GasModel::default(),
            mach: 2.0,
            angle_deg: 0.0,
            boundaries: BoundaryTable::default(),
            extrapolation: ExtrapParams::default(),
            split: SplitMode::default(),
            fill: FillOptions::default(),
            time: TimeControls {
                max_steps: Some(1_000_000),
                ..TimeControls::default()
            },
            output: OutputPlan::default(),
            initial: InitialCondition::FreeStream,
        }
    }
}

impl SimConfig {
    /// Free stream scaled so that `rho = gamma`, `p = 1` and hence `c = 1`.
    pub fn free_stream(&self) -> PrimitiveState {
        let a = self.angle_deg.to_radians();
        PrimitiveState::new(
            self.gas.gamma,
            self.mach * a.cos(),
            self.mach * a.sin(),
            1.0,
        )
    }

    /// Initial primitive state at `(x, y)`.
    pub fn initial_state(&self, x: f64, _y: f64) -> PrimitiveState {
        let fs = self.free_stream();
        match self.initial {
            InitialCondition::FreeStream => fs,
            InitialCondition::DensityWave { amplitude } => {
                let xi = (x - self.domain.xmin) / (self.domain.xmax - self.domain.xmin);
                PrimitiveState {
                    rho: fs.rho * (1.0 + amplitude * (2.0 * std::f64::consts::PI * xi).sin()),
                    ..fs
                }
            }
            InitialCondition::Sod {
                interface,
                left,
                right,
            } => {
                if x < interface {
                    left
                } else {
                    right
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("grid.nx and grid.ny must be positive".into()));
        }
        if !(self.mach > 0.0) || !self.mach.is_finite() {
            return Err(Error::Config(format!(
                "flow.mach must be positive, got {}",
                self.mach
            )));
        }
        if !self.angle_deg.is_finite() {
            return Err(Error::Config("flow.angle must be finite".into()));
        }
        GasModel::new(self.gas.gamma)?;
        self.boundaries.validate()?;
        self.extrapolation.validate()?;
        self.time.validate()?;
        if !(self.output.every >= 0.0) {
            return Err(Error::Config(format!(
                "output.every must be non-negative, got {}",
                self.output.every
            )));
        }
        match self.initial {
            InitialCondition::FreeStream => {}
            InitialCondition::DensityWave { amplitude } => {
                if !(amplitude.abs() < 1.0) {
                    return Err(Error::Config(format!(
                        "case.amplitude must lie in (-1, 1), got {amplitude}"
                    )));
                }
            }
            InitialCondition::Sod { left, right, .. } => {
                left.validate()?;
                right.validate()?;
            }
        }
        Ok(())
    }

    /// Text form accepted by [`parse_config`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = &self.domain;
        let _ = writeln!(s, "[geometry]");
        match &d.profile {
            Some(p) => {
                let _ = writeln!(
                    s,
                    "profile = naca00{:02}",
                    (p.thickness * 100.0).round() as u32
                );
                let _ = writeln!(s, "thickness = {}", p.thickness);
                let _ = writeln!(s, "chord = {}", p.chord);
                let _ = writeln!(s, "origin = {}, {}", p.origin[0], p.origin[1]);
                let _ = writeln!(s, "closed_te = {}", p.closed_te);
            }
            None => {
                let _ = writeln!(s, "profile = none");
            }
        }
        let _ = writeln!(s, "box = {}, {}, {}, {}", d.xmin, d.xmax, d.ymin, d.ymax);
        let _ = writeln!(s, "\n[grid]\nnx = {}\nny = {}", self.nx, self.ny);
        let _ = writeln!(
            s,
            "\n[flow]\nmach = {}\ngamma = {}\nangle = {}",
            self.mach, self.gas.gamma, self.angle_deg
        );
        let b = &self.boundaries;
        let _ = writeln!(
            s,
            "\n[boundary]\nleft = {}\nright = {}\nbottom = {}\ntop = {}\nairfoil = {}",
            b.left.name(),
            b.right.name(),
            b.bottom.name(),
            b.top.name(),
            b.airfoil.name()
        );
        let e = &self.extrapolation;
        let _ = writeln!(
            s,
            "\n[scheme]\nR = {}\nr = {}\nr0 = {}\nepsilon = {:e}\nsplit = {}\ncfl = {}\nclamp = {}",
            e.stencil_degree,
            e.fit_degree,
            e.substencil_degree,
            e.epsilon,
            self.split.name(),
            self.time.cfl,
            self.fill.clamp
        );
        let t = &self.time;
        let _ = writeln!(s, "\n[time]\nt_end = {}", t.t_end);
        if let Some(m) = t.max_steps {
            let _ = writeln!(s, "max_steps = {m}");
        }
        if let Some(dt) = t.fixed_dt {
            let _ = writeln!(s, "dt = {dt}");
        }
        let _ = writeln!(s, "log_every = {}", t.log_every);
        let o = &self.output;
        let formats: Vec<&str> = o.formats.iter().map(|f| f.name()).collect();
        let _ = writeln!(
            s,
            "\n[output]\nevery = {}\nformats = {}\ndir = {}",
            o.every,
            formats.join(","),
            o.dir.display()
        );
        let _ = writeln!(s, "\n[case]\nkind = {}", self.initial.name());
        match self.initial {
            InitialCondition::FreeStream => {}
            InitialCondition::DensityWave { amplitude } => {
                let _ = writeln!(s, "amplitude = {amplitude}");
            }
            InitialCondition::Sod {
                interface,
                left,
                right,
            } => {
                let _ = writeln!(s, "interface = {interface}");
                let _ = writeln!(s, "left = {}, {}, {}, {}", left.rho, left.u, left.v, left.p);
                let _ = writeln!(
                    s,
                    "right = {}, {}, {}, {}",
                    right.rho, right.u, right.v, right.p
                );
            }
        }
        s
    }
}

struct Entry {
    value: String,
    line: usize,
}

/// Raw `section.key -> value` table with line numbers.
struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                    line,
                    message: format!("malformed section header `{content}`"),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty key".into(),
                });
            }
            if section.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("key `{key}` appears before any [section]"),
                });
            }
            let full = format!("{section}.{key}");
            if let Some(prev) = entries.get(&full) {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "duplicate key `{full}` (first on line {}, again on line {line})",
                        prev.line
                    ),
                });
            }
            entries.insert(
                full,
                Entry {
                    value: value.trim().to_string(),
                    line,
                },
            );
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| Error::Parse {
                line: e.line,
                message: format!("invalid value `{}` for `{key}`", e.value),
            }),
        }
    }

    fn take_list(&mut self, key: &str, len: usize) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => {
                let bad = || Error::Parse {
                    line: e.line,
                    message: format!(
                        "`{key}` expects {len} comma-separated numbers, got `{}`",
                        e.value
                    ),
                };
                let v = e
                    .value
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                if v.len() != len {
                    return Err(bad());
                }
                Ok(Some(v))
            }
        }
    }

    fn take_bc(&mut self, key: &str, default: BcKind) -> Result<BcKind> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => BcKind::parse(&e.value).ok_or_else(|| Error::Parse {
                line: e.line,
                message: format!("unknown boundary kind `{}` for `{key}`", e.value),
            }),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.iter().min_by_key(|(_, e)| e.line) {
            None => Ok(()),
            Some((k, e)) => Err(Error::Parse {
                line: e.line,
                message: format!("unknown key `{k}`"),
            }),
        }
    }
}

fn state_from(v: Vec<f64>) -> PrimitiveState {
    PrimitiveState::new(v[0], v[1], v[2], v[3])
}

/// Parse and validate a configuration text.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut t = Table::parse(text)?;
    let mut c = SimConfig::default();

    // geometry
    let profile = match t.take("geometry.profile") {
        None => Some(NacaProfile::naca0012()),
        Some(e) if e.value == "none" => None,
        Some(e) => Some(
            NacaProfile::from_designation(&e.value).map_err(|err| Error::Parse {
                line: e.line,
                message: err.to_string(),
            })?,
        ),
    };
    c.domain.profile = profile;
    if let Some(p) = c.domain.profile.as_mut() {
        if let Some(v) = t.take_parsed("geometry.thickness")? {
            p.thickness = v;
        }
        if let Some(v) = t.take_parsed("geometry.chord")? {
            p.chord = v;
        }
        if let Some(v) = t.take_list("geometry.origin", 2)? {
            p.origin = [v[0], v[1]];
        }
        if let Some(v) = t.take_parsed("geometry.closed_te")? {
            p.closed_te = v;
        }
    }
    if let Some(v) = t.take_list("geometry.box", 4)? {
        (c.domain.xmin, c.domain.xmax, c.domain.ymin, c.domain.ymax) = (v[0], v[1], v[2], v[3]);
    }

    // grid
    if let Some(v) = t.take_parsed("grid.nx")? {
        c.nx = v;
    }
    if let Some(v) = t.take_parsed("grid.ny")? {
        c.ny = v;
    }

    // flow
    if let Some(v) = t.take_parsed("flow.mach")? {
        c.mach = v;
    }
    if let Some(v) = t.take_parsed::<f64>("flow.gamma")? {
        c.gas = GasModel::new(v)?;
    }
    if let Some(v) = t.take_parsed("flow.angle")? {
        c.angle_deg = v;
    }

    // boundary
    let d = c.boundaries;
    c.boundaries = BoundaryTable {
        left: t.take_bc("boundary.left", d.left)?,
        right: t.take_bc("boundary.right", d.right)?,
        bottom: t.take_bc("boundary.bottom", d.bottom)?,
        top: t.take_bc("boundary.top", d.top)?,
        airfoil: t.take_bc("boundary.airfoil", d.airfoil)?,
    };

    // scheme
    if let Some(v) = t.take_parsed("scheme.R")? {
        c.extrapolation.stencil_degree = v;
    }
    if let Some(v) = t.take_parsed("scheme.r")? {
        c.extrapolation.fit_degree = v;
    }
    if let Some(v) = t.take_parsed("scheme.r0")? {
        c.extrapolation.substencil_degree = v;
    }
    if let Some(v) = t.take_parsed("scheme.epsilon")? {
        c.extrapolation.epsilon = v;
    }
    if let Some(e) = t.take("scheme.split") {
        c.split = SplitMode::parse(&e.value).ok_or_else(|| Error::Parse {
            line: e.line,
            message: format!("unknown split `{}`", e.value),
        })?;
    }
    if let Some(v) = t.take_parsed("scheme.cfl")? {
        c.time.cfl = v;
    }
    if let Some(v) = t.take_parsed("scheme.clamp")? {
        c.fill.clamp = v;
    }

    // time
    if let Some(v) = t.take_parsed("time.t_end")? {
        c.time.t_end = v;
    }
    if let Some(v) = t.take_parsed("time.max_steps")? {
        c.time.max_steps = Some(v);
    }
    if let Some(v) = t.take_parsed("time.dt")? {
        c.time.fixed_dt = Some(v);
    }
    if let Some(v) = t.take_parsed("time.log_every")? {
        c.time.log_every = v;
    }

    // output
    if let Some(v) = t.take_parsed("output.every")? {
        c.output.every = v;
    }
    if let Some(e) = t.take("output.dir") {
        c.output.dir = PathBuf::from(e.value);
    }
    if let Some(e) = t.take("output.formats") {
        let mut formats = Vec::new();
        for f in e.value.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            let f = OutputFormat::parse(f).ok_or_else(|| Error::Parse {
                line: e.line,
                message: format!("unknown output format `{f}`"),
            })?;
            if !formats.contains(&f) {
                formats.push(f);
            }
        }
        c.output.formats = formats;
    }

    // case
    let kind = t.take("case.kind");
    c.initial = match kind.as_ref().map(|e| e.value.as_str()) {
        None | Some("free_stream") => InitialCondition::FreeStream,
        Some("density_wave") => InitialCondition::DensityWave {
            amplitude: t.take_parsed("case.amplitude")?.unwrap_or(0.2),
        },
        Some("sod") => InitialCondition::Sod {
            interface: t.take_parsed("case.interface")?.unwrap_or(0.5),
            left: t
                .take_list("case.left", 4)?
                .map(state_from)
                .unwrap_or(SOD_LEFT),
            right: t
                .take_list("case.right", 4)?
                .map(state_from)
                .unwrap_or(SOD_RIGHT),
        },
        Some(other) => {
            return Err(Error::Parse {
                line: kind.as_ref().map_or(0, |e| e.line),
                message: format!("unknown case kind `{other}`"),
            })
        }
    };

    t.finish()?;
    c.validate()?;
    Ok(c)
}

/// Read and parse a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
