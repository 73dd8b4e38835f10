//! Physical domain: an axis-aligned box with an optional symmetric NACA
//! 4-digit profile removed from it.

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Last thickness coefficient giving a closed trailing edge.
const CLOSED_TE_COEFF: f64 = -0.1036;
const OPEN_TE_COEFF: f64 = -0.1015;

/// Number of samples per surface used to bracket the distance minimizer.
const SURFACE_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NacaProfile {
    /// Maximum thickness as a fraction of the chord (0.12 for NACA0012).
    pub thickness: f64,
    pub chord: f64,
    /// Leading-edge position.
    pub origin: Point,
    pub closed_te: bool,
}

impl NacaProfile {
    pub fn naca0012() -> Self {
        Self {
            thickness: 0.12,
            chord: 1.0,
            origin: [0.0, 0.0],
            closed_te: true,
        }
    }

    /// Profile from a four-digit designation; only symmetric `00xx` sections.
    pub fn from_designation(name: &str) -> Result<Self> {
        let digits = name
            .strip_prefix("naca")
            .or_else(|| name.strip_prefix("NACA"))
            .ok_or_else(|| Error::Config(format!("unknown profile `{name}`")))?;
        if digits.len() != 4 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Config(format!(
                "`{name}` is not a four-digit NACA designation"
            )));
        }
        if !digits.starts_with("00") {
            return Err(Error::Config(format!(
                "cambered profile `{name}` is not supported"
            )));
        }
        let thickness = digits[2..].parse::<f64>().unwrap() / 100.0;
        let p = Self {
            thickness,
            ..Self::naca0012()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0 && self.thickness < 1.0) {
            return Err(Error::Config(format!(
                "profile thickness must lie in (0, 1), got {}",
                self.thickness
            )));
        }
        if !(self.chord > 0.0) {
            return Err(Error::Config(format!(
                "chord must be positive, got {}",
                self.chord
            )));
        }
        Ok(())
    }

    fn last_coeff(&self) -> f64 {
        if self.closed_te {
            CLOSED_TE_COEFF
        } else {
            OPEN_TE_COEFF
        }
    }

    /// Surface point and its derivative at `s = sqrt(x/c)` on the upper
    /// (`sign = 1`) or lower (`sign = -1`) side. The square-root parameter
    /// makes the rounded nose a smooth curve.
    fn surface(&self, s: f64, sign: f64) -> (Point, Point) {
        let (c, t, a4) = (self.chord, self.thickness, self.last_coeff());
        let s2 = s * s;
        let s4 = s2 * s2;
        let y =
            5.0 * t * (0.2969 * s - 0.1260 * s2 - 0.3516 * s4 + 0.2843 * s4 * s2 + a4 * s4 * s4);
        let dy = 5.0
            * t
            * (0.2969 - 0.2520 * s - 1.4064 * s2 * s + 1.7058 * s4 * s + 8.0 * a4 * s4 * s2 * s);
        (
            [self.origin[0] + c * s2, self.origin[1] + sign * c * y],
            [2.0 * c * s, sign * c * dy],
        )
    }

    /// Unit normal pointing out of the profile at parameter `s`.
    fn outward_normal(&self, s: f64, sign: f64) -> Point {
        let (_, d) = self.surface(s, sign);
        let n = if sign > 0.0 {
            [-d[1], d[0]]
        } else {
            [d[1], -d[0]]
        };
        normalize(n)
    }

    /// Analytic outward unit normal at chord fraction `xc` from the slope of
    /// the thickness distribution.
    pub fn surface_normal(&self, xc: f64, upper: bool) -> Result<Point> {
        if !(0.0..=1.0).contains(&xc) {
            return Err(Error::Domain(format!("chord fraction {xc} outside [0, 1]")));
        }
        Ok(self.outward_normal(xc.sqrt(), if upper { 1.0 } else { -1.0 }))
    }
}

/// Half thickness `y_t(xc) / chord` of the 4-digit section.
pub fn naca_half_thickness(xc: f64, profile: &NacaProfile) -> Result<f64> {
    if !(0.0..=1.0).contains(&xc) {
        return Err(Error::Domain(format!("chord fraction {xc} outside [0, 1]")));
    }
    let t = profile.thickness;
    Ok(5.0
        * t
        * (0.2969 * xc.sqrt() - 0.1260 * xc - 0.3516 * xc * xc
            + 0.2843 * xc.powi(3)
            + profile.last_coeff() * xc.powi(4)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub profile: Option<NacaProfile>,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self {
            xmin: -1.0,
            xmax: 2.0,
            ymin: -1.5,
            ymax: 1.5,
            profile: Some(NacaProfile::naca0012()),
        }
    }
}

/// Where a point sits relative to the physical domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Interior,
    ExteriorAirfoil,
    ExteriorBox,
}

/// Boundary piece a foot point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryComponent {
    Airfoil,
    Left,
    Right,
    Bottom,
    Top,
}

impl BoundaryComponent {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryComponent::Airfoil => "airfoil",
            BoundaryComponent::Left => "left",
            BoundaryComponent::Right => "right",
            BoundaryComponent::Bottom => "bottom",
            BoundaryComponent::Top => "top",
        }
    }
}

/// Closest boundary point of a query location together with the local frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFoot {
    pub point: Point,
    /// Unit normal pointing into the domain.
    pub normal: Point,
    /// `normal` rotated by +90 degrees.
    pub tangent: Point,
    pub component: BoundaryComponent,
}

impl BoundaryFoot {
    fn new(point: Point, normal: Point, component: BoundaryComponent) -> Self {
        Self {
            point,
            normal,
            tangent: [-normal[1], normal[0]],
            component,
        }
    }
}

fn normalize(v: Point) -> Point {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

impl DomainSpec {
    pub fn box_only(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Self {
            xmin,
            xmax,
            ymin,
            ymax,
            profile: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xmax > self.xmin && self.ymax > self.ymin) {
            return Err(Error::Config(
                "box must satisfy xmin < xmax and ymin < ymax".into(),
            ));
        }
        if let Some(p) = &self.profile {
            p.validate()?;
            let (x0, y0) = (p.origin[0], p.origin[1]);
            // the thickest section of a 4-digit profile is at 30% chord
            let half = p.chord * naca_half_thickness(0.3, p)?;
            let inside = x0 > self.xmin
                && x0 + p.chord < self.xmax
                && y0 - half > self.ymin
                && y0 + half < self.ymax;
            if !inside {
                return Err(Error::Config(
                    "profile must lie strictly inside the box".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn contains(&self, point: Point) -> Region {
        let [x, y] = point;
        if !(x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax) {
            return Region::ExteriorBox;
        }
        if let Some(p) = &self.profile {
            let xc = (x - p.origin[0]) / p.chord;
            if (0.0..=1.0).contains(&xc) {
                let yt = p.chord * naca_half_thickness(xc, p).unwrap_or(0.0);
                if (y - p.origin[1]).abs() <= yt {
                    return Region::ExteriorAirfoil;
                }
            }
        }
        Region::Interior
    }

    /// Closest point on the nearer boundary component.
    pub fn closest_boundary_point(&self, point: Point) -> BoundaryFoot {
        let on_box = self.closest_on_box(point);
        match self.closest_on_airfoil(point) {
            Some(on_foil) if dist2(point, on_foil.point) <= dist2(point, on_box.point) => on_foil,
            _ => on_box,
        }
    }

    /// Closest point on the outer rectangle.
    pub fn closest_on_box(&self, point: Point) -> BoundaryFoot {
        let [x, y] = point;
        let outside = x < self.xmin || x > self.xmax || y < self.ymin || y > self.ymax;
        if outside {
            let foot = [x.clamp(self.xmin, self.xmax), y.clamp(self.ymin, self.ymax)];
            let dx = foot[0] - x;
            let dy = foot[1] - y;
            // the side facing the larger offset; ties go to the x sides
            let component = if dx.abs() >= dy.abs() {
                if dx > 0.0 {
                    BoundaryComponent::Left
                } else {
                    BoundaryComponent::Right
                }
            } else if dy > 0.0 {
                BoundaryComponent::Bottom
            } else {
                BoundaryComponent::Top
            };
            return BoundaryFoot::new(foot, normalize([dx, dy]), component);
        }
        let candidates = [
            (
                x - self.xmin,
                BoundaryComponent::Left,
                [self.xmin, y],
                [1.0, 0.0],
            ),
            (
                self.xmax - x,
                BoundaryComponent::Right,
                [self.xmax, y],
                [-1.0, 0.0],
            ),
            (
                y - self.ymin,
                BoundaryComponent::Bottom,
                [x, self.ymin],
                [0.0, 1.0],
            ),
            (
                self.ymax - y,
                BoundaryComponent::Top,
                [x, self.ymax],
                [0.0, -1.0],
            ),
        ];
        let best = candidates
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("four candidates");
        BoundaryFoot::new(best.2, best.3, best.1)
    }

    /// Closest point on the profile surface, if there is a profile.
    pub fn closest_on_airfoil(&self, point: Point) -> Option<BoundaryFoot> {
        let profile = self.profile.as_ref()?;
        let mut best: Option<(f64, f64, f64)> = None;
        for sign in [1.0, -1.0] {
            let s = minimize_surface_distance(profile, point, sign);
            let d = dist2(point, profile.surface(s, sign).0);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, s, sign));
            }
        }
        let (d, s, sign) = best?;
        let foot = profile.surface(s, sign).0;
        let scale = profile.chord;
        let normal = if d.sqrt() <= 1e-13 * scale {
            profile.outward_normal(s, sign)
        } else {
            let away = [point[0] - foot[0], point[1] - foot[1]];
            // inside the body the normal runs from the point to the foot,
            // outside from the foot to the point
            match self.contains(point) {
                Region::ExteriorAirfoil => normalize([-away[0], -away[1]]),
                _ => normalize(away),
            }
        };
        Some(BoundaryFoot::new(foot, normal, BoundaryComponent::Airfoil))
    }
}

/// Parameter of the closest surface point on one side of the profile.
fn minimize_surface_distance(profile: &NacaProfile, point: Point, sign: f64) -> f64 {
    let d2 = |s: f64| dist2(point, profile.surface(s, sign).0);
    // half the derivative of the squared distance
    let slope = |s: f64| {
        let (q, dq) = profile.surface(s, sign);
        (q[0] - point[0]) * dq[0] + (q[1] - point[1]) * dq[1]
    };
    let n = SURFACE_SAMPLES;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for i in 0..=n {
        let d = d2(i as f64 / n as f64);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    let lo = best.saturating_sub(1) as f64 / n as f64;
    let hi = (best + 1).min(n) as f64 / n as f64;
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (slope(a), slope(b));
    let refined = if ga < 0.0 && gb > 0.0 {
        while b - a > 1e-12 {
            let m = 0.5 * (a + b);
            if slope(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    } else if best == 0 || best == n {
        best as f64 / n as f64
    } else {
        // no sign change in the bracket: golden section on the distance itself
        golden_section(d2, lo, hi, 1e-12)
    };
    // compare against the bracketing samples and the endpoints
    [refined, best as f64 / n as f64, 0.0, 1.0]
        .into_iter()
        .min_by(|x, y| d2(*x).total_cmp(&d2(*y)))
        .unwrap()
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Point on the profile surface at chord fraction `xc`.
pub fn surface_point(profile: &NacaProfile, xc: f64, upper: bool) -> Point {
    profile
        .surface(xc.clamp(0.0, 1.0).sqrt(), if upper { 1.0 } else { -1.0 })
        .0
}
