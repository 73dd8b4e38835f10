//! State algebra for the two-dimensional compressible Euler equations with an
//! ideal-gas closure.

use crate::error::{Error, Result};

/// Coordinate direction of a flux or sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Ideal gas with constant adiabatic exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

/// Conserved variables `(rho, rho*u, rho*v, E)` at one node.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub mx: f64,
    pub my: f64,
    pub energy: f64,
}

/// Primitive variables `(rho, u, v, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl ConservedState {
    pub const fn new(rho: f64, mx: f64, my: f64, energy: f64) -> Self {
        Self {
            rho,
            mx,
            my,
            energy,
        }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.mx, self.my, self.energy]
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Pressure without any validity check.
    #[inline]
    pub fn pressure_unchecked(&self, gas: GasModel) -> f64 {
        (gas.gamma - 1.0) * (self.energy - 0.5 * (self.mx * self.mx + self.my * self.my) / self.rho)
    }

    /// Exchange the two momentum components.
    #[inline]
    pub fn swapped(self) -> Self {
        Self::new(self.rho, self.my, self.mx, self.energy)
    }
}

impl PrimitiveState {
    pub const fn new(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Self { rho, u, v, p }
    }

    pub fn sound_speed(&self, gas: GasModel) -> f64 {
        (gas.gamma * self.p / self.rho).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !(self.p > 0.0) || !self.u.is_finite() || !self.v.is_finite() {
            return Err(Error::Domain(format!(
                "primitive state requires rho > 0 and p > 0 (rho = {}, p = {})",
                self.rho, self.p
            )));
        }
        Ok(())
    }
}

pub fn primitive_to_conserved(prim: PrimitiveState, gas: GasModel) -> Result<ConservedState> {
    prim.validate()?;
    Ok(ConservedState {
        rho: prim.rho,
        mx: prim.rho * prim.u,
        my: prim.rho * prim.v,
        energy: prim.p / (gas.gamma - 1.0) + 0.5 * prim.rho * (prim.u * prim.u + prim.v * prim.v),
    })
}

pub fn conserved_to_primitive(cons: ConservedState, gas: GasModel) -> Result<PrimitiveState> {
    let rho = cons.rho;
    let p = cons.pressure_unchecked(gas);
    if !(rho > 0.0) || !(p > 0.0) || !p.is_finite() || !cons.mx.is_finite() || !cons.my.is_finite()
    {
        return Err(Error::Unphysical { node: None, rho, p });
    }
    Ok(PrimitiveState {
        rho,
        u: cons.mx / rho,
        v: cons.my / rho,
        p,
    })
}

/// Physical flux `f(u)` (axis x) or `g(u)` (axis y).
pub fn physical_flux(cons: ConservedState, gas: GasModel, axis: Axis) -> Result<[f64; 4]> {
    let prim = conserved_to_primitive(cons, gas)?;
    Ok(flux_from_primitive(&cons, &prim, axis))
}

#[inline]
pub(crate) fn flux_from_primitive(
    cons: &ConservedState,
    prim: &PrimitiveState,
    axis: Axis,
) -> [f64; 4] {
    match axis {
        Axis::X => {
            let u = prim.u;
            [
                cons.mx,
                cons.mx * u + prim.p,
                cons.my * u,
                u * (cons.energy + prim.p),
            ]
        }
        Axis::Y => {
            let v = prim.v;
            [
                cons.my,
                cons.mx * v,
                cons.my * v + prim.p,
                v * (cons.energy + prim.p),
            ]
        }
    }
}

/// Characteristic decomposition of a flux Jacobian.
///
/// `right[row][col]` stores the right eigenvectors as columns, `left[row]` the
/// left eigenvectors as rows, normalized so that `left * right = I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: [f64; 4],
    pub right: [[f64; 4]; 4],
    pub left: [[f64; 4]; 4],
}

impl EigenSystem {
    /// Characteristic projection `l_p . w` for every field.
    #[inline]
    pub fn project(&self, w: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, l) in out.iter_mut().zip(self.left.iter()) {
            *o = l[0] * w[0] + l[1] * w[1] + l[2] * w[2] + l[3] * w[3];
        }
        out
    }

    /// Right eigenvector of field `p` as a column.
    #[inline]
    pub fn right_column(&self, p: usize) -> [f64; 4] {
        [
            self.right[0][p],
            self.right[1][p],
            self.right[2][p],
            self.right[3][p],
        ]
    }
}

pub fn eigensystem(cons: ConservedState, gas: GasModel, axis: Axis) -> Result<EigenSystem> {
    let prim = conserved_to_primitive(cons, gas)?;
    Ok(eigensystem_from_primitive(&prim, gas, axis))
}

pub(crate) fn eigensystem_from_primitive(
    prim: &PrimitiveState,
    gas: GasModel,
    axis: Axis,
) -> EigenSystem {
    // The y-system is the x-system of the state with swapped velocities,
    // conjugated by the momentum permutation.
    let (un, ut) = match axis {
        Axis::X => (prim.u, prim.v),
        Axis::Y => (prim.v, prim.u),
    };
    let g = gas.gamma;
    let c = (g * prim.p / prim.rho).sqrt();
    let q2 = un * un + ut * ut;
    let h = c * c / (g - 1.0) + 0.5 * q2;
    let b1 = (g - 1.0) / (c * c);
    let b2 = 0.5 * b1 * q2;

    let right = [
        [1.0, 1.0, 0.0, 1.0],
        [un - c, un, 0.0, un + c],
        [ut, ut, 1.0, ut],
        [h - un * c, 0.5 * q2, ut, h + un * c],
    ];
    let left = [
        [
            0.5 * (b2 + un / c),
            -0.5 * (b1 * un + 1.0 / c),
            -0.5 * b1 * ut,
            0.5 * b1,
        ],
        [1.0 - b2, b1 * un, b1 * ut, -b1],
        [-ut, 0.0, 1.0, 0.0],
        [
            0.5 * (b2 - un / c),
            -0.5 * (b1 * un - 1.0 / c),
            -0.5 * b1 * ut,
            0.5 * b1,
        ],
    ];
    let eigenvalues = [un - c, un, un, un + c];

    match axis {
        Axis::X => EigenSystem {
            eigenvalues,
            right,
            left,
        },
        Axis::Y => {
            let mut r = right;
            r.swap(1, 2);
            let mut l = left;
            for row in l.iter_mut() {
                row.swap(1, 2);
            }
            EigenSystem {
                eigenvalues,
                right: r,
                left: l,
            }
        }
    }
}

/// Largest `|u| + c` and `|v| + c` over a collection of states.
pub fn max_wave_speed<'a, I>(field: I, gas: GasModel) -> Result<(f64, f64)>
where
    I: IntoIterator<Item = &'a ConservedState>,
{
    let mut any = false;
    let mut sx: f64 = 0.0;
    let mut sy: f64 = 0.0;
    for cons in field {
        let prim = conserved_to_primitive(*cons, gas)?;
        let c = prim.sound_speed(gas);
        sx = sx.max(prim.u.abs() + c);
        sy = sy.max(prim.v.abs() + c);
        any = true;
    }
    if !any {
        return Err(Error::Domain("wave speed of an empty field".into()));
    }
    Ok((sx, sy))
}
