//! Regularly sampled immersions into S³×S³ and maps into ℝ³.

use serde::Serialize;

use crate::diff::Field;
use crate::error::GridError;
use crate::nkspace::Point;
use crate::quat::Vec3;

pub const MIN_SAMPLES: usize = 5;

/// Origin, steps and counts of a regular `(u, v)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(u0: f64, v0: f64, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self, GridError> {
        if nu < MIN_SAMPLES || nv < MIN_SAMPLES {
            return Err(GridError::TooSmall { nu, nv });
        }
        if !(du > 0.0 && dv > 0.0 && du.is_finite() && dv.is_finite()) {
            return Err(GridError::BadStep { du, dv });
        }
        if !(u0.is_finite() && v0.is_finite()) {
            return Err(GridError::Window(format!("non-finite origin ({u0}, {v0})")));
        }
        Ok(GridSpec { u0, v0, du, dv, nu, nv })
    }

    /// Grid of the given size and steps centred on `(uc, vc)`.
    pub fn centred(uc: f64, vc: f64, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self, GridError> {
        let u0 = uc - du * (nu.saturating_sub(1)) as f64 / 2.0;
        let v0 = vc - dv * (nv.saturating_sub(1)) as f64 / 2.0;
        GridSpec::new(u0, v0, du, dv, nu, nv)
    }

    pub fn u(&self, iu: usize) -> f64 {
        self.u0 + self.du * iu as f64
    }

    pub fn v(&self, iv: usize) -> f64 {
        self.v0 + self.dv * iv as f64
    }

    pub fn u_max(&self) -> f64 {
        self.u(self.nu - 1)
    }

    pub fn v_max(&self) -> f64 {
        self.v(self.nv - 1)
    }

    pub fn h(&self) -> f64 {
        self.du.max(self.dv)
    }

    /// Same window with both steps halved (twice as many intervals).
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            du: self.du / 2.0,
            dv: self.dv / 2.0,
            nu: 2 * self.nu - 1,
            nv: 2 * self.nv - 1,
            ..*self
        }
    }
}

/// Sampled immersion `φ(u, v) = (p(u, v), q(u, v))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionGrid {
    pub spec: GridSpec,
    pub values: Field<Point>,
    /// The grid is meant to satisfy `φ_v = Jφ_u`.
    pub adapted: bool,
}

impl ImmersionGrid {
    pub fn new(spec: GridSpec, values: Vec<Point>, adapted: bool) -> Result<Self, GridError> {
        let expected = spec.nu * spec.nv;
        if values.len() != expected {
            return Err(GridError::SampleCount { expected, got: values.len() });
        }
        Ok(ImmersionGrid { spec, values: Field { nu: spec.nu, nv: spec.nv, data: values }, adapted })
    }

    pub fn from_fn(
        spec: GridSpec,
        adapted: bool,
        mut f: impl FnMut(f64, f64) -> Result<Point, GridError>,
    ) -> Result<Self, GridError> {
        let values = Field::try_from_fn(spec.nu, spec.nv, |iu, iv| f(spec.u(iu), spec.v(iv)))?;
        Ok(ImmersionGrid { spec, values, adapted })
    }

    pub fn get(&self, iu: usize, iv: usize) -> Point {
        self.values.get(iu, iv)
    }

    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> ImmersionGrid {
        ImmersionGrid { spec: self.spec, values: self.values.map(|x| f(&x)), adapted: self.adapted }
    }
}

/// Sampled map `ε: (u, v) ↦ ℝ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct HSurfaceGrid {
    pub spec: GridSpec,
    pub eps: Field<Vec3>,
}

impl HSurfaceGrid {
    pub fn new(spec: GridSpec, values: Vec<Vec3>) -> Result<Self, GridError> {
        let expected = spec.nu * spec.nv;
        if values.len() != expected {
            return Err(GridError::SampleCount { expected, got: values.len() });
        }
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFinite { iu: k % spec.nu, iv: k / spec.nu });
            }
        }
        Ok(HSurfaceGrid { spec, eps: Field { nu: spec.nu, nv: spec.nv, data: values } })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> Vec3) -> Self {
        HSurfaceGrid { spec, eps: Field::from_fn(spec.nu, spec.nv, |iu, iv| f(spec.u(iu), spec.v(iv))) }
    }

    pub fn get(&self, iu: usize, iv: usize) -> Vec3 {
        self.eps.get(iu, iv)
    }
}
