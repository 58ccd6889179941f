//! Closed-form fixtures: two totally geodesic almost complex surfaces and two
//! CMC solutions of the H-surface equation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diff::Numerics;
use crate::error::GridError;
use crate::grid::{GridSpec, HSurfaceGrid, ImmersionGrid};
use crate::hsystem::h_equation_residual;
use crate::nkspace::{Point, SQRT3};
use crate::quat::{Quaternion, UnitQuaternion, Vec3};

/// Smallest `|sin u|` (equivalently `sech a`) allowed on pole-bearing fixtures.
pub const DEFAULT_POLE_MARGIN: f64 = 0.2;
pub const SPHERE_RADIUS: f64 = SQRT3 / 2.0;
pub const CYLINDER_RADIUS: f64 = SQRT3 / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureName {
    Example1,
    Example2,
    CmcSphere,
    CmcCylinder,
    /// Example 1 in the raw `(s, t)` parameters; not adapted.
    Example1St,
    /// Example 2 in polar coordinates on S²; not adapted.
    Example2Polar,
}

impl FixtureName {
    pub const ALL: [FixtureName; 6] = [
        FixtureName::Example1,
        FixtureName::Example2,
        FixtureName::CmcSphere,
        FixtureName::CmcCylinder,
        FixtureName::Example1St,
        FixtureName::Example2Polar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureName::Example1 => "example1",
            FixtureName::Example2 => "example2",
            FixtureName::CmcSphere => "cmc_sphere",
            FixtureName::CmcCylinder => "cmc_cylinder",
            FixtureName::Example1St => "example1_st",
            FixtureName::Example2Polar => "example2_polar",
        }
    }

    /// Whether the fixture is an ε grid rather than an immersion.
    pub fn is_epsilon(self) -> bool {
        matches!(self, FixtureName::CmcSphere | FixtureName::CmcCylinder)
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FixtureName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown fixture `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixtureSpec {
    pub name: FixtureName,
    pub grid: GridSpec,
    pub pole_margin: f64,
}

impl FixtureSpec {
    /// Window of the given size centred on the fixture's natural centre.
    pub fn centred(name: FixtureName, nu: usize, nv: usize, du: f64, dv: f64) -> Result<Self, GridError> {
        let uc = if name == FixtureName::Example2Polar { std::f64::consts::FRAC_PI_2 } else { 0.0 };
        Ok(FixtureSpec { name, grid: GridSpec::centred(uc, 0.0, du, dv, nu, nv)?, pole_margin: DEFAULT_POLE_MARGIN })
    }
}

#[derive(Debug, Clone)]
pub enum Fixture {
    Immersion(ImmersionGrid),
    Epsilon(OrientedEpsilon),
}

pub fn generate(spec: &FixtureSpec, num: &Numerics) -> Result<Fixture, GridError> {
    let g = &spec.grid;
    Ok(match spec.name {
        FixtureName::Example1 => Fixture::Immersion(example1_grid(g)),
        FixtureName::Example2 => Fixture::Immersion(example2_grid(g, spec.pole_margin)?),
        FixtureName::CmcSphere => Fixture::Epsilon(cmc_sphere_epsilon(g, spec.pole_margin, num)?),
        FixtureName::CmcCylinder => Fixture::Epsilon(cmc_cylinder_epsilon(g, num)),
        FixtureName::Example1St => Fixture::Immersion(example1_st_grid(g)),
        FixtureName::Example2Polar => Fixture::Immersion(example2_polar_grid(g, spec.pole_margin)?),
    })
}

fn circle(angle: f64) -> UnitQuaternion {
    Quaternion::exp_pure(Vec3::new(angle, 0.0, 0.0))
}

/// `(s, t) ↦ (e^{is}, e^{it})`.
pub fn example1_point(s: f64, t: f64) -> Point {
    Point::new(circle(s), circle(t))
}

/// Example 1 in adapted coordinates `(s, t) = (u - v/√3, -2v/√3)`.
pub fn example1_grid(spec: &GridSpec) -> ImmersionGrid {
    ImmersionGrid::from_fn(*spec, true, |u, v| Ok(example1_point(u - v / SQRT3, -2.0 * v / SQRT3)))
        .expect("closed form")
}

/// Example 1 in its original parameters.
pub fn example1_st_grid(spec: &GridSpec) -> ImmersionGrid {
    ImmersionGrid::from_fn(*spec, false, |s, t| Ok(example1_point(s, t))).expect("closed form")
}

/// `x ↦ ½(1 - √3x, 1 + √3x)` for a unit imaginary `x`.
pub fn example2_point(x: Vec3) -> Result<Point, GridError> {
    let x = Quaternion::pure(x);
    let p = (Quaternion::ONE - x * SQRT3) * 0.5;
    let q = (Quaternion::ONE + x * SQRT3) * 0.5;
    Ok(Point::new(UnitQuaternion::new(p)?, UnitQuaternion::new(q)?))
}

fn check_margin(spec: &GridSpec, margin: f64, sin_at: impl Fn(f64) -> f64) -> Result<(), GridError> {
    if !(margin > 0.0) {
        return Err(GridError::Window(format!("pole margin must be positive, got {margin}")));
    }
    for i in 0..spec.nu {
        let s = sin_at(spec.u(i)).abs();
        if !(s >= margin) {
            return Err(GridError::Window(format!(
                "window reaches a pole: |sin u| = {s:.3e} < {margin} at u = {}",
                spec.u(i)
            )));
        }
    }
    Ok(())
}

/// Unit sphere in Mercator coordinates `(a, v)`, `sin u = sech a`, `cos u = -tanh a`.
pub fn mercator(a: f64, v: f64) -> Vec3 {
    let s = 1.0 / a.cosh();
    Vec3::new(s * v.cos(), s * v.sin(), -a.tanh())
}

/// Example 2 in adapted (Mercator) coordinates.
pub fn example2_grid(spec: &GridSpec, margin: f64) -> Result<ImmersionGrid, GridError> {
    check_margin(spec, margin, |a| 1.0 / a.cosh())?;
    ImmersionGrid::from_fn(*spec, true, |a, v| example2_point(mercator(a, v)))
}

/// Example 2 with `x = (sin u cos v, sin u sin v, cos u)`.
pub fn example2_polar_grid(spec: &GridSpec, margin: f64) -> Result<ImmersionGrid, GridError> {
    check_margin(spec, margin, f64::sin)?;
    ImmersionGrid::from_fn(*spec, false, |u, v| {
        example2_point(Vec3::new(u.sin() * v.cos(), u.sin() * v.sin(), u.cos()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Standard,
    /// `v ↦ -v`.
    Reflected,
}

/// An ε fixture with the orientation that solves the H-surface equation.
#[derive(Debug, Clone)]
pub struct OrientedEpsilon {
    pub hs: HSurfaceGrid,
    pub orientation: Orientation,
    /// Largest interior residual of the chosen orientation.
    pub residual: f64,
    /// Largest interior residual of the rejected orientation.
    pub rejected_residual: f64,
}

/// Samples `f` in both orientations and keeps the one with the smaller H-equation residual.
pub fn orient(spec: &GridSpec, num: &Numerics, f: impl Fn(f64, f64) -> Vec3) -> OrientedEpsilon {
    let std = HSurfaceGrid::from_fn(*spec, &f);
    let refl = HSurfaceGrid::from_fn(*spec, |u, v| f(u, -v));
    let rs = h_equation_residual(&std, num).max_abs(num.margin);
    let rr = h_equation_residual(&refl, num).max_abs(num.margin);
    if rs <= rr {
        OrientedEpsilon { hs: std, orientation: Orientation::Standard, residual: rs, rejected_residual: rr }
    } else {
        OrientedEpsilon { hs: refl, orientation: Orientation::Reflected, residual: rr, rejected_residual: rs }
    }
}

/// Round sphere of radius `√3/2` in conformal coordinates.
pub fn cmc_sphere_epsilon(spec: &GridSpec, margin: f64, num: &Numerics) -> Result<OrientedEpsilon, GridError> {
    check_margin(spec, margin, |a| 1.0 / a.cosh())?;
    Ok(orient(spec, num, |a, v| mercator(a, v) * SPHERE_RADIUS))
}

/// Circular cylinder of radius `√3/4` in arclength coordinates.
pub fn cmc_cylinder_epsilon(spec: &GridSpec, num: &Numerics) -> OrientedEpsilon {
    let r = CYLINDER_RADIUS;
    orient(spec, num, |u, v| Vec3::new(r * (u / r).cos(), r * (u / r).sin(), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nkspace::{apply_p, metric_g_unchecked as g};
    use crate::surface::{almost_complex_residual, induced_metric, partials};

    fn window(n: usize, h: f64) -> GridSpec {
        GridSpec::centred(0.0, 0.0, h, h, n, n).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for n in FixtureName::ALL {
            assert_eq!(n.as_str().parse::<FixtureName>().unwrap(), n);
        }
        assert!("torus".parse::<FixtureName>().is_err());
    }

    #[test]
    fn example1_raw_parameters() {
        let num = Numerics::default();
        let grid = example1_st_grid(&window(15, 0.01));
        let d = partials(&grid, &num).unwrap();
        let m = induced_metric(&d);
        assert!(m.e.max_dev(2, 4.0 / 3.0) < 1e-10, "{}", m.e.max_dev(2, 4.0 / 3.0));
        assert!(m.g.max_dev(2, 4.0 / 3.0) < 1e-10);
        assert!(m.f.max_dev(2, -2.0 / 3.0) < 1e-10);
        for (i, j) in d.phi_u.interior(2) {
            let r = apply_p(&d.phi_u.get(i, j)) - d.phi_v.get(i, j);
            assert!(g(&r, &r).sqrt() < 1e-10);
        }
    }

    #[test]
    fn example1_is_adapted() {
        let num = Numerics::default();
        let d = partials(&example1_grid(&window(15, 0.01)), &num).unwrap();
        let r = almost_complex_residual(&d).residual.max_abs(0);
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn example2_is_adapted_and_conformal() {
        let num = Numerics::default();
        let spec = window(31, 0.02);
        let d = partials(&example2_grid(&spec, DEFAULT_POLE_MARGIN).unwrap(), &num).unwrap();
        let ac = almost_complex_residual(&d);
        assert!(ac.residual.max_abs(2) < 1e-9, "{}", ac.residual.max_abs(2));
        let m = induced_metric(&d);
        let e = m.e.zip(&Field::from_fn(31, 31, |i, _| 1.5 / spec.u(i).cosh().powi(2)), |a, b| a - b);
        assert!(e.max_abs(2) < 1e-9);
        assert!(m.f.max_abs(2) < 1e-9);
    }

    #[test]
    fn example2_polar_metric_and_factor() {
        let num = Numerics::default();
        let spec = GridSpec::centred(1.2, 0.3, 0.02, 0.02, 31, 31).unwrap();
        let d = partials(&example2_polar_grid(&spec, DEFAULT_POLE_MARGIN).unwrap(), &num).unwrap();
        let m = induced_metric(&d);
        for (i, j) in d.phi_u.interior(2) {
            let s = spec.u(i).sin();
            assert!((m.e.get(i, j) - 1.5).abs() < 1e-9);
            assert!((m.g.get(i, j) - 1.5 * s * s).abs() < 1e-9);
            assert!(m.f.get(i, j).abs() < 1e-9);
            let (u, v) = (d.phi_u.get(i, j), d.phi_v.get(i, j));
            let ju = crate::nkspace::apply_j(&u);
            // Jφ_u is a multiple of φ_v; measure the factor.
            let k = g(&ju, &v) / g(&v, &v);
            let r = ju - v * k;
            assert!(g(&r, &r).sqrt() < 1e-9);
            assert!((k.abs() - 1.0 / s).abs() < 1e-9);
        }
        assert!(example2_polar_grid(&GridSpec::centred(0.1, 0.0, 0.01, 0.01, 11, 11).unwrap(), 0.2).is_err());
    }

    #[test]
    fn window_margin_enforced() {
        assert!(example2_grid(&GridSpec::centred(2.5, 0.0, 0.01, 0.01, 11, 11).unwrap(), 0.2).is_err());
        assert!(example2_grid(&window(11, 0.01), 0.0).is_err());
    }

    #[test]
    fn cmc_fixtures_solve_the_equation() {
        let num = Numerics::default();
        let spec = window(41, 0.02);
        let s = cmc_sphere_epsilon(&spec, DEFAULT_POLE_MARGIN, &num).unwrap();
        assert!(s.residual < 1e-8, "{}", s.residual);
        assert!(s.rejected_residual > 1.0);
        let c = cmc_cylinder_epsilon(&spec, &num);
        assert!(c.residual < 1e-8, "{}", c.residual);
        assert!(c.rejected_residual > 1.0);
        assert_eq!(c.orientation, Orientation::Standard);
    }

    use crate::diff::Field;
}
