//! Correspondence between almost complex surfaces and solutions of
//! `ε_uu + ε_vv = -(4/√3) ε_u × ε_v`.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::diff::{Field, GridStencils, Numerics};
use crate::error::{CorrespondenceError, GridError};
use crate::grid::{GridSpec, HSurfaceGrid, ImmersionGrid};
use crate::nkspace::{apply_j, apply_p, metric_g_unchecked as g, Point, SQRT3};
use crate::quat::{Quaternion, UnitQuaternion, Vec3};
use crate::surface::{partials, q_coefficients, rotate_back, CoefficientFields};

/// The mean curvature of every solution.
pub const H_TARGET: f64 = -2.0 / SQRT3;
/// Lower bound on `|ε_u|² + |ε_v|²`.
pub const VANISHING_TOL: f64 = 1e-10;
/// Largest relative conformality defect accepted by [`mean_curvature`].
pub const ISOTHERMAL_TOL: f64 = 1e-3;
/// `|Λ| / E` above which [`metric_factor_check`] does not apply.
pub const LAMBDA_GATE: f64 = 1e-3;

/// Tolerance for discretization-level certificates on a grid with largest step `h`.
pub fn certificate_tolerance(h: f64, num: &Numerics) -> f64 {
    num.tol_scale * (10.0 * h * h + 1e-8)
}

/// Pointwise `|ε_uu + ε_vv + (4/√3) ε_u × ε_v|`.
pub fn h_equation_residual(hs: &HSurfaceGrid, num: &Numerics) -> Field<f64> {
    let s = hs.spec;
    let st = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let (eu, ev) = (st.d_u(&hs.eps), st.d_v(&hs.eps));
    let lap = st.d_uu(&hs.eps).zip(&st.d_vv(&hs.eps), |a, b| a + b);
    let cross = eu.zip(&ev, |a, b| a.cross(b) * (4.0 / SQRT3));
    lap.zip(&cross, |a, b| (a + b).norm())
}

/// Cumulative trapezoid integration of `α du + β dv` from the grid origin.
fn integrate_one_form(alpha: &Field<Vec3>, beta: &Field<Vec3>, spec: &GridSpec, rows_first: bool) -> Field<Vec3> {
    let (nu, nv) = (spec.nu, spec.nv);
    let mut out = vec![Vec3::ZERO; nu * nv];
    let idx = |i: usize, j: usize| j * nu + i;
    if rows_first {
        for i in 1..nu {
            out[idx(i, 0)] = out[idx(i - 1, 0)] + (alpha.get(i - 1, 0) + alpha.get(i, 0)) * (spec.du / 2.0);
        }
        for i in 0..nu {
            for j in 1..nv {
                out[idx(i, j)] = out[idx(i, j - 1)] + (beta.get(i, j - 1) + beta.get(i, j)) * (spec.dv / 2.0);
            }
        }
    } else {
        for j in 1..nv {
            out[idx(0, j)] = out[idx(0, j - 1)] + (beta.get(0, j - 1) + beta.get(0, j)) * (spec.dv / 2.0);
        }
        for j in 0..nv {
            for i in 1..nu {
                out[idx(i, j)] = out[idx(i - 1, j)] + (alpha.get(i - 1, j) + alpha.get(i, j)) * (spec.du / 2.0);
            }
        }
    }
    Field { nu, nv, data: out }
}

#[derive(Debug, Clone)]
pub struct EpsilonResult {
    pub hs: HSurfaceGrid,
    /// Largest pointwise difference between the two path orders.
    pub loop_residual: f64,
    pub tolerance: f64,
}

/// Integrates `ε_u = α, ε_v = β`; fails if the two path orders disagree.
pub fn epsilon_from_surface(
    spec: &GridSpec,
    cf: &CoefficientFields,
    num: &Numerics,
) -> Result<EpsilonResult, CorrespondenceError> {
    let a = integrate_one_form(&cf.alpha, &cf.beta, spec, true);
    let b = integrate_one_form(&cf.alpha, &cf.beta, spec, false);
    let loop_residual = a.zip(&b, |x, y| (x - y).norm()).max_abs(0);
    let tolerance = certificate_tolerance(spec.h(), num) * (spec.u_max() - spec.u0 + spec.v_max() - spec.v0).max(1.0);
    if !(loop_residual <= tolerance) {
        return Err(CorrespondenceError::NotClosed { loop_residual, tolerance });
    }
    Ok(EpsilonResult { hs: HSurfaceGrid { spec: *spec, eps: a }, loop_residual, tolerance })
}

#[derive(Debug, Clone)]
pub struct SurfaceResult {
    pub grid: ImmersionGrid,
    /// Largest H-equation residual of the input.
    pub h_residual: f64,
    /// Largest pointwise `|p₁ - p₂| + |q₁ - q₂|` between the two path orders.
    pub compatibility: f64,
    pub tolerance: f64,
    /// Largest `|1 - |p||`, `|1 - |q||` seen before renormalization.
    pub drift_max: f64,
}

struct Stepper {
    drift: f64,
}

impl Stepper {
    /// One classical RK4 step of `y' = y a(t)` with `a` linear between `a0` and `a1`.
    fn step(&mut self, y: UnitQuaternion, a0: Vec3, a1: Vec3, h: f64) -> UnitQuaternion {
        let (q0, qm, q1) = (Quaternion::pure(a0), Quaternion::pure((a0 + a1) * 0.5), Quaternion::pure(a1));
        let y0 = y.get();
        let k1 = y0 * q0;
        let k2 = (y0 + k1 * (h / 2.0)) * qm;
        let k3 = (y0 + k2 * (h / 2.0)) * qm;
        let k4 = (y0 + k3 * h) * q1;
        let next = y0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let n = next.norm();
        self.drift = self.drift.max((1.0 - n).abs());
        UnitQuaternion::from_raw(next.scale(1.0 / n))
    }
}

#[allow(clippy::too_many_arguments)]
fn integrate_pair(
    spec: &GridSpec,
    cu: &Field<Vec3>,
    cv: &Field<Vec3>,
    y0: UnitQuaternion,
    rows_first: bool,
    st: &mut Stepper,
) -> Vec<UnitQuaternion> {
    let (nu, nv) = (spec.nu, spec.nv);
    let mut out = vec![y0; nu * nv];
    let idx = |i: usize, j: usize| j * nu + i;
    if rows_first {
        for i in 1..nu {
            out[idx(i, 0)] = st.step(out[idx(i - 1, 0)], cu.get(i - 1, 0), cu.get(i, 0), spec.du);
        }
        for i in 0..nu {
            for j in 1..nv {
                out[idx(i, j)] = st.step(out[idx(i, j - 1)], cv.get(i, j - 1), cv.get(i, j), spec.dv);
            }
        }
    } else {
        for j in 1..nv {
            out[idx(0, j)] = st.step(out[idx(0, j - 1)], cv.get(0, j - 1), cv.get(0, j), spec.dv);
        }
        for j in 0..nv {
            for i in 1..nu {
                out[idx(i, j)] = st.step(out[idx(i - 1, j)], cu.get(i - 1, j), cu.get(i, j), spec.du);
            }
        }
    }
    out
}

/// Reconstructs the almost complex surface with `φ(u₀, v₀) = (p0, q0)` from a solution `ε`.
pub fn surface_from_epsilon(
    hs: &HSurfaceGrid,
    p0: UnitQuaternion,
    q0: UnitQuaternion,
    num: &Numerics,
) -> Result<SurfaceResult, CorrespondenceError> {
    let s = hs.spec;
    let stn = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let (alpha, beta) = (stn.d_u(&hs.eps), stn.d_v(&hs.eps));
    for (i, j) in alpha.interior(num.margin) {
        if !(alpha.get(i, j).norm_sq() + beta.get(i, j).norm_sq() > VANISHING_TOL) {
            return Err(CorrespondenceError::VanishingDerivative { iu: i, iv: j });
        }
    }
    let scale = alpha.map(Vec3::norm_sq).mean(num.margin).max(1.0);
    let h_residual = h_equation_residual(hs, num).max_abs(num.margin);
    let h_tol = 5.0 * certificate_tolerance(s.h(), num) * scale + num.tol_scale * 1e-6;
    if !(h_residual <= h_tol) {
        return Err(CorrespondenceError::HEquation { residual: h_residual, tolerance: h_tol });
    }
    let tilde = alpha.zip(&beta, rotate_back);
    let gd = tilde.map(|(at, bt)| q_coefficients(at, bt));
    let (at, bt) = (tilde.map(|x| x.0), tilde.map(|x| x.1));
    let (gt, dt) = (gd.map(|x| x.0), gd.map(|x| x.1));
    let mut st = Stepper { drift: 0.0 };
    let p1 = integrate_pair(&s, &at, &bt, p0, true, &mut st);
    let q1 = integrate_pair(&s, &gt, &dt, q0, true, &mut st);
    let p2 = integrate_pair(&s, &at, &bt, p0, false, &mut st);
    let q2 = integrate_pair(&s, &gt, &dt, q0, false, &mut st);
    let compatibility = (0..p1.len())
        .map(|k| (p1[k].get() - p2[k].get()).norm() + (q1[k].get() - q2[k].get()).norm())
        .fold(0.0, f64::max);
    let extent = (s.u_max() - s.u0 + s.v_max() - s.v0).max(1.0);
    let tolerance = 5.0 * certificate_tolerance(s.h(), num) * scale * extent;
    if !(compatibility <= tolerance) {
        return Err(CorrespondenceError::Incompatible { residual: compatibility, tolerance });
    }
    let values = p1.into_iter().zip(q1).map(|(p, q)| Point::new(p, q)).collect();
    let grid = ImmersionGrid::new(s, values, true)?;
    Ok(SurfaceResult { grid, h_residual, compatibility, tolerance, drift_max: st.drift })
}

#[derive(Debug, Clone)]
pub struct MeanCurvature {
    pub h: Field<f64>,
    /// Largest `(||ε_u|² - |ε_v|²| + 2|ε_u·ε_v|) / (|ε_u|² + |ε_v|²)`.
    pub conformality_defect: f64,
}

/// Mean curvature in isothermal parameters, oriented by `ε_u × ε_v`.
pub fn mean_curvature(hs: &HSurfaceGrid, num: &Numerics) -> Result<MeanCurvature, CorrespondenceError> {
    let s = hs.spec;
    let st = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let (eu, ev) = (st.d_u(&hs.eps), st.d_v(&hs.eps));
    let lap = st.d_uu(&hs.eps).zip(&st.d_vv(&hs.eps), |a, b| a + b);
    let defect = eu
        .zip(&ev, |a, b| {
            let (x, y) = (a.norm_sq(), b.norm_sq());
            ((x - y).abs() + 2.0 * a.dot(b).abs()) / (x + y)
        })
        .max_abs(num.margin);
    if !(defect <= ISOTHERMAL_TOL * num.tol_scale) {
        return Err(CorrespondenceError::NonIsothermal { defect });
    }
    let h = Field::from_fn(s.nu, s.nv, |i, j| {
        let (a, b) = (eu.get(i, j), ev.get(i, j));
        let n = a.cross(b);
        lap.get(i, j).dot(n) / (n.norm() * (a.norm_sq() + b.norm_sq()))
    });
    Ok(MeanCurvature { h, conformality_defect: defect })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MetricFactor {
    /// The surface has `Λ ≠ 0`; `lambda_rel` is the largest `|Λ| / E`.
    NotApplicable { lambda_rel: f64 },
    /// Pointwise `g(φ_u, φ_u) / |ε_u|²`.
    Ratio { mean: f64, max_dev_from_two: f64 },
}

pub fn metric_factor_check(grid: &ImmersionGrid, hs: &HSurfaceGrid, num: &Numerics) -> Result<MetricFactor, GridError> {
    let d = partials(grid, num)?;
    let lambda_rel = d
        .phi_u
        .map(|u| {
            let pu = apply_p(&u);
            0.5 * g(&pu, &u).hypot(g(&pu, &apply_j(&u))) / g(&u, &u)
        })
        .max_abs(num.margin);
    if !(lambda_rel <= LAMBDA_GATE * num.tol_scale) {
        return Ok(MetricFactor::NotApplicable { lambda_rel });
    }
    let s = hs.spec;
    let st = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let eu = st.d_u(&hs.eps);
    let ratio = d.phi_u.zip(&eu, |u, e| g(&u, &u) / e.norm_sq());
    Ok(MetricFactor::Ratio { mean: ratio.mean(num.margin), max_dev_from_two: ratio.max_dev(num.margin, 2.0) })
}

/// Pointwise Gram entries `(ε_u·ε_u, ε_u·ε_v, ε_v·ε_v)`.
pub fn gram(hs: &HSurfaceGrid, num: &Numerics) -> Field<[f64; 3]> {
    let s = hs.spec;
    let st = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let (eu, ev) = (st.d_u(&hs.eps), st.d_v(&hs.eps));
    eu.zip(&ev, |a, b| [a.dot(a), a.dot(b), b.dot(b)])
}

/// Largest `|ε_u × ε_v| / (|ε_u|² + |ε_v|²)`; zero exactly when the image is a curve.
pub fn rank_defect(hs: &HSurfaceGrid, num: &Numerics) -> f64 {
    let s = hs.spec;
    let st = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let (eu, ev) = (st.d_u(&hs.eps), st.d_v(&hs.eps));
    eu.zip(&ev, |a, b| a.cross(b).norm() / (a.norm_sq() + b.norm_sq())).max_abs(0)
}

/// Least-squares sphere through the samples.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SphereFit {
    pub centre: Vec3,
    pub radius: f64,
    /// Largest `||ε - centre| - radius|`.
    pub max_dev: f64,
}

/// Fits `|x|² = 2c·x + k` by linear least squares; `None` for coplanar samples.
pub fn sphere_fit(hs: &HSurfaceGrid) -> Option<SphereFit> {
    let n = hs.eps.data.len() as f64;
    let mean = hs.eps.data.iter().fold(Vec3::ZERO, |acc, x| acc + *x * (1.0 / n));
    let mut m = Matrix4::zeros();
    let mut rhs = Vector4::zeros();
    for x in hs.eps.data.iter().map(|x| *x - mean) {
        let row = Vector4::new(2.0 * x.x, 2.0 * x.y, 2.0 * x.z, 1.0);
        m += row * row.transpose();
        rhs += row * x.norm_sq();
    }
    let svd = m.svd(true, true);
    if svd.singular_values.min() <= 1e-12 * svd.singular_values.max() {
        return None;
    }
    let sol = svd.solve(&rhs, 0.0).ok()?;
    let c = Vec3::new(sol[0], sol[1], sol[2]);
    let radius = (sol[3] + c.norm_sq()).max(0.0).sqrt();
    let centre = c + mean;
    let max_dev = hs.eps.data.iter().map(|x| ((*x - centre).norm() - radius).abs()).fold(0.0, f64::max);
    Some(SphereFit { centre, radius, max_dev })
}
