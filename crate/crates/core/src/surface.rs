//! Analysis of sampled almost complex immersions `φ = (p, q)`.
//!
//! In adapted coordinates (`φ_v = Jφ_u`) the derivatives are written
//! `p_u = pα̃, p_v = pβ̃, q_u = qγ̃, q_v = qδ̃` with imaginary coefficients,
//! and the pair `(α, β)` is `(α̃, β̃)` rotated by `2π/3`. Residual statistics
//! are always taken over the interior, [`Numerics::margin`] cells from the edge.

use std::f64::consts::PI;

use serde::Serialize;

use crate::diff::{Field, GridStencils, Numerics};
use crate::error::GridError;
use crate::grid::{GridSpec, ImmersionGrid};
use crate::nkspace::{apply_j, apply_p, conn_constant, metric_g_unchecked as g, FrameVector, Tangent, SQRT3};
use crate::quat::Vec3;

/// Rotation angle between `(α̃, β̃)` and `(α, β)`.
pub const THETA: f64 = 2.0 * PI / 3.0;

/// Largest real part of `p⁻¹p_u` (and friends) accepted before extraction fails.
pub const REAL_PART_TOL: f64 = 1e-4;
/// Largest relative defect of `γ̃, δ̃` against `(α̃, β̃)` accepted before extraction fails.
pub const RELATION_TOL: f64 = 1e-3;
/// Floor of the tolerance used by [`analyze`] for [`classify_p_alignment`]; `h²` is added to it.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// `(α, β)` from `(α̃, β̃)`.
pub fn rotate_forward(at: Vec3, bt: Vec3) -> (Vec3, Vec3) {
    let (c, s) = (THETA.cos(), THETA.sin());
    (at * c + bt * s, at * (-s) + bt * c)
}

/// `(α̃, β̃)` from `(α, β)`.
pub fn rotate_back(a: Vec3, b: Vec3) -> (Vec3, Vec3) {
    let (c, s) = (THETA.cos(), THETA.sin());
    (a * c - b * s, a * s + b * c)
}

/// `(γ̃, δ̃)` forced by `φ_v = Jφ_u`.
pub fn q_coefficients(at: Vec3, bt: Vec3) -> (Vec3, Vec3) {
    (bt * (SQRT3 / 2.0) + at * 0.5, bt * 0.5 - at * (SQRT3 / 2.0))
}

pub type Complex = num_complex::Complex64;

/// Tangent-vector fields `φ_u`, `φ_v`.
#[derive(Debug, Clone)]
pub struct Partials {
    pub phi_u: Field<Tangent>,
    pub phi_v: Field<Tangent>,
    /// Largest normal component removed when projecting onto `T(S³×S³)`.
    pub projection_max: f64,
}

/// Finite-difference derivatives projected to exact tangency.
pub fn partials(grid: &ImmersionGrid, num: &Numerics) -> Result<Partials, GridError> {
    let s = grid.spec;
    let st = GridStencils::new(s.nu, s.nv, s.du, s.dv, num.fd_order);
    let p = grid.values.map(|x| x.p.get());
    let q = grid.values.map(|x| x.q.get());
    let (pu, pv, qu, qv) = (st.d_u(&p), st.d_v(&p), st.d_u(&q), st.d_v(&q));
    let mut projection_max = 0.0f64;
    let mut fields = [Vec::with_capacity(p.data.len()), Vec::with_capacity(p.data.len())];
    for k in 0..p.data.len() {
        let base = grid.values.data[k];
        let (tu, nu) = Tangent::project(base, pu.data[k], qu.data[k]);
        let (tv, nv) = Tangent::project(base, pv.data[k], qv.data[k]);
        projection_max = projection_max.max(nu).max(nv);
        for (t, out) in [tu, tv].into_iter().zip(fields.iter_mut()) {
            let norm = t.g_norm();
            if !(norm > 1e-8) {
                return Err(GridError::Degenerate { iu: k % s.nu, iv: k / s.nu, norm });
            }
            out.push(t);
        }
    }
    let [fu, fv] = fields;
    Ok(Partials {
        phi_u: Field { nu: s.nu, nv: s.nv, data: fu },
        phi_v: Field { nu: s.nu, nv: s.nv, data: fv },
        projection_max,
    })
}

/// A tangent 2-plane inside the 6-dimensional tangent space, with `g`-orthogonal projection.
#[derive(Debug, Clone, Copy)]
pub struct Plane {
    pub t: [FrameVector; 2],
    inv: [[f64; 2]; 2],
}

impl Plane {
    pub fn new(a: FrameVector, b: FrameVector) -> Option<Plane> {
        let (e, f, gg) = (a.g(&a), a.g(&b), b.g(&b));
        let det = e * gg - f * f;
        if !(det > 1e-14 * (e * gg).max(1e-300)) {
            return None;
        }
        Some(Plane { t: [a, b], inv: [[gg / det, -f / det], [-f / det, e / det]] })
    }

    /// Coordinates `(x, y)` with `tangential(w) = x t₀ + y t₁`.
    pub fn coords(&self, w: &FrameVector) -> [f64; 2] {
        let r = [w.g(&self.t[0]), w.g(&self.t[1])];
        [self.inv[0][0] * r[0] + self.inv[0][1] * r[1], self.inv[1][0] * r[0] + self.inv[1][1] * r[1]]
    }

    pub fn tangential(&self, w: &FrameVector) -> FrameVector {
        let c = self.coords(w);
        self.t[0] * c[0] + self.t[1] * c[1]
    }

    pub fn normal(&self, w: &FrameVector) -> FrameVector {
        *w - self.tangential(w)
    }
}

fn gnorm(v: &FrameVector) -> f64 {
    v.g(v).max(0.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct AlmostComplexResidual {
    /// `|φ_v - Jφ_u| / |φ_u|` in the metric `g`.
    pub residual: Field<f64>,
    /// Component of `Jφ_u` normal to `span{φ_u, φ_v}`, relative to `|φ_u|`.
    pub defect: Field<f64>,
}

pub fn almost_complex_residual(d: &Partials) -> AlmostComplexResidual {
    let residual = d.phi_u.zip(&d.phi_v, |u, v| {
        let diff = v - apply_j(&u);
        g(&diff, &diff).max(0.0).sqrt() / u.g_norm()
    });
    let defect = d.phi_u.zip(&d.phi_v, |u, v| {
        let (fu, fv) = (u.to_frame(), v.to_frame());
        let ju = fu.j();
        match Plane::new(fu, fv) {
            Some(pl) => gnorm(&pl.normal(&ju)) / gnorm(&fu),
            None => f64::INFINITY,
        }
    });
    AlmostComplexResidual { residual, defect }
}

/// The coefficient fields of an adapted grid.
#[derive(Debug, Clone)]
pub struct CoefficientFields {
    pub alpha_t: Field<Vec3>,
    pub beta_t: Field<Vec3>,
    pub gamma_t: Field<Vec3>,
    pub delta_t: Field<Vec3>,
    pub alpha: Field<Vec3>,
    pub beta: Field<Vec3>,
    pub theta: f64,
    /// Largest real part of `p⁻¹p_u`, `p⁻¹p_v`, `q⁻¹q_u`, `q⁻¹q_v` before projection.
    pub real_part_max: f64,
    /// Largest relative defect of `γ̃, δ̃` against their values forced by `φ_v = Jφ_u`.
    pub relation_max: f64,
}

pub fn extract_coefficients(d: &Partials, num: &Numerics) -> Result<CoefficientFields, GridError> {
    let left = |t: Tangent| t.left();
    let alpha_t = d.phi_u.map(|t| left(t).0.imag());
    let gamma_t = d.phi_u.map(|t| left(t).1.imag());
    let beta_t = d.phi_v.map(|t| left(t).0.imag());
    let delta_t = d.phi_v.map(|t| left(t).1.imag());
    let mut relation_max = 0.0f64;
    for (iu, iv) in alpha_t.interior(num.margin) {
        let (at, bt) = (alpha_t.get(iu, iv), beta_t.get(iu, iv));
        let (gw, dw) = q_coefficients(at, bt);
        let scale = at.norm() + bt.norm();
        let r = ((gamma_t.get(iu, iv) - gw).norm() + (delta_t.get(iu, iv) - dw).norm()) / scale;
        relation_max = if r.is_nan() { f64::INFINITY } else { relation_max.max(r) };
    }
    let real_part_max = d.projection_max;
    if real_part_max > REAL_PART_TOL * num.tol_scale || relation_max > RELATION_TOL * num.tol_scale {
        return Err(GridError::NotAdapted { real_part: real_part_max, relation: relation_max });
    }
    let rotated = alpha_t.zip(&beta_t, rotate_forward);
    Ok(CoefficientFields {
        alpha: rotated.map(|x| x.0),
        beta: rotated.map(|x| x.1),
        alpha_t,
        beta_t,
        gamma_t,
        delta_t,
        theta: THETA,
        real_part_max,
        relation_max,
    })
}

/// Max-norm residuals of the three compatibility equations.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Integrability {
    /// `α̃_v - β̃_u - 2 α̃×β̃`.
    pub p_closure: f64,
    /// `α_v - β_u`.
    pub closedness: f64,
    /// `α_u + β_v + (4/√3) α×β`.
    pub divergence: f64,
}

pub fn integrability_residuals(cf: &CoefficientFields, spec: &GridSpec, num: &Numerics) -> Integrability {
    let st = GridStencils::new(spec.nu, spec.nv, spec.du, spec.dv, num.fd_order);
    let (atv, btu) = (st.d_v(&cf.alpha_t), st.d_u(&cf.beta_t));
    let (av, bu) = (st.d_v(&cf.alpha), st.d_u(&cf.beta));
    let (au, bv) = (st.d_u(&cf.alpha), st.d_v(&cf.beta));
    let m = num.margin;
    let max_over = |f: &dyn Fn(usize, usize) -> f64| {
        cf.alpha.interior(m).map(|(i, j)| f(i, j)).fold(0.0, f64::max)
    };
    Integrability {
        p_closure: max_over(&|i, j| {
            (atv.get(i, j) - btu.get(i, j) - cf.alpha_t.get(i, j).cross(cf.beta_t.get(i, j)) * 2.0).norm()
        }),
        closedness: max_over(&|i, j| (av.get(i, j) - bu.get(i, j)).norm()),
        divergence: max_over(&|i, j| {
            (au.get(i, j) + bv.get(i, j) + cf.alpha.get(i, j).cross(cf.beta.get(i, j)) * (4.0 / SQRT3)).norm()
        }),
    }
}

/// Pointwise `Λ` computed three ways.
#[derive(Debug, Clone)]
pub struct LambdaField {
    /// `2Λ = g(Pφ_u, φ_u) - i g(Pφ_u, Jφ_u)`; the canonical value.
    pub metric: Field<Complex>,
    /// Closed form in the unrotated pair `(α̃, β̃)`; equals `metric`.
    pub tilde: Field<Complex>,
    /// The same closed form in the rotated pair `(α, β)`; equals `e^{2iθ}` times `tilde`.
    pub rotated: Field<Complex>,
}

impl LambdaField {
    pub fn max_abs(&self, margin: usize) -> f64 {
        self.metric.map(|z| z.norm()).max_abs(margin)
    }

    /// Largest `|metric - tilde|`.
    pub fn route_mismatch(&self, margin: usize) -> f64 {
        self.metric.zip(&self.tilde, |a, b| (a - b).norm()).max_abs(margin)
    }

    /// Largest `|rotated - e^{2iθ} tilde|`.
    pub fn phase_mismatch(&self, margin: usize) -> f64 {
        let ph = Complex::cis(2.0 * THETA);
        self.rotated.zip(&self.tilde, |r, t| (r - ph * t).norm()).max_abs(margin)
    }
}

/// `¼(a·a - b·b) + (√3/2) a·b + i((√3/4)(a·a - b·b) - ½ a·b)`.
pub fn lambda_closed_form(a: Vec3, b: Vec3) -> Complex {
    let (d, m) = (a.norm_sq() - b.norm_sq(), a.dot(b));
    Complex::new(0.25 * d + SQRT3 / 2.0 * m, SQRT3 / 4.0 * d - 0.5 * m)
}

pub fn lambda_field(d: &Partials, cf: &CoefficientFields) -> LambdaField {
    let metric = d.phi_u.map(|u| {
        let pu = apply_p(&u);
        Complex::new(0.5 * g(&pu, &u), -0.5 * g(&pu, &apply_j(&u)))
    });
    LambdaField {
        metric,
        tilde: cf.alpha_t.zip(&cf.beta_t, lambda_closed_form),
        rotated: cf.alpha.zip(&cf.beta, lambda_closed_form),
    }
}

/// Max residual of the Cauchy–Riemann pair `(α·β)_u = ½(α·α - β·β)_v`, `(α·β)_v = -½(α·α - β·β)_u`.
pub fn cr_residual(cf: &CoefficientFields, spec: &GridSpec, num: &Numerics) -> f64 {
    let st = GridStencils::new(spec.nu, spec.nv, spec.du, spec.dv, num.fd_order);
    let m = cf.alpha.zip(&cf.beta, |a, b| a.dot(b));
    let h = cf.alpha.zip(&cf.beta, |a, b| 0.5 * (a.norm_sq() - b.norm_sq()));
    let (mu, mv, hu, hv) = (st.d_u(&m), st.d_v(&m), st.d_u(&h), st.d_v(&h));
    let r1 = mu.zip(&hv, |a, b| a - b).max_abs(num.margin);
    let r2 = mv.zip(&hu, |a, b| a + b).max_abs(num.margin);
    r1.max(r2)
}

/// First fundamental form `E, F, G` in the metric `g`.
#[derive(Debug, Clone)]
pub struct InducedMetric {
    pub e: Field<f64>,
    pub f: Field<f64>,
    pub g: Field<f64>,
}

pub fn induced_metric(d: &Partials) -> InducedMetric {
    InducedMetric {
        e: d.phi_u.zip(&d.phi_u, |a, b| g(&a, &b)),
        f: d.phi_u.zip(&d.phi_v, |a, b| g(&a, &b)),
        g: d.phi_v.zip(&d.phi_v, |a, b| g(&a, &b)),
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Gaussian curvature from a first fundamental form by the Brioschi formula.
pub fn brioschi(metric: &InducedMetric, spec: &GridSpec, num: &Numerics) -> Result<Field<f64>, GridError> {
    let st = GridStencils::new(spec.nu, spec.nv, spec.du, spec.dv, num.fd_order);
    let (e, f, gg) = (&metric.e, &metric.f, &metric.g);
    let (eu, ev, evv) = (st.d_u(e), st.d_v(e), st.d_vv(e));
    let (fu, fv, fuv) = (st.d_u(f), st.d_v(f), st.d_v(&st.d_u(f)));
    let (gu, gv, guu) = (st.d_u(gg), st.d_v(gg), st.d_uu(gg));
    Field::try_from_fn(spec.nu, spec.nv, |i, j| {
        let (e0, f0, g0) = (e.get(i, j), f.get(i, j), gg.get(i, j));
        let det = e0 * g0 - f0 * f0;
        if !(det > 1e-10) {
            return Err(GridError::DegenerateMetric { iu: i, iv: j, det });
        }
        let m1 = [
            [
                -0.5 * evv.get(i, j) + fuv.get(i, j) - 0.5 * guu.get(i, j),
                0.5 * eu.get(i, j),
                fu.get(i, j) - 0.5 * ev.get(i, j),
            ],
            [fv.get(i, j) - 0.5 * gu.get(i, j), e0, f0],
            [0.5 * gv.get(i, j), f0, g0],
        ];
        let m2 = [
            [0.0, 0.5 * ev.get(i, j), 0.5 * gu.get(i, j)],
            [0.5 * ev.get(i, j), e0, f0],
            [0.5 * gu.get(i, j), f0, g0],
        ];
        Ok((det3(m1) - det3(m2)) / (det * det))
    })
}

pub fn gaussian_curvature(grid: &ImmersionGrid, num: &Numerics) -> Result<Field<f64>, GridError> {
    let d = partials(grid, num)?;
    brioschi(&induced_metric(&d), &grid.spec, num)
}

/// Second fundamental form in frame coefficients, with derived diagnostics.
#[derive(Debug, Clone)]
pub struct SecondFundamentalForm {
    pub h_uu: Field<FrameVector>,
    pub h_uv: Field<FrameVector>,
    pub h_vv: Field<FrameVector>,
    /// Full norm `|h|` over an orthonormal tangent basis.
    pub norm: Field<f64>,
    /// `|h(v, v)|²` for `v = φ_u / |φ_u|`.
    pub hvv_sq: Field<f64>,
    /// `|h(φ_u, Jφ_u) - J h(φ_u, φ_u)| / E`.
    pub j_residual: Field<f64>,
    /// `|h(φ_u, φ_u) + h(φ_v, φ_v)| / E`.
    pub trace_residual: Field<f64>,
    /// `max |g(h(X, Y), PZ)| / E^{3/2}` over `X, Y, Z ∈ {φ_u, φ_v}`.
    pub p_normal_residual: Field<f64>,
}

pub fn second_fundamental_form(d: &Partials, spec: &GridSpec, num: &Numerics) -> Result<SecondFundamentalForm, GridError> {
    let st = GridStencils::new(spec.nu, spec.nv, spec.du, spec.dv, num.fd_order);
    let cu = d.phi_u.map(|t| t.to_frame());
    let cv = d.phi_v.map(|t| t.to_frame());
    let (cuu, cvu, cvv) = (st.d_u(&cu), st.d_u(&cv), st.d_v(&cv));
    let n = spec.nu * spec.nv;
    let mut out: [Vec<FrameVector>; 3] = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut scalars: [Vec<f64>; 5] = Default::default();
    for k in 0..n {
        let (xu, xv) = (cu.data[k], cv.data[k]);
        let plane = Plane::new(xu, xv).ok_or(GridError::RankDeficient { iu: k % spec.nu, iv: k / spec.nu })?;
        let huu = plane.normal(&(cuu.data[k] + conn_constant(&xu, &xu)));
        let huv = plane.normal(&(cvu.data[k] + conn_constant(&xu, &xv)));
        let hvv = plane.normal(&(cvv.data[k] + conn_constant(&xv, &xv)));
        let (e, f, gg) = (xu.g(&xu), xu.g(&xv), xv.g(&xv));
        let det = e * gg - f * f;
        let inv = [[gg / det, -f / det], [-f / det, e / det]];
        let h = [[huu, huv], [huv, hvv]];
        let mut norm_sq = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k2 in 0..2 {
                    for l in 0..2 {
                        norm_sq += inv[i][k2] * inv[j][l] * h[i][j].g(&h[k2][l]);
                    }
                }
            }
        }
        let [a, b] = plane.coords(&xu.j());
        let h_u_ju = huu * a + huv * b;
        let jr = gnorm(&(h_u_ju - huu.j())) / e;
        let tr = gnorm(&(huu + hvv)) / e;
        let (pu, pv) = (xu.p(), xv.p());
        let pn = [huu, huv, hvv]
            .iter()
            .flat_map(|hh| [hh.g(&pu).abs(), hh.g(&pv).abs()])
            .fold(0.0, f64::max)
            / e.powf(1.5);
        scalars[0].push(norm_sq.max(0.0).sqrt());
        scalars[1].push(huu.g(&huu) / (e * e));
        scalars[2].push(jr);
        scalars[3].push(tr);
        scalars[4].push(pn);
        out[0].push(huu);
        out[1].push(huv);
        out[2].push(hvv);
    }
    let field = |data: Vec<f64>| Field { nu: spec.nu, nv: spec.nv, data };
    let ffield = |data: Vec<FrameVector>| Field { nu: spec.nu, nv: spec.nv, data };
    let [s0, s1, s2, s3, s4] = scalars;
    let [o0, o1, o2] = out;
    Ok(SecondFundamentalForm {
        h_uu: ffield(o0),
        h_uv: ffield(o1),
        h_vv: ffield(o2),
        norm: field(s0),
        hvv_sq: field(s1),
        j_residual: field(s2),
        trace_residual: field(s3),
        p_normal_residual: field(s4),
    })
}

/// How `P` acts on the tangent planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// `PTM = TM`.
    Tangent,
    /// `PTM ⊂ T⊥M`.
    Normal,
    Mixed,
}

impl std::fmt::Display for Alignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Alignment::Tangent => "tangent",
            Alignment::Normal => "normal",
            Alignment::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Classification {
    pub tag: Alignment,
    /// Largest `max(|g(Pφ_u, φ_u)|, |g(Pφ_u, φ_v)|) / E`.
    pub normal_defect: f64,
    /// Largest normal component of `Pφ_u`, relative to `|φ_u|`.
    pub tangent_defect: f64,
}

pub fn classify_p_alignment(d: &Partials, tol: f64, margin: usize) -> Classification {
    let mut normal_defect = 0.0f64;
    let mut tangent_defect = 0.0f64;
    for (i, j) in d.phi_u.interior(margin) {
        let (u, v) = (d.phi_u.get(i, j).to_frame(), d.phi_v.get(i, j).to_frame());
        let pu = u.p();
        let e = u.g(&u);
        normal_defect = normal_defect.max(pu.g(&u).abs().max(pu.g(&v).abs()) / e);
        tangent_defect = match Plane::new(u, v) {
            Some(pl) => tangent_defect.max(gnorm(&pl.normal(&pu)) / e.sqrt()),
            None => f64::INFINITY,
        };
    }
    let tag = if normal_defect < tol {
        Alignment::Normal
    } else if tangent_defect < tol {
        Alignment::Tangent
    } else {
        Alignment::Mixed
    };
    Classification { tag, normal_defect, tangent_defect }
}

/// Every surface diagnostic of an adapted grid.
#[derive(Debug, Clone)]
pub struct SurfaceAnalysis {
    pub partials: Partials,
    pub almost_complex: AlmostComplexResidual,
    pub coefficients: CoefficientFields,
    pub integrability: Integrability,
    pub lambda: LambdaField,
    pub cr_max: f64,
    pub metric: InducedMetric,
    pub curvature: Field<f64>,
    pub sff: SecondFundamentalForm,
    pub classification: Classification,
}

pub fn analyze(grid: &ImmersionGrid, num: &Numerics) -> Result<SurfaceAnalysis, GridError> {
    let d = partials(grid, num)?;
    let almost_complex = almost_complex_residual(&d);
    let cf = extract_coefficients(&d, num)?;
    let integrability = integrability_residuals(&cf, &grid.spec, num);
    let lambda = lambda_field(&d, &cf);
    let cr_max = cr_residual(&cf, &grid.spec, num);
    let metric = induced_metric(&d);
    let curvature = brioschi(&metric, &grid.spec, num)?;
    let sff = second_fundamental_form(&d, &grid.spec, num)?;
    let h = grid.spec.h();
    let classification = classify_p_alignment(&d, (CLASSIFY_TOL + h * h) * num.tol_scale, num.margin);
    Ok(SurfaceAnalysis {
        partials: d,
        almost_complex,
        coefficients: cf,
        integrability,
        lambda,
        cr_max,
        metric,
        curvature,
        sff,
        classification,
    })
}

/// Extra statistics carried alongside the fixed report keys.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceDiagnostics {
    pub coordinate_free_defect_max: f64,
    pub real_part_max: f64,
    pub relation_max: f64,
    pub lambda_route_mismatch: f64,
    pub lambda_phase_mismatch: f64,
    pub lambda_mean: Complex,
    pub metric_e_mean: f64,
    pub metric_f_max_abs: f64,
    pub hvv_sq_mean: f64,
    pub sff_j_residual_max: f64,
    pub sff_trace_max: f64,
    pub sff_p_normal_max: f64,
    pub gauss_equation_max: Option<f64>,
    pub normal_defect: f64,
    pub tangent_defect: f64,
}

/// The report written by `analyze`.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceReport {
    pub almost_complex_max: f64,
    pub integrability_21_max: f64,
    pub integrability_22_max: f64,
    pub integrability_23_max: f64,
    pub cr_max: f64,
    pub lambda_max_abs: f64,
    #[serde(rename = "K_mean")]
    pub k_mean: f64,
    #[serde(rename = "K_max_dev")]
    pub k_max_dev: f64,
    pub h_norm_max: f64,
    pub classification: Alignment,
    pub grid: GridSpec,
    pub seed: u64,
    pub numerics: Numerics,
    pub diagnostics: SurfaceDiagnostics,
}

impl SurfaceAnalysis {
    pub fn report(&self, spec: &GridSpec, num: &Numerics, seed: u64) -> SurfaceReport {
        let m = num.margin;
        let k_mean = self.curvature.mean(m);
        let gauss = (self.classification.tag == Alignment::Normal).then(|| {
            self.curvature
                .zip(&self.sff.hvv_sq, |k, h| (k - (2.0 / 3.0 - 2.0 * h)).abs())
                .max_abs(m)
        });
        let n = self.lambda.metric.interior(m).count() as f64;
        let lambda_mean = self.lambda.metric.interior(m).fold(Complex::default(), |acc, (i, j)| {
            acc + self.lambda.metric.get(i, j) / n
        });
        SurfaceReport {
            almost_complex_max: self.almost_complex.residual.max_abs(m),
            integrability_21_max: self.integrability.p_closure,
            integrability_22_max: self.integrability.closedness,
            integrability_23_max: self.integrability.divergence,
            cr_max: self.cr_max,
            lambda_max_abs: self.lambda.max_abs(m),
            k_mean,
            k_max_dev: self.curvature.max_dev(m, k_mean),
            h_norm_max: self.sff.norm.max_abs(m),
            classification: self.classification.tag,
            grid: *spec,
            seed,
            numerics: *num,
            diagnostics: SurfaceDiagnostics {
                coordinate_free_defect_max: self.almost_complex.defect.max_abs(m),
                real_part_max: self.coefficients.real_part_max,
                relation_max: self.coefficients.relation_max,
                lambda_route_mismatch: self.lambda.route_mismatch(m),
                lambda_phase_mismatch: self.lambda.phase_mismatch(m),
                lambda_mean,
                metric_e_mean: self.metric.e.mean(m),
                metric_f_max_abs: self.metric.f.max_abs(m),
                hvv_sq_mean: self.sff.hvv_sq.mean(m),
                sff_j_residual_max: self.sff.j_residual.max_abs(m),
                sff_trace_max: self.sff.trace_residual.max_abs(m),
                sff_p_normal_max: self.sff.p_normal_residual.max_abs(m),
                gauss_equation_max: gauss,
                normal_defect: self.classification.normal_defect,
                tangent_defect: self.classification.tangent_defect,
            },
        }
    }
}
