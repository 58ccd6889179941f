//! The nearly Kähler manifold S³×S³.
//!
//! Tangent vectors are kept in ambient form `Z = (U, V)` with `U ∈ T_pS³` and
//! `V ∈ T_qS³`. The global left-invariant frame
//!
//! ```text
//! E₁ = (pi, 0)   E₂ = (pj, 0)   E₃ = -(pk, 0)
//! F₁ = (0, qi)   F₂ = (0, qj)   F₃ = -(0, qk)
//! ```
//!
//! gives a second, coordinate view ([`FrameVector`]). The almost complex
//! structure `J`, the almost product structure `P` and the metric `g` are
//! evaluated from their ambient definitions; the Levi-Civita connection and
//! the tensors `G = ∇̃J`, `H = ∇̃P` are evaluated from their constant frame
//! tables. Tests play the two views against each other.

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::quat::{Quaternion, UnitQuaternion, Vec3};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Base points closer than this (in ℝ⁴×ℝ⁴) are the same point.
pub const BASE_TOL: f64 = 1e-12;

/// Allowed normal component of a vector passed to [`Tangent::new`].
pub const TANGENCY_TOL: f64 = 1e-10;

/// Levi-Civita symbol `ε_{ijk}` with `ε₁₂₃ = 1` (zero-based indices).
pub const LEVI_CIVITA: [[[f64; 3]; 3]; 3] = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
    [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
    [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
];

/// A point `(p, q)` of S³×S³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub p: UnitQuaternion,
    pub q: UnitQuaternion,
}

impl Point {
    pub const IDENTITY: Point = Point { p: UnitQuaternion::ONE, q: UnitQuaternion::ONE };

    pub fn new(p: UnitQuaternion, q: UnitQuaternion) -> Self {
        Point { p, q }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.p.get() - other.p.get()).norm() + (self.q.get() - other.q.get()).norm()
    }

    fn check_same(&self, other: &Point) -> Result<(), GeometryError> {
        let distance = self.distance(other);
        if distance > BASE_TOL {
            return Err(GeometryError::BaseMismatch { distance });
        }
        Ok(())
    }

    /// Moves along the left-invariant curve `t ↦ (p exp(t a), q exp(t b))`.
    pub fn flow(&self, a: Vec3, b: Vec3, t: f64) -> Point {
        Point::new(
            self.p.compose(Quaternion::exp_pure(a * t)),
            self.q.compose(Quaternion::exp_pure(b * t)),
        )
    }
}

/// Frame coefficients in the basis `E₁, E₂, E₃, F₁, F₂, F₃` at an implicit point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameVector {
    pub e: [f64; 3],
    pub f: [f64; 3],
}

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector { e: [0.0; 3], f: [0.0; 3] };

    pub fn new(e: [f64; 3], f: [f64; 3]) -> Self {
        FrameVector { e, f }
    }

    /// Basis vector `a` in `0..6`; indices `0..3` are `E_i`, `3..6` are `F_i`.
    pub fn basis(a: usize) -> Self {
        let mut v = FrameVector::ZERO;
        if a < 3 {
            v.e[a] = 1.0;
        } else {
            v.f[a - 3] = 1.0;
        }
        v
    }

    pub fn e_i(i: usize) -> Self {
        Self::basis(i)
    }

    pub fn f_i(i: usize) -> Self {
        Self::basis(i + 3)
    }

    /// `ε_{ijk}(ce E_k + cf F_k)` summed over `k`.
    fn eps_combo(i: usize, j: usize, ce: f64, cf: f64) -> Self {
        let mut v = FrameVector::ZERO;
        for k in 0..3 {
            let s = LEVI_CIVITA[i][j][k];
            v.e[k] += s * ce;
            v.f[k] += s * cf;
        }
        v
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.e[0], self.e[1], self.e[2], self.f[0], self.f[1], self.f[2]]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        FrameVector::new([a[0], a[1], a[2]], [a[3], a[4], a[5]])
    }

    pub fn scale(self, s: f64) -> Self {
        FrameVector::from_array(self.as_array().map(|c| c * s))
    }

    /// Max-abs of the coefficients.
    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// `J` acting on frame coefficients: `JE_i = -(E_i + 2F_i)/√3`, `JF_i = (2E_i + F_i)/√3`.
    pub fn j(self) -> Self {
        let mut out = FrameVector::ZERO;
        for i in 0..3 {
            out.e[i] = (-self.e[i] + 2.0 * self.f[i]) / SQRT3;
            out.f[i] = (-2.0 * self.e[i] + self.f[i]) / SQRT3;
        }
        out
    }

    /// `P` swaps `E_i` and `F_i`.
    pub fn p(self) -> Self {
        FrameVector::new(self.f, self.e)
    }

    /// The nearly Kähler metric in frame coefficients.
    pub fn g(&self, o: &FrameVector) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            s += 4.0 / 3.0 * (self.e[i] * o.e[i] + self.f[i] * o.f[i])
                - 2.0 / 3.0 * (self.e[i] * o.f[i] + o.e[i] * self.f[i]);
        }
        s
    }

    pub fn at(self, base: Point) -> Tangent {
        Tangent::from_frame(base, self)
    }
}

impl Index<usize> for FrameVector {
    type Output = f64;
    fn index(&self, a: usize) -> &f64 {
        if a < 3 {
            &self.e[a]
        } else {
            &self.f[a - 3]
        }
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        let (a, b) = (self.as_array(), o.as_array());
        FrameVector::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        self + o.scale(-1.0)
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for FrameVector {
    type Output = FrameVector;
    fn mul(self, s: f64) -> FrameVector {
        self.scale(s)
    }
}

/// Coefficients of the unit imaginary directions used by the frame: `i`, `j`, `-k`.
fn frame_coeffs(v: Vec3) -> [f64; 3] {
    [v.x, v.y, -v.z]
}

fn frame_vec3(c: [f64; 3]) -> Vec3 {
    Vec3::new(c[0], c[1], -c[2])
}

/// A tangent vector `Z = (U, V)` at `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub base: Point,
    pub u: Quaternion,
    pub v: Quaternion,
}

impl Tangent {
    /// Checks `⟨U, p⟩ = ⟨V, q⟩ = 0` within [`TANGENCY_TOL`].
    pub fn new(base: Point, u: Quaternion, v: Quaternion) -> Result<Self, GeometryError> {
        let normal = u.dot(base.p.get()).abs().max(v.dot(base.q.get()).abs());
        if !(normal <= TANGENCY_TOL) {
            return Err(GeometryError::NotTangent { normal });
        }
        Ok(Tangent { base, u, v })
    }

    /// Removes the normal components of `(u, v)`; also returns their largest magnitude.
    pub fn project(base: Point, u: Quaternion, v: Quaternion) -> (Self, f64) {
        let (p, q) = (base.p.get(), base.q.get());
        let (nu, nv) = (u.dot(p), v.dot(q));
        let t = Tangent { base, u: u - p * nu, v: v - q * nv };
        (t, nu.abs().max(nv.abs()))
    }

    /// `(p a, q b)` for imaginary `a`, `b`.
    pub fn from_left(base: Point, a: Vec3, b: Vec3) -> Self {
        Tangent {
            base,
            u: base.p.get() * Quaternion::pure(a),
            v: base.q.get() * Quaternion::pure(b),
        }
    }

    pub fn zero(base: Point) -> Self {
        Tangent { base, u: Quaternion::ZERO, v: Quaternion::ZERO }
    }

    /// Left-trivialized components `(p⁻¹U, q⁻¹V)`.
    pub fn left(&self) -> (Quaternion, Quaternion) {
        (self.base.p.inverse().get() * self.u, self.base.q.inverse().get() * self.v)
    }

    pub fn from_frame(base: Point, c: FrameVector) -> Self {
        Tangent::from_left(base, frame_vec3(c.e), frame_vec3(c.f))
    }

    pub fn to_frame(&self) -> FrameVector {
        let (a, b) = self.left();
        FrameVector::new(frame_coeffs(a.imag()), frame_coeffs(b.imag()))
    }

    /// Product-metric inner product `⟨Z, Z'⟩` on ℝ⁴×ℝ⁴.
    pub fn euclidean(&self, o: &Tangent) -> f64 {
        self.u.dot(o.u) + self.v.dot(o.v)
    }

    /// Ambient ℝ⁸ norm of the difference, for residuals.
    pub fn distance(&self, o: &Tangent) -> f64 {
        ((self.u - o.u).norm_sq() + (self.v - o.v).norm_sq()).sqrt()
    }

    pub fn norm_euclid(&self) -> f64 {
        self.euclidean(self).sqrt()
    }

    pub fn g_norm(&self) -> f64 {
        metric_g_unchecked(self, self).max(0.0).sqrt()
    }

    pub fn scale(self, s: f64) -> Tangent {
        Tangent { base: self.base, u: self.u * s, v: self.v * s }
    }
}

/// Componentwise sum; the base point of `self` is kept.
impl Add for Tangent {
    type Output = Tangent;
    fn add(self, o: Tangent) -> Tangent {
        Tangent { base: self.base, u: self.u + o.u, v: self.v + o.v }
    }
}

impl Sub for Tangent {
    type Output = Tangent;
    fn sub(self, o: Tangent) -> Tangent {
        Tangent { base: self.base, u: self.u - o.u, v: self.v - o.v }
    }
}

impl Neg for Tangent {
    type Output = Tangent;
    fn neg(self) -> Tangent {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Tangent {
    type Output = Tangent;
    fn mul(self, s: f64) -> Tangent {
        self.scale(s)
    }
}

/// `E₁, E₂, E₃, F₁, F₂, F₃` at `point`.
pub fn frame(point: Point) -> [Tangent; 6] {
    let (p, q) = (point.p.get(), point.q.get());
    let dirs = [Quaternion::I, Quaternion::J, -Quaternion::K];
    std::array::from_fn(|a| {
        if a < 3 {
            Tangent { base: point, u: p * dirs[a], v: Quaternion::ZERO }
        } else {
            Tangent { base: point, u: Quaternion::ZERO, v: q * dirs[a - 3] }
        }
    })
}

/// `JZ = (2pq⁻¹V - U, -2qp⁻¹U + V)/√3`.
pub fn apply_j(z: &Tangent) -> Tangent {
    let (p, q) = (z.base.p.get(), z.base.q.get());
    let pq = p * q.conj();
    let qp = q * p.conj();
    Tangent {
        base: z.base,
        u: (pq * z.v * 2.0 - z.u) * (1.0 / SQRT3),
        v: (qp * z.u * (-2.0) + z.v) * (1.0 / SQRT3),
    }
}

/// `PZ = (pq⁻¹V, qp⁻¹U)`.
pub fn apply_p(z: &Tangent) -> Tangent {
    let (p, q) = (z.base.p.get(), z.base.q.get());
    Tangent { base: z.base, u: p * q.conj() * z.v, v: q * p.conj() * z.u }
}

/// The product structure `Q(U, V) = (-U, V)`.
pub fn apply_q(z: &Tangent) -> Tangent {
    Tangent { base: z.base, u: -z.u, v: z.v }
}

/// `g(Z, Z') = 4/3(⟨U,U'⟩ + ⟨V,V'⟩) - 2/3(⟨p⁻¹U, q⁻¹V'⟩ + ⟨p⁻¹U', q⁻¹V⟩)`.
pub fn metric_g(z: &Tangent, w: &Tangent) -> Result<f64, GeometryError> {
    z.base.check_same(&w.base)?;
    Ok(metric_g_unchecked(z, w))
}

pub(crate) fn metric_g_unchecked(z: &Tangent, w: &Tangent) -> f64 {
    let (pz, qz) = z.left();
    let (pw, qw) = w.left();
    4.0 / 3.0 * (z.u.dot(w.u) + z.v.dot(w.v)) - 2.0 / 3.0 * (pz.dot(qw) + pw.dot(qz))
}

/// `g` through its Hermitian form `½(⟨Z,Z'⟩ + ⟨JZ,JZ'⟩)`.
pub fn metric_g_hermitian(z: &Tangent, w: &Tangent) -> Result<f64, GeometryError> {
    z.base.check_same(&w.base)?;
    Ok(0.5 * (z.euclidean(w) + apply_j(z).euclidean(&apply_j(w))))
}

/// Which pair of frame families a connection coefficient relates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FramePair {
    EE,
    EF,
    FE,
    FF,
}

/// `∇̃_{A_i} B_j` for the frame families selected by `kind` (zero-based `i`, `j`).
pub fn conn_frame(i: usize, j: usize, kind: FramePair) -> FrameVector {
    let third = 1.0 / 3.0;
    match kind {
        FramePair::EE => FrameVector::eps_combo(i, j, -1.0, 0.0),
        FramePair::EF => FrameVector::eps_combo(i, j, third, -third),
        FramePair::FE => FrameVector::eps_combo(i, j, -third, third),
        FramePair::FF => FrameVector::eps_combo(i, j, 0.0, -1.0),
    }
}

fn split(a: usize) -> (bool, usize) {
    (a < 3, a % 3)
}

fn pair(a: usize, b: usize) -> (FramePair, usize, usize) {
    let ((ea, i), (eb, j)) = (split(a), split(b));
    let kind = match (ea, eb) {
        (true, true) => FramePair::EE,
        (true, false) => FramePair::EF,
        (false, true) => FramePair::FE,
        (false, false) => FramePair::FF,
    };
    (kind, i, j)
}

/// `∇̃_{B_a} B_b` over the six frame indices.
pub fn connection(a: usize, b: usize) -> FrameVector {
    let (kind, i, j) = pair(a, b);
    conn_frame(i, j, kind)
}

/// `∇̃_X Y` for `Y` with constant frame coefficients.
pub fn conn_constant(x: &FrameVector, y: &FrameVector) -> FrameVector {
    bilinear(x, y, connection)
}

fn bilinear(x: &FrameVector, y: &FrameVector, table: impl Fn(usize, usize) -> FrameVector) -> FrameVector {
    let mut out = FrameVector::ZERO;
    for a in 0..6 {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..6 {
            if y[b] == 0.0 {
                continue;
            }
            out = out + table(a, b) * (x[a] * y[b]);
        }
    }
    out
}

/// Lie bracket of frame fields: `[E_i,E_j] = -2ε_{ijk}E_k`, likewise for `F`, `[E_i,F_j] = 0`.
pub fn frame_bracket(a: usize, b: usize) -> FrameVector {
    let (kind, i, j) = pair(a, b);
    match kind {
        FramePair::EE => FrameVector::eps_combo(i, j, -2.0, 0.0),
        FramePair::FF => FrameVector::eps_combo(i, j, 0.0, -2.0),
        _ => FrameVector::ZERO,
    }
}

/// Frame table of `G = ∇̃J`.
pub fn g_table(a: usize, b: usize) -> FrameVector {
    let c = 2.0 / (3.0 * SQRT3);
    let (kind, i, j) = pair(a, b);
    match kind {
        FramePair::EE => FrameVector::eps_combo(i, j, -c, -2.0 * c),
        FramePair::EF | FramePair::FE => FrameVector::eps_combo(i, j, -c, c),
        FramePair::FF => FrameVector::eps_combo(i, j, 2.0 * c, c),
    }
}

/// Frame table of `H = ∇̃P`.
pub fn h_table(a: usize, b: usize) -> FrameVector {
    let t = 1.0 / 3.0;
    let (kind, i, j) = pair(a, b);
    match kind {
        FramePair::EE => FrameVector::eps_combo(i, j, t, 2.0 * t),
        FramePair::EF => FrameVector::eps_combo(i, j, -2.0 * t, -t),
        FramePair::FE => FrameVector::eps_combo(i, j, -t, -2.0 * t),
        FramePair::FF => FrameVector::eps_combo(i, j, 2.0 * t, t),
    }
}

pub fn tensor_g_frame(x: &FrameVector, y: &FrameVector) -> FrameVector {
    bilinear(x, y, g_table)
}

pub fn tensor_h_frame(x: &FrameVector, y: &FrameVector) -> FrameVector {
    bilinear(x, y, h_table)
}

/// `G(X, Y) = (∇̃_X J)Y`.
pub fn tensor_g(x: &Tangent, y: &Tangent) -> Result<Tangent, GeometryError> {
    x.base.check_same(&y.base)?;
    Ok(tensor_g_frame(&x.to_frame(), &y.to_frame()).at(x.base))
}

/// `H(X, Y) = (∇̃_X P)Y`.
pub fn tensor_h(x: &Tangent, y: &Tangent) -> Result<Tangent, GeometryError> {
    x.base.check_same(&y.base)?;
    Ok(tensor_h_frame(&x.to_frame(), &y.to_frame()).at(x.base))
}

/// Closed-form curvature tensor `R̃(X, Y)W`.
pub fn curvature_r(x: &Tangent, y: &Tangent, w: &Tangent) -> Result<Tangent, GeometryError> {
    x.base.check_same(&y.base)?;
    x.base.check_same(&w.base)?;
    let g = metric_g_unchecked;
    let (jx, jy, jw) = (apply_j(x), apply_j(y), apply_j(w));
    let (px, py) = (apply_p(x), apply_p(y));
    let (jpx, jpy) = (apply_j(&px), apply_j(&py));
    let r = (*x * g(y, w) - *y * g(x, w)) * (5.0 / 12.0)
        + (jx * g(&jy, w) - jy * g(&jx, w) - jw * (2.0 * g(&jx, y))) * (1.0 / 12.0)
        + (px * g(&py, w) - py * g(&px, w) + jpx * g(&jpy, w) - jpy * g(&jpx, w)) * (1.0 / 3.0);
    Ok(r)
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature(x: &Tangent, y: &Tangent) -> Result<f64, GeometryError> {
    let r = curvature_r(x, y, y)?;
    let g = metric_g_unchecked;
    let area = g(x, x) * g(y, y) - g(x, y).powi(2);
    Ok(g(&r, x) / area)
}

/// Default central-difference step for [`covariant_derivative`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// `∇̃_X Y` for a vector field `Y` given as a closure.
///
/// Expands `Y = c_a B_a` over the frame; `X(c_a)` is a central difference along
/// the left-invariant curve through `X.base` with initial velocity `X`.
pub fn covariant_derivative<F>(field: F, x: &Tangent, h: f64) -> Result<Tangent, GeometryError>
where
    F: Fn(&Point) -> Result<Tangent, GeometryError>,
{
    let base = x.base;
    let c0 = field(&base)?;
    base.check_same(&c0.base)?;
    let (a, b) = x.left();
    let (a, b) = (a.imag(), b.imag());
    let plus = field(&base.flow(a, b, h))?.to_frame();
    let minus = field(&base.flow(a, b, -h))?.to_frame();
    let dc = (plus - minus) * (0.5 / h);
    Ok(leibniz(&x.to_frame(), &c0.to_frame(), &dc).at(base))
}

/// `X(c_a) B_a + c_a ∇̃_X B_a`, given the directional derivative `dc` of the coefficients.
pub fn leibniz(x: &FrameVector, c: &FrameVector, dc: &FrameVector) -> FrameVector {
    *dc + conn_constant(x, c)
}

/// `∇̄_X Y = ∇̃_X Y + ½G(X, JY)`.
pub fn hermitian_connection<F>(field: F, x: &Tangent, h: f64) -> Result<Tangent, GeometryError>
where
    F: Fn(&Point) -> Result<Tangent, GeometryError>,
{
    let y = field(&x.base)?;
    let lc = covariant_derivative(field, x, h)?;
    Ok(lc + tensor_g(x, &apply_j(&y))? * 0.5)
}

/// `∇̄_X Y` for `Y` with constant frame coefficients.
pub fn hermitian_constant(x: &FrameVector, y: &FrameVector) -> FrameVector {
    conn_constant(x, y) + tensor_g_frame(x, &y.j()) * 0.5
}

/// `(∇̃G)(X, Y, Z)` by exact Leibniz expansion over constant-coefficient fields.
pub fn nabla_g_frame(x: &FrameVector, y: &FrameVector, z: &FrameVector) -> FrameVector {
    conn_constant(x, &tensor_g_frame(y, z))
        - tensor_g_frame(&conn_constant(x, y), z)
        - tensor_g_frame(y, &conn_constant(x, z))
}

/// The isometry `(p, q) ↦ (apc⁻¹, bqc⁻¹)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub a: UnitQuaternion,
    pub b: UnitQuaternion,
    pub c: UnitQuaternion,
}

impl Isometry {
    pub fn new(a: Quaternion, b: Quaternion, c: Quaternion) -> Result<Self, GeometryError> {
        Ok(Isometry {
            a: UnitQuaternion::new(a)?,
            b: UnitQuaternion::new(b)?,
            c: UnitQuaternion::new(c)?,
        })
    }

    pub fn from_units(a: UnitQuaternion, b: UnitQuaternion, c: UnitQuaternion) -> Self {
        Isometry { a, b, c }
    }

    pub fn apply(&self, x: &Point) -> Point {
        let ci = self.c.inverse();
        Point::new(self.a.compose(x.p).compose(ci), self.b.compose(x.q).compose(ci))
    }

    /// Differential: `(U, V) ↦ (aUc⁻¹, bVc⁻¹)`.
    pub fn push_forward(&self, z: &Tangent) -> Tangent {
        let ci = self.c.inverse().get();
        Tangent {
            base: self.apply(&z.base),
            u: self.a.get() * z.u * ci,
            v: self.b.get() * z.v * ci,
        }
    }
}
