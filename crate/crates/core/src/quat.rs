//! Quaternion and imaginary-quaternion algebra.
//!
//! Basis order is `(1, i, j, k)` with Hamilton multiplication, so `ij = k`,
//! `jk = i` and `ki = j`. Imaginary quaternions double as vectors of ℝ³.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::QuatError;

/// Tolerance on `| |q| - 1 |` accepted by [`UnitQuaternion::new`] before renormalizing.
pub const UNIT_ACCEPT_TOL: f64 = 1e-6;

/// Tolerance on `| |q| - 1 |` accepted by [`qinv`].
pub const INVERSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn pure(v: Vec3) -> Self {
        Quaternion::new(0.0, v.x, v.y, v.z)
    }

    pub fn real(self) -> f64 {
        self.w
    }

    /// Imaginary part as a vector of ℝ³.
    pub fn imag(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product on ℝ⁴.
    pub fn dot(self, other: Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Exponential of an imaginary quaternion, `exp(v) = cos|v| + sin|v| v/|v|`.
    pub fn exp_pure(v: Vec3) -> UnitQuaternion {
        let angle = v.norm();
        let sinc = if angle < 1e-8 {
            1.0 - angle * angle / 6.0
        } else {
            angle.sin() / angle
        };
        UnitQuaternion::from_raw(Quaternion::new(
            angle.cos(),
            v.x * sinc,
            v.y * sinc,
            v.z * sinc,
        ))
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

/// Free-function form of the Hamilton product.
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// Inverse of a quaternion that must already be unit length (within [`INVERSE_TOL`]).
pub fn qinv(q: Quaternion) -> Result<Quaternion, QuatError> {
    let n = q.norm();
    if !q.is_finite() || (n - 1.0).abs() > INVERSE_TOL {
        return Err(QuatError::NotUnit { norm: n });
    }
    Ok(q.conj())
}

/// Splits the product of two imaginary quaternions, `xy = -x·y + x×y`,
/// returning `(x·y, x×y)`.
pub fn im_split(x: Vec3, y: Vec3) -> (f64, Vec3) {
    (x.dot(y), x.cross(y))
}

/// A quaternion of unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Quaternion", try_from = "Quaternion")]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const ONE: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Renormalizes `q`; rejects it if its norm is off by more than [`UNIT_ACCEPT_TOL`].
    pub fn new(q: Quaternion) -> Result<Self, QuatError> {
        let n = q.norm();
        if !q.is_finite() || (n - 1.0).abs() > UNIT_ACCEPT_TOL {
            return Err(QuatError::NotUnit { norm: n });
        }
        if (n - 1.0).abs() <= 2.0 * f64::EPSILON {
            return Ok(UnitQuaternion(q));
        }
        Ok(UnitQuaternion(q.scale(1.0 / n)))
    }

    /// Normalizes any nonzero finite quaternion.
    pub fn normalize(q: Quaternion) -> Result<Self, QuatError> {
        let n = q.norm();
        if !q.is_finite() || n < 1e-300 {
            return Err(QuatError::NotUnit { norm: n });
        }
        Ok(UnitQuaternion(q.scale(1.0 / n)))
    }

    // Callers guarantee |q| = 1 up to roundoff.
    pub(crate) fn from_raw(q: Quaternion) -> Self {
        UnitQuaternion(q)
    }

    pub fn get(self) -> Quaternion {
        self.0
    }

    pub fn inverse(self) -> UnitQuaternion {
        UnitQuaternion(self.0.conj())
    }

    /// Product of unit quaternions, renormalized against drift.
    pub fn compose(self, other: UnitQuaternion) -> UnitQuaternion {
        let q = self.0 * other.0;
        UnitQuaternion(q.scale(1.0 / q.norm()))
    }

    /// Conjugation action `v ↦ q v q⁻¹` on ℝ³.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        (self.0 * Quaternion::pure(v) * self.0.conj()).imag()
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(q: UnitQuaternion) -> Quaternion {
        q.0
    }
}

impl TryFrom<Quaternion> for UnitQuaternion {
    type Error = QuatError;
    fn try_from(q: Quaternion) -> Result<Self, QuatError> {
        UnitQuaternion::new(q)
    }
}

/// A vector of ℝ³, identified with the imaginary quaternion `xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<Vec3> for Quaternion {
    fn from(v: Vec3) -> Quaternion {
        Quaternion::pure(v)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.scale(s)
    }
}
