//! Seeded random sampling of points and tangent vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::nkspace::{Point, Tangent};
use crate::quat::{Quaternion, UnitQuaternion, Vec3};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on S³.
    pub fn unit_quaternion(&mut self) -> UnitQuaternion {
        loop {
            let q = Quaternion::new(self.normal(), self.normal(), self.normal(), self.normal());
            if q.norm() > 1e-6 {
                return UnitQuaternion::normalize(q).expect("nonzero");
            }
        }
    }

    /// Standard Gaussian vector.
    pub fn vec3(&mut self) -> Vec3 {
        Vec3::new(self.normal(), self.normal(), self.normal())
    }

    pub fn point(&mut self) -> Point {
        Point::new(self.unit_quaternion(), self.unit_quaternion())
    }

    pub fn tangent_at(&mut self, base: Point) -> Tangent {
        let (a, b) = (self.vec3(), self.vec3());
        Tangent::from_left(base, a, b)
    }

    pub fn tangent(&mut self) -> Tangent {
        let base = self.point();
        self.tangent_at(base)
    }
}
