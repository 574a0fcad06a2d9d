//! Minimal 3-D geometry: vectors, unit quaternions, and axis-angle
//! rotation vectors.
//!
//! Quaternions are stored in `(w, x, y, z)` order and sign-canonicalized to
//! `w >= 0` on construction, so `q` and `-q` collapse to one representative
//! of the underlying rotation.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance within which an ingested quaternion must be unit-norm.
pub const UNIT_NORM_TOL: f64 = 1e-6;

/// A 3-vector of `f64`, serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for (near-)zero input.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n <= f64::EPSILON {
            None
        } else {
            Some(self / n)
        }
    }

    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Some unit vector orthogonal to `self`; `self` need not be unit length.
    pub fn any_perpendicular(self) -> Vec3 {
        let axis = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Vec3::new(1.0, 0.0, 0.0)
        } else if self.y.abs() <= self.z.abs() {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        self.cross(axis)
            .normalized()
            .unwrap_or(Vec3::new(0.0, 0.0, 1.0))
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
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
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// An axis-angle rotation vector; the direction is the rotation axis and the
/// magnitude the angle in radians. Canonical values have magnitude `<= pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationVector(pub Vec3);

impl RotationVector {
    pub fn angle(self) -> f64 {
        self.0.norm()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

/// A unit quaternion in `(w, x, y, z)` order representing a 3-D rotation.
///
/// Constructors normalize and canonicalize the sign, so every value of this
/// type is unit-norm with `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct UnitQuat {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl UnitQuat {
    pub const IDENTITY: UnitQuat = UnitQuat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Builds a unit quaternion from raw components.
    ///
    /// The norm must be within [`UNIT_NORM_TOL`] of 1; the stored value is
    /// exactly normalized and sign-canonicalized.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidRotation {
                norm,
                tol: UNIT_NORM_TOL,
            });
        }
        // Already-normalized input passes through bit-exactly, so ingestion
        // round-trips serialized quaternions.
        let q = if (norm - 1.0).abs() <= 8.0 * f64::EPSILON {
            UnitQuat { w, x, y, z }
        } else {
            UnitQuat {
                w: w / norm,
                x: x / norm,
                y: y / norm,
                z: z / norm,
            }
        };
        Ok(q.canonicalized())
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        match axis.normalized() {
            Some(u) => {
                let half = 0.5 * angle;
                let s = half.sin();
                UnitQuat {
                    w: half.cos(),
                    x: u.x * s,
                    y: u.y * s,
                    z: u.z * s,
                }
                .renormalized()
                .canonicalized()
            }
            None => UnitQuat::IDENTITY,
        }
    }

    pub fn components(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn w(self) -> f64 {
        self.w
    }

    fn vector_part(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn renormalized(self) -> Self {
        let n = self.norm();
        UnitQuat {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    fn canonicalized(self) -> Self {
        // w >= 0; for w == 0 pick the branch whose first nonzero vector
        // component is positive so antipodal pairs still collapse.
        let flip = if self.w != 0.0 {
            self.w < 0.0
        } else if self.x != 0.0 {
            self.x < 0.0
        } else if self.y != 0.0 {
            self.y < 0.0
        } else {
            self.z < 0.0
        };
        if flip {
            UnitQuat {
                w: -self.w,
                x: -self.x,
                y: -self.y,
                z: -self.z,
            }
        } else {
            self
        }
    }

    pub fn conjugate(self) -> Self {
        UnitQuat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn dot(self, o: UnitQuat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Hamilton product without sign canonicalization, used where the raw
    /// relative quaternion is needed.
    fn compose(self, o: UnitQuat) -> UnitQuat {
        UnitQuat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
        .renormalized()
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        // q v q* via the expanded Rodrigues form.
        let u = self.vector_part();
        let uv = u.cross(v);
        v + (uv * self.w + u.cross(uv)) * 2.0
    }

    /// Geodesic angle to `other` in `[0, pi]`, symmetric and invariant under
    /// the quaternion double cover.
    pub fn geodesic_angle(self, other: UnitQuat) -> f64 {
        let rel = self.conjugate().compose(other);
        2.0 * rel.vector_part().norm().atan2(rel.w.abs())
    }

    /// Logarithm map onto the canonical axis-angle branch (angle `<= pi`).
    pub fn to_rotation_vector(self) -> RotationVector {
        let q = self.canonicalized();
        let v = q.vector_part();
        let s = v.norm();
        let angle = 2.0 * s.atan2(q.w);
        if s < 1e-12 {
            // sin(theta/2) ~ theta/2 for small angles.
            RotationVector(v * 2.0)
        } else {
            RotationVector(v * (angle / s))
        }
    }

    /// Exponential map; inverse of [`UnitQuat::to_rotation_vector`] for
    /// magnitudes below pi.
    pub fn from_rotation_vector(rv: RotationVector) -> Self {
        let angle = rv.angle();
        if angle < 1e-12 {
            let v = rv.0 * 0.5;
            UnitQuat {
                w: 1.0,
                x: v.x,
                y: v.y,
                z: v.z,
            }
            .renormalized()
            .canonicalized()
        } else {
            UnitQuat::from_axis_angle(rv.0, angle)
        }
    }

    /// Spherical linear interpolation along the shorter arc.
    pub fn slerp(self, other: UnitQuat, t: f64) -> UnitQuat {
        let mut d = self.dot(other);
        let mut sign = 1.0;
        if d < 0.0 {
            d = -d;
            sign = -1.0;
        }
        let d = d.min(1.0);
        if d > 1.0 - 1e-12 {
            // Nearly parallel: normalized lerp is exact to fp precision.
            let q = UnitQuat {
                w: self.w + (sign * other.w - self.w) * t,
                x: self.x + (sign * other.x - self.x) * t,
                y: self.y + (sign * other.y - self.y) * t,
                z: self.z + (sign * other.z - self.z) * t,
            };
            return q.renormalized().canonicalized();
        }
        let theta = d.acos();
        let sin_theta = theta.sin();
        let a = ((1.0 - t) * theta).sin() / sin_theta;
        let b = (t * theta).sin() / sin_theta * sign;
        UnitQuat {
            w: a * self.w + b * other.w,
            x: a * self.x + b * other.x,
            y: a * self.y + b * other.y,
            z: a * self.z + b * other.z,
        }
        .renormalized()
        .canonicalized()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Mul for UnitQuat {
    type Output = UnitQuat;
    fn mul(self, o: UnitQuat) -> UnitQuat {
        self.compose(o).canonicalized()
    }
}

impl TryFrom<[f64; 4]> for UnitQuat {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        UnitQuat::new(a[0], a[1], a[2], a[3])
    }
}

impl From<UnitQuat> for [f64; 4] {
    fn from(q: UnitQuat) -> Self {
        q.components()
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_unit_quat(rng: &mut impl Rng) -> UnitQuat {
        loop {
            let raw = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.1 {
                return UnitQuat::new(raw[0] / n, raw[1] / n, raw[2] / n, raw[3] / n).unwrap();
            }
        }
    }

    #[test]
    fn rejects_non_unit_quaternion() {
        let err = UnitQuat::new(1.0, 1.0, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidRotation { .. }));
    }

    #[test]
    fn canonicalizes_sign_on_ingestion() {
        let q = UnitQuat::new(-1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(q.components(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn geodesic_angle_identity_is_zero() {
        let q = UnitQuat::from_axis_angle(Vec3::new(0.3, -0.2, 0.9), 0.7);
        assert_abs_diff_eq!(q.geodesic_angle(q), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn geodesic_angle_quarter_turn() {
        let q = UnitQuat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2);
        assert_abs_diff_eq!(
            UnitQuat::IDENTITY.geodesic_angle(q),
            FRAC_PI_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn geodesic_angle_double_cover() {
        let q = random_unit_quat(&mut ChaCha8Rng::seed_from_u64(3));
        let [w, x, y, z] = q.components();
        let neg = UnitQuat::new(-w, -x, -y, -z).unwrap();
        assert_abs_diff_eq!(q.geodesic_angle(neg), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn geodesic_angle_symmetric_and_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_unit_quat(&mut rng);
            let b = random_unit_quat(&mut rng);
            let c = random_unit_quat(&mut rng);
            assert_abs_diff_eq!(a.geodesic_angle(b), b.geodesic_angle(a), epsilon = 1e-12);
            assert!(a.geodesic_angle(c) <= a.geodesic_angle(b) + b.geodesic_angle(c) + 1e-9);
        }
    }

    #[test]
    fn rotation_vector_identity_and_quarter_turn() {
        assert_eq!(UnitQuat::IDENTITY.to_rotation_vector().0, Vec3::ZERO);
        let q = UnitQuat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2);
        let rv = q.to_rotation_vector();
        assert_abs_diff_eq!(rv.0.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rv.0.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rv.0.z, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn rotation_vector_round_trip_1000_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let q = random_unit_quat(&mut rng);
            let rv = q.to_rotation_vector();
            assert!(rv.angle() <= PI + 1e-12);
            let back = UnitQuat::from_rotation_vector(rv);
            assert!(q.geodesic_angle(back) < 1e-9);
        }
    }

    #[test]
    fn slerp_midpoint_bisects() {
        let a = UnitQuat::IDENTITY;
        let b = UnitQuat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2);
        let mid = a.slerp(b, 0.5);
        assert_abs_diff_eq!(a.geodesic_angle(mid), FRAC_PI_2 / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.geodesic_angle(b), FRAC_PI_2 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rotate_matches_axis_angle() {
        let q = UnitQuat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), FRAC_PI_2);
        let v = q.rotate(Vec3::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.y, 1.0, epsilon = 1e-12);
    }
}
