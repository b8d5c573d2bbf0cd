//! Small geometric vocabulary used across the crate.

use crate::error::{CoreError, Result};

/// 3D vector in meters.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
/// 3D point in meters.
pub type Point3 = nalgebra::Point3<f64>;

/// Tolerance for the orthonormality / determinant check on rotations.
const ROTATION_TOL: f64 = 1e-9;

/// A rigid-body transform `p' = R p + t`.
///
/// The rotation is checked to be orthonormal with determinant +1 on
/// construction, so inverses never need a matrix solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl RigidTransform {
    /// Builds a transform, validating that `rotation` is a proper rotation.
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self> {
        let gram = rotation.transpose() * rotation;
        let ortho_err = (gram - Mat3::identity()).abs().max();
        if ortho_err > ROTATION_TOL {
            return Err(CoreError::InvalidArgument(format!(
                "rotation is not orthonormal (error {ortho_err:.3e})"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(CoreError::InvalidArgument(format!(
                "rotation determinant is {det:.9}, expected +1"
            )));
        }
        Ok(RigidTransform {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        RigidTransform {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    /// Rotation about the x axis (radians).
    pub fn rotation_x(angle: f64) -> Mat3 {
        nalgebra::Rotation3::from_axis_angle(&Vec3::x_axis(), angle).into_inner()
    }

    /// Rotation about the y axis (radians).
    pub fn rotation_y(angle: f64) -> Mat3 {
        nalgebra::Rotation3::from_axis_angle(&Vec3::y_axis(), angle).into_inner()
    }

    /// Rotation about the z axis (radians).
    pub fn rotation_z(angle: f64) -> Mat3 {
        nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), angle).into_inner()
    }

    pub fn transform_point(&self, p: &Point3) -> Point3 {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn rotate_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// Inverse transform; exact because the rotation is orthonormal.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}
