//! Rigid transforms and oriented 3D boxes.

use nalgebra::{Matrix3, Matrix4, Point3, UnitQuaternion, Vector3};
use thiserror::Error;

/// Orthonormality and composition tolerance for rotations.
const ROTATION_TOL: f64 = 1e-9;

/// Default slack for box membership of surface points, in meters.
pub const BOX_EPSILON: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("rotation matrix is not orthonormal (max |R^T R - I| = {0})")]
    NotOrthonormal(f64),
    #[error("rotation matrix determinant {0} is not +1")]
    NotProperRotation(f64),
    #[error("half extents {0:?} must be strictly positive")]
    BadHalfExtents([f64; 3]),
}

/// A proper rigid motion: `p' = R p + t`.
///
/// Which frames it maps between is up to the caller; calibration loading
/// normalises everything to sensor-to-world (see [`crate::calib`]).
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Validates orthonormality (within 1e-9) and a +1 determinant.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        let residual = rotation.transpose() * rotation - Matrix3::identity();
        let max_residual = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_residual > ROTATION_TOL {
            return Err(GeometryError::NotOrthonormal(max_residual));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(GeometryError::NotProperRotation(det));
        }
        Ok(Self { rotation, translation })
    }

    pub fn from_quaternion(q: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation: q.to_rotation_matrix().into_inner(),
            translation,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    /// Builds from a 4x4 homogeneous matrix (rotation validated).
    pub fn from_matrix4(m: &Matrix4<f64>) -> Result<Self, GeometryError> {
        let rotation = m.fixed_view::<3, 3>(0, 0).into_owned();
        let translation = m.fixed_view::<3, 1>(0, 3).into_owned();
        Self::new(rotation, translation)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    #[inline]
    pub fn transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    #[inline]
    pub fn rotate_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    /// `self` after `other`: `(self * other)(p) = self(other(p))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let rotation = self.rotation.transpose();
        Self {
            rotation,
            translation: -(rotation * self.translation),
        }
    }
}

/// A 3D bounding box with arbitrary orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedBox3D {
    pub object_id: u32,
    pub class_id: u8,
    pub center: Point3<f64>,
    half_extents: Vector3<f64>,
    /// Box-to-world rotation: columns are the box axes in world coordinates.
    rotation: Matrix3<f64>,
}

impl OrientedBox3D {
    pub fn new(
        object_id: u32,
        class_id: u8,
        center: Point3<f64>,
        half_extents: Vector3<f64>,
        rotation: Matrix3<f64>,
    ) -> Result<Self, GeometryError> {
        if !(half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0) {
            return Err(GeometryError::BadHalfExtents(half_extents.into()));
        }
        // Reuse the rotation checks.
        RigidTransform::new(rotation, Vector3::zeros())?;
        Ok(Self { object_id, class_id, center, half_extents, rotation })
    }

    pub fn half_extents(&self) -> &Vector3<f64> {
        &self.half_extents
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }

    /// Six-plane membership test: the point expressed in the box frame must
    /// lie between each pair of parallel faces, with slack `epsilon` to keep
    /// surface points generated from the object's own depth inside.
    pub fn contains(&self, point: &Point3<f64>, epsilon: f64) -> bool {
        let local = self.rotation.transpose() * (point - self.center);
        local.x.abs() <= self.half_extents.x + epsilon
            && local.y.abs() <= self.half_extents.y + epsilon
            && local.z.abs() <= self.half_extents.z + epsilon
    }
}

/// Membership with the default epsilon of [`BOX_EPSILON`].
pub fn point_in_box(point: &Point3<f64>, b: &OrientedBox3D) -> bool {
    b.contains(point, BOX_EPSILON)
}
