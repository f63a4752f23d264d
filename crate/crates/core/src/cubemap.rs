//! Five-face cubemap geometry.
//!
//! A forward-looking lens with up to a 190-degree field of view never needs
//! the back face, so the cube is represented by the five faces front, left,
//! right, up and down. Each face is the pinhole render of a camera sharing
//! the fisheye's optical centre, rotated by a pure yaw (left/right) or pitch
//! (up/down) of 90 degrees, with a 90-degree field of view.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::raster::Raster;

pub const FACE_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Face {
    Front = 0,
    Left = 1,
    Right = 2,
    Up = 3,
    Down = 4,
}

pub const ALL_FACES: [Face; FACE_COUNT] = [Face::Front, Face::Left, Face::Right, Face::Up, Face::Down];

impl Face {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: u8) -> Option<Face> {
        ALL_FACES.get(i as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::Front => "front",
            Face::Left => "left",
            Face::Right => "right",
            Face::Up => "up",
            Face::Down => "down",
        }
    }

    pub fn from_name(name: &str) -> Option<Face> {
        ALL_FACES.iter().copied().find(|f| f.name() == name)
    }

    /// Outward axis of the face in the fisheye camera frame
    /// (+Z optical axis, +X right, +Y down; "up" looks along -Y).
    pub fn axis(self) -> Vector3<f64> {
        match self {
            Face::Front => Vector3::new(0.0, 0.0, 1.0),
            Face::Left => Vector3::new(-1.0, 0.0, 0.0),
            Face::Right => Vector3::new(1.0, 0.0, 0.0),
            Face::Up => Vector3::new(0.0, -1.0, 0.0),
            Face::Down => Vector3::new(0.0, 1.0, 0.0),
        }
    }

    /// Rotation from the face camera frame to the fisheye camera frame.
    /// Columns are the face camera's +X/+Y/+Z axes expressed in the fisheye
    /// frame; +Z is [`Face::axis`].
    pub fn to_camera(self) -> Matrix3<f64> {
        let (x, y, z) = match self {
            Face::Front => (Vector3::x(), Vector3::y(), Vector3::z()),
            // Pure yaw by -90/+90 degrees keeps +Y (image down) shared.
            Face::Left => (Vector3::z(), Vector3::y(), -Vector3::x()),
            Face::Right => (-Vector3::z(), Vector3::y(), Vector3::x()),
            // Pure pitch by +-90 degrees keeps +X (image right) shared.
            Face::Up => (Vector3::x(), Vector3::z(), -Vector3::y()),
            Face::Down => (Vector3::x(), -Vector3::z(), Vector3::y()),
        };
        Matrix3::from_columns(&[x, y, z])
    }

    /// Face whose axis has the largest-magnitude component of `dir`.
    ///
    /// `None` when that component is -Z: the missing back face. That cannot
    /// happen for directions within a five-face coverable angle range (see
    /// [`max_coverable_theta`]).
    pub fn select(dir: &Vector3<f64>) -> Option<Face> {
        let (ax, ay, az) = (dir.x.abs(), dir.y.abs(), dir.z.abs());
        if az >= ax && az >= ay {
            (dir.z >= 0.0).then_some(Face::Front)
        } else if ax >= ay {
            Some(if dir.x >= 0.0 { Face::Right } else { Face::Left })
        } else {
            Some(if dir.y >= 0.0 { Face::Down } else { Face::Up })
        }
    }
}

/// Largest half-angle a five-face cubemap can cover: past this, rays exist
/// whose dominant component is -Z. Equal to acos(-1/sqrt(3)), about 125.26
/// degrees.
pub fn max_coverable_theta() -> f64 {
    (-1.0 / 3.0f64.sqrt()).acos()
}

#[derive(Debug, Error)]
pub enum CubemapError {
    #[error("face {0} is {1}x{2}, expected square faces of side {3}")]
    MismatchedFace(&'static str, u32, u32, u32),
}

/// The five face rasters of one cubemap, all square with the same side.
#[derive(Debug, Clone)]
pub struct FaceSet<T> {
    faces: Vec<Raster<T>>,
    face_size: u32,
}

impl<T: Copy> FaceSet<T> {
    /// Takes the rasters in [`ALL_FACES`] order.
    pub fn new(faces: Vec<Raster<T>>) -> Result<Self, CubemapError> {
        assert_eq!(faces.len(), FACE_COUNT, "expected {FACE_COUNT} faces");
        let face_size = faces[0].width();
        for (raster, face) in faces.iter().zip(ALL_FACES) {
            if raster.width() != face_size || raster.height() != face_size {
                return Err(CubemapError::MismatchedFace(
                    face.name(),
                    raster.width(),
                    raster.height(),
                    face_size,
                ));
            }
        }
        Ok(Self { faces, face_size })
    }

    pub fn filled(face_size: u32, value: T) -> Self {
        Self {
            faces: (0..FACE_COUNT)
                .map(|_| Raster::filled(face_size, face_size, value))
                .collect(),
            face_size,
        }
    }

    pub fn face_size(&self) -> u32 {
        self.face_size
    }

    pub fn face(&self, face: Face) -> &Raster<T> {
        &self.faces[face.index()]
    }

    pub fn face_mut(&mut self, face: Face) -> &mut Raster<T> {
        &mut self.faces[face.index()]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U + Copy) -> FaceSet<U> {
        FaceSet {
            faces: self.faces.iter().map(|r| r.map(f)).collect(),
            face_size: self.face_size,
        }
    }
}
