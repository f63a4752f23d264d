//! Calibration file loading.
//!
//! One JSON document per camera:
//!
//! ```json
//! {
//!   "name": "front",
//!   "model": "polynomial4",
//!   "coeffs": [330.0, 15.0, -8.0, 0.8],
//!   "principal": [640.0, 483.0],
//!   "size": [1280, 966],
//!   "theta_max_deg": 95.0,
//!   "extrinsic": {
//!     "rotation": [[1,0,0],[0,1,0],[0,0,1]],
//!     "translation": [1.8, 0.0, 1.2],
//!     "convention": "sensor_to_world"
//!   }
//! }
//! ```
//!
//! `rotation` accepts a nested 3x3 row-major matrix, a flat row-major
//! 9-array, or a quaternion as a 4-array `[w, x, y, z]`. The `convention`
//! tag states which way the transform maps; everything is normalised to
//! sensor-to-world after loading.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::camera::{CameraError, FisheyeIntrinsics};
use crate::geometry::{GeometryError, RigidTransform};

#[derive(Debug, Error)]
pub enum CalibError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid calibration JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported camera model {0:?} (only \"polynomial4\")")]
    UnsupportedModel(String),
    #[error("rotation array has {0} elements; expected 9 (row-major matrix) or 4 (quaternion wxyz)")]
    BadRotationLength(usize),
    #[error("camera {name}: {source}")]
    Camera {
        name: String,
        #[source]
        source: CameraError,
    },
    #[error("camera {name}: {source}")]
    Geometry {
        name: String,
        #[source]
        source: GeometryError,
    },
}

/// Which way the stored extrinsic maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformConvention {
    SensorToWorld,
    WorldToSensor,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum RotationEncoding {
    Nested([[f64; 3]; 3]),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
struct ExtrinsicFile {
    rotation: RotationEncoding,
    translation: [f64; 3],
    convention: TransformConvention,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
struct CalibrationFile {
    name: String,
    model: String,
    coeffs: [f64; 4],
    principal: [f64; 2],
    size: [u32; 2],
    #[serde(default = "default_theta_max_deg")]
    theta_max_deg: f64,
    extrinsic: ExtrinsicFile,
}

fn default_theta_max_deg() -> f64 {
    95.0
}

/// A loaded, validated camera calibration.
#[derive(Debug, Clone)]
pub struct CameraCalibration {
    pub name: String,
    pub intrinsics: FisheyeIntrinsics,
    /// Mount pose: camera frame to the rig/world frame of the file.
    sensor_to_world: RigidTransform,
    pub convention: TransformConvention,
}

impl CameraCalibration {
    pub fn sensor_to_world(&self) -> &RigidTransform {
        &self.sensor_to_world
    }

    /// SHA-256 over the numeric intrinsic and extrinsic parameters; stored in
    /// lookup-table headers so stale tables are detected.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for c in self.intrinsics.coeffs() {
            hasher.update(c.to_le_bytes());
        }
        let (cx, cy) = self.intrinsics.principal_point();
        hasher.update(cx.to_le_bytes());
        hasher.update(cy.to_le_bytes());
        hasher.update(self.intrinsics.width().to_le_bytes());
        hasher.update(self.intrinsics.height().to_le_bytes());
        hasher.update(self.intrinsics.theta_max().to_le_bytes());
        for v in self.sensor_to_world.rotation().iter() {
            hasher.update(v.to_le_bytes());
        }
        for v in self.sensor_to_world.translation().iter() {
            hasher.update(v.to_le_bytes());
        }
        hasher.finalize().into()
    }

    pub fn from_json(path: &Path) -> Result<Self, CalibError> {
        let text = std::fs::read_to_string(path).map_err(|source| CalibError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: CalibrationFile = serde_json::from_str(&text).map_err(|source| CalibError::Json {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_file(file)
    }

    fn from_file(file: CalibrationFile) -> Result<Self, CalibError> {
        if file.model != "polynomial4" {
            return Err(CalibError::UnsupportedModel(file.model));
        }
        let intrinsics = FisheyeIntrinsics::new(
            file.coeffs,
            file.principal[0],
            file.principal[1],
            file.size[0],
            file.size[1],
            file.theta_max_deg.to_radians(),
        )
        .map_err(|source| CalibError::Camera { name: file.name.clone(), source })?;

        let rotation = decode_rotation(&file.extrinsic.rotation)?;
        let translation = Vector3::from(file.extrinsic.translation);
        let stored = RigidTransform::new(rotation, translation)
            .map_err(|source| CalibError::Geometry { name: file.name.clone(), source })?;
        let sensor_to_world = match file.extrinsic.convention {
            TransformConvention::SensorToWorld => stored,
            TransformConvention::WorldToSensor => stored.inverse(),
        };
        Ok(Self {
            name: file.name,
            intrinsics,
            sensor_to_world,
            convention: file.extrinsic.convention,
        })
    }
}

fn decode_rotation(enc: &RotationEncoding) -> Result<Matrix3<f64>, CalibError> {
    match enc {
        RotationEncoding::Nested(rows) => Ok(Matrix3::new(
            rows[0][0], rows[0][1], rows[0][2],
            rows[1][0], rows[1][1], rows[1][2],
            rows[2][0], rows[2][1], rows[2][2],
        )),
        RotationEncoding::Flat(v) if v.len() == 9 => Ok(Matrix3::new(
            v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8],
        )),
        RotationEncoding::Flat(v) if v.len() == 4 => {
            let q = UnitQuaternion::from_quaternion(Quaternion::new(v[0], v[1], v[2], v[3]));
            Ok(q.to_rotation_matrix().into_inner())
        }
        RotationEncoding::Flat(v) => Err(CalibError::BadRotationLength(v.len())),
    }
}

/// All cameras of one rig, keyed by name.
#[derive(Debug, Clone, Default)]
pub struct CalibrationSet {
    cameras: BTreeMap<String, CameraCalibration>,
}

impl CalibrationSet {
    /// Loads every `*.json` file in a directory.
    pub fn load_dir(dir: &Path) -> Result<Self, CalibError> {
        let mut cameras = BTreeMap::new();
        let entries = std::fs::read_dir(dir).map_err(|source| CalibError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let calib = CameraCalibration::from_json(&path)?;
            cameras.insert(calib.name.clone(), calib);
        }
        Ok(Self { cameras })
    }

    pub fn insert(&mut self, calib: CameraCalibration) {
        self.cameras.insert(calib.name.clone(), calib);
    }

    pub fn get(&self, name: &str) -> Option<&CameraCalibration> {
        self.cameras.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.cameras.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CameraCalibration> {
        self.cameras.values()
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }
}

/// Writes a calibration JSON document (used by the demo-data generator).
pub fn write_calibration_json(
    path: &Path,
    name: &str,
    intrinsics: &FisheyeIntrinsics,
    sensor_to_world: &RigidTransform,
) -> Result<(), CalibError> {
    let r = sensor_to_world.rotation();
    let file = CalibrationFile {
        name: name.to_string(),
        model: "polynomial4".to_string(),
        coeffs: intrinsics.coeffs(),
        principal: [intrinsics.principal_point().0, intrinsics.principal_point().1],
        size: [intrinsics.width(), intrinsics.height()],
        theta_max_deg: intrinsics.theta_max().to_degrees(),
        extrinsic: ExtrinsicFile {
            rotation: RotationEncoding::Nested([
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ]),
            translation: (*sensor_to_world.translation()).into(),
            convention: TransformConvention::SensorToWorld,
        },
    };
    let text = serde_json::to_string_pretty(&file).expect("calibration serialises");
    std::fs::write(path, text).map_err(|source| CalibError::Io {
        path: path.display().to_string(),
        source,
    })
}
