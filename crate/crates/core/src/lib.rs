//! Surround-view fisheye synthesis toolkit.
//!
//! Transforms perspective/cubemap simulator exports into fisheye imagery and
//! dense ground truth: depth, instance segmentation, motion segmentation,
//! optical flow, event signals and bird's-eye-view projections.
//!
//! The crate is organised around a small set of building blocks:
//!
//! * [`camera`] — fisheye polynomial and pinhole camera models
//! * [`geometry`] — rigid transforms and oriented 3D boxes
//! * [`calib`] — calibration file loading
//! * [`cubemap`], [`lut`], [`remap`] — cubemap-to-fisheye lookup tables and
//!   high-throughput raster remapping
//! * [`groundtruth`] — instance/motion segmentation and analytic optical flow
//! * [`events`] — event-stream remapping and rendering
//! * [`bev`] — inverse perspective mapping and height maps
//! * [`dataset`] — manifest scanning, raster I/O and dataset statistics
//! * [`synth`] — analytic test scenes used by fixtures and the demo generator

pub mod bev;
pub mod calib;
pub mod camera;
pub mod cubemap;
pub mod dataset;
pub mod events;
pub mod geometry;
pub mod groundtruth;
pub mod lut;
pub mod npy;
pub mod raster;
pub mod remap;
pub mod synth;

pub use raster::{ClassId, Raster, Rgb};

/// Toolkit version recorded in per-frame output metadata.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
