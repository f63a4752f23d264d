//! Camera models: the fourth-order polynomial fisheye and the pinhole.
//!
//! The fisheye model maps the incident angle theta (between a viewing ray and
//! the optical axis) to an image radius in pixels:
//!
//! ```text
//! r(theta) = a1*theta + a2*theta^2 + a3*theta^3 + a4*theta^4
//! ```
//!
//! There is no constant term, so the optical axis always lands on the
//! principal point. The polynomial must be strictly increasing over the
//! covered angle range; this is validated at construction so that the numeric
//! inverse is well defined everywhere.
//!
//! Camera frame convention throughout the crate: +Z optical axis, +X right,
//! +Y down.

use nalgebra::{Matrix3, Point2, Point3, Vector3};
use thiserror::Error;

/// Tolerance for the unit-norm check on projection inputs.
const UNIT_NORM_TOL: f64 = 1e-9;

/// Residual bound for the polynomial inverse, in pixels.
const INVERSE_TOL_PX: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CameraError {
    #[error("polynomial r(theta) is not strictly increasing on [0, {theta_max}] (r'({theta}) = {slope})")]
    NonMonotonic { theta_max: f64, theta: f64, slope: f64 },
    #[error("invalid image geometry: size {width}x{height}, principal point ({cx}, {cy})")]
    BadGeometry { width: u32, height: u32, cx: f64, cy: f64 },
    #[error("theta_max {0} outside (0, pi)")]
    BadThetaMax(f64),
    #[error("theta {theta} outside [0, {theta_max}]")]
    ThetaOutOfRange { theta: f64, theta_max: f64 },
    #[error("radius {radius} outside covered range [0, {r_max}]")]
    OutOfCoverage { radius: f64, r_max: f64 },
    #[error("direction has norm {0}, expected a unit vector")]
    NotUnit(f64),
    #[error("field of view {0} degrees outside (0, 180)")]
    BadFov(f64),
    #[error("depth {0} must be positive")]
    NonPositiveDepth(f64),
}

/// Fourth-order polynomial fisheye intrinsics.
#[derive(Debug, Clone, PartialEq)]
pub struct FisheyeIntrinsics {
    coeffs: [f64; 4],
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
    theta_max: f64,
    r_max: f64,
}

impl FisheyeIntrinsics {
    /// Validates and builds the model. `theta_max` is the maximum half-angle
    /// of the field of view in radians (95 degrees for a 190-degree lens).
    pub fn new(
        coeffs: [f64; 4],
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
        theta_max: f64,
    ) -> Result<Self, CameraError> {
        if width == 0 || height == 0 || cx < 0.0 || cx >= width as f64 || cy < 0.0 || cy >= height as f64 {
            return Err(CameraError::BadGeometry { width, height, cx, cy });
        }
        if !(theta_max > 0.0 && theta_max < std::f64::consts::PI) || !theta_max.is_finite() {
            return Err(CameraError::BadThetaMax(theta_max));
        }
        // Monotonicity check: derivative sign plus sampled increase.
        const SAMPLES: usize = 1000;
        let mut prev_r = 0.0;
        for i in 0..=SAMPLES {
            let theta = theta_max * i as f64 / SAMPLES as f64;
            let slope = poly_derivative(&coeffs, theta);
            if slope <= 0.0 {
                return Err(CameraError::NonMonotonic { theta_max, theta, slope });
            }
            let r = poly_eval(&coeffs, theta);
            if i > 0 && r <= prev_r {
                return Err(CameraError::NonMonotonic { theta_max, theta, slope });
            }
            prev_r = r;
        }
        let r_max = poly_eval(&coeffs, theta_max);
        Ok(Self { coeffs, cx, cy, width, height, theta_max, r_max })
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.coeffs
    }

    pub fn principal_point(&self) -> (f64, f64) {
        (self.cx, self.cy)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// Image radius of the coverage boundary, `r(theta_max)`.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Evaluates `r(theta)` in pixels.
    pub fn radius_from_theta(&self, theta: f64) -> Result<f64, CameraError> {
        if !(0.0..=self.theta_max).contains(&theta) {
            return Err(CameraError::ThetaOutOfRange { theta, theta_max: self.theta_max });
        }
        Ok(poly_eval(&self.coeffs, theta))
    }

    /// Numeric inverse of `r(theta)`.
    ///
    /// Bisection on `[0, theta_max]` (monotonicity is guaranteed by the
    /// construction check) refined by Newton steps, converging to within
    /// 1e-6 px unconditionally.
    pub fn theta_from_radius(&self, radius: f64) -> Result<f64, CameraError> {
        if !(0.0..=self.r_max).contains(&radius) {
            return Err(CameraError::OutOfCoverage { radius, r_max: self.r_max });
        }
        if radius == 0.0 {
            return Ok(0.0);
        }
        let mut lo = 0.0f64;
        let mut hi = self.theta_max;
        for _ in 0..52 {
            let mid = 0.5 * (lo + hi);
            if poly_eval(&self.coeffs, mid) < radius {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut theta = 0.5 * (lo + hi);
        for _ in 0..2 {
            let f = poly_eval(&self.coeffs, theta) - radius;
            let df = poly_derivative(&self.coeffs, theta);
            let next = theta - f / df;
            if next.is_finite() && (0.0..=self.theta_max).contains(&next) {
                theta = next;
            }
        }
        debug_assert!((poly_eval(&self.coeffs, theta) - radius).abs() < INVERSE_TOL_PX);
        Ok(theta)
    }

    /// Projects a unit direction in the camera frame to sub-pixel image
    /// coordinates. Returns `Ok(None)` when the direction lies outside the
    /// covered angle range.
    pub fn project(&self, dir: &Vector3<f64>) -> Result<Option<Point2<f64>>, CameraError> {
        let norm = dir.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(CameraError::NotUnit(norm));
        }
        let cos_theta = dir.z.clamp(-1.0, 1.0);
        let theta = cos_theta.acos();
        if theta > self.theta_max {
            return Ok(None);
        }
        let r = poly_eval(&self.coeffs, theta);
        let phi = dir.y.atan2(dir.x);
        Ok(Some(Point2::new(
            self.cx + r * phi.cos(),
            self.cy + r * phi.sin(),
        )))
    }

    /// Back-projects a sub-pixel coordinate to the unit viewing direction.
    pub fn unproject(&self, pixel: Point2<f64>) -> Result<Vector3<f64>, CameraError> {
        let dx = pixel.x - self.cx;
        let dy = pixel.y - self.cy;
        let radius = (dx * dx + dy * dy).sqrt();
        if radius == 0.0 {
            return Ok(Vector3::new(0.0, 0.0, 1.0));
        }
        let theta = self.theta_from_radius(radius)?;
        let (sin_t, cos_t) = theta.sin_cos();
        // (dx, dy)/radius is the in-plane direction cos(phi), sin(phi).
        Ok(Vector3::new(sin_t * dx / radius, sin_t * dy / radius, cos_t))
    }

    /// True when the sub-pixel coordinate lies inside both the raster bounds
    /// and the radial coverage disc.
    pub fn covers(&self, pixel: Point2<f64>) -> bool {
        if pixel.x < -0.5
            || pixel.y < -0.5
            || pixel.x >= self.width as f64 - 0.5
            || pixel.y >= self.height as f64 - 0.5
        {
            return false;
        }
        let dx = pixel.x - self.cx;
        let dy = pixel.y - self.cy;
        (dx * dx + dy * dy).sqrt() <= self.r_max
    }
}

fn poly_eval(a: &[f64; 4], theta: f64) -> f64 {
    theta * (a[0] + theta * (a[1] + theta * (a[2] + theta * a[3])))
}

fn poly_derivative(a: &[f64; 4], theta: f64) -> f64 {
    a[0] + theta * (2.0 * a[1] + theta * (3.0 * a[2] + theta * 4.0 * a[3]))
}

/// Focal length in pixels for a horizontal field of view in degrees:
/// `f = w / (2 tan(pi fov / 360))`.
pub fn pinhole_focal(fov_deg: f64, width: u32) -> Result<f64, CameraError> {
    if !(fov_deg > 0.0 && fov_deg < 180.0) {
        return Err(CameraError::BadFov(fov_deg));
    }
    Ok(width as f64 / (2.0 * (std::f64::consts::PI * fov_deg / 360.0).tan()))
}

/// Pinhole intrinsics with the principal point fixed at the image centre.
#[derive(Debug, Clone, PartialEq)]
pub struct PinholeIntrinsics {
    fov_deg: f64,
    width: u32,
    height: u32,
    f: f64,
}

impl PinholeIntrinsics {
    pub fn new(fov_deg: f64, width: u32, height: u32) -> Result<Self, CameraError> {
        let f = pinhole_focal(fov_deg, width)?;
        if width == 0 || height == 0 {
            return Err(CameraError::BadGeometry {
                width,
                height,
                cx: width as f64 / 2.0,
                cy: height as f64 / 2.0,
            });
        }
        Ok(Self { fov_deg, width, height, f })
    }

    pub fn fov_deg(&self) -> f64 {
        self.fov_deg
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Focal length in pixels.
    pub fn focal(&self) -> f64 {
        self.f
    }

    /// The 3x3 intrinsic matrix: diagonal (f, f, 1), last column
    /// (w/2, h/2, 1).
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.f, 0.0, self.width as f64 / 2.0,
            0.0, self.f, self.height as f64 / 2.0,
            0.0, 0.0, 1.0,
        )
    }

    /// Camera-frame point for a pixel and its plane depth (distance along
    /// the optical axis), `K^-1 (x, y, 1)^T d`.
    pub fn backproject(&self, pixel: Point2<f64>, depth: f64) -> Result<Point3<f64>, CameraError> {
        if depth <= 0.0 {
            return Err(CameraError::NonPositiveDepth(depth));
        }
        let cx = self.width as f64 / 2.0;
        let cy = self.height as f64 / 2.0;
        Ok(Point3::new(
            (pixel.x - cx) / self.f * depth,
            (pixel.y - cy) / self.f * depth,
            depth,
        ))
    }

    /// Projects a camera-frame point; `None` when behind the camera or
    /// outside the raster bounds.
    pub fn project(&self, point: &Point3<f64>) -> Option<Point2<f64>> {
        if point.z <= 0.0 {
            return None;
        }
        let cx = self.width as f64 / 2.0;
        let cy = self.height as f64 / 2.0;
        let pixel = Point2::new(
            self.f * point.x / point.z + cx,
            self.f * point.y / point.z + cy,
        );
        self.in_bounds(pixel).then_some(pixel)
    }

    fn in_bounds(&self, pixel: Point2<f64>) -> bool {
        pixel.x >= -0.5
            && pixel.y >= -0.5
            && pixel.x < self.width as f64 - 0.5
            && pixel.y < self.height as f64 - 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity_model() -> FisheyeIntrinsics {
        FisheyeIntrinsics::new([1.0, 0.0, 0.0, 0.0], 640.0, 483.0, 1280, 966, 95f64.to_radians())
            .unwrap()
    }

    fn curvy_model() -> FisheyeIntrinsics {
        FisheyeIntrinsics::new([300.0, 20.0, -5.0, 1.0], 640.0, 483.0, 1280, 966, 95f64.to_radians())
            .unwrap()
    }

    /// Independent inverse used to check theta_from_radius: plain bisection
    /// on the polynomial, no Newton refinement, no shared code.
    fn bisect_inverse(coeffs: [f64; 4], theta_max: f64, target: f64) -> f64 {
        let eval = |t: f64| coeffs[0] * t + coeffs[1] * t * t + coeffs[2] * t * t * t + coeffs[3] * t * t * t * t;
        let (mut lo, mut hi) = (0.0, theta_max);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn radius_identity_coefficient() {
        assert_eq!(identity_model().radius_from_theta(0.5).unwrap(), 0.5);
    }

    #[test]
    fn radius_zero_theta_is_zero() {
        assert_eq!(curvy_model().radius_from_theta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn radius_hand_evaluated_polynomial() {
        // 300 + 20 - 5 + 1 at theta = 1.
        assert_relative_eq!(curvy_model().radius_from_theta(1.0).unwrap(), 316.0, epsilon = 1e-12);
    }

    #[test]
    fn radius_rejects_out_of_range_theta() {
        let m = curvy_model();
        let err = m.radius_from_theta(2.0).unwrap_err();
        assert!(matches!(err, CameraError::ThetaOutOfRange { theta, .. } if theta == 2.0));
    }

    #[test]
    fn theta_identity_coefficient() {
        assert_relative_eq!(identity_model().theta_from_radius(0.5).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn theta_zero_radius_is_zero() {
        assert_eq!(curvy_model().theta_from_radius(0.0).unwrap(), 0.0);
    }

    #[test]
    fn theta_matches_bisection_oracle() {
        let m = curvy_model();
        let oracle = bisect_inverse(m.coeffs(), m.theta_max(), 316.0);
        assert_relative_eq!(oracle, 1.0, epsilon = 1e-9);
        assert_relative_eq!(m.theta_from_radius(316.0).unwrap(), oracle, epsilon = 1e-9);
    }

    #[test]
    fn theta_rejects_radius_beyond_coverage() {
        let m = curvy_model();
        assert!(matches!(
            m.theta_from_radius(m.r_max() + 1.0),
            Err(CameraError::OutOfCoverage { .. })
        ));
    }

    #[test]
    fn project_optical_axis_hits_principal_point() {
        let m = curvy_model();
        let p = m.project(&Vector3::new(0.0, 0.0, 1.0)).unwrap().unwrap();
        assert_relative_eq!(p.x, 640.0, epsilon = 1e-9);
        assert_relative_eq!(p.y, 483.0, epsilon = 1e-9);
    }

    #[test]
    fn project_identity_model_small_angle() {
        let m = identity_model();
        let theta = 0.3f64;
        let p = m
            .project(&Vector3::new(theta.sin(), 0.0, theta.cos()))
            .unwrap()
            .unwrap();
        assert_relative_eq!(p.x, 640.0 + 0.3, epsilon = 1e-12);
        assert_relative_eq!(p.y, 483.0, epsilon = 1e-12);
    }

    #[test]
    fn project_beyond_theta_max_is_out_of_coverage() {
        let m = curvy_model();
        let theta = m.theta_max() + 0.01;
        let dir = Vector3::new(theta.sin(), 0.0, theta.cos());
        assert!(m.project(&dir).unwrap().is_none());
    }

    #[test]
    fn project_rejects_non_unit_direction() {
        let m = curvy_model();
        assert!(matches!(
            m.project(&Vector3::new(0.0, 0.0, 2.0)),
            Err(CameraError::NotUnit(_))
        ));
    }

    #[test]
    fn unproject_principal_point_is_optical_axis() {
        let m = curvy_model();
        let d = m.unproject(Point2::new(640.0, 483.0)).unwrap();
        assert_relative_eq!(d, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn unproject_identity_model() {
        let m = identity_model();
        let d = m.unproject(Point2::new(640.3, 483.0)).unwrap();
        assert_relative_eq!(d.x, 0.3f64.sin(), epsilon = 1e-9);
        assert_relative_eq!(d.y, 0.0, epsilon = 1e-9);
        assert_relative_eq!(d.z, 0.3f64.cos(), epsilon = 1e-9);
    }

    #[test]
    fn monotonicity_rejected_at_construction() {
        // a1 negative makes r decreasing near zero.
        let err = FisheyeIntrinsics::new([-1.0, 0.0, 0.0, 0.0], 10.0, 10.0, 100, 100, 1.0);
        assert!(matches!(err, Err(CameraError::NonMonotonic { .. })));
        // Large negative a4 bends the curve back down inside the range.
        let err = FisheyeIntrinsics::new([100.0, 0.0, 0.0, -60.0], 10.0, 10.0, 100, 100, 1.5);
        assert!(matches!(err, Err(CameraError::NonMonotonic { .. })));
    }

    #[test]
    fn radius_strictly_increasing_over_samples() {
        let m = curvy_model();
        let mut prev = -1.0;
        for i in 0..=1000 {
            let theta = m.theta_max() * i as f64 / 1000.0;
            let r = m.radius_from_theta(theta).unwrap();
            assert!(r > prev, "not increasing at sample {i}");
            prev = r;
        }
    }

    #[test]
    fn angular_round_trip() {
        let m = curvy_model();
        for i in 0..=1000 {
            let theta = m.theta_max() * i as f64 / 1000.0;
            let r = m.radius_from_theta(theta).unwrap();
            let back = m.theta_from_radius(r).unwrap();
            assert!((back - theta).abs() < 1e-6, "theta {theta} came back as {back}");
        }
    }

    #[test]
    fn pixel_round_trip_10k_random() {
        let m = curvy_model();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 10_000 {
            let px = Point2::new(
                rng.gen_range(0.0..m.width() as f64),
                rng.gen_range(0.0..m.height() as f64),
            );
            if !m.covers(px) {
                continue;
            }
            let dir = m.unproject(px).unwrap();
            let back = m.project(&dir.normalize()).unwrap().unwrap();
            let err = ((back.x - px.x).powi(2) + (back.y - px.y).powi(2)).sqrt();
            assert!(err < 1e-4, "round trip error {err} at {px:?}");
            checked += 1;
        }
    }

    #[test]
    fn focal_90_deg_is_half_width() {
        assert_eq!(pinhole_focal(90.0, 1024).unwrap(), 512.0);
        assert_eq!(pinhole_focal(90.0, 3264).unwrap(), 1632.0);
    }

    #[test]
    fn focal_60_deg_hand_value() {
        // 800 / (2 tan 30deg)
        let oracle = 800.0 / (2.0 * (std::f64::consts::PI / 6.0).tan());
        let f = pinhole_focal(60.0, 800).unwrap();
        assert_relative_eq!(f, oracle, epsilon = 1e-12);
        assert_relative_eq!(f, 692.8203, epsilon = 1e-4);
    }

    #[test]
    fn focal_rejects_bad_fov() {
        assert!(pinhole_focal(0.0, 100).is_err());
        assert!(pinhole_focal(180.0, 100).is_err());
    }

    #[test]
    fn intrinsic_matrix_shape() {
        let k = PinholeIntrinsics::new(90.0, 1024, 768).unwrap().matrix();
        assert_eq!(k[(0, 0)], 512.0);
        assert_eq!(k[(1, 1)], 512.0);
        assert_eq!(k[(2, 2)], 1.0);
        assert_eq!(k[(0, 2)], 512.0);
        assert_eq!(k[(1, 2)], 384.0);
        assert_eq!(k[(0, 1)], 0.0);
        assert_eq!(k[(1, 0)], 0.0);
        assert_eq!(k[(2, 0)], 0.0);
        assert_eq!(k[(2, 1)], 0.0);
    }

    #[test]
    fn backproject_principal_point_lies_on_axis() {
        let p = PinholeIntrinsics::new(90.0, 1024, 1024).unwrap();
        let pt = p.backproject(Point2::new(512.0, 512.0), 5.0).unwrap();
        assert_relative_eq!(pt, Point3::new(0.0, 0.0, 5.0), epsilon = 1e-12);
    }

    #[test]
    fn backproject_hand_value() {
        // f = 512, w = h = 1024: pixel (1024, 512) at depth 2 -> (2, 0, 2).
        let p = PinholeIntrinsics::new(90.0, 1024, 1024).unwrap();
        let pt = p.backproject(Point2::new(1024.0, 512.0), 2.0).unwrap();
        assert_relative_eq!(pt, Point3::new(2.0, 0.0, 2.0), epsilon = 1e-12);
    }

    #[test]
    fn backproject_rejects_zero_depth() {
        let p = PinholeIntrinsics::new(90.0, 1024, 1024).unwrap();
        assert!(matches!(
            p.backproject(Point2::new(10.0, 10.0), 0.0),
            Err(CameraError::NonPositiveDepth(_))
        ));
    }

    #[test]
    fn pinhole_project_backproject_round_trip() {
        let p = PinholeIntrinsics::new(75.0, 640, 480).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let px = Point2::new(rng.gen_range(0.0..640.0), rng.gen_range(0.0..480.0));
            let d = rng.gen_range(0.1..50.0);
            let pt = p.backproject(px, d).unwrap();
            let back = p.project(&pt).unwrap();
            assert_relative_eq!(back, px, epsilon = 1e-9);
        }
    }
}
