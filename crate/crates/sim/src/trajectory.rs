//! Camera poses and approach trajectories.

use graspscene_core::error::{CoreError, Result};
use graspscene_core::geom::{Mat3, Point3, RigidTransform, Vec3};

/// A camera pose as the world→camera transform: `p_cam = R p_world + t`.
///
/// Camera convention: `+z` along the optical axis, `+x` right, `+y` down in
/// the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose(pub RigidTransform);

impl CameraPose {
    pub fn transform(&self) -> &RigidTransform {
        &self.0
    }

    /// Camera origin in world coordinates.
    pub fn center(&self) -> Point3 {
        let inv = self.0.inverse();
        Point3::from(inv.translation)
    }

    /// Optical axis direction in world coordinates.
    pub fn forward(&self) -> Vec3 {
        self.0.rotation.transpose() * Vec3::z()
    }

    /// Builds a pose at `position` looking at `target`, with the image "down"
    /// direction aligned as closely as possible with `world_down` (usually
    /// gravity). Falls back to a fixed world axis when the view is straight
    /// up or down.
    pub fn look_at(position: Point3, target: Point3, world_down: Vec3) -> Result<CameraPose> {
        let to_target = target - position;
        if to_target.norm() < 1e-12 {
            return Err(CoreError::InvalidArgument(
                "camera position and target coincide".into(),
            ));
        }
        let z = to_target.normalize();
        let mut y = world_down - z * world_down.dot(&z);
        if y.norm() < 1e-9 {
            // Looking straight along gravity: any horizontal direction works
            // for image-down; pick deterministically.
            y = Vec3::y() - z * Vec3::y().dot(&z);
            if y.norm() < 1e-9 {
                y = Vec3::x() - z * Vec3::x().dot(&z);
            }
        }
        let y = y.normalize();
        let x = y.cross(&z);
        let rotation = Mat3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
        let translation = -(rotation * position.coords);
        Ok(CameraPose(RigidTransform::new(rotation, translation)?))
    }
}

/// A timed sequence of camera poses; times are seconds, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, CameraPose)>,
}

/// Capture rate assumed for trajectory timestamps, Hz.
pub const CAPTURE_RATE_HZ: f64 = 60.0;

/// Tilt of the standard approach path, radians from vertical. A straight
/// top-down approach would never see the opposition faces of an object, so
/// the camera comes in obliquely, the way a wheelchair-mounted sensor
/// actually closes on a table.
pub const APPROACH_TILT: f64 = 30.0 * std::f64::consts::PI / 180.0;

/// Builds a straight-line approach toward `target` (a point on a horizontal
/// surface, world `+z` up): the camera starts `start_range` away and closes
/// to `end_range`, keeping the optical axis through `target` at every step.
///
/// Ranges are along the viewing direction, so each pose's depth to the
/// target equals its range. Timestamps advance at the capture rate.
pub fn make_approach(
    start_range: f64,
    end_range: f64,
    steps: usize,
    target: Point3,
) -> Result<Trajectory> {
    if !(end_range > 0.0) || !(start_range > end_range) {
        return Err(CoreError::InvalidArgument(
            "require start_range > end_range > 0".into(),
        ));
    }
    if steps < 2 {
        return Err(CoreError::InvalidArgument(
            "an approach needs at least 2 steps".into(),
        ));
    }

    let dir = Vec3::new(0.0, -APPROACH_TILT.sin(), APPROACH_TILT.cos());
    let down = Vec3::new(0.0, 0.0, -1.0);
    let mut samples = Vec::with_capacity(steps);
    for k in 0..steps {
        let f = k as f64 / (steps - 1) as f64;
        let range = start_range + (end_range - start_range) * f;
        let position = target + dir * range;
        let pose = CameraPose::look_at(position, target, down)?;
        samples.push((k as f64 / CAPTURE_RATE_HZ, pose));
    }
    Ok(Trajectory { samples })
}
