//! Synthetic accelerometer data consistent with a camera pose.

use graspscene_core::geom::{RigidTransform, Vec3};
use graspscene_core::orientation::{ImuSample, STANDARD_GRAVITY};

use crate::trajectory::CameraPose;

/// Generates `count` identical stationary IMU samples for a camera at `pose`
/// in a world where gravity pulls along `gravity_world` (unit vector).
///
/// The stored accelerometer vector follows the pipeline's fixture
/// convention: `9.81 · ĝ` where `ĝ` is the gravity direction in the IMU
/// frame. `imu_to_camera` is the mounting transform; its inverse maps the
/// camera-frame gravity into the IMU frame. Gyro rates are zero (the device
/// is still).
pub fn synth_imu(
    pose: &CameraPose,
    gravity_world: &Vec3,
    imu_to_camera: &RigidTransform,
    count: usize,
) -> Vec<ImuSample> {
    let g_cam = pose.transform().rotation * gravity_world.normalize();
    let g_imu = imu_to_camera.rotation.transpose() * g_cam;
    let sample = ImuSample {
        accel: g_imu * STANDARD_GRAVITY,
        gyro: Vec3::zeros(),
    };
    vec![sample; count]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use graspscene_core::geom::Point3;
    use graspscene_core::orientation::estimate_gravity;

    #[test]
    fn round_trips_through_gravity_estimation() {
        // A camera looking at a table from a 30°-tilted approach: estimating
        // gravity from the synthesized samples must recover exactly the
        // world gravity as seen by the camera.
        let pose = CameraPose::look_at(
            Point3::new(0.0, -0.3, 0.52),
            Point3::origin(),
            Vec3::new(0.0, 0.0, -1.0),
        )
        .unwrap();
        let world_g = Vec3::new(0.0, 0.0, -1.0);
        let mount = RigidTransform::new(
            RigidTransform::rotation_z(0.4),
            Vec3::new(0.01, 0.0, -0.005),
        )
        .unwrap();
        let samples = synth_imu(&pose, &world_g, &mount, 20);
        assert_eq!(samples.len(), 20);
        assert_relative_eq!(samples[0].accel.norm(), STANDARD_GRAVITY, epsilon = 1e-12);

        let estimate = estimate_gravity(&samples, &mount).unwrap();
        assert_eq!(estimate.sample_count, 20);
        let expected_cam = pose.transform().rotation * world_g;
        assert_relative_eq!(estimate.direction, expected_cam, epsilon = 1e-12);
    }

    #[test]
    fn level_camera_sees_gravity_image_down() {
        let pose = CameraPose::look_at(
            Point3::new(0.0, -0.5, 0.3),
            Point3::new(0.0, 0.0, 0.3),
            Vec3::new(0.0, 0.0, -1.0),
        )
        .unwrap();
        let samples = synth_imu(
            &pose,
            &Vec3::new(0.0, 0.0, -1.0),
            &RigidTransform::identity(),
            1,
        );
        // Horizontal view: gravity is straight down in the image, camera +y.
        assert_relative_eq!(
            samples[0].accel,
            Vec3::new(0.0, STANDARD_GRAVITY, 0.0),
            epsilon = 1e-12
        );
    }
}
