//! Frame-independence property: the detected mode depends on scene geometry
//! relative to gravity, so rigidly rotating the camera-frame cloud together
//! with the gravity estimate must never change the classification.

use graspscene_core::camera::CameraIntrinsics;
use graspscene_core::cloud::PointCloud;
use graspscene_core::geom::{RigidTransform, Vec3};
use graspscene_core::mode::{detect_mode, DetectParams};
use graspscene_core::orientation::{estimate_gravity, GravityEstimate};
use graspscene_sim::noise::NoiseModel;
use graspscene_sim::scenes::{standard_camera, standard_scene, SceneKind};
use graspscene_sim::{apply_noise, render_depth, synth_imu};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rotation(rng: &mut ChaCha8Rng) -> nalgebra::Matrix3<f64> {
    let axis = loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            break v / n;
        }
    };
    let angle = rng.random_range(0.0..std::f64::consts::PI);
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).into_inner()
}

#[test]
fn mode_is_invariant_under_rigid_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let params = DetectParams::default();
    for kind in SceneKind::ALL {
        let seed = 11;
        let scene = standard_scene(kind, seed);
        let pose = standard_camera(kind, &scene, seed);
        let frame = render_depth(&scene, &pose, &CameraIntrinsics::default());
        let noisy = apply_noise(
            &frame,
            &NoiseModel {
                seed,
                ..NoiseModel::default()
            },
        );
        let cloud = noisy.filter_invalid().deproject();
        let mount = RigidTransform::identity();
        let samples = synth_imu(&pose, &scene.gravity, &mount, 8);
        let gravity = estimate_gravity(&samples, &mount).unwrap();

        let baseline = detect_mode(&cloud, &gravity, &params);
        assert_eq!(baseline.mode, kind.mode(), "baseline {} misclassified", kind.as_str());

        for trial in 0..20 {
            let rot = random_rotation(&mut rng);
            let rotated = PointCloud::from_points(
                cloud
                    .iter()
                    .map(|p| nalgebra::Point3::from(rot * p.coords))
                    .collect(),
            );
            let rotated_gravity = GravityEstimate {
                direction: rot * gravity.direction,
                sample_count: gravity.sample_count,
            };
            let decision = detect_mode(&rotated, &rotated_gravity, &params);
            assert_eq!(
                decision.mode,
                baseline.mode,
                "{} rotation trial {trial}: mode changed under rigid rotation",
                kind.as_str()
            );
        }
    }
}
