//! Gravity estimation from accelerometer data and gravity-referenced plane
//! orientation classification.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::geom::{RigidTransform, Vec3};

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Default half-cone tolerance (degrees) separating horizontal and vertical
/// planes from oblique ones.
pub const DEFAULT_ORIENTATION_TOL_DEG: f64 = 15.0;

/// One inertial sample: specific force and angular rate in the IMU frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    /// Accelerometer reading, m/s².
    pub accel: Vec3,
    /// Gyroscope reading, rad/s (carried for completeness; unused here).
    pub gyro: Vec3,
}

/// The direction gravity pulls, expressed in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityEstimate {
    /// Unit vector pointing toward the Earth.
    pub direction: Vec3,
    /// How many accelerometer samples passed the magnitude gate.
    pub sample_count: usize,
}

/// Orientation class of a plane relative to gravity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneOrientationClass {
    /// Normal within tolerance of the gravity axis (tables, floors, shelves).
    Horizontal,
    /// Normal within tolerance of perpendicular to gravity (walls, doors).
    Vertical,
    /// Anything in between.
    Oblique,
}

/// A classified plane orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneOrientation {
    pub class: PlaneOrientationClass,
    /// Angle between the plane normal and the gravity axis, degrees, in
    /// `[0, 90]`.
    pub angle_to_gravity_deg: f64,
}

/// Estimates the gravity direction in the camera frame from accelerometer
/// samples taken while the device is held still or moved gently.
///
/// Samples whose magnitude falls outside `[0.5 g, 1.5 g]` are rejected as
/// motion-contaminated. The surviving samples are averaged, normalized, and
/// rotated into the camera frame through `imu_to_camera`.
///
/// A stationary accelerometer measures specific force — the reaction *against*
/// gravity — so the averaged reading itself points away from the Earth in a
/// conventional sensor model. This function follows the convention of its
/// on-disk fixtures: the stored accelerometer vector is `9.81 * ĝ` where `ĝ`
/// is the direction gravity pulls in the IMU frame, so the averaged direction
/// is used as-is.
pub fn estimate_gravity(
    samples: &[ImuSample],
    imu_to_camera: &RigidTransform,
) -> Result<GravityEstimate> {
    let lo = 0.5 * STANDARD_GRAVITY;
    let hi = 1.5 * STANDARD_GRAVITY;
    let mut sum = Vec3::zeros();
    let mut accepted = 0usize;
    for s in samples {
        let mag = s.accel.norm();
        if mag >= lo && mag <= hi {
            sum += s.accel;
            accepted += 1;
        }
    }
    if accepted == 0 {
        return Err(CoreError::GravityUnobservable);
    }
    let mean = sum / accepted as f64;
    let norm = mean.norm();
    if norm < 1e-9 {
        // Accepted samples cancelled each other out; direction is undefined.
        return Err(CoreError::GravityUnobservable);
    }
    Ok(GravityEstimate {
        direction: imu_to_camera.rotate_vector(&(mean / norm)),
        sample_count: accepted,
    })
}

/// Classifies a plane's orientation by the angle between its normal and the
/// gravity axis.
///
/// With `tol_deg = t`: angle ≤ `t` is horizontal, angle ≥ `90 - t` is
/// vertical, anything between is oblique. The sign of the normal does not
/// matter.
pub fn classify_plane_orientation(
    normal: &Vec3,
    gravity: &GravityEstimate,
    tol_deg: f64,
) -> PlaneOrientation {
    let n = normal.normalize();
    let cos = n.dot(&gravity.direction).abs().min(1.0);
    let angle = cos.acos().to_degrees();
    let class = if angle <= tol_deg {
        PlaneOrientationClass::Horizontal
    } else if angle >= 90.0 - tol_deg {
        PlaneOrientationClass::Vertical
    } else {
        PlaneOrientationClass::Oblique
    };
    PlaneOrientation {
        class,
        angle_to_gravity_deg: angle,
    }
}

/// Writes IMU samples as text, one `ax ay az gx gy gz` line per sample.
pub fn store_imu(samples: &[ImuSample], path: &Path) -> Result<()> {
    let mut out = String::new();
    for s in samples {
        out.push_str(&format!(
            "{:.6} {:.6} {:.6} {:.6} {:.6} {:.6}\n",
            s.accel.x, s.accel.y, s.accel.z, s.gyro.x, s.gyro.y, s.gyro.z
        ));
    }
    let mut file = fs::File::create(path).map_err(|e| CoreError::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| CoreError::io(path, e))
}

/// Reads IMU samples written by [`store_imu`].
pub fn load_imu(path: &Path) -> Result<Vec<ImuSample>> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(CoreError::parse(
                path,
                idx + 1,
                format!("expected 6 fields (ax ay az gx gy gz), got {}", fields.len()),
            ));
        }
        let mut vals = [0.0f64; 6];
        for (k, f) in fields.iter().enumerate() {
            vals[k] = f
                .parse()
                .map_err(|_| CoreError::parse(path, idx + 1, format!("bad value {f:?}")))?;
        }
        samples.push(ImuSample {
            accel: Vec3::new(vals[0], vals[1], vals[2]),
            gyro: Vec3::new(vals[3], vals[4], vals[5]),
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn still_sample(dir: Vec3) -> ImuSample {
        ImuSample {
            accel: dir.normalize() * STANDARD_GRAVITY,
            gyro: Vec3::zeros(),
        }
    }

    #[test]
    fn averages_gated_samples() {
        let samples = vec![
            still_sample(Vec3::new(0.0, 1.0, 0.0)),
            still_sample(Vec3::new(0.0, 1.0, 0.0)),
        ];
        let g = estimate_gravity(&samples, &RigidTransform::identity()).unwrap();
        assert_eq!(g.sample_count, 2);
        assert_relative_eq!(g.direction, Vec3::new(0.0, 1.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn magnitude_gate_rejects_shaken_samples() {
        let mut samples = vec![still_sample(Vec3::new(0.0, 1.0, 0.0)); 3];
        // One sample during violent motion (3 g) and one in free fall (0.1 g):
        // both must be ignored.
        samples.push(ImuSample {
            accel: Vec3::new(3.0 * STANDARD_GRAVITY, 0.0, 0.0),
            gyro: Vec3::zeros(),
        });
        samples.push(ImuSample {
            accel: Vec3::new(0.0, 0.0, 0.1 * STANDARD_GRAVITY),
            gyro: Vec3::zeros(),
        });
        let g = estimate_gravity(&samples, &RigidTransform::identity()).unwrap();
        assert_eq!(g.sample_count, 3);
        assert_relative_eq!(g.direction, Vec3::new(0.0, 1.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn all_rejected_is_an_error() {
        let samples = vec![ImuSample {
            accel: Vec3::new(0.0, 0.0, 40.0),
            gyro: Vec3::zeros(),
        }];
        assert!(matches!(
            estimate_gravity(&samples, &RigidTransform::identity()),
            Err(CoreError::GravityUnobservable)
        ));
        assert!(matches!(
            estimate_gravity(&[], &RigidTransform::identity()),
            Err(CoreError::GravityUnobservable)
        ));
    }

    #[test]
    fn rotates_through_mount_transform() {
        // IMU mounted rotated 90° about z relative to the camera: IMU +x maps
        // to camera +y.
        let mount = RigidTransform::new(
            RigidTransform::rotation_z(std::f64::consts::FRAC_PI_2),
            Vec3::zeros(),
        )
        .unwrap();
        let samples = vec![still_sample(Vec3::new(1.0, 0.0, 0.0))];
        let g = estimate_gravity(&samples, &mount).unwrap();
        assert_relative_eq!(g.direction, Vec3::new(0.0, 1.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn classification_thresholds() {
        let g = GravityEstimate {
            direction: Vec3::new(0.0, 1.0, 0.0),
            sample_count: 1,
        };
        let horizontal = classify_plane_orientation(&Vec3::new(0.0, -1.0, 0.0), &g, 15.0);
        assert_eq!(horizontal.class, PlaneOrientationClass::Horizontal);
        assert_relative_eq!(horizontal.angle_to_gravity_deg, 0.0, epsilon = 1e-9);

        let vertical = classify_plane_orientation(&Vec3::new(0.0, 0.0, 1.0), &g, 15.0);
        assert_eq!(vertical.class, PlaneOrientationClass::Vertical);
        assert_relative_eq!(vertical.angle_to_gravity_deg, 90.0, epsilon = 1e-9);

        // 45° tilt is oblique for any tolerance below 45°.
        let tilted = Vec3::new(0.0, 1.0, 1.0);
        let oblique = classify_plane_orientation(&tilted, &g, 15.0);
        assert_eq!(oblique.class, PlaneOrientationClass::Oblique);
        assert_relative_eq!(oblique.angle_to_gravity_deg, 45.0, epsilon = 1e-9);
    }

    #[test]
    fn classification_boundary_is_inclusive() {
        let g = GravityEstimate {
            direction: Vec3::new(0.0, 1.0, 0.0),
            sample_count: 1,
        };
        let tol = 15.0;
        let at_tol = Vec3::new(0.0, (15f64).to_radians().cos(), (15f64).to_radians().sin());
        let c = classify_plane_orientation(&at_tol, &g, tol);
        assert_eq!(c.class, PlaneOrientationClass::Horizontal);
        let at_vert = Vec3::new(0.0, (75f64).to_radians().cos(), (75f64).to_radians().sin());
        let c = classify_plane_orientation(&at_vert, &g, tol);
        assert_eq!(c.class, PlaneOrientationClass::Vertical);
    }

    #[test]
    fn imu_file_round_trip() {
        let samples = vec![
            ImuSample {
                accel: Vec3::new(0.1, 9.7, -0.2),
                gyro: Vec3::new(0.01, -0.02, 0.03),
            },
            ImuSample {
                accel: Vec3::new(0.0, 9.81, 0.0),
                gyro: Vec3::zeros(),
            },
        ];
        let dir = std::env::temp_dir().join("graspscene-core-imu-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("imu.txt");
        store_imu(&samples, &path).unwrap();
        let back = load_imu(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_relative_eq!(back[0].accel, samples[0].accel, epsilon = 1e-6);
        assert_relative_eq!(back[1].gyro, samples[1].gyro, epsilon = 1e-6);
    }

    #[test]
    fn imu_parse_error_names_line() {
        let dir = std::env::temp_dir().join("graspscene-core-imu-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("imu.txt");
        std::fs::write(&path, "0 9.81 0 0 0 0\n0 9.81 0 0 0\n").unwrap();
        match load_imu(&path).unwrap_err() {
            CoreError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
