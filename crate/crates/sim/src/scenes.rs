//! Seeded families of standard evaluation scenes with ground-truth labels.
//!
//! Each family is a deterministic function of its variation seed: equal
//! seeds give equal scenes. Dimension ranges are chosen so that, at the
//! paired standard viewpoints and the default camera model (160x120, 90°
//! field of view, 5 cm – 1 m), each scene presents the geometry its mode
//! is defined by: tabletop and doorknob scenes have a dominant support
//! plane, pot-handle scenes have a thin elevated handle and a support patch
//! too small to register as a dominant plane.

use graspscene_core::geom::{Mat3, Point3, RigidTransform, Vec3};
use graspscene_core::mode::Mode;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::primitives::{ObjectLabel, PlaneLabel, SceneLabels, ScenePrimitive, SceneSpec};
use crate::trajectory::CameraPose;

/// The three scene families with defined grasping modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    Tabletop,
    Doorknob,
    PotHandle,
}

impl SceneKind {
    pub fn mode(&self) -> Mode {
        match self {
            SceneKind::Tabletop => Mode::Tabletop,
            SceneKind::Doorknob => Mode::Doorknob,
            SceneKind::PotHandle => Mode::PotHandle,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SceneKind::Tabletop => "tabletop",
            SceneKind::Doorknob => "doorknob",
            SceneKind::PotHandle => "pot-handle",
        }
    }

    pub const ALL: [SceneKind; 3] = [
        SceneKind::Tabletop,
        SceneKind::Doorknob,
        SceneKind::PotHandle,
    ];
}

impl std::str::FromStr for SceneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tabletop" => Ok(SceneKind::Tabletop),
            "doorknob" => Ok(SceneKind::Doorknob),
            "pot-handle" => Ok(SceneKind::PotHandle),
            other => Err(format!("unknown scene kind {other:?}")),
        }
    }
}

/// World gravity for all standard scenes.
fn world_down() -> Vec3 {
    Vec3::new(0.0, 0.0, -1.0)
}

/// Offset mixed into the camera RNG so viewpoint draws never collide with
/// scene draws across nearby seeds.
const CAMERA_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Builds the scene for `kind` at variation `seed`. Deterministic.
pub fn standard_scene(kind: SceneKind, seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SceneKind::Tabletop => tabletop_scene(&mut rng),
        SceneKind::Doorknob => doorknob_scene(&mut rng),
        SceneKind::PotHandle => pot_handle_scene(&mut rng),
    }
}

/// Builds the standard viewpoint for a scene produced by
/// [`standard_scene`] with the same seed. Deterministic.
pub fn standard_camera(kind: SceneKind, scene: &SceneSpec, seed: u64) -> CameraPose {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(CAMERA_SEED_SALT));
    match kind {
        SceneKind::Tabletop => tabletop_camera(scene, &mut rng),
        SceneKind::Doorknob => doorknob_camera(scene, &mut rng),
        SceneKind::PotHandle => pot_handle_camera(scene, &mut rng),
    }
}

fn in_plane_axes(yaw: f64) -> (Vec3, Vec3) {
    let major = Vec3::new(yaw.cos(), yaw.sin(), 0.0);
    let minor = Vec3::z().cross(&major);
    (major, minor)
}

/// A table surface with 1–4 free-standing boxes on it.
fn tabletop_scene(rng: &mut ChaCha8Rng) -> SceneSpec {
    let half_w = rng.random_range(0.30..0.45);
    let half_h = rng.random_range(0.30..0.45);
    let mut primitives = vec![ScenePrimitive::Slab {
        frame: RigidTransform::identity(),
        width: 2.0 * half_w,
        height: 2.0 * half_h,
    }];

    let n_boxes = rng.random_range(1..=4usize);
    let mut objects: Vec<ObjectLabel> = Vec::new();
    let mut placed: Vec<(f64, f64, f64)> = Vec::new(); // (x, y, circumradius)
    for _ in 0..n_boxes {
        let ex: f64 = rng.random_range(0.06..0.14);
        let ey: f64 = rng.random_range(0.04..(0.75 * ex)); // strictly narrower
        let ez = rng.random_range(0.03..0.08);
        let yaw = rng.random_range(0.0..std::f64::consts::PI);
        let circum = 0.5 * (ex * ex + ey * ey).sqrt();

        let mut attempt = 0;
        let placed_at = loop {
            if attempt >= 100 {
                break None;
            }
            attempt += 1;
            let x = rng.random_range(-0.15..0.15);
            let y = rng.random_range(-0.15..0.15);
            let clear = placed
                .iter()
                .all(|&(px, py, pr)| ((x - px).hypot(y - py)) >= circum + pr + 0.02);
            if clear {
                break Some((x, y));
            }
        };
        let Some((x, y)) = placed_at else { continue };
        placed.push((x, y, circum));

        primitives.push(ScenePrimitive::Box {
            pose: RigidTransform::new(RigidTransform::rotation_z(yaw), Vec3::new(x, y, ez / 2.0))
                .expect("z rotation is proper"),
            extents: Vec3::new(ex, ey, ez),
        });
        let (major, minor) = in_plane_axes(yaw);
        let center = Point3::new(x, y, ez / 2.0);
        objects.push(ObjectLabel {
            center,
            axes: [major, minor, Vec3::z()],
            extents: [ex / 2.0, ey / 2.0, ez / 2.0],
            grasp: Some((center + minor * (ey / 2.0), center - minor * (ey / 2.0))),
        });
    }

    SceneSpec {
        primitives,
        gravity: world_down(),
        labels: SceneLabels {
            mode: Mode::Tabletop,
            plane: Some(PlaneLabel {
                normal: Vec3::z(),
                d: 0.0,
            }),
            objects,
        },
    }
}

fn tabletop_camera(scene: &SceneSpec, rng: &mut ChaCha8Rng) -> CameraPose {
    let objects = &scene.labels.objects;
    let mut target = Vec3::zeros();
    for o in objects {
        target += Vec3::new(o.center.x, o.center.y, 0.0);
    }
    if !objects.is_empty() {
        target /= objects.len() as f64;
    }
    let target = Point3::from(target);

    let range = rng.random_range(0.50..0.70);
    let tilt = rng.random_range(20f64.to_radians()..35f64.to_radians());
    let azimuth = rng.random_range(0.0..std::f64::consts::TAU);
    let offset = Vec3::new(
        tilt.sin() * azimuth.cos(),
        tilt.sin() * azimuth.sin(),
        tilt.cos(),
    );
    CameraPose::look_at(target + offset * range, target, world_down())
        .expect("standard tabletop viewpoint is valid")
}

/// A door face with a protruding round knob.
fn doorknob_scene(rng: &mut ChaCha8Rng) -> SceneSpec {
    let width = rng.random_range(0.7..1.0);
    let height = rng.random_range(0.8..1.2);
    // Local x → world x, local y → world z, face normal → world -y: the
    // door stands vertically and faces the approach side.
    let door_rot = Mat3::from_columns(&[Vec3::x(), Vec3::z(), -Vec3::y()]);
    let door = ScenePrimitive::Slab {
        frame: RigidTransform::new(door_rot, Vec3::zeros()).expect("door frame is proper"),
        width,
        height,
    };

    let kx = rng.random_range(-0.08..0.08);
    let kz = rng.random_range(-0.08..0.08);
    let radius = rng.random_range(0.020..0.028);
    let protrusion = rng.random_range(0.045..0.060);
    let knob = ScenePrimitive::Cylinder {
        p0: Point3::new(kx, 0.0, kz),
        p1: Point3::new(kx, -protrusion, kz),
        radius,
    };

    let normal = -Vec3::y(); // toward the approach side
    let major = Vec3::x();
    let minor = normal.cross(&major);
    let center = Point3::new(kx, -protrusion / 2.0, kz);
    SceneSpec {
        primitives: vec![door, knob],
        gravity: world_down(),
        labels: SceneLabels {
            mode: Mode::Doorknob,
            plane: Some(PlaneLabel { normal, d: 0.0 }),
            objects: vec![ObjectLabel {
                center,
                axes: [major, minor, normal],
                extents: [radius, radius, protrusion / 2.0],
                // A round knob has no preferred opposition diameter.
                grasp: None,
            }],
        },
    }
}

fn doorknob_camera(scene: &SceneSpec, rng: &mut ChaCha8Rng) -> CameraPose {
    let knob = &scene.labels.objects[0];
    let target = Point3::new(knob.center.x, 0.0, knob.center.z);
    let range = rng.random_range(0.35..0.45);
    let tx = rng.random_range(-0.25..0.25);
    let tz = rng.random_range(-0.25..0.25);
    let dir = Vec3::new(tx, -1.0, tz).normalize();
    CameraPose::look_at(target + dir * range, target, world_down())
        .expect("standard doorknob viewpoint is valid")
}

/// A thin horizontal handle floating above a small support patch — the view
/// a camera gets when closing on a pot: the handle dominates, the visible
/// support is a sliver. Dimensions keep the whole scene's point budget
/// below the plane fitter's support threshold (a handle this size could
/// otherwise masquerade as a sliver of vertical plane, since its visible
/// shell is thinner than the fitter's inlier band), while the handle alone
/// stays comfortably above the minimum cluster size from every standard
/// viewpoint.
fn pot_handle_scene(rng: &mut ChaCha8Rng) -> SceneSpec {
    let patch_half_w = rng.random_range(0.012..0.015);
    let patch_half_h = rng.random_range(0.012..0.015);
    let patch = ScenePrimitive::Slab {
        frame: RigidTransform::identity(),
        width: 2.0 * patch_half_w,
        height: 2.0 * patch_half_h,
    };

    let length = rng.random_range(0.10..0.11);
    let radius = rng.random_range(0.012..0.0135);
    let elevation = rng.random_range(0.10..0.13);
    let yaw = rng.random_range(0.0..std::f64::consts::PI);
    let (major, minor) = in_plane_axes(yaw);
    let center = Point3::new(0.0, 0.0, elevation);
    let bar = ScenePrimitive::Cylinder {
        p0: center - major * (length / 2.0),
        p1: center + major * (length / 2.0),
        radius,
    };

    SceneSpec {
        primitives: vec![patch, bar],
        gravity: world_down(),
        labels: SceneLabels {
            mode: Mode::PotHandle,
            plane: Some(PlaneLabel {
                normal: Vec3::z(),
                d: 0.0,
            }),
            objects: vec![ObjectLabel {
                center,
                axes: [major, minor, Vec3::z()],
                extents: [length / 2.0, radius, radius],
                grasp: Some((center + minor * radius, center - minor * radius)),
            }],
        },
    }
}

fn pot_handle_camera(scene: &SceneSpec, rng: &mut ChaCha8Rng) -> CameraPose {
    let bar = &scene.labels.objects[0];
    let yaw = bar.axes[0].y.atan2(bar.axes[0].x);
    let range = rng.random_range(0.50..0.55);
    let tilt = rng.random_range(15f64.to_radians()..35f64.to_radians());
    // Come in from the side, never along the bar axis, so the handle's
    // profile and an opposition face are visible.
    let swing = rng.random_range(40f64.to_radians()..140f64.to_radians());
    let sign = if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
    let azimuth = yaw + sign * swing;
    let offset = Vec3::new(
        tilt.sin() * azimuth.cos(),
        tilt.sin() * azimuth.sin(),
        tilt.cos(),
    );
    CameraPose::look_at(bar.center + offset * range, bar.center, world_down())
        .expect("standard pot-handle viewpoint is valid")
}

/// The scene used by grasp-accuracy evaluation: a single whiteboard-eraser
/// sized block centered on a large table, yawed a few degrees. The block is
/// deliberately taller than the plane inlier band so it survives
/// plane-subtraction at every range of the standard approach.
pub fn eraser_scene(seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let yaw = rng.random_range(-15f64.to_radians()..15f64.to_radians());
    let (ex, ey, ez) = (0.14, 0.05, 0.022);
    let slab = ScenePrimitive::Slab {
        frame: RigidTransform::identity(),
        width: 0.8,
        height: 0.8,
    };
    let block = ScenePrimitive::Box {
        pose: RigidTransform::new(RigidTransform::rotation_z(yaw), Vec3::new(0.0, 0.0, ez / 2.0))
            .expect("z rotation is proper"),
        extents: Vec3::new(ex, ey, ez),
    };
    let (major, minor) = in_plane_axes(yaw);
    let center = Point3::new(0.0, 0.0, ez / 2.0);
    SceneSpec {
        primitives: vec![slab, block],
        gravity: world_down(),
        labels: SceneLabels {
            mode: Mode::Tabletop,
            plane: Some(PlaneLabel {
                normal: Vec3::z(),
                d: 0.0,
            }),
            objects: vec![ObjectLabel {
                center,
                axes: [major, minor, Vec3::z()],
                extents: [ex / 2.0, ey / 2.0, ez / 2.0],
                grasp: Some((center + minor * (ey / 2.0), center - minor * (ey / 2.0))),
            }],
        },
    }
}

/// A fixed cluttered tabletop and viewpoint for latency measurements.
pub fn bench_scene() -> (SceneSpec, CameraPose) {
    let slab = ScenePrimitive::Slab {
        frame: RigidTransform::identity(),
        width: 0.8,
        height: 0.8,
    };
    let boxes = [
        (0.10, 0.10, 0.12, 0.06, 0.05, 0.3),
        (-0.12, 0.08, 0.10, 0.05, 0.04, 1.1),
        (0.08, -0.12, 0.09, 0.045, 0.06, 2.0),
        (-0.10, -0.10, 0.11, 0.05, 0.035, 2.7),
    ];
    let mut primitives = vec![slab];
    for &(x, y, ex, ey, ez, yaw) in &boxes {
        primitives.push(ScenePrimitive::Box {
            pose: RigidTransform::new(
                RigidTransform::rotation_z(yaw),
                Vec3::new(x, y, ez / 2.0),
            )
            .expect("z rotation is proper"),
            extents: Vec3::new(ex, ey, ez),
        });
    }
    let scene = SceneSpec {
        primitives,
        gravity: world_down(),
        labels: SceneLabels {
            mode: Mode::Tabletop,
            plane: Some(PlaneLabel {
                normal: Vec3::z(),
                d: 0.0,
            }),
            objects: vec![],
        },
    };
    let offset = Vec3::new(
        28f64.to_radians().sin() * 0.7f64.cos(),
        28f64.to_radians().sin() * 0.7f64.sin(),
        28f64.to_radians().cos(),
    );
    let pose = CameraPose::look_at(Point3::origin() + offset * 0.55, Point3::origin(), world_down())
        .expect("bench viewpoint is valid");
    (scene, pose)
}
