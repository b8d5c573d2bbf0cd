//! Synthetic depth-camera simulator for the grasp-context pipeline.
//!
//! Scenes are built from analytic primitives ([`primitives`]), rendered into
//! depth frames by exact ray casting ([`render`]), degraded with a
//! distance-dependent noise model ([`noise`]), and paired with synthetic
//! accelerometer data ([`imu`]). [`scenes`] provides seeded families of
//! tabletop / doorknob / pot-handle scenes with ground-truth labels, and
//! [`trajectory`] builds camera approach paths.
//!
//! World convention: right-handed, `+z` up, gravity `(0, 0, -1)`. Camera
//! poses map world to camera coordinates (camera `+z` forward, `+y` image
//! down).

pub mod imu;
pub mod noise;
pub mod primitives;
pub mod render;
pub mod scene_io;
pub mod scenes;
pub mod trajectory;

pub use imu::synth_imu;
pub use noise::{apply_noise, NoiseModel};
pub use primitives::{ObjectLabel, PlaneLabel, SceneLabels, ScenePrimitive, SceneSpec};
pub use render::render_depth;
pub use scene_io::{load_scene, store_scene};
pub use scenes::{bench_scene, eraser_scene, standard_camera, standard_scene, SceneKind};
pub use trajectory::{make_approach, CameraPose, Trajectory};
