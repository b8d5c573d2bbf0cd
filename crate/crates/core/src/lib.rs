//! Core perception for grasping assistance on short-range depth cameras.
//!
//! The pipeline turns a raw depth frame into a scene-context decision:
//!
//! 1. [`camera`] — invalid-pixel filtering and pinhole deprojection into a
//!    metric point cloud.
//! 2. [`orientation`] — gravity estimation from accelerometer samples, used to
//!    classify plane orientation (horizontal / vertical / oblique).
//! 3. [`plane`] — RANSAC plane fitting with total-least-squares refinement,
//!    iterative multi-plane extraction, and convex-hull volumes of interest.
//! 4. [`segment`] — Euclidean clustering above a support plane, in-plane PCA
//!    bounding boxes, and opposition grasp point selection.
//! 5. [`mode`] — the scene-mode decision (tabletop / doorknob / pot-handle /
//!    unknown) built from the stages above.
//!
//! All geometry is metric (meters) in a right-handed camera frame: `+z` along
//! the optical axis, `+x` right, `+y` down in the image.

pub mod camera;
pub mod cloud;
pub mod error;
pub mod geom;
pub mod mode;
pub mod orientation;
pub mod plane;
pub mod segment;

pub use camera::{CameraIntrinsics, DepthFrame};
pub use cloud::PointCloud;
pub use error::{CoreError, Result};
pub use geom::{Mat3, Point3, RigidTransform, Vec3};
pub use mode::{DetectParams, Mode, ModeDecision};
pub use orientation::{GravityEstimate, ImuSample, PlaneOrientation, PlaneOrientationClass};
pub use plane::{HullBase, HullPrism, PlaneModel, RansacParams};
pub use segment::{Cluster, DetectedObject, GraspEstimate, ObjectBox, PotHandleParams};
