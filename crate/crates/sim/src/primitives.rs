//! Analytic scene primitives and ground-truth labels.

use graspscene_core::error::{CoreError, Result};
use graspscene_core::geom::{Point3, RigidTransform, Vec3};
use graspscene_core::mode::Mode;

/// A solid an exact ray can hit. All coordinates are world-frame meters.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenePrimitive {
    /// A rectangular patch of plane. `frame` maps the local frame — the
    /// rectangle spans `x ∈ [-width/2, width/2]`, `y ∈ [-height/2, height/2]`
    /// at `z = 0` — into the world; the face normal is local `+z`.
    Slab {
        frame: RigidTransform,
        width: f64,
        height: f64,
    },
    /// An axis-aligned box in its local frame, centered at the local origin
    /// with the given full extents, posed into the world.
    Box {
        pose: RigidTransform,
        extents: Vec3,
    },
    /// A capped cylinder around the segment `p0 → p1`.
    Cylinder { p0: Point3, p1: Point3, radius: f64 },
}

impl ScenePrimitive {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScenePrimitive::Slab { width, height, .. } => {
                if !(*width > 0.0) || !(*height > 0.0) {
                    return Err(CoreError::InvalidArgument(
                        "slab dimensions must be positive".into(),
                    ));
                }
            }
            ScenePrimitive::Box { extents, .. } => {
                if !(extents.x > 0.0) || !(extents.y > 0.0) || !(extents.z > 0.0) {
                    return Err(CoreError::InvalidArgument(
                        "box extents must be positive".into(),
                    ));
                }
            }
            ScenePrimitive::Cylinder { p0, p1, radius } => {
                if !(*radius > 0.0) {
                    return Err(CoreError::InvalidArgument(
                        "cylinder radius must be positive".into(),
                    ));
                }
                if (p1 - p0).norm() <= 0.0 {
                    return Err(CoreError::InvalidArgument(
                        "cylinder endpoints must be distinct".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Ground-truth plane equation `normal · p + d = 0` in world coordinates,
/// with the normal pointing away from the solid side (up for tables, toward
/// the approach side for doors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneLabel {
    pub normal: Vec3,
    pub d: f64,
}

/// Ground-truth box and grasp for one object.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectLabel {
    pub center: Point3,
    /// `[major, minor, normal]`, unit, world frame.
    pub axes: [Vec3; 3],
    /// Half-extents along `axes`.
    pub extents: [f64; 3],
    /// Ideal opposition contact pair, if the object has a well-defined one.
    pub grasp: Option<(Point3, Point3)>,
}

/// Everything the evaluation harness needs to score a detection.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneLabels {
    pub mode: Mode,
    pub plane: Option<PlaneLabel>,
    pub objects: Vec<ObjectLabel>,
}

/// A renderable scene with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub primitives: Vec<ScenePrimitive>,
    /// Unit vector gravity pulls along, world frame.
    pub gravity: Vec3,
    pub labels: SceneLabels,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        for p in &self.primitives {
            p.validate()?;
        }
        if (self.gravity.norm() - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidArgument(
                "scene gravity must be a unit vector".into(),
            ));
        }
        Ok(())
    }
}
