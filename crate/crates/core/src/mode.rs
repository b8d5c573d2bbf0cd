//! Scene-mode detection: decide how the scene in front of the camera should
//! be grasped.

use crate::cloud::PointCloud;
use crate::orientation::{classify_plane_orientation, GravityEstimate, PlaneOrientationClass};
use crate::plane::{convex_hull, extrude_hull, fit_plane_ransac, PlaneModel, RansacParams};
use crate::segment::{
    cluster_in_volume, detect_pot_handle, grasp_points, pca_box, DetectedObject, PotHandleParams,
};

/// The grasping context of a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Objects resting on a dominant horizontal surface.
    Tabletop,
    /// An object protruding from a dominant vertical surface.
    Doorknob,
    /// A thin handle floating above its support, with no dominant plane.
    PotHandle,
    /// No confident interpretation.
    Unknown,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Tabletop => "tabletop",
            Mode::Doorknob => "doorknob",
            Mode::PotHandle => "pot-handle",
            Mode::Unknown => "unknown",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tabletop" => Ok(Mode::Tabletop),
            "doorknob" => Ok(Mode::Doorknob),
            "pot-handle" => Ok(Mode::PotHandle),
            "unknown" => Ok(Mode::Unknown),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tuning for the full detection pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectParams {
    pub ransac: RansacParams,
    /// Half-cone (degrees) for horizontal/vertical classification.
    pub orientation_tol_deg: f64,
    /// Height of the search volume above a detected plane, m.
    pub extrude_height: f64,
    /// Euclidean clustering tolerance, m.
    pub cluster_tol: f64,
    /// Smallest cluster reported as an object.
    pub min_cluster_size: usize,
    /// Minimum elevation of a pot-handle cluster above its reference, m.
    pub pot_min_height: f64,
    /// Largest minor half-extent of a graspable handle, m.
    pub pot_max_minor_extent: f64,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            ransac: RansacParams::default(),
            orientation_tol_deg: crate::orientation::DEFAULT_ORIENTATION_TOL_DEG,
            extrude_height: 0.40,
            cluster_tol: 0.02,
            min_cluster_size: 30,
            pot_min_height: 0.05,
            pot_max_minor_extent: 0.025,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> crate::error::Result<()> {
        self.ransac.validate()?;
        if !(self.orientation_tol_deg > 0.0 && self.orientation_tol_deg < 45.0) {
            return Err(crate::error::CoreError::InvalidArgument(
                "orientation tolerance must be in (0, 45) degrees".into(),
            ));
        }
        if !(self.extrude_height > self.ransac.distance_threshold) {
            return Err(crate::error::CoreError::InvalidArgument(
                "extrusion height must exceed the plane distance threshold".into(),
            ));
        }
        if !(self.cluster_tol > 0.0) {
            return Err(crate::error::CoreError::InvalidArgument(
                "cluster tolerance must be positive".into(),
            ));
        }
        if self.min_cluster_size == 0 {
            return Err(crate::error::CoreError::InvalidArgument(
                "minimum cluster size must be at least 1".into(),
            ));
        }
        if !(self.pot_min_height > 0.0) || !(self.pot_max_minor_extent > 0.0) {
            return Err(crate::error::CoreError::InvalidArgument(
                "pot-handle thresholds must be positive".into(),
            ));
        }
        Ok(())
    }

    fn pot_params(&self) -> PotHandleParams {
        PotHandleParams {
            min_height: self.pot_min_height,
            max_minor_extent: self.pot_max_minor_extent,
            cluster_tol: self.cluster_tol,
            min_cluster_size: self.min_cluster_size,
        }
    }
}

/// The outcome of scene-mode detection.
///
/// Invariants: `confidence` is in `[0, 1]`; `mode == Unknown` implies
/// `objects` is empty and `confidence == 0`; `Tabletop` and `Doorknob` imply
/// a plane is present; `PotHandle` implies exactly one object (the handle).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecision {
    pub mode: Mode,
    pub confidence: f64,
    /// The dominant plane, when one was fitted (present for plane modes and
    /// for diagnostics on some unknown/pot outcomes).
    pub plane: Option<PlaneModel>,
    pub objects: Vec<DetectedObject>,
}

impl ModeDecision {
    fn unknown(plane: Option<PlaneModel>) -> Self {
        ModeDecision {
            mode: Mode::Unknown,
            confidence: 0.0,
            plane,
            objects: Vec::new(),
        }
    }
}

/// Classifies the scene and extracts graspable objects.
///
/// The flow mirrors how a grasp assistant decides what it is looking at:
///
/// 1. Fit the dominant plane. If it is *prominent* (outlier/inlier ratio at
///    most the prominence threshold), the plane drives the mode: horizontal →
///    tabletop, vertical → doorknob, oblique → unknown. Objects are the
///    clusters inside the convex hull volume above the plane, boxed and
///    given opposition grasps; confidence is how far the prominence sits
///    below its threshold.
/// 2. Otherwise, look for an elevated thin handle (pot-handle mode), using
///    the non-prominent plane — or a virtual plane through the lowest point
///    — as the elevation reference. Confidence is the handle's share of the
///    off-plane points.
/// 3. Anything else is unknown with confidence 0; every internal failure
///    (degenerate hull, too few points) also degrades to unknown rather
///    than erroring.
pub fn detect_mode(
    cloud: &PointCloud,
    gravity: &GravityEstimate,
    params: &DetectParams,
) -> ModeDecision {
    if params.validate().is_err() || cloud.len() < 3 {
        return ModeDecision::unknown(None);
    }

    let plane = match fit_plane_ransac(cloud, &params.ransac) {
        Ok(p) => p,
        Err(_) => None,
    };

    if let Some(model) = &plane {
        if model.prominence <= params.ransac.prominence_threshold {
            let orientation =
                classify_plane_orientation(&model.normal, gravity, params.orientation_tol_deg);
            let mode = match orientation.class {
                PlaneOrientationClass::Horizontal => Mode::Tabletop,
                PlaneOrientationClass::Vertical => Mode::Doorknob,
                PlaneOrientationClass::Oblique => return ModeDecision::unknown(plane),
            };
            return plane_mode_decision(cloud, mode, model.clone(), params);
        }
    }

    // No dominant plane: try the elevated-handle interpretation.
    if let Some(handle) =
        detect_pot_handle(cloud, plane.as_ref(), &gravity.direction, &params.pot_params())
    {
        let plane_points = plane.as_ref().map_or(0, |m| m.inlier_count());
        let off_plane = (cloud.len() - plane_points).max(1);
        let confidence = (handle.cluster.len() as f64 / off_plane as f64).clamp(0.0, 1.0);
        return ModeDecision {
            mode: Mode::PotHandle,
            confidence,
            plane,
            objects: vec![handle],
        };
    }

    ModeDecision::unknown(plane)
}

/// Builds the decision for a prominent horizontal or vertical plane.
fn plane_mode_decision(
    cloud: &PointCloud,
    mode: Mode,
    model: PlaneModel,
    params: &DetectParams,
) -> ModeDecision {
    let base = match convex_hull(&model, cloud) {
        Ok(b) => b,
        Err(_) => return ModeDecision::unknown(Some(model)),
    };
    let prism = match extrude_hull(base, params.extrude_height, params.ransac.distance_threshold) {
        Ok(p) => p,
        Err(_) => return ModeDecision::unknown(Some(model)),
    };

    let clusters = cluster_in_volume(cloud, &prism, params.cluster_tol, params.min_cluster_size);
    let mut objects = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let Ok(bbox) = pca_box(&cluster, cloud, &model) else {
            continue;
        };
        let Ok(grasp) = grasp_points(&bbox, &cluster, cloud) else {
            continue;
        };
        objects.push(DetectedObject {
            cluster,
            bounding_box: bbox,
            grasp,
        });
    }

    let confidence =
        (1.0 - model.prominence / params.ransac.prominence_threshold).clamp(0.0, 1.0);
    ModeDecision {
        mode,
        confidence,
        plane: Some(model),
        objects,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point3, Vec3};
    use approx::assert_relative_eq;

    fn gravity_along(v: Vec3) -> GravityEstimate {
        GravityEstimate {
            direction: v.normalize(),
            sample_count: 10,
        }
    }

    /// Dense plane patch z = z0 (normal faces the camera at the origin).
    fn plane_patch(z0: f64, half: f64, step: f64) -> Vec<Point3> {
        let mut pts = Vec::new();
        let mut x = -half;
        while x <= half + 1e-12 {
            let mut y = -half;
            while y <= half + 1e-12 {
                pts.push(Point3::new(x, y, z0));
                y += step;
            }
            x += step;
        }
        pts
    }

    /// A solid little box of points sitting on the plane z = z0, i.e. its
    /// points extend from the plane toward the camera.
    fn box_on_plane(cx: f64, cy: f64, z0: f64, hx: f64, hy: f64, height: f64) -> Vec<Point3> {
        let step = 0.008;
        let mut pts = Vec::new();
        let mut x = -hx;
        while x <= hx + 1e-12 {
            let mut y = -hy;
            while y <= hy + 1e-12 {
                let mut h = 0.0;
                // Start just above the plane's inlier band.
                while h <= height + 1e-12 {
                    if h > 0.016 {
                        pts.push(Point3::new(cx + x, cy + y, z0 - h));
                    }
                    h += step;
                }
                y += step;
            }
            x += step;
        }
        pts
    }

    #[test]
    fn tabletop_scene_with_one_object() {
        let mut pts = plane_patch(0.5, 0.25, 0.01); // 2601 points
        let obj = box_on_plane(0.05, 0.0, 0.5, 0.05, 0.02, 0.05);
        pts.extend(obj);
        let cloud = PointCloud::from_points(pts);
        // Camera looks straight down: gravity along the optical axis.
        let g = gravity_along(Vec3::new(0.0, 0.0, 1.0));
        let decision = detect_mode(&cloud, &g, &DetectParams::default());

        assert_eq!(decision.mode, Mode::Tabletop);
        assert!(decision.confidence > 0.5, "confidence {}", decision.confidence);
        assert!(decision.plane.is_some());
        assert_eq!(decision.objects.len(), 1);
        let obj = &decision.objects[0];
        assert!(obj.grasp.width > 0.0);
        assert_relative_eq!(
            obj.grasp.axis.dot(&decision.plane.as_ref().unwrap().normal),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn bare_plane_is_tabletop_with_no_objects() {
        let cloud = PointCloud::from_points(plane_patch(0.5, 0.25, 0.01));
        let g = gravity_along(Vec3::new(0.0, 0.0, 1.0));
        let decision = detect_mode(&cloud, &g, &DetectParams::default());
        assert_eq!(decision.mode, Mode::Tabletop);
        assert_relative_eq!(decision.confidence, 1.0);
        assert!(decision.objects.is_empty());
    }

    #[test]
    fn vertical_plane_gives_doorknob() {
        // Same frontal plane, but gravity is now image-down (camera looking
        // horizontally at a door).
        let mut pts = plane_patch(0.5, 0.3, 0.01);
        pts.extend(box_on_plane(0.0, 0.0, 0.5, 0.025, 0.025, 0.05));
        let cloud = PointCloud::from_points(pts);
        let g = gravity_along(Vec3::new(0.0, 1.0, 0.0));
        let decision = detect_mode(&cloud, &g, &DetectParams::default());
        assert_eq!(decision.mode, Mode::Doorknob);
        assert_eq!(decision.objects.len(), 1);
    }

    #[test]
    fn oblique_plane_is_unknown() {
        let cloud = PointCloud::from_points(plane_patch(0.5, 0.25, 0.01));
        // Gravity 45° off the plane normal.
        let g = gravity_along(Vec3::new(0.0, 1.0, 1.0));
        let decision = detect_mode(&cloud, &g, &DetectParams::default());
        assert_eq!(decision.mode, Mode::Unknown);
        assert_relative_eq!(decision.confidence, 0.0);
        assert!(decision.plane.is_some(), "plane kept for diagnostics");
        assert!(decision.objects.is_empty());
    }

    #[test]
    fn elevated_bar_without_dominant_plane_is_pot_handle() {
        // A small support patch (too few points for a plane at the default
        // min_inliers) and the top surface of a thin bar 10 cm above it.
        let mut pts = plane_patch(0.5, 0.04, 0.01); // 81 points < min_inliers
        let mut x = -0.05;
        while x <= 0.05 + 1e-12 {
            let mut y = -0.01;
            while y <= 0.01 + 1e-12 {
                pts.push(Point3::new(x, y, 0.40)); // 39 points: cluster-sized,
                y += 0.008; // but far below min_inliers
            }
            x += 0.008;
        }
        let cloud = PointCloud::from_points(pts);
        let g = gravity_along(Vec3::new(0.0, 0.0, 1.0));
        let decision = detect_mode(&cloud, &g, &DetectParams::default());
        assert_eq!(decision.mode, Mode::PotHandle);
        assert_eq!(decision.objects.len(), 1);
        assert!(decision.confidence > 0.0 && decision.confidence <= 1.0);
        assert!(decision.plane.is_none());
    }

    #[test]
    fn tiny_cloud_is_unknown() {
        let cloud = PointCloud::from_points(vec![Point3::new(0.0, 0.0, 0.3)]);
        let g = gravity_along(Vec3::new(0.0, 0.0, 1.0));
        let decision = detect_mode(&cloud, &g, &DetectParams::default());
        assert_eq!(decision.mode, Mode::Unknown);
        assert_relative_eq!(decision.confidence, 0.0);
    }

    #[test]
    fn empty_cloud_is_unknown() {
        let decision = detect_mode(
            &PointCloud::new(),
            &gravity_along(Vec3::new(0.0, 0.0, 1.0)),
            &DetectParams::default(),
        );
        assert_eq!(decision.mode, Mode::Unknown);
    }

    #[test]
    fn mode_strings_round_trip() {
        for mode in [Mode::Tabletop, Mode::Doorknob, Mode::PotHandle, Mode::Unknown] {
            let parsed: Mode = mode.as_str().parse().unwrap();
            assert_eq!(parsed, mode);
        }
        assert!("table".parse::<Mode>().is_err());
    }
}
