//! JSON detection records — one per processed frame.

use graspscene_core::mode::ModeDecision;
use serde::{Deserialize, Serialize};

/// Version of the record layout; bumped on breaking changes, mirrored in
/// `schemas/detection_record.schema.json`.
pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PlaneRecord {
    pub normal: [f64; 3],
    pub d: f64,
    pub inliers: usize,
    pub prominence: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraspRecord {
    pub point_a: [f64; 3],
    pub point_b: [f64; 3],
    pub axis: [f64; 3],
    pub width_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObjectRecord {
    pub cluster_size: usize,
    pub center: [f64; 3],
    /// Rows: major, minor, normal.
    pub axes: [[f64; 3]; 3],
    /// Half-extents along the axes, meters.
    pub extents: [f64; 3],
    pub grasp: GraspRecord,
}

/// Wall-clock stage timings in milliseconds. `total_ms` covers the whole
/// frame and is never less than any single stage.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq)]
pub struct TimingRecord {
    pub filter_ms: f64,
    pub deproject_ms: f64,
    pub gravity_ms: f64,
    pub detect_ms: f64,
    pub total_ms: f64,
}

/// One frame's detection outcome, as emitted on the JSON-lines stream.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DetectionRecord {
    pub schema_version: u32,
    pub frame: String,
    pub mode: String,
    pub confidence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane: Option<PlaneRecord>,
    pub objects: Vec<ObjectRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: TimingRecord,
}

fn vec3(v: &graspscene_core::geom::Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn point3(p: &graspscene_core::geom::Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

impl DetectionRecord {
    /// Flattens a pipeline decision into the serializable record.
    pub fn from_decision(frame: &str, decision: &ModeDecision, timing: TimingRecord) -> Self {
        DetectionRecord {
            schema_version: RECORD_SCHEMA_VERSION,
            frame: frame.to_string(),
            mode: decision.mode.to_string(),
            confidence: decision.confidence,
            plane: decision.plane.as_ref().map(|p| PlaneRecord {
                normal: vec3(&p.normal),
                d: p.d,
                inliers: p.inlier_count(),
                prominence: p.prominence,
            }),
            objects: decision
                .objects
                .iter()
                .map(|o| ObjectRecord {
                    cluster_size: o.cluster.len(),
                    center: point3(&o.bounding_box.center),
                    axes: [
                        vec3(&o.bounding_box.axes[0]),
                        vec3(&o.bounding_box.axes[1]),
                        vec3(&o.bounding_box.axes[2]),
                    ],
                    extents: o.bounding_box.extents,
                    grasp: GraspRecord {
                        point_a: point3(&o.grasp.point_a),
                        point_b: point3(&o.grasp.point_b),
                        axis: vec3(&o.grasp.axis),
                        width_m: o.grasp.width,
                    },
                })
                .collect(),
            error: None,
            timing,
        }
    }

    /// A record for a frame that could not be processed at all.
    pub fn failed(frame: &str, error: impl Into<String>) -> Self {
        DetectionRecord {
            schema_version: RECORD_SCHEMA_VERSION,
            frame: frame.to_string(),
            mode: "unknown".into(),
            confidence: 0.0,
            plane: None,
            objects: Vec::new(),
            error: Some(error.into()),
            timing: TimingRecord::default(),
        }
    }

    /// Serializes to one JSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }

    /// The record as a JSON value with timings removed — the byte-stable
    /// form used for reproducibility comparisons.
    pub fn timing_free_value(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("record serialization cannot fail");
        v.as_object_mut().unwrap().remove("timing");
        v
    }
}
