//! Plain-text scene files.
//!
//! One record per line, whitespace-separated fields, `#` starts a comment.
//! Floats are written in Rust's shortest round-tripping form, so a
//! store/load cycle reproduces the scene exactly.
//!
//! ```text
//! gravity  gx gy gz
//! mode     tabletop|doorknob|pot-handle|unknown
//! slab     r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz width height
//! box      r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz ex ey ez
//! cylinder x0 y0 z0 x1 y1 z1 radius
//! plane    nx ny nz d                      # ground-truth plane label
//! object   cx cy cz  ax.. ax.. ax..  e0 e1 e2   # center, 3 axes, extents
//! grasp    ax ay az bx by bz               # attaches to the last object
//! ```

use std::fmt::Write as _;
use std::path::Path;

use graspscene_core::error::{CoreError, Result};
use graspscene_core::geom::{Mat3, Point3, RigidTransform, Vec3};

use crate::primitives::{ObjectLabel, PlaneLabel, SceneLabels, ScenePrimitive, SceneSpec};

fn push_pose(line: &mut String, t: &RigidTransform) {
    for r in 0..3 {
        for c in 0..3 {
            write!(line, " {}", t.rotation[(r, c)]).unwrap();
        }
    }
    write!(line, " {} {} {}", t.translation.x, t.translation.y, t.translation.z).unwrap();
}

/// Serializes `scene` to a text scene file.
pub fn store_scene(scene: &SceneSpec, path: &Path) -> Result<()> {
    let mut out = String::new();
    writeln!(
        out,
        "gravity {} {} {}",
        scene.gravity.x, scene.gravity.y, scene.gravity.z
    )
    .unwrap();
    writeln!(out, "mode {}", scene.labels.mode).unwrap();
    for p in &scene.primitives {
        let mut line = String::new();
        match p {
            ScenePrimitive::Slab {
                frame,
                width,
                height,
            } => {
                line.push_str("slab");
                push_pose(&mut line, frame);
                write!(line, " {width} {height}").unwrap();
            }
            ScenePrimitive::Box { pose, extents } => {
                line.push_str("box");
                push_pose(&mut line, pose);
                write!(line, " {} {} {}", extents.x, extents.y, extents.z).unwrap();
            }
            ScenePrimitive::Cylinder { p0, p1, radius } => {
                write!(
                    line,
                    "cylinder {} {} {} {} {} {} {radius}",
                    p0.x, p0.y, p0.z, p1.x, p1.y, p1.z
                )
                .unwrap();
            }
        }
        writeln!(out, "{line}").unwrap();
    }
    if let Some(plane) = &scene.labels.plane {
        writeln!(
            out,
            "plane {} {} {} {}",
            plane.normal.x, plane.normal.y, plane.normal.z, plane.d
        )
        .unwrap();
    }
    for obj in &scene.labels.objects {
        let mut line = String::new();
        write!(line, "object {} {} {}", obj.center.x, obj.center.y, obj.center.z).unwrap();
        for axis in &obj.axes {
            write!(line, " {} {} {}", axis.x, axis.y, axis.z).unwrap();
        }
        write!(line, " {} {} {}", obj.extents[0], obj.extents[1], obj.extents[2]).unwrap();
        writeln!(out, "{line}").unwrap();
        if let Some((a, b)) = &obj.grasp {
            writeln!(out, "grasp {} {} {} {} {} {}", a.x, a.y, a.z, b.x, b.y, b.z).unwrap();
        }
    }
    std::fs::write(path, out).map_err(|e| CoreError::io(path, e))
}

fn parse_floats(path: &Path, line_no: usize, fields: &[&str], expect: usize) -> Result<Vec<f64>> {
    if fields.len() != expect {
        return Err(CoreError::parse(
            path,
            line_no,
            format!("expected {expect} fields, found {}", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| CoreError::parse(path, line_no, format!("bad number {f:?}")))
        })
        .collect()
}

fn pose_from(path: &Path, line_no: usize, v: &[f64]) -> Result<RigidTransform> {
    let rotation = Mat3::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]);
    let translation = Vec3::new(v[9], v[10], v[11]);
    RigidTransform::new(rotation, translation)
        .map_err(|e| CoreError::parse(path, line_no, format!("bad pose: {e}")))
}

/// Parses a text scene file written by [`store_scene`].
pub fn load_scene(path: &Path) -> Result<SceneSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut gravity: Option<Vec3> = None;
    let mut mode = None;
    let mut primitives = Vec::new();
    let mut plane = None;
    let mut objects: Vec<ObjectLabel> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let keyword = parts.next().unwrap();
        let fields: Vec<&str> = parts.collect();
        match keyword {
            "gravity" => {
                let v = parse_floats(path, line_no, &fields, 3)?;
                gravity = Some(Vec3::new(v[0], v[1], v[2]));
            }
            "mode" => {
                if fields.len() != 1 {
                    return Err(CoreError::parse(path, line_no, "expected one mode name"));
                }
                mode = Some(
                    fields[0]
                        .parse()
                        .map_err(|e: String| CoreError::parse(path, line_no, e))?,
                );
            }
            "slab" => {
                let v = parse_floats(path, line_no, &fields, 14)?;
                primitives.push(ScenePrimitive::Slab {
                    frame: pose_from(path, line_no, &v)?,
                    width: v[12],
                    height: v[13],
                });
            }
            "box" => {
                let v = parse_floats(path, line_no, &fields, 15)?;
                primitives.push(ScenePrimitive::Box {
                    pose: pose_from(path, line_no, &v)?,
                    extents: Vec3::new(v[12], v[13], v[14]),
                });
            }
            "cylinder" => {
                let v = parse_floats(path, line_no, &fields, 7)?;
                primitives.push(ScenePrimitive::Cylinder {
                    p0: Point3::new(v[0], v[1], v[2]),
                    p1: Point3::new(v[3], v[4], v[5]),
                    radius: v[6],
                });
            }
            "plane" => {
                let v = parse_floats(path, line_no, &fields, 4)?;
                plane = Some(PlaneLabel {
                    normal: Vec3::new(v[0], v[1], v[2]),
                    d: v[3],
                });
            }
            "object" => {
                let v = parse_floats(path, line_no, &fields, 15)?;
                objects.push(ObjectLabel {
                    center: Point3::new(v[0], v[1], v[2]),
                    axes: [
                        Vec3::new(v[3], v[4], v[5]),
                        Vec3::new(v[6], v[7], v[8]),
                        Vec3::new(v[9], v[10], v[11]),
                    ],
                    extents: [v[12], v[13], v[14]],
                    grasp: None,
                });
            }
            "grasp" => {
                let v = parse_floats(path, line_no, &fields, 6)?;
                let Some(obj) = objects.last_mut() else {
                    return Err(CoreError::parse(path, line_no, "grasp before any object"));
                };
                obj.grasp = Some((
                    Point3::new(v[0], v[1], v[2]),
                    Point3::new(v[3], v[4], v[5]),
                ));
            }
            other => {
                return Err(CoreError::parse(
                    path,
                    line_no,
                    format!("unknown record {other:?}"),
                ));
            }
        }
    }

    let Some(gravity) = gravity else {
        return Err(CoreError::parse(path, 0, "missing gravity record"));
    };
    let Some(mode) = mode else {
        return Err(CoreError::parse(path, 0, "missing mode record"));
    };
    let scene = SceneSpec {
        primitives,
        gravity,
        labels: SceneLabels {
            mode,
            plane,
            objects,
        },
    };
    scene.validate()?;
    Ok(scene)
}
