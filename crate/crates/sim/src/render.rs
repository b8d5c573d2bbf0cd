//! Exact ray-cast depth rendering of analytic scenes.

use graspscene_core::camera::{CameraIntrinsics, DepthFrame};
use graspscene_core::geom::{Point3, Vec3};

use crate::primitives::{ScenePrimitive, SceneSpec};
use crate::trajectory::CameraPose;

/// Minimum ray parameter; hits closer than this are treated as numerical
/// artifacts of a surface at the ray origin.
const RAY_EPS: f64 = 1e-9;

/// Renders the scene into a depth frame.
///
/// Each pixel casts the exact pinhole ray; the recorded value is the
/// *z-depth* — the distance along the optical axis, not the Euclidean ray
/// length — which matches what the deprojection model expects. Pixels whose
/// nearest hit falls outside `[min_range, max_range]`, and pixels that hit
/// nothing, are invalid.
pub fn render_depth(
    scene: &SceneSpec,
    pose: &CameraPose,
    intrinsics: &CameraIntrinsics,
) -> DepthFrame {
    let mut frame = DepthFrame::empty(*intrinsics);
    let rot_t = pose.transform().rotation.transpose();
    let center = pose.center();

    for v in 0..intrinsics.height {
        for u in 0..intrinsics.width {
            // Unnormalized camera ray with unit z component, so the ray
            // parameter at a hit *is* the z-depth.
            let dir_cam = Vec3::new(
                (u as f64 - intrinsics.cx) / intrinsics.fx,
                (v as f64 - intrinsics.cy) / intrinsics.fy,
                1.0,
            );
            let dir_world = rot_t * dir_cam;

            let mut nearest = f64::INFINITY;
            for prim in &scene.primitives {
                if let Some(t) = intersect(prim, &center, &dir_world) {
                    if t < nearest {
                        nearest = t;
                    }
                }
            }
            if nearest >= intrinsics.min_range && nearest <= intrinsics.max_range {
                frame.set(u, v, nearest);
            }
        }
    }
    frame
}

/// Nearest positive ray parameter where `origin + t·dir` meets the
/// primitive, if any.
fn intersect(prim: &ScenePrimitive, origin: &Point3, dir: &Vec3) -> Option<f64> {
    match prim {
        ScenePrimitive::Slab {
            frame,
            width,
            height,
        } => {
            let normal = frame.rotation * Vec3::z();
            let anchor = Point3::from(frame.translation);
            let denom = normal.dot(dir);
            if denom.abs() < 1e-12 {
                return None;
            }
            let t = normal.dot(&(anchor - origin)) / denom;
            if t <= RAY_EPS {
                return None;
            }
            let hit = origin + dir * t;
            let local = frame.rotation.transpose() * (hit - anchor);
            if local.x.abs() <= width / 2.0 && local.y.abs() <= height / 2.0 {
                Some(t)
            } else {
                None
            }
        }
        ScenePrimitive::Box { pose, extents } => {
            let rot_t = pose.rotation.transpose();
            let o = rot_t * (origin.coords - pose.translation);
            let d = rot_t * dir;
            let half = extents / 2.0;
            let mut t_enter = f64::NEG_INFINITY;
            let mut t_exit = f64::INFINITY;
            for i in 0..3 {
                if d[i].abs() < 1e-12 {
                    if o[i].abs() > half[i] {
                        return None;
                    }
                    continue;
                }
                let mut t1 = (-half[i] - o[i]) / d[i];
                let mut t2 = (half[i] - o[i]) / d[i];
                if t1 > t2 {
                    std::mem::swap(&mut t1, &mut t2);
                }
                t_enter = t_enter.max(t1);
                t_exit = t_exit.min(t2);
                if t_exit < t_enter {
                    return None;
                }
            }
            if t_exit <= RAY_EPS {
                return None;
            }
            Some(if t_enter > RAY_EPS { t_enter } else { t_exit })
        }
        ScenePrimitive::Cylinder { p0, p1, radius } => {
            let axis = p1 - p0;
            let len = axis.norm();
            let a_hat = axis / len;
            let oc = origin - p0;

            let mut best: Option<f64> = None;
            let mut consider = |t: f64| {
                if t > RAY_EPS && best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            };

            // Lateral surface.
            let d_perp = dir - a_hat * dir.dot(&a_hat);
            let oc_perp = oc - a_hat * oc.dot(&a_hat);
            let a = d_perp.norm_squared();
            if a > 1e-16 {
                let b = 2.0 * oc_perp.dot(&d_perp);
                let c = oc_perp.norm_squared() - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                        let s = (oc + dir * t).dot(&a_hat);
                        if (0.0..=len).contains(&s) {
                            consider(t);
                        }
                    }
                }
            }

            // End caps.
            let denom = dir.dot(&a_hat);
            if denom.abs() > 1e-12 {
                for (cap, s_cap) in [(p0, 0.0), (p1, len)] {
                    let t = (s_cap - oc.dot(&a_hat)) / denom;
                    let hit = origin + dir * t;
                    let radial = (hit - p0) - a_hat * (hit - p0).dot(&a_hat);
                    if radial.norm() <= *radius {
                        consider(t);
                    }
                    let _ = cap;
                }
            }
            best
        }
    }
}
