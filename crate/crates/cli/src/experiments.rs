//! The five evaluation experiments, each a pure function of (config, seed,
//! trials) emitting a JSON report with a config echo, per-trial rows, and
//! aggregates. Rows are deterministic for a fixed seed and config; only the
//! throughput experiment carries wall-clock numbers.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use graspscene_core::cloud::PointCloud;
use graspscene_core::geom::{Point3, RigidTransform, Vec3};
use graspscene_core::mode::Mode;
use graspscene_core::orientation::estimate_gravity;
use graspscene_core::plane::{extract_planes, fit_plane_ransac};
use graspscene_sim::primitives::{PlaneLabel, SceneLabels, ScenePrimitive, SceneSpec};
use graspscene_sim::scenes::{eraser_scene, standard_camera, standard_scene, SceneKind};
use graspscene_sim::trajectory::{make_approach, CameraPose};
use graspscene_sim::{apply_noise, render_depth, synth_imu};

use crate::config::HarnessConfig;
use crate::pipeline::process_frame_with_gravity;

/// The experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    ModeAccuracy,
    GraspAccuracy,
    PlaneSeparability,
    Occlusion,
    Throughput,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::ModeAccuracy => "mode-accuracy",
            ExperimentName::GraspAccuracy => "grasp-accuracy",
            ExperimentName::PlaneSeparability => "plane-separability",
            ExperimentName::Occlusion => "occlusion",
            ExperimentName::Throughput => "throughput",
        }
    }

    pub const ALL: [ExperimentName; 5] = [
        ExperimentName::ModeAccuracy,
        ExperimentName::GraspAccuracy,
        ExperimentName::PlaneSeparability,
        ExperimentName::Occlusion,
        ExperimentName::Throughput,
    ];
}

impl FromStr for ExperimentName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentName::ALL.iter().map(|n| n.as_str()).collect();
                format!("unknown experiment {s:?} (expected one of {})", names.join(", "))
            })
    }
}

/// A complete experiment outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub trials: usize,
    pub config: std::collections::BTreeMap<String, Value>,
    pub rows: Vec<Value>,
    pub aggregates: Value,
}

impl ExperimentReport {
    fn new(name: ExperimentName, cfg: &HarnessConfig, seed: u64, trials: usize) -> Self {
        ExperimentReport {
            schema_version: crate::record::RECORD_SCHEMA_VERSION,
            experiment: name.as_str().to_string(),
            seed,
            trials,
            config: cfg.echo(),
            rows: Vec::new(),
            aggregates: Value::Null,
        }
    }
}

/// Runs the named experiment.
pub fn run(
    name: ExperimentName,
    cfg: &HarnessConfig,
    seed: u64,
    trials: usize,
) -> ExperimentReport {
    match name {
        ExperimentName::ModeAccuracy => mode_accuracy(cfg, seed, trials),
        ExperimentName::GraspAccuracy => grasp_accuracy(cfg, seed, trials),
        ExperimentName::PlaneSeparability => plane_separability(cfg, seed, trials),
        ExperimentName::Occlusion => occlusion(cfg, seed, trials),
        ExperimentName::Throughput => throughput(cfg, seed, trials),
    }
}

/// Derives a per-trial noise seed so different trials see independent noise
/// while the whole experiment stays a function of (config, seed).
fn trial_noise_seed(cfg: &HarnessConfig, trial_seed: u64) -> u64 {
    cfg.noise
        .seed
        .wrapping_add(trial_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Render → noise → filter → deproject for one viewpoint.
fn observe(scene: &SceneSpec, pose: &CameraPose, cfg: &HarnessConfig, noise_seed: u64) -> PointCloud {
    let rendered = render_depth(scene, pose, &cfg.intrinsics);
    let mut model = cfg.noise;
    model.seed = noise_seed;
    apply_noise(&rendered, &model).filter_invalid().deproject()
}

// ---------------------------------------------------------------------------
// mode-accuracy
// ---------------------------------------------------------------------------

/// Per-frame classification accuracy over the three standard scene
/// families at their standard viewpoints.
pub fn mode_accuracy(cfg: &HarnessConfig, seed: u64, trials: usize) -> ExperimentReport {
    let mut report = ExperimentReport::new(ExperimentName::ModeAccuracy, cfg, seed, trials);
    let mut per_kind = serde_json::Map::new();
    for kind in SceneKind::ALL {
        let mut hits = 0usize;
        for t in 0..trials {
            let scene_seed = seed.wrapping_add(t as u64);
            let scene = standard_scene(kind, scene_seed);
            let pose = standard_camera(kind, &scene, scene_seed);
            let rendered = render_depth(&scene, &pose, &cfg.intrinsics);
            let mut model = cfg.noise;
            model.seed = trial_noise_seed(cfg, scene_seed);
            let noisy = apply_noise(&rendered, &model);
            let imu = synth_imu(&pose, &scene.gravity, &cfg.imu_to_camera, 8);
            let gravity = estimate_gravity(&imu, &cfg.imu_to_camera)
                .expect("synthetic gravity is observable");
            let (record, decision) =
                process_frame_with_gravity(&noisy, &gravity, cfg, &format!("{}-{t}", kind.as_str()));
            let correct = decision.mode == kind.mode();
            hits += correct as usize;
            report.rows.push(json!({
                "kind": kind.as_str(),
                "scene_seed": scene_seed,
                "expected": kind.as_str(),
                "got": record.mode,
                "confidence": record.confidence,
                "correct": correct,
            }));
        }
        per_kind.insert(
            kind.as_str().to_string(),
            json!({
                "correct": hits,
                "trials": trials,
                "accuracy": hits as f64 / trials as f64,
            }),
        );
    }
    report.aggregates = json!({ "per_kind": Value::Object(per_kind) });
    report
}

// ---------------------------------------------------------------------------
// grasp-accuracy
// ---------------------------------------------------------------------------

/// Least-squares slope of error (mm) against range (m): positive means
/// error shrinks as the camera closes in.
fn error_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|&(r, _)| r).sum::<f64>() / n;
    let my = samples.iter().map(|&(_, e)| e).sum::<f64>() / n;
    let num: f64 = samples.iter().map(|&(r, e)| (r - mx) * (e - my)).sum();
    let den: f64 = samples.iter().map(|&(r, _)| (r - mx).powi(2)).sum();
    num / den * 1e3
}

/// Grasp accuracy while a camera approaches an eraser-sized block from
/// 0.80 m down to 0.30 m.
///
/// Two error measures are reported per frame. `width_error_mm` reproduces
/// the caliper comparison: |distance between the estimated pair − true
/// minor width|. `point_error_mm` is the stricter mean 3D distance of each
/// estimated point to its true opposition point (best assignment). The
/// width measure is the primary accuracy gate; per-point error carries an
/// irreducible upward bias because the box top is the maximum of thousands
/// of noisy heights, which lifts both grasp targets by roughly half the
/// Gaussian extreme-value tail while leaving their separation unchanged.
pub fn grasp_accuracy(cfg: &HarnessConfig, seed: u64, trials: usize) -> ExperimentReport {
    const STEPS: usize = 11;
    const FAR: f64 = 0.80;
    const NEAR: f64 = 0.30;
    let mut report = ExperimentReport::new(ExperimentName::GraspAccuracy, cfg, seed, trials);

    let mut point_errors: Vec<(f64, f64)> = Vec::new(); // (range, error_m)
    let mut width_errors: Vec<(f64, f64)> = Vec::new();
    let mut near_point: Vec<f64> = Vec::new();
    let mut near_width: Vec<f64> = Vec::new();
    let mut missed = 0usize;

    for t in 0..trials {
        let scene_seed = seed.wrapping_add(t as u64);
        let scene = eraser_scene(scene_seed);
        let label = &scene.labels.objects[0];
        let (true_a, true_b) = label.grasp.expect("eraser has a grasp label");
        let true_width = 2.0 * label.extents[1];
        let trajectory = make_approach(FAR, NEAR, STEPS, Point3::origin())
            .expect("standard approach is valid");

        for (step, (_, pose)) in trajectory.samples.iter().enumerate() {
            let range = FAR + (NEAR - FAR) * step as f64 / (STEPS - 1) as f64;
            let noise_seed =
                trial_noise_seed(cfg, scene_seed.wrapping_mul(STEPS as u64).wrapping_add(step as u64));
            let rendered = render_depth(&scene, pose, &cfg.intrinsics);
            let mut model = cfg.noise;
            model.seed = noise_seed;
            let noisy = apply_noise(&rendered, &model);
            let imu = synth_imu(pose, &scene.gravity, &cfg.imu_to_camera, 8);
            let gravity = estimate_gravity(&imu, &cfg.imu_to_camera)
                .expect("synthetic gravity is observable");
            let (_, decision) =
                process_frame_with_gravity(&noisy, &gravity, cfg, &format!("eraser-{t}-{step}"));

            let detected = decision.mode == Mode::Tabletop && !decision.objects.is_empty();
            let mut point_err = None;
            let mut width_err = None;
            if detected {
                let obj = decision
                    .objects
                    .iter()
                    .max_by_key(|o| o.cluster.len())
                    .unwrap();
                // Ground truth expressed in the camera frame of this pose.
                let ta = pose.transform().transform_point(&true_a);
                let tb = pose.transform().transform_point(&true_b);
                let (a, b) = (obj.grasp.point_a, obj.grasp.point_b);
                let direct = ((a - ta).norm() + (b - tb).norm()) / 2.0;
                let swapped = ((a - tb).norm() + (b - ta).norm()) / 2.0;
                let p_err = direct.min(swapped);
                let w_err = (obj.grasp.width - true_width).abs();
                point_errors.push((range, p_err));
                width_errors.push((range, w_err));
                if step == STEPS - 1 {
                    near_point.push(p_err);
                    near_width.push(w_err);
                }
                point_err = Some(p_err);
                width_err = Some(w_err);
            } else {
                missed += 1;
            }
            report.rows.push(json!({
                "scene_seed": scene_seed,
                "step": step,
                "range_m": range,
                "detected": detected,
                "point_error_mm": point_err.map(|e| e * 1e3),
                "width_error_mm": width_err.map(|e| e * 1e3),
            }));
        }
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let points: Vec<f64> = point_errors.iter().map(|&(_, e)| e).collect();
    let widths: Vec<f64> = width_errors.iter().map(|&(_, e)| e).collect();
    report.aggregates = json!({
        "width": {
            "mean_error_mm": mean(&widths) * 1e3,
            "mean_error_at_near_end_mm": mean(&near_width) * 1e3,
            "slope_mm_per_m": error_slope(&width_errors),
        },
        "point": {
            "mean_error_mm": mean(&points) * 1e3,
            "mean_error_at_near_end_mm": mean(&near_point) * 1e3,
            "slope_mm_per_m": error_slope(&point_errors),
        },
        "frames": report.rows.len(),
        "missed": missed,
    });
    report
}

// ---------------------------------------------------------------------------
// plane-separability
// ---------------------------------------------------------------------------

/// A small slab stacked `gap` above a larger one.
fn stacked_scene(gap: f64) -> SceneSpec {
    let lower = ScenePrimitive::Slab {
        frame: RigidTransform::identity(),
        width: 0.28,
        height: 0.28,
    };
    let upper = ScenePrimitive::Slab {
        frame: RigidTransform::new(RigidTransform::identity().rotation, Vec3::new(0.0, 0.0, gap))
            .expect("translation-only pose is proper"),
        width: 0.10,
        height: 0.10,
    };
    SceneSpec {
        primitives: vec![lower, upper],
        gravity: Vec3::new(0.0, 0.0, -1.0),
        labels: SceneLabels {
            mode: Mode::Unknown,
            plane: Some(PlaneLabel {
                normal: Vec3::z(),
                d: 0.0,
            }),
            objects: vec![],
        },
    }
}

/// Whether two distinct parallel planes were recovered: at least two models
/// whose normals lie within 10° of the true one and whose offsets differ by
/// at least the inlier band half-width.
fn two_distinct_planes(
    models: &[graspscene_core::plane::PlaneModel],
    true_normal_cam: &Vec3,
    min_sep: f64,
) -> bool {
    let aligned: Vec<&graspscene_core::plane::PlaneModel> = models
        .iter()
        .filter(|m| m.normal.dot(true_normal_cam).abs() >= 10f64.to_radians().cos())
        .collect();
    for i in 0..aligned.len() {
        for j in i + 1..aligned.len() {
            let (a, b) = (aligned[i], aligned[j]);
            let sign = if a.normal.dot(&b.normal) >= 0.0 { 1.0 } else { -1.0 };
            if (a.d - sign * b.d).abs() >= min_sep {
                return true;
            }
        }
    }
    false
}

/// How reliably two stacked planes are told apart as a function of their
/// vertical gap, viewed top-down from 0.5 m with the configured noise.
pub fn plane_separability(cfg: &HarnessConfig, seed: u64, trials: usize) -> ExperimentReport {
    const GAPS: [f64; 8] = [0.005, 0.0075, 0.010, 0.015, 0.020, 0.025, 0.030, 0.040];
    let mut report =
        ExperimentReport::new(ExperimentName::PlaneSeparability, cfg, seed, trials);

    let mut rates = serde_json::Map::new();
    let mut min_distinguishable: Option<f64> = None;
    for (gi, &gap) in GAPS.iter().enumerate() {
        let scene = stacked_scene(gap);
        let mut split = 0usize;
        for t in 0..trials {
            let trial_seed = seed
                .wrapping_add((gi * trials + t) as u64)
                .wrapping_mul(0x2545_f491_4f6c_dd1d);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            // Viewpoint jitter: almost top-down, half a meter up.
            let dx = rng.random_range(-0.01..0.01);
            let dy = rng.random_range(-0.01..0.01);
            let tilt: f64 = rng.random_range(0.0..3f64.to_radians());
            let azim: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let offset = Vec3::new(
                tilt.sin() * azim.cos(),
                tilt.sin() * azim.sin(),
                tilt.cos(),
            ) * 0.50;
            let pose = CameraPose::look_at(
                Point3::new(dx, dy, 0.0) + offset,
                Point3::new(dx, dy, 0.0),
                Vec3::new(0.0, 0.0, -1.0),
            )
            .expect("separability viewpoint is valid");

            let cloud = observe(&scene, &pose, cfg, trial_noise_seed(cfg, trial_seed));
            let models = extract_planes(&cloud, &cfg.ransac, 3)
                .expect("separability cloud is non-degenerate");
            let true_normal_cam = pose.transform().rotation * Vec3::z();
            let two = two_distinct_planes(&models, &true_normal_cam, cfg.ransac.distance_threshold);
            split += two as usize;
            report.rows.push(json!({
                "gap_m": gap,
                "trial": t,
                "models": models.len(),
                "two_planes": two,
            }));
        }
        let rate = split as f64 / trials as f64;
        rates.insert(format!("{gap}"), json!(rate));
        if rate >= 0.95 && min_distinguishable.is_none() {
            min_distinguishable = Some(gap);
        }
    }
    report.aggregates = json!({
        "split_rate_by_gap": Value::Object(rates),
        "min_distinguishable_gap_m": min_distinguishable,
    });
    report
}

// ---------------------------------------------------------------------------
// occlusion
// ---------------------------------------------------------------------------

/// A 0.5 m slab with four boxes covering exactly 80% of its area. Box
/// heights are far enough apart that no single inlier band can join two
/// tops, so every fittable plane in the scene is horizontal.
fn occluded_scene(rng: &mut ChaCha8Rng) -> SceneSpec {
    let slab = ScenePrimitive::Slab {
        frame: RigidTransform::identity(),
        width: 0.5,
        height: 0.5,
    };
    let mut primitives = vec![slab];
    let mut heights = [0.05, 0.17, 0.29, 0.41];
    heights.shuffle(rng);
    let centers = [
        (0.125, 0.125),
        (-0.125, 0.125),
        (-0.125, -0.125),
        (0.125, -0.125),
    ];
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let h = heights[i] + rng.random_range(-0.01..0.01);
        // Footprint 0.25 x 0.20 covers 80% of each 0.25 x 0.25 quadrant.
        primitives.push(ScenePrimitive::Box {
            pose: RigidTransform::new(
                RigidTransform::identity().rotation,
                Vec3::new(cx, cy, h / 2.0),
            )
            .expect("translation-only pose is proper"),
            extents: Vec3::new(0.25, 0.20, h),
        });
    }
    SceneSpec {
        primitives,
        gravity: Vec3::new(0.0, 0.0, -1.0),
        labels: SceneLabels {
            mode: Mode::Tabletop,
            plane: Some(PlaneLabel {
                normal: Vec3::z(),
                d: 0.0,
            }),
            objects: vec![],
        },
    }
}

/// Plane-normal recovery when clutter covers 80% of the support surface.
pub fn occlusion(cfg: &HarnessConfig, seed: u64, trials: usize) -> ExperimentReport {
    let mut report = ExperimentReport::new(ExperimentName::Occlusion, cfg, seed, trials);
    let mut within = 0usize;
    let mut found = 0usize;
    let mut errors: Vec<f64> = Vec::new();
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let scene = occluded_scene(&mut rng);
        // High enough that every box top is fully in frame and point density
        // is comparable across heights; otherwise a tilted plane bridging
        // two dense, partially-visible tops can out-vote any single surface.
        let range = rng.random_range(0.82..0.90);
        let tilt: f64 = rng.random_range(0.0..5f64.to_radians());
        let azim: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let offset = Vec3::new(
            tilt.sin() * azim.cos(),
            tilt.sin() * azim.sin(),
            tilt.cos(),
        ) * range;
        let pose = CameraPose::look_at(
            Point3::origin() + offset,
            Point3::origin(),
            Vec3::new(0.0, 0.0, -1.0),
        )
        .expect("occlusion viewpoint is valid");

        let cloud = observe(&scene, &pose, cfg, trial_noise_seed(cfg, trial_seed));
        let model = fit_plane_ransac(&cloud, &cfg.ransac).expect("occlusion cloud is non-degenerate");
        let (ok, err_deg) = match &model {
            Some(m) => {
                found += 1;
                let true_normal_cam = pose.transform().rotation * Vec3::z();
                let err =
                    m.normal.dot(&true_normal_cam).abs().clamp(-1.0, 1.0).acos().to_degrees();
                errors.push(err);
                (err <= 2.0, Some(err))
            }
            None => (false, None),
        };
        within += ok as usize;
        report.rows.push(json!({
            "trial": t,
            "found": model.is_some(),
            "normal_error_deg": err_deg,
            "within_2deg": ok,
        }));
    }
    let mean_err = errors.iter().sum::<f64>() / errors.len().max(1) as f64;
    let max_err = errors.iter().cloned().fold(0.0f64, f64::max);
    report.aggregates = json!({
        "occluded_area_fraction": 0.8,
        "found": found,
        "within_2deg": within,
        "rate_within_2deg": within as f64 / trials as f64,
        "mean_normal_error_deg": mean_err,
        "max_normal_error_deg": max_err,
    });
    report
}

// ---------------------------------------------------------------------------
// throughput
// ---------------------------------------------------------------------------

/// Latency of the per-frame pipeline on the fixed cluttered scene; wraps
/// the bench runner so the experiment report format stays uniform. Rows are
/// omitted because latency samples are not reproducible.
pub fn throughput(cfg: &HarnessConfig, seed: u64, trials: usize) -> ExperimentReport {
    let mut report = ExperimentReport::new(ExperimentName::Throughput, cfg, seed, trials);
    let bench = crate::bench::run(cfg, trials);
    report.aggregates = serde_json::to_value(&bench).expect("bench report serializes");
    report
}
