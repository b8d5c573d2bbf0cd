//! Throughput measurement on a fixed cluttered scene.
//!
//! The scene is rendered and degraded once; the timed loop covers only what
//! a live system does per camera frame: validity filtering, deprojection,
//! gravity estimation, and mode detection. Rendering is simulator overhead
//! and is excluded.

use serde::{Deserialize, Serialize};

use graspscene_core::geom::RigidTransform;
use graspscene_sim::scenes::bench_scene;
use graspscene_sim::{apply_noise, render_depth, synth_imu};

use crate::config::HarnessConfig;
use crate::pipeline::process_frame;
use crate::record::TimingRecord;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageMeans {
    pub filter_ms: f64,
    pub deproject_ms: f64,
    pub gravity_ms: f64,
    pub detect_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub frames: usize,
    pub cloud_points: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    /// Sustained rate implied by the median per-frame latency.
    pub fps: f64,
    pub stage_means: StageMeans,
    pub mode: String,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx]
}

/// Times `frames` repetitions of the per-frame pipeline on the standard
/// cluttered tabletop. `frames` is clamped up to 10, the smallest sample
/// the report is defined for.
pub fn run(cfg: &HarnessConfig, frames: usize) -> BenchReport {
    let frames = frames.max(10);
    let (scene, pose) = bench_scene();
    let rendered = render_depth(&scene, &pose, &cfg.intrinsics);
    let noisy = apply_noise(&rendered, &cfg.noise);
    let imu = synth_imu(&pose, &scene.gravity, &RigidTransform::identity(), 8);
    let cloud_points = noisy.filter_invalid().deproject().len();

    let mut timings: Vec<TimingRecord> = Vec::with_capacity(frames);
    let mut mode = String::new();
    for i in 0..frames {
        let (record, _) = process_frame(&noisy, &imu, cfg, &format!("bench-{i}"));
        mode = record.mode.clone();
        timings.push(record.timing);
    }

    let mut totals: Vec<f64> = timings.iter().map(|t| t.total_ms).collect();
    totals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = frames as f64;
    let mean = |f: fn(&TimingRecord) -> f64| timings.iter().map(f).sum::<f64>() / n;

    BenchReport {
        schema_version: crate::record::RECORD_SCHEMA_VERSION,
        frames,
        cloud_points,
        mean_ms: totals.iter().sum::<f64>() / n,
        median_ms: percentile(&totals, 0.5),
        p95_ms: percentile(&totals, 0.95),
        fps: 1e3 / percentile(&totals, 0.5),
        stage_means: StageMeans {
            filter_ms: mean(|t| t.filter_ms),
            deproject_ms: mean(|t| t.deproject_ms),
            gravity_ms: mean(|t| t.gravity_ms),
            detect_ms: mean(|t| t.detect_ms),
        },
        mode,
    }
}
