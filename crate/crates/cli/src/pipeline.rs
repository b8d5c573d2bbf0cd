//! The per-frame processing chain, instrumented per stage.

use std::time::Instant;

use graspscene_core::camera::DepthFrame;
use graspscene_core::mode::{detect_mode, ModeDecision};
use graspscene_core::orientation::{estimate_gravity, GravityEstimate, ImuSample};

use crate::config::HarnessConfig;
use crate::record::{DetectionRecord, TimingRecord};

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs filter → deproject → gravity → detect on one frame, timing each
/// stage. A gravity failure degrades the frame to `unknown` (with the cause
/// recorded) instead of erroring: downstream consumers always get a record.
pub fn process_frame(
    frame: &DepthFrame,
    imu: &[ImuSample],
    cfg: &HarnessConfig,
    frame_id: &str,
) -> (DetectionRecord, Option<ModeDecision>) {
    let mut timing = TimingRecord::default();
    let whole = Instant::now();

    let t = Instant::now();
    let filtered = frame.filter_invalid();
    timing.filter_ms = ms_since(t);

    let t = Instant::now();
    let cloud = filtered.deproject();
    timing.deproject_ms = ms_since(t);

    let t = Instant::now();
    let gravity = estimate_gravity(imu, &cfg.imu_to_camera);
    timing.gravity_ms = ms_since(t);

    match gravity {
        Ok(gravity) => {
            let t = Instant::now();
            let decision = detect_mode(&cloud, &gravity, &cfg.detect_params());
            timing.detect_ms = ms_since(t);
            timing.total_ms = ms_since(whole);
            let record = DetectionRecord::from_decision(frame_id, &decision, timing);
            (record, Some(decision))
        }
        Err(e) => {
            timing.total_ms = ms_since(whole);
            let mut record = DetectionRecord::failed(frame_id, e.to_string());
            record.timing = timing;
            (record, None)
        }
    }
}

/// Convenience for callers that already estimated gravity.
pub fn process_frame_with_gravity(
    frame: &DepthFrame,
    gravity: &GravityEstimate,
    cfg: &HarnessConfig,
    frame_id: &str,
) -> (DetectionRecord, ModeDecision) {
    let mut timing = TimingRecord::default();
    let whole = Instant::now();

    let t = Instant::now();
    let filtered = frame.filter_invalid();
    timing.filter_ms = ms_since(t);

    let t = Instant::now();
    let cloud = filtered.deproject();
    timing.deproject_ms = ms_since(t);

    let t = Instant::now();
    let decision = detect_mode(&cloud, gravity, &cfg.detect_params());
    timing.detect_ms = ms_since(t);

    timing.total_ms = ms_since(whole);
    let record = DetectionRecord::from_decision(frame_id, &decision, timing);
    (record, decision)
}
