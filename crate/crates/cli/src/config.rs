//! Flat key=value harness configuration.
//!
//! One `key = value` (or `key value`) pair per line, `#` comments. Every
//! key has a default, so an empty or absent config is valid. Values are
//! validated against their owning module's invariants at load time; the
//! first violation is reported with the offending key name.

use std::collections::BTreeMap;
use std::path::Path;

use graspscene_core::camera::CameraIntrinsics;
use graspscene_core::geom::{Mat3, RigidTransform, Vec3};
use graspscene_core::mode::DetectParams;
use graspscene_core::plane::RansacParams;
use graspscene_sim::noise::NoiseModel;

/// Why the harness could not start.
#[derive(Debug)]
pub enum ConfigError {
    /// The config file could not be read.
    Io(String),
    /// A key or value is unusable; the message names the field.
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "{m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Every tunable of the pipeline, the camera model, and the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub intrinsics: CameraIntrinsics,
    pub ransac: RansacParams,
    pub orientation_tol_deg: f64,
    pub extrude_height: f64,
    pub cluster_tol: f64,
    pub min_cluster_size: usize,
    pub pot_min_height: f64,
    pub pot_max_minor: f64,
    pub noise: NoiseModel,
    /// Fixed mount transform taking IMU coordinates to camera coordinates.
    pub imu_to_camera: RigidTransform,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        let detect = DetectParams::default();
        HarnessConfig {
            intrinsics: CameraIntrinsics::default(),
            ransac: detect.ransac,
            orientation_tol_deg: detect.orientation_tol_deg,
            extrude_height: detect.extrude_height,
            cluster_tol: detect.cluster_tol,
            min_cluster_size: detect.min_cluster_size,
            pot_min_height: detect.pot_min_height,
            pot_max_minor: detect.pot_max_minor_extent,
            noise: NoiseModel::default(),
            imu_to_camera: RigidTransform::identity(),
        }
    }
}

impl HarnessConfig {
    /// The detection parameters this config describes.
    pub fn detect_params(&self) -> DetectParams {
        DetectParams {
            ransac: self.ransac,
            orientation_tol_deg: self.orientation_tol_deg,
            extrude_height: self.extrude_height,
            cluster_tol: self.cluster_tol,
            min_cluster_size: self.min_cluster_size,
            pot_min_height: self.pot_min_height,
            pot_max_minor_extent: self.pot_max_minor,
        }
    }

    /// Loads and validates a config file; `None` gives pure defaults.
    pub fn load(path: Option<&Path>) -> Result<HarnessConfig, ConfigError> {
        let mut cfg = HarnessConfig::default();
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("cannot read config {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = match line.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => match line.split_once(char::is_whitespace) {
                    Some((k, v)) => (k.trim(), v.trim()),
                    None => {
                        return Err(ConfigError::Invalid(format!(
                            "line {}: expected `key = value`, found {line:?}",
                            idx + 1
                        )));
                    }
                },
            };
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| {
                ConfigError::Invalid(format!("field {key}: cannot parse value {value:?}"))
            })
        }
        match key {
            "width" => self.intrinsics.width = num(key, value)?,
            "height" => self.intrinsics.height = num(key, value)?,
            "fx" => self.intrinsics.fx = num(key, value)?,
            "fy" => self.intrinsics.fy = num(key, value)?,
            "cx" => self.intrinsics.cx = num(key, value)?,
            "cy" => self.intrinsics.cy = num(key, value)?,
            "min_range_m" => self.intrinsics.min_range = num(key, value)?,
            "max_range_m" => self.intrinsics.max_range = num(key, value)?,
            "distance_threshold_m" => self.ransac.distance_threshold = num(key, value)?,
            "max_iterations" => self.ransac.max_iterations = num(key, value)?,
            "min_inliers" => self.ransac.min_inliers = num(key, value)?,
            "prominence_threshold" => self.ransac.prominence_threshold = num(key, value)?,
            "seed" => self.ransac.seed = num(key, value)?,
            "orientation_tol_deg" => self.orientation_tol_deg = num(key, value)?,
            "extrude_height_m" => self.extrude_height = num(key, value)?,
            "cluster_tol_m" => self.cluster_tol = num(key, value)?,
            "min_cluster_size" => self.min_cluster_size = num(key, value)?,
            "pot_min_height_m" => self.pot_min_height = num(key, value)?,
            "pot_max_minor_m" => self.pot_max_minor = num(key, value)?,
            "sigma_near_m" => self.noise.sigma_near = num(key, value)?,
            "sigma_far_m" => self.noise.sigma_far = num(key, value)?,
            "range_near_m" => self.noise.range_near = num(key, value)?,
            "range_far_m" => self.noise.range_far = num(key, value)?,
            "noise_seed" => self.noise.seed = num(key, value)?,
            "imu_to_camera" => {
                let nums: Result<Vec<f64>, _> =
                    value.split_whitespace().map(|t| t.parse::<f64>()).collect();
                let nums = nums.map_err(|_| {
                    ConfigError::Invalid(format!("field {key}: cannot parse value {value:?}"))
                })?;
                if nums.len() != 12 {
                    return Err(ConfigError::Invalid(format!(
                        "field {key}: expected 12 numbers (row-major rotation then translation), found {}",
                        nums.len()
                    )));
                }
                let rotation = Mat3::new(
                    nums[0], nums[1], nums[2], nums[3], nums[4], nums[5], nums[6], nums[7],
                    nums[8],
                );
                let translation = Vec3::new(nums[9], nums[10], nums[11]);
                self.imu_to_camera = RigidTransform::new(rotation, translation).map_err(|e| {
                    ConfigError::Invalid(format!("field {key}: {e}"))
                })?;
            }
            other => {
                return Err(ConfigError::Invalid(format!("unknown field {other}")));
            }
        }
        Ok(())
    }

    /// Re-checks every module invariant, naming the failing field group.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.intrinsics
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("camera fields: {e}")))?;
        self.detect_params()
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("detection fields: {e}")))?;
        self.noise
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("noise fields: {e}")))?;
        Ok(())
    }

    /// Flat echo of every field, for embedding in experiment reports.
    pub fn echo(&self) -> BTreeMap<String, serde_json::Value> {
        let mut m = BTreeMap::new();
        let f = |v: f64| serde_json::json!(v);
        m.insert("width".into(), serde_json::json!(self.intrinsics.width));
        m.insert("height".into(), serde_json::json!(self.intrinsics.height));
        m.insert("fx".into(), f(self.intrinsics.fx));
        m.insert("fy".into(), f(self.intrinsics.fy));
        m.insert("cx".into(), f(self.intrinsics.cx));
        m.insert("cy".into(), f(self.intrinsics.cy));
        m.insert("min_range_m".into(), f(self.intrinsics.min_range));
        m.insert("max_range_m".into(), f(self.intrinsics.max_range));
        m.insert(
            "distance_threshold_m".into(),
            f(self.ransac.distance_threshold),
        );
        m.insert(
            "max_iterations".into(),
            serde_json::json!(self.ransac.max_iterations),
        );
        m.insert(
            "min_inliers".into(),
            serde_json::json!(self.ransac.min_inliers),
        );
        m.insert(
            "prominence_threshold".into(),
            f(self.ransac.prominence_threshold),
        );
        m.insert("seed".into(), serde_json::json!(self.ransac.seed));
        m.insert("orientation_tol_deg".into(), f(self.orientation_tol_deg));
        m.insert("extrude_height_m".into(), f(self.extrude_height));
        m.insert("cluster_tol_m".into(), f(self.cluster_tol));
        m.insert(
            "min_cluster_size".into(),
            serde_json::json!(self.min_cluster_size),
        );
        m.insert("pot_min_height_m".into(), f(self.pot_min_height));
        m.insert("pot_max_minor_m".into(), f(self.pot_max_minor));
        m.insert("sigma_near_m".into(), f(self.noise.sigma_near));
        m.insert("sigma_far_m".into(), f(self.noise.sigma_far));
        m.insert("range_near_m".into(), f(self.noise.range_near));
        m.insert("range_far_m".into(), f(self.noise.range_far));
        m.insert("noise_seed".into(), serde_json::json!(self.noise.seed));
        let t = &self.imu_to_camera;
        let mut twelve = Vec::with_capacity(12);
        for r in 0..3 {
            for c in 0..3 {
                twelve.push(t.rotation[(r, c)]);
            }
        }
        twelve.extend([t.translation.x, t.translation.y, t.translation.z]);
        m.insert("imu_to_camera".into(), serde_json::json!(twelve));
        m
    }
}
