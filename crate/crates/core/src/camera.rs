//! Depth camera model: intrinsics, depth frames, filtering, deprojection,
//! and the on-disk frame format.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{CoreError, Result};
use crate::geom::Point3;

/// Pinhole intrinsics plus the sensor's usable depth range.
///
/// Pixel `(u, v)` with depth `z` (distance along the optical axis, not the
/// Euclidean ray length) deprojects to
/// `((u - cx) * z / fx, (v - cy) * z / fy, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub width: usize,
    pub height: usize,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Closest depth the sensor reports, meters.
    pub min_range: f64,
    /// Farthest depth the sensor reports, meters.
    pub max_range: f64,
}

impl CameraIntrinsics {
    pub fn new(
        width: usize,
        height: usize,
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        min_range: f64,
        max_range: f64,
    ) -> Result<Self> {
        let intr = CameraIntrinsics {
            width,
            height,
            fx,
            fy,
            cx,
            cy,
            min_range,
            max_range,
        };
        intr.validate()?;
        Ok(intr)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(CoreError::InvalidArgument(
                "image dimensions must be at least 1x1".into(),
            ));
        }
        if !(self.fx > 0.0) || !(self.fy > 0.0) {
            return Err(CoreError::InvalidArgument(
                "focal lengths fx, fy must be positive".into(),
            ));
        }
        if !(0.0..self.width as f64).contains(&self.cx)
            || !(0.0..self.height as f64).contains(&self.cy)
        {
            return Err(CoreError::InvalidArgument(
                "principal point (cx, cy) must lie inside the image".into(),
            ));
        }
        if !(self.min_range > 0.0) || !(self.max_range > self.min_range) {
            return Err(CoreError::InvalidArgument(
                "require 0 < min_range < max_range".into(),
            ));
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

impl Default for CameraIntrinsics {
    /// A short-range depth camera: 160x120 at 90° horizontal field of view,
    /// sensing 5 cm – 1 m.
    fn default() -> Self {
        CameraIntrinsics {
            width: 160,
            height: 120,
            fx: 80.0,
            fy: 80.0,
            cx: 80.0,
            cy: 60.0,
            min_range: 0.05,
            max_range: 1.00,
        }
    }
}

/// A single depth image with a per-pixel validity mask.
///
/// Depth values are stored row-major (`index = v * width + u`). Invalid
/// pixels hold depth `0.0` and `valid = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    pub intrinsics: CameraIntrinsics,
    depth: Vec<f64>,
    valid: Vec<bool>,
}

impl DepthFrame {
    /// Builds a frame from raw buffers; both must hold exactly
    /// `width * height` entries.
    pub fn new(intrinsics: CameraIntrinsics, depth: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        intrinsics.validate()?;
        let n = intrinsics.pixel_count();
        if depth.len() != n || valid.len() != n {
            return Err(CoreError::InvalidArgument(format!(
                "expected {n} pixels, got {} depth / {} mask entries",
                depth.len(),
                valid.len()
            )));
        }
        Ok(DepthFrame {
            intrinsics,
            depth,
            valid,
        })
    }

    /// An all-invalid frame, useful as a rendering canvas.
    pub fn empty(intrinsics: CameraIntrinsics) -> Self {
        let n = intrinsics.pixel_count();
        DepthFrame {
            intrinsics,
            depth: vec![0.0; n],
            valid: vec![false; n],
        }
    }

    pub fn width(&self) -> usize {
        self.intrinsics.width
    }

    pub fn height(&self) -> usize {
        self.intrinsics.height
    }

    pub fn depth_at(&self, u: usize, v: usize) -> f64 {
        self.depth[v * self.intrinsics.width + u]
    }

    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.valid[v * self.intrinsics.width + u]
    }

    /// Marks pixel `(u, v)` valid with the given depth.
    pub fn set(&mut self, u: usize, v: usize, depth: f64) {
        let i = v * self.intrinsics.width + u;
        self.depth[i] = depth;
        self.valid[i] = true;
    }

    /// Marks pixel `(u, v)` invalid.
    pub fn clear(&mut self, u: usize, v: usize) {
        let i = v * self.intrinsics.width + u;
        self.depth[i] = 0.0;
        self.valid[i] = false;
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Returns a copy with every unusable measurement masked out: pixels that
    /// are already invalid, non-finite, non-positive, or outside
    /// `[min_range, max_range]`.
    pub fn filter_invalid(&self) -> DepthFrame {
        let mut out = self.clone();
        let (lo, hi) = (self.intrinsics.min_range, self.intrinsics.max_range);
        for i in 0..out.depth.len() {
            let d = out.depth[i];
            if !(out.valid[i] && d.is_finite() && d >= lo && d <= hi) {
                out.depth[i] = 0.0;
                out.valid[i] = false;
            }
        }
        out
    }

    /// Deprojects every valid pixel through the pinhole model, in row-major
    /// pixel order. The caller is expected to have filtered the frame first;
    /// invalid pixels are skipped.
    pub fn deproject(&self) -> PointCloud {
        let mut points = Vec::with_capacity(self.valid_count());
        let intr = &self.intrinsics;
        for v in 0..intr.height {
            for u in 0..intr.width {
                let i = v * intr.width + u;
                if !self.valid[i] {
                    continue;
                }
                let z = self.depth[i];
                let x = (u as f64 - intr.cx) * z / intr.fx;
                let y = (v as f64 - intr.cy) * z / intr.fy;
                points.push(Point3::new(x, y, z));
            }
        }
        PointCloud::from_points(points)
    }
}

/// Writes a frame as text: a header `width height fx fy cx cy`, then one
/// image row per line with invalid pixels encoded as `-1`.
pub fn store_frame(frame: &DepthFrame, path: &Path) -> Result<()> {
    let intr = &frame.intrinsics;
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {} {} {} {}\n",
        intr.width, intr.height, intr.fx, intr.fy, intr.cx, intr.cy
    ));
    for v in 0..intr.height {
        let mut row = String::new();
        for u in 0..intr.width {
            if u > 0 {
                row.push(' ');
            }
            if frame.is_valid(u, v) {
                row.push_str(&format!("{:.6}", frame.depth_at(u, v)));
            } else {
                row.push_str("-1");
            }
        }
        out.push_str(&row);
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| CoreError::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| CoreError::io(path, e))
}

/// Reads a frame written by [`store_frame`]. The depth range is not stored
/// in the file, so the caller supplies it.
pub fn load_frame(path: &Path, min_range: f64, max_range: f64) -> Result<DepthFrame> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| CoreError::parse(path, 1, "missing header line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 {
        return Err(CoreError::parse(
            path,
            1,
            format!("header needs 6 fields (width height fx fy cx cy), got {}", fields.len()),
        ));
    }
    let width: usize = fields[0]
        .parse()
        .map_err(|_| CoreError::parse(path, 1, "bad width"))?;
    let height: usize = fields[1]
        .parse()
        .map_err(|_| CoreError::parse(path, 1, "bad height"))?;
    let mut intr_vals = [0.0f64; 4];
    for (k, f) in fields[2..].iter().enumerate() {
        intr_vals[k] = f
            .parse()
            .map_err(|_| CoreError::parse(path, 1, format!("bad intrinsic value {f:?}")))?;
    }
    let intrinsics = CameraIntrinsics::new(
        width,
        height,
        intr_vals[0],
        intr_vals[1],
        intr_vals[2],
        intr_vals[3],
        min_range,
        max_range,
    )?;

    let n = intrinsics.pixel_count();
    let mut depth = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for (idx, line) in lines {
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| {
                CoreError::parse(path, idx + 1, format!("bad depth value {token:?}"))
            })?;
            if depth.len() == n {
                return Err(CoreError::parse(path, idx + 1, "more pixels than header declares"));
            }
            if value < 0.0 {
                depth.push(0.0);
                valid.push(false);
            } else {
                depth.push(value);
                valid.push(true);
            }
        }
    }
    if depth.len() != n {
        return Err(CoreError::parse(
            path,
            text.lines().count(),
            format!("expected {n} pixels, file holds {}", depth.len()),
        ));
    }
    DepthFrame::new(intrinsics, depth, valid)
}
