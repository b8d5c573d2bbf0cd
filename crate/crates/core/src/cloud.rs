//! Point clouds and their on-disk text format.

use std::fs;
use std::io::Write as _;
use std::ops::Index;
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::geom::Point3;

/// An ordered collection of 3D points in meters.
///
/// Order is meaningful: clouds produced by deprojection keep row-major pixel
/// order, and downstream stages identify points by index into this list.
/// All coordinates are finite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
}

impl PointCloud {
    pub fn new() -> Self {
        PointCloud { points: Vec::new() }
    }

    /// Wraps an existing point list. Coordinates must be finite.
    pub fn from_points(points: Vec<Point3>) -> Self {
        debug_assert!(points.iter().all(|p| p.coords.iter().all(|c| c.is_finite())));
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: Point3) {
        self.points.push(p);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.points.iter()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// A new cloud containing the selected indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
        }
    }
}

impl Index<usize> for PointCloud {
    type Output = Point3;

    fn index(&self, i: usize) -> &Point3 {
        &self.points[i]
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point3;
    type IntoIter = std::slice::Iter<'a, Point3>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Writes a cloud as text: a count header, then one `x y z` line per point
/// at six significant digits.
pub fn store_cloud(cloud: &PointCloud, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{}\n", cloud.len()));
    for p in cloud.iter() {
        out.push_str(&format!("{:.6} {:.6} {:.6}\n", p.x, p.y, p.z));
    }
    let mut file = fs::File::create(path).map_err(|e| CoreError::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| CoreError::io(path, e))
}

/// Reads a cloud written by [`store_cloud`], preserving point order.
pub fn load_cloud(path: &Path) -> Result<PointCloud> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CoreError::parse(path, 1, "missing count header"))?;
    let count: usize = header
        .trim()
        .parse()
        .map_err(|_| CoreError::parse(path, 1, format!("bad point count {header:?}")))?;

    let mut points = Vec::with_capacity(count);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(CoreError::parse(
                path,
                idx + 1,
                format!("expected 3 coordinates, got {}", fields.len()),
            ));
        }
        let mut coords = [0.0f64; 3];
        for (k, f) in fields.iter().enumerate() {
            coords[k] = f
                .parse()
                .map_err(|_| CoreError::parse(path, idx + 1, format!("bad coordinate {f:?}")))?;
            if !coords[k].is_finite() {
                return Err(CoreError::parse(
                    path,
                    idx + 1,
                    format!("non-finite coordinate {f:?}"),
                ));
            }
        }
        points.push(Point3::new(coords[0], coords[1], coords[2]));
    }
    if points.len() != count {
        return Err(CoreError::parse(
            path,
            text.lines().count(),
            format!("header declares {count} points, file holds {}", points.len()),
        ));
    }
    Ok(PointCloud::from_points(points))
}
