//! Plane detection: RANSAC fitting with total-least-squares refinement,
//! iterative multi-plane extraction, and convex-hull volumes above a plane.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{CoreError, Result};
use crate::geom::{Mat3, Point3, Vec3};

/// 2D coordinates inside a plane frame.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Parameters for RANSAC plane fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacParams {
    /// Point-to-plane distance below which a point counts as an inlier, m.
    pub distance_threshold: f64,
    /// Number of 3-point hypotheses to evaluate.
    pub max_iterations: usize,
    /// Minimum inlier support for a plane to be reported.
    pub min_inliers: usize,
    /// Largest outlier/inlier ratio at which a plane still dominates its
    /// cloud (used by scene-mode detection).
    pub prominence_threshold: f64,
    /// Seed for the hypothesis sampler; equal seeds give identical results.
    pub seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        RansacParams {
            distance_threshold: 0.015,
            max_iterations: 200,
            min_inliers: 100,
            prominence_threshold: 1.0,
            seed: 0,
        }
    }
}

impl RansacParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_threshold > 0.0) || !self.distance_threshold.is_finite() {
            return Err(CoreError::InvalidArgument(
                "distance_threshold must be positive and finite".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(CoreError::InvalidArgument(
                "max_iterations must be at least 1".into(),
            ));
        }
        if self.min_inliers < 3 {
            return Err(CoreError::InvalidArgument(
                "min_inliers must be at least 3".into(),
            ));
        }
        if !(self.prominence_threshold > 0.0) {
            return Err(CoreError::InvalidArgument(
                "prominence_threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted plane `normal · p + d = 0` with its supporting inliers.
///
/// The normal is unit length and oriented so the camera origin lies on its
/// positive side (`d > 0` for any plane the camera can actually see).
/// `prominence` is the outlier/inlier ratio over the cloud the plane was
/// fitted on: 0 means every point lies on the plane, values above the
/// prominence threshold mean the plane does not dominate the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneModel {
    pub normal: Vec3,
    pub d: f64,
    /// Indices into the source cloud, ascending.
    pub inlier_indices: Vec<usize>,
    pub prominence: f64,
}

impl PlaneModel {
    /// Signed height of `p` above the plane, along the normal.
    pub fn signed_height(&self, p: &Point3) -> f64 {
        self.normal.dot(&p.coords) + self.d
    }

    /// Absolute point-to-plane distance.
    pub fn distance(&self, p: &Point3) -> f64 {
        self.signed_height(p).abs()
    }

    pub fn inlier_count(&self) -> usize {
        self.inlier_indices.len()
    }
}

/// Total-least-squares plane through a set of points: the normal is the
/// eigenvector of the covariance matrix with the smallest eigenvalue.
fn tls_plane(points: &[Point3]) -> (Vec3, f64) {
    let n = points.len() as f64;
    let mut centroid = Vec3::zeros();
    for p in points {
        centroid += p.coords;
    }
    centroid /= n;
    let mut cov = Mat3::zeros();
    for p in points {
        let r = p.coords - centroid;
        cov += r * r.transpose();
    }
    cov /= n;
    let eigen = nalgebra::SymmetricEigen::new(cov);
    let mut min_i = 0;
    for i in 1..3 {
        if eigen.eigenvalues[i] < eigen.eigenvalues[min_i] {
            min_i = i;
        }
    }
    let normal = eigen.eigenvectors.column(min_i).into_owned().normalize();
    let d = -normal.dot(&centroid);
    (normal, d)
}

/// Fits the dominant plane of a cloud with RANSAC.
///
/// Draws `max_iterations` three-point hypotheses from a ChaCha8 stream seeded
/// with `params.seed`, keeps the hypothesis with the most inliers (first one
/// wins ties), refines it by total least squares over its inliers, then
/// recomputes the inlier set against the refined plane so the distance
/// threshold holds exactly for the reported indices.
///
/// Returns `Ok(None)` when no plane reaches `min_inliers` support or every
/// sampled triple was collinear. Errors only on invalid parameters or a cloud
/// with fewer than 3 points.
pub fn fit_plane_ransac(cloud: &PointCloud, params: &RansacParams) -> Result<Option<PlaneModel>> {
    params.validate()?;
    let n = cloud.len();
    if n < 3 {
        return Err(CoreError::InvalidArgument(format!(
            "plane fitting needs at least 3 points, got {n}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<(usize, Vec3, f64)> = None;

    for _ in 0..params.max_iterations {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n);
        while j == i {
            j = rng.random_range(0..n);
        }
        let mut k = rng.random_range(0..n);
        while k == i || k == j {
            k = rng.random_range(0..n);
        }

        let e1 = cloud[j] - cloud[i];
        let e2 = cloud[k] - cloud[i];
        let cross = e1.cross(&e2);
        if cross.norm() <= 1e-9 * e1.norm() * e2.norm() {
            continue; // collinear or duplicate sample
        }
        let normal = cross.normalize();
        let d = -normal.dot(&cloud[i].coords);

        let mut count = 0usize;
        for p in cloud.iter() {
            if (normal.dot(&p.coords) + d).abs() <= params.distance_threshold {
                count += 1;
            }
        }
        if best.as_ref().map_or(true, |(c, _, _)| count > *c) {
            best = Some((count, normal, d));
        }
    }

    let Some((count, normal, d)) = best else {
        return Ok(None); // every sampled triple was degenerate
    };
    if count < params.min_inliers {
        return Ok(None);
    }

    // Refine over the best hypothesis' inliers.
    let hypothesis_inliers: Vec<Point3> = cloud
        .iter()
        .filter(|p| (normal.dot(&p.coords) + d).abs() <= params.distance_threshold)
        .copied()
        .collect();
    let (mut normal, mut d) = tls_plane(&hypothesis_inliers);

    // Orient the normal toward the camera: the origin must sit on the
    // positive side of the plane.
    if d < 0.0 {
        normal = -normal;
        d = -d;
    }

    // Recompute support against the refined plane.
    let mut inlier_indices = Vec::with_capacity(count);
    for (idx, p) in cloud.iter().enumerate() {
        if (normal.dot(&p.coords) + d).abs() <= params.distance_threshold {
            inlier_indices.push(idx);
        }
    }
    if inlier_indices.len() < params.min_inliers {
        return Ok(None);
    }

    let prominence = (n - inlier_indices.len()) as f64 / inlier_indices.len() as f64;
    Ok(Some(PlaneModel {
        normal,
        d,
        inlier_indices,
        prominence,
    }))
}

/// Extracts up to `max_planes` planes by repeatedly fitting the dominant
/// plane and removing its inliers.
///
/// Round `r` reseeds the sampler with `seed + r` so each round draws an
/// independent, reproducible hypothesis stream. Extraction stops when a round
/// finds no qualifying plane or too few points remain. Inlier indices always
/// reference the original cloud; each model's prominence is relative to the
/// residual cloud it was fitted on. The result is ordered by inlier count,
/// largest first.
pub fn extract_planes(
    cloud: &PointCloud,
    params: &RansacParams,
    max_planes: usize,
) -> Result<Vec<PlaneModel>> {
    params.validate()?;
    if cloud.len() < 3 {
        return Err(CoreError::InvalidArgument(format!(
            "plane extraction needs at least 3 points, got {}",
            cloud.len()
        )));
    }

    let mut remaining: Vec<usize> = (0..cloud.len()).collect();
    let mut planes: Vec<PlaneModel> = Vec::new();
    let mut round: u64 = 0;

    while planes.len() < max_planes && remaining.len() >= params.min_inliers.max(3) {
        let sub = cloud.select(&remaining);
        let sub_params = RansacParams {
            seed: params.seed.wrapping_add(round),
            ..*params
        };
        let Some(model) = fit_plane_ransac(&sub, &sub_params)? else {
            break;
        };
        let global_indices: Vec<usize> =
            model.inlier_indices.iter().map(|&i| remaining[i]).collect();
        let taken: std::collections::HashSet<usize> = global_indices.iter().copied().collect();
        remaining.retain(|i| !taken.contains(i));
        planes.push(PlaneModel {
            inlier_indices: global_indices,
            ..model
        });
        round += 1;
    }

    planes.sort_by(|a, b| b.inlier_count().cmp(&a.inlier_count()));
    Ok(planes)
}

/// An orthonormal 2D coordinate frame embedded in a plane.
///
/// `u` and `v` span the plane, `normal = u × v`, and the origin is the
/// point of the plane closest to the camera origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    pub origin: Point3,
    pub u: Vec3,
    pub v: Vec3,
    pub normal: Vec3,
}

impl PlaneFrame {
    /// Builds the canonical frame of a plane. The `u` axis is the world axis
    /// least aligned with the normal, projected into the plane, which makes
    /// the frame a deterministic function of the plane equation.
    pub fn from_plane(plane: &PlaneModel) -> Self {
        let n = plane.normal;
        let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
        let mut seed = axes[0];
        let mut best = f64::INFINITY;
        for a in axes {
            let alignment = n.dot(&a).abs();
            if alignment < best {
                best = alignment;
                seed = a;
            }
        }
        let u = (seed - n * n.dot(&seed)).normalize();
        let v = n.cross(&u);
        PlaneFrame {
            origin: Point3::from(-plane.d * n),
            u,
            v,
            normal: n,
        }
    }

    /// In-plane coordinates of `p`.
    pub fn project(&self, p: &Point3) -> Vec2 {
        let r = p - self.origin;
        Vec2::new(r.dot(&self.u), r.dot(&self.v))
    }

    /// Signed height of `p` above the plane.
    pub fn height(&self, p: &Point3) -> f64 {
        (p - self.origin).dot(&self.normal)
    }

    /// Maps in-plane coordinates and height back to 3D.
    pub fn unproject(&self, xy: Vec2, height: f64) -> Point3 {
        self.origin + self.u * xy.x + self.v * xy.y + self.normal * height
    }
}

/// Cross product of `(a - o)` and `(b - o)`; positive for a left turn.
fn cross2(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull of 2D points by the monotone-chain construction.
///
/// Returns vertices in counterclockwise order with collinear points dropped,
/// so every interior angle is strictly convex. Fewer than 3 distinct
/// non-collinear input points yield a hull with fewer than 3 vertices.
pub fn convex_hull_2d(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }

    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross2(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// The convex footprint of a plane's inliers, expressed in the plane frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HullBase {
    pub frame: PlaneFrame,
    /// Counterclockwise, strictly convex polygon.
    pub polygon: Vec<Vec2>,
}

impl HullBase {
    /// True if the in-plane point lies inside or on the polygon boundary.
    pub fn contains_2d(&self, q: Vec2) -> bool {
        let m = self.polygon.len();
        for i in 0..m {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % m];
            if cross2(a, b, q) < -1e-12 {
                return false;
            }
        }
        true
    }

    /// Polygon area (shoelace formula); positive because the winding is CCW.
    pub fn area(&self) -> f64 {
        let m = self.polygon.len();
        let mut twice = 0.0;
        for i in 0..m {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % m];
            twice += a.x * b.y - a.y * b.x;
        }
        twice / 2.0
    }
}

/// Builds the convex hull of a plane's inliers projected into the plane
/// frame.
///
/// Errors with [`CoreError::DegenerateHull`] when the projected inliers are
/// collinear, and with [`CoreError::InvalidArgument`] when the plane has
/// fewer than 3 inliers.
pub fn convex_hull(plane: &PlaneModel, cloud: &PointCloud) -> Result<HullBase> {
    if plane.inlier_indices.len() < 3 {
        return Err(CoreError::InvalidArgument(format!(
            "hull needs at least 3 inliers, got {}",
            plane.inlier_indices.len()
        )));
    }
    let frame = PlaneFrame::from_plane(plane);
    let projected: Vec<Vec2> = plane
        .inlier_indices
        .iter()
        .map(|&i| frame.project(&cloud[i]))
        .collect();
    let polygon = convex_hull_2d(&projected);
    if polygon.len() < 3 {
        return Err(CoreError::DegenerateHull);
    }
    Ok(HullBase { frame, polygon })
}

/// A convex prism above a plane: the hull footprint extruded along the
/// normal over the height band `[h_min, height]`.
///
/// `h_min` excludes the plane's own surface points (it defaults to the
/// RANSAC distance threshold in the detection pipeline), `height` caps the
/// search volume.
#[derive(Debug, Clone, PartialEq)]
pub struct HullPrism {
    pub base: HullBase,
    pub h_min: f64,
    pub height: f64,
}

/// Extrudes a hull footprint into a volume of interest.
pub fn extrude_hull(base: HullBase, height: f64, h_min: f64) -> Result<HullPrism> {
    if !(height > 0.0) || !height.is_finite() {
        return Err(CoreError::InvalidArgument(
            "extrusion height must be positive and finite".into(),
        ));
    }
    if !(0.0..height).contains(&h_min) {
        return Err(CoreError::InvalidArgument(
            "require 0 <= h_min < height".into(),
        ));
    }
    Ok(HullPrism {
        base,
        h_min,
        height,
    })
}

impl HullPrism {
    /// True if `p` lies inside the prism (boundary inclusive).
    pub fn contains(&self, p: &Point3) -> bool {
        let h = self.base.frame.height(p);
        if h < self.h_min || h > self.height {
            return false;
        }
        self.base.contains_2d(self.base.frame.project(p))
    }
}
