//! Object segmentation above a support plane: Euclidean clustering, in-plane
//! PCA bounding boxes, and opposition grasp point selection.

use std::collections::HashMap;

use crate::cloud::PointCloud;
use crate::error::{CoreError, Result};
use crate::geom::{Point3, Vec3};
use crate::plane::{HullPrism, PlaneFrame, PlaneModel, Vec2};

/// A connected group of points (single-linkage at the cluster tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Indices into the source cloud, ascending.
    pub point_indices: Vec<usize>,
    pub centroid: Point3,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.point_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_indices.is_empty()
    }
}

/// An oriented bounding box aligned with a support plane.
///
/// `axes = [major, minor, normal]` is right-handed with
/// `minor = normal × major`; `extents` are the matching half-extents, with
/// `extents[0] >= extents[1]`. The major and minor axes lie in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectBox {
    pub center: Point3,
    pub axes: [Vec3; 3],
    pub extents: [f64; 3],
}

impl ObjectBox {
    pub fn major_axis(&self) -> Vec3 {
        self.axes[0]
    }

    pub fn minor_axis(&self) -> Vec3 {
        self.axes[1]
    }

    pub fn normal_axis(&self) -> Vec3 {
        self.axes[2]
    }
}

/// A two-finger opposition grasp: contact points on opposite sides of an
/// object, squeezing along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspEstimate {
    pub point_a: Point3,
    pub point_b: Point3,
    /// Unit opposition direction (the box minor axis), parallel to the
    /// support plane.
    pub axis: Vec3,
    /// Distance between the contact points, m.
    pub width: f64,
}

/// A segmented object with its box and grasp.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedObject {
    pub cluster: Cluster,
    pub bounding_box: ObjectBox,
    pub grasp: GraspEstimate,
}

/// Parameters for elevated-handle detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotHandleParams {
    /// A handle's lowest point must sit at least this high above the
    /// reference plane, m.
    pub min_height: f64,
    /// Largest minor half-extent that still fits between two fingers, m.
    pub max_minor_extent: f64,
    /// Euclidean clustering tolerance, m.
    pub cluster_tol: f64,
    /// Smallest cluster considered a real object.
    pub min_cluster_size: usize,
}

impl Default for PotHandleParams {
    fn default() -> Self {
        PotHandleParams {
            min_height: 0.05,
            max_minor_extent: 0.025,
            cluster_tol: 0.02,
            min_cluster_size: 30,
        }
    }
}

/// Disjoint-set forest with path halving and union by rank.
struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

fn grid_key(p: &Point3, tol: f64) -> (i64, i64, i64) {
    (
        (p.x / tol).floor() as i64,
        (p.y / tol).floor() as i64,
        (p.z / tol).floor() as i64,
    )
}

/// Groups the candidate points into Euclidean connected components: two
/// points belong to the same cluster when a chain of candidate points links
/// them with successive gaps of at most `tol`.
///
/// Uses a uniform grid of cell size `tol`, so only the 27 surrounding cells
/// need searching per point. Clusters smaller than `min_size` are dropped;
/// the result is ordered by size descending, ties broken by smallest point
/// index, and is fully deterministic.
pub fn euclidean_clusters(
    cloud: &PointCloud,
    candidates: &[usize],
    tol: f64,
    min_size: usize,
) -> Vec<Cluster> {
    assert!(tol > 0.0, "cluster tolerance must be positive");
    let m = candidates.len();
    if m == 0 {
        return Vec::new();
    }

    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (local, &idx) in candidates.iter().enumerate() {
        grid.entry(grid_key(&cloud[idx], tol)).or_default().push(local);
    }

    let tol2 = tol * tol;
    let mut uf = UnionFind::new(m);
    for (local, &idx) in candidates.iter().enumerate() {
        let p = cloud[idx];
        let (kx, ky, kz) = grid_key(&p, tol);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cell) = grid.get(&(kx + dx, ky + dy, kz + dz)) else {
                        continue;
                    };
                    for &other in cell {
                        if other <= local {
                            continue;
                        }
                        if (cloud[candidates[other]] - p).norm_squared() <= tol2 {
                            uf.union(local, other);
                        }
                    }
                }
            }
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for local in 0..m {
        let root = uf.find(local);
        groups.entry(root).or_default().push(candidates[local]);
    }

    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .filter(|g| g.len() >= min_size)
        .map(|mut indices| {
            indices.sort_unstable();
            let mut sum = Vec3::zeros();
            for &i in &indices {
                sum += cloud[i].coords;
            }
            let centroid = Point3::from(sum / indices.len() as f64);
            Cluster {
                point_indices: indices,
                centroid,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(a.point_indices[0].cmp(&b.point_indices[0]))
    });
    clusters
}

/// Clusters the points inside a volume of interest above a plane.
pub fn cluster_in_volume(
    cloud: &PointCloud,
    prism: &HullPrism,
    tol: f64,
    min_size: usize,
) -> Vec<Cluster> {
    let candidates: Vec<usize> = (0..cloud.len())
        .filter(|&i| prism.contains(&cloud[i]))
        .collect();
    euclidean_clusters(cloud, &candidates, tol, min_size)
}

/// Eigen-decomposition of a symmetric 2x2 covariance matrix; returns
/// `(λ_max, λ_min, major_direction)`.
fn eigen2(cxx: f64, cxy: f64, cyy: f64) -> (f64, f64, Vec2) {
    let half_trace = 0.5 * (cxx + cyy);
    let det = cxx * cyy - cxy * cxy;
    let disc = (half_trace * half_trace - det).max(0.0).sqrt();
    let l_max = half_trace + disc;
    let l_min = half_trace - disc;

    // (A - λI) v = 0 has two row solutions; take the better-conditioned one.
    let v1 = Vec2::new(l_max - cyy, cxy);
    let v2 = Vec2::new(cxy, l_max - cxx);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let dir = if v.norm() > 0.0 {
        v.normalize()
    } else {
        Vec2::new(1.0, 0.0) // isotropic: any direction is an eigenvector
    };
    (l_max, l_min, dir)
}

/// Relative eigenvalue gap below which the spread is treated as isotropic
/// and the major axis snaps to the plane frame's `u` axis.
const EIGEN_TIE_RATIO: f64 = 0.99;

fn pca_box_in_frame(
    cluster: &Cluster,
    cloud: &PointCloud,
    frame: &PlaneFrame,
    pin_bottom: bool,
) -> Result<ObjectBox> {
    if cluster.is_empty() {
        return Err(CoreError::InvalidArgument(
            "cannot fit a box to an empty cluster".into(),
        ));
    }

    let projected: Vec<Vec2> = cluster
        .point_indices
        .iter()
        .map(|&i| frame.project(&cloud[i]))
        .collect();
    let n = projected.len() as f64;
    let mean = projected.iter().sum::<Vec2>() / n;
    let (mut cxx, mut cxy, mut cyy) = (0.0, 0.0, 0.0);
    for p in &projected {
        let r = p - mean;
        cxx += r.x * r.x;
        cxy += r.x * r.y;
        cyy += r.y * r.y;
    }
    cxx /= n;
    cxy /= n;
    cyy /= n;

    let (l_max, l_min, mut dir) = eigen2(cxx, cxy, cyy);
    if l_max < 1e-14 {
        return Err(CoreError::DegenerateCluster);
    }
    if l_min / l_max >= EIGEN_TIE_RATIO {
        // Isotropic footprint (round knob, square block): the eigenvectors
        // are numerically arbitrary, so pick the frame's u axis for
        // reproducibility.
        dir = Vec2::new(1.0, 0.0);
    }
    // Canonical sign, so equal inputs give bitwise-equal boxes.
    if dir.x < 0.0 || (dir.x == 0.0 && dir.y < 0.0) {
        dir = -dir;
    }
    let perp = Vec2::new(-dir.y, dir.x); // = normal × major, in plane coords

    let (mut s_min, mut s_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut h_min, mut h_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (p2, &i) in projected.iter().zip(&cluster.point_indices) {
        let s = (p2 - mean).dot(&dir);
        let t = (p2 - mean).dot(&perp);
        let h = frame.height(&cloud[i]);
        s_min = s_min.min(s);
        s_max = s_max.max(s);
        t_min = t_min.min(t);
        t_max = t_max.max(t);
        h_min = h_min.min(h);
        h_max = h_max.max(h);
    }

    let mut extent_major = 0.5 * (s_max - s_min);
    let mut extent_minor = 0.5 * (t_max - t_min);
    let center2 = mean + dir * 0.5 * (s_max + s_min) + perp * 0.5 * (t_max + t_min);
    let (bottom, top) = if pin_bottom { (0.0, h_max) } else { (h_min, h_max) };
    let center_h = 0.5 * (bottom + top);
    let extent_h = 0.5 * (top - bottom);

    let mut major3 = frame.u * dir.x + frame.v * dir.y;
    // Variance order and range order can disagree; the box reports ranges,
    // so swap when needed to keep extents[0] >= extents[1].
    if extent_minor > extent_major {
        std::mem::swap(&mut extent_major, &mut extent_minor);
        major3 = frame.u * perp.x + frame.v * perp.y;
    }
    let minor3 = frame.normal.cross(&major3);

    Ok(ObjectBox {
        center: frame.unproject(center2, center_h),
        axes: [major3, minor3, frame.normal],
        extents: [extent_major, extent_minor, extent_h],
    })
}

/// Fits a plane-aligned bounding box to a cluster resting on the plane: the
/// box bottom is pinned to the plane surface and the top reaches the
/// cluster's highest point.
///
/// In-plane orientation comes from 2D PCA of the projected points; extents
/// are half the coordinate ranges along the chosen axes.
pub fn pca_box(cluster: &Cluster, cloud: &PointCloud, plane: &PlaneModel) -> Result<ObjectBox> {
    let frame = PlaneFrame::from_plane(plane);
    pca_box_in_frame(cluster, cloud, &frame, true)
}

/// Like [`pca_box`] but for objects floating above the plane (handles,
/// rails): the box spans only the cluster's own height band.
pub fn pca_box_free(
    cluster: &Cluster,
    cloud: &PointCloud,
    plane: &PlaneModel,
) -> Result<ObjectBox> {
    let frame = PlaneFrame::from_plane(plane);
    pca_box_in_frame(cluster, cloud, &frame, false)
}

/// Selects opposition grasp points on a boxed object.
///
/// The ideal contacts are the centers of the two minor-axis side faces at
/// half the box height: `center ± extent_minor · minor`. Each is snapped to
/// the nearest measured cluster point, so the reported contacts always lie
/// on observed surface.
pub fn grasp_points(
    bbox: &ObjectBox,
    cluster: &Cluster,
    cloud: &PointCloud,
) -> Result<GraspEstimate> {
    if cluster.is_empty() {
        return Err(CoreError::InvalidArgument(
            "cannot place a grasp on an empty cluster".into(),
        ));
    }
    let minor = bbox.minor_axis();
    let half_width = bbox.extents[1];
    if !(half_width > 0.0) {
        return Err(CoreError::DegenerateCluster);
    }
    let target_a = bbox.center + minor * half_width;
    let target_b = bbox.center - minor * half_width;

    let nearest = |target: Point3| -> Point3 {
        let mut best = cloud[cluster.point_indices[0]];
        let mut best_d2 = f64::INFINITY;
        for &i in &cluster.point_indices {
            let d2 = (cloud[i] - target).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = cloud[i];
            }
        }
        best
    };

    let point_a = nearest(target_a);
    let point_b = nearest(target_b);
    let width = (point_a - point_b).norm();
    if width <= 1e-12 {
        return Err(CoreError::DegenerateCluster);
    }
    Ok(GraspEstimate {
        point_a,
        point_b,
        axis: minor,
        width,
    })
}

/// Searches a cloud for an elevated handle: a thin cluster floating at least
/// `min_height` above the reference plane.
///
/// When no fitted plane is available, a virtual horizontal reference is
/// placed through the lowest point of the cloud along `down` (the gravity
/// direction), so elevation is still measured against the scene's supporting
/// surface. Clusters are tried largest-first; the first one that is elevated,
/// thin enough, and graspable is returned.
pub fn detect_pot_handle(
    cloud: &PointCloud,
    plane: Option<&PlaneModel>,
    down: &Vec3,
    params: &PotHandleParams,
) -> Option<DetectedObject> {
    if cloud.is_empty() {
        return None;
    }

    let frame = match plane {
        Some(model) => PlaneFrame::from_plane(model),
        None => {
            let up = -down.normalize();
            let mut lowest = 0usize;
            let mut lowest_h = f64::INFINITY;
            for (i, p) in cloud.iter().enumerate() {
                let h = up.dot(&p.coords);
                if h < lowest_h {
                    lowest_h = h;
                    lowest = i;
                }
            }
            let virtual_plane = PlaneModel {
                normal: up,
                d: -up.dot(&cloud[lowest].coords),
                inlier_indices: Vec::new(),
                prominence: 0.0,
            };
            PlaneFrame::from_plane(&virtual_plane)
        }
    };

    let all: Vec<usize> = (0..cloud.len()).collect();
    let clusters = euclidean_clusters(cloud, &all, params.cluster_tol, params.min_cluster_size);

    for cluster in clusters {
        let lowest = cluster
            .point_indices
            .iter()
            .map(|&i| frame.height(&cloud[i]))
            .fold(f64::INFINITY, f64::min);
        if lowest < params.min_height {
            continue;
        }
        let Ok(bbox) = pca_box_in_frame(&cluster, cloud, &frame, false) else {
            continue;
        };
        if bbox.extents[1] > params.max_minor_extent {
            continue;
        }
        let Ok(grasp) = grasp_points(&bbox, &cluster, cloud) else {
            continue;
        };
        return Some(DetectedObject {
            cluster,
            bounding_box: bbox,
            grasp,
        });
    }
    None
}
