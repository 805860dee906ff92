//! Synthetic scenes standing in for a real dataset and a trained depth
//! network.
//!
//! A scene is a set of textured boxes plus a list of posed cameras. Frames
//! are rendered by casting one ray through every pixel center; the nearest
//! triangle hit gives camera-frame depth and a Lambert-shaded, procedurally
//! textured color. Texture depends only on the world position of the surface
//! point and shading only on its normal, so a surface point has the same
//! color from every view. The background is a direction-dependent pattern.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::camera::{pixel_ray, project, Intrinsics, Pose};
use crate::geometry::{Aabb, Triangle};
use crate::image::{DepthMap, FeatureMap};
use crate::obb::OrientedBox;
use crate::rng::rng_from_seed;
use crate::{Error, Result, Vec3};

pub const COLOR_CHANNELS: usize = 3;
const TEXTURE_PERIOD: f64 = 0.3;
const AMBIENT: f64 = 0.35;

const PALETTE: [[f64; 3]; 8] = [
    [0.85, 0.30, 0.25],
    [0.25, 0.60, 0.85],
    [0.35, 0.80, 0.30],
    [0.90, 0.75, 0.20],
    [0.60, 0.35, 0.80],
    [0.30, 0.80, 0.75],
    [0.90, 0.50, 0.70],
    [0.55, 0.55, 0.55],
];

/// Default albedo for the `index`-th object of a scene.
pub fn palette_albedo(index: usize) -> [f64; 3] {
    PALETTE[index % PALETTE.len()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub bbox: OrientedBox,
    /// World-frame surface; defaults to the box shell.
    pub mesh: Vec<Triangle>,
    pub albedo: [f64; 3],
}

impl SceneObject {
    pub fn from_box(bbox: OrientedBox, albedo: [f64; 3]) -> Self {
        Self {
            mesh: bbox.shell(),
            bbox,
            albedo,
        }
    }

    pub fn category(&self) -> u32 {
        self.bbox.category
    }

    /// Every mesh vertex lies inside the box inflated by 1e-6 m.
    pub fn mesh_within_box(&self) -> bool {
        self.mesh
            .iter()
            .flat_map(|t| [t.a, t.b, t.c])
            .all(|v| self.bbox.contains(&v, 1e-6))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraSpec {
    pub intrinsics: Intrinsics,
    pub pose: Pose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub objects: Vec<SceneObject>,
    pub cameras: Vec<CameraSpec>,
    pub rng_seed: u64,
    pub depth_noise_sigma: f64,
    pub outlier_rate: f64,
    /// Valid depth interval; rendered depths outside it are invalid (0).
    pub depth_min: f64,
    pub depth_max: f64,
    /// Scene extent for dense-grid accounting; derived from the objects
    /// when absent.
    pub bounds: Option<Aabb>,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.objects.is_empty() {
            return Err(Error::Empty("scene objects"));
        }
        if self.cameras.is_empty() {
            return Err(Error::Empty("scene cameras"));
        }
        if !(self.depth_noise_sigma >= 0.0) {
            return Err(Error::param("depth_noise_sigma", "must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.outlier_rate) {
            return Err(Error::param("outlier_rate", "must lie in [0, 1]"));
        }
        if !(self.depth_min > 0.0 && self.depth_min < self.depth_max) {
            return Err(Error::param("depth range", "need 0 < depth_min < depth_max"));
        }
        for c in &self.cameras {
            c.intrinsics.validate()?;
        }
        Ok(())
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds.unwrap_or_else(|| {
            Aabb::from_points(self.objects.iter().flat_map(|o| o.mesh.iter()).flat_map(|t| [&t.a, &t.b, &t.c]))
                .inflate(0.5)
        })
    }

    pub fn gt_boxes(&self) -> Vec<OrientedBox> {
        self.objects.iter().map(|o| o.bbox).collect()
    }

    /// All object triangles in one list.
    pub fn gt_mesh(&self) -> Vec<Triangle> {
        self.objects.iter().flat_map(|o| o.mesh.iter().copied()).collect()
    }

    fn camera(&self, index: usize) -> Result<&CameraSpec> {
        self.cameras.get(index).ok_or(Error::CameraIndex {
            index,
            count: self.cameras.len(),
        })
    }
}

/// A detection in image space.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Box2d {
    pub category: u32,
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl Box2d {
    pub fn area(&self) -> f64 {
        (self.u_max - self.u_min).max(0.0) * (self.v_max - self.v_min).max(0.0)
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }
}

/// One posed view with depth, color features and 2D detections.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    pub intrinsics: Intrinsics,
    pub pose: Pose,
    pub depth: DepthMap,
    pub color: FeatureMap,
    pub boxes2d: Vec<Box2d>,
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    t: f64,
    object: usize,
    normal: Vec3,
}

struct Tracer<'a> {
    objects: &'a [SceneObject],
    bounds: Vec<Aabb>,
}

impl<'a> Tracer<'a> {
    fn new(objects: &'a [SceneObject]) -> Self {
        let bounds = objects
            .iter()
            .map(|o| Aabb::from_points(o.mesh.iter().flat_map(|t| [&t.a, &t.b, &t.c])).inflate(1e-9))
            .collect();
        Self { objects, bounds }
    }

    fn cast(&self, origin: &Vec3, dir: &Vec3) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        for (i, (obj, aabb)) in self.objects.iter().zip(&self.bounds).enumerate() {
            match aabb.intersect_ray(origin, dir) {
                Some((_, t1)) if t1 > 0.0 => {}
                _ => continue,
            }
            for tri in &obj.mesh {
                if let Some(t) = tri.intersect_ray(origin, dir, 0.0) {
                    if best.is_none_or(|b| t < b.t) {
                        best = Some(Hit {
                            t,
                            object: i,
                            normal: tri.normal(),
                        });
                    }
                }
            }
        }
        best
    }
}

/// View-independent surface texture in `[-1, 1]`.
fn texture(p: &Vec3) -> f64 {
    let k = TAU / TEXTURE_PERIOD;
    ((k * p.x).sin() + (k * p.y).sin() + (k * p.z).sin()) / 3.0
}

fn light_direction() -> Vec3 {
    Vec3::new(0.3, 0.5, 1.0).normalize()
}

/// Shaded color of a surface point.
pub fn surface_color(point: &Vec3, normal: &Vec3, albedo: &[f64; 3]) -> [f64; 3] {
    let shade = AMBIENT + (1.0 - AMBIENT) * normal.dot(&light_direction()).abs();
    let tex = 0.75 + 0.25 * texture(point);
    albedo.map(|a| (a * shade * tex).clamp(0.0, 1.0))
}

/// Background color seen along world direction `dir`.
pub fn background_color(dir: &Vec3) -> [f64; 3] {
    let az = dir.y.atan2(dir.x);
    let el = dir.z.clamp(-1.0, 1.0).asin();
    [
        0.5 + 0.2 * (9.0 * az).sin() + 0.2 * (23.0 * el).sin(),
        0.5 + 0.2 * (13.0 * az + 1.0).sin() + 0.2 * (17.0 * el + 2.0).cos(),
        0.5 + 0.2 * (7.0 * az + 2.0).cos() + 0.2 * (29.0 * el).sin(),
    ]
}

fn render(scene: &SceneSpec, index: usize, with_color: bool) -> Result<(DepthMap, FeatureMap)> {
    let cam = scene.camera(index)?;
    let k = &cam.intrinsics;
    let (w, h) = (k.width as usize, k.height as usize);
    let tracer = Tracer::new(&scene.objects);
    let mut depth = DepthMap::new(w, h);
    let mut color = FeatureMap::new(if with_color { w } else { 0 }, h, COLOR_CHANNELS);
    for v in 0..h {
        for u in 0..w {
            let ray = pixel_ray(u as f64, v as f64, k, &cam.pose);
            let hit = tracer.cast(&ray.origin, &ray.direction);
            let mut rgb = background_color(&ray.direction);
            if let Some(hit) = hit {
                let z = ray.depth_at_distance(hit.t);
                if z >= scene.depth_min && z <= scene.depth_max {
                    depth.set(u, v, z);
                }
                if with_color {
                    let p = ray.origin + ray.direction * hit.t;
                    rgb = surface_color(&p, &hit.normal, &scene.objects[hit.object].albedo);
                }
            }
            if with_color {
                color.texel_mut(u, v).copy_from_slice(&rgb);
            }
        }
    }
    Ok((depth, color))
}

/// Noise-free camera-frame depth of camera `index`; 0 where the pixel ray
/// misses every object or the hit falls outside the scene's depth range.
pub fn render_depth(scene: &SceneSpec, index: usize) -> Result<DepthMap> {
    render(scene, index, false).map(|(d, _)| d)
}

/// Noise-free frame: depth, color and projected ground-truth 2D boxes.
pub fn render_frame(scene: &SceneSpec, index: usize, min_box_pixels: f64) -> Result<CameraFrame> {
    let (depth, color) = render(scene, index, true)?;
    let cam = scene.camera(index)?;
    Ok(CameraFrame {
        intrinsics: cam.intrinsics,
        pose: cam.pose,
        depth,
        color,
        boxes2d: project_gt_boxes(scene, index, min_box_pixels)?,
    })
}

/// Adds `N(0, sigma²)` to every valid pixel and replaces a fraction
/// `outlier_rate` of them with uniform depths in `[depth_min, depth_max]`.
/// Results are clamped to that range; invalid pixels stay 0.
pub fn perturb_depth(
    depth: &DepthMap,
    sigma: f64,
    outlier_rate: f64,
    depth_min: f64,
    depth_max: f64,
    seed: u64,
) -> DepthMap {
    let mut out = depth.clone();
    let mut rng = rng_from_seed(seed);
    for d in out.as_mut_slice() {
        if *d <= 0.0 {
            continue;
        }
        let roll: f64 = rng.random();
        let noise: f64 = rng.sample(StandardNormal);
        if roll < outlier_rate {
            *d = rng.random_range(depth_min..=depth_max);
        } else if sigma > 0.0 {
            *d = (*d + sigma * noise).clamp(depth_min, depth_max);
        }
    }
    out
}

/// Projects each object's mesh vertices into camera `index` and returns the
/// image-clipped hull of those in front of the camera. Objects with no vertex
/// in front, or whose clipped box covers less than `min_pixels`, are dropped.
pub fn project_gt_boxes(scene: &SceneSpec, index: usize, min_pixels: f64) -> Result<Vec<Box2d>> {
    let cam = scene.camera(index)?;
    let k = &cam.intrinsics;
    let (u_hi, v_hi) = ((k.width - 1) as f64, (k.height - 1) as f64);
    let mut boxes = Vec::new();
    for obj in &scene.objects {
        let mut hull: Option<Box2d> = None;
        for vtx in obj.mesh.iter().flat_map(|t| [t.a, t.b, t.c]) {
            if let Some(p) = project(&vtx, k, &cam.pose) {
                let b = hull.get_or_insert(Box2d {
                    category: obj.category(),
                    u_min: p.u,
                    v_min: p.v,
                    u_max: p.u,
                    v_max: p.v,
                });
                b.u_min = b.u_min.min(p.u);
                b.v_min = b.v_min.min(p.v);
                b.u_max = b.u_max.max(p.u);
                b.v_max = b.v_max.max(p.v);
            }
        }
        let Some(mut b) = hull else { continue };
        if b.u_max < 0.0 || b.v_max < 0.0 || b.u_min > u_hi || b.v_min > v_hi {
            continue;
        }
        b.u_min = b.u_min.clamp(0.0, u_hi);
        b.u_max = b.u_max.clamp(0.0, u_hi);
        b.v_min = b.v_min.clamp(0.0, v_hi);
        b.v_max = b.v_max.clamp(0.0, v_hi);
        if b.area() >= min_pixels {
            boxes.push(b);
        }
    }
    Ok(boxes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KeyframeCriteria {
    pub target_count: usize,
    pub min_translation: f64,
    pub min_rotation_deg: f64,
}

impl Default for KeyframeCriteria {
    fn default() -> Self {
        Self {
            target_count: 50,
            min_translation: 0.1,
            min_rotation_deg: 10.0,
        }
    }
}

fn enough_motion(a: &Pose, b: &Pose, c: &KeyframeCriteria) -> bool {
    (a.center() - b.center()).norm() >= c.min_translation
        || a.rotation_angle_deg(b) >= c.min_rotation_deg
}

/// Picks up to `target_count` frames, preferring frames that have 2D
/// detections and move enough relative to the previously selected frame.
///
/// 1. Temporal greedy scan: a frame qualifies with at least one detection
///    and translation or rotation past the thresholds relative to the last
///    selected frame.
/// 2. If short, rescan ignoring detections; motion is checked against the
///    nearest earlier selected frame.
/// 3. If still short, fill with the remaining frames in temporal order,
///    frames with detections first.
///
/// Returns sorted, unique indices.
pub fn select_keyframes(poses: &[Pose], detections: &[usize], criteria: &KeyframeCriteria) -> Vec<usize> {
    let n = poses.len().min(detections.len());
    let target = criteria.target_count.min(n);
    let mut selected = alloc::vec![false; n];
    let mut count = 0;

    let mut last: Option<usize> = None;
    for i in 0..n {
        if count == target {
            break;
        }
        if detections[i] == 0 {
            continue;
        }
        if last.is_none_or(|l| enough_motion(&poses[l], &poses[i], criteria)) {
            selected[i] = true;
            count += 1;
            last = Some(i);
        }
    }

    if count < target {
        for i in 0..n {
            if count == target {
                break;
            }
            if selected[i] {
                continue;
            }
            let prev = (0..i).rev().find(|&j| selected[j]);
            if prev.is_none_or(|p| enough_motion(&poses[p], &poses[i], criteria)) {
                selected[i] = true;
                count += 1;
            }
        }
    }

    for with_detections in [true, false] {
        for i in 0..n {
            if count == target {
                break;
            }
            if !selected[i] && (detections[i] > 0) == with_detections {
                selected[i] = true;
                count += 1;
            }
        }
    }

    (0..n).filter(|&i| selected[i]).collect()
}

/// `steps` cameras evenly spaced on a horizontal circle of `radius` around
/// `look_at`, at world height `height`, all facing `look_at`.
pub fn orbit_poses(look_at: Vec3, radius: f64, height: f64, steps: usize) -> Result<Vec<Pose>> {
    if !(radius > 0.0) {
        return Err(Error::param("orbit radius", "must be positive"));
    }
    (0..steps)
        .map(|i| {
            let theta = TAU * i as f64 / steps as f64;
            let eye = Vec3::new(
                look_at.x + radius * theta.cos(),
                look_at.y + radius * theta.sin(),
                height,
            );
            Pose::look_at(eye, look_at, Vec3::new(0.0, 0.0, 1.0))
        })
        .collect()
}

fn objects_from(boxes: &[([f64; 3], [f64; 3], f64, u32)]) -> Vec<SceneObject> {
    boxes
        .iter()
        .enumerate()
        .map(|(i, &(c, s, yaw, cat))| {
            let b = OrientedBox::new(Vec3::from(c), Vec3::from(s), yaw, cat, 1.0)
                .expect("preset boxes are valid");
            SceneObject::from_box(b, palette_albedo(i))
        })
        .collect()
}

/// Desk-scale demo: three axis-aligned boxes of distinct categories seen
/// from a 20-camera orbit. Noise-free.
pub fn demo_scene() -> SceneSpec {
    let objects = objects_from(&[
        ([-0.9, -0.5, 0.4], [0.5, 0.5, 0.8], 0.0, 0),
        ([0.6, 0.4, 0.375], [1.2, 0.7, 0.75], 0.0, 1),
        ([-0.2, 1.1, 0.25], [0.6, 0.4, 0.5], 0.0, 2),
    ]);
    let intrinsics =
        Intrinsics::new(130.0, 130.0, 79.5, 59.5, 160, 120).expect("preset intrinsics are valid");
    let cameras = orbit_poses(Vec3::new(0.0, 0.2, 0.4), 3.2, 1.6, 20)
        .expect("preset orbit is valid")
        .into_iter()
        .map(|pose| CameraSpec { intrinsics, pose })
        .collect();
    SceneSpec {
        objects,
        cameras,
        rng_seed: 7,
        depth_noise_sigma: 0.0,
        outlier_rate: 0.0,
        depth_min: 0.1,
        depth_max: 8.0,
        bounds: None,
    }
}

/// Room-scale scene with fixed 8 x 8 x 3 m bounds.
pub fn room_scene() -> SceneSpec {
    let objects = objects_from(&[
        ([-2.5, -2.0, 0.45], [0.5, 0.5, 0.9], 0.3, 0),
        ([-1.0, -2.2, 0.45], [0.5, 0.5, 0.9], -0.2, 0),
        ([0.5, 0.0, 0.375], [1.6, 0.9, 0.75], 0.0, 1),
        ([2.6, 1.5, 1.0], [0.6, 1.8, 2.0], 0.5, 3),
        ([-2.0, 2.2, 0.25], [0.8, 0.5, 0.5], 1.0, 2),
        ([1.8, -2.4, 0.4], [1.2, 0.6, 0.8], -0.7, 4),
    ]);
    let intrinsics =
        Intrinsics::new(260.0, 260.0, 159.5, 119.5, 320, 240).expect("preset intrinsics are valid");
    let cameras = orbit_poses(Vec3::new(0.0, 0.0, 0.6), 3.0, 1.7, 30)
        .expect("preset orbit is valid")
        .into_iter()
        .map(|pose| CameraSpec { intrinsics, pose })
        .collect();
    SceneSpec {
        objects,
        cameras,
        rng_seed: 11,
        depth_noise_sigma: 0.0,
        outlier_rate: 0.0,
        depth_min: 0.1,
        depth_max: 12.0,
        bounds: Some(Aabb::new(Vec3::new(-4.0, -4.0, 0.0), Vec3::new(4.0, 4.0, 3.0))),
    }
}
