//! Multi-view point scattering.
//!
//! Depth pixels inside each 2D detection box are back-projected on a strided
//! grid whose pixel stride keeps world spacing near `radius`. A candidate is
//! dropped when an already accepted point lies closer than `radius`, so the
//! result depends on the order frames are inserted in.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;

use crate::camera::backproject;
use crate::rng::rng_from_seed;
use crate::scenesim::CameraFrame;
use crate::spatial::RadiusGrid;
use crate::{Error, Result, Vec3};

pub const DEFAULT_RADIUS: f64 = 0.04;
pub const DEFAULT_MAX_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScatterPoint {
    pub position: Vec3,
    pub source_frame: u32,
    pub source_pixel: (u32, u32),
    pub category: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScatterConfig {
    pub radius: f64,
    pub max_points: usize,
    pub rng_seed: u64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            radius: DEFAULT_RADIUS,
            max_points: DEFAULT_MAX_POINTS,
            rng_seed: 0,
        }
    }
}

impl ScatterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::param("scatter radius", "must be positive"));
        }
        if self.max_points == 0 {
            return Err(Error::param("max_points", "must be at least 1"));
        }
        Ok(())
    }
}

/// Scattered points with their per-point features and surface scores, kept
/// as parallel arrays.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScatterCloud {
    pub points: Vec<ScatterPoint>,
    pub features: Vec<Vec<f64>>,
    pub scores: Vec<f64>,
}

impl ScatterCloud {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Appends a point with empty features and a neutral score of 1.
    pub fn push(&mut self, point: ScatterPoint) {
        self.points.push(point);
        self.features.push(Vec::new());
        self.scores.push(1.0);
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Keeps the listed indices (ascending) across all arrays.
    pub fn select(&self, indices: &[usize]) -> ScatterCloud {
        ScatterCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            scores: indices.iter().map(|&i| self.scores[i]).collect(),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.points.len() == self.features.len() && self.points.len() == self.scores.len()
    }
}

/// Pixel stride `max(1, round(f * radius / median_depth))`.
pub fn box_sampling_stride(focal: f64, radius: f64, median_depth: f64) -> Result<usize> {
    if !(median_depth > 0.0) {
        return Err(Error::NonPositiveDepth(median_depth));
    }
    if !(focal > 0.0 && radius > 0.0) {
        return Err(Error::param("stride inputs", "focal and radius must be positive"));
    }
    Ok((focal * radius / median_depth).round().max(1.0) as usize)
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Incremental scatterer owning the cloud and its deduplication index.
#[derive(Debug, Clone)]
pub struct Scatterer {
    config: ScatterConfig,
    cloud: ScatterCloud,
    index: RadiusGrid,
}

impl Scatterer {
    pub fn new(config: ScatterConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            index: RadiusGrid::new(config.radius)?,
            cloud: ScatterCloud::new(),
            config,
        })
    }

    /// Starts from an existing cloud; its points take part in deduplication.
    pub fn with_cloud(config: ScatterConfig, cloud: ScatterCloud) -> Result<Self> {
        let mut s = Self::new(config)?;
        for p in &cloud.points {
            s.index.insert(p.position);
        }
        s.cloud = cloud;
        Ok(s)
    }

    pub fn cloud(&self) -> &ScatterCloud {
        &self.cloud
    }

    pub fn into_cloud(self) -> ScatterCloud {
        self.cloud
    }

    /// Scatters one frame, returning the number of accepted points.
    pub fn scatter_frame(&mut self, frame: &CameraFrame, frame_index: u32) -> usize {
        let before = self.cloud.len();
        let k = &frame.intrinsics;
        let depth = &frame.depth;
        let (w, h) = (depth.width(), depth.height());
        let mut samples = Vec::new();
        for b in &frame.boxes2d {
            let (u0, u1) = (b.u_min.max(0.0).ceil(), b.u_max.min((w - 1) as f64).floor());
            let (v0, v1) = (b.v_min.max(0.0).ceil(), b.v_max.min((h - 1) as f64).floor());
            if u1 < u0 || v1 < v0 {
                continue;
            }
            let (u0, u1, v0, v1) = (u0 as usize, u1 as usize, v0 as usize, v1 as usize);

            samples.clear();
            for v in v0..=v1 {
                for u in u0..=u1 {
                    let d = depth.get(u, v);
                    if d > 0.0 {
                        samples.push(d);
                    }
                }
            }
            let Some(med) = median(&mut samples) else { continue };
            let stride = box_sampling_stride(k.focal(), self.config.radius, med)
                .expect("median of positive depths is positive");

            for v in (v0..=v1).step_by(stride) {
                for u in (u0..=u1).step_by(stride) {
                    let d = depth.get(u, v);
                    if d <= 0.0 {
                        continue;
                    }
                    let p = backproject(u as f64, v as f64, d, k, &frame.pose)
                        .expect("valid depth is positive");
                    if self.index.any_within(&p, self.config.radius) {
                        continue;
                    }
                    self.index.insert(p);
                    self.cloud.push(ScatterPoint {
                        position: p,
                        source_frame: frame_index,
                        source_pixel: (u as u32, v as u32),
                        category: b.category,
                    });
                }
            }
        }
        self.cloud.len() - before
    }
}

/// One-shot form of [`Scatterer::scatter_frame`] over an existing cloud.
pub fn scatter_frame(
    frame: &CameraFrame,
    frame_index: u32,
    existing: &mut ScatterCloud,
    config: &ScatterConfig,
) -> Result<usize> {
    let mut s = Scatterer::with_cloud(*config, core::mem::take(existing))?;
    let added = s.scatter_frame(frame, frame_index);
    *existing = s.into_cloud();
    Ok(added)
}

/// Uniform random subset of exactly `max_points` points (input order kept),
/// or the cloud unchanged if it is already small enough.
pub fn cap_points(cloud: ScatterCloud, max_points: usize, seed: u64) -> ScatterCloud {
    if cloud.len() <= max_points {
        return cloud;
    }
    let mut rng = rng_from_seed(seed);
    let mut keep = rand::seq::index::sample(&mut rng, cloud.len(), max_points).into_vec();
    keep.sort_unstable();
    cloud.select(&keep)
}
