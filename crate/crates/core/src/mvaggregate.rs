//! Multi-view feature aggregation for scattered points.
//!
//! Each point is projected into every frame; frames where it lands in front
//! of the camera and inside the image contribute a bilinearly sampled
//! feature. The masked mean and population variance of those features, plus
//! a category one-hot, form the point's feature vector.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;

use crate::camera::project;
use crate::image::FeatureMap;
use crate::scatter::ScatterCloud;
use crate::scenesim::CameraFrame;
use crate::{Error, Result, Vec3};

/// Bilinear blend of the four texels around `(u, v)`. The caller keeps
/// `(u, v)` inside `[0, W-1] x [0, H-1]`.
pub fn bilinear_sample(map: &FeatureMap, u: f64, v: f64) -> Vec<f64> {
    let mut out = vec![0.0; map.channels()];
    bilinear_sample_into(map, u, v, &mut out);
    out
}

pub fn bilinear_sample_into(map: &FeatureMap, u: f64, v: f64, out: &mut [f64]) {
    debug_assert!(u >= 0.0 && v >= 0.0);
    debug_assert!(u <= (map.width() - 1) as f64 && v <= (map.height() - 1) as f64);
    let x0 = (u.floor() as usize).min(map.width() - 1);
    let y0 = (v.floor() as usize).min(map.height() - 1);
    let x1 = (x0 + 1).min(map.width() - 1);
    let y1 = (y0 + 1).min(map.height() - 1);
    let fx = u - x0 as f64;
    let fy = v - y0 as f64;
    let (t00, t10, t01, t11) = (map.texel(x0, y0), map.texel(x1, y0), map.texel(x0, y1), map.texel(x1, y1));
    for c in 0..out.len() {
        let top = t00[c] * (1.0 - fx) + t10[c] * fx;
        let bottom = t01[c] * (1.0 - fx) + t11[c] * fx;
        out[c] = top * (1.0 - fy) + bottom * fy;
    }
}

/// Projections of one point into `N` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    /// Continuous pixel coordinates; `(NaN, NaN)` where the point is behind
    /// the camera.
    pub pixels: Vec<[f64; 2]>,
    pub mask: Vec<bool>,
    channels: usize,
    /// `N x channels`, zero in masked-off rows.
    features: Vec<f64>,
}

impl ProjectionSet {
    pub fn from_parts(mask: Vec<bool>, features: Vec<Vec<f64>>) -> Result<Self> {
        Error::check_len("projection rows", mask.len(), features.len())?;
        let channels = features.first().map_or(0, Vec::len);
        if features.iter().any(|f| f.len() != channels) {
            return Err(Error::param("features", "rows differ in channel count"));
        }
        let flat = mask
            .iter()
            .zip(&features)
            .flat_map(|(&m, f)| f.iter().map(move |&x| if m { x } else { 0.0 }))
            .collect();
        Ok(Self {
            pixels: vec![[f64::NAN; 2]; mask.len()],
            mask,
            channels,
            features: flat,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.mask.len()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn feature(&self, frame: usize) -> &[f64] {
        &self.features[frame * self.channels..(frame + 1) * self.channels]
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    fn channel_values(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.mask.len())
            .filter(|&i| self.mask[i])
            .map(move |i| self.features[i * self.channels + c])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProjectionOptions {
    /// When set, a view is skipped if the point lies more than this many
    /// meters behind the surface in the frame's depth map. Points in front
    /// of the observed surface, or over invalid pixels, stay visible.
    pub occlusion_tolerance: Option<f64>,
}

/// Projects `point` into every frame and fetches color features where valid.
pub fn build_projection_set(point: &Vec3, frames: &[CameraFrame], options: &ProjectionOptions) -> ProjectionSet {
    let channels = frames.first().map_or(0, |f| f.color.channels());
    let n = frames.len();
    let mut set = ProjectionSet {
        pixels: vec![[f64::NAN; 2]; n],
        mask: vec![false; n],
        channels,
        features: vec![0.0; n * channels],
    };
    for (i, frame) in frames.iter().enumerate() {
        let Some(p) = project(point, &frame.intrinsics, &frame.pose) else {
            continue;
        };
        set.pixels[i] = [p.u, p.v];
        if !frame.intrinsics.contains(p.u, p.v) {
            continue;
        }
        if let Some(tol) = options.occlusion_tolerance {
            let observed = frame.depth.get(p.u.round() as usize, p.v.round() as usize);
            if observed > 0.0 && p.depth > observed + tol {
                continue;
            }
        }
        set.mask[i] = true;
        bilinear_sample_into(&frame.color, p.u, p.v, &mut set.features[i * channels..(i + 1) * channels]);
    }
    set
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Masked mean per channel; all zeros when no view is valid.
pub fn aggregate_mean(set: &ProjectionSet) -> Vec<f64> {
    let n = set.valid_count();
    if n == 0 {
        return vec![0.0; set.channels];
    }
    let mut buf = Vec::with_capacity(n);
    (0..set.channels)
        .map(|c| {
            buf.clear();
            buf.extend(set.channel_values(c));
            sort_for_summation(&mut buf);
            pairwise_sum(&buf) / n as f64
        })
        .collect()
}

/// Masked population variance about the masked mean.
pub fn aggregate_variance(set: &ProjectionSet) -> Vec<f64> {
    let n = set.valid_count();
    if n == 0 {
        return vec![0.0; set.channels];
    }
    let mut buf = Vec::with_capacity(n);
    (0..set.channels)
        .map(|c| {
            // offsets from the channel minimum are exactly zero for equal views
            let lo = set.channel_values(c).fold(f64::INFINITY, f64::min);
            buf.clear();
            buf.extend(set.channel_values(c).map(|x| x - lo));
            sort_for_summation(&mut buf);
            let mean = pairwise_sum(&buf) / n as f64;
            buf.iter_mut().for_each(|d| *d = (*d - mean) * (*d - mean));
            sort_for_summation(&mut buf);
            pairwise_sum(&buf) / n as f64
        })
        .collect()
}

// Summing in sorted order makes the result independent of frame order.
fn sort_for_summation(values: &mut [f64]) {
    values.sort_unstable_by(f64::total_cmp);
}

/// `feature` followed by a `count`-wide one-hot of `category` (all zeros for
/// an unknown category).
pub fn append_onehot(feature: &[f64], category: Option<usize>, count: usize) -> Result<Vec<f64>> {
    if let Some(c) = category {
        if c >= count {
            return Err(Error::Category { category: c, count });
        }
    }
    let mut out = Vec::with_capacity(feature.len() + count);
    out.extend_from_slice(feature);
    out.extend((0..count).map(|k| if Some(k) == category { 1.0 } else { 0.0 }));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedFeature {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub onehot: Vec<f64>,
    pub valid_count: usize,
}

impl AggregatedFeature {
    /// No frame saw the point; mean and variance are zero placeholders.
    pub fn is_degenerate(&self) -> bool {
        self.valid_count == 0
    }

    /// `[mean | variance | onehot]`
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.mean.len() + self.variance.len() + self.onehot.len());
        v.extend_from_slice(&self.mean);
        v.extend_from_slice(&self.variance);
        v.extend_from_slice(&self.onehot);
        v
    }

    /// Leading channels subject to soft weighting (mean and variance).
    pub fn weighted_channels(&self) -> usize {
        self.mean.len() + self.variance.len()
    }
}

pub fn aggregate(set: &ProjectionSet, category: Option<usize>, category_count: usize) -> Result<AggregatedFeature> {
    Ok(AggregatedFeature {
        mean: aggregate_mean(set),
        variance: aggregate_variance(set),
        onehot: append_onehot(&[], category, category_count)?,
        valid_count: set.valid_count(),
    })
}

/// Aggregates every point of `cloud` over `frames` and stores the combined
/// vectors in `cloud.features`.
pub fn aggregate_cloud(
    cloud: &mut ScatterCloud,
    frames: &[CameraFrame],
    category_count: usize,
    options: &ProjectionOptions,
) -> Result<Vec<AggregatedFeature>> {
    let aggregated = cloud
        .points
        .iter()
        .map(|p| {
            let set = build_projection_set(&p.position, frames, options);
            aggregate(&set, Some(p.category as usize), category_count)
        })
        .collect::<Result<Vec<_>>>()?;
    cloud.features = aggregated.iter().map(AggregatedFeature::to_vector).collect();
    Ok(aggregated)
}
