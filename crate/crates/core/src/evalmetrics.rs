//! Detection and reconstruction metrics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::obb::{iou_3d, OrientedBox};
use crate::rng::indexed_seed;
use crate::spatial::KdTree;
use crate::surfacefilter::sample_surface;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    /// Squared-distance threshold for the F-score.
    pub fscore_threshold: f64,
    pub threshold_mode: ThresholdMode,
    pub sample_count: usize,
    /// Minimum IoU for a detection to enter the reconstruction metrics.
    pub reconstruction_iou: f64,
    pub rng_seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_thresholds: vec![0.25, 0.5],
            fscore_threshold: 0.004,
            threshold_mode: ThresholdMode::Squared,
            sample_count: 2048,
            reconstruction_iou: 0.25,
            rng_seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iou_thresholds.is_empty() {
            return Err(Error::Empty("iou thresholds"));
        }
        if self.iou_thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::param("iou threshold", "must lie in (0, 1)"));
        }
        if !(self.fscore_threshold > 0.0 && self.fscore_threshold.is_finite()) {
            return Err(Error::param("fscore threshold", "must be positive"));
        }
        if self.sample_count == 0 {
            return Err(Error::param("sample count", "must be at least 1"));
        }
        Ok(())
    }
}

/// How the F-score threshold `d` is compared with point distances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdMode {
    /// `|p - q|^2 < d`
    #[default]
    Squared,
    /// `|p - q| < d`
    Unsquared,
}

/// Ranked detection outcomes against one GT set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Detection indices in descending score order.
    pub order: Vec<usize>,
    /// TP flag per ranked detection.
    pub flags: Vec<bool>,
    /// Matched GT per ranked detection.
    pub assigned: Vec<Option<usize>>,
}

/// Greedy matching in descending score order (ties by index). Each detection
/// takes the unmatched GT of the same category with the highest IoU at or
/// above `iou_threshold`.
pub fn match_detections(dets: &[OrientedBox], gts: &[OrientedBox], iou_threshold: f64) -> Matching {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score).then(a.cmp(&b)));
    let mut taken = vec![false; gts.len()];
    let mut flags = Vec::with_capacity(dets.len());
    let mut assigned = Vec::with_capacity(dets.len());
    for &i in &order {
        let mut best: Option<(usize, f64)> = None;
        for (j, g) in gts.iter().enumerate() {
            if taken[j] || g.category != dets[i].category {
                continue;
            }
            let iou = iou_3d(&dets[i], g);
            if iou >= iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((j, iou));
            }
        }
        if let Some((j, _)) = best {
            taken[j] = true;
        }
        flags.push(best.is_some());
        assigned.push(best.map(|(j, _)| j));
    }
    Matching { order, flags, assigned }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrCurve {
    /// `(recall, precision)` after each ranked detection.
    pub points: Vec<(f64, f64)>,
}

impl PrCurve {
    pub fn from_flags(flags: &[bool], gt_count: usize) -> Result<Self> {
        if gt_count == 0 {
            return Err(Error::Empty("ground truth"));
        }
        let mut tp = 0usize;
        let points = flags
            .iter()
            .enumerate()
            .map(|(k, &f)| {
                tp += f as usize;
                (tp as f64 / gt_count as f64, tp as f64 / (k + 1) as f64)
            })
            .collect();
        Ok(Self { points })
    }

    /// Highest precision among points with recall at least `r`, or 0.
    pub fn interpolated_precision(&self, r: f64) -> f64 {
        self.points
            .iter()
            .filter(|(rec, _)| *rec >= r - 1e-12)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max)
    }
}

/// 11-point interpolated AP over ranked TP/FP flags.
pub fn average_precision_11pt(flags: &[bool], gt_count: usize) -> Result<f64> {
    let curve = PrCurve::from_flags(flags, gt_count)?;
    let sum: f64 = (0..=10).map(|i| curve.interpolated_precision(i as f64 / 10.0)).sum();
    Ok(sum / 11.0)
}

pub fn recall_at(flags: &[bool], gt_count: usize) -> Result<f64> {
    if gt_count == 0 {
        return Err(Error::Empty("ground truth"));
    }
    Ok(flags.iter().filter(|f| **f).count() as f64 / gt_count as f64)
}

fn mean_nearest_sq(from: &[Vec3], tree: &KdTree) -> f64 {
    from.iter().map(|p| tree.nearest(p).1).sum::<f64>() / from.len() as f64
}

/// Symmetric Chamfer distance in squared meters.
pub fn chamfer(g: &[Vec3], r: &[Vec3]) -> Result<f64> {
    if g.is_empty() || r.is_empty() {
        return Err(Error::Empty("chamfer point set"));
    }
    let (tg, tr) = (KdTree::new(g)?, KdTree::new(r)?);
    Ok(mean_nearest_sq(g, &tr) + mean_nearest_sq(r, &tg))
}

fn fraction_within(from: &[Vec3], tree: &KdTree, d: f64, mode: ThresholdMode) -> f64 {
    let limit = match mode {
        ThresholdMode::Squared => d,
        ThresholdMode::Unsquared => d * d,
    };
    from.iter().filter(|p| tree.nearest(p).1 < limit).count() as f64 / from.len() as f64
}

/// F-score on a 0..100 scale.
pub fn fscore(g: &[Vec3], r: &[Vec3], d: f64, mode: ThresholdMode) -> Result<f64> {
    if g.is_empty() || r.is_empty() {
        return Err(Error::Empty("fscore point set"));
    }
    if !(d > 0.0) {
        return Err(Error::param("fscore threshold", "must be positive"));
    }
    let (tg, tr) = (KdTree::new(g)?, KdTree::new(r)?);
    let precision = fraction_within(r, &tg, d, mode);
    let recall = fraction_within(g, &tr, d, mode);
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(100.0 * 2.0 * precision * recall / (precision + recall))
}

pub fn shape_code_loss(pred: &[f64], gt: &[f64]) -> Result<f64> {
    Error::check_len("shape code", pred.len(), gt.len())?;
    Ok(pred.iter().zip(gt).map(|(a, b)| (a - b) * (a - b)).sum())
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdScores {
    pub ap: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionMetrics {
    /// Category -> one entry per IoU threshold.
    pub per_category: BTreeMap<u32, Vec<ThresholdScores>>,
    /// Mean over categories, one entry per IoU threshold.
    pub mean: Vec<ThresholdScores>,
}

/// AP and recall per category with at least one GT box.
pub fn evaluate_detections(dets: &[OrientedBox], gts: &[OrientedBox], config: &EvalConfig) -> Result<DetectionMetrics> {
    config.validate()?;
    let mut categories: Vec<u32> = gts.iter().map(|g| g.category).collect();
    categories.sort_unstable();
    categories.dedup();

    let mut out = DetectionMetrics::default();
    for &c in &categories {
        let d: Vec<OrientedBox> = dets.iter().filter(|b| b.category == c).copied().collect();
        let g: Vec<OrientedBox> = gts.iter().filter(|b| b.category == c).copied().collect();
        let mut scores = Vec::with_capacity(config.iou_thresholds.len());
        for &t in &config.iou_thresholds {
            let m = match_detections(&d, &g, t);
            scores.push(ThresholdScores {
                ap: average_precision_11pt(&m.flags, g.len())?,
                recall: recall_at(&m.flags, g.len())?,
            });
        }
        out.per_category.insert(c, scores);
    }
    out.mean = (0..config.iou_thresholds.len())
        .map(|k| {
            let n = out.per_category.len().max(1) as f64;
            ThresholdScores {
                ap: out.per_category.values().map(|s| s[k].ap).sum::<f64>() / n,
                recall: out.per_category.values().map(|s| s[k].recall).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReconstructionMetrics {
    /// Number of GT boxes with a kept detection.
    pub pairs: usize,
    /// Mean over pairs, `None` without pairs.
    pub chamfer: Option<f64>,
    pub fscore: Option<f64>,
}

/// Chamfer and F-score between box surfaces of each GT and its best
/// detection, keeping only detections whose IoU exceeds the configured level.
pub fn evaluate_reconstruction(
    dets: &[OrientedBox],
    gts: &[OrientedBox],
    config: &EvalConfig,
) -> Result<ReconstructionMetrics> {
    config.validate()?;
    let m = match_detections(dets, gts, config.reconstruction_iou);
    let mut pairs = Vec::new();
    for (&i, a) in m.order.iter().zip(&m.assigned) {
        if let Some(j) = a {
            if iou_3d(&dets[i], &gts[*j]) > config.reconstruction_iou {
                pairs.push((i, *j));
            }
        }
    }
    pairs.sort_unstable_by_key(|&(_, j)| j);
    if pairs.is_empty() {
        return Ok(ReconstructionMetrics::default());
    }
    let (mut cd, mut f) = (0.0, 0.0);
    for &(i, j) in &pairs {
        let gs = sample_surface(&gts[j].shell(), config.sample_count, indexed_seed(config.rng_seed, 2 * j as u64))?;
        let ds = sample_surface(&dets[i].shell(), config.sample_count, indexed_seed(config.rng_seed, 2 * j as u64 + 1))?;
        cd += chamfer(&gs, &ds)?;
        f += fscore(&gs, &ds, config.fscore_threshold, config.threshold_mode)?;
    }
    let n = pairs.len() as f64;
    Ok(ReconstructionMetrics {
        pairs: pairs.len(),
        chamfer: Some(cd / n),
        fscore: Some(f / n),
    })
}
