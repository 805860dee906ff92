//! Surface inlier labeling against ground truth, binary focal loss, a
//! photometric-consistency surface score and soft feature weighting.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;

use crate::geometry::Triangle;
use crate::rng::rng_from_seed;
use crate::spatial::KdTree;
use crate::{Error, Result, Vec3};

/// Scores are clipped to `[SCORE_EPS, 1 - SCORE_EPS]` inside the focal loss.
pub const SCORE_EPS: f64 = 1e-7;
pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_TAU: f64 = 0.05;
/// Score given to points seen by fewer than two frames.
pub const DEFAULT_SCORE: f64 = 0.5;

/// Per-point nearest ground-truth distance and the inlier label it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceLabeling {
    pub labels: Vec<bool>,
    pub distances: Vec<f64>,
    pub tau: f64,
}

impl SurfaceLabeling {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn inlier_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Fraction of points labeled outlier; zero for an empty set.
    pub fn outlier_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            1.0 - self.inlier_count() as f64 / self.labels.len() as f64
        }
    }
}

/// Per-point surface confidence in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceScore(pub Vec<f64>);

impl SurfaceScore {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Labels each point inlier iff its nearest ground-truth point is closer
/// than `tau`.
pub fn label_points(points: &[Vec3], gt_surface: &[Vec3], tau: f64) -> Result<SurfaceLabeling> {
    if gt_surface.is_empty() {
        return Err(Error::Empty("ground-truth surface points"));
    }
    if !(tau > 0.0) {
        return Err(Error::param("tau", "must be positive"));
    }
    let tree = KdTree::new(gt_surface)?;
    Ok(label_with_tree(points, &tree, tau))
}

/// [`label_points`] against a prebuilt index.
pub fn label_with_tree(points: &[Vec3], tree: &KdTree, tau: f64) -> SurfaceLabeling {
    let distances: Vec<f64> = points.iter().map(|p| tree.nearest_distance(p)).collect();
    SurfaceLabeling {
        labels: distances.iter().map(|&d| d < tau).collect(),
        distances,
        tau,
    }
}

/// Points per square meter needed for nearest-sample error to stay within
/// `tau / 2`.
pub fn gt_sampling_density(tau: f64) -> f64 {
    4.0 / (tau * tau)
}

/// Area-weighted uniform samples on a triangle mesh.
pub fn sample_surface(triangles: &[Triangle], count: usize, seed: u64) -> Result<Vec<Vec3>> {
    let areas: Vec<f64> = triangles.iter().map(Triangle::area).collect();
    let dist = WeightedIndex::new(&areas).map_err(|_| Error::Empty("mesh with positive area"))?;
    let mut rng = rng_from_seed(seed);
    Ok((0..count)
        .map(|_| {
            let t = &triangles[dist.sample(&mut rng)];
            let (mut r1, mut r2): (f64, f64) = (rng.random(), rng.random());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            t.a + (t.b - t.a) * r1 + (t.c - t.a) * r2
        })
        .collect())
}

/// Samples the mesh at `density` points per square meter (at least one).
pub fn sample_surface_density(triangles: &[Triangle], density: f64, seed: u64) -> Result<Vec<Vec3>> {
    let area: f64 = triangles.iter().map(Triangle::area).sum();
    let count = ((area * density).ceil() as usize).max(1);
    sample_surface(triangles, count, seed)
}

fn clip(p: f64) -> f64 {
    p.clamp(SCORE_EPS, 1.0 - SCORE_EPS)
}

/// Mean of `-(1 - p_t)^γ · ln p_t` with `p_t = p` for positives and `1 - p`
/// for negatives.
pub fn binary_focal_loss(probs: &[f64], labels: &[bool], gamma: f64) -> Result<f64> {
    Error::check_len("focal loss inputs", probs.len(), labels.len())?;
    if probs.is_empty() {
        return Err(Error::Empty("focal loss inputs"));
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &positive)| {
            let p = clip(p);
            let pt = if positive { p } else { 1.0 - p };
            -(1.0 - pt).powf(gamma) * pt.ln()
        })
        .sum();
    Ok(total / probs.len() as f64)
}

/// [`binary_focal_loss`] and its gradient with respect to each score.
/// Scores outside the clip range have zero gradient.
pub fn binary_focal_loss_with_grad(
    probs: &[f64],
    labels: &[bool],
    gamma: f64,
) -> Result<(f64, Vec<f64>)> {
    let loss = binary_focal_loss(probs, labels, gamma)?;
    let n = probs.len() as f64;
    let grad = probs
        .iter()
        .zip(labels)
        .map(|(&p, &positive)| {
            if !(SCORE_EPS..=1.0 - SCORE_EPS).contains(&p) {
                return 0.0;
            }
            let pt = if positive { p } else { 1.0 - p };
            let q = 1.0 - pt;
            let mut d_pt = -q.powf(gamma) / pt;
            if gamma != 0.0 {
                d_pt += gamma * q.powf(gamma - 1.0) * pt.ln();
            }
            let sign = if positive { 1.0 } else { -1.0 };
            sign * d_pt / n
        })
        .collect();
    Ok((loss, grad))
}

/// Focal loss of surface scores against their labeling.
pub fn focal_loss(scores: &SurfaceScore, labeling: &SurfaceLabeling, gamma: f64) -> Result<f64> {
    binary_focal_loss(&scores.0, &labeling.labels, gamma)
}

/// Scores points by multi-view photometric agreement: `exp(-v̄ / k_sigma)`
/// where `v̄` is the mean of the point's per-channel variance. Points with
/// fewer than two valid views get [`DEFAULT_SCORE`].
pub fn photometric_score(
    variances: &[Vec<f64>],
    valid_counts: &[usize],
    k_sigma: f64,
) -> Result<SurfaceScore> {
    Error::check_len("photometric inputs", variances.len(), valid_counts.len())?;
    if !(k_sigma > 0.0) {
        return Err(Error::param("k_sigma", "must be positive"));
    }
    Ok(SurfaceScore(
        variances
            .iter()
            .zip(valid_counts)
            .map(|(var, &n)| {
                if n < 2 || var.is_empty() {
                    DEFAULT_SCORE
                } else {
                    let mean = var.iter().sum::<f64>() / var.len() as f64;
                    (-mean / k_sigma).exp()
                }
            })
            .collect(),
    ))
}

/// Scales the first `weighted_channels` entries of each feature by its
/// point's score; trailing channels (the category one-hot) are untouched.
pub fn soft_weight(
    features: &mut [Vec<f64>],
    scores: &SurfaceScore,
    weighted_channels: usize,
) -> Result<()> {
    Error::check_len("soft weighting inputs", features.len(), scores.0.len())?;
    for (f, &s) in features.iter_mut().zip(&scores.0) {
        let n = weighted_channels.min(f.len());
        f[..n].iter_mut().for_each(|x| *x *= s);
    }
    Ok(())
}

/// Indices of points whose score is at least `threshold`.
pub fn hard_threshold(scores: &SurfaceScore, threshold: f64) -> Vec<usize> {
    scores
        .0
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= threshold)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn label_examples() {
        let gt = [Vec3::zeros(), Vec3::new(10.0, 0.0, 0.0)];
        let l = label_points(
            &[Vec3::new(0.02, 0.0, 0.0), Vec3::zeros(), Vec3::new(0.0, 1.0, 0.0)],
            &gt,
            0.05,
        )
        .unwrap();
        assert_eq!(l.labels, [true, true, false]);
        assert_relative_eq!(l.distances[0], 0.02, epsilon = 1e-15);
        assert_eq!(l.distances[1], 0.0);
        assert!((l.distances[2] - 1.0).abs() < 1e-9);
        assert!(label_points(&[Vec3::zeros()], &[], 0.05).is_err());
        assert!(label_points(&[Vec3::zeros()], &gt, 0.0).is_err());
    }

    #[test]
    fn focal_examples() {
        let l = binary_focal_loss(&[0.9], &[true], 2.0).unwrap();
        assert_relative_eq!(l, 0.01 * -(0.9f64.ln()), epsilon = 1e-15);
        assert_relative_eq!(l, 1.0536e-3, epsilon = 1e-7);
        let l = binary_focal_loss(&[0.5], &[true], 0.0).unwrap();
        assert_relative_eq!(l, 2f64.ln(), epsilon = 1e-15);
        let l = binary_focal_loss(&[1.0, 0.0, 1.0], &[true, false, true], 2.0).unwrap();
        assert!(l < 1e-5);
        assert!(binary_focal_loss(&[0.5], &[true, false], 2.0).is_err());
    }

    #[test]
    fn focal_gamma_zero_is_cross_entropy() {
        let p = [0.1, 0.35, 0.5, 0.77, 0.99];
        let y = [true, false, true, false, true];
        let bce: f64 = p
            .iter()
            .zip(&y)
            .map(|(&p, &y)| if y { -p.ln() } else { -(1.0 - p).ln() })
            .sum::<f64>()
            / p.len() as f64;
        assert!((binary_focal_loss(&p, &y, 0.0).unwrap() - bce).abs() < 1e-12);
    }

    #[test]
    fn focal_monotone_in_score() {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        for w in grid.windows(2) {
            let inl = |p| binary_focal_loss(&[p], &[true], 2.0).unwrap();
            let out = |p| binary_focal_loss(&[p], &[false], 2.0).unwrap();
            assert!(inl(w[1]) < inl(w[0]));
            assert!(out(w[1]) > out(w[0]));
        }
    }

    #[test]
    fn photometric_examples() {
        let s = photometric_score(&[vec![0.0, 0.0, 0.0], vec![0.02, 0.02, 0.02], vec![5.0]], &[3, 3, 1], 0.02)
            .unwrap();
        assert_eq!(s.0[0], 1.0);
        assert_relative_eq!(s.0[1], (-1f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(s.0[1], 0.3679, epsilon = 1e-4);
        assert_eq!(s.0[2], DEFAULT_SCORE);
        assert!(photometric_score(&[], &[], 0.0).is_err());
    }

    #[test]
    fn soft_weight_examples() {
        let mut f = vec![vec![2.0, 4.0, 1.0], vec![3.0, 3.0, 1.0], vec![7.0, 8.0, 0.0]];
        soft_weight(&mut f, &SurfaceScore(vec![0.5, 0.0, 1.0]), 2).unwrap();
        assert_eq!(f, [vec![1.0, 2.0, 1.0], vec![0.0, 0.0, 1.0], vec![7.0, 8.0, 0.0]]);
        assert!(soft_weight(&mut f, &SurfaceScore(vec![1.0]), 2).is_err());
    }

    #[test]
    fn surface_samples_lie_on_mesh() {
        let tri = Triangle::new(Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
        let far = Triangle::new(Vec3::new(0.0, 0.0, 5.0), Vec3::new(0.1, 0.0, 5.0), Vec3::new(0.0, 0.1, 5.0));
        let pts = sample_surface(&[tri, far], 5000, 9).unwrap();
        assert!(pts.iter().all(|p| tri.distance_to(p) < 1e-12 || far.distance_to(p) < 1e-12));
        // area-weighted: the small triangle gets ~0.5% of samples
        let small = pts.iter().filter(|p| p.z > 1.0).count();
        assert!(small < 60, "{small}");
        let dense = sample_surface_density(&[tri], gt_sampling_density(0.05), 1).unwrap();
        assert_eq!(dense.len(), 1600);
    }
}
