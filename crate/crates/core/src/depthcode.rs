//! Ordinal depth regression arithmetic: linear bins, label encoding,
//! decoding by counting surpassed thresholds, and the ordinal and combined
//! depth losses together with their analytic gradients.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;

use crate::{Error, Result};

/// Probabilities are clipped to `[PROB_EPS, 1 - PROB_EPS]` before taking logs.
pub const PROB_EPS: f64 = 1e-7;

/// Linear discretization of `[d_min, d_max]` into `count` bins.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DepthBins {
    d_min: f64,
    d_max: f64,
    count: usize,
}

impl DepthBins {
    pub fn new(d_min: f64, d_max: f64, count: usize) -> Result<Self> {
        if !(d_min.is_finite() && d_max.is_finite()) {
            return Err(Error::NonFinite("depth range"));
        }
        if d_min >= d_max {
            return Err(Error::param("depth range", "d_min must be below d_max"));
        }
        if count == 0 {
            return Err(Error::param("bin count", "must be at least 1"));
        }
        Ok(Self {
            d_min,
            d_max,
            count,
        })
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn width(&self) -> f64 {
        (self.d_max - self.d_min) / self.count as f64
    }

    /// Boundary `i` in `0..=count`; the last boundary is exactly `d_max`.
    pub fn edge(&self, i: usize) -> f64 {
        if i >= self.count {
            self.d_max
        } else {
            self.d_min + i as f64 * (self.d_max - self.d_min) / self.count as f64
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.count).map(|i| self.edge(i)).collect()
    }

    pub fn midpoint(&self, label: usize) -> f64 {
        let l = label.min(self.count - 1);
        (self.edge(l) + self.edge(l + 1)) / 2.0
    }

    /// Index of the bin containing `depth`, clamped to `[0, count - 1]`.
    pub fn encode_label(&self, depth: f64) -> Result<usize> {
        if !depth.is_finite() {
            return Err(Error::NonFinite("depth"));
        }
        if depth <= self.d_min {
            return Ok(0);
        }
        let last = self.count - 1;
        let guess = ((depth - self.d_min) / self.width()).floor();
        let mut l = if guess >= last as f64 { last } else { guess as usize };
        // settle rounding at the boundaries against the edges themselves
        while l < last && depth >= self.edge(l + 1) {
            l += 1;
        }
        while l > 0 && depth < self.edge(l) {
            l -= 1;
        }
        Ok(l)
    }

    /// Decodes ordinal probabilities: the label counts thresholds with
    /// `p > 0.5` (clamped to `count - 1`), the depth is that bin's midpoint.
    pub fn decode_depth(&self, probs: &OrdinalProbs) -> f64 {
        self.midpoint(probs.label())
    }

    /// The probability pattern an exact prediction of `label` would produce.
    pub fn consistent_probs(&self, label: usize) -> OrdinalProbs {
        OrdinalProbs(
            (0..self.count)
                .map(|j| if j < label { 1.0 } else { 0.0 })
                .collect(),
        )
    }
}

/// Per-pixel ordinal outputs; `p[j]` is the probability the label exceeds `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalProbs(Vec<f64>);

impl OrdinalProbs {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Empty("ordinal probabilities"));
        }
        if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::param("ordinal probability", "outside [0, 1]"));
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of surpassed thresholds, clamped to `len - 1`.
    pub fn label(&self) -> usize {
        let surpassed = self.0.iter().filter(|&&p| p > 0.5).count();
        surpassed.min(self.0.len() - 1)
    }
}

/// Additive per-pixel correction to the coarse decoded depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthResidual(pub f64);

pub fn apply_residual(coarse: f64, residual: DepthResidual) -> f64 {
    coarse + residual.0
}

fn clip(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

fn check_pairs(probs: &[OrdinalProbs], labels: &[usize]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Empty("pixel set"));
    }
    Error::check_len("ordinal loss inputs", probs.len(), labels.len())?;
    for (p, &l) in probs.iter().zip(labels) {
        if l >= p.len() {
            return Err(Error::param("ordinal label", "must be below the bin count"));
        }
    }
    Ok(())
}

/// Mean over pixels of the negative ordinal log-likelihood:
/// thresholds below the label should fire, the rest should not.
pub fn ordinal_loss(probs: &[OrdinalProbs], labels: &[usize]) -> Result<f64> {
    check_pairs(probs, labels)?;
    let k = probs.len() as f64;
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(p, &l)| {
            p.as_slice()
                .iter()
                .enumerate()
                .map(|(j, &pj)| {
                    let pj = clip(pj);
                    if j < l {
                        pj.ln()
                    } else {
                        (1.0 - pj).ln()
                    }
                })
                .sum::<f64>()
        })
        .sum();
    Ok(-total / k)
}

/// [`ordinal_loss`] plus its gradient with respect to every probability.
/// Entries clipped away from `[ε, 1-ε]` have zero gradient.
pub fn ordinal_loss_with_grad(
    probs: &[OrdinalProbs],
    labels: &[usize],
) -> Result<(f64, Vec<Vec<f64>>)> {
    let loss = ordinal_loss(probs, labels)?;
    let k = probs.len() as f64;
    let grad = probs
        .iter()
        .zip(labels)
        .map(|(p, &l)| {
            p.as_slice()
                .iter()
                .enumerate()
                .map(|(j, &pj)| {
                    if !(PROB_EPS..=1.0 - PROB_EPS).contains(&pj) {
                        0.0
                    } else if j < l {
                        -1.0 / (k * pj)
                    } else {
                        1.0 / (k * (1.0 - pj))
                    }
                })
                .collect()
        })
        .collect();
    Ok((loss, grad))
}

/// Ordinal loss plus the mean absolute error of the residual-corrected depth.
pub fn depth_loss(
    probs: &[OrdinalProbs],
    labels: &[usize],
    coarse_depths: &[f64],
    residuals: &[DepthResidual],
    gt_depths: &[f64],
) -> Result<f64> {
    let ordinal = ordinal_loss(probs, labels)?;
    Error::check_len("coarse depths", probs.len(), coarse_depths.len())?;
    Error::check_len("residuals", probs.len(), residuals.len())?;
    Error::check_len("ground-truth depths", probs.len(), gt_depths.len())?;
    let l1: f64 = coarse_depths
        .iter()
        .zip(residuals)
        .zip(gt_depths)
        .map(|((&c, &r), &gt)| (apply_residual(c, r) - gt).abs())
        .sum();
    Ok(ordinal + l1 / probs.len() as f64)
}

/// Labels for a batch of ground-truth depths.
pub fn encode_labels(bins: &DepthBins, depths: &[f64]) -> Result<Vec<usize>> {
    depths.iter().map(|&d| bins.encode_label(d)).collect()
}
