//! Pipeline configuration. Every field has a default, so `{}` is a valid
//! config file.

use std::path::PathBuf;

use psdet_core::evalmetrics::EvalConfig;
use psdet_core::scatter::{DEFAULT_MAX_POINTS, DEFAULT_RADIUS};
use psdet_core::surfacefilter::{DEFAULT_GAMMA, DEFAULT_TAU};
use psdet_core::voxelgrid::{Pooling, GS_VOXEL_SIZE, PS_VOXEL_SIZE};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    /// Emits the ground-truth boxes with score 1.
    #[default]
    GtPassthrough,
    /// Connected components of the filtered cloud, one axis-aligned box each.
    ScoreCluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub mode: DetectorMode,
    /// Linking distance between points of one cluster, meters.
    pub cluster_eps: f64,
    /// Smaller clusters are discarded.
    pub min_cluster_points: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            mode: DetectorMode::GtPassthrough,
            cluster_eps: 0.1,
            min_cluster_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Scene file; the CLI also accepts `--scene` or `--preset`.
    pub scene: Option<PathBuf>,
    /// Root seed; the scene's `rng_seed` when absent.
    pub seed: Option<u64>,
    /// Keyframe target count.
    pub frames: usize,
    pub keyframe_min_translation: f64,
    pub keyframe_min_rotation_deg: f64,
    /// 2D boxes covering fewer pixels are not reported.
    pub min_box_pixels: f64,
    /// Override the scene's depth noise.
    pub noise_sigma: Option<f64>,
    /// Override the scene's outlier rate.
    pub outlier_rate: Option<f64>,
    pub scatter_radius: f64,
    pub max_points: usize,
    /// Multi-view occlusion test tolerance in meters; off when absent.
    pub occlusion_tolerance: Option<f64>,
    pub tau: f64,
    pub gamma: f64,
    /// Variance scale of the photometric score.
    pub k_sigma: f64,
    /// Points scoring below this are removed from the filtered cloud.
    pub score_threshold: f64,
    pub voxel_size_ps: f64,
    pub voxel_size_gs: f64,
    pub pooling: Pooling,
    pub nms_iou: f64,
    pub detector: DetectorConfig,
    pub eval: EvalConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scene: None,
            seed: None,
            frames: 50,
            keyframe_min_translation: 0.1,
            keyframe_min_rotation_deg: 10.0,
            min_box_pixels: 16.0,
            noise_sigma: None,
            outlier_rate: None,
            scatter_radius: DEFAULT_RADIUS,
            max_points: DEFAULT_MAX_POINTS,
            occlusion_tolerance: None,
            tau: DEFAULT_TAU,
            gamma: DEFAULT_GAMMA,
            k_sigma: 0.02,
            score_threshold: 0.5,
            voxel_size_ps: PS_VOXEL_SIZE,
            voxel_size_gs: GS_VOXEL_SIZE,
            pooling: Pooling::Mean,
            nms_iou: 0.01,
            detector: DetectorConfig::default(),
            eval: EvalConfig::default(),
            output_dir: None,
        }
    }
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(PipelineError::Config(what.to_owned()))
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        check(self.frames >= 1, "frames must be at least 1")?;
        check(self.keyframe_min_translation >= 0.0, "keyframe_min_translation must be non-negative")?;
        check(self.keyframe_min_rotation_deg >= 0.0, "keyframe_min_rotation_deg must be non-negative")?;
        check(self.min_box_pixels >= 0.0, "min_box_pixels must be non-negative")?;
        check(self.noise_sigma.is_none_or(|s| s >= 0.0 && s.is_finite()), "noise_sigma must be non-negative")?;
        check(self.outlier_rate.is_none_or(|r| (0.0..=1.0).contains(&r)), "outlier_rate must lie in [0, 1]")?;
        check(positive(self.scatter_radius), "scatter_radius must be positive")?;
        check(self.max_points >= 1, "max_points must be at least 1")?;
        check(self.occlusion_tolerance.is_none_or(positive), "occlusion_tolerance must be positive")?;
        check(positive(self.tau), "tau must be positive")?;
        check(self.gamma >= 0.0 && self.gamma.is_finite(), "gamma must be non-negative")?;
        check(positive(self.k_sigma), "k_sigma must be positive")?;
        check((0.0..=1.0).contains(&self.score_threshold), "score_threshold must lie in [0, 1]")?;
        check(positive(self.voxel_size_ps), "voxel_size_ps must be positive")?;
        check(positive(self.voxel_size_gs), "voxel_size_gs must be positive")?;
        check((0.0..=1.0).contains(&self.nms_iou), "nms_iou must lie in [0, 1]")?;
        check(positive(self.detector.cluster_eps), "detector.cluster_eps must be positive")?;
        self.eval.validate().map_err(|e| PipelineError::Config(format!("eval: {e}")))
    }
}
