//! End-to-end run: render, select keyframes, perturb depth, scatter,
//! aggregate, filter, voxelize, detect, evaluate.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use log::info;
use psdet_core::evalmetrics::{evaluate_detections, evaluate_reconstruction, EvalConfig};
use psdet_core::mvaggregate::{aggregate, build_projection_set, AggregatedFeature, ProjectionOptions};
use psdet_core::obb::{nms_indices, OrientedBox};
use psdet_core::rng::{indexed_seed, stage_seed};
use psdet_core::scatter::{cap_points, ScatterCloud, ScatterConfig, Scatterer};
use psdet_core::scenesim::{perturb_depth, render_frame, select_keyframes, CameraFrame, KeyframeCriteria, SceneSpec};
use psdet_core::spatial::KdTree;
use psdet_core::surfacefilter::{
    focal_loss, gt_sampling_density, hard_threshold, label_with_tree, photometric_score, sample_surface_density,
    soft_weight, SurfaceLabeling, SurfaceScore,
};
use psdet_core::voxelgrid::{sparsity_report, voxelize, DenseGridSpec, SparsityReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::write_boxes;
use crate::config::PipelineConfig;
use crate::detector::detect;
use crate::error::{PipelineError, Result, StageExt};
use crate::jsonio::{to_json_string, write_json};
use crate::ply::write_cloud;
use crate::pnm::{write_color_ppm, write_depth_pgm};

/// Seeds and noise levels after applying config overrides to the scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub root_seed: u64,
    pub noise_sigma: f64,
    pub outlier_rate: f64,
}

impl RunSettings {
    pub fn resolve(config: &PipelineConfig, scene: &SceneSpec) -> Self {
        Self {
            root_seed: config.seed.unwrap_or(scene.rng_seed),
            noise_sigma: config.noise_sigma.unwrap_or(scene.depth_noise_sigma),
            outlier_rate: config.outlier_rate.unwrap_or(scene.outlier_rate),
        }
    }
}

pub fn render_all(scene: &SceneSpec, min_box_pixels: f64) -> Result<Vec<CameraFrame>> {
    (0..scene.cameras.len())
        .into_par_iter()
        .map(|i| render_frame(scene, i, min_box_pixels))
        .collect::<psdet_core::Result<Vec<_>>>()
        .stage("render")
}

pub fn keyframes(config: &PipelineConfig, frames: &[CameraFrame]) -> Vec<usize> {
    let poses: Vec<_> = frames.iter().map(|f| f.pose).collect();
    let detections: Vec<usize> = frames.iter().map(|f| f.boxes2d.len()).collect();
    let criteria = KeyframeCriteria {
        target_count: config.frames,
        min_translation: config.keyframe_min_translation,
        min_rotation_deg: config.keyframe_min_rotation_deg,
    };
    select_keyframes(&poses, &detections, &criteria)
}

/// Replaces each frame's depth by its noisy version. `camera_ids[i]` is the
/// scene camera of `frames[i]` and fixes its noise seed.
pub fn perturb_frames(frames: &mut [CameraFrame], camera_ids: &[usize], scene: &SceneSpec, settings: &RunSettings) {
    if settings.noise_sigma == 0.0 && settings.outlier_rate == 0.0 {
        return;
    }
    let stage = stage_seed(settings.root_seed, "depth-noise");
    frames.par_iter_mut().zip(camera_ids).for_each(|(f, &id)| {
        f.depth = perturb_depth(
            &f.depth,
            settings.noise_sigma,
            settings.outlier_rate,
            scene.depth_min,
            scene.depth_max,
            indexed_seed(stage, id as u64),
        );
    });
}

/// Scatters `frames` in order (frame ids are `camera_ids`) and caps the
/// result.
pub fn scatter(
    config: &PipelineConfig,
    frames: &[CameraFrame],
    camera_ids: &[usize],
    settings: &RunSettings,
) -> Result<ScatterCloud> {
    let scatter_config = ScatterConfig {
        radius: config.scatter_radius,
        max_points: config.max_points,
        rng_seed: stage_seed(settings.root_seed, "cap"),
    };
    let mut s = Scatterer::new(scatter_config).stage("scatter")?;
    for (f, &id) in frames.iter().zip(camera_ids) {
        s.scatter_frame(f, id as u32);
    }
    Ok(cap_points(s.into_cloud(), scatter_config.max_points, scatter_config.rng_seed))
}

/// Parallel per-point aggregation; stores `[mean | variance | onehot]` in
/// `cloud.features`.
pub fn aggregate_points(
    cloud: &mut ScatterCloud,
    frames: &[CameraFrame],
    category_count: usize,
    options: &ProjectionOptions,
) -> Result<Vec<AggregatedFeature>> {
    let aggregated = cloud
        .points
        .par_iter()
        .map(|p| aggregate(&build_projection_set(&p.position, frames, options), Some(p.category as usize), category_count))
        .collect::<psdet_core::Result<Vec<_>>>()
        .stage("aggregate")?;
    cloud.features = aggregated.iter().map(AggregatedFeature::to_vector).collect();
    Ok(aggregated)
}

pub fn category_count(scene: &SceneSpec) -> usize {
    scene.objects.iter().map(|o| o.category() as usize + 1).max().unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub labels: SurfaceLabeling,
    pub scores: SurfaceScore,
    pub focal_loss: f64,
    pub kept: Vec<usize>,
    pub gt_surface_points: usize,
}

/// Labels points against the ground-truth surface, scores them by
/// photometric consistency and down-weights features by score. Returns the
/// indices kept by the hard threshold.
pub fn surface_filter(
    config: &PipelineConfig,
    scene: &SceneSpec,
    cloud: &mut ScatterCloud,
    aggregated: &[AggregatedFeature],
    settings: &RunSettings,
) -> Result<FilterOutcome> {
    let surface = sample_surface_density(
        &scene.gt_mesh(),
        gt_sampling_density(config.tau),
        stage_seed(settings.root_seed, "gt-surface"),
    )
    .stage("surface-filter")?;
    let tree = KdTree::new(&surface).stage("surface-filter")?;
    let labels = label_with_tree(&cloud.positions(), &tree, config.tau);

    let variances: Vec<Vec<f64>> = aggregated.iter().map(|a| a.variance.clone()).collect();
    let counts: Vec<usize> = aggregated.iter().map(|a| a.valid_count).collect();
    let scores = photometric_score(&variances, &counts, config.k_sigma).stage("surface-filter")?;
    let focal = if cloud.is_empty() {
        0.0
    } else {
        focal_loss(&scores, &labels, config.gamma).stage("surface-filter")?
    };
    let weighted = aggregated.first().map_or(0, AggregatedFeature::weighted_channels);
    soft_weight(&mut cloud.features, &scores, weighted).stage("surface-filter")?;
    cloud.scores.clone_from(&scores.0);
    Ok(FilterOutcome {
        kept: hard_threshold(&scores, config.score_threshold),
        labels,
        scores,
        focal_loss: focal,
        gt_surface_points: surface.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsitySummary {
    /// Dense grid at the scattering resolution.
    pub fine: SparsityReport,
    /// Dense grid at the coarse grid-sampling resolution.
    pub coarse: SparsityReport,
}

pub fn sparsity(config: &PipelineConfig, scene: &SceneSpec, cloud: &ScatterCloud) -> Result<SparsitySummary> {
    let bounds = scene.bounds();
    let channels = cloud.features.first().map_or(0, Vec::len);
    let report = |voxel: f64| -> Result<SparsityReport> {
        let occupied = voxelize(cloud, voxel, bounds.min, config.pooling).stage("voxelize")?.occupied();
        let dense = DenseGridSpec::new(bounds, voxel).stage("voxelize")?;
        Ok(sparsity_report(cloud.len(), occupied, voxel, &dense, channels))
    };
    Ok(SparsitySummary {
        fine: report(config.voxel_size_ps)?,
        coarse: report(config.voxel_size_gs)?,
    })
}

/// Detection and reconstruction scores in report form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Category id -> `AP@t` / `R@t` values.
    pub per_category: BTreeMap<String, BTreeMap<String, f64>>,
    pub mean: BTreeMap<String, f64>,
    pub chamfer: Option<f64>,
    pub fscore: Option<f64>,
    pub reconstruction_pairs: usize,
}

pub fn evaluate(dets: &[OrientedBox], gts: &[OrientedBox], config: &EvalConfig) -> Result<EvalReport> {
    let det = evaluate_detections(dets, gts, config).stage("evaluate")?;
    let rec = evaluate_reconstruction(dets, gts, config).stage("evaluate")?;
    let named = |scores: &[psdet_core::evalmetrics::ThresholdScores]| {
        let mut m = BTreeMap::new();
        for (t, s) in config.iou_thresholds.iter().zip(scores) {
            m.insert(format!("AP@{t}"), s.ap);
            m.insert(format!("R@{t}"), s.recall);
        }
        m
    };
    Ok(EvalReport {
        per_category: det.per_category.iter().map(|(c, s)| (c.to_string(), named(s))).collect(),
        mean: named(&det.mean),
        chamfer: rec.chamfer,
        fscore: rec.fscore,
        reconstruction_pairs: rec.pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub root_seed: u64,
    pub noise_sigma: f64,
    pub outlier_rate: f64,
    pub keyframes: Vec<usize>,
    pub raw_points: usize,
    pub filtered_points: usize,
    pub gt_surface_points: usize,
    pub raw_outlier_fraction: f64,
    pub filtered_outlier_fraction: f64,
    pub focal_loss: f64,
    pub detections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(flatten)]
    pub eval: EvalReport,
    pub pipeline: PipelineStats,
    /// Resolved configuration, without the output location.
    pub config: PipelineConfig,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Keyframes with perturbed depth, in selection order.
    pub frames: Vec<CameraFrame>,
    pub keyframes: Vec<usize>,
    /// Capped cloud with aggregated, soft-weighted features and scores.
    pub raw: ScatterCloud,
    pub filter: FilterOutcome,
    pub filtered: ScatterCloud,
    pub sparsity: SparsitySummary,
    pub detections: Vec<OrientedBox>,
    pub gt: Vec<OrientedBox>,
    pub metrics: MetricsReport,
    /// Wall-clock seconds per stage.
    pub timings: Vec<(&'static str, f64)>,
}

struct Timer {
    start: Instant,
    timings: Vec<(&'static str, f64)>,
}

impl Timer {
    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        let secs = (now - self.start).as_secs_f64();
        info!("{stage}: {secs:.3} s");
        self.timings.push((stage, secs));
        self.start = now;
    }
}

pub fn run_pipeline(config: &PipelineConfig, scene: &SceneSpec) -> Result<PipelineOutput> {
    config.validate()?;
    scene.validate().map_err(|e| PipelineError::Config(format!("scene: {e}")))?;
    let settings = RunSettings::resolve(config, scene);
    let mut timer = Timer { start: Instant::now(), timings: Vec::new() };

    let all = render_all(scene, config.min_box_pixels)?;
    timer.lap("render");
    let keyframes = keyframes(config, &all);
    let mut frames: Vec<CameraFrame> = keyframes.iter().map(|&i| all[i].clone()).collect();
    drop(all);
    perturb_frames(&mut frames, &keyframes, scene, &settings);
    timer.lap("keyframes+depth");

    let mut raw = scatter(config, &frames, &keyframes, &settings)?;
    info!("scattered {} points from {} keyframes", raw.len(), frames.len());
    timer.lap("scatter");

    let options = ProjectionOptions { occlusion_tolerance: config.occlusion_tolerance };
    let aggregated = aggregate_points(&mut raw, &frames, category_count(scene), &options)?;
    timer.lap("aggregate");

    let filter = surface_filter(config, scene, &mut raw, &aggregated, &settings)?;
    let filtered = raw.select(&filter.kept);
    let filtered_labels = SurfaceLabeling {
        labels: filter.kept.iter().map(|&i| filter.labels.labels[i]).collect(),
        distances: filter.kept.iter().map(|&i| filter.labels.distances[i]).collect(),
        tau: filter.labels.tau,
    };
    timer.lap("surface-filter");

    let sparsity = sparsity(config, scene, &raw)?;
    timer.lap("voxelize");

    let gt = scene.gt_boxes();
    let proposals = detect(&config.detector, &filtered, &gt).stage("detect")?;
    let detections: Vec<OrientedBox> =
        nms_indices(&proposals, config.nms_iou, true).into_iter().map(|i| proposals[i]).collect();
    timer.lap("detect");

    let eval = evaluate(&detections, &gt, &config.eval)?;
    timer.lap("evaluate");

    let mut echo = config.clone();
    echo.output_dir = None;
    echo.seed = Some(settings.root_seed);
    echo.noise_sigma = Some(settings.noise_sigma);
    echo.outlier_rate = Some(settings.outlier_rate);
    let metrics = MetricsReport {
        eval,
        pipeline: PipelineStats {
            root_seed: settings.root_seed,
            noise_sigma: settings.noise_sigma,
            outlier_rate: settings.outlier_rate,
            keyframes: keyframes.clone(),
            raw_points: raw.len(),
            filtered_points: filtered.len(),
            gt_surface_points: filter.gt_surface_points,
            raw_outlier_fraction: filter.labels.outlier_fraction(),
            filtered_outlier_fraction: filtered_labels.outlier_fraction(),
            focal_loss: filter.focal_loss,
            detections: detections.len(),
        },
        config: echo,
    };

    Ok(PipelineOutput {
        frames,
        keyframes,
        raw,
        filter,
        filtered,
        sparsity,
        detections,
        gt,
        metrics,
        timings: timer.timings,
    })
}

pub const ARTIFACTS: [&str; 6] = [
    "cloud_raw.ply",
    "cloud_filtered.ply",
    "sparsity.json",
    "detections.json",
    "gt.json",
    "metrics.json",
];

/// Writes the standard artifacts, plus per-keyframe depth PGM and color PPM
/// when `images` is set.
pub fn write_artifacts(output: &PipelineOutput, dir: &Path, images: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(PipelineError::io(dir))?;
    write_cloud(&dir.join(ARTIFACTS[0]), &output.raw)?;
    write_cloud(&dir.join(ARTIFACTS[1]), &output.filtered)?;
    write_json(&dir.join(ARTIFACTS[2]), &output.sparsity)?;
    write_boxes(&dir.join(ARTIFACTS[3]), &output.detections)?;
    write_boxes(&dir.join(ARTIFACTS[4]), &output.gt)?;
    let path = dir.join(ARTIFACTS[5]);
    fs::write(&path, output.metrics.to_json()).map_err(PipelineError::io(&path))?;
    if images {
        let img_dir = dir.join("frames");
        fs::create_dir_all(&img_dir).map_err(PipelineError::io(&img_dir))?;
        for (f, id) in output.frames.iter().zip(&output.keyframes) {
            write_depth_pgm(&img_dir.join(format!("depth_{id:03}.pgm")), &f.depth)?;
            write_color_ppm(&img_dir.join(format!("color_{id:03}.ppm")), &f.color)?;
        }
    }
    Ok(())
}
