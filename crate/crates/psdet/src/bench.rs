//! Scattered cloud versus dense grid: counts, bytes and build times.

use std::time::Instant;

use psdet_core::geometry::Aabb;
use psdet_core::scenesim::SceneSpec;
use psdet_core::voxelgrid::{dense_grid_points, sparsity_report, voxelize, DenseGridSpec, SparsityReport};
use psdet_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{PipelineError, Result, StageExt};
use crate::pipeline::{keyframes, perturb_frames, render_all, scatter, RunSettings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBench {
    pub voxel_size: f64,
    pub report: SparsityReport,
    /// Time to materialize every dense cell center.
    pub dense_build_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub bounds: Aabb,
    pub keyframes: usize,
    pub scatter_points: usize,
    /// Render, keyframe selection, depth noise, scattering and capping.
    pub scatter_build_seconds: f64,
    pub grids: Vec<GridBench>,
}

pub fn run_sparsity_bench(config: &PipelineConfig, scene: &SceneSpec) -> Result<BenchReport> {
    config.validate()?;
    scene.validate().map_err(|e| PipelineError::Config(format!("scene: {e}")))?;
    let settings = RunSettings::resolve(config, scene);

    let start = Instant::now();
    let all = render_all(scene, config.min_box_pixels)?;
    let ids = keyframes(config, &all);
    let mut frames: Vec<_> = ids.iter().map(|&i| all[i].clone()).collect();
    drop(all);
    perturb_frames(&mut frames, &ids, scene, &settings);
    let cloud = scatter(config, &frames, &ids, &settings)?;
    let scatter_build_seconds = start.elapsed().as_secs_f64();

    let bounds = scene.bounds();
    let mut grids = Vec::new();
    for voxel in [config.voxel_size_ps, config.voxel_size_gs] {
        let dense = DenseGridSpec::new(bounds, voxel).stage("bench")?;
        let start = Instant::now();
        let cells: Vec<Vec3> = dense_grid_points(&dense).stage("bench")?.collect();
        let dense_build_seconds = start.elapsed().as_secs_f64();
        debug_assert_eq!(cells.len() as u64, dense.cell_count());
        drop(cells);
        let occupied = voxelize(&cloud, voxel, bounds.min, config.pooling).stage("bench")?.occupied();
        grids.push(GridBench {
            voxel_size: voxel,
            report: sparsity_report(cloud.len(), occupied, voxel, &dense, 0),
            dense_build_seconds,
        });
    }
    Ok(BenchReport {
        bounds,
        keyframes: ids.len(),
        scatter_points: cloud.len(),
        scatter_build_seconds,
        grids,
    })
}
