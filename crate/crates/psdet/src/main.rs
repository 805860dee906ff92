// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use psdet::bench::run_sparsity_bench;
use psdet::boxes::read_boxes;
use psdet::config::{DetectorMode, PipelineConfig};
use psdet::error::StageExt;
use psdet::jsonio::{read_json, to_json_string};
use psdet::pipeline::{evaluate, run_pipeline, write_artifacts};
use psdet::ply::{read_cloud, write_points};
use psdet::scenefile::SceneFile;
use psdet::{PipelineError, Result};
use psdet_core::evalmetrics::EvalConfig;
use psdet_core::rng::stage_seed;
use psdet_core::surfacefilter::{gt_sampling_density, sample_surface_density, DEFAULT_TAU};
use psdet_core::voxelgrid::{voxelize, Pooling};

#[derive(Parser)]
#[command(name = "psdet", version, about = "Point-scattering 3D detection pipeline on synthetic scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a preset scene file.
    GenScene {
        #[arg(long, value_enum, default_value = "demo")]
        preset: Preset,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the full pipeline and write clouds, reports and metrics.
    Run {
        #[command(flatten)]
        input: RunInput,
        /// Output directory (overrides `output_dir`).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write keyframe depth (PGM) and color (PPM) images.
        #[arg(long)]
        images: bool,
    },
    /// Compare scattered points with dense grids; prints a JSON report.
    Bench {
        #[command(flatten)]
        input: RunInput,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Score a detection file against a ground-truth file.
    Eval {
        detections: PathBuf,
        gt: PathBuf,
        /// Evaluation settings as JSON (defaults when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write point sets as PLY.
    ExportPly {
        #[command(subcommand)]
        what: ExportKind,
    },
}

#[derive(Subcommand)]
enum ExportKind {
    /// Area-weighted samples of a scene's object surfaces.
    GtSurface {
        #[command(flatten)]
        scene: SceneArg,
        /// Sampling density in points per square meter.
        #[arg(long, default_value_t = gt_sampling_density(DEFAULT_TAU))]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Centers of the voxels occupied by a scattered cloud.
    Occupancy {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.04)]
        voxel_size: f64,
        #[arg(long, short)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Demo,
    Room,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Self::Demo => "demo",
            Self::Room => "room",
        }
    }
}

#[derive(Args)]
struct SceneArg {
    /// Scene JSON file.
    #[arg(long, conflicts_with = "preset")]
    scene: Option<PathBuf>,
    /// Built-in scene.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Args)]
struct RunInput {
    /// Pipeline config JSON.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[command(flatten)]
    scene: SceneArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    outlier_rate: Option<f64>,
    #[arg(long, value_enum)]
    detector: Option<DetectorArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    GtPassthrough,
    ScoreCluster,
}

impl SceneArg {
    fn load(&self, fallback: Option<&Path>) -> Result<SceneFile> {
        match (&self.scene, self.preset, fallback) {
            (Some(p), _, _) => SceneFile::load(p),
            (None, Some(preset), _) => SceneFile::preset(preset.name()),
            (None, None, Some(p)) => SceneFile::load(p),
            (None, None, None) => Err(PipelineError::Config(
                "no scene given (use --scene, --preset or the config's `scene`)".into(),
            )),
        }
    }
}

impl RunInput {
    fn resolve(&self) -> Result<(PipelineConfig, SceneFile)> {
        let mut config: PipelineConfig = match &self.config {
            Some(p) => read_json(p)?,
            None => PipelineConfig::default(),
        };
        // relative scene paths in a config file are relative to that file
        let scene_path = config.scene.as_ref().map(|s| match self.config.as_ref().and_then(|c| c.parent()) {
            Some(dir) if s.is_relative() => dir.join(s),
            _ => s.clone(),
        });
        let scene = self.scene.load(scene_path.as_deref())?;
        config.seed = self.seed.or(config.seed);
        config.frames = self.frames.unwrap_or(config.frames);
        config.max_points = self.max_points.unwrap_or(config.max_points);
        config.noise_sigma = self.noise_sigma.or(config.noise_sigma);
        config.outlier_rate = self.outlier_rate.or(config.outlier_rate);
        if let Some(d) = self.detector {
            config.detector.mode = match d {
                DetectorArg::GtPassthrough => DetectorMode::GtPassthrough,
                DetectorArg::ScoreCluster => DetectorMode::ScoreCluster,
            };
        }
        config.validate()?;
        Ok((config, scene))
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(PipelineError::io(p)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(PipelineError::io("<stdout>")),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenScene { preset, output } => {
            emit(&to_json_string(&SceneFile::preset(preset.name())?), output.as_deref())
        }
        Command::Run { input, output, images } => {
            let (config, scene_file) = input.resolve()?;
            let scene = scene_file.to_spec()?;
            let dir = output
                .or_else(|| config.output_dir.clone())
                .ok_or_else(|| PipelineError::Config("no output directory (use --output or `output_dir`)".into()))?;
            let out = run_pipeline(&config, &scene)?;
            write_artifacts(&out, &dir, images)?;
            let summary: String = out.metrics.eval.mean.iter().map(|(k, v)| format!("{k}: {v:.4}\n")).collect();
            // a closed stdout is not a pipeline failure
            let _ = std::io::stdout().write_all(summary.as_bytes());
            info!("wrote artifacts to {}", dir.display());
            Ok(())
        }
        Command::Bench { input, output } => {
            let (config, scene_file) = input.resolve()?;
            let report = run_sparsity_bench(&config, &scene_file.to_spec()?)?;
            emit(&to_json_string(&report), output.as_deref())
        }
        Command::Eval { detections, gt, config, output } => {
            let eval_config: EvalConfig = match config {
                Some(p) => read_json(&p)?,
                None => EvalConfig::default(),
            };
            eval_config
                .validate()
                .map_err(|e| PipelineError::Config(format!("eval: {e}")))?;
            let report = evaluate(&read_boxes(&detections)?, &read_boxes(&gt)?, &eval_config)?;
            emit(&to_json_string(&report), output.as_deref())
        }
        Command::ExportPly { what } => match what {
            ExportKind::GtSurface { scene, density, seed, output } => {
                let spec = scene.load(None)?.to_spec()?;
                if !(density > 0.0) {
                    return Err(PipelineError::Config("density must be positive".into()));
                }
                let pts = sample_surface_density(&spec.gt_mesh(), density, stage_seed(seed, "gt-surface"))
                    .stage("export")?;
                write_points(&output, &pts, "psdet ground-truth surface samples")
            }
            ExportKind::Occupancy { input, voxel_size, output } => {
                if !(voxel_size > 0.0) {
                    return Err(PipelineError::Config("voxel size must be positive".into()));
                }
                let cloud = read_cloud(&input)?;
                let grid = voxelize(&cloud, voxel_size, psdet_core::Vec3::zeros(), Pooling::Mean).stage("export")?;
                let centers: Vec<_> = grid.cells().iter().map(|(i, _)| grid.cell_center(*i)).collect();
                write_points(&output, &centers, "psdet occupied voxel centers")
            }
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
