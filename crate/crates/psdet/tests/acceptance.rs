//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use psdet::bench::run_sparsity_bench;
use psdet::config::PipelineConfig;
use psdet::pipeline::{
    aggregate_points, category_count, keyframes, perturb_frames, render_all, scatter, surface_filter,
    RunSettings,
};
use psdet_core::camera::{backproject, project, Intrinsics, Pose};
use psdet_core::depthcode::{ordinal_loss, ordinal_loss_with_grad, DepthBins, OrdinalProbs};
use psdet_core::evalmetrics::{average_precision_11pt, chamfer, fscore, match_detections, recall_at, ThresholdMode};
use psdet_core::geometry::distance_to_mesh;
use psdet_core::mvaggregate::{aggregate_mean, aggregate_variance, ProjectionOptions, ProjectionSet};
use psdet_core::obb::{iou_3d, OrientedBox};
use psdet_core::rng::{rng_from_seed, stage_seed, StageRng};
use psdet_core::scenesim::{demo_scene, room_scene};
use psdet_core::surfacefilter::{
    binary_focal_loss, binary_focal_loss_with_grad, gt_sampling_density, sample_surface_density,
};
use psdet_core::Vec3;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

type Check = std::result::Result<String, String>;

type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_unit_pose(rng: &mut impl Rng) -> Pose {
    loop {
        let eye = Vec3::from_fn(|_, _| rng.random_range(-10.0..10.0));
        let target = Vec3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        if let Ok(p) = Pose::look_at(eye, target, Vec3::z()) {
            return p;
        }
    }
}

fn geometry_round_trip() -> Check {
    let mut rng = rng_from_seed(1);
    let k = Intrinsics::new(525.0, 520.0, 319.5, 239.5, 640, 480).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let pose = random_unit_pose(&mut rng);
        let (u, v) = (rng.random_range(0.0..640.0), rng.random_range(0.0..480.0));
        let d = rng.random_range(0.1..20.0);
        let p = backproject(u, v, d, &k, &pose).map_err(|e| e.to_string())?;
        let q = project(&p, &k, &pose).ok_or("point projected behind camera")?;
        worst = worst.max((q.u - u).abs()).max((q.v - v).abs()).max((q.depth - d).abs());
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e} > 1e-9"))?;
    Ok(format!("10000 triples, max deviation {worst:.2e}"))
}

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12)
}

fn ordinal_depth() -> Check {
    let mut rng = rng_from_seed(2);
    for count in 1..=80 {
        let (lo, hi) = (rng.random_range(0.1..1.0), rng.random_range(2.0..10.0));
        let bins = DepthBins::new(lo, hi, count).map_err(|e| e.to_string())?;
        for l in 0..count {
            let a = lo + l as f64 * (hi - lo) / count as f64;
            let b = if l + 1 == count { hi } else { lo + (l + 1) as f64 * (hi - lo) / count as f64 };
            let got = bins.decode_depth(&bins.consistent_probs(l));
            ensure(got == (a + b) / 2.0, || format!("bins {count}, label {l}: decoded {got}"))?;
        }
    }

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let count = rng.random_range(2..10);
        let pixels = rng.random_range(1..5);
        let probs: Vec<Vec<f64>> =
            (0..pixels).map(|_| (0..count).map(|_| rng.random_range(0.05..0.95)).collect()).collect();
        let labels: Vec<usize> = (0..pixels).map(|_| rng.random_range(0..count)).collect();
        let wrap = |p: &[Vec<f64>]| -> Vec<OrdinalProbs> {
            p.iter().map(|x| OrdinalProbs::new(x.clone()).unwrap()).collect()
        };
        let (_, grad) = ordinal_loss_with_grad(&wrap(&probs), &labels).map_err(|e| e.to_string())?;
        for i in 0..pixels {
            for j in 0..count {
                let (mut up, mut down) = (probs.clone(), probs.clone());
                up[i][j] += h;
                down[i][j] -= h;
                let numeric = (ordinal_loss(&wrap(&up), &labels).unwrap()
                    - ordinal_loss(&wrap(&down), &labels).unwrap())
                    / (2.0 * h);
                worst = worst.max(relative_error(grad[i][j], numeric));
            }
        }

        let n = rng.random_range(1..10);
        let gamma = rng.random_range(0.0..3.0);
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
        let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let (_, grad) = binary_focal_loss_with_grad(&p, &labels, gamma).map_err(|e| e.to_string())?;
        for i in 0..n {
            let (mut up, mut down) = (p.clone(), p.clone());
            up[i] += h;
            down[i] -= h;
            let numeric = (binary_focal_loss(&up, &labels, gamma).unwrap()
                - binary_focal_loss(&down, &labels, gamma).unwrap())
                / (2.0 * h);
            worst = worst.max(relative_error(grad[i], numeric));
        }
    }
    ensure(worst <= 1e-4, || format!("gradient relative error {worst:e} > 1e-4"))?;
    Ok(format!("midpoints exact, 100+100 gradient instances, max rel error {worst:.2e}"))
}

fn monte_carlo_iou(a: &OrientedBox, b: &OrientedBox, samples: usize, seed: u64) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for c in a.corners().iter().chain(b.corners().iter()) {
        lo = lo.inf(c);
        hi = hi.sup(c);
    }
    let mut rng = rng_from_seed(seed);
    let (mut in_a, mut in_b, mut both) = (0u64, 0u64, 0u64);
    for _ in 0..samples {
        let p = Vec3::new(
            rng.random_range(lo.x..hi.x),
            rng.random_range(lo.y..hi.y),
            rng.random_range(lo.z..hi.z),
        );
        let (x, y) = (a.contains(&p, 0.0), b.contains(&p, 0.0));
        in_a += x as u64;
        in_b += y as u64;
        both += (x && y) as u64;
    }
    both as f64 / (in_a + in_b - both) as f64
}

fn iou_oracle() -> Check {
    let mut rng = rng_from_seed(3);
    let random_box = |rng: &mut StageRng, center: Vec3| {
        let size = Vec3::from_fn(|_, _| rng.random_range(0.3..2.0));
        OrientedBox::new(center, size, rng.random_range(-3.2..3.2), 0, 1.0).unwrap()
    };
    let pairs: Vec<(OrientedBox, OrientedBox)> = (0..100)
        .map(|_| {
            let a = random_box(&mut rng, Vec3::zeros());
            let offset = Vec3::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8), rng.random_range(-0.5..0.5));
            (a, random_box(&mut rng, offset))
        })
        .collect();
    let deviations: Vec<f64> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| (iou_3d(a, b) - monte_carlo_iou(a, b, 1_000_000, 100 + i as u64)).abs())
        .collect();
    let worst = deviations.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 0.005, || format!("Monte Carlo deviation {worst} > 0.005"))?;

    let unit = |x: f64| OrientedBox::new(Vec3::new(x, 0.0, 0.0), Vec3::repeat(1.0), 0.0, 0, 1.0).unwrap();
    let cubes = iou_3d(&unit(0.0), &unit(0.5));
    ensure(cubes == 1.0 / 3.0, || format!("offset unit cubes gave {cubes:.17}"))?;
    Ok(format!("100 pairs, max |exact - MC| {worst:.4}, offset cubes exactly 1/3"))
}

/// AP from ranked TP flags by scanning every prefix of the ranking.
fn reference_ap(flags: &[bool], gt: usize) -> f64 {
    let mut sum = 0.0;
    for level in 0..=10usize {
        let mut best: f64 = 0.0;
        let mut tp = 0usize;
        for (k, &f) in flags.iter().enumerate() {
            tp += f as usize;
            // recall tp/gt >= level/10, compared in integers
            if 10 * tp >= level * gt {
                best = best.max(tp as f64 / (k + 1) as f64);
            }
        }
        sum += best;
    }
    sum / 11.0
}

fn ap_oracle() -> Check {
    let unit = |x: f64, score: f64| OrientedBox::new(Vec3::new(x, 0.0, 0.5), Vec3::repeat(1.0), 0.0, 0, score).unwrap();
    let mut rng = rng_from_seed(4);
    let mut configurations = 0usize;
    for gt_count in 1..=3usize {
        let gts: Vec<OrientedBox> = (0..gt_count).map(|j| unit(3.0 * j as f64, 1.0)).collect();
        for n in 0..=6usize {
            // each ranked detection overlaps one GT (index < gt_count) or none
            let targets_per_slot = gt_count + 1;
            for code in 0..targets_per_slot.pow(n as u32) {
                let ranked: Vec<usize> = (0..n).map(|i| code / targets_per_slot.pow(i as u32) % targets_per_slot).collect();
                let mut claimed = BTreeSet::new();
                let expected: Vec<bool> = ranked.iter().map(|&t| t < gt_count && claimed.insert(t)).collect();

                let mut slots: Vec<usize> = (0..n).collect();
                slots.shuffle(&mut rng);
                let mut dets = vec![unit(0.0, 0.0); n];
                for (rank, &slot) in slots.iter().enumerate() {
                    let x = if ranked[rank] < gt_count { 3.0 * ranked[rank] as f64 } else { 20.0 };
                    dets[slot] = unit(x, 1.0 - rank as f64 / 8.0);
                }
                let flags = match_detections(&dets, &gts, 0.5).flags;
                ensure(flags == expected, || format!("matching differs for ranking {ranked:?}"))?;
                let ap = average_precision_11pt(&flags, gt_count).map_err(|e| e.to_string())?;
                let want = reference_ap(&expected, gt_count);
                ensure(ap.to_bits() == want.to_bits(), || format!("AP {ap} vs reference {want} for {ranked:?}"))?;
                let recall = recall_at(&flags, gt_count).map_err(|e| e.to_string())?;
                let tp = expected.iter().filter(|f| **f).count();
                ensure(recall == tp as f64 / gt_count as f64, || format!("recall {recall} for {ranked:?}"))?;
                configurations += 1;
            }
        }
    }
    let one = average_precision_11pt(&[true], 1).unwrap();
    let half = average_precision_11pt(&[false, true], 1).unwrap();
    ensure(one == 1.0 && half == 0.5, || format!("fixtures gave {one} and {half}"))?;
    Ok(format!("{configurations} configurations bitwise equal, fixtures 1.0 / 0.5"))
}

fn scattering_fidelity() -> Check {
    let scene = demo_scene();
    let config = PipelineConfig { noise_sigma: Some(0.0), outlier_rate: Some(0.0), ..Default::default() };
    let settings = RunSettings::resolve(&config, &scene);
    let all = render_all(&scene, config.min_box_pixels).map_err(|e| e.to_string())?;
    let ids = keyframes(&config, &all);
    let frames: Vec<_> = ids.iter().map(|&i| all[i].clone()).collect();
    let cloud = scatter(&config, &frames, &ids, &settings).map_err(|e| e.to_string())?;
    ensure(ids.len() == scene.cameras.len(), || format!("{} of {} cameras used", ids.len(), scene.cameras.len()))?;
    ensure(cloud.len() > 100, || format!("only {} points scattered", cloud.len()))?;

    let mesh = scene.gt_mesh();
    let positions = cloud.positions();
    let on_surface = positions.par_iter().filter(|p| distance_to_mesh(&mesh, p) <= 1e-6).count();
    let fraction = on_surface as f64 / positions.len() as f64;
    ensure(fraction >= 0.99, || format!("{:.2}% on surface", 100.0 * fraction))?;

    let r = config.scatter_radius;
    let violations = (0..positions.len())
        .into_par_iter()
        .filter(|&i| positions[..i].iter().any(|q| (positions[i] - q).norm() < r))
        .count();
    ensure(violations == 0, || format!("{violations} points violate acceptance-order spacing"))?;
    Ok(format!("{} points, {:.2}% within 1e-6 m, spacing holds for all", positions.len(), 100.0 * fraction))
}

fn surface_filter_discrimination() -> Check {
    let scene = demo_scene();
    let config = PipelineConfig { noise_sigma: Some(0.05), outlier_rate: Some(0.1), ..Default::default() };
    let settings = RunSettings::resolve(&config, &scene);
    let all = render_all(&scene, config.min_box_pixels).map_err(|e| e.to_string())?;
    let ids = keyframes(&config, &all);
    let mut frames: Vec<_> = ids.iter().map(|&i| all[i].clone()).collect();
    perturb_frames(&mut frames, &ids, &scene, &settings);
    let mut cloud = scatter(&config, &frames, &ids, &settings).map_err(|e| e.to_string())?;
    let options = ProjectionOptions { occlusion_tolerance: config.occlusion_tolerance };
    let aggregated =
        aggregate_points(&mut cloud, &frames, category_count(&scene), &options).map_err(|e| e.to_string())?;
    let outcome = surface_filter(&config, &scene, &mut cloud, &aggregated, &settings).map_err(|e| e.to_string())?;

    // brute-force nearest neighbour over the same surface sample
    let surface = sample_surface_density(
        &scene.gt_mesh(),
        gt_sampling_density(config.tau),
        stage_seed(settings.root_seed, "gt-surface"),
    )
    .map_err(|e| e.to_string())?;
    let brute: Vec<(f64, bool)> = cloud
        .positions()
        .par_iter()
        .map(|p| {
            let d = surface.iter().map(|q| (p - q).norm_squared()).fold(f64::INFINITY, f64::min).sqrt();
            (d, d < config.tau)
        })
        .collect();
    let label_mismatch = brute.iter().zip(&outcome.labels.labels).filter(|((_, l), m)| l != *m).count();
    ensure(label_mismatch == 0, || format!("{label_mismatch} labels differ from brute force"))?;
    let dist_mismatch =
        brute.iter().zip(&outcome.labels.distances).filter(|((d, _), e)| (d - *e).abs() > 1e-12).count();
    ensure(dist_mismatch == 0, || format!("{dist_mismatch} distances differ from brute force"))?;

    let raw = outcome.labels.outlier_fraction();
    let kept_outliers = outcome.kept.iter().filter(|&&i| !outcome.labels.labels[i]).count();
    ensure(!outcome.kept.is_empty(), || "hard threshold removed every point".into())?;
    let filtered = kept_outliers as f64 / outcome.kept.len() as f64;
    ensure(filtered < raw, || format!("outlier fraction {raw:.4} -> {filtered:.4}"))?;
    Ok(format!(
        "{} points, labels exact, outlier fraction {raw:.4} -> {filtered:.4} ({} kept)",
        cloud.len(),
        outcome.kept.len()
    ))
}

fn random_set(rng: &mut impl Rng, frames: usize, channels: usize) -> ProjectionSet {
    let mask: Vec<bool> = (0..frames).map(|_| rng.random_bool(0.7)).collect();
    let features = (0..frames).map(|_| (0..channels).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    ProjectionSet::from_parts(mask, features).unwrap()
}

fn reorder(set: &ProjectionSet, order: &[usize]) -> ProjectionSet {
    ProjectionSet::from_parts(
        order.iter().map(|&i| set.mask[i]).collect(),
        order.iter().map(|&i| set.feature(i).to_vec()).collect(),
    )
    .unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn aggregation_algebra() -> Check {
    let mut rng = rng_from_seed(7);
    let (mut perm, mut dup, mut identity): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let frames = rng.random_range(1..12);
        let channels = rng.random_range(1..6);
        let set = random_set(&mut rng, frames, channels);
        let (mean, var) = (aggregate_mean(&set), aggregate_variance(&set));

        let mut order: Vec<usize> = (0..frames).collect();
        order.shuffle(&mut rng);
        let shuffled = reorder(&set, &order);
        perm = perm.max(max_diff(&mean, &aggregate_mean(&shuffled))).max(max_diff(&var, &aggregate_variance(&shuffled)));

        let doubled: Vec<usize> = (0..frames).chain(0..frames).collect();
        let twice = reorder(&set, &doubled);
        dup = dup.max(max_diff(&mean, &aggregate_mean(&twice))).max(max_diff(&var, &aggregate_variance(&twice)));

        let valid: Vec<&[f64]> = (0..frames).filter(|&i| set.mask[i]).map(|i| set.feature(i)).collect();
        if !valid.is_empty() {
            for c in 0..channels {
                let n = valid.len() as f64;
                let m = valid.iter().map(|f| f[c]).sum::<f64>() / n;
                let m2 = valid.iter().map(|f| f[c] * f[c]).sum::<f64>() / n;
                identity = identity.max((var[c] - (m2 - m * m)).abs());
            }
        }

        let f: Vec<f64> = (0..channels).map(|_| rng.random_range(-1.0..1.0)).collect();
        let same = ProjectionSet::from_parts(vec![true; frames], vec![f; frames]).unwrap();
        let v = aggregate_variance(&same);
        ensure(v.iter().all(|&x| x == 0.0), || format!("consistent features gave variance {v:?}"))?;
    }
    ensure(perm <= 1e-12, || format!("permutation deviation {perm:e}"))?;
    ensure(dup <= 1e-12, || format!("duplication deviation {dup:e}"))?;
    ensure(identity <= 1e-9, || format!("variance identity deviation {identity:e}"))?;
    Ok(format!("1000 sets, permutation {perm:.1e}, duplication {dup:.1e}, identity {identity:.1e}"))
}

fn sparsity_claim() -> Check {
    let config = PipelineConfig { max_points: 100_000, ..Default::default() };
    let report = run_sparsity_bench(&config, &room_scene()).map_err(|e| e.to_string())?;
    let fine = report.grids.iter().find(|g| g.voxel_size == 0.04).ok_or("no 0.04 m grid in report")?;
    let extent = report.bounds.extent();
    ensure((extent - Vec3::new(8.0, 8.0, 3.0)).amax() < 1e-12, || format!("bounds extent {extent:?}"))?;
    ensure(fine.report.dense_cells == 200 * 200 * 75, || format!("{} dense cells", fine.report.dense_cells))?;
    ensure(report.scatter_points <= 100_000, || format!("{} points exceed cap", report.scatter_points))?;
    let ratio = fine.report.dense_cells as f64 / report.scatter_points as f64;
    ensure(ratio >= 30.0, || format!("ratio {ratio:.1} < 30"))?;

    let json: serde_json::Value = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    for key in ["bounds", "keyframes", "scatter_points", "scatter_build_seconds", "grids"] {
        ensure(json.get(key).is_some(), || format!("report lacks `{key}`"))?;
    }
    for grid in json["grids"].as_array().ok_or("`grids` is not an array")? {
        for key in ["scatter_points", "occupied_voxels", "dense_cells", "reduction_factor", "bytes_scatter", "bytes_dense"] {
            ensure(grid["report"][key].is_number(), || format!("grid report lacks numeric `{key}`"))?;
        }
    }
    Ok(format!("{} dense cells / {} points = {ratio:.1}", fine.report.dense_cells, report.scatter_points))
}

fn run_cli(dir: &Path, config: &Path) -> std::result::Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_psdet"))
        .args(["run", "--preset", "demo", "--config"])
        .arg(config)
        .arg("--output")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("run failed: {}", String::from_utf8_lossy(&status.stderr)))?;
    std::fs::read(dir.join("metrics.json")).map_err(|e| e.to_string())
}

fn end_to_end_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("config.json");
    std::fs::write(&config, r#"{ "detector": { "mode": "gt_passthrough" } }"#).map_err(|e| e.to_string())?;
    let first = run_cli(&tmp.path().join("a"), &config)?;
    let second = run_cli(&tmp.path().join("b"), &config)?;
    ensure(first == second, || "metrics.json differs between runs".into())?;
    let json: serde_json::Value = serde_json::from_slice(&first).map_err(|e| e.to_string())?;
    let (ap, recall) = (json["mean"]["AP@0.5"].as_f64(), json["mean"]["R@0.5"].as_f64());
    ensure(ap == Some(1.0) && recall == Some(1.0), || format!("AP@0.5 {ap:?}, R@0.5 {recall:?}"))?;
    Ok(format!("{} identical bytes, AP@0.5 = 1.0, R@0.5 = 1.0", first.len()))
}

fn chamfer_fscore() -> Check {
    let origin = [Vec3::zeros()];
    let cd = chamfer(&origin, &[Vec3::new(1.0, 0.0, 0.0)]).map_err(|e| e.to_string())?;
    ensure(cd == 2.0, || format!("two-point chamfer {cd}"))?;
    let far = fscore(&origin, &[Vec3::new(1.0, 0.0, 0.0)], 0.004, ThresholdMode::Squared).unwrap();
    let near = fscore(&origin, &[Vec3::new(0.05, 0.0, 0.0)], 0.004, ThresholdMode::Squared).unwrap();
    ensure(far == 0.0 && near == 100.0, || format!("threshold cases gave {far} and {near}"))?;

    let mut rng = rng_from_seed(10);
    let cloud = |rng: &mut StageRng| -> Vec<Vec3> {
        (0..200).map(|_| Vec3::from_fn(|_, _| rng.random_range(-0.5..0.5))).collect()
    };
    let (g, r) = (cloud(&mut rng), cloud(&mut rng));
    let grid = [0.0005, 0.001, 0.002, 0.004, 0.006, 0.01, 0.02, 0.04, 0.08, 0.16];
    let scores: Vec<f64> = grid.iter().map(|&d| fscore(&g, &r, d, ThresholdMode::Squared).unwrap()).collect();
    ensure(scores.windows(2).all(|w| w[0] <= w[1]), || format!("not monotone: {scores:?}"))?;
    Ok(format!("chamfer 2.0, F 0 / 100, monotone over 10 thresholds ({:.1} -> {:.1})", scores[0], scores[9]))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("geometry round trip", Duration::from_secs(1), geometry_round_trip),
        ("ordinal depth", Duration::from_secs(5), ordinal_depth),
        ("iou oracle", Duration::from_secs(60), iou_oracle),
        ("ap oracle", Duration::from_secs(10), ap_oracle),
        ("scattering fidelity", Duration::from_secs(30), scattering_fidelity),
        ("surface filter discrimination", Duration::from_secs(60), surface_filter_discrimination),
        ("aggregation algebra", Duration::from_secs(5), aggregation_algebra),
        ("sparsity", Duration::from_secs(10), sparsity_claim),
        ("end-to-end determinism", Duration::MAX, end_to_end_determinism),
        ("chamfer and f-score", Duration::MAX, chamfer_fscore),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > *limit {
                Err(format!("{detail}; took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {:.2} s)", i + 1, elapsed.as_secs_f64()),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({reason})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
