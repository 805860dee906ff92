//! Yaw-only oriented boxes `[x, y, z, w, h, d, r_z]`.
//!
//! `w` is the extent along the box's local x axis, `h` along local y and `d`
//! along the vertical z axis. `yaw` rotates local x toward world y and is kept
//! in `(-π, π]`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;

use crate::geometry::Triangle;
use crate::surfacefilter::binary_focal_loss;
use crate::{Error, Result, Vec3};

/// Proposals whose center lies within this distance of a ground-truth center
/// count as positives.
pub const POSITIVE_RADIUS: f64 = 0.3;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrientedBox {
    pub center: Vec3,
    pub size: Vec3,
    pub yaw: f64,
    pub category: u32,
    pub score: f64,
}

impl OrientedBox {
    pub fn new(center: Vec3, size: Vec3, yaw: f64, category: u32, score: f64) -> Result<Self> {
        if !(center.iter().all(|c| c.is_finite()) && yaw.is_finite() && score.is_finite()) {
            return Err(Error::NonFinite("box parameters"));
        }
        if size.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::param("box size", "extents must be positive"));
        }
        Ok(Self {
            center,
            size,
            yaw: wrap_angle(yaw),
            category,
            score,
        })
    }

    /// Axis-aligned box spanning `min..max`.
    pub fn from_min_max(min: Vec3, max: Vec3, category: u32, score: f64) -> Result<Self> {
        Self::new((min + max) * 0.5, max - min, 0.0, category, score)
    }

    pub fn volume(&self) -> f64 {
        self.size.x * self.size.y * self.size.z
    }

    /// `[x, y, z, w, h, d, r_z]`
    pub fn params(&self) -> [f64; 7] {
        [
            self.center.x,
            self.center.y,
            self.center.z,
            self.size.x,
            self.size.y,
            self.size.z,
            self.yaw,
        ]
    }

    fn axes(&self) -> ([f64; 2], [f64; 2]) {
        let (s, c) = self.yaw.sin_cos();
        ([c, s], [-s, c])
    }

    /// Footprint corners in the xy-plane, counter-clockwise.
    pub fn footprint(&self) -> [[f64; 2]; 4] {
        let (ax, ay) = self.axes();
        let hw = self.size.x * 0.5;
        let hh = self.size.y * 0.5;
        let c = [self.center.x, self.center.y];
        let corner = |sx: f64, sy: f64| {
            [
                c[0] + sx * hw * ax[0] + sy * hh * ay[0],
                c[1] + sx * hw * ax[1] + sy * hh * ay[1],
            ]
        };
        [
            corner(-1.0, -1.0),
            corner(1.0, -1.0),
            corner(1.0, 1.0),
            corner(-1.0, 1.0),
        ]
    }

    /// Eight corners: the bottom face counter-clockwise, then the top face in
    /// the same order.
    pub fn corners(&self) -> [Vec3; 8] {
        let fp = self.footprint();
        let z0 = self.center.z - self.size.z * 0.5;
        let z1 = self.center.z + self.size.z * 0.5;
        core::array::from_fn(|i| {
            let [x, y] = fp[i % 4];
            Vec3::new(x, y, if i < 4 { z0 } else { z1 })
        })
    }

    /// Twelve outward-facing triangles covering the box surface.
    pub fn shell(&self) -> Vec<Triangle> {
        let c = self.corners();
        const FACES: [[usize; 4]; 6] = [
            [0, 3, 2, 1], // bottom
            [4, 5, 6, 7], // top
            [0, 1, 5, 4],
            [1, 2, 6, 5],
            [2, 3, 7, 6],
            [3, 0, 4, 7],
        ];
        FACES
            .iter()
            .flat_map(|f| {
                [
                    Triangle::new(c[f[0]], c[f[1]], c[f[2]]),
                    Triangle::new(c[f[0]], c[f[2]], c[f[3]]),
                ]
            })
            .collect()
    }

    /// Whether `p` lies inside or on the box, with `tol` meters of slack.
    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        let (ax, ay) = self.axes();
        let d = p - self.center;
        let lx = d.x * ax[0] + d.y * ax[1];
        let ly = d.x * ay[0] + d.y * ay[1];
        lx.abs() <= self.size.x * 0.5 + tol
            && ly.abs() <= self.size.y * 0.5 + tol
            && d.z.abs() <= self.size.z * 0.5 + tol
    }
}

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    twice.abs() * 0.5
}

/// Sutherland-Hodgman clip of `subject` by the convex counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut output: Vec<[f64; 2]> = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = core::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let cur_in = cross2(a, b, cur) >= 0.0;
            let prev_in = cross2(a, b, prev) >= 0.0;
            if cur_in != prev_in {
                let dp = cross2(a, b, prev);
                let dc = cross2(a, b, cur);
                let t = dp / (dp - dc);
                output.push([
                    prev[0] + t * (cur[0] - prev[0]),
                    prev[1] + t * (cur[1] - prev[1]),
                ]);
            }
            if cur_in {
                output.push(cur);
            }
        }
    }
    output
}

/// Intersection volume of two oriented boxes.
pub fn intersection_volume(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let z_lo = (a.center.z - a.size.z * 0.5).max(b.center.z - b.size.z * 0.5);
    let z_hi = (a.center.z + a.size.z * 0.5).min(b.center.z + b.size.z * 0.5);
    if z_hi <= z_lo {
        return 0.0;
    }
    // bounding-circle reject before clipping
    let reach_a = 0.5 * (a.size.x.hypot(a.size.y));
    let reach_b = 0.5 * (b.size.x.hypot(b.size.y));
    let dx = a.center.x - b.center.x;
    let dy = a.center.y - b.center.y;
    if dx.hypot(dy) >= reach_a + reach_b {
        return 0.0;
    }
    let area = polygon_area(&clip_convex(&a.footprint(), &b.footprint()));
    area * (z_hi - z_lo)
}

/// 3D IoU of yaw-rotated boxes, in `[0, 1]`.
pub fn iou_3d(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let inter = intersection_volume(a, b);
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.volume() + b.volume() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Greedy non-maximum suppression.
///
/// Boxes are visited by descending score (ties by input index); a box is
/// dropped when its IoU with an already kept box exceeds `iou_threshold`.
/// With `per_category`, only same-category boxes suppress each other.
/// Returns kept input indices in visit order.
pub fn nms_indices(boxes: &[OrientedBox], iou_threshold: f64, per_category: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&i, &j| boxes[j].score.total_cmp(&boxes[i].score).then(i.cmp(&j)));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let suppressed = kept.iter().any(|&k| {
            (!per_category || boxes[k].category == boxes[i].category)
                && iou_3d(&boxes[k], &boxes[i]) > iou_threshold
        });
        if !suppressed {
            kept.push(i);
        }
    }
    kept
}

/// Per-category NMS returning the surviving boxes sorted by score.
pub fn nms(boxes: &[OrientedBox], iou_threshold: f64) -> Vec<OrientedBox> {
    nms_indices(boxes, iou_threshold, true)
        .into_iter()
        .map(|i| boxes[i])
        .collect()
}

pub fn smooth_l1(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        0.5 * x * x
    } else {
        a - 0.5
    }
}

pub fn smooth_l1_grad(x: f64) -> f64 {
    if x.abs() < 1.0 {
        x
    } else {
        x.signum()
    }
}

/// Elementwise smooth-L1, summed.
pub fn smooth_l1_sum(residuals: &[f64]) -> f64 {
    residuals.iter().map(|&x| smooth_l1(x)).sum()
}

/// A seed point and its predicted displacement to an object center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vote {
    pub seed: Vec3,
    pub offset: Vec3,
}

impl Vote {
    pub fn target(&self) -> Vec3 {
        self.seed + self.offset
    }
}

/// Maps each proposal center to the nearest ground-truth center within
/// `radius`, or `None` (negative).
pub fn assign_proposals(proposals: &[Vec3], gt_centers: &[Vec3], radius: f64) -> Vec<Option<usize>> {
    proposals
        .iter()
        .map(|p| {
            gt_centers
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - p).norm()))
                .filter(|&(_, d)| d <= radius)
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .map(|(i, _)| i)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionLoss {
    pub vote: f64,
    pub classification: f64,
    pub regression: f64,
    pub total: f64,
}

/// Inputs of [`detection_loss`]. `box_params[i]` and `gt_box_params[i]`
/// form one regression pair; `class_probs[i]` is scored against
/// `class_labels[i]`.
#[derive(Debug, Clone, Copy)]
pub struct DetectionLossInput<'a> {
    pub votes: &'a [Vote],
    pub gt_centers: &'a [Vec3],
    pub class_probs: &'a [f64],
    pub class_labels: &'a [bool],
    pub box_params: &'a [[f64; 7]],
    pub gt_box_params: &'a [[f64; 7]],
    pub gamma: f64,
}

fn mean(total: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

/// Vote, classification and box-regression terms with unit weights.
pub fn detection_loss(input: &DetectionLossInput<'_>) -> Result<DetectionLoss> {
    Error::check_len(
        "classification inputs",
        input.class_probs.len(),
        input.class_labels.len(),
    )?;
    Error::check_len(
        "regression inputs",
        input.box_params.len(),
        input.gt_box_params.len(),
    )?;
    if !input.votes.is_empty() && input.gt_centers.is_empty() {
        return Err(Error::Empty("ground-truth centers"));
    }

    let vote_total: f64 = input
        .votes
        .iter()
        .map(|v| {
            let t = v.target();
            let nearest = input
                .gt_centers
                .iter()
                .min_by(|a, b| (*a - t).norm_squared().total_cmp(&(*b - t).norm_squared()))
                .expect("checked non-empty");
            let r = t - nearest;
            smooth_l1_sum(r.as_slice())
        })
        .sum();
    let vote = mean(vote_total, input.votes.len());

    let classification = if input.class_probs.is_empty() {
        0.0
    } else {
        binary_focal_loss(input.class_probs, input.class_labels, input.gamma)?
    };

    let reg_total: f64 = input
        .box_params
        .iter()
        .zip(input.gt_box_params)
        .map(|(p, g)| {
            let mut r: [f64; 7] = core::array::from_fn(|i| p[i] - g[i]);
            r[6] = wrap_angle(r[6]);
            smooth_l1_sum(&r)
        })
        .sum();
    let regression = mean(reg_total, input.box_params.len());

    Ok(DetectionLoss {
        vote,
        classification,
        regression,
        total: vote + classification + regression,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn cube(x: f64, y: f64, z: f64, yaw: f64) -> OrientedBox {
        OrientedBox::new(Vec3::new(x, y, z), Vec3::repeat(1.0), yaw, 0, 1.0).unwrap()
    }

    fn scored(b: OrientedBox, score: f64) -> OrientedBox {
        OrientedBox { score, ..b }
    }

    fn monte_carlo_iou(a: &OrientedBox, b: &OrientedBox, samples: usize, seed: u64) -> f64 {
        let mut rng = crate::rng::rng_from_seed(seed);
        let lo = a.corners().iter().chain(b.corners().iter()).fold(Vec3::repeat(f64::INFINITY), |m, c| m.inf(c));
        let hi = a.corners().iter().chain(b.corners().iter()).fold(Vec3::repeat(f64::NEG_INFINITY), |m, c| m.sup(c));
        let (mut ina, mut inb, mut both) = (0u64, 0u64, 0u64);
        for _ in 0..samples {
            let p = Vec3::new(
                rng.random_range(lo.x..hi.x),
                rng.random_range(lo.y..hi.y),
                rng.random_range(lo.z..hi.z),
            );
            let (x, y) = (a.contains(&p, 0.0), b.contains(&p, 0.0));
            ina += x as u64;
            inb += y as u64;
            both += (x && y) as u64;
        }
        both as f64 / (ina + inb - both) as f64
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(TAU), 0.0);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-0.5), -0.5);
    }

    #[test]
    fn box_validation() {
        assert!(OrientedBox::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 1.0), 0.0, 0, 1.0).is_err());
        assert!(OrientedBox::new(Vec3::new(f64::NAN, 0.0, 0.0), Vec3::repeat(1.0), 0.0, 0, 1.0).is_err());
    }

    #[test]
    fn iou_examples() {
        let a = cube(0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(iou_3d(&a, &a), 1.0, epsilon = 1e-12);
        assert_eq!(iou_3d(&a, &cube(5.0, 0.0, 0.0, 0.0)), 0.0);
        assert_eq!(iou_3d(&a, &cube(0.0, 0.0, 1.5, 0.0)), 0.0);
        assert_relative_eq!(iou_3d(&a, &cube(0.5, 0.0, 0.0, 0.0)), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn iou_yawed_cube_against_monte_carlo() {
        let a = cube(0.0, 0.0, 0.0, 0.0);
        let b = cube(0.0, 0.0, 0.0, PI / 4.0);
        let exact = iou_3d(&a, &b);
        // octagon footprint of area 2(√2 - 1), unit height
        let inter = 2.0 * (2f64.sqrt() - 1.0);
        assert_relative_eq!(exact, inter / (2.0 - inter), epsilon = 1e-12);
        let mc = monte_carlo_iou(&a, &b, 1_000_000, 3);
        assert!((exact - mc).abs() < 0.005, "exact {exact} mc {mc}");
    }

    #[test]
    fn nms_examples() {
        let a = cube(0.0, 0.0, 0.0, 0.0);
        let kept = nms(&[scored(a, 0.8), scored(a, 0.9)], 0.01);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].score, 0.9);

        let far = cube(3.0, 0.0, 0.0, 0.0);
        assert_eq!(nms(&[scored(a, 0.5), scored(far, 0.7)], 0.01).len(), 2);

        // A overlaps B overlaps C, A and C disjoint
        let boxes = [
            scored(cube(0.0, 0.0, 0.0, 0.0), 0.9),
            scored(cube(0.8, 0.0, 0.0, 0.0), 0.8),
            scored(cube(1.6, 0.0, 0.0, 0.0), 0.7),
        ];
        assert_eq!(nms_indices(&boxes, 0.01, true), [0, 2]);

        // categories do not suppress each other unless asked to
        let other = OrientedBox { category: 1, ..scored(a, 0.5) };
        assert_eq!(nms_indices(&[scored(a, 0.9), other], 0.01, true), [0, 1]);
        assert_eq!(nms_indices(&[scored(a, 0.9), other], 0.01, false), [0]);
    }

    #[test]
    fn nms_tie_break_by_index() {
        let a = cube(0.0, 0.0, 0.0, 0.0);
        assert_eq!(nms_indices(&[scored(a, 0.5), scored(a, 0.5)], 0.01, true), [0]);
    }

    #[test]
    fn smooth_l1_examples() {
        assert_eq!(smooth_l1(0.0), 0.0);
        assert_eq!(smooth_l1(0.5), 0.125);
        assert_eq!(smooth_l1(2.0), 1.5);
        assert_eq!(smooth_l1(-2.0), 1.5);
    }

    #[test]
    fn smooth_l1_is_c1_at_one() {
        let h = 1e-6;
        for x in [1.0f64, -1.0] {
            let left = (smooth_l1(x) - smooth_l1(x - h)) / h;
            let right = (smooth_l1(x + h) - smooth_l1(x)) / h;
            assert!((left - x.signum()).abs() < 1e-5);
            assert!((right - x.signum()).abs() < 1e-5);
        }
    }

    #[test]
    fn detection_loss_examples() {
        let gt = [Vec3::new(1.0, 2.0, 0.5)];
        let params = [cube(1.0, 2.0, 0.5, 0.3).params()];
        let perfect = detection_loss(&DetectionLossInput {
            votes: &[Vote { seed: Vec3::zeros(), offset: gt[0] }],
            gt_centers: &gt,
            class_probs: &[1.0, 0.0],
            class_labels: &[true, false],
            box_params: &params,
            gt_box_params: &params,
            gamma: 2.0,
        })
        .unwrap();
        assert!(perfect.vote < 1e-6 && perfect.classification < 1e-6 && perfect.regression < 1e-6);
        assert!(perfect.total < 1e-6);

        let off = detection_loss(&DetectionLossInput {
            votes: &[Vote { seed: Vec3::zeros(), offset: gt[0] + Vec3::new(0.5, 0.0, 0.0) }],
            gt_centers: &gt,
            class_probs: &[],
            class_labels: &[],
            box_params: &[],
            gt_box_params: &[],
            gamma: 2.0,
        })
        .unwrap();
        assert_relative_eq!(off.vote, 0.125, epsilon = 1e-12);

        let mut turned = params[0];
        turned[6] += TAU;
        let wrapped = detection_loss(&DetectionLossInput {
            votes: &[],
            gt_centers: &[],
            class_probs: &[],
            class_labels: &[],
            box_params: &[turned],
            gt_box_params: &params,
            gamma: 2.0,
        })
        .unwrap();
        assert!(wrapped.regression < 1e-12);
    }

    #[test]
    fn detection_loss_length_checks() {
        let r = detection_loss(&DetectionLossInput {
            votes: &[],
            gt_centers: &[],
            class_probs: &[0.5],
            class_labels: &[],
            box_params: &[],
            gt_box_params: &[],
            gamma: 2.0,
        });
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn proposal_assignment() {
        let gt = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)];
        let got = assign_proposals(
            &[Vec3::new(0.1, 0.0, 0.0), Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.95, 0.0, 0.0)],
            &gt,
            POSITIVE_RADIUS,
        );
        assert_eq!(got, vec![Some(0), None, Some(1)]);
    }

    #[test]
    fn corner_examples() {
        let c = cube(0.0, 0.0, 0.0, 0.0).corners();
        for p in &c {
            assert!(p.iter().all(|v| (v.abs() - 0.5).abs() < 1e-15));
        }
        let centroid = c.iter().fold(Vec3::zeros(), |s, p| s + p) / 8.0;
        assert!(centroid.norm() < 1e-12);

        let b = OrientedBox::new(Vec3::zeros(), Vec3::new(2.0, 1.0, 1.0), PI / 2.0, 0, 1.0).unwrap();
        for p in b.corners() {
            assert_relative_eq!(p.x.abs(), 0.5, epsilon = 1e-12);
            assert_relative_eq!(p.y.abs(), 1.0, epsilon = 1e-12);
        }
    }

    /// Volume enclosed by the shell via the divergence theorem.
    fn shell_volume(b: &OrientedBox) -> f64 {
        b.shell()
            .iter()
            .map(|t| t.a.dot(&t.b.cross(&t.c)) / 6.0)
            .sum()
    }

    proptest! {
        #[test]
        fn box_shell_volume_and_centroid(
            c in prop::array::uniform3(-5.0f64..5.0),
            s in prop::array::uniform3(0.05f64..4.0),
            yaw in -10.0f64..10.0,
        ) {
            let b = OrientedBox::new(Vec3::new(c[0], c[1], c[2]), Vec3::new(s[0], s[1], s[2]), yaw, 0, 1.0).unwrap();
            prop_assert!((shell_volume(&b) - b.volume()).abs() < 1e-9);
            let centroid = b.corners().iter().fold(Vec3::zeros(), |acc, p| acc + p) / 8.0;
            prop_assert!((centroid - b.center).norm() < 1e-12);
            prop_assert!(b.yaw > -PI && b.yaw <= PI);
        }

        #[test]
        fn iou_symmetry_and_yaw_invariance(
            ca in prop::array::uniform3(-1.0f64..1.0),
            cb in prop::array::uniform3(-1.0f64..1.0),
            sa in prop::array::uniform3(0.2f64..2.0),
            sb in prop::array::uniform3(0.2f64..2.0),
            ya in -PI..PI,
            yb in -PI..PI,
            dyaw in -PI..PI,
        ) {
            let a = OrientedBox::new(Vec3::new(ca[0], ca[1], ca[2]), Vec3::new(sa[0], sa[1], sa[2]), ya, 0, 1.0).unwrap();
            let b = OrientedBox::new(Vec3::new(cb[0], cb[1], cb[2]), Vec3::new(sb[0], sb[1], sb[2]), yb, 0, 1.0).unwrap();
            let ab = iou_3d(&a, &b);
            prop_assert!((ab - iou_3d(&b, &a)).abs() < 1e-12);
            prop_assert!((iou_3d(&a, &a) - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            // rotate both about the origin
            let (s, c) = dyaw.sin_cos();
            let rot = |bx: &OrientedBox| OrientedBox::new(
                Vec3::new(c * bx.center.x - s * bx.center.y, s * bx.center.x + c * bx.center.y, bx.center.z),
                bx.size, bx.yaw + dyaw, 0, 1.0).unwrap();
            prop_assert!((iou_3d(&rot(&a), &rot(&b)) - ab).abs() < 1e-9);
        }

        #[test]
        fn nms_output_is_antichain(
            raw in prop::collection::vec((prop::array::uniform3(-1.5f64..1.5), 0.0f64..1.0, 0u32..2), 1..12)
        ) {
            let boxes: Vec<_> = raw.iter().map(|(c, s, k)| OrientedBox::new(
                Vec3::new(c[0], c[1], c[2] * 0.2), Vec3::new(0.6, 0.8, 0.5), c[0], *k, *s).unwrap()).collect();
            let kept = nms(&boxes, 0.01);
            for i in 0..kept.len() {
                for j in i + 1..kept.len() {
                    if kept[i].category == kept[j].category {
                        prop_assert!(iou_3d(&kept[i], &kept[j]) <= 0.01);
                    }
                    prop_assert!(kept[i].score >= kept[j].score);
                }
            }
        }
    }
}
