//! Point indices: a uniform hash grid for fixed-radius queries and a static
//! kd-tree for exact nearest-neighbor search.

use alloc::vec::Vec;

use hashbrown::HashMap;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;
use rustc_hash::FxBuildHasher;

use crate::{Error, Result, Vec3};

type CellKey = (i64, i64, i64);

/// Uniform hash grid. Radius queries with `r <= cell_size` inspect the
/// 3x3x3 block of cells around the query.
#[derive(Debug, Clone)]
pub struct RadiusGrid {
    cell_size: f64,
    cells: HashMap<CellKey, Vec<u32>, FxBuildHasher>,
    points: Vec<Vec3>,
}

impl RadiusGrid {
    pub fn new(cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::param("cell size", "must be positive and finite"));
        }
        Ok(Self {
            cell_size,
            cells: HashMap::with_hasher(FxBuildHasher),
            points: Vec::new(),
        })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    fn key(&self, p: &Vec3) -> CellKey {
        let s = self.cell_size;
        (
            (p.x / s).floor() as i64,
            (p.y / s).floor() as i64,
            (p.z / s).floor() as i64,
        )
    }

    pub fn insert(&mut self, p: Vec3) -> usize {
        let id = self.points.len();
        self.points.push(p);
        self.cells.entry(self.key(&p)).or_default().push(id as u32);
        id
    }

    fn for_each_candidate(&self, p: &Vec3, mut f: impl FnMut(usize)) {
        let (cx, cy, cz) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        ids.iter().for_each(|&i| f(i as usize));
                    }
                }
            }
        }
    }

    /// Closest stored point strictly closer than `radius`, with its distance.
    ///
    /// `radius` must not exceed the cell size.
    pub fn nearest_within(&self, p: &Vec3, radius: f64) -> Option<(usize, f64)> {
        debug_assert!(radius <= self.cell_size);
        let mut best: Option<(usize, f64)> = None;
        self.for_each_candidate(p, |i| {
            let d = (self.points[i] - p).norm();
            if d < radius && best.is_none_or(|(bi, bd)| d < bd || (d == bd && i < bi)) {
                best = Some((i, d));
            }
        });
        best
    }

    pub fn any_within(&self, p: &Vec3, radius: f64) -> bool {
        self.nearest_within(p, radius).is_some()
    }

    /// Appends the ids of all points with distance `<= radius` to `out`, in
    /// ascending id order.
    pub fn neighbors_within(&self, p: &Vec3, radius: f64, out: &mut Vec<usize>) {
        debug_assert!(radius <= self.cell_size);
        let start = out.len();
        self.for_each_candidate(p, |i| {
            if (self.points[i] - p).norm() <= radius {
                out.push(i);
            }
        });
        out[start..].sort_unstable();
    }
}

const LEAF_SIZE: usize = 8;

/// Static balanced kd-tree over a fixed point set.
///
/// The tree is implicit: for a subrange `lo..hi` of `order`, the splitting
/// point sits at the middle and `axes` records its split dimension.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Vec3>,
    order: Vec<usize>,
    axes: Vec<u8>,
}

impl KdTree {
    pub fn new(points: &[Vec3]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("kd-tree point set"));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("kd-tree point"));
        }
        let mut tree = Self {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            axes: alloc::vec![0; points.len()],
        };
        tree.build(0, points.len());
        Ok(tree)
    }

    fn build(&mut self, lo: usize, hi: usize) {
        if hi - lo <= LEAF_SIZE {
            return;
        }
        let mut min = Vec3::repeat(f64::INFINITY);
        let mut max = Vec3::repeat(f64::NEG_INFINITY);
        for &i in &self.order[lo..hi] {
            min = min.inf(&self.points[i]);
            max = max.sup(&self.points[i]);
        }
        let axis = (max - min).imax();
        let mid = (lo + hi) / 2;
        let points = &self.points;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            points[a][axis]
                .total_cmp(&points[b][axis])
                .then(a.cmp(&b))
        });
        self.axes[mid] = axis as u8;
        self.build(lo, mid);
        self.build(mid + 1, hi);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Index (into the construction slice) and squared distance of the nearest
    /// point. Equidistant candidates resolve to the lowest index.
    pub fn nearest(&self, q: &Vec3) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(q, 0, self.points.len(), &mut best);
        best
    }

    pub fn nearest_distance(&self, q: &Vec3) -> f64 {
        self.nearest(q).1.sqrt()
    }

    fn consider(&self, q: &Vec3, i: usize, best: &mut (usize, f64)) {
        let d2 = (self.points[i] - q).norm_squared();
        if d2 < best.1 || (d2 == best.1 && i < best.0) {
            *best = (i, d2);
        }
    }

    fn search(&self, q: &Vec3, lo: usize, hi: usize, best: &mut (usize, f64)) {
        if hi - lo <= LEAF_SIZE {
            for &i in &self.order[lo..hi] {
                self.consider(q, i, best);
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let pivot = self.order[mid];
        self.consider(q, pivot, best);
        let axis = self.axes[mid] as usize;
        let diff = q[axis] - self.points[pivot][axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, best);
        // `<=` keeps equidistant points on the far side reachable for tie-breaks
        if diff * diff <= best.1 {
            self.search(q, far.0, far.1, best);
        }
    }
}
