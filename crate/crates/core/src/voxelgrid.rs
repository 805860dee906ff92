//! Sparse voxelization of scattered points and the dense-grid baseline it is
//! compared against.

use alloc::vec::Vec;

use hashbrown::HashMap;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;
use rustc_hash::FxBuildHasher;

use crate::geometry::Aabb;
use crate::scatter::ScatterCloud;
use crate::{Error, Result, Vec3};

/// Point-scattering voxel size in meters.
pub const PS_VOXEL_SIZE: f64 = 0.04;
/// Grid-sampling voxel size in meters.
pub const GS_VOXEL_SIZE: f64 = 0.16;

const INDEX_BITS: u32 = 21;
const INDEX_MIN: i64 = -(1 << (INDEX_BITS - 1));
const INDEX_MAX: i64 = (1 << (INDEX_BITS - 1)) - 1;
const INDEX_MASK: u64 = (1 << INDEX_BITS) - 1;

/// Packs a signed 3-index into 63 bits, 21 bits per axis.
pub fn pack_index(i: [i64; 3]) -> Result<u64> {
    if i.iter().any(|&c| !(INDEX_MIN..=INDEX_MAX).contains(&c)) {
        return Err(Error::VoxelIndexOverflow(i[0], i[1], i[2]));
    }
    Ok(i.iter()
        .enumerate()
        .fold(0u64, |acc, (axis, &c)| acc | (((c as u64) & INDEX_MASK) << (axis as u32 * INDEX_BITS))))
}

pub fn unpack_index(key: u64) -> [i64; 3] {
    core::array::from_fn(|axis| {
        let raw = (key >> (axis as u32 * INDEX_BITS)) & INDEX_MASK;
        // sign-extend from 21 bits
        ((raw << (64 - INDEX_BITS)) as i64) >> (64 - INDEX_BITS)
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Pooling {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoxelCell {
    pub point_count: usize,
    pub feature: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct SparseVoxelGrid {
    voxel_size: f64,
    origin: Vec3,
    pooling: Pooling,
    cells: HashMap<u64, VoxelCell, FxBuildHasher>,
}

impl SparseVoxelGrid {
    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn pooling(&self) -> Pooling {
        self.pooling
    }

    pub fn occupied(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, p: &Vec3) -> [i64; 3] {
        voxel_index(p, &self.origin, self.voxel_size)
    }

    pub fn get(&self, index: [i64; 3]) -> Option<&VoxelCell> {
        pack_index(index).ok().and_then(|k| self.cells.get(&k))
    }

    /// Occupied cells in ascending `(x, y, z)` index order.
    pub fn cells(&self) -> Vec<([i64; 3], &VoxelCell)> {
        let mut out: Vec<_> = self.cells.iter().map(|(&k, c)| (unpack_index(k), c)).collect();
        out.sort_unstable_by_key(|(i, _)| *i);
        out
    }

    pub fn cell_center(&self, index: [i64; 3]) -> Vec3 {
        self.origin + Vec3::new(index[0] as f64 + 0.5, index[1] as f64 + 0.5, index[2] as f64 + 0.5) * self.voxel_size
    }

    pub fn total_points(&self) -> usize {
        self.cells.values().map(|c| c.point_count).sum()
    }
}

pub fn voxel_index(p: &Vec3, origin: &Vec3, voxel_size: f64) -> [i64; 3] {
    core::array::from_fn(|i| ((p[i] - origin[i]) / voxel_size).floor() as i64)
}

/// Pools point features and scores per occupied voxel.
pub fn voxelize(cloud: &ScatterCloud, voxel_size: f64, origin: Vec3, pooling: Pooling) -> Result<SparseVoxelGrid> {
    if !(voxel_size > 0.0 && voxel_size.is_finite()) {
        return Err(Error::param("voxel size", "must be positive"));
    }
    if !cloud.is_consistent() {
        return Err(Error::LengthMismatch {
            what: "scatter cloud arrays",
            left: cloud.points.len(),
            right: cloud.features.len(),
        });
    }
    let mut cells: HashMap<u64, VoxelCell, FxBuildHasher> = HashMap::with_hasher(FxBuildHasher);
    for ((p, f), &s) in cloud.points.iter().zip(&cloud.features).zip(&cloud.scores) {
        let key = pack_index(voxel_index(&p.position, &origin, voxel_size))?;
        let cell = cells.entry(key).or_insert_with(|| VoxelCell {
            point_count: 0,
            feature: match pooling {
                Pooling::Mean => alloc::vec![0.0; f.len()],
                Pooling::Max => alloc::vec![f64::NEG_INFINITY; f.len()],
            },
            score: match pooling {
                Pooling::Mean => 0.0,
                Pooling::Max => f64::NEG_INFINITY,
            },
        });
        if cell.feature.len() != f.len() {
            return Err(Error::param("features", "points differ in channel count"));
        }
        cell.point_count += 1;
        match pooling {
            Pooling::Mean => {
                cell.feature.iter_mut().zip(f).for_each(|(a, &x)| *a += x);
                cell.score += s;
            }
            Pooling::Max => {
                cell.feature.iter_mut().zip(f).for_each(|(a, &x)| *a = a.max(x));
                cell.score = cell.score.max(s);
            }
        }
    }
    if pooling == Pooling::Mean {
        for cell in cells.values_mut() {
            let n = cell.point_count as f64;
            cell.feature.iter_mut().for_each(|x| *x /= n);
            cell.score /= n;
        }
    }
    Ok(SparseVoxelGrid {
        voxel_size,
        origin,
        pooling,
        cells,
    })
}

/// Regular grid over an axis-aligned region.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseGridSpec {
    pub bounds: Aabb,
    pub voxel_size: f64,
}

impl DenseGridSpec {
    pub fn new(bounds: Aabb, voxel_size: f64) -> Result<Self> {
        if !(voxel_size > 0.0 && voxel_size.is_finite()) {
            return Err(Error::param("voxel size", "must be positive"));
        }
        if bounds.is_empty() {
            return Err(Error::Empty("dense grid bounds"));
        }
        Ok(Self { bounds, voxel_size })
    }

    /// Cells per axis: `ceil(extent / voxel_size)`, with quotients within
    /// 1e-9 of an integer taken as that integer.
    pub fn dims(&self) -> [u64; 3] {
        let e = self.bounds.extent();
        core::array::from_fn(|i| {
            let q = e[i] / self.voxel_size;
            let r = q.round();
            let n = if (q - r).abs() < 1e-9 { r } else { q.ceil() };
            (n as u64).max(1)
        })
    }

    pub fn cell_count(&self) -> u64 {
        self.dims().iter().product()
    }
}

/// Lazily enumerates dense cell centers, x fastest.
#[derive(Debug, Clone)]
pub struct DenseCells {
    spec: DenseGridSpec,
    dims: [u64; 3],
    next: u64,
    total: u64,
}

impl Iterator for DenseCells {
    type Item = Vec3;

    fn next(&mut self) -> Option<Vec3> {
        if self.next >= self.total {
            return None;
        }
        let i = self.next;
        self.next += 1;
        let x = i % self.dims[0];
        let y = (i / self.dims[0]) % self.dims[1];
        let z = i / (self.dims[0] * self.dims[1]);
        let s = self.spec.voxel_size;
        Some(self.spec.bounds.min + Vec3::new(x as f64 + 0.5, y as f64 + 0.5, z as f64 + 0.5) * s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for DenseCells {}

pub fn dense_grid_points(spec: &DenseGridSpec) -> Result<DenseCells> {
    let spec = DenseGridSpec::new(spec.bounds, spec.voxel_size)?;
    let dims = spec.dims();
    Ok(DenseCells {
        spec,
        dims,
        next: 0,
        total: dims.iter().product(),
    })
}

/// Declared per-record sizes: position as 3 x f32, each feature channel as
/// f32, plus 8 bytes of bookkeeping (frame id and category as u32) for
/// scattered points only.
pub const POSITION_BYTES: u64 = 12;
pub const CHANNEL_BYTES: u64 = 4;
pub const SCATTER_BOOKKEEPING_BYTES: u64 = 8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparsityReport {
    pub scatter_points: u64,
    pub occupied_voxels: u64,
    pub dense_cells: u64,
    pub reduction_factor: f64,
    pub bytes_scatter: u64,
    pub bytes_dense: u64,
    pub feature_channels: u64,
    pub bytes_per_scatter_point: u64,
    pub bytes_per_dense_cell: u64,
    pub scatter_voxel_size: f64,
    pub dense_voxel_size: f64,
}

/// Compares a scattered cloud (and its voxelization) with a dense grid.
pub fn sparsity_report(
    scatter_points: usize,
    occupied_voxels: usize,
    scatter_voxel_size: f64,
    dense: &DenseGridSpec,
    feature_channels: usize,
) -> SparsityReport {
    let dense_cells = dense.cell_count();
    let per_feature = CHANNEL_BYTES * feature_channels as u64;
    let per_point = POSITION_BYTES + per_feature + SCATTER_BOOKKEEPING_BYTES;
    let per_cell = POSITION_BYTES + per_feature;
    SparsityReport {
        scatter_points: scatter_points as u64,
        occupied_voxels: occupied_voxels as u64,
        dense_cells,
        reduction_factor: dense_cells as f64 / scatter_points.max(1) as f64,
        bytes_scatter: per_point * scatter_points as u64,
        bytes_dense: per_cell * dense_cells,
        feature_channels: feature_channels as u64,
        bytes_per_scatter_point: per_point,
        bytes_per_dense_cell: per_cell,
        scatter_voxel_size,
        dense_voxel_size: dense.voxel_size,
    }
}
