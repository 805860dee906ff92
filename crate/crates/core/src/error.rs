use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(&'static str),
    #[error("rotation is not proper orthonormal (max |RᵀR - I| = {orthonormality:e}, det = {det})")]
    InvalidPose { orthonormality: f64, det: f64 },
    #[error("depth must be positive, got {0}")]
    NonPositiveDepth(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("length mismatch in {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("invalid {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("camera index {index} out of range for {count} cameras")]
    CameraIndex { index: usize, count: usize },
    #[error("category {category} out of range for {count} categories")]
    Category { category: usize, count: usize },
    #[error("voxel index ({0}, {1}, {2}) does not fit in 21 signed bits")]
    VoxelIndexOverflow(i64, i64, i64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }

    pub(crate) fn check_len(what: &'static str, left: usize, right: usize) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::LengthMismatch { what, left, right })
        }
    }
}
