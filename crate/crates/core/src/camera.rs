//! Pinhole camera model.
//!
//! Pixel convention: `(u, v)` from the top-left corner, `u` to the right,
//! `v` downward, pixel centers at integer coordinates. The camera frame has
//! `x` right, `y` down and `z` forward. Poses are stored world-from-camera, so
//! the camera center is the pose translation.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float as _;

use crate::{Error, Mat3, Result, Vec3};

/// Points with camera-frame depth at or below this are treated as behind the
/// camera.
pub const BEHIND_CAMERA_EPS: f64 = 1e-6;

const POSE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self> {
        let k = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::InvalidIntrinsics("focal lengths must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidIntrinsics("image size must be positive"));
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64) {
            return Err(Error::InvalidIntrinsics("cx outside [0, width)"));
        }
        if !(self.cy >= 0.0 && self.cy < self.height as f64) {
            return Err(Error::InvalidIntrinsics("cy outside [0, height)"));
        }
        Ok(())
    }

    /// Whether `(u, v)` lies in `[0, W-1] x [0, H-1]`.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && v >= 0.0 && u <= (self.width - 1) as f64 && v <= (self.height - 1) as f64
    }

    /// Mean focal length, used where a single `f` is needed.
    pub fn focal(&self) -> f64 {
        0.5 * (self.fx + self.fy)
    }
}

/// World-from-camera rigid transform.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    rotation: Mat3,
    translation: Vec3,
}

impl Pose {
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self> {
        let orthonormality = (rotation.transpose() * rotation - Mat3::identity()).amax();
        let det = rotation.determinant();
        if orthonormality > POSE_TOLERANCE || (det - 1.0).abs() > POSE_TOLERANCE {
            return Err(Error::InvalidPose {
                orthonormality,
                det,
            });
        }
        if !translation.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("pose translation"));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self {
            rotation: Mat3::identity(),
            translation,
        }
    }

    /// Camera at `eye` looking at `target`, with image "up" along `up`.
    pub fn look_at(eye: Vec3, target: Vec3, up: Vec3) -> Result<Self> {
        let forward = target - eye;
        if forward.norm() < 1e-12 {
            return Err(Error::param("look_at", "eye and target coincide"));
        }
        let forward = forward.normalize();
        let right = forward.cross(&up);
        if right.norm() < 1e-9 {
            return Err(Error::param("look_at", "up is parallel to the view direction"));
        }
        let right = right.normalize();
        let down = forward.cross(&right);
        let rotation = Mat3::from_columns(&[right, down, forward]);
        // re-orthonormalize to stay inside the validation tolerance
        let rotation = nalgebra::Rotation3::from_matrix(&rotation).into_inner();
        Self::new(rotation, eye)
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn center(&self) -> Vec3 {
        self.translation
    }

    pub fn world_to_camera(&self, p: &Vec3) -> Vec3 {
        self.rotation.tr_mul(&(p - self.translation))
    }

    pub fn camera_to_world(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    /// Camera-from-world transform expressed as a pose.
    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    /// Rotation angle between two poses, in degrees.
    pub fn rotation_angle_deg(&self, other: &Pose) -> f64 {
        let relative = self.rotation.transpose() * other.rotation;
        let c = ((relative.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
        c.acos().to_degrees()
    }
}

/// Result of a successful projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    /// Camera-frame z in meters.
    pub depth: f64,
}

/// Projects a world point. `None` when the point is at or behind the camera
/// plane; image bounds are not checked.
pub fn project(point: &Vec3, intrinsics: &Intrinsics, pose: &Pose) -> Option<Projection> {
    let pc = pose.world_to_camera(point);
    if pc.z <= BEHIND_CAMERA_EPS {
        return None;
    }
    Some(Projection {
        u: intrinsics.fx * pc.x / pc.z + intrinsics.cx,
        v: intrinsics.fy * pc.y / pc.z + intrinsics.cy,
        depth: pc.z,
    })
}

/// Lifts pixel `(u, v)` at camera-frame depth `depth` to world space.
pub fn backproject(
    u: f64,
    v: f64,
    depth: f64,
    intrinsics: &Intrinsics,
    pose: &Pose,
) -> Result<Vec3> {
    if !depth.is_finite() {
        return Err(Error::NonFinite("depth"));
    }
    if depth <= 0.0 {
        return Err(Error::NonPositiveDepth(depth));
    }
    let pc = Vec3::new(
        (u - intrinsics.cx) * depth / intrinsics.fx,
        (v - intrinsics.cy) * depth / intrinsics.fy,
        depth,
    );
    Ok(pose.camera_to_world(&pc))
}

/// Ray through a pixel center.
///
/// `direction` is the normalized world-frame version of the camera-frame
/// vector `((u-cx)/fx, (v-cy)/fy, 1)`. `z_per_distance` is the camera-frame
/// z gained per meter travelled along `direction`, so a hit at ray distance
/// `t` has depth `t * z_per_distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelRay {
    pub pixel: (f64, f64),
    pub origin: Vec3,
    pub direction: Vec3,
    pub z_per_distance: f64,
}

impl PixelRay {
    /// Point on the ray at camera-frame depth `depth`. Matches
    /// [`backproject`] for the same pixel.
    pub fn at_depth(&self, depth: f64) -> Vec3 {
        self.origin + self.direction * (depth / self.z_per_distance)
    }

    pub fn depth_at_distance(&self, t: f64) -> f64 {
        t * self.z_per_distance
    }
}

pub fn pixel_ray(u: f64, v: f64, intrinsics: &Intrinsics, pose: &Pose) -> PixelRay {
    let dc = Vec3::new(
        (u - intrinsics.cx) / intrinsics.fx,
        (v - intrinsics.cy) / intrinsics.fy,
        1.0,
    );
    let len = dc.norm();
    PixelRay {
        pixel: (u, v),
        origin: pose.center(),
        direction: pose.rotation() * (dc / len),
        z_per_distance: 1.0 / len,
    }
}
