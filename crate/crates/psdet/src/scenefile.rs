//! JSON scene description.
//!
//! ```json
//! {
//!   "objects": [{"center": [0, 0, 0.4], "size": [0.5, 0.5, 0.8], "yaw": 0, "category": 0}],
//!   "cameras": {"trajectory": {"type": "orbit", "radius": 3.2, "height": 1.6, "steps": 20,
//!                              "look_at": [0, 0.2, 0.4]},
//!               "fx": 130, "fy": 130, "cx": 79.5, "cy": 59.5, "width": 160, "height": 120},
//!   "rng_seed": 7, "depth_noise_sigma": 0.0, "outlier_rate": 0.0
//! }
//! ```
//!
//! `cameras` may instead be a list of explicit cameras with `rotation`
//! (row-major world-from-camera) and `translation` (camera center).

use std::path::Path;

use psdet_core::camera::{Intrinsics, Pose};
use psdet_core::geometry::Aabb;
use psdet_core::obb::OrientedBox;
use psdet_core::scenesim::{orbit_poses, palette_albedo, CameraSpec, SceneObject, SceneSpec};
use psdet_core::{Mat3, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::jsonio::read_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectFile {
    pub center: [f64; 3],
    pub size: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
    pub category: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub albedo: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trajectory {
    Orbit {
        radius: f64,
        height: f64,
        steps: usize,
        look_at: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryCameras {
    pub trajectory: Trajectory,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CamerasFile {
    List(Vec<CameraFile>),
    Trajectory(TrajectoryCameras),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

fn default_depth_min() -> f64 {
    0.1
}

fn default_depth_max() -> f64 {
    8.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub objects: Vec<ObjectFile>,
    pub cameras: CamerasFile,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub depth_noise_sigma: f64,
    #[serde(default)]
    pub outlier_rate: f64,
    #[serde(default = "default_depth_min")]
    pub depth_min: f64,
    #[serde(default = "default_depth_max")]
    pub depth_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsFile>,
}

fn config_err(what: &str, e: psdet_core::Error) -> PipelineError {
    PipelineError::Config(format!("{what}: {e}"))
}

impl SceneFile {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "demo" => Ok(Self::demo()),
            "room" => Ok(Self::room()),
            other => Err(PipelineError::Config(format!("unknown preset `{other}` (expected demo or room)"))),
        }
    }

    /// Same scene as [`psdet_core::scenesim::demo_scene`].
    pub fn demo() -> Self {
        Self {
            objects: vec![
                object([-0.9, -0.5, 0.4], [0.5, 0.5, 0.8], 0.0, 0),
                object([0.6, 0.4, 0.375], [1.2, 0.7, 0.75], 0.0, 1),
                object([-0.2, 1.1, 0.25], [0.6, 0.4, 0.5], 0.0, 2),
            ],
            cameras: CamerasFile::Trajectory(TrajectoryCameras {
                trajectory: Trajectory::Orbit {
                    radius: 3.2,
                    height: 1.6,
                    steps: 20,
                    look_at: [0.0, 0.2, 0.4],
                },
                fx: 130.0,
                fy: 130.0,
                cx: 79.5,
                cy: 59.5,
                width: 160,
                height: 120,
            }),
            rng_seed: 7,
            depth_noise_sigma: 0.0,
            outlier_rate: 0.0,
            depth_min: 0.1,
            depth_max: 8.0,
            bounds: None,
        }
    }

    /// Same scene as [`psdet_core::scenesim::room_scene`].
    pub fn room() -> Self {
        Self {
            objects: vec![
                object([-2.5, -2.0, 0.45], [0.5, 0.5, 0.9], 0.3, 0),
                object([-1.0, -2.2, 0.45], [0.5, 0.5, 0.9], -0.2, 0),
                object([0.5, 0.0, 0.375], [1.6, 0.9, 0.75], 0.0, 1),
                object([2.6, 1.5, 1.0], [0.6, 1.8, 2.0], 0.5, 3),
                object([-2.0, 2.2, 0.25], [0.8, 0.5, 0.5], 1.0, 2),
                object([1.8, -2.4, 0.4], [1.2, 0.6, 0.8], -0.7, 4),
            ],
            cameras: CamerasFile::Trajectory(TrajectoryCameras {
                trajectory: Trajectory::Orbit {
                    radius: 3.0,
                    height: 1.7,
                    steps: 30,
                    look_at: [0.0, 0.0, 0.6],
                },
                fx: 260.0,
                fy: 260.0,
                cx: 159.5,
                cy: 119.5,
                width: 320,
                height: 240,
            }),
            rng_seed: 11,
            depth_noise_sigma: 0.0,
            outlier_rate: 0.0,
            depth_min: 0.1,
            depth_max: 12.0,
            bounds: Some(BoundsFile {
                min: [-4.0, -4.0, 0.0],
                max: [4.0, 4.0, 3.0],
            }),
        }
    }

    pub fn to_spec(&self) -> Result<SceneSpec> {
        let objects = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let b = OrientedBox::new(Vec3::from(o.center), Vec3::from(o.size), o.yaw, o.category, 1.0)
                    .map_err(|e| config_err(&format!("object {i}"), e))?;
                Ok(SceneObject::from_box(b, o.albedo.unwrap_or_else(|| palette_albedo(i))))
            })
            .collect::<Result<Vec<_>>>()?;

        let cameras = match &self.cameras {
            CamerasFile::List(list) => list
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let k = Intrinsics::new(c.fx, c.fy, c.cx, c.cy, c.width, c.height)
                        .map_err(|e| config_err(&format!("camera {i}"), e))?;
                    let pose = Pose::new(Mat3::from_row_slice(&c.rotation), Vec3::from(c.translation))
                        .map_err(|e| config_err(&format!("camera {i}"), e))?;
                    Ok(CameraSpec { intrinsics: k, pose })
                })
                .collect::<Result<Vec<_>>>()?,
            CamerasFile::Trajectory(t) => {
                let k = Intrinsics::new(t.fx, t.fy, t.cx, t.cy, t.width, t.height)
                    .map_err(|e| config_err("trajectory intrinsics", e))?;
                let Trajectory::Orbit { radius, height, steps, look_at } = t.trajectory;
                orbit_poses(Vec3::from(look_at), radius, height, steps)
                    .map_err(|e| config_err("trajectory", e))?
                    .into_iter()
                    .map(|pose| CameraSpec { intrinsics: k, pose })
                    .collect()
            }
        };

        let spec = SceneSpec {
            objects,
            cameras,
            rng_seed: self.rng_seed,
            depth_noise_sigma: self.depth_noise_sigma,
            outlier_rate: self.outlier_rate,
            depth_min: self.depth_min,
            depth_max: self.depth_max,
            bounds: self.bounds.map(|b| Aabb::new(Vec3::from(b.min), Vec3::from(b.max))),
        };
        spec.validate().map_err(|e| config_err("scene", e))?;
        Ok(spec)
    }
}

fn object(center: [f64; 3], size: [f64; 3], yaw: f64, category: u32) -> ObjectFile {
    ObjectFile { center, size, yaw, category, albedo: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use psdet_core::scenesim::{demo_scene, room_scene};

    #[test]
    fn presets_match_core() {
        assert_eq!(SceneFile::demo().to_spec().unwrap(), demo_scene());
        assert_eq!(SceneFile::room().to_spec().unwrap(), room_scene());
        assert!(SceneFile::preset("attic").is_err());
    }

    #[test]
    fn json_round_trip() {
        for s in [SceneFile::demo(), SceneFile::room()] {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<SceneFile>(&text).unwrap(), s);
        }
    }

    #[test]
    fn explicit_cameras() {
        let text = r#"{
            "objects": [{"center": [0, 0, 3], "size": [1, 1, 1], "category": 0}],
            "cameras": [{"fx": 100, "fy": 100, "cx": 50, "cy": 50, "width": 100, "height": 100,
                         "rotation": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 0, 0]}]
        }"#;
        let spec = serde_json::from_str::<SceneFile>(text).unwrap().to_spec().unwrap();
        assert_eq!(spec.cameras.len(), 1);
        assert_eq!(spec.cameras[0].pose, Pose::identity());
        assert_eq!(spec.depth_max, 8.0);

        let bad = text.replace("[1, 0, 0, 0, 1, 0, 0, 0, 1]", "[2, 0, 0, 0, 1, 0, 0, 0, 1]");
        let err = serde_json::from_str::<SceneFile>(&bad).unwrap().to_spec().unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
