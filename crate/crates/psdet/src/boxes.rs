//! Detection files: a JSON list of `{center, size, yaw, category, score}`.

use std::path::Path;

use psdet_core::obb::OrientedBox;
use psdet_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::jsonio::{read_json, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRecord {
    pub center: [f64; 3],
    pub size: [f64; 3],
    pub yaw: f64,
    pub category: u32,
    #[serde(default = "unit_score")]
    pub score: f64,
}

fn unit_score() -> f64 {
    1.0
}

impl From<&OrientedBox> for BoxRecord {
    fn from(b: &OrientedBox) -> Self {
        Self {
            center: b.center.into(),
            size: b.size.into(),
            yaw: b.yaw,
            category: b.category,
            score: b.score,
        }
    }
}

impl BoxRecord {
    pub fn to_box(&self) -> psdet_core::Result<OrientedBox> {
        OrientedBox::new(Vec3::from(self.center), Vec3::from(self.size), self.yaw, self.category, self.score)
    }
}

pub fn to_records(boxes: &[OrientedBox]) -> Vec<BoxRecord> {
    boxes.iter().map(BoxRecord::from).collect()
}

pub fn read_boxes(path: &Path) -> Result<Vec<OrientedBox>> {
    let records: Vec<BoxRecord> = read_json(path)?;
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.to_box().map_err(|e| PipelineError::Format {
                path: path.to_path_buf(),
                message: format!("box {i}: {e}"),
            })
        })
        .collect()
}

pub fn write_boxes(path: &Path, boxes: &[OrientedBox]) -> Result<()> {
    write_json(path, &to_records(boxes))
}
