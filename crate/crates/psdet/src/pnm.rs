//! Depth and color map export as binary PGM/PPM.

use std::fs;
use std::path::Path;

use psdet_core::image::{DepthMap, FeatureMap};

use crate::error::{PipelineError, Result};

fn write_pnm(path: &Path, magic: &str, width: usize, height: usize, maxval: u16, body: &[u8]) -> Result<()> {
    let mut bytes = format!("{magic}\n{width} {height}\n{maxval}\n").into_bytes();
    bytes.extend_from_slice(body);
    fs::write(path, bytes).map_err(PipelineError::io(path))
}

/// 16-bit big-endian PGM with depth in millimeters; invalid pixels are 0.
pub fn write_depth_pgm(path: &Path, depth: &DepthMap) -> Result<()> {
    let body: Vec<u8> = depth
        .as_slice()
        .iter()
        .flat_map(|d| ((d * 1000.0).round().clamp(0.0, u16::MAX as f64) as u16).to_be_bytes())
        .collect();
    write_pnm(path, "P5", depth.width(), depth.height(), u16::MAX, &body)
}

/// 8-bit PPM from the first three channels, values clamped to [0, 1].
pub fn write_color_ppm(path: &Path, color: &FeatureMap) -> Result<()> {
    let mut body = Vec::with_capacity(color.width() * color.height() * 3);
    for v in 0..color.height() {
        for u in 0..color.width() {
            let t = color.texel(u, v);
            body.extend((0..3).map(|c| (t.get(c).copied().unwrap_or(0.0).clamp(0.0, 1.0) * 255.0).round() as u8));
        }
    }
    write_pnm(path, "P6", color.width(), color.height(), 255, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut d = DepthMap::new(4, 3);
        d.set(1, 1, 2.5);
        let p = dir.path().join("d.pgm");
        write_depth_pgm(&p, &d).unwrap();
        let bytes = fs::read(&p).unwrap();
        let header = b"P5\n4 3\n65535\n";
        assert!(bytes.starts_with(header));
        assert_eq!(bytes.len(), header.len() + 4 * 3 * 2);
        let at = header.len() + 2 * (4 + 1);
        assert_eq!(u16::from_be_bytes([bytes[at], bytes[at + 1]]), 2500);

        let mut c = FeatureMap::new(2, 1, 3);
        c.texel_mut(1, 0).copy_from_slice(&[1.0, 0.5, 2.0]);
        let p = dir.path().join("c.ppm");
        write_color_ppm(&p, &c).unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"P6\n2 1\n255\n\0\0\0\xff\x80\xff");
    }
}
