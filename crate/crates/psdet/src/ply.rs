//! ASCII PLY for scattered clouds and plain point sets.
//!
//! Scattered clouds carry per-vertex `frame`, `category`, `score`, `u` and
//! `v` properties after the coordinates. Floats are written in shortest
//! round-trip form, so reading a written file restores positions exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use psdet_core::scatter::{ScatterCloud, ScatterPoint};
use psdet_core::Vec3;

use crate::error::{PipelineError, Result};

const CLOUD_PROPERTIES: [(&str, &str); 8] = [
    ("double", "x"),
    ("double", "y"),
    ("double", "z"),
    ("uint", "frame"),
    ("uint", "category"),
    ("double", "score"),
    ("uint", "u"),
    ("uint", "v"),
];

fn header(out: &mut String, comment: &str, count: usize, properties: &[(&str, &str)]) {
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "comment {comment}");
    let _ = writeln!(out, "element vertex {count}");
    for (ty, name) in properties {
        let _ = writeln!(out, "property {ty} {name}");
    }
    out.push_str("end_header\n");
}

pub fn cloud_to_string(cloud: &ScatterCloud) -> String {
    let mut out = String::with_capacity(64 * cloud.len() + 256);
    header(&mut out, "psdet scatter cloud", cloud.len(), &CLOUD_PROPERTIES);
    for (p, s) in cloud.points.iter().zip(&cloud.scores) {
        let q = p.position;
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            q.x, q.y, q.z, p.source_frame, p.category, s, p.source_pixel.0, p.source_pixel.1
        );
    }
    out
}

pub fn points_to_string(points: &[Vec3], comment: &str) -> String {
    let mut out = String::with_capacity(48 * points.len() + 128);
    header(&mut out, comment, points.len(), &CLOUD_PROPERTIES[..3]);
    for q in points {
        let _ = writeln!(out, "{} {} {}", q.x, q.y, q.z);
    }
    out
}

pub fn write_cloud(path: &Path, cloud: &ScatterCloud) -> Result<()> {
    fs::write(path, cloud_to_string(cloud)).map_err(PipelineError::io(path))
}

pub fn write_points(path: &Path, points: &[Vec3], comment: &str) -> Result<()> {
    fs::write(path, points_to_string(points, comment)).map_err(PipelineError::io(path))
}

/// Parses a cloud written by [`cloud_to_string`]. Files with only `x y z`
/// load with zero frame, category and pixel and a score of 1. Features are
/// left empty.
pub fn parse_cloud(text: &str) -> std::result::Result<ScatterCloud, String> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err("missing `ply` magic".into());
    }
    let mut count = None;
    let mut names = Vec::new();
    loop {
        let line = lines.next().ok_or("unterminated header")?.trim();
        let mut words = line.split_whitespace();
        match words.next() {
            Some("format") if words.next() != Some("ascii") => return Err("only ascii PLY is supported".into()),
            Some("element") => {
                if words.next() != Some("vertex") {
                    return Err(format!("unsupported element in `{line}`"));
                }
                count = Some(words.next().and_then(|c| c.parse::<usize>().ok()).ok_or("bad vertex count")?);
            }
            Some("property") => names.push(words.last().ok_or("bad property line")?.to_owned()),
            Some("end_header") => break,
            _ => {}
        }
    }
    let count = count.ok_or("no vertex element")?;
    let column = |name: &str| names.iter().position(|n| n == name);
    let (x, y, z) = match (column("x"), column("y"), column("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err("x, y, z properties are required".into()),
    };
    let (frame, category, score, u, v) = (column("frame"), column("category"), column("score"), column("u"), column("v"));

    let mut cloud = ScatterCloud::new();
    for row in 0..count {
        let line = lines.next().ok_or_else(|| format!("expected {count} vertices, found {row}"))?;
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != names.len() {
            return Err(format!("vertex {row}: expected {} values", names.len()));
        }
        let float = |i: usize| values[i].parse::<f64>().map_err(|e| format!("vertex {row}: {e}"));
        let uint = |i: Option<usize>| i.map_or(Ok(0), |i| values[i].parse::<u32>().map_err(|e| format!("vertex {row}: {e}")));
        cloud.push(ScatterPoint {
            position: Vec3::new(float(x)?, float(y)?, float(z)?),
            source_frame: uint(frame)?,
            source_pixel: (uint(u)?, uint(v)?),
            category: uint(category)?,
        });
        if let Some(s) = score {
            *cloud.scores.last_mut().expect("just pushed") = float(s)?;
        }
    }
    Ok(cloud)
}

pub fn read_cloud(path: &Path) -> Result<ScatterCloud> {
    let text = fs::read_to_string(path).map_err(PipelineError::io(path))?;
    parse_cloud(&text).map_err(|message| PipelineError::Format { path: path.to_path_buf(), message })
}
