//! Stand-in detectors that let NMS and evaluation run end to end without a
//! learned head.

use std::collections::BTreeMap;

use psdet_core::geometry::Aabb;
use psdet_core::obb::OrientedBox;
use psdet_core::scatter::ScatterCloud;
use psdet_core::spatial::RadiusGrid;
use psdet_core::{Result, Vec3};

use crate::config::{DetectorConfig, DetectorMode};

/// Ground-truth boxes with score 1.
pub fn gt_passthrough(gts: &[OrientedBox]) -> Vec<OrientedBox> {
    gts.iter().map(|b| OrientedBox { score: 1.0, ..*b }).collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Components linking points closer than `eps` (inclusive), each as a list
/// of ascending indices; components are ordered by their smallest index.
pub fn connected_components(points: &[Vec3], eps: f64) -> Result<Vec<Vec<usize>>> {
    let mut grid = RadiusGrid::new(eps)?;
    points.iter().for_each(|p| {
        grid.insert(*p);
    });
    let mut parent: Vec<usize> = (0..points.len()).collect();
    let mut near = Vec::new();
    for (i, p) in points.iter().enumerate() {
        near.clear();
        grid.neighbors_within(p, eps, &mut near);
        for &j in &near {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    Ok(groups.into_values().collect())
}

/// One axis-aligned box per cluster: the cluster's bounding box, its
/// majority category (ties to the lower id) and its mean surface score.
pub fn score_cluster(cloud: &ScatterCloud, eps: f64, min_points: usize) -> Result<Vec<OrientedBox>> {
    let positions = cloud.positions();
    let mut boxes = Vec::new();
    for members in connected_components(&positions, eps)? {
        if members.len() < min_points.max(1) {
            continue;
        }
        let aabb = Aabb::from_points(members.iter().map(|&i| &positions[i]));
        let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
        for &i in &members {
            *votes.entry(cloud.points[i].category).or_default() += 1;
        }
        let category = votes
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(c, _)| *c)
            .expect("cluster is non-empty");
        let score = members.iter().map(|&i| cloud.scores[i]).sum::<f64>() / members.len() as f64;
        // flat clusters still need a positive extent
        let size = aabb.extent().map(|e| e.max(1e-3));
        boxes.push(OrientedBox::new(aabb.center(), size, 0.0, category, score)?);
    }
    Ok(boxes)
}

pub fn detect(config: &DetectorConfig, cloud: &ScatterCloud, gts: &[OrientedBox]) -> Result<Vec<OrientedBox>> {
    match config.mode {
        DetectorMode::GtPassthrough => Ok(gt_passthrough(gts)),
        DetectorMode::ScoreCluster => score_cluster(cloud, config.cluster_eps, config.min_cluster_points),
    }
}
