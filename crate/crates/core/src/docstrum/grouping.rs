//! Component to line to block grouping in the deskewed frame.

use super::knn::ComponentGraph;
use super::spacing::{is_near_horizontal, SpacingEstimates};
use super::DocstrumParams;
use crate::geom::BBox;

/// Rotates `p` by `deg` degrees about `center` (image axes, y down).
pub fn rotate_point(p: (f64, f64), center: (f64, f64), deg: f64) -> (f64, f64) {
    let (s, c) = deg.to_radians().sin_cos();
    let (dx, dy) = (p.0 - center.0, p.1 - center.1);
    (center.0 + dx * c - dy * s, center.1 + dx * s + dy * c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    /// Component indices ordered by deskewed x.
    pub members: Vec<usize>,
    pub bbox: BBox,
    /// Mean deskewed centroid.
    pub centroid: (f64, f64),
    /// Deskewed horizontal extent `[x0, x1]`.
    pub extent: (f64, f64),
    /// Least-squares direction of the member centroids in degrees.
    pub angle_deg: f64,
}

impl Line {
    fn length(&self) -> f64 {
        self.extent.1 - self.extent.0
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }

    /// Groups in order of their smallest member.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

fn fit_angle(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    (sxy / sxx).atan().to_degrees()
}

/// Deskewed centroid of every component.
pub fn deskewed_centroids(graph: &ComponentGraph, center: (f64, f64), skew_deg: f64) -> Vec<(f64, f64)> {
    graph
        .components
        .iter()
        .map(|c| rotate_point(c.centroid, center, -skew_deg))
        .collect()
}

/// Links components joined by a near-horizontal edge no longer than
/// `word_tol * word_spacing`; each connected group is one line.
pub fn build_lines(
    graph: &ComponentGraph,
    deskewed: &[(f64, f64)],
    spacings: &SpacingEstimates,
    params: &DocstrumParams,
) -> Vec<Line> {
    let n = graph.components.len();
    let limit = params.word_tol * spacings.word_spacing;
    let mut uf = UnionFind::new(n);
    for (i, e) in graph.edges() {
        if e.distance <= limit && is_near_horizontal(e.angle, spacings.skew_deg, params.angle_tol_deg) {
            uf.union(i, e.target);
        }
    }
    let mut lines: Vec<Line> = uf
        .groups()
        .into_iter()
        .map(|mut members| {
            members.sort_by(|&a, &b| deskewed[a].0.total_cmp(&deskewed[b].0).then(a.cmp(&b)));
            let pts: Vec<(f64, f64)> = members.iter().map(|&m| deskewed[m]).collect();
            let bbox = members
                .iter()
                .map(|&m| graph.components[m].bbox)
                .reduce(|a, b| a.union(&b))
                .expect("groups are non-empty");
            let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
            for &m in &members {
                let half = graph.components[m].bbox.w as f64 / 2.0;
                x0 = x0.min(deskewed[m].0 - half);
                x1 = x1.max(deskewed[m].0 + half);
            }
            let k = pts.len() as f64;
            Line {
                centroid: (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k),
                extent: (x0, x1),
                angle_deg: fit_angle(&pts),
                bbox,
                members,
            }
        })
        .collect();
    lines.sort_by(|a, b| {
        a.centroid
            .1
            .total_cmp(&b.centroid.1)
            .then(a.centroid.0.total_cmp(&b.centroid.0))
    });
    lines
}

/// A text block: its member lines (indices into the input) and bbox.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub lines: Vec<usize>,
    pub bbox: BBox,
}

fn should_merge(a: &Line, b: &Line, spacings: &SpacingEstimates, params: &DocstrumParams) -> bool {
    let perp = (a.centroid.1 - b.centroid.1).abs();
    if perp > params.line_merge_perp_tol * spacings.line_spacing {
        return false;
    }
    let overlap = a.extent.1.min(b.extent.1) - a.extent.0.max(b.extent.0);
    let gap = (-overlap).max(0.0);
    if gap > params.line_merge_parallel_tol * spacings.line_spacing {
        return false;
    }
    let shorter = a.length().min(b.length());
    let frac = if shorter > 0.0 { overlap.max(0.0) / shorter } else { 0.0 };
    if frac < params.min_overlap_frac {
        return false;
    }
    (a.angle_deg - b.angle_deg).abs() <= params.angle_tol_deg
}

/// Merges lines into blocks by transitive closure of the pairwise merge test.
/// Output is sorted by `(bbox.y, bbox.x)`.
pub fn build_blocks(lines: &[Line], spacings: &SpacingEstimates, params: &DocstrumParams) -> Vec<Block> {
    let mut uf = UnionFind::new(lines.len());
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            // lines are sorted by deskewed y, so later ones only get farther
            if lines[j].centroid.1 - lines[i].centroid.1 > params.line_merge_perp_tol * spacings.line_spacing {
                break;
            }
            if should_merge(&lines[i], &lines[j], spacings, params) {
                uf.union(i, j);
            }
        }
    }
    let mut blocks: Vec<Block> = uf
        .groups()
        .into_iter()
        .map(|members| Block {
            bbox: members
                .iter()
                .map(|&l| lines[l].bbox)
                .reduce(|a, b| a.union(&b))
                .expect("groups are non-empty"),
            lines: members,
        })
        .collect();
    blocks.sort_by_key(|b| (b.bbox.y, b.bbox.x, b.bbox.w, b.bbox.h));
    blocks
}
