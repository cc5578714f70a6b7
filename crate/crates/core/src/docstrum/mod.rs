//! Bottom-up page segmentation from connected-component centroids.
//!
//! The pipeline binarizes with Otsu, labels components, links each centroid
//! to its K nearest neighbours and reads skew and spacings off the edge
//! statistics. Components are then chained into lines and lines into blocks.
//! Skew is removed by rotating centroid coordinates; pixels are never
//! resampled.

pub mod grouping;
pub mod knn;
pub mod spacing;

use serde::{Deserialize, Serialize};

pub use grouping::{build_blocks, build_lines, rotate_point, Block, Line};
pub use knn::{build_knn_graph, ComponentGraph, Edge};
pub use spacing::{estimate_skew, estimate_spacings, SpacingEstimates, SpacingFailure};

use crate::error::{Error, Result};
use crate::geom::BBox;
use crate::manifest::LabeledRegion;
use crate::raster::{binarize, connected_components, otsu_threshold, Component, Connectivity, GrayImage};
use crate::FOREGROUND;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DocstrumParams {
    pub k: usize,
    pub min_pixels: usize,
    pub hist_bin_px: f64,
    pub smooth_window_bins: usize,
    pub angle_tol_deg: f64,
    pub word_tol: f64,
    pub line_merge_parallel_tol: f64,
    pub line_merge_perp_tol: f64,
    pub min_overlap_frac: f64,
}

impl Default for DocstrumParams {
    fn default() -> Self {
        DocstrumParams {
            k: 5,
            min_pixels: 3,
            hist_bin_px: 2.0,
            smooth_window_bins: 5,
            angle_tol_deg: 20.0,
            word_tol: 1.3,
            line_merge_parallel_tol: 1.5,
            line_merge_perp_tol: 1.3,
            min_overlap_frac: 0.0,
        }
    }
}

impl DocstrumParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("docstrum: {what}")));
        if self.k == 0 {
            return bad("k must be positive");
        }
        if self.min_pixels == 0 {
            return bad("min_pixels must be positive");
        }
        if self.smooth_window_bins == 0 || self.smooth_window_bins % 2 == 0 {
            return bad("smooth_window_bins must be a positive odd integer");
        }
        for (name, v) in [
            ("hist_bin_px", self.hist_bin_px),
            ("angle_tol_deg", self.angle_tol_deg),
            ("word_tol", self.word_tol),
            ("line_merge_parallel_tol", self.line_merge_parallel_tol),
            ("line_merge_perp_tol", self.line_merge_perp_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.min_overlap_frac) {
            return bad("min_overlap_frac must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Everything the pipeline computed for one page.
#[derive(Clone, Debug)]
pub struct Segmentation {
    pub graph: ComponentGraph,
    pub spacings: std::result::Result<SpacingEstimates, SpacingFailure>,
    pub lines: Vec<Line>,
    pub blocks: Vec<BBox>,
}

/// Groups components into blocks. `center` is the rotation centre used for
/// deskewing, normally the page centre.
pub fn segment_components(components: Vec<Component>, center: (f64, f64), params: &DocstrumParams) -> Segmentation {
    let graph = build_knn_graph(components, params.k);
    if graph.is_empty() {
        let blocks = graph.components.iter().map(|c| c.bbox).collect();
        return Segmentation {
            graph,
            spacings: Err(SpacingFailure::NoHorizontalEdges),
            lines: Vec::new(),
            blocks,
        };
    }
    let skew = estimate_skew(&graph, params);
    let spacings = estimate_spacings(&graph, skew, params);
    let (lines, blocks) = match &spacings {
        Ok(sp) => {
            let deskewed = grouping::deskewed_centroids(&graph, center, skew);
            let lines = build_lines(&graph, &deskewed, sp, params);
            let blocks = merge_overlapping(build_blocks(&lines, sp, params).into_iter().map(|b| b.bbox).collect());
            (lines, blocks)
        }
        Err(e) => {
            log::warn!("docstrum: {e}; emitting one box per component");
            let mut boxes: Vec<BBox> = graph.components.iter().map(|c| c.bbox).collect();
            boxes.sort_by_key(|b| (b.y, b.x, b.w, b.h));
            (Vec::new(), boxes)
        }
    };
    Segmentation {
        graph,
        spacings,
        lines,
        blocks,
    }
}

/// Unions intersecting boxes until none intersect, so every component ends
/// up inside exactly one block.
fn merge_overlapping(mut boxes: Vec<BBox>) -> Vec<BBox> {
    loop {
        let mut merged = false;
        let mut i = 0;
        while i < boxes.len() {
            let mut j = i + 1;
            while j < boxes.len() {
                if boxes[i].intersection_area(&boxes[j]) > 0 {
                    let b = boxes.swap_remove(j);
                    boxes[i] = boxes[i].union(&b);
                    merged = true;
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
        if !merged {
            break;
        }
    }
    boxes.sort_by_key(|b| (b.y, b.x, b.w, b.h));
    boxes
}

/// Runs the full pipeline on a grayscale page.
pub fn segment_image(img: &GrayImage, params: &DocstrumParams) -> Segmentation {
    let mask = binarize(img, otsu_threshold(img));
    let components = connected_components(&mask, Connectivity::Eight, params.min_pixels);
    let center = (img.width() as f64 / 2.0, img.height() as f64 / 2.0);
    segment_components(components, center, params)
}

/// Foreground blocks of a page as class-agnostic detections with score 1.
pub fn docstrum(img: &GrayImage, params: &DocstrumParams) -> Vec<LabeledRegion> {
    segment_image(img, params)
        .blocks
        .into_iter()
        .map(|b| LabeledRegion::detection(b, FOREGROUND, 1.0))
        .collect()
}
