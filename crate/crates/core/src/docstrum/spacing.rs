//! Skew and spacing estimation from K-NN edge statistics.

use serde::{Deserialize, Serialize};

use super::knn::{fold_angle, ComponentGraph};
use super::DocstrumParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingEstimates {
    pub skew_deg: f64,
    pub char_spacing: f64,
    pub word_spacing: f64,
    pub line_spacing: f64,
}

impl SpacingEstimates {
    /// `char <= word` and `char <= line`.
    ///
    /// Word spacing is not required to stay below line spacing: line linking
    /// only follows near-horizontal edges, and the fallback word estimate
    /// routinely exceeds the line pitch on dense pages.
    pub fn is_consistent(&self) -> bool {
        self.char_spacing > 0.0 && self.char_spacing <= self.word_spacing && self.char_spacing <= self.line_spacing
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SpacingFailure {
    #[error("no near-horizontal edges")]
    NoHorizontalEdges,
    #[error("no near-vertical edges")]
    NoVerticalEdges,
    #[error("inconsistent spacing estimates")]
    Inconsistent,
}

/// Centered moving average with zero padding; `circular` wraps instead.
pub fn smooth(hist: &[f64], window: usize, circular: bool) -> Vec<f64> {
    let half = (window / 2) as i64;
    let n = hist.len() as i64;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in i - half..=i + half {
                if circular {
                    acc += hist[j.rem_euclid(n) as usize];
                } else if (0..n).contains(&j) {
                    acc += hist[j as usize];
                }
            }
            acc / window as f64
        })
        .collect()
}

/// Local maxima of `values` as `(first, last)` bin ranges.
///
/// A flat run counts as one peak when both neighbouring values are strictly
/// lower (the array ends count as lower). Zero-valued runs are ignored.
pub fn local_maxima(values: &[f64]) -> Vec<(usize, usize)> {
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[i] {
            j += 1;
        }
        let left_lower = i == 0 || values[i - 1] < values[i];
        let right_lower = j + 1 == values.len() || values[j + 1] < values[i];
        if values[i] > 0.0 && left_lower && right_lower {
            peaks.push((i, j));
        }
        i = j + 1;
    }
    peaks
}

/// Distance histogram with bins centred on multiples of `bin_px`.
struct DistanceHistogram {
    bin_px: f64,
    raw: Vec<f64>,
    smoothed: Vec<f64>,
    window: usize,
}

impl DistanceHistogram {
    fn new(distances: &[f64], bin_px: f64, window: usize) -> Self {
        let max = distances.iter().copied().fold(0.0, f64::max);
        let bins = (max / bin_px).round() as usize + 1;
        let mut raw = vec![0.0; bins];
        for &d in distances {
            raw[(d / bin_px).round() as usize] += 1.0;
        }
        let smoothed = smooth(&raw, window, false);
        DistanceHistogram {
            bin_px,
            raw,
            smoothed,
            window,
        }
    }

    /// Peak positions in pixels, in increasing order.
    ///
    /// Peaks are located on the smoothed histogram; each position is the
    /// centre of the tallest raw bin (first on ties) inside the smoothing
    /// window around the smoothed peak.
    fn peaks(&self) -> Vec<f64> {
        let half = self.window / 2;
        let mut out: Vec<f64> = local_maxima(&self.smoothed)
            .into_iter()
            .map(|(lo, hi)| {
                let start = lo.saturating_sub(half);
                let end = (hi + half).min(self.raw.len() - 1);
                let mut best = start;
                for b in start..=end {
                    if self.raw[b] > self.raw[best] {
                        best = b;
                    }
                }
                best as f64 * self.bin_px
            })
            .collect();
        out.dedup();
        out
    }
}

/// Mode of the edge-angle histogram, refined to the mean angle of edges
/// within the smoothing window of the mode bin.
pub fn estimate_skew(graph: &ComponentGraph, params: &DocstrumParams) -> f64 {
    let angles: Vec<f64> = graph.edges().map(|(_, e)| e.angle).collect();
    if angles.is_empty() {
        return 0.0;
    }
    let mut hist = vec![0.0; 180];
    for &a in &angles {
        hist[(a.round() as i64 + 90).rem_euclid(180) as usize] += 1.0;
    }
    let smoothed = smooth(&hist, params.smooth_window_bins, true);
    let mut mode = 0;
    for (i, &v) in smoothed.iter().enumerate() {
        if v > smoothed[mode] {
            mode = i;
        }
    }
    let center = mode as f64 - 90.0;
    let reach = (params.smooth_window_bins / 2) as f64 + 0.5;
    let (mut sum, mut n) = (0.0, 0usize);
    for &a in &angles {
        let d = fold_angle(a - center);
        if d.abs() <= reach {
            sum += d;
            n += 1;
        }
    }
    if n == 0 {
        fold_angle(center)
    } else {
        fold_angle(center + sum / n as f64)
    }
}

pub fn is_near_horizontal(angle: f64, skew: f64, tol: f64) -> bool {
    fold_angle(angle - skew).abs() <= tol
}

pub fn is_near_vertical(angle: f64, skew: f64, tol: f64) -> bool {
    fold_angle(angle - skew - 90.0).abs() <= tol
}

pub fn estimate_spacings(
    graph: &ComponentGraph,
    skew_deg: f64,
    params: &DocstrumParams,
) -> Result<SpacingEstimates, SpacingFailure> {
    let mut horizontal = Vec::new();
    let mut vertical = Vec::new();
    for (_, e) in graph.edges() {
        if is_near_horizontal(e.angle, skew_deg, params.angle_tol_deg) {
            horizontal.push(e.distance);
        } else if is_near_vertical(e.angle, skew_deg, params.angle_tol_deg) {
            vertical.push(e.distance);
        }
    }
    if horizontal.is_empty() {
        return Err(SpacingFailure::NoHorizontalEdges);
    }
    if vertical.is_empty() {
        return Err(SpacingFailure::NoVerticalEdges);
    }
    let h_peaks = DistanceHistogram::new(&horizontal, params.hist_bin_px, params.smooth_window_bins).peaks();
    let v_peaks = DistanceHistogram::new(&vertical, params.hist_bin_px, params.smooth_window_bins).peaks();
    let (Some(&char_spacing), Some(&line_spacing)) = (h_peaks.first(), v_peaks.first()) else {
        return Err(SpacingFailure::Inconsistent);
    };
    let word_spacing = h_peaks
        .iter()
        .copied()
        .find(|&p| p > char_spacing)
        .unwrap_or(params.word_tol * char_spacing * 2.0);
    let est = SpacingEstimates {
        skew_deg,
        char_spacing,
        word_spacing,
        line_spacing,
    };
    if est.is_consistent() {
        Ok(est)
    } else {
        Err(SpacingFailure::Inconsistent)
    }
}
