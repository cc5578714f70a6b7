//! Greedy one-to-one matching of predictions to ground truth.

use crate::geom::iou;
use crate::manifest::LabeledRegion;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchResult {
    /// `(pred index, gt index, iou)` in match order.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_preds: Vec<usize>,
    pub unmatched_gts: Vec<usize>,
}

impl MatchResult {
    pub fn tp(&self) -> usize {
        self.pairs.len()
    }
}

/// Prediction visiting order: descending score, then input order. Missing
/// scores sort as 0.
pub fn score_order(preds: &[LabeledRegion]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (preds[a].score.unwrap_or(0.0), preds[b].score.unwrap_or(0.0));
        sb.total_cmp(&sa).then(a.cmp(&b))
    });
    order
}

/// Each prediction, in score order, takes the still-unmatched ground-truth
/// box of highest IoU provided that IoU is at least `iou_thresh` (first GT
/// wins ties). With `class_aware` the labels must also agree.
pub fn match_regions(
    preds: &[LabeledRegion],
    gts: &[LabeledRegion],
    iou_thresh: f64,
    class_aware: bool,
) -> MatchResult {
    let mut gt_taken = vec![false; gts.len()];
    let mut pred_taken = vec![false; preds.len()];
    let mut pairs = Vec::new();
    for p in score_order(preds) {
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if gt_taken[g] || (class_aware && gt.label != preds[p].label) {
                continue;
            }
            let v = iou(&preds[p].bbox, &gt.bbox);
            if v >= iou_thresh && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        if let Some((g, v)) = best {
            gt_taken[g] = true;
            pred_taken[p] = true;
            pairs.push((p, g, v));
        }
    }
    MatchResult {
        pairs,
        unmatched_preds: (0..preds.len()).filter(|&i| !pred_taken[i]).collect(),
        unmatched_gts: (0..gts.len()).filter(|&i| !gt_taken[i]).collect(),
    }
}
