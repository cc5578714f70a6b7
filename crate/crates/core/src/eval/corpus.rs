//! Corpus-level evaluation of a detection file against a manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matching::match_regions;
use super::metrics::{class_counts, ratio, Counts, Metrics};
use crate::error::{Error, Result};
use crate::manifest::{DetectionSet, LabeledRegion, Manifest, Split};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Class-agnostic matching against every ground-truth region.
    Foreground,
    /// Class-aware matching.
    End2end,
    /// Label accuracy on detections that are ground-truth boxes.
    ClassifierOnly,
}

impl EvalMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "foreground" => Some(EvalMode::Foreground),
            "end2end" => Some(EvalMode::End2end),
            "classifier_only" => Some(EvalMode::ClassifierOnly),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EvalMode::Foreground => "foreground",
            EvalMode::End2end => "end2end",
            EvalMode::ClassifierOnly => "classifier_only",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub iou_thresh: f64,
    pub docs: usize,
    pub metrics: Metrics,
    /// Fraction of ground-truth regions given the right label
    /// (classifier-only mode).
    pub accuracy: Option<f64>,
}

/// Counts for one document.
fn doc_counts(
    preds: &[LabeledRegion],
    gts: &[LabeledRegion],
    mode: EvalMode,
    iou_thresh: f64,
) -> (Counts, BTreeMap<String, Counts>) {
    let m = match_regions(preds, gts, iou_thresh, mode == EvalMode::End2end);
    let (total, per) = class_counts(&m, preds, gts);
    match mode {
        EvalMode::ClassifierOnly => {
            // a matched box scores only when its label is right
            let correct = per.values().map(|c| c.tp).sum::<usize>();
            let total = Counts {
                tp: correct,
                fp: preds.len() - correct,
                fn_: gts.len() - correct,
            };
            (total, per)
        }
        _ => (total, per),
    }
}

/// Scores `detections` against the test split of `manifest` (every document
/// when the manifest has no split). Counts are pooled over documents before
/// computing metrics; test documents without an entry contribute only
/// false negatives.
pub fn evaluate_corpus(
    manifest: &Manifest,
    detections: &DetectionSet,
    mode: EvalMode,
    iou_thresh: f64,
) -> Result<EvalReport> {
    if !(iou_thresh > 0.0 && iou_thresh <= 1.0) {
        return Err(Error::Argument(format!("IoU threshold {iou_thresh} is outside (0, 1]")));
    }
    let test_docs = manifest.docs_in(Split::Test);
    let test_ids: BTreeSet<&str> = test_docs.iter().map(|d| d.doc_id.as_str()).collect();
    for det in &detections.docs {
        if manifest.doc(&det.doc_id).is_none() {
            return Err(Error::Eval(format!("detections reference unknown doc_id {:?}", det.doc_id)));
        }
        if !test_ids.contains(det.doc_id.as_str()) {
            return Err(Error::Eval(format!(
                "detections include training document {:?}; only test documents may be evaluated",
                det.doc_id
            )));
        }
    }
    let per_doc: Vec<(Counts, BTreeMap<String, Counts>)> = test_docs
        .par_iter()
        .map(|doc| {
            let preds = detections.get(&doc.doc_id).map(|d| d.regions.as_slice()).unwrap_or(&[]);
            doc_counts(preds, &doc.regions, mode, iou_thresh)
        })
        .collect();
    let mut total = Counts::default();
    let mut per: BTreeMap<String, Counts> = BTreeMap::new();
    for (t, p) in per_doc {
        total.add(t);
        for (k, c) in p {
            per.entry(k).or_default().add(c);
        }
    }
    let gt_labels: BTreeSet<String> = test_docs
        .iter()
        .flat_map(|d| d.regions.iter().map(|r| r.label.clone()))
        .collect();
    let n_gt = total.tp + total.fn_;
    let (metrics, accuracy) = match mode {
        EvalMode::Foreground => {
            // class-agnostic: every class shares the one pooled count
            let mut m = Metrics::from_counts(total);
            m.mean_precision = Some(m.precision);
            m.mean_recall = Some(m.recall);
            m.mean_f1 = Some(m.f1);
            (m, None)
        }
        EvalMode::End2end => (Metrics::with_classes(total, &per, &gt_labels), None),
        EvalMode::ClassifierOnly => (
            Metrics::with_classes(total, &per, &gt_labels),
            Some(ratio(total.tp as f64, n_gt as f64)),
        ),
    };
    Ok(EvalReport {
        mode,
        iou_thresh,
        docs: test_docs.len(),
        metrics,
        accuracy,
    })
}
