//! Precision, recall and F1 from match counts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::matching::MatchResult;
use crate::manifest::LabeledRegion;

/// `num / den`, with `0 / 0` mapped to 0.
pub fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    ratio(2.0 * precision * recall, precision + recall)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Option<BTreeMap<String, Metrics>>,
    pub mean_precision: Option<f64>,
    pub mean_recall: Option<f64>,
    pub mean_f1: Option<f64>,
}

impl Metrics {
    pub fn from_counts(c: Counts) -> Self {
        let precision = ratio(c.tp as f64, (c.tp + c.fp) as f64);
        let recall = ratio(c.tp as f64, (c.tp + c.fn_) as f64);
        Metrics {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision,
            recall,
            f1: f1_score(precision, recall),
            ..Metrics::default()
        }
    }

    pub fn counts(&self) -> Counts {
        Counts {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
        }
    }

    /// Micro metrics over `total` plus per-class metrics and their unweighted
    /// means over the classes in `gt_classes`.
    pub fn with_classes(total: Counts, per_class: &BTreeMap<String, Counts>, gt_classes: &BTreeSet<String>) -> Self {
        let mut m = Metrics::from_counts(total);
        let per: BTreeMap<String, Metrics> = per_class
            .iter()
            .map(|(k, &c)| (k.clone(), Metrics::from_counts(c)))
            .collect();
        let present: Vec<&Metrics> = gt_classes.iter().filter_map(|c| per.get(c)).collect();
        let n = present.len() as f64;
        let mean = |f: fn(&Metrics) -> f64| ratio(present.iter().map(|m| f(m)).sum(), n);
        m.mean_precision = Some(mean(|m| m.precision));
        m.mean_recall = Some(mean(|m| m.recall));
        m.mean_f1 = Some(mean(|m| m.f1));
        m.per_class = Some(per);
        m
    }

    /// Macro F1 when present, otherwise micro F1.
    pub fn headline_f1(&self) -> f64 {
        self.mean_f1.unwrap_or(self.f1)
    }
}

/// Counts of a match, overall and per class.
///
/// A pair counts as correct for its class only when the labels agree, so
/// class-aware and class-agnostic matches share one definition.
pub fn class_counts(
    m: &MatchResult,
    preds: &[LabeledRegion],
    gts: &[LabeledRegion],
) -> (Counts, BTreeMap<String, Counts>) {
    let total = Counts {
        tp: m.tp(),
        fp: m.unmatched_preds.len(),
        fn_: m.unmatched_gts.len(),
    };
    let mut per: BTreeMap<String, Counts> = BTreeMap::new();
    for g in gts {
        per.entry(g.label.clone()).or_default().fn_ += 1;
    }
    for p in preds {
        per.entry(p.label.clone()).or_default().fp += 1;
    }
    for &(p, g, _) in &m.pairs {
        if preds[p].label == gts[g].label {
            let c = per.get_mut(&gts[g].label).expect("gt class counted");
            c.tp += 1;
            c.fn_ -= 1;
            per.get_mut(&preds[p].label).expect("pred class counted").fp -= 1;
        }
    }
    (total, per)
}

pub fn gt_classes(gts: &[LabeledRegion]) -> BTreeSet<String> {
    gts.iter().map(|g| g.label.clone()).collect()
}

/// Micro metrics of a match; with `macro_avg`, also per-class metrics and
/// their means over the classes present in `gts`.
pub fn metrics_from_match(m: &MatchResult, preds: &[LabeledRegion], gts: &[LabeledRegion], macro_avg: bool) -> Metrics {
    let (total, per) = class_counts(m, preds, gts);
    if macro_avg {
        Metrics::with_classes(total, &per, &gt_classes(gts))
    } else {
        Metrics::from_counts(total)
    }
}
