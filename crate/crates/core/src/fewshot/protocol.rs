//! The incremental-k few-shot protocol.
//!
//! For each k the classifier is trained on the ground-truth regions of the
//! first k documents of a seeded shuffle of the training pool (so subsets
//! are nested), applied to the test-split detections, and scored end to end,
//! foreground-only and classifier-only.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{classify, train, ClassifierModel, RegionRef, TrainParams};
use crate::docstrum::{docstrum, DocstrumParams};
use crate::error::{Error, Result};
use crate::eval::{evaluate_corpus, CurveRow, EvalMode, Metrics};
use crate::manifest::{load_detections, AnnotatedDoc, DetectionSet, DocDetections, LabeledRegion, Manifest, Split, Transcripts};
use crate::raster::read_pgm;
use crate::rng::Rng;

/// Where test-split foreground boxes come from.
#[derive(Clone, Debug, PartialEq)]
pub enum DetectionSource {
    GroundTruth,
    Docstrum(DocstrumParams),
    File(PathBuf),
}

impl DetectionSource {
    /// `gt`, `docstrum` or `file:<path>`.
    pub fn parse(s: &str, params: DocstrumParams) -> Result<Self> {
        match s {
            "gt" => Ok(DetectionSource::GroundTruth),
            "docstrum" => Ok(DetectionSource::Docstrum(params)),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(DetectionSource::File(PathBuf::from(p))),
                _ => Err(Error::Argument(format!(
                    "detection source {s:?} is not one of gt, docstrum, file:<path>"
                ))),
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DetectionSource::GroundTruth => "gt".into(),
            DetectionSource::Docstrum(_) => "docstrum".into(),
            DetectionSource::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// Runs Docstrum on the images of `docs`, resolved against `root`.
pub fn docstrum_detections(docs: &[&AnnotatedDoc], root: &Path, params: &DocstrumParams) -> Result<DetectionSet> {
    params.validate()?;
    let per_doc: Result<Vec<DocDetections>> = docs
        .par_iter()
        .map(|doc| {
            let img = read_pgm(root.join(&doc.image_path))?;
            if (img.width(), img.height()) != (doc.page_w, doc.page_h) {
                return Err(Error::doc(
                    &doc.doc_id,
                    format!(
                        "image is {}x{} but the manifest says {}x{}",
                        img.width(),
                        img.height(),
                        doc.page_w,
                        doc.page_h
                    ),
                ));
            }
            Ok(DocDetections {
                doc_id: doc.doc_id.clone(),
                regions: docstrum(&img, params),
            })
        })
        .collect();
    Ok(DetectionSet { docs: per_doc? })
}

/// Foreground detections for the test split of `manifest`.
pub fn resolve_detections(manifest: &Manifest, root: &Path, source: &DetectionSource) -> Result<DetectionSet> {
    let test = manifest.docs_in(Split::Test);
    match source {
        DetectionSource::GroundTruth => Ok(DetectionSet::from_ground_truth(test, false)),
        DetectionSource::Docstrum(params) => docstrum_detections(&test, root, params),
        DetectionSource::File(path) => load_detections(path)?.validate_against(manifest),
    }
}

/// Text for each detection of `doc`: the region's own text, else the
/// transcript entry `doc_id#index`, else the text of every ground-truth
/// region whose centre falls inside the box, joined in annotation order.
pub fn detection_texts(doc: &AnnotatedDoc, regions: &[LabeledRegion], transcripts: Option<&Transcripts>) -> Vec<Option<String>> {
    regions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if let Some(t) = &r.text {
                return Some(t.clone());
            }
            if let Some(t) = transcripts.and_then(|ts| ts.get(&doc.doc_id, i)) {
                return Some(t.to_string());
            }
            let parts: Vec<&str> = doc
                .regions
                .iter()
                .filter(|g| {
                    let (cx, cy) = g.bbox.center();
                    r.bbox.contains_point(cx, cy)
                })
                .filter_map(|g| g.text.as_deref())
                .collect();
            (!parts.is_empty()).then(|| parts.join(" "))
        })
        .collect()
}

/// Classifies every detection of `detections` with `model`.
pub fn classify_detections(
    model: &ClassifierModel,
    manifest: &Manifest,
    detections: &DetectionSet,
    transcripts: Option<&Transcripts>,
) -> Result<DetectionSet> {
    let docs: Result<Vec<DocDetections>> = detections
        .docs
        .par_iter()
        .map(|det| {
            let doc = manifest
                .doc(&det.doc_id)
                .ok_or_else(|| Error::doc(&det.doc_id, "detections reference a doc_id absent from the manifest"))?;
            let texts = detection_texts(doc, &det.regions, transcripts);
            let refs: Vec<RegionRef<'_>> = det
                .regions
                .iter()
                .zip(&texts)
                .map(|(region, text)| RegionRef {
                    region,
                    text: text.as_deref(),
                    page_w: doc.page_w,
                    page_h: doc.page_h,
                })
                .collect();
            Ok(DocDetections {
                doc_id: det.doc_id.clone(),
                regions: classify(model, &refs),
            })
        })
        .collect();
    Ok(DetectionSet { docs: docs? })
}

/// Ground-truth regions of `docs` as training examples.
pub fn training_examples<'a>(docs: &[&'a AnnotatedDoc]) -> Vec<RegionRef<'a>> {
    docs.iter()
        .flat_map(|d| {
            d.regions.iter().map(move |r| RegionRef {
                region: r,
                text: r.text.as_deref(),
                page_w: d.page_w,
                page_h: d.page_h,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub k_values: Vec<usize>,
    pub seed: u64,
    pub iou_thresh: f64,
    pub train: TrainParams,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            k_values: vec![10, 20, 30, 40, 50, 60, 70],
            seed: 0,
            iou_thresh: crate::eval::DEFAULT_IOU,
            train: TrainParams::default(),
        }
    }
}

/// k values used for a taxonomy when none are given.
pub fn default_k_values(taxonomy: &str) -> Vec<usize> {
    match taxonomy {
        "resume6" => vec![10, 20, 30, 40, 50],
        _ => vec![10, 20, 30, 40, 50, 60, 70],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRow {
    pub k: usize,
    pub train_docs: Vec<String>,
    pub train_loss: f64,
    pub end2end: Metrics,
    pub foreground: Metrics,
    pub classifier_only: Metrics,
    pub classifier_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub taxonomy: String,
    pub detections: String,
    pub seed: u64,
    pub iou_thresh: f64,
    pub train_pool: usize,
    pub test_docs: usize,
    pub rows: Vec<ProtocolRow>,
    /// Docstrum blocks scored class-agnostically, when computed.
    pub baseline: Option<Metrics>,
}

impl ProtocolReport {
    pub fn curve(&self, mode: EvalMode) -> Vec<CurveRow> {
        self.rows
            .iter()
            .map(|r| CurveRow {
                k: r.k,
                mode,
                metrics: match mode {
                    EvalMode::End2end => r.end2end.clone(),
                    EvalMode::Foreground => r.foreground.clone(),
                    EvalMode::ClassifierOnly => r.classifier_only.clone(),
                },
            })
            .collect()
    }
}

pub struct ProtocolOutput {
    pub report: ProtocolReport,
    /// One model per k, in k order.
    pub models: Vec<(usize, ClassifierModel)>,
}

/// Seeded order of the training pool; the k-subset is its first k entries.
pub fn shuffled_pool<'a>(manifest: &'a Manifest, seed: u64) -> Vec<&'a AnnotatedDoc> {
    let mut pool = manifest.docs_in(Split::Train);
    Rng::new(seed).shuffle(&mut pool);
    pool
}

pub fn run_protocol(
    manifest: &Manifest,
    detections: &DetectionSet,
    source_name: &str,
    baseline: Option<&DetectionSet>,
    transcripts: Option<&Transcripts>,
    cfg: &ProtocolConfig,
) -> Result<ProtocolOutput> {
    if manifest.split.is_none() {
        return Err(Error::Protocol("the manifest has no train/test split".into()));
    }
    if cfg.k_values.is_empty() {
        return Err(Error::Protocol("no k values given".into()));
    }
    let pool = shuffled_pool(manifest, cfg.seed);
    let mut ks = cfg.k_values.clone();
    ks.sort_unstable();
    ks.dedup();
    if ks[0] == 0 {
        return Err(Error::Protocol("k must be at least 1".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k > pool.len()) {
        return Err(Error::Protocol(format!("k = {k} exceeds the training pool of {} documents", pool.len())));
    }
    let test_docs = manifest.docs_in(Split::Test);
    let foreground = evaluate_corpus(manifest, detections, EvalMode::Foreground, cfg.iou_thresh)?.metrics;
    let gt_boxes = DetectionSet::from_ground_truth(test_docs.iter().copied(), false);
    let baseline = baseline
        .map(|b| evaluate_corpus(manifest, b, EvalMode::Foreground, cfg.iou_thresh).map(|r| r.metrics))
        .transpose()?;

    let results: Result<Vec<(ProtocolRow, ClassifierModel)>> = ks
        .iter()
        .map(|&k| {
            let subset = &pool[..k];
            let model = train(&manifest.taxonomy, &training_examples(subset), &cfg.train)
                .map_err(|e| Error::Protocol(format!("k = {k}: {e}")))?;
            let labelled = classify_detections(&model, manifest, detections, transcripts)?;
            let end2end = evaluate_corpus(manifest, &labelled, EvalMode::End2end, cfg.iou_thresh)?.metrics;
            let on_gt = classify_detections(&model, manifest, &gt_boxes, transcripts)?;
            let co = evaluate_corpus(manifest, &on_gt, EvalMode::ClassifierOnly, cfg.iou_thresh)?;
            let row = ProtocolRow {
                k,
                train_docs: subset.iter().map(|d| d.doc_id.clone()).collect(),
                train_loss: model.train_loss,
                end2end,
                foreground: foreground.clone(),
                classifier_only: co.metrics,
                classifier_accuracy: co.accuracy.unwrap_or(0.0),
            };
            Ok((row, model))
        })
        .collect();
    let (rows, models): (Vec<ProtocolRow>, Vec<ClassifierModel>) = results?.into_iter().unzip();
    Ok(ProtocolOutput {
        report: ProtocolReport {
            taxonomy: manifest.taxonomy.name.clone(),
            detections: source_name.to_string(),
            seed: cfg.seed,
            iou_thresh: cfg.iou_thresh,
            train_pool: pool.len(),
            test_docs: test_docs.len(),
            rows,
            baseline,
        },
        models: ks.into_iter().zip(models).collect(),
    })
}
