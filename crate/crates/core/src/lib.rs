//! Document layout analysis toolkit.
//!
//! The crate is organised as a two-step pipeline: a foreground region source
//! (Docstrum segmentation, ground-truth boxes or an external detection file)
//! followed by a domain-specific region classifier built on bag-of-words and
//! spatial features. Around it sit a deterministic synthetic page generator
//! and an IoU-based evaluation engine.

pub mod docstrum;
pub mod error;
pub mod eval;
pub mod fewshot;
pub mod geom;
pub mod manifest;
pub mod raster;
pub mod rng;
pub mod synthgen;
pub mod taxonomy;

pub use error::{Error, Result};
pub use geom::{iou, BBox};
pub use manifest::{AnnotatedDoc, DetectionSet, LabeledRegion, Manifest, Split, Transcripts};
pub use raster::{BinaryImage, Component, GrayImage};
pub use rng::Rng;
pub use taxonomy::LabelTaxonomy;

/// Label carried by class-agnostic detections.
pub const FOREGROUND: &str = "foreground";
