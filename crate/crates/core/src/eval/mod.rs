//! Matching and metrics for layout detections.
//!
//! Predictions are matched to ground truth greedily in score order at an IoU
//! threshold (inclusive). Counts are pooled over a corpus before computing
//! micro precision, recall and F1; macro figures average per-class metrics
//! over the classes present in the ground truth.

pub mod corpus;
pub mod matching;
pub mod metrics;
pub mod report;

pub use corpus::{evaluate_corpus, EvalMode, EvalReport};
pub use matching::{match_regions, MatchResult};
pub use metrics::{f1_score, metrics_from_match, Counts, Metrics};
pub use report::{check_f1_consistency, learning_curve_csv, learning_curve_table, CurveRow, F1Mismatch};

/// IoU threshold used throughout.
pub const DEFAULT_IOU: f64 = 0.5;
