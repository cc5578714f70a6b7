//! Domain-specific region classification under the few-shot protocol.
//!
//! Each foreground region becomes a bag-of-words vector over its text plus
//! six spatial features, classified by multinomial logistic regression.

pub mod features;
pub mod model;
pub mod protocol;
pub mod text;

pub use features::{featurize, spatial_features, FeatureVector, SPATIAL_DIMS};
pub use model::{classify, fit, loss_and_gradient, train, ClassifierModel, LinearModel, RegionRef, TrainParams};
pub use protocol::{run_protocol, DetectionSource, ProtocolConfig, ProtocolOutput, ProtocolReport, ProtocolRow};
pub use text::{tokenize, Vocabulary};
