//! Per-view perception: summary features, stretch detection and the
//! room/passage classifier.

mod classifier;
mod features;
mod stretch;

pub use classifier::{
    train_classifier, Comparison, Label, RoomPassageClassifier, Rule, TrainConfig, TrainError,
};
pub use features::{compute_features, Feature, FeatureVector, SectorConfig};
pub use stretch::{detect_stretches, Stretch, StretchConfig};
