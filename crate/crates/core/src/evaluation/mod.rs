//! Split protocols and metrics.

mod metrics;
mod report;
mod splits;

use thiserror::Error;

pub use metrics::{
    accuracy_by_subject, argmax_invariance_check, counting_report, form_truth,
    recognition_truth, top1, ClassificationReport, CountingReport, ErrorStats, FormTruth,
    SubjectAccuracy, SubjectStats,
};
pub use report::{
    render_accuracy_table, render_counting_table, render_subject_table, AccuracyRow, SubjectRow,
};
pub use splits::{make_splits, SplitMode, SplitSpec, Splits};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unknown subject {0}")]
    UnknownSubject(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("clip {0}: no ground truth")]
    MissingTruth(String),
    #[error("segment {0}: no predicted count")]
    MissingPrediction(String),
    #[error("segment {0}: unknown video")]
    UnknownVideo(String),
    #[error("clip {clip_id}: {message}")]
    BadPrediction { clip_id: String, message: String },
    #[error("nothing to score")]
    Empty,
}
