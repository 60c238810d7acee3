//! Offline analysis engine for egocentric hand-rehabilitation sessions.
//!
//! The crate is organised around the data flow of a counting experiment:
//!
//! - [`manifest`] holds the annotation model (exercise labels, repetition
//!   intervals, form labels, counting segments) and its line-based file format.
//! - [`streams`] parses the outputs of external models: per-frame pick
//!   probabilities and clip-level class scores.
//! - [`repcount`] turns a pick stream into a repetition count with run-length
//!   spike filters followed by a rising-edge counter.
//! - [`evaluation`] produces splits (equal distribution, leave-one-subject-out)
//!   and scores recognition, form and counting predictions.
//! - [`synthetic`] generates seeded ground-truthed streams and noisy variants
//!   for sweeps over filter configurations.
//! - [`cli`] wires everything into the `rehab` command-line tool.

pub mod cli;
pub mod evaluation;
pub mod manifest;
pub mod repcount;
pub mod streams;
pub mod synthetic;

mod numfmt;

pub use manifest::{
    CountingSegment, ExerciseLabel, ExerciseType, FormLabel, FormVerdict, FrameSpan, Hand,
    SessionManifest, VideoRecord,
};
pub use repcount::{CountResult, FilterConfig, FilterOrder};
pub use streams::{BinarySequence, ClipPrediction, PickStream, Task, Threshold};
