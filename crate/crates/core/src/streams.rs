//! Model outputs consumed by the engine: per-frame pick probabilities and
//! clip-level class scores.
//!
//! Both file formats are UTF-8 with one JSON object per line, preceded by a
//! mandatory header line. A file that is empty (or only blank lines) holds
//! no records.
//!
//! Pick streams:
//!
//! ```text
//! {"format":"rest-hands-pick-streams","version":1}
//! {"video_id":"v01","segment":{"start":0,"end":4},"probs":[0.9,0.1,0.05,0.7]}
//! ```
//!
//! Clip predictions (25 scores for `recognition`, 2 for `form`):
//!
//! ```text
//! {"format":"rest-hands-clip-predictions","version":1}
//! {"clip_id":"v01@0-300","task":"form","scores":[2.5,-1.0]}
//! ```
//!
//! Numbers are written rounded to 9 significant digits; such values survive
//! a write/parse cycle bit for bit.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::manifest::{
    check_header, content_lines, header_line, segment_key, ExerciseLabel, FrameSpan,
};
use crate::numfmt::round_sig9;

pub const PICK_STREAM_FORMAT: &str = "rest-hands-pick-streams";
pub const PICK_STREAM_VERSION: u32 = 1;
pub const CLIP_PREDICTION_FORMAT: &str = "rest-hands-clip-predictions";
pub const CLIP_PREDICTION_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("line {line}: malformed record: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: bad header: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl StreamError {
    fn at_line(self, line: usize) -> StreamError {
        match self {
            StreamError::Invalid(message) => StreamError::Validation { line, message },
            other => other,
        }
    }
}

/// Binarization threshold in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, StreamError> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(StreamError::Invalid(format!(
                "threshold must lie in (0, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self(0.5)
    }
}

/// Sequence of 0/1 frame labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BinarySequence(Vec<bool>);

impl BinarySequence {
    /// Builds a sequence from integer bits; any value other than 0 or 1 is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self, StreamError> {
        bits.iter()
            .enumerate()
            .map(|(i, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(StreamError::Invalid(format!(
                    "bit {i} is {other}, expected 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| b as u8).collect()
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }
}

impl From<Vec<bool>> for BinarySequence {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Per-frame pick probabilities for one segment of a video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickStream {
    pub video_id: String,
    pub segment: FrameSpan,
    pub probs: Vec<f64>,
}

impl PickStream {
    pub fn new(video_id: impl Into<String>, segment: FrameSpan, probs: Vec<f64>) -> Result<Self, StreamError> {
        let stream = Self {
            video_id: video_id.into(),
            segment,
            probs,
        };
        stream.validate()?;
        Ok(stream)
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        if self.video_id.is_empty() {
            return Err(StreamError::Invalid("empty video_id".into()));
        }
        if self.segment.end < self.segment.start {
            return Err(StreamError::Invalid(format!(
                "stream {}: segment end before start",
                self.video_id
            )));
        }
        if self.probs.len() != self.segment.len() {
            return Err(StreamError::Invalid(format!(
                "stream {}: {} probabilities for a segment of {} frames",
                self.id(),
                self.probs.len(),
                self.segment.len()
            )));
        }
        if let Some((i, p)) = self
            .probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(StreamError::Invalid(format!(
                "stream {}: probability {p} at frame {} outside [0, 1]",
                self.id(),
                self.segment.start + i
            )));
        }
        Ok(())
    }

    /// Segment key shared with counting segments.
    pub fn id(&self) -> String {
        segment_key(&self.video_id, self.segment)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Bit `i` is 1 iff `probs[i] >= threshold`.
pub fn binarize(stream: &PickStream, threshold: Threshold) -> BinarySequence {
    stream
        .probs
        .iter()
        .map(|&p| p >= threshold.value())
        .collect::<Vec<_>>()
        .into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Recognition,
    Form,
}

impl Task {
    pub fn num_classes(self) -> usize {
        match self {
            Task::Recognition => ExerciseLabel::COUNT,
            Task::Form => 2,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Recognition => "recognition",
            Task::Form => "form",
        })
    }
}

/// Raw class scores (logits or probabilities) for one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipPrediction {
    pub clip_id: String,
    pub task: Task,
    pub scores: Vec<f64>,
}

impl ClipPrediction {
    pub fn new(clip_id: impl Into<String>, task: Task, scores: Vec<f64>) -> Result<Self, StreamError> {
        let pred = Self {
            clip_id: clip_id.into(),
            task,
            scores,
        };
        pred.validate()?;
        Ok(pred)
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        if self.clip_id.is_empty() {
            return Err(StreamError::Invalid("empty clip_id".into()));
        }
        let expected = self.task.num_classes();
        if self.scores.len() != expected {
            return Err(StreamError::Invalid(format!(
                "clip {}: {} task needs {expected} scores, found {}",
                self.clip_id,
                self.task,
                self.scores.len()
            )));
        }
        if !self.scores.iter().any(|s| s.is_finite()) {
            return Err(StreamError::Invalid(format!(
                "clip {}: no finite score",
                self.clip_id
            )));
        }
        Ok(())
    }

    /// Index of the largest score; ties go to the lowest index and NaN is ignored.
    pub fn argmax(&self) -> usize {
        argmax(&self.scores)
    }
}

pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map_or(0, |(i, _)| i)
}

fn parse_records<T, F>(
    bytes: &[u8],
    format: &str,
    version: u32,
    validate: F,
) -> Result<Vec<T>, StreamError>
where
    T: for<'de> Deserialize<'de>,
    F: Fn(&T) -> Result<(), StreamError>,
{
    let text = std::str::from_utf8(bytes).map_err(|e| StreamError::Syntax {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut lines = content_lines(text);
    let Some((line, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    check_header(header, format, version).map_err(|message| StreamError::Header { line, message })?;
    lines
        .map(|(line, text)| {
            let record: T = serde_json::from_str(text).map_err(|e| StreamError::Syntax {
                line,
                message: e.to_string(),
            })?;
            validate(&record).map_err(|e| e.at_line(line))?;
            Ok(record)
        })
        .collect()
}

pub fn parse_pick_streams(bytes: &[u8]) -> Result<Vec<PickStream>, StreamError> {
    parse_records(bytes, PICK_STREAM_FORMAT, PICK_STREAM_VERSION, PickStream::validate)
}

pub fn parse_clip_predictions(bytes: &[u8]) -> Result<Vec<ClipPrediction>, StreamError> {
    parse_records(
        bytes,
        CLIP_PREDICTION_FORMAT,
        CLIP_PREDICTION_VERSION,
        ClipPrediction::validate,
    )
}

pub fn write_pick_streams(streams: &[PickStream]) -> String {
    let mut out = header_line(PICK_STREAM_FORMAT, PICK_STREAM_VERSION);
    for s in streams {
        let rounded = PickStream {
            video_id: s.video_id.clone(),
            segment: s.segment,
            probs: s.probs.iter().map(|&p| round_sig9(p)).collect(),
        };
        out.push_str(&serde_json::to_string(&rounded).expect("pick stream serializes"));
        out.push('\n');
    }
    out
}

pub fn write_clip_predictions(predictions: &[ClipPrediction]) -> String {
    let mut out = header_line(CLIP_PREDICTION_FORMAT, CLIP_PREDICTION_VERSION);
    for p in predictions {
        let rounded = ClipPrediction {
            clip_id: p.clip_id.clone(),
            task: p.task,
            scores: p.scores.iter().map(|&s| round_sig9(s)).collect(),
        };
        out.push_str(&serde_json::to_string(&rounded).expect("clip prediction serializes"));
        out.push('\n');
    }
    out
}
