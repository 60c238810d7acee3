//! Session annotations: exercise labels, repetition timestamps, form labels
//! and counting segments, plus the line-based manifest file format.
//!
//! A manifest file is UTF-8 text with one JSON object per line. The first
//! non-blank line is the header
//!
//! ```text
//! {"format":"rest-hands-manifest","version":1}
//! ```
//!
//! followed by `video` records and then `segment` records:
//!
//! ```text
//! {"kind":"video","video_id":"v01","subject_id":"S-I","label":{"exercise_type":"I","hand":"left"},"fps":30.0,"num_frames":90,"repetitions":[{"start_frame":0,"end_frame":30}],"form_labels":[{"segment":{"start":0,"end":90},"verdict":"correct"}]}
//! {"kind":"segment","video_id":"v01","segment":{"start":0,"end":30},"true_count":1}
//! ```
//!
//! Frame indices are 0-based and every interval is half-open (`end` excluded).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::streams::BinarySequence;

pub const MANIFEST_FORMAT: &str = "rest-hands-manifest";
pub const MANIFEST_VERSION: u32 = 1;

/// Largest number of repetitions a counting segment may contain.
pub const MAX_SEGMENT_COUNT: usize = 20;

/// Pick width used at 30 Hz.
pub const DEFAULT_PICK_WIDTH: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifestError {
    #[error("line {line}: malformed record: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: bad header: {message}")]
    Header { line: usize, message: String },
    #[error("{record}: {message}")]
    Validation { record: String, message: String },
    #[error("video {video_id}: pick width {pick_width} exceeds repetition {index} of length {len}")]
    PickWidth {
        video_id: String,
        pick_width: usize,
        index: usize,
        len: usize,
    },
    #[error("video {0}: no repetitions to sample counting segments from")]
    NoRepetitions(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn invalid(record: impl Into<String>, message: impl Into<String>) -> ManifestError {
    ManifestError::Validation {
        record: record.into(),
        message: message.into(),
    }
}

/// The thirteen exercise types, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExerciseType {
    #[serde(rename = "I")]
    TowelHandClosing,
    #[serde(rename = "II")]
    FingerNerveGlide,
    #[serde(rename = "III")]
    WristCurl,
    #[serde(rename = "IV")]
    HandSlide,
    #[serde(rename = "V")]
    WristFlexionExtension,
    #[serde(rename = "VI")]
    PenSlide,
    #[serde(rename = "VII")]
    PenSpin,
    #[serde(rename = "VIII")]
    CoinDrop,
    #[serde(rename = "IX")]
    PalmUpDown,
    #[serde(rename = "X")]
    BallGrip,
    #[serde(rename = "XI")]
    WristExtension,
    #[serde(rename = "XII")]
    RollingBottle,
    #[serde(rename = "XIII")]
    PushingHands,
}

impl ExerciseType {
    pub const ALL: [ExerciseType; 13] = [
        ExerciseType::TowelHandClosing,
        ExerciseType::FingerNerveGlide,
        ExerciseType::WristCurl,
        ExerciseType::HandSlide,
        ExerciseType::WristFlexionExtension,
        ExerciseType::PenSlide,
        ExerciseType::PenSpin,
        ExerciseType::CoinDrop,
        ExerciseType::PalmUpDown,
        ExerciseType::BallGrip,
        ExerciseType::WristExtension,
        ExerciseType::RollingBottle,
        ExerciseType::PushingHands,
    ];

    pub fn roman(self) -> &'static str {
        const ROMAN: [&str; 13] = [
            "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII", "XIII",
        ];
        ROMAN[self as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            ExerciseType::TowelHandClosing => "Towel Hand Closing",
            ExerciseType::FingerNerveGlide => "Finger Nerve Glide",
            ExerciseType::WristCurl => "Wrist Curl",
            ExerciseType::HandSlide => "Hand Slide",
            ExerciseType::WristFlexionExtension => "Wrist Flexion and Ext.",
            ExerciseType::PenSlide => "Pen Slide",
            ExerciseType::PenSpin => "Pen Spin",
            ExerciseType::CoinDrop => "Coin Drop",
            ExerciseType::PalmUpDown => "Palm Up and Down",
            ExerciseType::BallGrip => "Ball Grip",
            ExerciseType::WristExtension => "Wrist Extension",
            ExerciseType::RollingBottle => "Rolling Bottle",
            ExerciseType::PushingHands => "Pushing Hands",
        }
    }

    /// Row caption used in report tables, e.g. `IV - Hand Slide`.
    pub fn caption(self) -> String {
        format!("{} - {}", self.roman(), self.name())
    }

    pub fn is_bimanual(self) -> bool {
        self == ExerciseType::PushingHands
    }
}

impl fmt::Display for ExerciseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hand {
    Left,
    Right,
    Both,
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hand::Left => "left",
            Hand::Right => "right",
            Hand::Both => "both",
        })
    }
}

/// One of the 25 exercise classes: a type performed with a given hand.
///
/// Only Pushing Hands uses both hands; every other type is recorded
/// separately for the left and the right hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLabel", into = "RawLabel")]
pub struct ExerciseLabel {
    exercise_type: ExerciseType,
    hand: Hand,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawLabel {
    exercise_type: ExerciseType,
    hand: Hand,
}

impl TryFrom<RawLabel> for ExerciseLabel {
    type Error = String;
    fn try_from(raw: RawLabel) -> Result<Self, String> {
        ExerciseLabel::new(raw.exercise_type, raw.hand)
    }
}

impl From<ExerciseLabel> for RawLabel {
    fn from(label: ExerciseLabel) -> Self {
        RawLabel {
            exercise_type: label.exercise_type,
            hand: label.hand,
        }
    }
}

impl ExerciseLabel {
    pub const COUNT: usize = 25;

    pub fn new(exercise_type: ExerciseType, hand: Hand) -> Result<Self, String> {
        match (exercise_type.is_bimanual(), hand) {
            (true, Hand::Both) | (false, Hand::Left | Hand::Right) => Ok(Self {
                exercise_type,
                hand,
            }),
            (true, _) => Err(format!("{} requires hand=both", exercise_type.name())),
            (false, Hand::Both) => Err(format!(
                "{} requires hand=left or hand=right",
                exercise_type.name()
            )),
        }
    }

    pub fn exercise_type(self) -> ExerciseType {
        self.exercise_type
    }

    pub fn hand(self) -> Hand {
        self.hand
    }

    /// All valid labels in class-index order.
    pub fn all() -> Vec<ExerciseLabel> {
        ExerciseType::ALL
            .iter()
            .flat_map(|&t| {
                let hands: &[Hand] = if t.is_bimanual() {
                    &[Hand::Both]
                } else {
                    &[Hand::Left, Hand::Right]
                };
                hands.iter().map(move |&h| ExerciseLabel {
                    exercise_type: t,
                    hand: h,
                })
            })
            .collect()
    }

    /// Class index in `0..25`: left before right for each type, Pushing Hands last.
    pub fn index(self) -> usize {
        let base = 2 * self.exercise_type as usize;
        match self.hand {
            Hand::Right => base + 1,
            _ => base,
        }
    }

    pub fn from_index(index: usize) -> Option<ExerciseLabel> {
        if index >= Self::COUNT {
            return None;
        }
        let exercise_type = ExerciseType::ALL[index / 2];
        let hand = if exercise_type.is_bimanual() {
            Hand::Both
        } else if index.is_multiple_of(2) {
            Hand::Left
        } else {
            Hand::Right
        };
        Some(ExerciseLabel {
            exercise_type,
            hand,
        })
    }
}

impl fmt::Display for ExerciseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.exercise_type, self.hand)
    }
}

/// Reporting type of a label; left and right variants collapse together.
pub fn exercise_type_of(label: ExerciseLabel) -> ExerciseType {
    label.exercise_type()
}

/// Half-open frame interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrameSpan {
    pub start: usize,
    pub end: usize,
}

impl FrameSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, frame: usize) -> bool {
        self.start <= frame && frame < self.end
    }
}

impl fmt::Display for FrameSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Identifier of a segment of a video, `<video_id>@<start>-<end>`.
///
/// Pick streams, counting segments, form clips and count records are
/// all joined on this key.
pub fn segment_key(video_id: &str, span: FrameSpan) -> String {
    format!("{video_id}@{span}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionInterval {
    pub start_frame: usize,
    pub end_frame: usize,
}

impl RepetitionInterval {
    pub fn new(start_frame: usize, end_frame: usize) -> Self {
        Self {
            start_frame,
            end_frame,
        }
    }

    pub fn len(&self) -> usize {
        self.end_frame.saturating_sub(self.start_frame)
    }

    pub fn is_empty(&self) -> bool {
        self.end_frame <= self.start_frame
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormVerdict {
    Correct,
    Incorrect,
    Discarded,
}

impl FormVerdict {
    /// Class index for scoring; discarded labels have none.
    pub fn class_index(self) -> Option<usize> {
        match self {
            FormVerdict::Correct => Some(0),
            FormVerdict::Incorrect => Some(1),
            FormVerdict::Discarded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormLabel {
    pub segment: FrameSpan,
    pub verdict: FormVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub video_id: String,
    pub subject_id: String,
    pub label: ExerciseLabel,
    pub fps: f64,
    pub num_frames: usize,
    pub repetitions: Vec<RepetitionInterval>,
    pub form_labels: Vec<FormLabel>,
}

impl VideoRecord {
    pub fn validate(&self) -> Result<(), ManifestError> {
        let record = format!("video {}", self.video_id);
        if self.video_id.is_empty() {
            return Err(invalid(record, "empty video_id"));
        }
        if self.video_id.contains('@') {
            return Err(invalid(record, "video_id must not contain '@'"));
        }
        if self.subject_id.is_empty() {
            return Err(invalid(record, "empty subject_id"));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(invalid(record, format!("fps must be positive, got {}", self.fps)));
        }
        if self.num_frames == 0 {
            return Err(invalid(record, "num_frames must be positive"));
        }
        let mut prev_end = 0;
        for (i, rep) in self.repetitions.iter().enumerate() {
            if rep.start_frame >= rep.end_frame {
                return Err(invalid(
                    record,
                    format!(
                        "repetition {i}: start ≥ end ({} ≥ {})",
                        rep.start_frame, rep.end_frame
                    ),
                ));
            }
            if rep.end_frame > self.num_frames {
                return Err(invalid(
                    record,
                    format!(
                        "repetition {i}: end {} exceeds num_frames {}",
                        rep.end_frame, self.num_frames
                    ),
                ));
            }
            if i > 0 && rep.start_frame < prev_end {
                return Err(invalid(
                    record,
                    format!("repetitions {} and {i} overlap or are not sorted", i - 1),
                ));
            }
            prev_end = rep.end_frame;
        }
        for (i, form) in self.form_labels.iter().enumerate() {
            if form.segment.is_empty() {
                return Err(invalid(
                    record,
                    format!("form label {i}: empty segment {}", form.segment),
                ));
            }
            if form.segment.end > self.num_frames {
                return Err(invalid(
                    record,
                    format!(
                        "form label {i}: segment {} exceeds num_frames {}",
                        form.segment, self.num_frames
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Number of repetitions whose start frame lies in `span`.
    pub fn count_starts_in(&self, span: FrameSpan) -> usize {
        self.repetitions
            .iter()
            .filter(|r| span.contains(r.start_frame))
            .count()
    }

    pub fn full_span(&self) -> FrameSpan {
        FrameSpan::new(0, self.num_frames)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingSegment {
    pub video_id: String,
    pub segment: FrameSpan,
    pub true_count: usize,
}

impl CountingSegment {
    pub fn id(&self) -> String {
        segment_key(&self.video_id, self.segment)
    }

    fn validate_against(&self, video: &VideoRecord) -> Result<(), ManifestError> {
        let record = format!("segment {}", self.id());
        if self.segment.is_empty() || self.segment.end > video.num_frames {
            return Err(invalid(
                record,
                format!(
                    "segment {} outside video of {} frames",
                    self.segment, video.num_frames
                ),
            ));
        }
        if !(1..=MAX_SEGMENT_COUNT).contains(&self.true_count) {
            return Err(invalid(
                record,
                format!(
                    "true_count {} outside 1..={MAX_SEGMENT_COUNT}",
                    self.true_count
                ),
            ));
        }
        let starts = video.count_starts_in(self.segment);
        if starts != self.true_count {
            return Err(invalid(
                record,
                format!(
                    "true_count {} but {starts} repetitions start inside the segment",
                    self.true_count
                ),
            ));
        }
        Ok(())
    }
}

/// Validated collection of videos and counting segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionManifest {
    videos: Vec<VideoRecord>,
    counting_segments: Vec<CountingSegment>,
    index: HashMap<String, usize>,
}

impl SessionManifest {
    pub fn new(
        videos: Vec<VideoRecord>,
        counting_segments: Vec<CountingSegment>,
    ) -> Result<Self, ManifestError> {
        let mut index = HashMap::with_capacity(videos.len());
        for (i, video) in videos.iter().enumerate() {
            video.validate()?;
            if index.insert(video.video_id.clone(), i).is_some() {
                return Err(invalid(
                    format!("video {}", video.video_id),
                    "duplicate video_id",
                ));
            }
        }
        let mut seen = HashSet::new();
        for seg in &counting_segments {
            let video = index.get(&seg.video_id).map(|&i| &videos[i]).ok_or_else(|| {
                invalid(
                    format!("segment {}", seg.id()),
                    format!("unknown video {}", seg.video_id),
                )
            })?;
            seg.validate_against(video)?;
            if !seen.insert((seg.video_id.as_str(), seg.segment)) {
                return Err(invalid(format!("segment {}", seg.id()), "duplicate segment"));
            }
        }
        Ok(Self {
            videos,
            counting_segments,
            index,
        })
    }

    pub fn videos(&self) -> &[VideoRecord] {
        &self.videos
    }

    pub fn counting_segments(&self) -> &[CountingSegment] {
        &self.counting_segments
    }

    pub fn video(&self, video_id: &str) -> Option<&VideoRecord> {
        self.index.get(video_id).map(|&i| &self.videos[i])
    }

    /// Subject ids in order of first appearance.
    pub fn subjects(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.videos
            .iter()
            .filter(|v| seen.insert(v.subject_id.as_str()))
            .map(|v| v.subject_id.clone())
            .collect()
    }

    /// Replaces the counting segments, re-validating them.
    pub fn with_counting_segments(
        self,
        counting_segments: Vec<CountingSegment>,
    ) -> Result<Self, ManifestError> {
        SessionManifest::new(self.videos, counting_segments)
    }

    /// Serializes to the line-based manifest format (videos, then segments).
    pub fn to_jsonl(&self) -> String {
        let mut out = header_line(MANIFEST_FORMAT, MANIFEST_VERSION);
        for video in &self.videos {
            out.push_str(&record_line(&RecordRef::Video(video)));
        }
        for seg in &self.counting_segments {
            out.push_str(&record_line(&RecordRef::Segment(seg)));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct Header {
    pub format: String,
    pub version: u32,
}

pub(crate) fn header_line(format: &str, version: u32) -> String {
    let header = Header {
        format: format.to_string(),
        version,
    };
    let mut line = serde_json::to_string(&header).expect("header serializes");
    line.push('\n');
    line
}

/// Checks a header line, returning a description of the problem if any.
pub(crate) fn check_header(text: &str, format: &str, version: u32) -> Result<(), String> {
    let header: Header =
        serde_json::from_str(text).map_err(|e| format!("expected format header: {e}"))?;
    if header.format != format {
        return Err(format!(
            "expected format {format:?}, found {:?}",
            header.format
        ));
    }
    if header.version != version {
        return Err(format!(
            "unsupported {format} version {} (supported: {version})",
            header.version
        ));
    }
    Ok(())
}

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RecordRef<'a> {
    Video(&'a VideoRecord),
    Segment(&'a CountingSegment),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Record {
    Video(VideoLine),
    Segment(CountingSegment),
}

/// Video record as read from disk, before the label pair is checked.
#[derive(Deserialize)]
struct VideoLine {
    video_id: String,
    subject_id: String,
    label: RawLabel,
    fps: f64,
    num_frames: usize,
    repetitions: Vec<RepetitionInterval>,
    #[serde(default)]
    form_labels: Vec<FormLabel>,
}

impl TryFrom<VideoLine> for VideoRecord {
    type Error = ManifestError;
    fn try_from(line: VideoLine) -> Result<Self, ManifestError> {
        let label = ExerciseLabel::try_from(line.label)
            .map_err(|message| invalid(format!("video {}", line.video_id), message))?;
        let video = VideoRecord {
            video_id: line.video_id,
            subject_id: line.subject_id,
            label,
            fps: line.fps,
            num_frames: line.num_frames,
            repetitions: line.repetitions,
            form_labels: line.form_labels,
        };
        video.validate()?;
        Ok(video)
    }
}

fn record_line(record: &RecordRef<'_>) -> String {
    let mut line = serde_json::to_string(record).expect("manifest record serializes");
    line.push('\n');
    line
}

/// Parses and validates a manifest file.
pub fn parse_manifest(bytes: &[u8]) -> Result<SessionManifest, ManifestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ManifestError::Syntax {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or(ManifestError::Header {
        line: 1,
        message: "empty file, header required".into(),
    })?;
    check_header(header, MANIFEST_FORMAT, MANIFEST_VERSION).map_err(|message| {
        ManifestError::Header {
            line: line_no,
            message,
        }
    })?;

    let mut videos = Vec::new();
    let mut segments = Vec::new();
    let mut origin = HashMap::new();
    for (line, text) in lines {
        let record: Record = serde_json::from_str(text).map_err(|e| ManifestError::Syntax {
            line,
            message: e.to_string(),
        })?;
        match record {
            Record::Video(raw) => {
                let video = VideoRecord::try_from(raw).map_err(|e| at_line(e, line))?;
                origin.insert(format!("video {}", video.video_id), line);
                videos.push(video);
            }
            Record::Segment(seg) => {
                origin.insert(format!("segment {}", seg.id()), line);
                segments.push(seg);
            }
        }
    }
    SessionManifest::new(videos, segments).map_err(|e| match &e {
        ManifestError::Validation { record, .. } => match origin.get(record) {
            Some(&line) => at_line(e, line),
            None => e,
        },
        _ => e,
    })
}

fn at_line(err: ManifestError, line: usize) -> ManifestError {
    match err {
        ManifestError::Validation { record, message } => ManifestError::Validation {
            record: format!("line {line}: {record}"),
            message,
        },
        other => other,
    }
}

/// Per-frame pick labels: frame `f` is 1 iff it falls within the first
/// `pick_width` frames of some repetition.
pub fn derive_pick_labels(
    video: &VideoRecord,
    pick_width: usize,
) -> Result<BinarySequence, ManifestError> {
    if pick_width == 0 {
        return Err(ManifestError::InvalidArgument(
            "pick_width must be positive".into(),
        ));
    }
    let mut bits = vec![false; video.num_frames];
    for (index, rep) in video.repetitions.iter().enumerate() {
        if pick_width > rep.len() {
            return Err(ManifestError::PickWidth {
                video_id: video.video_id.clone(),
                pick_width,
                index,
                len: rep.len(),
            });
        }
        let end = (rep.start_frame + pick_width).min(video.num_frames);
        bits[rep.start_frame..end].fill(true);
    }
    Ok(BinarySequence::from(bits))
}

/// Result of [`sample_counting_segments`].
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSample {
    pub segments: Vec<CountingSegment>,
    /// Set when fewer distinct segments exist than were requested; all of
    /// them are returned.
    pub exhausted: bool,
}

/// Samples distinct counting segments, each spanning a contiguous run of
/// between 1 and `min(#repetitions, max_count)` repetitions.
///
/// A segment runs from the start of its first repetition to the end of its
/// last one. Output is sorted by (first, last) repetition index and depends
/// only on the arguments.
pub fn sample_counting_segments(
    video: &VideoRecord,
    max_count: usize,
    n_samples: usize,
    seed: u64,
) -> Result<SegmentSample, ManifestError> {
    if video.repetitions.is_empty() {
        return Err(ManifestError::NoRepetitions(video.video_id.clone()));
    }
    if max_count == 0 || max_count > MAX_SEGMENT_COUNT {
        return Err(ManifestError::InvalidArgument(format!(
            "max_count must be in 1..={MAX_SEGMENT_COUNT}, got {max_count}"
        )));
    }
    let n_reps = video.repetitions.len();
    let longest = n_reps.min(max_count);
    let mut candidates: Vec<(usize, usize)> = (0..n_reps)
        .flat_map(|first| (first..n_reps.min(first + longest)).map(move |last| (first, last)))
        .collect();
    let exhausted = n_samples > candidates.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    candidates.truncate(n_samples);
    let picked: BTreeSet<(usize, usize)> = candidates.into_iter().collect();

    let segments = picked
        .into_iter()
        .map(|(first, last)| {
            let span = FrameSpan::new(
                video.repetitions[first].start_frame,
                video.repetitions[last].end_frame,
            );
            CountingSegment {
                video_id: video.video_id.clone(),
                segment: span,
                true_count: video.count_starts_in(span),
            }
        })
        .collect();
    Ok(SegmentSample {
        segments,
        exhausted,
    })
}
