//! Seeded generator of ground-truthed pick streams, a frame-level noise
//! model, and filter-configuration sweeps over the generated corpora.
//!
//! Clean streams hold probability 1.0 on pick frames and 0.0 elsewhere.
//! Noise has three independent components, each drawing from its own
//! random stream derived from the model seed:
//!
//! - flips: every frame independently moves to the other side of the
//!   threshold with probability `flip_prob`;
//! - spikes: every frame independently becomes a high value with
//!   probability `spike_rate / 100`;
//! - dropout: every frame of a pick is lowered with probability
//!   `dropout_rate / pick_len`, i.e. `dropout_rate` frames per pick on average.
//!
//! Perturbed values are quantized to 1e-3 so they survive the stream file
//! format unchanged.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::manifest::{
    derive_pick_labels, CountingSegment, ExerciseLabel, FormLabel, FormVerdict, FrameSpan,
    ManifestError, RepetitionInterval, SessionManifest, VideoRecord, MAX_SEGMENT_COUNT,
};
use crate::repcount::{count_repetitions, FilterConfig, MAX_FILTER_LEN};
use crate::streams::{binarize, PickStream, StreamError, Threshold};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// Frame rate of generated sessions.
pub const SYNTH_FPS: f64 = 30.0;

/// Layout of one generated session: `n_reps` back-to-back repetitions of
/// `rep_len` frames separated by `gap` idle frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SessionGeometry {
    pub n_reps: usize,
    pub rep_len: usize,
    pub gap: usize,
    pub pick_width: usize,
}

impl SessionGeometry {
    fn validate(&self) -> Result<(), SynthError> {
        if !(1..=MAX_SEGMENT_COUNT).contains(&self.n_reps) {
            return Err(SynthError::InvalidGeometry(format!(
                "n_reps must be in 1..={MAX_SEGMENT_COUNT}, got {}",
                self.n_reps
            )));
        }
        if self.pick_width == 0 || self.pick_width > self.rep_len {
            return Err(SynthError::InvalidGeometry(format!(
                "pick_width {} must be in 1..=rep_len ({})",
                self.pick_width, self.rep_len
            )));
        }
        Ok(())
    }

    pub fn num_frames(&self) -> usize {
        self.n_reps * self.rep_len + (self.n_reps - 1) * self.gap
    }
}

/// Builds a session with the given geometry and its noise-free pick stream.
///
/// The seed picks the exercise label and the form verdicts.
pub fn gen_session(geometry: SessionGeometry, seed: u64) -> Result<(VideoRecord, PickStream), SynthError> {
    geometry.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = geometry.rep_len + geometry.gap;
    let repetitions = (0..geometry.n_reps)
        .map(|i| RepetitionInterval::new(i * period, i * period + geometry.rep_len))
        .collect();
    let num_frames = geometry.num_frames();
    let label = ExerciseLabel::from_index(rng.gen_range(0..ExerciseLabel::COUNT))
        .expect("index below label count");

    let block = (SYNTH_FPS * 10.0) as usize;
    let form_labels = (0..num_frames)
        .step_by(block)
        .map(|start| {
            let verdict = match rng.gen_range(0..20) {
                0 => FormVerdict::Discarded,
                1..=13 => FormVerdict::Correct,
                _ => FormVerdict::Incorrect,
            };
            FormLabel {
                segment: FrameSpan::new(start, (start + block).min(num_frames)),
                verdict,
            }
        })
        .collect();

    let video = VideoRecord {
        video_id: format!("synth-{seed:016x}"),
        subject_id: "S-I".into(),
        label,
        fps: SYNTH_FPS,
        num_frames,
        repetitions,
        form_labels,
    };
    video.validate()?;
    let probs = derive_pick_labels(&video, geometry.pick_width)?
        .as_slice()
        .iter()
        .map(|&b| if b { 1.0 } else { 0.0 })
        .collect();
    let stream = PickStream::new(video.video_id.clone(), video.full_span(), probs)?;
    Ok((video, stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub flip_prob: f64,
    /// Expected injected high frames per 100 frames.
    pub spike_rate: f64,
    /// Expected lowered frames per pick.
    pub dropout_rate: f64,
    pub seed: u64,
    pub threshold: Threshold,
}

impl NoiseModel {
    pub fn clean(seed: u64) -> Self {
        Self {
            flip_prob: 0.0,
            spike_rate: 0.0,
            dropout_rate: 0.0,
            seed,
            threshold: Threshold::default(),
        }
    }

    /// Independent flips at 10%: 90% per-frame accuracy after binarization,
    /// the operating point of the reference pick classifier.
    pub fn calibrated(seed: u64) -> Self {
        Self {
            flip_prob: 0.1,
            ..Self::clean(seed)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.flip_prob == 0.0 && self.spike_rate == 0.0 && self.dropout_rate == 0.0
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(SynthError::InvalidNoise(format!(
                "flip_prob must be in [0, 1], got {}",
                self.flip_prob
            )));
        }
        for (name, v) in [("spike_rate", self.spike_rate), ("dropout_rate", self.dropout_rate)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SynthError::InvalidNoise(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    fn rng(&self, component: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(component);
        rng
    }
}

fn low_value(rng: &mut ChaCha8Rng, t: f64) -> f64 {
    (rng.gen_range(0.0..t) * 1000.0).floor() / 1000.0
}

fn high_value(rng: &mut ChaCha8Rng, t: f64) -> f64 {
    ((rng.gen_range(t..=1.0) * 1000.0).ceil() / 1000.0).clamp(t, 1.0)
}

/// Applies the noise model to a stream. Same length, values stay in [0, 1].
pub fn corrupt(stream: &PickStream, model: &NoiseModel) -> Result<PickStream, SynthError> {
    model.validate()?;
    let t = model.threshold.value();
    let mut probs = stream.probs.clone();

    if model.dropout_rate > 0.0 {
        let mut rng = model.rng(2);
        let bits = binarize(stream, model.threshold);
        let bits = bits.as_slice();
        let mut start = 0;
        while start < bits.len() {
            let end = bits[start..]
                .iter()
                .position(|&b| b != bits[start])
                .map_or(bits.len(), |off| start + off);
            if bits[start] {
                let p = (model.dropout_rate / (end - start) as f64).min(1.0);
                for v in &mut probs[start..end] {
                    if rng.gen_bool(p) {
                        *v = low_value(&mut rng, t);
                    }
                }
            }
            start = end;
        }
    }

    if model.spike_rate > 0.0 {
        let mut rng = model.rng(1);
        let p = (model.spike_rate / 100.0).min(1.0);
        for v in &mut probs {
            if rng.gen_bool(p) {
                *v = high_value(&mut rng, t);
            }
        }
    }

    if model.flip_prob > 0.0 {
        let mut rng = model.rng(0);
        for v in &mut probs {
            if rng.gen_bool(model.flip_prob) {
                *v = if *v >= t {
                    low_value(&mut rng, t)
                } else {
                    high_value(&mut rng, t)
                };
            }
        }
    }

    Ok(PickStream::new(stream.video_id.clone(), stream.segment, probs)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AblationRow {
    pub config: FilterConfig,
    pub mae: f64,
}

/// Mean absolute counting error of every configuration over the corpus,
/// rows in the order given.
pub fn ablation_sweep(
    corpus: &[(PickStream, usize)],
    configs: &[FilterConfig],
    threshold: Threshold,
) -> Result<Vec<AblationRow>, SynthError> {
    if corpus.is_empty() {
        return Err(SynthError::EmptyCorpus);
    }
    Ok(configs
        .iter()
        .map(|config| {
            let total: usize = corpus
                .iter()
                .map(|(stream, truth)| count_repetitions(stream, threshold, config).count.abs_diff(*truth))
                .sum();
            AblationRow {
                config: *config,
                mae: total as f64 / corpus.len() as f64,
            }
        })
        .collect())
}

/// The thirteen filter settings of the published ablation: no filtering,
/// then the 1-run filter grown from 1 to 6 frames, then the 0-run filter
/// grown from 1 to 6 frames on top of a 5-frame 1-run filter.
pub fn table6_preset() -> Vec<FilterConfig> {
    let cfg = |a, b| FilterConfig::new(a, b).expect("preset within range");
    let mut rows = vec![cfg(0, 0)];
    rows.extend((1..=6).map(|a| cfg(a, 0)));
    rows.extend((1..=6).map(|b| cfg(5, b)));
    rows
}

pub fn to_roman(mut n: usize) -> String {
    const TABLE: [(usize, &str); 13] = [
        (1000, "M"),
        (900, "CM"),
        (500, "D"),
        (400, "CD"),
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut out = String::new();
    for &(value, digits) in &TABLE {
        while n >= value {
            out.push_str(digits);
            n -= value;
        }
    }
    out
}

/// Table with one row per configuration: a mark for every run length each
/// filter removes (`x`), then the MAE.
pub fn render_ablation_table(rows: &[AblationRow]) -> String {
    let lens = 1..=MAX_FILTER_LEN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5}| {:<w$} | {:<w$} |",
        "",
        "FIL1",
        "FIL0",
        w = 2 * MAX_FILTER_LEN - 1
    );
    let nums: Vec<String> = lens.clone().map(|n| n.to_string()).collect();
    let _ = writeln!(out, "{:<5}| {} | {} | MAE", "N_len", nums.join(" "), nums.join(" "));
    let _ = writeln!(out, "{}", "-".repeat(5 + 4 * MAX_FILTER_LEN + 12));
    for (i, row) in rows.iter().enumerate() {
        let marks = |max: usize| -> String {
            lens.clone()
                .map(|n| if n <= max { "x" } else { "-" })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            out,
            "{:<5}| {} | {} | {:.2}",
            to_roman(i + 1),
            marks(row.config.fil1_max_len()),
            marks(row.config.fil0_max_len()),
            row.mae
        );
    }
    out
}

/// Parameters of a generated corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusSpec {
    pub n_streams: usize,
    pub subjects: usize,
    pub pick_width: usize,
    pub seed: u64,
    pub noise: NoiseModel,
}

impl CorpusSpec {
    pub fn new(n_streams: usize, seed: u64) -> Self {
        Self {
            n_streams,
            subjects: 9,
            pick_width: crate::manifest::DEFAULT_PICK_WIDTH,
            seed,
            noise: NoiseModel::calibrated(seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    /// One whole-video counting segment per session.
    pub manifest: SessionManifest,
    pub clean: Vec<PickStream>,
    pub noisy: Vec<PickStream>,
}

impl SyntheticCorpus {
    /// (stream, true count) pairs for [`ablation_sweep`].
    pub fn labelled(&self, noisy: bool) -> Vec<(PickStream, usize)> {
        let streams = if noisy { &self.noisy } else { &self.clean };
        streams
            .iter()
            .zip(self.manifest.counting_segments())
            .map(|(s, seg)| (s.clone(), seg.true_count))
            .collect()
    }
}

/// Subject identifier `S-<roman>` for a 0-based index.
pub fn subject_name(index: usize) -> String {
    format!("S-{}", to_roman(index + 1))
}

/// Random geometry: 1..=20 repetitions of 10..=45 frames (at least
/// `pick_width + 4`), idle gaps of 0..=15 frames.
fn random_geometry(rng: &mut ChaCha8Rng, pick_width: usize) -> SessionGeometry {
    let min_len = (pick_width + 4).max(10);
    SessionGeometry {
        n_reps: rng.gen_range(1..=MAX_SEGMENT_COUNT),
        rep_len: rng.gen_range(min_len..=min_len.max(45)),
        gap: rng.gen_range(0..=15),
        pick_width,
    }
}

/// Generates `n_streams` sessions spread round-robin over the subjects.
///
/// Between consecutive picks there are always more than three idle frames,
/// so clean streams count exactly under the default filters.
pub fn gen_corpus(spec: &CorpusSpec) -> Result<SyntheticCorpus, SynthError> {
    if spec.subjects == 0 {
        return Err(SynthError::InvalidGeometry("at least one subject required".into()));
    }
    if spec.pick_width == 0 {
        return Err(SynthError::InvalidGeometry("pick_width must be positive".into()));
    }
    spec.noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut videos = Vec::with_capacity(spec.n_streams);
    let mut segments = Vec::with_capacity(spec.n_streams);
    let mut clean = Vec::with_capacity(spec.n_streams);
    let mut noisy = Vec::with_capacity(spec.n_streams);
    for i in 0..spec.n_streams {
        let geometry = random_geometry(&mut rng, spec.pick_width);
        let session_seed: u64 = rng.gen();
        let (mut video, mut stream) = gen_session(geometry, session_seed)?;
        video.video_id = format!("synth-{i:05}");
        video.subject_id = subject_name(i % spec.subjects);
        stream.video_id = video.video_id.clone();
        segments.push(CountingSegment {
            video_id: video.video_id.clone(),
            segment: video.full_span(),
            true_count: geometry.n_reps,
        });
        let noise_seed: u64 = rng.gen();
        noisy.push(corrupt(&stream, &spec.noise.with_seed(noise_seed))?);
        clean.push(stream);
        videos.push(video);
    }
    Ok(SyntheticCorpus {
        manifest: SessionManifest::new(videos, segments)?,
        clean,
        noisy,
    })
}
