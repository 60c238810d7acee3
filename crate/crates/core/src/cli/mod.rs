//! The `rehab` command-line tool.
//!
//! Every subcommand writes into an output directory (default
//! `results/<subcommand>`) and leaves a `run.json` next to its artifacts
//! recording the flags and file-format versions. Files are written
//! atomically. On failure a single JSON line is printed to stderr and the
//! process exits with 2 (validation) or 3 (I/O).

pub mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::evaluation::{
    accuracy_by_subject, counting_report, form_truth, make_splits, recognition_truth,
    render_accuracy_table, render_counting_table, render_subject_table, top1, AccuracyRow,
    ClassificationReport, EvalError, SplitSpec, SubjectAccuracy, SubjectRow,
};
use crate::manifest::{
    parse_manifest, sample_counting_segments, ManifestError, SessionManifest, MANIFEST_FORMAT,
    MANIFEST_VERSION, MAX_SEGMENT_COUNT,
};
use crate::repcount::{count_repetitions, FilterConfig, FilterConfigError, FilterOrder};
use crate::streams::{
    parse_clip_predictions, parse_pick_streams, write_pick_streams, ClipPrediction, StreamError,
    Task, Threshold, CLIP_PREDICTION_FORMAT, CLIP_PREDICTION_VERSION, PICK_STREAM_FORMAT,
    PICK_STREAM_VERSION,
};
use crate::synthetic::{
    ablation_sweep, gen_corpus, render_ablation_table, table6_preset, to_roman, CorpusSpec,
    NoiseModel, SynthError,
};
use output::{
    parse_counts, read, write_atomic, write_counts, write_split_part, CountRecord,
    ABLATION_FORMAT, ABLATION_VERSION, COUNTS_FORMAT, COUNTS_VERSION, SPLIT_FORMAT, SPLIT_VERSION,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Io { .. } => "io",
        }
    }

    /// Single-line JSON description for stderr.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}
validation_from!(ManifestError, StreamError, EvalError, SynthError, FilterConfigError);

const FORMATS: &str = "File formats (UTF-8, one JSON record per line after a version header):
  manifest            rest-hands-manifest v1
  pick streams        rest-hands-pick-streams v1
  clip predictions    rest-hands-clip-predictions v1
  counts              rest-hands-counts v1
  split parts         rest-hands-split v1 (comment header, one video id per line)
  ablation rows       rest-hands-ablation v1
Exit codes: 0 success, 2 validation error, 3 I/O error.";

#[derive(Debug, Parser)]
#[command(
    name = "rehab",
    version,
    about = "Repetition counting, splits and scoring for egocentric hand-rehabilitation sessions",
    after_help = FORMATS
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Count repetitions in every pick stream.
    #[command(after_help = "Reads rest-hands-pick-streams v1. Writes counts.jsonl (rest-hands-counts v1) and run.json.")]
    Count(CountArgs),
    /// Top-1 accuracy of exercise recognition predictions (25 classes).
    #[command(after_help = "Reads rest-hands-manifest v1 and rest-hands-clip-predictions v1 (clip_id = video_id). Writes report.json, report.txt and run.json.")]
    EvaluateRecognition(ClassifyArgs),
    /// Top-1 accuracy of form predictions (class 0 = correct, 1 = incorrect).
    #[command(after_help = "Reads rest-hands-manifest v1 and rest-hands-clip-predictions v1 (clip_id = <video_id>@<start>-<end> of a form label; discarded labels are skipped). Writes report.json, report.txt and run.json.")]
    EvaluateForm(ClassifyArgs),
    /// MAE and |e| buckets of predicted counts against the manifest's counting segments.
    #[command(after_help = "Reads rest-hands-manifest v1 and rest-hands-counts v1. Writes report.json, report.txt and run.json.")]
    EvaluateCounting(EvalCountingArgs),
    /// Train/val/test video lists (equal distribution or leave-one-subject-out).
    #[command(after_help = "Reads rest-hands-manifest v1. Writes train.txt, val.txt, test.txt (rest-hands-split v1), split.json and run.json; LOOCV without --subject writes one fold-<subject>/ directory per subject.")]
    Split(SplitArgs),
    /// Sample counting segments for every video with repetitions.
    #[command(after_help = "Reads rest-hands-manifest v1. Writes manifest.jsonl (rest-hands-manifest v1, counting segments replaced) and run.json.")]
    Segments(SegmentsArgs),
    /// Generate a seeded synthetic corpus with clean and noisy pick streams.
    #[command(after_help = "Writes manifest.jsonl (rest-hands-manifest v1), streams-clean.jsonl and streams-noisy.jsonl (rest-hands-pick-streams v1) and run.json.")]
    Synth(SynthArgs),
    /// Counting MAE for a list of filter configurations.
    #[command(after_help = "Reads rest-hands-manifest v1 and rest-hands-pick-streams v1 (stream keys must match counting segments). Writes ablation.txt, ablation.jsonl (rest-hands-ablation v1) and run.json.")]
    Ablate(AblateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::EvaluateRecognition(_) => "evaluate-recognition",
            Command::EvaluateForm(_) => "evaluate-form",
            Command::EvaluateCounting(_) => "evaluate-counting",
            Command::Split(_) => "split",
            Command::Segments(_) => "segments",
            Command::Synth(_) => "synth",
            Command::Ablate(_) => "ablate",
        }
    }

    fn out_override(&self) -> Option<&Path> {
        match self {
            Command::Count(a) => a.out.as_deref(),
            Command::EvaluateRecognition(a) | Command::EvaluateForm(a) => a.out.as_deref(),
            Command::EvaluateCounting(a) => a.out.as_deref(),
            Command::Split(a) => a.out.as_deref(),
            Command::Segments(a) => a.out.as_deref(),
            Command::Synth(a) => a.out.as_deref(),
            Command::Ablate(a) => a.out.as_deref(),
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out_override()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| Path::new("results").join(self.name()))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    OnesFirst,
    ZerosFirst,
}

impl From<OrderArg> for FilterOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::OnesFirst => FilterOrder::OnesFirst,
            OrderArg::ZerosFirst => FilterOrder::ZerosFirst,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FilterArgs {
    /// Probability threshold; a frame is a pick iff p >= threshold. Must lie in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Erase runs of 1s up to this many frames (0..=6, 0 disables).
    #[arg(long, default_value_t = 5)]
    pub fil1: usize,
    /// Fill runs of 0s up to this many frames (0..=6, 0 disables).
    #[arg(long, default_value_t = 3)]
    pub fil0: usize,
    /// Which filter runs first.
    #[arg(long, value_enum, default_value_t = OrderArg::OnesFirst)]
    pub order: OrderArg,
}

impl FilterArgs {
    fn config(&self) -> Result<(Threshold, FilterConfig), CliError> {
        let threshold = Threshold::new(self.threshold)?;
        let config = FilterConfig::new(self.fil1, self.fil0)?.with_order(self.order.into());
        Ok((threshold, config))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    /// Pick stream file.
    #[arg(long)]
    pub streams: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub filter: FilterArgs,
    /// Output directory [default: results/count].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Manifest providing the ground truth.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Clip predictions on the test part.
    #[arg(long)]
    pub pred: PathBuf,
    /// Optional clip predictions on the validation part.
    #[arg(long)]
    pub val_pred: Option<PathBuf>,
    /// Method name shown in the report tables.
    #[arg(long, default_value = "model")]
    pub method: String,
    /// Output directory [default: results/evaluate-recognition or results/evaluate-form].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalCountingArgs {
    /// Manifest holding the counting segments.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Counts file written by `rehab count`.
    #[arg(long)]
    pub counts: PathBuf,
    /// Method name shown in the per-subject table.
    #[arg(long, default_value = "counter")]
    pub method: String,
    /// Output directory [default: results/evaluate-counting].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SplitModeArg {
    Equal,
    Loocv,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Split protocol.
    #[arg(long, value_enum, default_value_t = SplitModeArg::Equal)]
    pub mode: SplitModeArg,
    /// Held-out subject for loocv; every subject gets a fold when omitted.
    #[arg(long)]
    pub subject: Option<String>,
    /// Training fraction (equal mode).
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    /// Validation fraction; in loocv it applies to the non-test videos.
    #[arg(long, default_value_t = 0.1)]
    pub val_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory [default: results/split].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SegmentsArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Segments to draw per video.
    #[arg(long)]
    pub n_samples: usize,
    /// Most repetitions one segment may contain (1..=20).
    #[arg(long, default_value_t = MAX_SEGMENT_COUNT)]
    pub max_count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory [default: results/segments].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Number of sessions.
    #[arg(long, default_value_t = 500)]
    pub n_streams: usize,
    /// Number of subjects (sessions assigned round-robin).
    #[arg(long, default_value_t = 9)]
    pub subjects: usize,
    /// Pick width in frames.
    #[arg(long, default_value_t = 6)]
    pub pick_width: usize,
    /// Per-frame flip probability (0.1 gives 90% frame accuracy).
    #[arg(long, default_value_t = 0.1)]
    pub flip_prob: f64,
    /// Injected high frames per 100 frames.
    #[arg(long, default_value_t = 0.0)]
    pub spike_rate: f64,
    /// Lowered frames per pick.
    #[arg(long, default_value_t = 0.0)]
    pub dropout_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory [default: results/synth].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    /// The 13 configurations of the published filter ablation.
    Table6,
    /// All 49 configurations in [0, 6]².
    Grid,
}

#[derive(Debug, Args, Serialize)]
pub struct AblateArgs {
    /// Manifest holding the counting segments (true counts).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Pick streams, one per counting segment.
    #[arg(long)]
    pub streams: PathBuf,
    /// Named configuration list; ignored when --config is given.
    #[arg(long, value_enum, default_value_t = PresetArg::Table6)]
    pub preset: PresetArg,
    /// Explicit configuration `FIL1,FIL0` (repeatable).
    #[arg(long = "config", value_parser = parse_config_pair)]
    pub configs: Vec<(usize, usize)>,
    /// Probability threshold in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Which filter runs first.
    #[arg(long, value_enum, default_value_t = OrderArg::OnesFirst)]
    pub order: OrderArg,
    /// Output directory [default: results/ablate].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn parse_config_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected FIL1,FIL0, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    tool_version: &'static str,
    #[serde(flatten)]
    command: &'a Command,
    formats: BTreeMap<&'static str, u32>,
}

fn write_metadata(out: &Path, command: &Command) -> Result<(), CliError> {
    let formats = BTreeMap::from([
        (MANIFEST_FORMAT, MANIFEST_VERSION),
        (PICK_STREAM_FORMAT, PICK_STREAM_VERSION),
        (CLIP_PREDICTION_FORMAT, CLIP_PREDICTION_VERSION),
        (COUNTS_FORMAT, COUNTS_VERSION),
        (SPLIT_FORMAT, SPLIT_VERSION),
        (ABLATION_FORMAT, ABLATION_VERSION),
    ]);
    let meta = RunMetadata {
        tool: "rehab",
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        formats,
    };
    write_json(&out.join("run.json"), &meta)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, &text)
}

fn load_manifest(path: &Path) -> Result<SessionManifest, CliError> {
    parse_manifest(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_predictions(path: &Path) -> Result<Vec<ClipPrediction>, CliError> {
    parse_clip_predictions(&read(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Executes one parsed command.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli.command.out_dir();
    match &cli.command {
        Command::Count(args) => run_count(args, &out)?,
        Command::EvaluateRecognition(args) => run_classify(args, Task::Recognition, &out)?,
        Command::EvaluateForm(args) => run_classify(args, Task::Form, &out)?,
        Command::EvaluateCounting(args) => run_eval_counting(args, &out)?,
        Command::Split(args) => run_split(args, &out)?,
        Command::Segments(args) => run_segments(args, &out)?,
        Command::Synth(args) => run_synth(args, &out)?,
        Command::Ablate(args) => run_ablate(args, &out)?,
    }
    write_metadata(&out, &cli.command)
}

fn run_count(args: &CountArgs, out: &Path) -> Result<(), CliError> {
    let (threshold, config) = args.filter.config()?;
    let streams = parse_pick_streams(&read(&args.streams)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.streams.display())))?;
    let records: Vec<CountRecord> = streams
        .iter()
        .map(|s| CountRecord::new(&s.video_id, s.segment, &count_repetitions(s, threshold, &config)))
        .collect();
    write_atomic(&out.join("counts.jsonl"), &write_counts(&records))
}

#[derive(Serialize)]
struct ClassificationOutput<'a> {
    method: &'a str,
    task: Task,
    test: ClassificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    val: Option<ClassificationReport>,
    per_subject: Vec<SubjectAccuracy>,
    skipped_discarded: usize,
}

fn run_classify(args: &ClassifyArgs, task: Task, out: &Path) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let (truth, discarded) = match task {
        Task::Recognition => (recognition_truth(&manifest), Default::default()),
        Task::Form => {
            let ft = form_truth(&manifest);
            (ft.truth, ft.discarded)
        }
    };
    let mut skipped = 0;
    let mut load = |path: &Path| -> Result<Vec<ClipPrediction>, CliError> {
        let preds = load_predictions(path)?;
        if let Some(p) = preds.iter().find(|p| p.task != task) {
            return Err(CliError::Validation(format!(
                "{}: clip {} has task {}, expected {task}",
                path.display(),
                p.clip_id,
                p.task
            )));
        }
        let before = preds.len();
        let kept: Vec<_> = preds.into_iter().filter(|p| !discarded.contains(&p.clip_id)).collect();
        skipped += before - kept.len();
        Ok(kept)
    };
    let test_preds = load(&args.pred)?;
    let val_preds = args.val_pred.as_deref().map(&mut load).transpose()?;

    let test = top1(&test_preds, &truth)?;
    let val = val_preds.as_deref().map(|p| top1(p, &truth)).transpose()?;
    let per_subject = accuracy_by_subject(&test_preds, &truth, &manifest)?;

    let caption = match task {
        Task::Recognition => "Exercise recognition - accuracy [%]",
        Task::Form => "Exercise form evaluation - accuracy [%]",
    };
    let mut text = render_accuracy_table(&[AccuracyRow {
        method: args.method.clone(),
        val: val.as_ref().map(|r| r.top1_accuracy),
        test: test.top1_accuracy,
    }]);
    text.push('\n');
    let subjects: Vec<String> = per_subject.iter().map(|s| s.subject_id.clone()).collect();
    text.push_str(&render_subject_table(
        caption,
        &subjects,
        &[SubjectRow {
            method: args.method.clone(),
            values: per_subject.iter().map(|s| Some(s.top1_accuracy)).collect(),
        }],
    ));

    let report = ClassificationOutput {
        method: &args.method,
        task,
        test,
        val,
        per_subject,
        skipped_discarded: skipped,
    };
    write_json(&out.join("report.json"), &report)?;
    write_atomic(&out.join("report.txt"), &text)
}

fn run_eval_counting(args: &EvalCountingArgs, out: &Path) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let counts = parse_counts(&read(&args.counts)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.counts.display())))?;
    let preds: BTreeMap<String, usize> =
        counts.into_iter().map(|r| (r.segment_id, r.count)).collect();
    let report = counting_report(&preds, manifest.counting_segments(), &manifest)?;
    let mut text = render_counting_table(&report);
    text.push('\n');
    let subjects: Vec<String> = report.per_subject.iter().map(|s| s.subject_id.clone()).collect();
    text.push_str(&render_subject_table(
        "Repetition counting - MAE",
        &subjects,
        &[SubjectRow {
            method: args.method.clone(),
            values: report.per_subject.iter().map(|s| Some(s.stats.mae)).collect(),
        }],
    ));
    write_json(&out.join("report.json"), &report)?;
    write_atomic(&out.join("report.txt"), &text)
}

#[derive(Serialize)]
struct SplitSummary {
    spec: SplitSpec,
    train: usize,
    val: usize,
    test: usize,
    warnings: Vec<String>,
}

fn run_split(args: &SplitArgs, out: &Path) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let specs: Vec<(Option<String>, SplitSpec)> = match args.mode {
        SplitModeArg::Equal => {
            if args.subject.is_some() {
                return Err(CliError::Validation("--subject only applies to --mode loocv".into()));
            }
            vec![(None, SplitSpec::equal_with(args.train_fraction, args.val_fraction, args.seed))]
        }
        SplitModeArg::Loocv => {
            let with_fraction = |subject: &str| {
                let mut spec = SplitSpec::loocv(subject, args.seed);
                if let crate::evaluation::SplitMode::Loocv { val_fraction, .. } = &mut spec.mode {
                    *val_fraction = args.val_fraction;
                }
                spec
            };
            match &args.subject {
                Some(s) => vec![(None, with_fraction(s))],
                None => manifest
                    .subjects()
                    .into_iter()
                    .map(|s| {
                        let spec = with_fraction(&s);
                        (Some(s), spec)
                    })
                    .collect(),
            }
        }
    };
    for (fold, spec) in specs {
        let dir = match &fold {
            Some(subject) => out.join(format!("fold-{subject}")),
            None => out.to_path_buf(),
        };
        let splits = make_splits(&manifest, &spec)?;
        for w in &splits.warnings {
            eprintln!("warning: {w}");
        }
        for (part, ids) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
            write_atomic(&dir.join(format!("{part}.txt")), &write_split_part(part, ids))?;
        }
        let summary = SplitSummary {
            spec,
            train: splits.train.len(),
            val: splits.val.len(),
            test: splits.test.len(),
            warnings: splits.warnings,
        };
        write_json(&dir.join("split.json"), &summary)?;
    }
    Ok(())
}

fn run_segments(args: &SegmentsArgs, out: &Path) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut segments = Vec::new();
    for video in manifest.videos() {
        let video_seed: u64 = rng.gen();
        if video.repetitions.is_empty() {
            continue;
        }
        let sample = sample_counting_segments(video, args.max_count, args.n_samples, video_seed)?;
        if sample.exhausted {
            eprintln!(
                "warning: video {} has only {} distinct segments",
                video.video_id,
                sample.segments.len()
            );
        }
        segments.extend(sample.segments);
    }
    let manifest = manifest.with_counting_segments(segments)?;
    write_atomic(&out.join("manifest.jsonl"), &manifest.to_jsonl())
}

fn run_synth(args: &SynthArgs, out: &Path) -> Result<(), CliError> {
    let spec = CorpusSpec {
        n_streams: args.n_streams,
        subjects: args.subjects,
        pick_width: args.pick_width,
        seed: args.seed,
        noise: NoiseModel {
            flip_prob: args.flip_prob,
            spike_rate: args.spike_rate,
            dropout_rate: args.dropout_rate,
            ..NoiseModel::clean(args.seed)
        },
    };
    let corpus = gen_corpus(&spec)?;
    write_atomic(&out.join("manifest.jsonl"), &corpus.manifest.to_jsonl())?;
    write_atomic(&out.join("streams-clean.jsonl"), &write_pick_streams(&corpus.clean))?;
    write_atomic(&out.join("streams-noisy.jsonl"), &write_pick_streams(&corpus.noisy))
}

#[derive(Serialize)]
struct AblationLine {
    row: String,
    fil1: usize,
    fil0: usize,
    order: FilterOrder,
    mae: f64,
}

fn run_ablate(args: &AblateArgs, out: &Path) -> Result<(), CliError> {
    let threshold = Threshold::new(args.threshold)?;
    let manifest = load_manifest(&args.manifest)?;
    let streams = parse_pick_streams(&read(&args.streams)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.streams.display())))?;
    let truth: BTreeMap<String, usize> = manifest
        .counting_segments()
        .iter()
        .map(|s| (s.id(), s.true_count))
        .collect();
    let corpus = streams
        .into_iter()
        .map(|s| {
            let id = s.id();
            let &count = truth.get(&id).ok_or_else(|| {
                CliError::Validation(format!("stream {id} has no counting segment in the manifest"))
            })?;
            Ok((s, count))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let order: FilterOrder = args.order.into();
    let configs: Vec<FilterConfig> = if args.configs.is_empty() {
        match args.preset {
            PresetArg::Table6 => table6_preset(),
            PresetArg::Grid => FilterConfig::grid().collect(),
        }
    } else {
        args.configs
            .iter()
            .map(|&(a, b)| FilterConfig::new(a, b))
            .collect::<Result<_, _>>()?
    };
    let configs: Vec<FilterConfig> = configs.into_iter().map(|c| c.with_order(order)).collect();
    let rows = ablation_sweep(&corpus, &configs, threshold)?;

    let mut jsonl = output::header(ABLATION_FORMAT, ABLATION_VERSION);
    for (i, row) in rows.iter().enumerate() {
        let line = AblationLine {
            row: to_roman(i + 1),
            fil1: row.config.fil1_max_len(),
            fil0: row.config.fil0_max_len(),
            order: row.config.order(),
            mae: row.mae,
        };
        jsonl.push_str(&serde_json::to_string(&line).expect("ablation row serializes"));
        jsonl.push('\n');
    }
    write_atomic(&out.join("ablation.jsonl"), &jsonl)?;
    write_atomic(&out.join("ablation.txt"), &render_ablation_table(&rows))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            e.exit_code()
        }
    }
}
