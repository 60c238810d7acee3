use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::manifest::{exercise_type_of, segment_key, CountingSegment, ExerciseType, SessionManifest};
use crate::streams::{argmax, ClipPrediction, Task};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub task: Task,
    pub total: usize,
    pub correct: usize,
    /// Percentage in `[0, 100]`.
    pub top1_accuracy: f64,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectAccuracy {
    pub subject_id: String,
    pub total: usize,
    pub correct: usize,
    pub top1_accuracy: f64,
}

/// Top-1 accuracy and confusion matrix. Predictions must all share a task.
pub fn top1(
    predictions: &[ClipPrediction],
    truth: &BTreeMap<String, usize>,
) -> Result<ClassificationReport, EvalError> {
    let task = predictions.first().ok_or(EvalError::Empty)?.task;
    let k = task.num_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    for pred in predictions {
        if pred.task != task {
            return Err(EvalError::BadPrediction {
                clip_id: pred.clip_id.clone(),
                message: format!("task {} mixed with {task}", pred.task),
            });
        }
        let &actual = truth
            .get(&pred.clip_id)
            .ok_or_else(|| EvalError::MissingTruth(pred.clip_id.clone()))?;
        if actual >= k || pred.scores.len() != k {
            return Err(EvalError::BadPrediction {
                clip_id: pred.clip_id.clone(),
                message: format!("class {actual} or {} scores do not fit {k} classes", pred.scores.len()),
            });
        }
        confusion[actual][pred.argmax()] += 1;
    }
    let support: Vec<usize> = confusion.iter().map(|row| row.iter().sum()).collect();
    let correct: usize = (0..k).map(|i| confusion[i][i]).sum();
    let total = predictions.len();
    Ok(ClassificationReport {
        task,
        total,
        correct,
        top1_accuracy: 100.0 * correct as f64 / total as f64,
        confusion,
        support,
    })
}

/// Top-1 accuracy per subject, subjects in manifest order. Clip ids are
/// either a video id or a segment key of one.
pub fn accuracy_by_subject(
    predictions: &[ClipPrediction],
    truth: &BTreeMap<String, usize>,
    manifest: &SessionManifest,
) -> Result<Vec<SubjectAccuracy>, EvalError> {
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for pred in predictions {
        let &actual = truth
            .get(&pred.clip_id)
            .ok_or_else(|| EvalError::MissingTruth(pred.clip_id.clone()))?;
        let video_id = pred.clip_id.split('@').next().unwrap_or_default();
        let video = manifest
            .video(video_id)
            .ok_or_else(|| EvalError::UnknownVideo(pred.clip_id.clone()))?;
        let entry = tally.entry(video.subject_id.as_str()).or_default();
        entry.0 += 1;
        entry.1 += (pred.argmax() == actual) as usize;
    }
    Ok(manifest
        .subjects()
        .into_iter()
        .filter_map(|subject| {
            let &(total, correct) = tally.get(subject.as_str())?;
            Some(SubjectAccuracy {
                subject_id: subject,
                total,
                correct,
                top1_accuracy: 100.0 * correct as f64 / total as f64,
            })
        })
        .collect())
}

/// Recognition ground truth: video id → class index.
pub fn recognition_truth(manifest: &SessionManifest) -> BTreeMap<String, usize> {
    manifest
        .videos()
        .iter()
        .map(|v| (v.video_id.clone(), v.label.index()))
        .collect()
}

/// Form ground truth keyed by `<video_id>@<start>-<end>`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormTruth {
    /// 0 = correct, 1 = incorrect.
    pub truth: BTreeMap<String, usize>,
    /// Segments whose verdict is `discarded`; excluded from scoring.
    pub discarded: BTreeSet<String>,
}

pub fn form_truth(manifest: &SessionManifest) -> FormTruth {
    let mut out = FormTruth::default();
    for video in manifest.videos() {
        for form in &video.form_labels {
            let key = segment_key(&video.video_id, form.segment);
            match form.verdict.class_index() {
                Some(class) => {
                    out.truth.insert(key, class);
                }
                None => {
                    out.discarded.insert(key);
                }
            }
        }
    }
    out
}

/// True iff scaling every score vector by `scale` keeps every argmax.
/// Non-positive or non-finite scales are rejected with `false`.
pub fn argmax_invariance_check(predictions: &[ClipPrediction], scale: f64) -> bool {
    if !(scale.is_finite() && scale > 0.0) {
        return false;
    }
    predictions.iter().all(|p| {
        let scaled: Vec<f64> = p.scores.iter().map(|s| s * scale).collect();
        argmax(&scaled) == p.argmax()
    })
}

/// MAE and the |e| ∈ {0, 1, 2, >2} buckets as percentages of samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorStats {
    pub samples: usize,
    pub mae: f64,
    pub bucket_e0: f64,
    pub bucket_e1: f64,
    pub bucket_e2: f64,
    pub bucket_egt2: f64,
}

impl ErrorStats {
    pub fn from_abs_errors(errors: &[usize]) -> Option<ErrorStats> {
        if errors.is_empty() {
            return None;
        }
        let n = errors.len() as f64;
        let mut buckets = [0usize; 4];
        for &e in errors {
            buckets[e.min(3)] += 1;
        }
        let pct = |c: usize| 100.0 * c as f64 / n;
        Some(ErrorStats {
            samples: errors.len(),
            mae: errors.iter().sum::<usize>() as f64 / n,
            bucket_e0: pct(buckets[0]),
            bucket_e1: pct(buckets[1]),
            bucket_e2: pct(buckets[2]),
            bucket_egt2: pct(buckets[3]),
        })
    }

    pub fn bucket_sum(&self) -> f64 {
        self.bucket_e0 + self.bucket_e1 + self.bucket_e2 + self.bucket_egt2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectStats {
    pub subject_id: String,
    #[serde(flatten)]
    pub stats: ErrorStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingReport {
    pub overall: ErrorStats,
    /// Left- and right-hand variants pooled per exercise type.
    pub per_exercise: BTreeMap<ExerciseType, ErrorStats>,
    pub per_subject: Vec<SubjectStats>,
}

/// Scores predicted counts against counting segments.
///
/// `pred_counts` is keyed by segment id (`<video_id>@<start>-<end>`).
pub fn counting_report(
    pred_counts: &BTreeMap<String, usize>,
    segments: &[CountingSegment],
    manifest: &SessionManifest,
) -> Result<CountingReport, EvalError> {
    let mut all = Vec::with_capacity(segments.len());
    let mut by_type: BTreeMap<ExerciseType, Vec<usize>> = BTreeMap::new();
    let mut by_subject: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for seg in segments {
        let id = seg.id();
        let &pred = pred_counts
            .get(&id)
            .ok_or_else(|| EvalError::MissingPrediction(id.clone()))?;
        let video = manifest
            .video(&seg.video_id)
            .ok_or_else(|| EvalError::UnknownVideo(id.clone()))?;
        let err = pred.abs_diff(seg.true_count);
        all.push(err);
        by_type.entry(exercise_type_of(video.label)).or_default().push(err);
        by_subject.entry(video.subject_id.as_str()).or_default().push(err);
    }
    let overall = ErrorStats::from_abs_errors(&all).ok_or(EvalError::Empty)?;
    let per_exercise = by_type
        .into_iter()
        .filter_map(|(t, errs)| Some((t, ErrorStats::from_abs_errors(&errs)?)))
        .collect();
    let per_subject = manifest
        .subjects()
        .into_iter()
        .filter_map(|subject| {
            let stats = ErrorStats::from_abs_errors(by_subject.get(subject.as_str())?)?;
            Some(SubjectStats {
                subject_id: subject,
                stats,
            })
        })
        .collect();
    Ok(CountingReport {
        overall,
        per_exercise,
        per_subject,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::{
        ExerciseLabel, FormLabel, FormVerdict, FrameSpan, Hand, RepetitionInterval, VideoRecord,
    };

    fn rec(id: &str, class: usize) -> ClipPrediction {
        let mut scores = vec![0.0; 25];
        scores[class] = 1.0;
        ClipPrediction::new(id, Task::Recognition, scores).unwrap()
    }

    #[test]
    fn top1_fixtures() {
        let truth: BTreeMap<String, usize> =
            [("a".into(), 1), ("b".into(), 2), ("c".into(), 3), ("d".into(), 4)].into();
        let r = top1(&[rec("a", 1), rec("b", 2)], &truth).unwrap();
        assert_eq!(r.top1_accuracy, 100.0);
        let r = top1(&[rec("a", 1), rec("b", 2), rec("c", 3), rec("d", 0)], &truth).unwrap();
        assert_eq!(r.top1_accuracy, 75.0);
        assert_eq!(r.support[4], 1);
        assert_eq!(r.confusion[4][0], 1);

        let tie = ClipPrediction::new("t", Task::Form, vec![0.2, 0.2]).unwrap();
        let r = top1(&[tie], &[("t".into(), 0)].into()).unwrap();
        assert_eq!(r.correct, 1);
        assert_eq!(r.confusion.len(), 2);
    }

    #[test]
    fn top1_errors() {
        let truth: BTreeMap<String, usize> = [("a".into(), 1)].into();
        assert_eq!(
            top1(&[rec("zz", 1)], &truth).unwrap_err(),
            EvalError::MissingTruth("zz".into())
        );
        assert_eq!(top1(&[], &truth).unwrap_err(), EvalError::Empty);
        let form = ClipPrediction::new("a", Task::Form, vec![1.0, 0.0]).unwrap();
        assert!(top1(&[rec("a", 1), form], &truth).is_err());
    }

    #[test]
    fn invariance() {
        let preds = vec![
            rec("a", 3),
            ClipPrediction::new("b", Task::Form, vec![-2.0, 0.5]).unwrap(),
        ];
        assert!(argmax_invariance_check(&preds, 2.0));
        assert!(argmax_invariance_check(&preds, 1.0));
        assert!(argmax_invariance_check(&[], 3.0));
        assert!(!argmax_invariance_check(&preds, -1.0));
    }

    fn counting_fixture(true_counts: &[usize]) -> (SessionManifest, Vec<CountingSegment>) {
        let mut videos = Vec::new();
        let mut segments = Vec::new();
        for (i, &c) in true_counts.iter().enumerate() {
            let label = if i % 2 == 0 {
                ExerciseLabel::new(ExerciseType::HandSlide, Hand::Left).unwrap()
            } else {
                ExerciseLabel::new(ExerciseType::HandSlide, Hand::Right).unwrap()
            };
            let reps: Vec<_> = (0..c).map(|r| RepetitionInterval::new(r * 10, r * 10 + 10)).collect();
            videos.push(VideoRecord {
                video_id: format!("v{i}"),
                subject_id: format!("S{}", i % 2),
                label,
                fps: 30.0,
                num_frames: c * 10,
                repetitions: reps,
                form_labels: vec![],
            });
            segments.push(CountingSegment {
                video_id: format!("v{i}"),
                segment: FrameSpan::new(0, c * 10),
                true_count: c,
            });
        }
        (SessionManifest::new(videos, segments.clone()).unwrap(), segments)
    }

    fn preds(segs: &[CountingSegment], counts: &[usize]) -> BTreeMap<String, usize> {
        segs.iter().zip(counts).map(|(s, &c)| (s.id(), c)).collect()
    }

    #[test]
    fn counting_examples() {
        let (m, segs) = counting_fixture(&[3, 7]);
        let r = counting_report(&preds(&segs, &[3, 5]), &segs, &m).unwrap();
        assert_eq!(r.overall.mae, 1.0);
        assert_eq!(
            (r.overall.bucket_e0, r.overall.bucket_e1, r.overall.bucket_e2, r.overall.bucket_egt2),
            (50.0, 0.0, 50.0, 0.0)
        );
        let r = counting_report(&preds(&segs, &[3, 7]), &segs, &m).unwrap();
        assert_eq!(r.overall.mae, 0.0);
        assert_eq!(r.overall.bucket_e0, 100.0);

        let (m, segs) = counting_fixture(&[1, 2, 4, 1]);
        let r = counting_report(&preds(&segs, &[1, 1, 1, 4]), &segs, &m).unwrap();
        assert_eq!(r.overall.mae, 1.75);
        assert_eq!(
            (r.overall.bucket_e0, r.overall.bucket_e1, r.overall.bucket_e2, r.overall.bucket_egt2),
            (25.0, 25.0, 0.0, 50.0)
        );
        // left and right pooled into one row
        assert_eq!(r.per_exercise.len(), 1);
        assert_eq!(r.per_exercise[&ExerciseType::HandSlide].samples, 4);
        assert_eq!(r.per_subject.len(), 2);
    }

    #[test]
    fn counting_missing_prediction() {
        let (m, segs) = counting_fixture(&[2]);
        let err = counting_report(&BTreeMap::new(), &segs, &m).unwrap_err();
        assert_eq!(err, EvalError::MissingPrediction("v0@0-20".into()));
    }

    #[test]
    fn form_truth_skips_discarded() {
        let video = VideoRecord {
            video_id: "v".into(),
            subject_id: "S".into(),
            label: ExerciseLabel::new(ExerciseType::PenSpin, Hand::Left).unwrap(),
            fps: 30.0,
            num_frames: 900,
            repetitions: vec![],
            form_labels: vec![
                FormLabel { segment: FrameSpan::new(0, 300), verdict: FormVerdict::Correct },
                FormLabel { segment: FrameSpan::new(300, 600), verdict: FormVerdict::Discarded },
                FormLabel { segment: FrameSpan::new(600, 900), verdict: FormVerdict::Incorrect },
            ],
        };
        let m = SessionManifest::new(vec![video], vec![]).unwrap();
        let ft = form_truth(&m);
        assert_eq!(ft.truth.len(), 2);
        assert_eq!(ft.truth["v@600-900"], 1);
        assert!(ft.discarded.contains("v@300-600"));
    }
}
