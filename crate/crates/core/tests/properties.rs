use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;
use rehab_core::evaluation::{counting_report, make_splits, top1, SplitSpec};
use rehab_core::manifest::{
    derive_pick_labels, parse_manifest, sample_counting_segments, RepetitionInterval,
};
use rehab_core::repcount::{count_repetitions, count_rising_edges};
use rehab_core::streams::{binarize, parse_pick_streams, write_pick_streams};
use rehab_core::{
    ClipPrediction, CountingSegment, ExerciseLabel, FilterConfig, FormLabel, FormVerdict,
    FrameSpan, PickStream, SessionManifest, Task, Threshold, VideoRecord,
};

/// Repetitions laid out from `(len, gap)` pairs, with a leading offset.
fn layout(offset: usize, parts: &[(usize, usize)]) -> (Vec<RepetitionInterval>, usize) {
    let mut reps = Vec::new();
    let mut at = offset;
    for &(len, gap) in parts {
        reps.push(RepetitionInterval::new(at, at + len));
        at += len + gap;
    }
    (reps, at + 1)
}

prop_compose! {
    fn arb_video(idx: usize, subjects: usize)(
        label in 0usize..25,
        subject in 0..subjects,
        offset in 0usize..20,
        parts in prop::collection::vec((6usize..40, 0usize..10), 0..25),
        verdicts in prop::collection::vec(0u8..3, 0..4),
    ) -> VideoRecord {
        let (repetitions, num_frames) = layout(offset, &parts);
        let block = num_frames.div_ceil(verdicts.len().max(1));
        let form_labels = verdicts
            .iter()
            .enumerate()
            .filter(|(i, _)| i * block < num_frames)
            .map(|(i, v)| FormLabel {
                segment: FrameSpan::new(i * block, ((i + 1) * block).min(num_frames)),
                verdict: [FormVerdict::Correct, FormVerdict::Incorrect, FormVerdict::Discarded][*v as usize],
            })
            .collect();
        VideoRecord {
            video_id: format!("v{idx:03}"),
            subject_id: format!("S{subject}"),
            label: ExerciseLabel::from_index(label).unwrap(),
            fps: 30.0,
            num_frames,
            repetitions,
            form_labels,
        }
    }
}

fn arb_manifest() -> impl Strategy<Value = SessionManifest> {
    (1usize..30, 1usize..10, any::<u64>())
        .prop_flat_map(|(n, subjects, seed)| {
            let videos: Vec<_> = (0..n).map(|i| arb_video(i, subjects)).collect();
            (videos, Just(seed))
        })
        .prop_map(|(videos, seed)| {
            let mut segments = Vec::new();
            for v in &videos {
                if !v.repetitions.is_empty() {
                    segments.extend(sample_counting_segments(v, 20, 3, seed).unwrap().segments);
                }
            }
            SessionManifest::new(videos, segments).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn manifest_round_trip(m in arb_manifest()) {
        let text = m.to_jsonl();
        let parsed = parse_manifest(text.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &m);
        prop_assert_eq!(parsed.to_jsonl(), text);
    }

    #[test]
    fn pick_runs_match_repetitions(m in arb_manifest()) {
        for v in m.videos() {
            let labels = derive_pick_labels(v, 6).unwrap();
            prop_assert_eq!(labels.len(), v.num_frames);
            let spaced = v.repetitions.windows(2).all(|w| w[1].start_frame - w[0].start_frame > 6);
            if spaced {
                prop_assert_eq!(count_rising_edges(&labels).count, v.repetitions.len());
            }
            for (f, &bit) in labels.as_slice().iter().enumerate() {
                let expected = v.repetitions.iter().any(|r| r.start_frame <= f && f < r.start_frame + 6);
                prop_assert_eq!(bit, expected);
            }
        }
    }

    #[test]
    fn sampled_segments_count_by_brute_force(m in arb_manifest(), seed in any::<u64>(), n in 1usize..50) {
        for v in m.videos().iter().filter(|v| !v.repetitions.is_empty()) {
            let sample = sample_counting_segments(v, 20, n, seed).unwrap();
            let distinct: HashSet<_> = sample.segments.iter().map(|s| s.segment).collect();
            prop_assert_eq!(distinct.len(), sample.segments.len());
            for seg in &sample.segments {
                let brute = v.repetitions.iter()
                    .filter(|r| seg.segment.start <= r.start_frame && r.start_frame < seg.segment.end)
                    .count();
                prop_assert_eq!(brute, seg.true_count);
                prop_assert!((1..=20).contains(&seg.true_count));
            }
            prop_assert_eq!(sample_counting_segments(v, 20, n, seed).unwrap(), sample);
        }
    }

    #[test]
    fn binarize_monotone(probs in prop::collection::vec(0.0f64..=1.0, 0..100), a in 0.001f64..0.999, b in 0.001f64..0.999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s = PickStream::new("v", FrameSpan::new(0, probs.len()), probs).unwrap();
        let low = binarize(&s, Threshold::new(lo).unwrap());
        let high = binarize(&s, Threshold::new(hi).unwrap());
        prop_assert_eq!(low.len(), s.len());
        prop_assert_eq!(high.len(), s.len());
        for (l, h) in low.as_slice().iter().zip(high.as_slice()) {
            prop_assert!(!h | l);
        }
    }

    #[test]
    fn stream_file_round_trip(probs in prop::collection::vec(0.0f64..=1.0, 0..50), start in 0usize..1000) {
        let s = PickStream::new("vid", FrameSpan::new(start, start + probs.len()), probs).unwrap();
        let text = write_pick_streams(std::slice::from_ref(&s));
        let parsed = parse_pick_streams(text.as_bytes()).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        for (a, b) in parsed[0].probs.iter().zip(&s.probs) {
            prop_assert!((a - b).abs() <= 5e-9 * b.abs());
        }
        // values already at 9 significant digits are reproduced bit for bit
        prop_assert_eq!(write_pick_streams(&parsed), text.clone());
        prop_assert_eq!(parse_pick_streams(text.as_bytes()).unwrap(), parsed);
    }

    /// Picks spaced by more than pick_width, idle gaps longer than the 0-run
    /// filter, pick width longer than the 1-run filter: exact count.
    #[test]
    fn clean_streams_count_exactly(
        offset in 0usize..10,
        parts in prop::collection::vec((6usize..30, 0usize..8), 1..21),
        fil1 in 0usize..6,
        fil0 in 0usize..4,
    ) {
        let (reps, num_frames) = layout(offset, &parts);
        let video = VideoRecord {
            video_id: "v".into(),
            subject_id: "S".into(),
            label: ExerciseLabel::from_index(0).unwrap(),
            fps: 30.0,
            num_frames,
            repetitions: reps,
            form_labels: vec![],
        };
        let pick_width = 6;
        let idle_ok = video.repetitions.windows(2).all(|w| w[1].start_frame - (w[0].start_frame + pick_width) > fil0);
        prop_assume!(idle_ok);
        let probs: Vec<f64> = derive_pick_labels(&video, pick_width).unwrap()
            .as_slice().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let stream = PickStream::new("v", video.full_span(), probs).unwrap();
        let r = count_repetitions(&stream, Threshold::default(), &FilterConfig::new(fil1, fil0).unwrap());
        prop_assert_eq!(r.count, video.repetitions.len());
        let starts: Vec<usize> = video.repetitions.iter().map(|r| r.start_frame).collect();
        // a leading idle run short enough to be filled moves the first edge to frame 0
        if offset > fil0 || offset == 0 {
            prop_assert_eq!(r.edge_positions, starts);
        }
    }

    #[test]
    fn splits_partition_videos(m in arb_manifest(), seed in any::<u64>()) {
        let ids: HashSet<String> = m.videos().iter().map(|v| v.video_id.clone()).collect();
        let check = |spec: &SplitSpec| -> Result<(), TestCaseError> {
            let s = make_splits(&m, spec).unwrap();
            let all: Vec<&String> = s.train.iter().chain(&s.val).chain(&s.test).collect();
            let set: HashSet<String> = all.iter().map(|s| s.to_string()).collect();
            prop_assert_eq!(all.len(), set.len());
            prop_assert_eq!(&set, &ids);
            prop_assert_eq!(make_splits(&m, spec).unwrap(), s);
            Ok(())
        };
        check(&SplitSpec::equal(seed))?;
        let mut folds = Vec::new();
        for subject in m.subjects() {
            check(&SplitSpec::loocv(subject.clone(), seed))?;
            let s = make_splits(&m, &SplitSpec::loocv(subject.clone(), seed)).unwrap();
            let rest = s.train.len() + s.val.len();
            prop_assert_eq!(s.val.len(), (rest as f64 * 0.1 + 0.5 + 1e-9).floor() as usize);
            folds.extend(s.test);
        }
        let fold_set: HashSet<String> = folds.iter().cloned().collect();
        prop_assert_eq!(folds.len(), ids.len());
        prop_assert_eq!(fold_set, ids);
    }

    #[test]
    fn top1_matches_brute_force(
        rows in prop::collection::vec((prop::collection::vec(-5.0f64..5.0, 25), 0usize..25), 1..60)
    ) {
        let preds: Vec<ClipPrediction> = rows.iter().enumerate()
            .map(|(i, (s, _))| ClipPrediction::new(format!("c{i}"), Task::Recognition, s.clone()).unwrap())
            .collect();
        let truth: BTreeMap<String, usize> = rows.iter().enumerate().map(|(i, (_, t))| (format!("c{i}"), *t)).collect();
        let report = top1(&preds, &truth).unwrap();
        let mut correct = 0;
        for (scores, t) in &rows {
            let mut best = 0;
            for k in 1..scores.len() {
                if scores[k] > scores[best] {
                    best = k;
                }
            }
            correct += (best == *t) as usize;
        }
        prop_assert_eq!(report.correct, correct);
        prop_assert!((report.top1_accuracy - 100.0 * correct as f64 / rows.len() as f64).abs() < 1e-9);
        let trace: usize = (0..25).map(|i| report.confusion[i][i]).sum();
        prop_assert_eq!(trace, correct);
        for (row, support) in report.confusion.iter().zip(&report.support) {
            prop_assert_eq!(row.iter().sum::<usize>(), *support);
        }
    }

    #[test]
    fn counting_report_invariants(m in arb_manifest(), noise in prop::collection::vec(0usize..6, 200)) {
        let segs: Vec<CountingSegment> = m.counting_segments().to_vec();
        prop_assume!(!segs.is_empty());
        let preds: BTreeMap<String, usize> = segs.iter().enumerate()
            .map(|(i, s)| (s.id(), (s.true_count + noise[i % noise.len()]).saturating_sub(2)))
            .collect();
        let r = counting_report(&preds, &segs, &m).unwrap();
        prop_assert!((r.overall.bucket_sum() - 100.0).abs() <= 0.1);
        prop_assert!(r.overall.mae >= 0.0);
        let weighted: f64 = r.per_exercise.values().map(|s| s.mae * s.samples as f64).sum();
        let n: usize = r.per_exercise.values().map(|s| s.samples).sum();
        prop_assert_eq!(n, segs.len());
        prop_assert!((weighted / n as f64 - r.overall.mae).abs() < 1e-9);
        for s in r.per_exercise.values() {
            prop_assert!((s.bucket_sum() - 100.0).abs() <= 0.1);
        }
    }
}
