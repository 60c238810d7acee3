use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::manifest::SessionManifest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitMode {
    /// Stratified by label; the test share is whatever train and val leave.
    EqualDistribution { train_fraction: f64, val_fraction: f64 },
    /// All videos of one subject form the test set; the rest is divided
    /// into train and val.
    Loocv { test_subject: String, val_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    #[serde(flatten)]
    pub mode: SplitMode,
    pub seed: u64,
}

impl SplitSpec {
    /// 80/10/10 train/val/test.
    pub fn equal(seed: u64) -> Self {
        Self::equal_with(0.8, 0.1, seed)
    }

    pub fn equal_with(train_fraction: f64, val_fraction: f64, seed: u64) -> Self {
        Self {
            mode: SplitMode::EqualDistribution {
                train_fraction,
                val_fraction,
            },
            seed,
        }
    }

    /// Leave `subject` out; remaining videos go 90/10 to train/val.
    pub fn loocv(subject: impl Into<String>, seed: u64) -> Self {
        Self {
            mode: SplitMode::Loocv {
                test_subject: subject.into(),
                val_fraction: 0.1,
            },
            seed,
        }
    }

    fn validate(&self) -> Result<(), EvalError> {
        let fraction_ok = |f: f64| f.is_finite() && f > 0.0 && f < 1.0;
        match &self.mode {
            SplitMode::EqualDistribution {
                train_fraction,
                val_fraction,
            } => {
                let test = 1.0 - train_fraction - val_fraction;
                if !fraction_ok(*train_fraction) || !fraction_ok(*val_fraction) || test <= 1e-9 {
                    return Err(EvalError::InvalidSplit(format!(
                        "fractions train={train_fraction} val={val_fraction} must be positive and leave a positive test share"
                    )));
                }
            }
            SplitMode::Loocv { val_fraction, .. } => {
                if !fraction_ok(*val_fraction) {
                    return Err(EvalError::InvalidSplit(format!(
                        "val_fraction must be in (0, 1), got {val_fraction}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Video ids per part, each in manifest order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Splits {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    /// Classes too small to be present in every part.
    pub warnings: Vec<String>,
}

/// `round(n * fraction)` with halves rounded up.
fn share(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction + 0.5 + 1e-9).floor() as usize).min(n)
}

/// Largest-remainder apportionment of `total` items over classes of the
/// given sizes. Ties in the remainder go to the lower class.
fn apportion(sizes: &[usize], total: usize) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    if n == 0 {
        return vec![0; sizes.len()];
    }
    let mut alloc: Vec<usize> = sizes.iter().map(|&s| total * s / n).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&c| std::cmp::Reverse(total * sizes[c] % n));
    let mut left = total - alloc.iter().sum::<usize>();
    for c in order {
        if left == 0 {
            break;
        }
        if alloc[c] < sizes[c] {
            alloc[c] += 1;
            left -= 1;
        }
    }
    alloc
}

/// Deterministic train/val/test partition of the manifest's videos.
pub fn make_splits(manifest: &SessionManifest, spec: &SplitSpec) -> Result<Splits, EvalError> {
    spec.validate()?;
    let position: HashMap<&str, usize> = manifest
        .videos()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.video_id.as_str(), i))
        .collect();

    let (pool, mut test): (Vec<_>, Vec<_>) = match &spec.mode {
        SplitMode::Loocv { test_subject, .. } => {
            if !manifest.videos().iter().any(|v| &v.subject_id == test_subject) {
                return Err(EvalError::UnknownSubject(test_subject.clone()));
            }
            manifest
                .videos()
                .iter()
                .partition(|v| &v.subject_id != test_subject)
        }
        SplitMode::EqualDistribution { .. } => (manifest.videos().iter().collect(), Vec::new()),
    };
    let mut test: Vec<String> = test.drain(..).map(|v| v.video_id.clone()).collect();

    let mut classes: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for v in &pool {
        classes
            .entry(v.label.index())
            .or_default()
            .push(v.video_id.as_str());
    }
    for (&label, ids) in classes.iter_mut() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(label as u64);
        ids.shuffle(&mut rng);
    }
    let sizes: Vec<usize> = classes.values().map(Vec::len).collect();
    let n = pool.len();

    let (parts, test_alloc, val_alloc) = match &spec.mode {
        SplitMode::Loocv { val_fraction, .. } => {
            (2, vec![0; sizes.len()], apportion(&sizes, share(n, *val_fraction)))
        }
        SplitMode::EqualDistribution {
            train_fraction,
            val_fraction,
        } => {
            let test_total = share(n, 1.0 - train_fraction - val_fraction);
            let val_total = share(n, *val_fraction).min(n - test_total);
            let test_alloc = apportion(&sizes, test_total);
            let rest: Vec<usize> = sizes.iter().zip(&test_alloc).map(|(s, t)| s - t).collect();
            (3, test_alloc, apportion(&rest, val_total))
        }
    };

    let mut splits = Splits::default();
    for (c, (label, ids)) in classes.iter().enumerate() {
        if ids.len() < parts {
            let name = crate::manifest::ExerciseLabel::from_index(*label)
                .map(|l| l.to_string())
                .unwrap_or_default();
            splits.warnings.push(format!(
                "class {name} has {} video(s), fewer than the {parts} split parts",
                ids.len()
            ));
        }
        let (t, v) = (test_alloc[c], val_alloc[c]);
        test.extend(ids[..t].iter().map(|s| s.to_string()));
        splits.val.extend(ids[t..t + v].iter().map(|s| s.to_string()));
        splits.train.extend(ids[t + v..].iter().map(|s| s.to_string()));
    }
    splits.test = test;
    for part in [&mut splits.train, &mut splits.val, &mut splits.test] {
        part.sort_by_key(|id| position[id.as_str()]);
    }
    Ok(splits)
}
