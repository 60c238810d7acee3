//! Repetition counting from binarized pick streams.
//!
//! The pipeline is: threshold the per-frame pick probabilities, erase short
//! runs of 1s (spurious picks), fill short runs of 0s (holes inside a pick),
//! then count 0→1 transitions. Each counted transition marks the start of
//! one repetition.
//!
//! Run filtering uses maximal runs. Runs touching either end of the sequence
//! follow the same length rule as interior runs; the only exception is a run
//! spanning the whole sequence, which has no neighbour to merge into and is
//! left as is.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::streams::{binarize, BinarySequence, PickStream, Threshold};

/// Largest run length either filter accepts.
pub const MAX_FILTER_LEN: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterConfigError {
    #[error("{name} must be in 0..={MAX_FILTER_LEN}, got {value}")]
    OutOfRange { name: &'static str, value: usize },
}

/// Which filter runs first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterOrder {
    /// Erase short 1-runs, then fill short 0-runs.
    #[default]
    OnesFirst,
    /// Fill short 0-runs, then erase short 1-runs.
    ZerosFirst,
}

/// Run-length thresholds for the two spike filters; 0 disables a filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FilterConfig {
    fil1_max_len: usize,
    fil0_max_len: usize,
    #[serde(default)]
    order: FilterOrder,
}

impl FilterConfig {
    pub fn new(fil1_max_len: usize, fil0_max_len: usize) -> Result<Self, FilterConfigError> {
        for (name, value) in [("fil1_max_len", fil1_max_len), ("fil0_max_len", fil0_max_len)] {
            if value > MAX_FILTER_LEN {
                return Err(FilterConfigError::OutOfRange { name, value });
            }
        }
        Ok(Self {
            fil1_max_len,
            fil0_max_len,
            order: FilterOrder::OnesFirst,
        })
    }

    /// Both filters off.
    pub fn disabled() -> Self {
        Self {
            fil1_max_len: 0,
            fil0_max_len: 0,
            order: FilterOrder::OnesFirst,
        }
    }

    pub fn with_order(mut self, order: FilterOrder) -> Self {
        self.order = order;
        self
    }

    pub fn fil1_max_len(&self) -> usize {
        self.fil1_max_len
    }

    pub fn fil0_max_len(&self) -> usize {
        self.fil0_max_len
    }

    pub fn order(&self) -> FilterOrder {
        self.order
    }

    /// Every configuration in `[0, 6]²` with the default order.
    pub fn grid() -> impl Iterator<Item = FilterConfig> {
        (0..=MAX_FILTER_LEN).flat_map(|a| {
            (0..=MAX_FILTER_LEN).map(move |b| FilterConfig {
                fil1_max_len: a,
                fil0_max_len: b,
                order: FilterOrder::OnesFirst,
            })
        })
    }
}

impl Default for FilterConfig {
    /// Erase 1-runs up to 5 frames, fill 0-runs up to 3 frames.
    fn default() -> Self {
        Self {
            fil1_max_len: 5,
            fil0_max_len: 3,
            order: FilterOrder::OnesFirst,
        }
    }
}

impl fmt::Display for FilterConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.fil1_max_len, self.fil0_max_len)?;
        if self.order == FilterOrder::ZerosFirst {
            f.write_str(" zeros-first")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub count: usize,
    /// Frame indices of the counted 0→1 transitions, ascending.
    pub edge_positions: Vec<usize>,
    pub filtered_sequence: BinarySequence,
}

/// Replaces every maximal run of `value` no longer than `max_len` with the
/// complementary value. `max_len == 0` is the identity.
pub fn filter_runs(seq: &BinarySequence, value: bool, max_len: usize) -> BinarySequence {
    let mut bits = seq.as_slice().to_vec();
    filter_runs_in_place(&mut bits, value, max_len);
    bits.into()
}

fn filter_runs_in_place(bits: &mut [bool], value: bool, max_len: usize) {
    let n = bits.len();
    if max_len == 0 || n == 0 {
        return;
    }
    let mut start = 0;
    while start < n {
        let run_value = bits[start];
        let end = bits[start..]
            .iter()
            .position(|&b| b != run_value)
            .map_or(n, |off| start + off);
        let whole = start == 0 && end == n;
        if run_value == value && end - start <= max_len && !whole {
            bits[start..end].fill(!value);
        }
        start = end;
    }
}

/// Runs both spike filters in the configured order.
pub fn apply_filter_pipeline(seq: &BinarySequence, config: &FilterConfig) -> BinarySequence {
    let mut bits = seq.as_slice().to_vec();
    match config.order {
        FilterOrder::OnesFirst => {
            filter_runs_in_place(&mut bits, true, config.fil1_max_len);
            filter_runs_in_place(&mut bits, false, config.fil0_max_len);
        }
        FilterOrder::ZerosFirst => {
            filter_runs_in_place(&mut bits, false, config.fil0_max_len);
            filter_runs_in_place(&mut bits, true, config.fil1_max_len);
        }
    }
    bits.into()
}

/// Counts indices `i` with `seq[i] = 1` and `i = 0` or `seq[i-1] = 0`.
pub fn count_rising_edges(seq: &BinarySequence) -> CountResult {
    let bits = seq.as_slice();
    let edge_positions: Vec<usize> = bits
        .iter()
        .enumerate()
        .filter(|&(i, &b)| b && (i == 0 || !bits[i - 1]))
        .map(|(i, _)| i)
        .collect();
    CountResult {
        count: edge_positions.len(),
        edge_positions,
        filtered_sequence: seq.clone(),
    }
}

/// Threshold, filter and count one stream. Edge positions are absolute
/// frame indices within the source video.
pub fn count_repetitions(
    stream: &PickStream,
    threshold: Threshold,
    config: &FilterConfig,
) -> CountResult {
    let filtered = apply_filter_pipeline(&binarize(stream, threshold), config);
    let mut result = count_rising_edges(&filtered);
    for pos in &mut result.edge_positions {
        *pos += stream.segment.start;
    }
    result
}
