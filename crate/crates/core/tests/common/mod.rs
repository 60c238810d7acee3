#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};
use walkdir::WalkDir;

/// Maximal runs as (value, length) pairs.
pub fn decompose(bits: &[bool]) -> Vec<(bool, usize)> {
    let mut runs: Vec<(bool, usize)> = Vec::new();
    for &b in bits {
        match runs.last_mut() {
            Some((v, n)) if *v == b => *n += 1,
            _ => runs.push((b, 1)),
        }
    }
    runs
}

pub fn recompose(runs: &[(bool, usize)]) -> Vec<bool> {
    runs.iter()
        .flat_map(|&(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

/// Brute-force filter: flip every maximal run of `value` no longer than
/// `max_len`, unless it is the only run.
pub fn oracle_filter(bits: &[bool], value: bool, max_len: usize) -> Vec<bool> {
    let runs = decompose(bits);
    if runs.len() <= 1 {
        return bits.to_vec();
    }
    let flipped: Vec<(bool, usize)> = runs
        .into_iter()
        .map(|(v, n)| if v == value && n <= max_len { (!v, n) } else { (v, n) })
        .collect();
    recompose(&flipped)
}

/// 1-runs first, then 0-runs.
pub fn oracle_pipeline(bits: &[bool], fil1: usize, fil0: usize) -> Vec<bool> {
    oracle_filter(&oracle_filter(bits, true, fil1), false, fil0)
}

pub fn oracle_count(bits: &[bool]) -> usize {
    decompose(bits).iter().filter(|(v, _)| *v).count()
}

/// All bit patterns of the given length.
pub fn all_sequences(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << len).map(move |m| (0..len).map(|i| m >> i & 1 == 1).collect())
}

/// SHA-256 of every file under `dir`, keyed by relative path.
pub fn hash_tree(dir: &Path) -> BTreeMap<String, String> {
    WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let p = e.path();
            let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
            let digest = Sha256::digest(std::fs::read(p).unwrap());
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            (rel, hex)
        })
        .collect()
}
