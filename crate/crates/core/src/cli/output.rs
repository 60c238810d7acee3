use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::manifest::{check_header, content_lines, header_line, FrameSpan};
use crate::repcount::CountResult;

pub const COUNTS_FORMAT: &str = "rest-hands-counts";
pub const COUNTS_VERSION: u32 = 1;
pub const SPLIT_FORMAT: &str = "rest-hands-split";
pub const SPLIT_VERSION: u32 = 1;
pub const ABLATION_FORMAT: &str = "rest-hands-ablation";
pub const ABLATION_VERSION: u32 = 1;

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `contents` to a sibling temp file, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// One line of a counts file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub segment_id: String,
    pub video_id: String,
    pub segment: FrameSpan,
    pub count: usize,
    pub edge_positions: Vec<usize>,
    /// Filtered binary sequence as a string of `0`/`1`.
    pub filtered: String,
}

impl CountRecord {
    pub fn new(video_id: &str, segment: FrameSpan, result: &CountResult) -> Self {
        Self {
            segment_id: crate::manifest::segment_key(video_id, segment),
            video_id: video_id.to_string(),
            segment,
            count: result.count,
            edge_positions: result.edge_positions.clone(),
            filtered: result.filtered_sequence.to_string(),
        }
    }
}

pub fn write_counts(records: &[CountRecord]) -> String {
    let mut out = header_line(COUNTS_FORMAT, COUNTS_VERSION);
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("count record serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_counts(bytes: &[u8]) -> Result<Vec<CountRecord>, CliError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| CliError::Validation(format!("counts file is not UTF-8: {e}")))?;
    let mut lines = content_lines(text);
    let Some((line, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    check_header(header, COUNTS_FORMAT, COUNTS_VERSION)
        .map_err(|m| CliError::Validation(format!("line {line}: bad header: {m}")))?;
    lines
        .map(|(line, text)| {
            serde_json::from_str(text)
                .map_err(|e| CliError::Validation(format!("line {line}: malformed record: {e}")))
        })
        .collect()
}

/// Split part file: header comment, then one video id per line.
pub fn write_split_part(part: &str, ids: &[String]) -> String {
    let mut out = format!("# format={SPLIT_FORMAT} version={SPLIT_VERSION} part={part}\n");
    for id in ids {
        out.push_str(id);
        out.push('\n');
    }
    out
}

pub fn parse_split_part(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn header(format: &str, version: u32) -> String {
    header_line(format, version)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::BinarySequence;

    #[test]
    fn counts_round_trip() {
        let result = CountResult {
            count: 1,
            edge_positions: vec![12],
            filtered_sequence: BinarySequence::from_bits(&[0, 0, 1, 1]).unwrap(),
        };
        let rec = CountRecord::new("v", FrameSpan::new(10, 14), &result);
        assert_eq!(rec.segment_id, "v@10-14");
        let text = write_counts(std::slice::from_ref(&rec));
        assert_eq!(parse_counts(text.as_bytes()).unwrap(), vec![rec]);
        assert!(parse_counts(b"{\"format\":\"other\",\"version\":1}\n").is_err());
    }

    #[test]
    fn split_part_round_trip() {
        let ids = vec!["a".to_string(), "b".to_string()];
        assert_eq!(parse_split_part(&write_split_part("test", &ids)), ids);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.txt");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
