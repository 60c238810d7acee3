//! Plain-text tables. Column sets follow the published result tables so
//! numbers can be compared side by side.

use super::metrics::CountingReport;

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub method: String,
    pub val: Option<f64>,
    pub test: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRow {
    pub method: String,
    /// One entry per subject column; `None` renders as `-`.
    pub values: Vec<Option<f64>>,
}

fn render(header: &[String], rows: &[Vec<String>], footer: Option<&[String]>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows.iter().chain(footer.map(|f| f.to_vec()).iter()) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        format!("{}\n", parts.join(" | ").trim_end())
    };
    let rule: String = {
        let parts: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        format!("{}\n", parts.join("-+-"))
    };
    let mut out = line(header);
    out.push_str(&rule);
    for row in rows {
        out.push_str(&line(row));
    }
    if let Some(footer) = footer {
        out.push_str(&rule);
        out.push_str(&line(footer));
    }
    out
}

fn strings(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

/// Exercise type | MAE | |e| = 0 [%] | |e| = 1 [%] | |e| = 2 [%] | |e| > 2 [%],
/// one row per exercise type present, then an `Overall` row.
pub fn render_counting_table(report: &CountingReport) -> String {
    let header = strings(&[
        "Exercise type",
        "MAE",
        "|e| = 0 [%]",
        "|e| = 1 [%]",
        "|e| = 2 [%]",
        "|e| > 2 [%]",
    ]);
    let cells = |name: String, s: &super::ErrorStats| {
        vec![
            name,
            format!("{:.2}", s.mae),
            format!("{:.1}", s.bucket_e0),
            format!("{:.1}", s.bucket_e1),
            format!("{:.1}", s.bucket_e2),
            format!("{:.1}", s.bucket_egt2),
        ]
    };
    let rows: Vec<Vec<String>> = report
        .per_exercise
        .iter()
        .map(|(t, s)| cells(t.caption(), s))
        .collect();
    let footer = cells("Overall".into(), &report.overall);
    render(&header, &rows, Some(&footer))
}

/// Method | Val. [%] | Test [%].
pub fn render_accuracy_table(rows: &[AccuracyRow]) -> String {
    let header = strings(&["Method", "Val. [%]", "Test [%]"]);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.clone(),
                r.val.map_or_else(|| "-".into(), |v| format!("{v:.2}")),
                format!("{:.2}", r.test),
            ]
        })
        .collect();
    render(&header, &body, None)
}

/// Method followed by one column per subject, headed by `caption`.
pub fn render_subject_table(caption: &str, subjects: &[String], rows: &[SubjectRow]) -> String {
    let mut header = vec!["Method".to_string()];
    header.extend(subjects.iter().cloned());
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.method.clone()];
            cells.extend(
                (0..subjects.len())
                    .map(|i| r.values.get(i).copied().flatten())
                    .map(|v| v.map_or_else(|| "-".into(), |v| format!("{v:.2}"))),
            );
            cells
        })
        .collect();
    format!("{caption}\n{}", render(&header, &body, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::ErrorStats;
    use crate::manifest::ExerciseType;

    #[test]
    fn counting_table_columns() {
        let stats = ErrorStats::from_abs_errors(&[0, 1, 3, 3]).unwrap();
        let report = CountingReport {
            overall: stats.clone(),
            per_exercise: [(ExerciseType::TowelHandClosing, stats)].into(),
            per_subject: vec![],
        };
        let table = render_counting_table(&report);
        let lines: Vec<&str> = table.lines().collect();
        let header: Vec<&str> = lines[0].split(" | ").map(str::trim).collect();
        assert_eq!(
            header,
            ["Exercise type", "MAE", "|e| = 0 [%]", "|e| = 1 [%]", "|e| = 2 [%]", "|e| > 2 [%]"]
        );
        assert!(lines[2].starts_with("I - Towel Hand Closing"));
        let overall: Vec<&str> = lines[4].split(" | ").map(str::trim).collect();
        assert_eq!(overall, ["Overall", "1.75", "25.0", "25.0", "0.0", "50.0"]);
    }

    #[test]
    fn accuracy_and_subject_tables() {
        let t = render_accuracy_table(&[AccuracyRow {
            method: "m".into(),
            val: None,
            test: 98.55,
        }]);
        assert!(t.lines().next().unwrap().contains("Val. [%]"));
        assert!(t.contains("98.55"));
        let t = render_subject_table(
            "Repetition counting - MAE",
            &["S-I".into(), "S-II".into()],
            &[SubjectRow {
                method: "pick+C".into(),
                values: vec![Some(4.13)],
            }],
        );
        assert!(t.starts_with("Repetition counting - MAE\nMethod"));
        assert!(t.contains("4.13 |    -") || t.trim_end().ends_with('-'));
    }
}
