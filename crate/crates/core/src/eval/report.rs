//! Learning-curve tables and F1 consistency checks.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::corpus::EvalMode;
use super::metrics::{f1_score, Metrics};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub k: usize,
    pub mode: EvalMode,
    pub metrics: Metrics,
}

/// One printed line: micro or macro figures of a row.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportLine {
    pub k: usize,
    pub mode: EvalMode,
    pub aggregation: &'static str,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn report_lines(rows: &[CurveRow]) -> Vec<ReportLine> {
    let mut sorted: Vec<&CurveRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.k);
    let mut out = Vec::new();
    for r in sorted {
        let m = &r.metrics;
        out.push(ReportLine {
            k: r.k,
            mode: r.mode,
            aggregation: "micro",
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
        });
        if let (Some(p), Some(rc), Some(f)) = (m.mean_precision, m.mean_recall, m.mean_f1) {
            out.push(ReportLine {
                k: r.k,
                mode: r.mode,
                aggregation: "macro",
                precision: p,
                recall: rc,
                f1: f,
            });
        }
    }
    out
}

pub const CSV_HEADER: &str = "k,precision,recall,f1,mode,aggregation";

/// Rows sorted by k, figures at 4 decimals.
pub fn learning_curve_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for l in report_lines(rows) {
        let _ = writeln!(
            s,
            "{},{:.4},{:.4},{:.4},{},{}",
            l.k, l.precision, l.recall, l.f1, l.mode, l.aggregation
        );
    }
    s
}

pub fn learning_curve_table(title: &str, rows: &[CurveRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(
        s,
        "{:>5}  {:<16} {:<6} {:>9} {:>9} {:>9}",
        "k", "mode", "agg", "precision", "recall", "f1"
    );
    for l in report_lines(rows) {
        let _ = writeln!(
            s,
            "{:>5}  {:<16} {:<6} {:>9.4} {:>9.4} {:>9.4}",
            l.k,
            l.mode.name(),
            l.aggregation,
            l.precision,
            l.recall,
            l.f1
        );
    }
    s
}

/// A row whose printed F1 disagrees with `2PR/(P+R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct F1Mismatch {
    pub row: String,
    pub printed: f64,
    pub computed: f64,
}

/// Recomputes F1 for each `(name, precision, recall, f1)` row and returns
/// those off by more than `tol`.
pub fn check_f1_consistency(rows: &[(String, f64, f64, f64)], tol: f64) -> Vec<F1Mismatch> {
    rows.iter()
        .filter_map(|(name, p, r, f)| {
            let computed = f1_score(*p, *r);
            ((computed - f).abs() > tol).then(|| F1Mismatch {
                row: name.clone(),
                printed: *f,
                computed,
            })
        })
        .collect()
}

/// Parses a CSV produced by [`learning_curve_csv`] into
/// `(row name, precision, recall, f1)` tuples.
pub fn parse_curve_csv(csv: &str) -> Vec<(String, f64, f64, f64)> {
    csv.lines()
        .skip(1)
        .filter_map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return None;
            }
            let num = |i: usize| f[i].parse::<f64>().ok();
            Some((format!("k={} {} {}", f[0], f[4], f[5]), num(1)?, num(2)?, num(3)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::metrics::Counts;

    fn row(k: usize, tp: usize, fp: usize, fn_: usize) -> CurveRow {
        CurveRow {
            k,
            mode: EvalMode::End2end,
            metrics: Metrics::from_counts(Counts { tp, fp, fn_ }),
        }
    }

    #[test]
    fn single_row_table() {
        let csv = learning_curve_csv(&[row(10, 3, 1, 0)]);
        assert_eq!(csv, "k,precision,recall,f1,mode,aggregation\n10,0.7500,1.0000,0.8571,end2end,micro\n");
        assert_eq!(learning_curve_table("t", &[row(10, 3, 1, 0)]).lines().count(), 3);
    }

    #[test]
    fn rows_sorted_by_k() {
        let rows: Vec<CurveRow> = (1..=7).rev().map(|i| row(i * 10, i, 7 - i, 1)).collect();
        let lines = report_lines(&rows);
        assert_eq!(lines.len(), 7);
        assert!(lines.windows(2).all(|w| w[0].k < w[1].k));
    }

    #[test]
    fn csv_f1_is_consistent() {
        let rows: Vec<CurveRow> = (1..=7).map(|i| row(i * 10, 3 * i, 11 - i, 2 + i)).collect();
        let parsed = parse_curve_csv(&learning_curve_csv(&rows));
        assert_eq!(parsed.len(), 7);
        assert!(check_f1_consistency(&parsed, 0.0005).is_empty());
    }

    #[test]
    fn mismatch_detected() {
        let rows = vec![("ok".to_string(), 0.7292, 0.8132, 0.7689), ("bad".to_string(), 0.8977, 0.8343, 0.8659)];
        let bad = check_f1_consistency(&rows, 0.001);
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].row, "bad");
        assert!((bad[0].computed - 0.8648).abs() < 1e-4);
    }
}
