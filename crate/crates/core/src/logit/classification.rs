use serde::Serialize;

use crate::error::{Error, Result};

/// Observed-by-predicted counts with the percentages of a classification table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationTable {
    pub labels: Vec<String>,
    /// Rows observed, columns predicted.
    pub counts: Vec<Vec<u64>>,
    /// Diagonal over row total, in percent (NaN for an empty row).
    pub row_percent_correct: Vec<f64>,
    /// Column total over grand total, in percent.
    pub column_percent: Vec<f64>,
    pub overall_percent_correct: f64,
}

impl ClassificationTable {
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = labels.len();
        if counts.len() != k || counts.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidArgument(format!("classification counts must be {k}x{k}")));
        }
        let total: u64 = counts.iter().flatten().sum();
        let trace: u64 = (0..k).map(|i| counts[i][i]).sum();
        let row_percent_correct = counts
            .iter()
            .enumerate()
            .map(|(i, r)| 100.0 * r[i] as f64 / r.iter().sum::<u64>() as f64)
            .collect();
        let column_percent = (0..k)
            .map(|j| 100.0 * counts.iter().map(|r| r[j]).sum::<u64>() as f64 / total as f64)
            .collect();
        Ok(ClassificationTable {
            labels,
            row_percent_correct,
            column_percent,
            overall_percent_correct: 100.0 * trace as f64 / total as f64,
            counts,
        })
    }

    /// Tallies paired observed/predicted class indices.
    pub fn from_labels(labels: Vec<String>, observed: &[usize], predicted: &[usize]) -> Result<Self> {
        if observed.len() != predicted.len() {
            return Err(Error::InvalidArgument(format!(
                "{} observed labels but {} predicted",
                observed.len(),
                predicted.len()
            )));
        }
        let k = labels.len();
        let mut counts = vec![vec![0u64; k]; k];
        for (&o, &p) in observed.iter().zip(predicted) {
            if o >= k || p >= k {
                return Err(Error::InvalidArgument(format!("unknown class label index {}", o.max(p))));
            }
            counts[o][p] += 1;
        }
        Self::from_counts(labels, counts)
    }

    /// Plain-text rendering with one-decimal percentages.
    pub fn render(&self) -> String {
        let mut out = String::from("observed \\ predicted");
        for l in &self.labels {
            out.push_str(&format!("\t{l}"));
        }
        out.push_str("\t% correct\n");
        for (i, row) in self.counts.iter().enumerate() {
            out.push_str(&self.labels[i]);
            for c in row {
                out.push_str(&format!("\t{c}"));
            }
            out.push_str(&format!("\t{:.1}%\n", self.row_percent_correct[i]));
        }
        out.push_str("overall percentage");
        for c in &self.column_percent {
            out.push_str(&format!("\t{c:.1}%"));
        }
        out.push_str(&format!("\t{:.1}%\n", self.overall_percent_correct));
        out
    }
}
