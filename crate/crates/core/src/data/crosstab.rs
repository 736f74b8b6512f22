use serde::Serialize;

use super::dataset::Dataset;
use crate::error::Result;

/// r×c table of observed counts with its level labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub row_attr: String,
    pub col_attr: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    /// Unlabeled table; labels default to the row/column index.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Self {
        let r = counts.len();
        let c = counts.first().map_or(0, Vec::len);
        assert!(counts.iter().all(|row| row.len() == c), "ragged table");
        ContingencyTable {
            row_attr: "row".into(),
            col_attr: "col".into(),
            row_labels: (0..r).map(|i| i.to_string()).collect(),
            col_labels: (0..c).map(|j| j.to_string()).collect(),
            counts,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.counts.len()
    }

    pub fn n_cols(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.n_cols())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let counts = (0..self.n_cols())
            .map(|j| self.counts.iter().map(|r| r[j]).collect())
            .collect();
        ContingencyTable {
            row_attr: self.col_attr.clone(),
            col_attr: self.row_attr.clone(),
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            counts,
        }
    }
}

pub fn cross_tab(data: &Dataset, row_attr: &str, col_attr: &str) -> Result<ContingencyTable> {
    let schema = data.schema();
    let ri = schema.index_of(row_attr)?;
    let ci = schema.index_of(col_attr)?;
    let (ra, ca) = (schema.attribute(ri), schema.attribute(ci));
    let mut counts = vec![vec![0u64; ca.n_levels()]; ra.n_levels()];
    for r in data.records() {
        counts[r[ri]][r[ci]] += 1;
    }
    Ok(ContingencyTable {
        row_attr: ra.name.clone(),
        col_attr: ca.name.clone(),
        row_labels: ra.levels.clone(),
        col_labels: ca.levels.clone(),
        counts,
    })
}
