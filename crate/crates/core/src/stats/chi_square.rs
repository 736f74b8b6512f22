use serde::Serialize;

use super::special::chi_square_sf;
use crate::data::ContingencyTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// False when an expected count falls below 5 (below 10 when df = 1).
    pub approximation_valid: bool,
    pub min_expected: f64,
}

/// Pearson's chi-square test of independence.
pub fn pearson_chi_square(table: &ContingencyTable) -> Result<ChiSquareResult> {
    let (r, c) = (table.n_rows(), table.n_cols());
    if r < 2 || c < 2 {
        return Err(Error::DegenerateTable(format!("{r}x{c} table; need at least 2x2")));
    }
    let n = table.total();
    if n == 0 {
        return Err(Error::DegenerateTable("empty table".into()));
    }
    let rows = table.row_totals();
    let cols = table.col_totals();
    if let Some(i) = rows.iter().position(|&t| t == 0) {
        return Err(Error::DegenerateTable(format!(
            "row `{}` of `{}` has no observations",
            table.row_labels[i], table.row_attr
        )));
    }
    if let Some(j) = cols.iter().position(|&t| t == 0) {
        return Err(Error::DegenerateTable(format!(
            "column `{}` of `{}` has no observations",
            table.col_labels[j], table.col_attr
        )));
    }

    let n = n as f64;
    let mut statistic = 0.0;
    let mut min_expected = f64::INFINITY;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = rows[i] as f64 * cols[j] as f64 / n;
            min_expected = min_expected.min(expected);
            let diff = obs as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    let df = (r - 1) * (c - 1);
    let threshold = if df == 1 { 10.0 } else { 5.0 };
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
        approximation_valid: min_expected >= threshold,
        min_expected,
    })
}
