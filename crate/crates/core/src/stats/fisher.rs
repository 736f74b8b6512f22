use super::special::ln_factorials;
use crate::data::ContingencyTable;
use crate::error::{Error, Result};

/// Relative slack when deciding whether a table is "at most as probable" as the observed one.
const TIE_TOLERANCE: f64 = 1e-7;

/// Default grand-total ceiling for r×c enumeration.
pub const DEFAULT_MAX_TOTAL: u64 = 40;

/// Two-sided Fisher exact test on a 2×2 table.
///
/// The p-value sums the hypergeometric probabilities of every table with the
/// observed margins whose probability does not exceed the observed table's.
/// Any zero margin yields 1.
pub fn fisher_exact(table: [[u64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = table;
    let (r1, r2) = (a + b, c + d);
    let (c1, c2) = (a + c, b + d);
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return 1.0;
    }
    let n = r1 + r2;
    let lf = ln_factorials(n);
    let constant = lf[r1 as usize] + lf[r2 as usize] + lf[c1 as usize] + lf[c2 as usize] - lf[n as usize];
    let ln_p = |x: u64| {
        let (x_b, x_c) = (r1 - x, c1 - x);
        let x_d = r2 - x_c;
        constant - lf[x as usize] - lf[x_b as usize] - lf[x_c as usize] - lf[x_d as usize]
    };
    let observed = ln_p(a);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let cutoff = observed + TIE_TOLERANCE.ln_1p();
    let p: f64 = (lo..=hi)
        .map(ln_p)
        .filter(|&lp| lp <= cutoff)
        .map(|lp| (lp - observed).exp())
        .sum::<f64>()
        * observed.exp();
    p.clamp(0.0, 1.0)
}

/// Exact two-sided test on an r×c table by full enumeration of all tables
/// sharing the observed margins.
pub fn fisher_exact_rxc(table: &ContingencyTable, max_total: u64) -> Result<f64> {
    let total = table.total();
    if total > max_total {
        return Err(Error::TableTooLarge { total, max: max_total });
    }
    let rows = table.row_totals();
    let cols = table.col_totals();
    if rows.iter().chain(&cols).any(|&t| t == 0) || table.n_rows() < 2 || table.n_cols() < 2 {
        return Ok(1.0);
    }
    let lf = ln_factorials(total);
    let constant: f64 = rows.iter().chain(&cols).map(|&t| lf[t as usize]).sum::<f64>() - lf[total as usize];
    let observed = constant
        - table
            .counts
            .iter()
            .flatten()
            .map(|&x| lf[x as usize])
            .sum::<f64>();

    let mut acc = Enumeration {
        lf: &lf,
        cutoff: observed + TIE_TOLERANCE.ln_1p(),
        observed,
        sum: 0.0,
    };
    let mut col_left = cols.clone();
    acc.row(&rows, 0, &mut col_left, constant);
    Ok((acc.sum * observed.exp()).clamp(0.0, 1.0))
}

struct Enumeration<'a> {
    lf: &'a [f64],
    cutoff: f64,
    observed: f64,
    /// Sum of p(table)/p(observed) over qualifying tables.
    sum: f64,
}

impl Enumeration<'_> {
    /// Fills rows from `i` onward; `ln_p` holds the constant minus ln(cell!) of filled cells.
    fn row(&mut self, rows: &[u64], i: usize, col_left: &mut [u64], ln_p: f64) {
        if i + 1 == rows.len() {
            // last row is forced by the remaining column capacity
            let lp = ln_p - col_left.iter().map(|&x| self.lf[x as usize]).sum::<f64>();
            if lp <= self.cutoff {
                self.sum += (lp - self.observed).exp();
            }
            return;
        }
        self.cell(rows, i, 0, rows[i], col_left, ln_p);
    }

    fn cell(&mut self, rows: &[u64], i: usize, j: usize, remaining: u64, col_left: &mut [u64], ln_p: f64) {
        let last_col = j + 1 == col_left.len();
        if last_col {
            if remaining > col_left[j] {
                return;
            }
            col_left[j] -= remaining;
            self.row(rows, i + 1, col_left, ln_p - self.lf[remaining as usize]);
            col_left[j] += remaining;
            return;
        }
        // what later columns can still absorb bounds this cell from below
        let later: u64 = col_left[j + 1..].iter().sum();
        let lo = remaining.saturating_sub(later);
        let hi = remaining.min(col_left[j]);
        for x in lo..=hi {
            col_left[j] -= x;
            self.cell(rows, i, j + 1, remaining - x, col_left, ln_p - self.lf[x as usize]);
            col_left[j] += x;
        }
    }
}
