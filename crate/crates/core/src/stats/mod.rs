//! Contingency-table tests, chi-square tails and univariate screening.

mod chi_square;
mod fisher;
mod screening;
pub mod special;

pub use chi_square::{pearson_chi_square, ChiSquareResult};
pub use fisher::{fisher_exact, fisher_exact_rxc, DEFAULT_MAX_TOTAL};
pub use screening::{passes, screen_univariate, ScreeningReport, ScreeningRow, DEFAULT_SCREEN_TOLERANCE};
pub use special::{chi_square_sf, ln_chi_square_sf};

/// Shortest round-trip text for a real, switching to exponent form for very
/// small or very large magnitudes.
pub fn fmt_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
