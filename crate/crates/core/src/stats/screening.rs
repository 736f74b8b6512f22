use serde::Serialize;

use super::chi_square::pearson_chi_square;
use super::fmt_real;
use crate::data::{cross_tab, Dataset};
use crate::error::{Error, Result};

pub const DEFAULT_SCREEN_TOLERANCE: f64 = 0.20;

/// Univariate test of one predictor against the class.
#[derive(Debug, Clone, Serialize)]
pub struct ScreeningRow {
    pub attribute: String,
    pub statistic: Option<f64>,
    pub df: Option<usize>,
    pub p_value: Option<f64>,
    pub approximation_valid: Option<bool>,
    pub significant: bool,
    /// Set when the table was degenerate and no test could be run.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreeningReport {
    pub tolerance: f64,
    pub rows: Vec<ScreeningRow>,
}

impl ScreeningReport {
    pub fn significant_attributes(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| r.significant)
            .map(|r| r.attribute.clone())
            .collect()
    }

    /// Columns: attribute, chi_square, df, p_value, significant.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("attribute,chi_square,df,p_value,significant\n");
        for r in &self.rows {
            let name = if r.attribute.contains([',', '"']) {
                format!("\"{}\"", r.attribute.replace('"', "\"\""))
            } else {
                r.attribute.clone()
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                name,
                r.statistic.map(fmt_real).unwrap_or_default(),
                r.df.map(|d| d.to_string()).unwrap_or_default(),
                r.p_value.map(fmt_real).unwrap_or_default(),
                r.significant
            ));
        }
        out
    }
}

/// Whether a p-value passes the screen: strictly below the tolerance.
pub fn passes(p_value: f64, tolerance: f64) -> bool {
    p_value < tolerance
}

/// Pearson chi-square of every predictor against the class, in schema order.
pub fn screen_univariate(data: &Dataset, tolerance: f64) -> Result<ScreeningReport> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot screen an empty dataset".into()));
    }
    let schema = data.schema();
    let class = &schema.class_attribute().name;
    let rows = schema
        .predictor_names()
        .into_iter()
        .map(|name| {
            let outcome = cross_tab(data, &name, class).and_then(|t| pearson_chi_square(&t));
            match outcome {
                Ok(res) => ScreeningRow {
                    significant: passes(res.p_value, tolerance),
                    attribute: name,
                    statistic: Some(res.statistic),
                    df: Some(res.df),
                    p_value: Some(res.p_value),
                    approximation_valid: Some(res.approximation_valid),
                    error: None,
                },
                Err(e) => ScreeningRow {
                    attribute: name,
                    statistic: None,
                    df: None,
                    p_value: None,
                    approximation_valid: None,
                    significant: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(ScreeningReport { tolerance, rows })
}
