//! Confusion matrices, one-vs-rest collapses, operating points.

mod roc;

pub use roc::{roc_csv, roc_points, roc_svg, threshold_sweep, RocPoint, RocSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are observed classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> Result<f64> {
        ratio(self.trace(), self.total(), "accuracy")
    }
}

pub fn confusion(labels: &[String], observed: &[usize], predicted: &[usize]) -> Result<ConfusionMatrix> {
    if observed.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "{} observed labels but {} predictions",
            observed.len(),
            predicted.len()
        )));
    }
    let k = labels.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (&o, &p) in observed.iter().zip(predicted) {
        if o >= k || p >= k {
            return Err(Error::InvalidArgument(format!("class index out of range for {k} classes")));
        }
        counts[o][p] += 1;
    }
    Ok(ConfusionMatrix {
        labels: labels.to_vec(),
        counts,
    })
}

/// A class against all others pooled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCollapse {
    pub positive: String,
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl BinaryCollapse {
    pub fn new(positive: impl Into<String>, tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        BinaryCollapse {
            positive: positive.into(),
            tp,
            fn_,
            fp,
            tn,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

pub fn collapse(matrix: &ConfusionMatrix, positive: usize) -> Result<BinaryCollapse> {
    let k = matrix.labels.len();
    if positive >= k {
        return Err(Error::InvalidArgument(format!("positive class {positive} out of range")));
    }
    let (mut tp, mut fn_, mut fp, mut tn) = (0, 0, 0, 0);
    for (i, row) in matrix.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            match (i == positive, j == positive) {
                (true, true) => tp += c,
                (true, false) => fn_ += c,
                (false, true) => fp += c,
                (false, false) => tn += c,
            }
        }
    }
    Ok(BinaryCollapse::new(matrix.labels[positive].clone(), tp, fn_, fp, tn))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
    pub accuracy: f64,
}

fn ratio(num: u64, den: u64, what: &str) -> Result<f64> {
    if den == 0 {
        return Err(Error::UndefinedRate(format!("{what} has a zero denominator")));
    }
    Ok(num as f64 / den as f64)
}

/// TPR, FPR and accuracy; a zero denominator is an error, never 0.
pub fn rates(b: &BinaryCollapse) -> Result<Rates> {
    Ok(Rates {
        tpr: ratio(b.tp, b.tp + b.fn_, &format!("TPR for `{}`", b.positive))?,
        fpr: ratio(b.fp, b.fp + b.tn, &format!("FPR for `{}`", b.positive))?,
        accuracy: ratio(b.tp + b.tn, b.total(), &format!("accuracy for `{}`", b.positive))?,
    })
}

/// Unweighted mean.
pub fn macro_average(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot average an empty list".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

fn mean_rates(rows: &[Rates]) -> Result<Rates> {
    let pick = |f: fn(&Rates) -> f64| macro_average(&rows.iter().map(f).collect::<Vec<_>>());
    Ok(Rates {
        tpr: pick(|r| r.tpr)?,
        fpr: pick(|r| r.fpr)?,
        accuracy: pick(|r| r.accuracy)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEval {
    pub name: String,
    /// One per class, in class order.
    pub collapses: Vec<BinaryCollapse>,
    pub rates: Vec<Rates>,
    /// Mean over classes.
    pub average: Rates,
}

/// Per-dataset and overall operating characteristics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub datasets: Vec<DatasetEval>,
    /// Per class, the unweighted mean over datasets (not pooled counts).
    pub overall: Vec<Rates>,
    pub overall_average: Rates,
}

impl EvalReport {
    /// `datasets` holds, per named dataset, one collapse per class in class order.
    pub fn from_collapses(classes: &[String], datasets: Vec<(String, Vec<BinaryCollapse>)>) -> Result<Self> {
        if datasets.is_empty() {
            return Err(Error::InvalidArgument("no datasets to evaluate".into()));
        }
        let mut evals = Vec::with_capacity(datasets.len());
        for (name, collapses) in datasets {
            if collapses.len() != classes.len() {
                return Err(Error::InvalidArgument(format!(
                    "dataset `{name}` has {} collapses for {} classes",
                    collapses.len(),
                    classes.len()
                )));
            }
            let rates = collapses.iter().map(rates).collect::<Result<Vec<_>>>()?;
            evals.push(DatasetEval {
                average: mean_rates(&rates)?,
                name,
                collapses,
                rates,
            });
        }
        let overall = (0..classes.len())
            .map(|c| mean_rates(&evals.iter().map(|d| d.rates[c]).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport {
            classes: classes.to_vec(),
            overall_average: mean_rates(&overall)?,
            overall,
            datasets: evals,
        })
    }

    pub fn from_matrices(datasets: Vec<(String, ConfusionMatrix)>) -> Result<Self> {
        let classes = datasets
            .first()
            .map(|(_, m)| m.labels.clone())
            .ok_or_else(|| Error::InvalidArgument("no datasets to evaluate".into()))?;
        let collapsed = datasets
            .into_iter()
            .map(|(name, m)| {
                if m.labels != classes {
                    return Err(Error::InvalidArgument(format!("dataset `{name}` has different class labels")));
                }
                let cs = (0..classes.len()).map(|c| collapse(&m, c)).collect::<Result<Vec<_>>>()?;
                Ok((name, cs))
            })
            .collect::<Result<Vec<_>>>()?;
        EvalReport::from_collapses(&classes, collapsed)
    }

    /// One-vs-rest tables, two rows per (class, dataset).
    pub fn collapses_csv(&self) -> String {
        let mut out = String::from("positive_class,dataset,observed,predicted_positive,predicted_negative\n");
        for (c, class) in self.classes.iter().enumerate() {
            for d in &self.datasets {
                let b = &d.collapses[c];
                let (class, name) = (csv_field(class), csv_field(&d.name));
                out.push_str(&format!("{class},{name},positive,{},{}\n", b.tp, b.fn_));
                out.push_str(&format!("{class},{name},negative,{},{}\n", b.fp, b.tn));
            }
        }
        out
    }

    /// Measures per dataset with a per-row average column, then an `Overall` block.
    pub fn measures_csv(&self) -> String {
        let mut out = String::from("dataset,measure");
        for c in &self.classes {
            out.push(',');
            out.push_str(&csv_field(c));
        }
        out.push_str(",Avg.\n");
        let mut block = |name: &str, per_class: &[Rates], avg: &Rates| {
            let measures: [(&str, Measure); 3] =
                [("TPR", |r| r.tpr), ("FPR", |r| r.fpr), ("Accuracy", |r| r.accuracy)];
            for (label, get) in measures {
                out.push_str(&format!("{},{label}", csv_field(name)));
                for r in per_class {
                    out.push(',');
                    out.push_str(&sig6(get(r)));
                }
                out.push_str(&format!(",{}\n", sig6(get(avg))));
            }
        };
        for d in &self.datasets {
            block(&d.name, &d.rates, &d.average);
        }
        block("Overall", &self.overall, &self.overall_average);
        out
    }
}

type Measure = fn(&Rates) -> f64;

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Six significant digits, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
