use serde::{Deserialize, Serialize};

use super::{csv_field, sig6, EvalReport};
use crate::error::{Error, Result};

/// One discrete classifier operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub dataset: String,
    pub class: String,
    pub fpr: f64,
    pub tpr: f64,
    /// Strictly better than chance: tpr > fpr.
    pub above_diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocSummary {
    pub points: Vec<RocPoint>,
    pub above: usize,
    pub fraction_above: f64,
}

impl RocSummary {
    pub fn from_points(points: Vec<RocPoint>) -> Self {
        let above = points.iter().filter(|p| p.above_diagonal).count();
        let fraction_above = if points.is_empty() {
            0.0
        } else {
            above as f64 / points.len() as f64
        };
        RocSummary {
            points,
            above,
            fraction_above,
        }
    }
}

/// Every (dataset, class) pair of the report as a scatter point.
pub fn roc_points(report: &EvalReport) -> RocSummary {
    let points = report
        .datasets
        .iter()
        .flat_map(|d| {
            d.rates.iter().zip(&report.classes).map(|(r, c)| RocPoint {
                dataset: d.name.clone(),
                class: c.clone(),
                fpr: r.fpr,
                tpr: r.tpr,
                above_diagonal: r.tpr > r.fpr,
            })
        })
        .collect();
    RocSummary::from_points(points)
}

pub fn roc_csv(summary: &RocSummary) -> String {
    let mut out = String::from("dataset,class,fpr,tpr,above_diagonal\n");
    for p in &summary.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&p.dataset),
            csv_field(&p.class),
            sig6(p.fpr),
            sig6(p.tpr),
            p.above_diagonal
        ));
    }
    out
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Scatter in the unit square with the chance diagonal; one colour per class.
pub fn roc_svg(summary: &RocSummary) -> String {
    let (size, pad) = (400.0, 50.0);
    let x = |v: f64| pad + v * size;
    let y = |v: f64| pad + (1.0 - v) * size;
    let mut classes: Vec<&str> = Vec::new();
    for p in &summary.points {
        if !classes.contains(&p.class.as_str()) {
            classes.push(&p.class);
        }
    }
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = size + 2.0 * pad + 200.0,
        h = size + 2.0 * pad
    );
    s.push_str(&format!(
        "<rect x=\"{pad}\" y=\"{pad}\" width=\"{size}\" height=\"{size}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n",
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    ));
    for t in 0..=5 {
        let v = t as f64 / 5.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            x(v),
            y(0.0) + 16.0,
            sig6(v)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            x(0.0) - 6.0,
            y(v) + 4.0,
            sig6(v)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">False positive rate</text>\n",
        x(0.5),
        y(0.0) + 36.0
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">True positive rate</text>\n",
        y(0.5),
        y(0.5)
    ));
    for p in &summary.points {
        let colour = PALETTE[classes.iter().position(|c| *c == p.class).unwrap_or(0) % PALETTE.len()];
        s.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{colour}\"><title>{} / {}: fpr {}, tpr {}</title></circle>\n",
            sig6(x(p.fpr)),
            sig6(y(p.tpr)),
            xml_escape(&p.dataset),
            xml_escape(&p.class),
            sig6(p.fpr),
            sig6(p.tpr)
        ));
    }
    for (i, c) in classes.iter().enumerate() {
        let ly = pad + 20.0 * i as f64;
        s.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{ly}\" r=\"5\" fill=\"{}\"/><text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            size + pad + 20.0,
            PALETTE[i % PALETTE.len()],
            size + pad + 32.0,
            ly + 4.0,
            xml_escape(c)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{} of {} above chance</text>\n",
        size + pad + 14.0,
        pad + 20.0 * classes.len() as f64 + 10.0,
        summary.above,
        summary.points.len()
    ));
    s.push_str("</svg>\n");
    s
}

/// (fpr, tpr) for every distinct threshold on `scores`, from (0,0) to (1,1).
/// Tied scores move together.
pub fn threshold_sweep(scores: &[f64], positive: &[bool]) -> Result<Vec<(f64, f64)>> {
    if scores.len() != positive.len() {
        return Err(Error::InvalidArgument("scores and labels differ in length".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("scores contain NaN".into()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedRate("threshold sweep needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    Ok(points)
}
