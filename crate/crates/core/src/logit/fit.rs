use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::design::DesignLayout;
use super::model::{FittedLogitModel, LogitModel};
use super::term::ModelSpec;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Newton-Raphson controls.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_iter: usize,
    pub deviance_tol: f64,
    pub gradient_tol: f64,
    /// Added to the information diagonal (scaled by its largest entry) when
    /// the plain factorization fails.
    pub ridge: f64,
    pub max_halvings: usize,
    /// Baseline outcome; defaults to the schema's baseline class.
    pub baseline_class: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 100,
            deviance_tol: 1e-8,
            gradient_tol: 1e-6,
            ridge: 1e-10,
            max_halvings: 40,
            baseline_class: None,
        }
    }
}

/// Estimates above this magnitude are taken as a sign of separation.
pub const SEPARATION_COEF: f64 = 30.0;

/// Records sharing one design row.
#[derive(Debug, Clone)]
struct Pattern {
    active: Vec<usize>,
    counts: Vec<f64>,
    total: f64,
}

/// Multinomial log-likelihood of a dataset as a function of the stacked
/// parameter vector `theta` (row `f` of the coefficient matrix occupies
/// `theta[f*P..(f+1)*P]`).
///
/// Records are collapsed to covariate patterns ordered by design row, so the
/// evaluation order does not depend on record order.
#[derive(Debug, Clone)]
pub struct LikelihoodSurface {
    patterns: Vec<Pattern>,
    n_classes: usize,
    n_columns: usize,
    baseline: usize,
}

impl LikelihoodSurface {
    pub fn new(data: &Dataset, layout: &DesignLayout, baseline: usize) -> Self {
        let k = data.schema().n_classes();
        let class = data.schema().class_index();
        let mut groups: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
        for r in data.records() {
            groups.entry(layout.active_columns(r)).or_insert_with(|| vec![0.0; k])[r[class]] += 1.0;
        }
        let patterns = groups
            .into_iter()
            .map(|(active, counts)| Pattern {
                total: counts.iter().sum(),
                active,
                counts,
            })
            .collect();
        LikelihoodSurface {
            patterns,
            n_classes: k,
            n_columns: layout.n_columns(),
            baseline,
        }
    }

    pub fn dim(&self) -> usize {
        (self.n_classes - 1) * self.n_columns
    }

    pub fn n_patterns(&self) -> usize {
        self.patterns.len()
    }

    fn outcome(&self, f: usize) -> usize {
        if f < self.baseline {
            f
        } else {
            f + 1
        }
    }

    /// Class log-probabilities of one pattern.
    fn log_probs(&self, theta: &[f64], active: &[usize]) -> Vec<f64> {
        let p = self.n_columns;
        let mut eta = vec![0.0; self.n_classes];
        for f in 0..self.n_classes - 1 {
            eta[self.outcome(f)] = active.iter().map(|&c| theta[f * p + c]).sum();
        }
        let m = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + eta.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
        eta.iter().map(|e| e - lse).collect()
    }

    pub fn log_likelihood(&self, theta: &[f64]) -> f64 {
        self.patterns
            .iter()
            .map(|pat| {
                let lp = self.log_probs(theta, &pat.active);
                pat.counts
                    .iter()
                    .zip(&lp)
                    .filter(|(&n, _)| n > 0.0)
                    .map(|(n, l)| n * l)
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn deviance(&self, theta: &[f64]) -> f64 {
        -2.0 * self.log_likelihood(theta)
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        self.gradient_and_information(theta, false).0
    }

    /// Gradient of the log-likelihood and, optionally, the observed
    /// information (negative Hessian) in row-major order.
    fn gradient_and_information(&self, theta: &[f64], with_info: bool) -> (Vec<f64>, Vec<f64>) {
        let p = self.n_columns;
        let km1 = self.n_classes - 1;
        let d = self.dim();
        let mut grad = vec![0.0; d];
        let mut info = if with_info { vec![0.0; d * d] } else { Vec::new() };
        let mut pi = vec![0.0; km1];
        for pat in &self.patterns {
            let lp = self.log_probs(theta, &pat.active);
            for f in 0..km1 {
                let k = self.outcome(f);
                pi[f] = lp[k].exp();
                let resid = pat.counts[k] - pat.total * pi[f];
                for &c in &pat.active {
                    grad[f * p + c] += resid;
                }
            }
            if !with_info {
                continue;
            }
            for f in 0..km1 {
                for h in 0..km1 {
                    let delta = if f == h { 1.0 } else { 0.0 };
                    let w = pat.total * pi[f] * (delta - pi[h]);
                    if w == 0.0 {
                        continue;
                    }
                    for &a in &pat.active {
                        let row = (f * p + a) * d + h * p;
                        for &b in &pat.active {
                            info[row + b] += w;
                        }
                    }
                }
            }
        }
        (grad, info)
    }

    /// Whether some pattern has a fitted probability near 0 for an outcome it never shows.
    fn has_degenerate_cell(&self, theta: &[f64]) -> bool {
        self.patterns.iter().any(|pat| {
            let lp = self.log_probs(theta, &pat.active);
            lp.iter().zip(&pat.counts).any(|(l, &n)| n == 0.0 && *l < (1e-9f64).ln())
        })
    }
}

/// Maximum-likelihood fit with default options.
pub fn fit(data: &Dataset, spec: &ModelSpec) -> Result<FittedLogitModel> {
    fit_with(data, spec, &FitOptions::default())
}

/// Newton-Raphson with step-halving on the full (K-1)·P parameter vector.
pub fn fit_with(data: &Dataset, spec: &ModelSpec, opts: &FitOptions) -> Result<FittedLogitModel> {
    let schema = data.schema();
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot fit an empty dataset".into()));
    }
    let layout = DesignLayout::new(spec, schema)?;
    let k = schema.n_classes();
    let p = layout.n_columns();
    let n_params = (k - 1) * p;
    if n_params >= data.len() {
        return Err(Error::Overparameterized {
            params: n_params,
            records: data.len(),
        });
    }
    let baseline = opts.baseline_class.unwrap_or_else(|| schema.baseline_class());
    if baseline >= k {
        return Err(Error::InvalidArgument(format!("baseline class {baseline} out of range")));
    }
    let surface = LikelihoodSurface::new(data, &layout, baseline);

    // start from the empirical log-odds in the intercepts
    let mut class_counts = vec![0.0f64; k];
    for y in data.class_labels() {
        class_counts[y] += 1.0;
    }
    let mut theta = vec![0.0; n_params];
    for f in 0..k - 1 {
        let outcome = surface.outcome(f);
        theta[f * p] = ((class_counts[outcome] + 0.5) / (class_counts[baseline] + 0.5)).ln();
    }

    let mut dev = surface.deviance(&theta);
    let mut history = vec![dev];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let (grad, info) = surface.gradient_and_information(&theta, true);
        let step = solve_newton(info, &grad, opts.ridge)?;

        // Predicted deviance decrease of the full step. Once it is below the
        // tolerance the deviance cannot resolve it, so take the step unchecked.
        let predicted = 2.0 * grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
        let mut t = 1.0;
        let mut accepted = None;
        if predicted.abs() < opts.deviance_tol {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + s).collect();
            let trial_dev = surface.deviance(&trial);
            if trial_dev.is_finite() {
                accepted = Some((trial, trial_dev.min(dev)));
            }
        }
        for _ in 0..=opts.max_halvings {
            if accepted.is_some() {
                break;
            }
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let trial_dev = surface.deviance(&trial);
            if trial_dev.is_finite() && trial_dev <= dev {
                accepted = Some((trial, trial_dev));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_dev)) = accepted else {
            // no descent left along the Newton direction
            converged = max_abs(&grad) < opts.gradient_tol;
            break;
        };
        let change = dev - next_dev;
        theta = next;
        dev = next_dev;
        history.push(dev);
        if change.abs() < opts.deviance_tol && max_abs(&surface.gradient(&theta)) < opts.gradient_tol {
            converged = true;
            break;
        }
    }

    let largest = max_abs(&theta);
    let separation_warning = largest > SEPARATION_COEF || surface.has_degenerate_cell(&theta);
    let coefficients = theta.chunks(p).map(|c| c.to_vec()).collect();
    let model = LogitModel::new(schema.clone(), spec.clone(), baseline, coefficients)?;
    Ok(FittedLogitModel {
        model,
        deviance: dev.max(0.0),
        n_params,
        converged,
        iterations,
        separation_warning,
        deviance_history: history,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `info · step = grad` by Cholesky, adding a growing ridge when the
/// information matrix is singular (e.g. a level never observed).
fn solve_newton(info: Vec<f64>, grad: &[f64], ridge: f64) -> Result<Vec<f64>> {
    let d = grad.len();
    let base = DMatrix::from_row_slice(d, d, &info);
    let g = DVector::from_column_slice(grad);
    if let Some(ch) = base.clone().cholesky() {
        return Ok(ch.solve(&g).iter().cloned().collect());
    }
    let scale = (0..d).map(|i| base[(i, i)]).fold(1.0f64, f64::max);
    let mut lambda = ridge * scale;
    while lambda < scale {
        let mut m = base.clone();
        for i in 0..d {
            m[(i, i)] += lambda;
        }
        if let Some(ch) = m.cholesky() {
            return Ok(ch.solve(&g).iter().cloned().collect());
        }
        lambda *= 100.0;
    }
    Err(Error::Numerical("information matrix could not be factorized".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, AttributeSchema, Role};

    fn counts_dataset(groups: &[(usize, [usize; 3])]) -> Dataset {
        let schema = AttributeSchema::new(vec![
            Attribute::new("X", &["x1", "x0"], Role::Predictor),
            Attribute::new("Noise", &["n0", "n1"], Role::Predictor),
            Attribute::new("Y", &["c1", "c2", "c3"], Role::Class),
        ])
        .unwrap();
        let mut records = Vec::new();
        for &(x, counts) in groups {
            for (y, &n) in counts.iter().enumerate() {
                for i in 0..n {
                    records.push(vec![x, i % 2, y]);
                }
            }
        }
        Dataset::new(schema, records).unwrap()
    }

    #[test]
    fn intercept_only_closed_form() {
        let d = counts_dataset(&[(0, [10, 20, 70])]);
        let m = fit(&d, &ModelSpec::intercept_only()).unwrap();
        assert!(m.converged);
        let c = m.model.coefficients();
        assert!((c[0][0] - (10.0f64 / 70.0).ln()).abs() < 1e-6);
        assert!((c[1][0] - (20.0f64 / 70.0).ln()).abs() < 1e-6);
        let want = -2.0 * (10.0 * 0.1f64.ln() + 20.0 * 0.2f64.ln() + 70.0 * 0.7f64.ln());
        assert!((m.deviance - want).abs() < 1e-6);
        assert!((m.deviance - 160.3637).abs() < 1e-4);
        let p = m.predict_proba(&[0, 0, 0]).unwrap();
        assert!((p[0] - 0.1).abs() < 1e-9 && (p[1] - 0.2).abs() < 1e-9 && (p[2] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn saturated_binary_factor() {
        // level index 1 (`x0`) is the reference, so it plays "x = 0"
        let d = counts_dataset(&[(1, [10, 20, 30]), (0, [30, 20, 10])]);
        let m = fit(&d, &ModelSpec::parse("X").unwrap()).unwrap();
        let c = m.model.coefficients();
        assert!((c[0][0] - (10.0f64 / 30.0).ln()).abs() < 1e-5);
        assert!((c[0][1] - 9.0f64.ln()).abs() < 1e-5);
        assert!((c[1][0] - (20.0f64 / 30.0).ln()).abs() < 1e-5);
        assert!((c[1][1] - 3.0f64.ln()).abs() < 1e-5);
        assert!(m.deviance_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn overparameterized_rejected() {
        let d = counts_dataset(&[(0, [1, 1, 0])]);
        assert!(matches!(
            fit(&d, &ModelSpec::parse("X").unwrap()),
            Err(Error::Overparameterized { params: 4, records: 2 })
        ));
    }

    #[test]
    fn unobserved_level_column_is_harmless() {
        // X never takes level x1: its indicator column is identically zero
        let d = counts_dataset(&[(1, [10, 20, 30])]);
        let base = fit(&d, &ModelSpec::intercept_only()).unwrap();
        let m = fit(&d, &ModelSpec::parse("X").unwrap()).unwrap();
        assert!(m.converged);
        assert!((m.deviance - base.deviance).abs() < 1e-8);
    }

    #[test]
    fn separation_is_flagged() {
        // class c1 never appears with x1
        let d = counts_dataset(&[(1, [10, 20, 30]), (0, [0, 25, 15])]);
        let m = fit(&d, &ModelSpec::parse("X").unwrap()).unwrap();
        assert!(m.separation_warning);
        assert!(m.deviance.is_finite());
    }
}
