use serde::{Deserialize, Serialize};

use super::design::DesignLayout;
use super::term::{ModelSpec, ModelTerm};
use crate::data::AttributeSchema;
use crate::error::{Error, Result};

/// Baseline-category logit coefficients over a term set.
///
/// Row `f` of `coefficients` holds the intercept and slopes of the log-odds of
/// the `f`-th non-baseline class (in class-index order) against the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitModel {
    schema: AttributeSchema,
    spec: ModelSpec,
    layout: DesignLayout,
    baseline_class: usize,
    coefficients: Vec<Vec<f64>>,
}

impl LogitModel {
    pub fn new(
        schema: AttributeSchema,
        spec: ModelSpec,
        baseline_class: usize,
        coefficients: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let layout = DesignLayout::new(&spec, &schema)?;
        let k = schema.n_classes();
        if baseline_class >= k {
            return Err(Error::InvalidArgument(format!(
                "baseline class {baseline_class} out of range for {k} classes"
            )));
        }
        if coefficients.len() != k - 1 || coefficients.iter().any(|r| r.len() != layout.n_columns()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient matrix must be {}x{}",
                k - 1,
                layout.n_columns()
            )));
        }
        Ok(LogitModel {
            schema,
            spec,
            layout,
            baseline_class,
            coefficients,
        })
    }

    pub fn zeros(schema: AttributeSchema, spec: ModelSpec, baseline_class: usize) -> Result<Self> {
        let p = DesignLayout::new(&spec, &schema)?.n_columns();
        let k = schema.n_classes();
        LogitModel::new(schema, spec, baseline_class, vec![vec![0.0; p]; k - 1])
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn layout(&self) -> &DesignLayout {
        &self.layout
    }

    pub fn baseline_class(&self) -> usize {
        self.baseline_class
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn n_classes(&self) -> usize {
        self.coefficients.len() + 1
    }

    /// Class index modeled by coefficient row `f`.
    pub fn outcome_of_row(&self, f: usize) -> usize {
        if f < self.baseline_class {
            f
        } else {
            f + 1
        }
    }

    /// Linear predictors for every class, with the baseline fixed at 0.
    pub fn linear_predictors(&self, record: &[usize]) -> Result<Vec<f64>> {
        self.schema.check_record(record)?;
        Ok(self.eta_from_active(&self.layout.active_columns(record)))
    }

    pub(crate) fn eta_from_active(&self, active: &[usize]) -> Vec<f64> {
        let mut eta = vec![0.0; self.n_classes()];
        for (f, row) in self.coefficients.iter().enumerate() {
            eta[self.outcome_of_row(f)] = active.iter().map(|&c| row[c]).sum();
        }
        eta
    }

    /// Class probabilities for a record.
    pub fn predict_proba(&self, record: &[usize]) -> Result<Vec<f64>> {
        Ok(softmax(&self.linear_predictors(record)?))
    }

    /// Most probable class; ties go to the lowest class index.
    pub fn classify(&self, record: &[usize]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(record)?))
    }
}

/// Overflow-safe softmax.
pub fn softmax(eta: &[f64]) -> Vec<f64> {
    let m = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = eta.iter().map(|&e| (e - m).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

/// Index of the largest value; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A maximum-likelihood fit together with its diagnostics.
#[derive(Debug, Clone)]
pub struct FittedLogitModel {
    pub model: LogitModel,
    /// -2 log-likelihood at the estimate.
    pub deviance: f64,
    /// (K - 1) · P.
    pub n_params: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Set when estimates look like they are diverging (quasi-complete separation).
    pub separation_warning: bool,
    /// Deviance at the start value and after every accepted Newton step.
    pub deviance_history: Vec<f64>,
}

impl FittedLogitModel {
    pub fn spec(&self) -> &ModelSpec {
        self.model.spec()
    }

    pub fn predict_proba(&self, record: &[usize]) -> Result<Vec<f64>> {
        self.model.predict_proba(record)
    }

    pub fn classify(&self, record: &[usize]) -> Result<usize> {
        self.model.classify(record)
    }

    pub fn to_artifact(&self) -> ModelArtifact {
        ModelArtifact {
            schema_hash: self.model.schema.hash(),
            baseline_class: self.model.baseline_class,
            terms: self.model.spec.terms().to_vec(),
            column_labels: self.model.layout.column_labels().to_vec(),
            coefficients: self.model.coefficients.clone(),
            deviance: self.deviance,
            n_params: self.n_params,
            converged: self.converged,
        }
    }

    /// Rebuilds a model from its artifact, checking it against `schema`.
    pub fn from_artifact(artifact: ModelArtifact, schema: &AttributeSchema) -> Result<Self> {
        if artifact.schema_hash != schema.hash() {
            return Err(Error::InvalidArgument(
                "model artifact was fitted against a different schema".into(),
            ));
        }
        let spec = ModelSpec::new(artifact.terms)?;
        let model = LogitModel::new(schema.clone(), spec, artifact.baseline_class, artifact.coefficients)?;
        if model.layout.column_labels() != artifact.column_labels.as_slice() {
            return Err(Error::InvalidArgument(
                "model artifact column labels do not match the schema layout".into(),
            ));
        }
        Ok(FittedLogitModel {
            n_params: artifact.n_params,
            deviance: artifact.deviance,
            converged: artifact.converged,
            iterations: 0,
            separation_warning: false,
            deviance_history: vec![],
            model,
        })
    }
}

/// On-disk model: `model.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub schema_hash: String,
    pub baseline_class: usize,
    pub terms: Vec<ModelTerm>,
    pub column_labels: Vec<String>,
    pub coefficients: Vec<Vec<f64>>,
    pub deviance: f64,
    pub n_params: usize,
    pub converged: bool,
}
