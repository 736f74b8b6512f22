//! Prediction service over a finished analysis.
//!
//! The pure functions [`Artifacts::predict`] and [`Artifacts::whatif`] back
//! both the HTTP endpoints and the `predict` subcommand, so the two always
//! agree.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::CorsLayer;

use crate::data::AttributeSchema;
use crate::error::Result;
use crate::logit::{argmax, FittedLogitModel, ModelArtifact};
use crate::tree::{RuleTree, TreeArtifact};

/// Schema, model and tree, loaded once and never mutated.
#[derive(Debug)]
pub struct Artifacts {
    schema: AttributeSchema,
    schema_json: String,
    model: FittedLogitModel,
    tree: RuleTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulePrediction {
    pub class: String,
    pub rule_number: usize,
    pub rule_text: String,
    pub backoff: bool,
    pub support: u64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPrediction {
    pub class: String,
    pub classes: Vec<String>,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub deviance: f64,
    pub n_params: usize,
    pub schema_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionResponse {
    pub input: BTreeMap<String, String>,
    pub rule_prediction: RulePrediction,
    pub model_prediction: ModelPrediction,
    pub agreement: bool,
    pub model_info: ModelInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Override {
    pub attribute: String,
    pub level: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfItem {
    #[serde(rename = "override")]
    pub override_: Value,
    pub status: ItemStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub response: Option<PredictionResponse>,
    /// Model probabilities minus those of the base profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<FieldError>,
}

type Profile = BTreeMap<String, String>;

impl Artifacts {
    pub fn new(schema: AttributeSchema, model: FittedLogitModel, tree: RuleTree) -> Result<Self> {
        let hash = schema.hash();
        if model.model.schema().hash() != hash || tree.schema().hash() != hash {
            return Err(crate::Error::InvalidArgument(
                "model and tree must share the service schema".into(),
            ));
        }
        Ok(Artifacts {
            schema_json: serde_json::to_string(&schema)?,
            schema,
            model,
            tree,
        })
    }

    /// Reads `schema.json`, `model.json` and `tree.json` from `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let schema = AttributeSchema::load(&dir.join("schema.json"))?;
        let model: ModelArtifact = serde_json::from_str(&std::fs::read_to_string(dir.join("model.json"))?)?;
        let tree: TreeArtifact = serde_json::from_str(&std::fs::read_to_string(dir.join("tree.json"))?)?;
        let model = FittedLogitModel::from_artifact(model, &schema)?;
        let tree = RuleTree::from_artifact(tree, &schema)?;
        Artifacts::new(schema, model, tree)
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn schema_json(&self) -> &str {
        &self.schema_json
    }

    /// Validates a `{attribute: level}` object, collecting every problem.
    fn parse_profile(&self, value: &Value) -> std::result::Result<Profile, Vec<FieldError>> {
        let Some(obj) = value.as_object() else {
            return Err(vec![FieldError::new("", "profile must be a JSON object of attribute: level")]);
        };
        let mut errors = Vec::new();
        let mut profile = Profile::new();
        let class_name = &self.schema.class_attribute().name;
        for (key, v) in obj {
            if key == class_name {
                errors.push(FieldError::new(key, "the class attribute is predicted, not supplied"));
                continue;
            }
            let Ok(attr) = self.schema.by_name(key) else {
                errors.push(FieldError::new(key, "unknown attribute"));
                continue;
            };
            match v.as_str() {
                Some(level) if attr.level_index(level).is_some() => {
                    profile.insert(key.clone(), level.to_string());
                }
                Some(level) => errors.push(FieldError::new(
                    key,
                    format!("unknown level `{level}`; expected one of: {}", attr.levels.join(", ")),
                )),
                None => errors.push(FieldError::new(key, "level must be a string")),
            }
        }
        for name in self.schema.predictor_names() {
            if !obj.contains_key(&name) {
                errors.push(FieldError::new(name, "missing value"));
            }
        }
        if errors.is_empty() {
            Ok(profile)
        } else {
            Err(errors)
        }
    }

    fn record_of(&self, profile: &Profile) -> Vec<usize> {
        self.schema
            .attributes()
            .iter()
            .map(|a| profile.get(&a.name).and_then(|l| a.level_index(l)).unwrap_or(0))
            .collect()
    }

    fn respond(&self, profile: Profile) -> PredictionResponse {
        let record = self.record_of(&profile);
        let classes = self.schema.class_attribute().levels.clone();
        let matched = self.tree.classify_rule(&record).expect("validated profile");
        let probabilities = self.model.predict_proba(&record).expect("validated profile");
        let model_class = argmax(&probabilities);
        PredictionResponse {
            input: profile,
            rule_prediction: RulePrediction {
                class: classes[matched.class].clone(),
                rule_number: matched.rule.number,
                rule_text: matched.rule.text().render(),
                backoff: matched.rule.backoff,
                support: matched.rule.support,
                confidence: matched.rule.confidence,
            },
            agreement: matched.class == model_class,
            model_prediction: ModelPrediction {
                class: classes[model_class].clone(),
                classes,
                probabilities,
            },
            model_info: ModelInfo {
                deviance: self.model.deviance,
                n_params: self.model.n_params,
                schema_hash: self.schema.hash(),
            },
        }
    }

    pub fn predict(&self, profile: &Value) -> std::result::Result<PredictionResponse, Vec<FieldError>> {
        Ok(self.respond(self.parse_profile(profile)?))
    }

    /// `{base, overrides: [{attribute, level}]}`; the base must be valid, each
    /// override succeeds or fails on its own.
    pub fn whatif(&self, request: &Value) -> std::result::Result<Vec<WhatIfItem>, Vec<FieldError>> {
        let base = request
            .get("base")
            .ok_or_else(|| vec![FieldError::new("base", "missing base profile")])?;
        let base = self.parse_profile(base).map_err(|errs| {
            errs.into_iter()
                .map(|e| FieldError::new(format!("base.{}", e.field), e.message))
                .collect::<Vec<_>>()
        })?;
        let overrides = match request.get("overrides") {
            None => return Err(vec![FieldError::new("overrides", "missing overrides list")]),
            Some(Value::Array(items)) => items,
            Some(_) => return Err(vec![FieldError::new("overrides", "must be a list")]),
        };
        let base_response = self.respond(base.clone());
        let base_p = &base_response.model_prediction.probabilities;
        Ok(overrides
            .iter()
            .enumerate()
            .map(|(i, raw)| {
                let parsed = serde_json::from_value::<Override>(raw.clone())
                    .map_err(|e| FieldError::new(format!("overrides[{i}]"), e.to_string()))
                    .and_then(|o| {
                        let mut profile = base.clone();
                        if !profile.contains_key(&o.attribute) {
                            return Err(FieldError::new(
                                format!("overrides[{i}].attribute"),
                                format!("`{}` is not a predictor", o.attribute),
                            ));
                        }
                        profile.insert(o.attribute.clone(), o.level.clone());
                        let as_value = serde_json::to_value(&profile).expect("string map");
                        self.parse_profile(&as_value).map_err(|mut errs| {
                            let e = errs.remove(0);
                            FieldError::new(format!("overrides[{i}].level"), e.message)
                        })
                    });
                match parsed {
                    Ok(profile) => {
                        let response = self.respond(profile);
                        let delta = response
                            .model_prediction
                            .probabilities
                            .iter()
                            .zip(base_p)
                            .map(|(p, b)| p - b)
                            .collect();
                        WhatIfItem {
                            override_: raw.clone(),
                            status: ItemStatus::Ok,
                            response: Some(response),
                            delta: Some(delta),
                            errors: vec![],
                        }
                    }
                    Err(e) => WhatIfItem {
                        override_: raw.clone(),
                        status: ItemStatus::Error,
                        response: None,
                        delta: None,
                        errors: vec![e],
                    },
                }
            })
            .collect())
    }
}

type Shared = Option<Arc<Artifacts>>;

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(status: StatusCode, errors: &[FieldError]) -> Response {
    let body = serde_json::json!({ "errors": errors });
    json_response(status, body.to_string())
}

fn unavailable() -> Response {
    error_response(
        StatusCode::SERVICE_UNAVAILABLE,
        &[FieldError::new("", "artifacts not loaded")],
    )
}

fn parse_body(body: &Bytes) -> std::result::Result<Value, Vec<FieldError>> {
    serde_json::from_slice(body).map_err(|e| vec![FieldError::new("", format!("invalid JSON: {e}"))])
}

async fn schema_handler(State(state): State<Shared>) -> Response {
    match state {
        Some(a) => json_response(StatusCode::OK, a.schema_json().to_string()),
        None => unavailable(),
    }
}

async fn predict_handler(State(state): State<Shared>, body: Bytes) -> Response {
    let Some(a) = state else { return unavailable() };
    match parse_body(&body).and_then(|v| a.predict(&v)) {
        Ok(r) => json_response(StatusCode::OK, serde_json::to_string(&r).expect("serializable")),
        Err(errs) => error_response(StatusCode::BAD_REQUEST, &errs),
    }
}

async fn whatif_handler(State(state): State<Shared>, body: Bytes) -> Response {
    let Some(a) = state else { return unavailable() };
    match parse_body(&body).and_then(|v| a.whatif(&v)) {
        Ok(items) => json_response(StatusCode::OK, serde_json::to_string(&items).expect("serializable")),
        Err(errs) => error_response(StatusCode::BAD_REQUEST, &errs),
    }
}

/// Routes: `GET /schema`, `POST /predict`, `POST /whatif`. Without artifacts
/// every route answers 503.
pub fn router(artifacts: Option<Arc<Artifacts>>) -> Router {
    Router::new()
        .route("/schema", get(schema_handler))
        .route("/predict", post(predict_handler))
        .route("/whatif", post(whatif_handler))
        .layer(CorsLayer::permissive())
        .with_state(artifacts)
}

/// Serves until the process is stopped.
pub async fn serve(addr: std::net::SocketAddr, artifacts: Option<Arc<Artifacts>>) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(artifacts)).await?;
    Ok(())
}
