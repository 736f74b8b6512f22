use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::AttributeSchema;
use crate::error::{Error, Result};

/// One term of a logit model's linear predictor.
///
/// The derived ordering (intercept, then main effects, then interactions,
/// each by attribute name) is the canonical term order used for tie-breaks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelTerm {
    Intercept,
    Main { attr: String },
    Interaction { a: String, b: String },
}

impl ModelTerm {
    pub fn main<S: Into<String>>(attr: S) -> Self {
        ModelTerm::Main { attr: attr.into() }
    }

    /// Two-way interaction with its attributes in name order.
    pub fn interaction(a: &str, b: &str) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidArgument(format!(
                "interaction needs two distinct attributes, got `{a}` twice"
            )));
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(ModelTerm::Interaction {
            a: a.to_string(),
            b: b.to_string(),
        })
    }

    /// Parses `Intercept`, `Attr` or `AttrA*AttrB`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("intercept") {
            return Ok(ModelTerm::Intercept);
        }
        match text.split_once('*') {
            Some((a, b)) => ModelTerm::interaction(a.trim(), b.trim()),
            None if text.is_empty() => Err(Error::InvalidArgument("empty term".into())),
            None => Ok(ModelTerm::main(text)),
        }
    }

    /// Schema attributes this term draws on.
    pub fn attributes(&self) -> Vec<&str> {
        match self {
            ModelTerm::Intercept => vec![],
            ModelTerm::Main { attr } => vec![attr],
            ModelTerm::Interaction { a, b } => vec![a, b],
        }
    }

    pub fn check(&self, schema: &AttributeSchema) -> Result<()> {
        for name in self.attributes() {
            let idx = schema.index_of(name)?;
            if idx == schema.class_index() {
                return Err(Error::InvalidArgument(format!(
                    "class attribute `{name}` cannot be a model term"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTerm::Intercept => write!(f, "Intercept"),
            ModelTerm::Main { attr } => write!(f, "{attr}"),
            ModelTerm::Interaction { a, b } => write!(f, "{a}*{b}"),
        }
    }
}

/// Ordered term list, always starting with the intercept, without duplicates.
///
/// Interactions do not require their parent main effects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ModelTerm>", into = "Vec<ModelTerm>")]
pub struct ModelSpec {
    terms: Vec<ModelTerm>,
}

impl TryFrom<Vec<ModelTerm>> for ModelSpec {
    type Error = Error;

    fn try_from(terms: Vec<ModelTerm>) -> Result<Self> {
        ModelSpec::new(terms)
    }
}

impl From<ModelSpec> for Vec<ModelTerm> {
    fn from(s: ModelSpec) -> Self {
        s.terms
    }
}

impl ModelSpec {
    /// Builds a spec, prepending the intercept when absent.
    pub fn new(terms: Vec<ModelTerm>) -> Result<Self> {
        let mut out = vec![ModelTerm::Intercept];
        for t in terms {
            if t == ModelTerm::Intercept {
                continue;
            }
            if out.contains(&t) {
                return Err(Error::InvalidArgument(format!("duplicate term `{t}`")));
            }
            out.push(t);
        }
        Ok(ModelSpec { terms: out })
    }

    pub fn intercept_only() -> Self {
        ModelSpec {
            terms: vec![ModelTerm::Intercept],
        }
    }

    /// Comma-separated term list, e.g. `Gender, Province*Educational Level`.
    pub fn parse(text: &str) -> Result<Self> {
        let terms = text
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(ModelTerm::parse)
            .collect::<Result<Vec<_>>>()?;
        ModelSpec::new(terms)
    }

    pub fn terms(&self) -> &[ModelTerm] {
        &self.terms
    }

    pub fn contains(&self, term: &ModelTerm) -> bool {
        self.terms.contains(term)
    }

    pub fn with_term(&self, term: ModelTerm) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(term);
        ModelSpec::new(terms)
    }

    /// Distinct schema attributes referenced by any term, in first-use order.
    pub fn attributes(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in &self.terms {
            for a in t.attributes() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }
}
