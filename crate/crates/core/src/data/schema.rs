use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Predictor,
    Class,
}

/// A named categorical attribute with an ordered list of levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub levels: Vec<String>,
    pub role: Role,
}

impl Attribute {
    pub fn new<S: Into<String>>(name: S, levels: &[&str], role: Role) -> Self {
        Attribute {
            name: name.into(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
            role,
        }
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, level: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    attributes: Vec<Attribute>,
}

/// Ordered set of categorical attributes, exactly one of which is the class.
///
/// Validated on construction and on deserialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct AttributeSchema {
    attributes: Vec<Attribute>,
    class_index: usize,
}

impl TryFrom<RawSchema> for AttributeSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        AttributeSchema::new(raw.attributes)
    }
}

impl From<AttributeSchema> for RawSchema {
    fn from(s: AttributeSchema) -> Self {
        RawSchema {
            attributes: s.attributes,
        }
    }
}

impl AttributeSchema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        let mut names = HashSet::new();
        for a in &attributes {
            if !names.insert(a.name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute name `{}`", a.name)));
            }
            if a.levels.len() < 2 {
                return Err(Error::Schema(format!(
                    "attribute `{}` needs at least 2 levels",
                    a.name
                )));
            }
            let mut seen = HashSet::new();
            for l in &a.levels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::Schema(format!(
                        "attribute `{}` repeats level `{l}`",
                        a.name
                    )));
                }
            }
        }
        let classes: Vec<usize> = attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Class)
            .map(|(i, _)| i)
            .collect();
        if classes.len() != 1 {
            return Err(Error::Schema(format!(
                "exactly one class attribute required, found {}",
                classes.len()
            )));
        }
        Ok(AttributeSchema {
            attributes,
            class_index: classes[0],
        })
    }

    /// The nine attributes of the youth survey decision tree, class last.
    pub fn youth_survey() -> Self {
        use Role::*;
        let attrs = vec![
            Attribute::new(
                "Type of Activity",
                &[
                    "Permanently Employed",
                    "Temporarily Employed",
                    "Self Employed",
                    "Unemployed",
                    "Student",
                    "Housework",
                    "Other",
                ],
                Predictor,
            ),
            Attribute::new(
                "Educational Level",
                &["No Schooling/Grade 1-5", "Grade 6-11", "G.C.E. A/L and Above"],
                Predictor,
            ),
            Attribute::new(
                "Province",
                &[
                    "Western",
                    "Central",
                    "Southern",
                    "Northern",
                    "Eastern",
                    "North Western",
                    "North Central",
                    "Uva",
                    "Sabaragamuwa",
                ],
                Predictor,
            ),
            Attribute::new("Gender", &["Male", "Female"], Predictor),
            Attribute::new(
                "Social Class",
                &["Upper Class", "Middle Class", "Working Class", "Lower Class"],
                Predictor,
            ),
            Attribute::new("Age Group", &["15-19 yrs", "20-24 yrs", "25-29 yrs"], Predictor),
            Attribute::new(
                "Financial Situation in Past",
                &["Good", "Moderate", "Poor"],
                Predictor,
            ),
            Attribute::new(
                "Major Problems with Education",
                &[
                    "No Problems",
                    "Financial Difficulties",
                    "Distance to School",
                    "Lack of Teachers",
                    "Lack of Facilities",
                    "Family Responsibilities",
                    "Poor Health",
                    "Other Problems",
                ],
                Predictor,
            ),
            Attribute::new(
                "Type of Further Education Desire",
                &[
                    "Technical/Vocational Education",
                    "University/Higher Education",
                    "No Desire",
                ],
                Class,
            ),
        ];
        AttributeSchema::new(attrs).expect("built-in schema is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    /// SHA-256 over the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("schema serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn by_name(&self, name: &str) -> Result<&Attribute> {
        Ok(&self.attributes[self.index_of(name)?])
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn n_classes(&self) -> usize {
        self.class_attribute().n_levels()
    }

    /// Indices of predictor attributes in schema order.
    pub fn predictor_indices(&self) -> Vec<usize> {
        (0..self.attributes.len())
            .filter(|&i| i != self.class_index)
            .collect()
    }

    pub fn predictor_names(&self) -> Vec<String> {
        self.predictor_indices()
            .into_iter()
            .map(|i| self.attributes[i].name.clone())
            .collect()
    }

    /// Class level used as the reference outcome: "No Desire" when present,
    /// otherwise the last level.
    pub fn baseline_class(&self) -> usize {
        let class = self.class_attribute();
        class
            .level_index("No Desire")
            .unwrap_or(class.n_levels() - 1)
    }

    /// Checks one level index per attribute, each within range.
    pub fn check_record(&self, record: &[usize]) -> Result<()> {
        if record.len() != self.attributes.len() {
            return Err(Error::RecordMismatch(format!(
                "expected {} values, got {}",
                self.attributes.len(),
                record.len()
            )));
        }
        for (a, &v) in self.attributes.iter().zip(record) {
            if v >= a.n_levels() {
                return Err(Error::RecordMismatch(format!(
                    "level index {v} out of range for `{}` ({} levels)",
                    a.name,
                    a.n_levels()
                )));
            }
        }
        Ok(())
    }
}
