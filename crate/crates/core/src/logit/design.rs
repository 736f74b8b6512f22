use super::term::{ModelSpec, ModelTerm};
use crate::data::AttributeSchema;
use crate::error::Result;

/// Columns contributed by one term.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TermBlock {
    /// Schema indices of the term's attributes (empty for the intercept).
    attrs: Vec<usize>,
    /// Level counts of those attributes.
    levels: Vec<usize>,
    offset: usize,
}

/// Reference-coded design layout for a spec over a schema.
///
/// Main effects get one indicator per non-reference level (the last level is
/// the reference); an interaction gets the row-major product of its parents'
/// indicators. Every entry is 0 or 1, so rows are represented by the sorted
/// indices of their active columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignLayout {
    blocks: Vec<TermBlock>,
    labels: Vec<String>,
    n_attrs: usize,
}

impl DesignLayout {
    pub fn new(spec: &ModelSpec, schema: &AttributeSchema) -> Result<Self> {
        let mut blocks = Vec::with_capacity(spec.terms().len());
        let mut labels = Vec::new();
        for term in spec.terms() {
            term.check(schema)?;
            let offset = labels.len();
            match term {
                ModelTerm::Intercept => {
                    labels.push("Intercept".to_string());
                    blocks.push(TermBlock {
                        attrs: vec![],
                        levels: vec![],
                        offset,
                    });
                }
                ModelTerm::Main { attr } => {
                    let i = schema.index_of(attr)?;
                    let a = schema.attribute(i);
                    for lvl in &a.levels[..a.n_levels() - 1] {
                        labels.push(format!("{}={}", a.name, lvl));
                    }
                    blocks.push(TermBlock {
                        attrs: vec![i],
                        levels: vec![a.n_levels()],
                        offset,
                    });
                }
                ModelTerm::Interaction { a, b } => {
                    let (ia, ib) = (schema.index_of(a)?, schema.index_of(b)?);
                    let (aa, ab) = (schema.attribute(ia), schema.attribute(ib));
                    for la in &aa.levels[..aa.n_levels() - 1] {
                        for lb in &ab.levels[..ab.n_levels() - 1] {
                            labels.push(format!("{}={}×{}={}", aa.name, la, ab.name, lb));
                        }
                    }
                    blocks.push(TermBlock {
                        attrs: vec![ia, ib],
                        levels: vec![aa.n_levels(), ab.n_levels()],
                        offset,
                    });
                }
            }
        }
        Ok(DesignLayout {
            blocks,
            labels,
            n_attrs: schema.len(),
        })
    }

    /// Number of design columns P.
    pub fn n_columns(&self) -> usize {
        self.labels.len()
    }

    pub fn column_labels(&self) -> &[String] {
        &self.labels
    }

    /// Indices of the columns equal to 1 for this record, ascending.
    pub fn active_columns(&self, record: &[usize]) -> Vec<usize> {
        debug_assert_eq!(record.len(), self.n_attrs);
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            match b.attrs.as_slice() {
                [] => out.push(b.offset),
                [a] => {
                    let v = record[*a];
                    if v + 1 < b.levels[0] {
                        out.push(b.offset + v);
                    }
                }
                [a, c] => {
                    let (va, vc) = (record[*a], record[*c]);
                    if va + 1 < b.levels[0] && vc + 1 < b.levels[1] {
                        out.push(b.offset + va * (b.levels[1] - 1) + vc);
                    }
                }
                _ => unreachable!("terms have at most two attributes"),
            }
        }
        out
    }

    /// Dense design row.
    pub fn encode(&self, record: &[usize]) -> Vec<f64> {
        let mut row = vec![0.0; self.n_columns()];
        for c in self.active_columns(record) {
            row[c] = 1.0;
        }
        row
    }
}

/// Dense design row for `record` under `spec`.
pub fn encode_design(spec: &ModelSpec, schema: &AttributeSchema, record: &[usize]) -> Result<Vec<f64>> {
    schema.check_record(record)?;
    Ok(DesignLayout::new(spec, schema)?.encode(record))
}
