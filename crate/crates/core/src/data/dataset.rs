use super::schema::AttributeSchema;
use crate::error::Result;

/// One level index per schema attribute, in schema order.
pub type Record = Vec<usize>;

/// Records conforming to a schema. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    schema: AttributeSchema,
    records: Vec<Record>,
}

impl Dataset {
    pub fn new(schema: AttributeSchema, records: Vec<Record>) -> Result<Self> {
        for r in &records {
            schema.check_record(r)?;
        }
        Ok(Dataset { schema, records })
    }

    pub fn empty(schema: AttributeSchema) -> Self {
        Dataset {
            schema,
            records: Vec::new(),
        }
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Class level index of every record.
    pub fn class_labels(&self) -> Vec<usize> {
        let c = self.schema.class_index();
        self.records.iter().map(|r| r[c]).collect()
    }

    /// Records selected by index, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Level names of one record.
    pub fn labels_of(&self, record: &[usize]) -> Vec<&str> {
        self.schema
            .attributes()
            .iter()
            .zip(record)
            .map(|(a, &v)| a.levels[v].as_str())
            .collect()
    }
}
