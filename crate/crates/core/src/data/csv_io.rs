use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::dataset::Dataset;
use super::schema::AttributeSchema;
use crate::error::{Error, Result};

/// What to do with a row that has an empty or absent cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MissingPolicy {
    #[default]
    Fail,
    Skip,
}

impl std::str::FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fail" => Ok(MissingPolicy::Fail),
            "skip" => Ok(MissingPolicy::Skip),
            other => Err(Error::InvalidArgument(format!(
                "missing-value policy must be `fail` or `skip`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug)]
pub struct LoadReport {
    pub dataset: Dataset,
    /// Rows rejected under [`MissingPolicy::Skip`].
    pub skipped: usize,
}

pub fn load_csv(path: &Path, schema: &AttributeSchema, policy: MissingPolicy) -> Result<LoadReport> {
    read_csv(File::open(path)?, schema, policy)
}

/// Parses CSV whose header names the schema attributes in any order.
///
/// Rows are numbered from 1, not counting the header.
pub fn read_csv<R: Read>(reader: R, schema: &AttributeSchema, policy: MissingPolicy) -> Result<LoadReport> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    // column position -> schema attribute index
    let mut column_attr = Vec::with_capacity(header.len());
    let mut seen = vec![false; schema.len()];
    for name in header.iter() {
        let idx = schema
            .index_of(name)
            .map_err(|_| Error::UnknownColumn(name.to_string()))?;
        if seen[idx] {
            return Err(Error::Schema(format!("column `{name}` appears twice")));
        }
        seen[idx] = true;
        column_attr.push(idx);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::MissingColumn(schema.attribute(missing).name.clone()));
    }

    let mut records = Vec::new();
    let mut skipped = 0;
    for (row_no, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = row_no + 1;
        let mut record = vec![usize::MAX; schema.len()];
        let mut missing = None;
        for (col, &attr_idx) in column_attr.iter().enumerate() {
            let attr = schema.attribute(attr_idx);
            match row.get(col) {
                None | Some("") => {
                    missing.get_or_insert(attr.name.clone());
                }
                Some(cell) => {
                    record[attr_idx] = attr.level_index(cell).ok_or_else(|| Error::UnknownLevel {
                        row: row_no,
                        column: attr.name.clone(),
                        value: cell.to_string(),
                    })?;
                }
            }
        }
        if let Some(column) = missing {
            match policy {
                MissingPolicy::Fail => return Err(Error::MissingValue { row: row_no, column }),
                MissingPolicy::Skip => {
                    skipped += 1;
                    continue;
                }
            }
        }
        records.push(record);
    }

    Ok(LoadReport {
        dataset: Dataset::new(schema.clone(), records)?,
        skipped,
    })
}

/// Writes level names in schema column order with an attribute-name header.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.schema().attributes().iter().map(|a| a.name.as_str()))?;
    for r in data.records() {
        w.write_record(data.labels_of(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: &Path) -> Result<()> {
    write_csv(data, File::create(path)?)
}
