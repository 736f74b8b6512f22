//! Schema, records, CSV ingestion and cross-tabulation.

mod crosstab;
mod csv_io;
mod dataset;
mod schema;

pub use crosstab::{cross_tab, ContingencyTable};
pub use csv_io::{load_csv, read_csv, save_csv, write_csv, LoadReport, MissingPolicy};
pub use dataset::{Dataset, Record};
pub use schema::{Attribute, AttributeSchema, Role};
