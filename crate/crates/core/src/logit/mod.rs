//! Baseline-category logit models over categorical terms.

mod classification;
mod design;
mod fit;
mod model;
mod term;

pub use classification::ClassificationTable;
pub use design::{encode_design, DesignLayout};
pub use fit::{fit, fit_with, FitOptions, LikelihoodSurface, SEPARATION_COEF};
pub use model::{argmax, softmax, FittedLogitModel, LogitModel, ModelArtifact};
pub use term::{ModelSpec, ModelTerm};
