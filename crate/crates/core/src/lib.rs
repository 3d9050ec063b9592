//! Activity-based quality models for maintainability.
//!
//! The crate covers the whole workflow around a two-dimensional quality
//! model that relates facts about a development situation to the
//! maintenance activities they affect:
//!
//! - [`model`]: the metamodel, its trees, inheritance and matrix algebra
//! - [`dsl`]: the `.qmm` text format
//! - [`validate`]: integrity, contradiction, coverage, omission and
//!   terminology analysis
//! - [`blockmodel`]: parser and metrics for `.bm` nested block files
//! - [`checkers`]: automated fact checkers bound to model facts
//! - [`profile`]: quality profiles over entities and activities
//! - [`docgen`]: guideline and checklist documents
//! - [`synth`]: deterministic scale models

pub mod blockmodel;
pub mod checkers;
pub mod diag;
pub mod docgen;
pub mod dsl;
pub mod model;
pub mod profile;
pub mod synth;
pub mod validate;

pub use diag::{Code, Diagnostic, Location, Severity, ValidationReport};
pub use model::{Category, Dimension, FactKey, ModelError, QualityModel, Sign};
