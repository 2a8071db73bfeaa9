//! File formats, differential checking and the command-line driver for `hac-core`.

pub mod check;
pub mod cli;
pub mod model_file;
pub mod parikh_doc;

pub use check::{check_model, CheckOptions, CheckReport, Finding};
pub use model_file::{model_from_str, model_to_json, model_to_string, FormatError};
