//! IO, file formats and the experiment harness around `hs-core`.

pub mod harness;
pub mod schema;
