//! File formats, the experiment pipeline and the `psdet` command line on top
//! of [`psdet_core`].

pub mod bench;
pub mod boxes;
pub mod config;
pub mod detector;
pub mod error;
pub mod jsonio;
pub mod pipeline;
pub mod ply;
pub mod pnm;
pub mod scenefile;

pub use error::{PipelineError, Result};
