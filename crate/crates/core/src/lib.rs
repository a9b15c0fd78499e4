//! Exact perimeter minimization on weighted graphs.

pub mod checks;
pub mod cli;
pub mod error;
pub mod extension;
pub mod exact;
pub mod functional;
pub mod mincut;
pub mod minimize;
pub mod scenarios;
pub mod space;
pub mod vertex_set;

pub use error::{Error, Result};
pub use exact::{Dyadic, ExactValue, Scale};
pub use space::{Space, VertexId};
pub use vertex_set::VertexSet;
