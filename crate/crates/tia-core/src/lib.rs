//! Tubular topological interlocking assemblies.
//!
//! The pipeline runs from parametric block geometry ([`geometry`]) through
//! face-pair contact detection ([`contact`]) and rigid-body statics
//! ([`statics`]) to contact-pressure metrics ([`metrics`]). [`pipeline`]
//! strings the stages together for one design point; [`sweep`] runs a grid of
//! design points, in parallel when the `parallel` feature is enabled.

pub mod contact;
pub mod error;
pub mod export;
pub mod geometry;
pub mod linalg;
pub mod loads;
pub mod metrics;
pub mod par;
pub mod pipeline;
pub mod statics;
pub mod sweep;
pub mod tolerances;

pub use error::{Error, Result};

/// 3-vector in millimetres (or N, N·mm, depending on context).
pub type Vec3 = nalgebra::Vector3<f64>;
