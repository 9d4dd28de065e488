//! Algorithms built on the superstep engine.

pub mod kway;
pub mod msf;
pub mod triangles;
