//! File formats: trajectory CSV, JSON documents, SVG plots and OBJ meshes.

pub mod csv;
pub mod json;
pub mod obj;
pub mod svg;
