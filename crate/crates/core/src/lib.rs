//! Uncertainty summaries for time-varying 3D ensemble vector fields.
//!
//! * [`field`]: the ensemble grid, its on-disk format, a synthetic rotating
//!   field and brick-to-pseudo-ensemble ingestion.
//! * [`depth`]: spherical-coordinate vector depth, the depth median and
//!   depth-based outlier removal.
//! * [`summary`]: per-location squid glyph parameters.
//! * [`glyph`]: squid and comparison glyph meshes, scene scaling, OBJ and
//!   JSON export.
//! * [`point`]: per-member detail at one location and depth heatmaps.

pub mod depth;
pub mod error;
pub mod field;
pub mod glyph;
pub mod point;
pub mod summary;
pub mod vecmath;

pub use error::{Error, Result};
