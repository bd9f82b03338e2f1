//! Glyph meshes: the squid glyph and the cone, comet and tailed-disc
//! comparison glyphs, plus scene assembly and export.

mod build;
mod mesh;
mod scene;
mod superellipse;

pub use build::{build_comparison, build_glyph, build_squid, GLYPH_FLOOR};
pub use mesh::{GlyphMesh, MeshDefect, Placement, PART_BODY, PART_DISC, PART_HEAD};
pub use scene::{
    cell_size, normalize_scene, GlyphScene, SceneGlyph, SceneRequest, DEFAULT_USER_SCALE,
};
pub use superellipse::{superellipse_profile, SuperellipseParams, MIN_SEGMENTS};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlyphKind {
    Squid,
    Cone,
    Comet,
    TailedDisc,
}

impl GlyphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GlyphKind::Squid => "squid",
            GlyphKind::Cone => "cone",
            GlyphKind::Comet => "comet",
            GlyphKind::TailedDisc => "tailed-disc",
        }
    }
}

impl fmt::Display for GlyphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GlyphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squid" => Ok(GlyphKind::Squid),
            "cone" => Ok(GlyphKind::Cone),
            "comet" => Ok(GlyphKind::Comet),
            "tailed-disc" => Ok(GlyphKind::TailedDisc),
            other => Err(Error::Argument(format!(
                "unknown glyph type {other:?} (expected squid, cone, comet or tailed-disc)"
            ))),
        }
    }
}

/// Squid body silhouette.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyShape {
    /// Cross-section grows linearly from the apex at the glyph origin.
    #[default]
    Tapered,
    /// Constant cross-section up to the head.
    Shaft,
}

impl FromStr for BodyShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tapered" => Ok(BodyShape::Tapered),
            "shaft" => Ok(BodyShape::Shaft),
            other => Err(Error::Argument(format!("unknown body shape {other:?}"))),
        }
    }
}

pub const DEFAULT_EXPONENT: f64 = 2.5;
pub const DEFAULT_SEGMENTS: usize = 48;
pub const DEFAULT_COMET_SHAFT_RATIO: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphStyle {
    pub kind: GlyphKind,
    /// Superellipse exponent of the squid cross-section.
    pub exponent: f64,
    pub segments: usize,
    /// World units per unit of vector magnitude.
    pub scale: f64,
    pub body: BodyShape,
    /// Comet tail radius as a fraction of `r₀`.
    pub comet_shaft_ratio: f64,
}

impl GlyphStyle {
    pub fn new(kind: GlyphKind, scale: f64) -> Self {
        GlyphStyle {
            kind,
            exponent: DEFAULT_EXPONENT,
            segments: DEFAULT_SEGMENTS,
            scale,
            body: BodyShape::Tapered,
            comet_shaft_ratio: DEFAULT_COMET_SHAFT_RATIO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // below 1 the cross-section has cusps and no well-defined normals
        if !(self.exponent >= 1.0 && self.exponent.is_finite()) {
            return Err(Error::Argument(format!(
                "glyph exponent {} must be a finite value of at least 1",
                self.exponent
            )));
        }
        if self.segments < MIN_SEGMENTS {
            return Err(Error::Argument(format!(
                "glyph needs at least {MIN_SEGMENTS} segments, got {}",
                self.segments
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Argument(format!(
                "glyph scale {} must be positive",
                self.scale
            )));
        }
        if !(self.comet_shaft_ratio > 0.0 && self.comet_shaft_ratio.is_finite()) {
            return Err(Error::Argument(format!(
                "comet shaft ratio {} must be positive",
                self.comet_shaft_ratio
            )));
        }
        Ok(())
    }
}
