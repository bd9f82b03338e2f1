use super::mesh::{Frame, GlyphMesh, MeshBuilder, Section, Slab, PART_BODY, PART_DISC, PART_HEAD};
use super::{BodyShape, GlyphKind, GlyphStyle};
use crate::error::{Error, Result};
use crate::summary::{PlaneBasis, UncertaintySummary};
use crate::vecmath::{cross, normalize};

/// Minimum head length, radius and disc thickness, in magnitude units
/// (multiplied by the style scale).
pub const GLYPH_FLOOR: f64 = 0.02;

const ARROW_HEAD_FRACTION: f64 = 0.25;
const ARROW_HEAD_RADIUS: f64 = 0.08;
const ARROW_SHAFT_RADIUS: f64 = 0.03;

fn frame_for(summary: &UncertaintySummary) -> Frame {
    let axis = summary.median_dir;
    let x_dir = normalize(summary.sigma0).unwrap_or_else(|| PlaneBasis::new(axis).e1);
    Frame {
        x_dir,
        y_dir: cross(axis, x_dir),
        axis,
    }
}

fn check(summary: &UncertaintySummary, style: &GlyphStyle) -> Result<()> {
    style.validate()?;
    if !summary.is_drawable() {
        return Err(Error::Degenerate("summary has a zero median vector".into()));
    }
    Ok(())
}

struct Lengths {
    body: f64,
    total: f64,
    floor: f64,
}

fn lengths(summary: &UncertaintySummary, s: f64) -> Lengths {
    let floor = GLYPH_FLOOR * s;
    let body = summary.h * s;
    Lengths {
        body,
        total: body + (summary.delta_h * s).max(floor),
        floor,
    }
}

/// Squid glyph: apex at the origin, pointing along the median direction.
///
/// The superelliptic cross-section grows linearly with distance from the
/// apex and reaches semi-axes `(r₀, r₁)·s`, oriented along `σ₀, σ₁`, at the
/// far end. The body spans `[0, h·s]`; the head spans the rest.
pub fn build_squid(summary: &UncertaintySummary, style: &GlyphStyle) -> Result<GlyphMesh> {
    check(summary, style)?;
    let s = style.scale;
    let len = lengths(summary, s);
    let sec = Section {
        a: (summary.r0 * s).max(len.floor),
        b: (summary.r1 * s).max(len.floor),
        exponent: style.exponent,
    };
    let split = len.body / len.total;
    let mut mb = MeshBuilder::new(frame_for(summary), style.segments);
    if len.body > 0.0 {
        let (s0, s1) = match style.body {
            BodyShape::Tapered => (0.0, split),
            BodyShape::Shaft => (split, split),
        };
        mb.slab(
            sec,
            Slab {
                z0: 0.0,
                z1: len.body,
                s0,
                s1,
            },
            PART_BODY,
        );
    }
    mb.slab(
        sec,
        Slab {
            z0: len.body,
            z1: len.total,
            s0: split,
            s1: 1.0,
        },
        PART_HEAD,
    );
    Ok(mb.finish())
}

/// Cone, comet or tailed-disc glyph for the same summary.
pub fn build_comparison(summary: &UncertaintySummary, style: &GlyphStyle) -> Result<GlyphMesh> {
    check(summary, style)?;
    let s = style.scale;
    let len = lengths(summary, s);
    let full = summary.max_magnitude() * s;
    let base = (summary.r0 * s).max(len.floor);
    let circle = |r: f64| Section {
        a: r,
        b: r,
        exponent: 2.0,
    };
    let mut mb = MeshBuilder::new(frame_for(summary), style.segments);
    match style.kind {
        GlyphKind::Cone => {
            // angular spread only; h and Δh are not distinguished
            mb.slab(
                circle(base),
                Slab {
                    z0: 0.0,
                    z1: full,
                    s0: 0.0,
                    s1: 1.0,
                },
                PART_HEAD,
            );
        }
        GlyphKind::Comet => {
            if len.body > 0.0 {
                let tail = (summary.r0 * style.comet_shaft_ratio * s).max(len.floor);
                mb.slab(
                    circle(tail),
                    Slab {
                        z0: 0.0,
                        z1: len.body,
                        s0: 1.0,
                        s1: 1.0,
                    },
                    PART_BODY,
                );
            }
            mb.slab(
                circle(base),
                Slab {
                    z0: len.body,
                    z1: len.total,
                    s0: 0.0,
                    s1: 1.0,
                },
                PART_HEAD,
            );
        }
        GlyphKind::TailedDisc => {
            let head_len = ARROW_HEAD_FRACTION * full;
            let shaft_end = full - head_len;
            mb.slab(
                circle(ARROW_SHAFT_RADIUS * full),
                Slab {
                    z0: 0.0,
                    z1: shaft_end,
                    s0: 1.0,
                    s1: 1.0,
                },
                PART_BODY,
            );
            mb.slab(
                circle(ARROW_HEAD_RADIUS * full),
                Slab {
                    z0: shaft_end,
                    z1: full,
                    s0: 1.0,
                    s1: 0.0,
                },
                PART_HEAD,
            );
            let half = 0.5 * len.floor;
            mb.slab(
                circle(base),
                Slab {
                    z0: full - half,
                    z1: full + half,
                    s0: 1.0,
                    s1: 1.0,
                },
                PART_DISC,
            );
        }
        GlyphKind::Squid => return build_squid(summary, style),
    }
    Ok(mb.finish())
}

/// Dispatches on `style.kind`.
pub fn build_glyph(summary: &UncertaintySummary, style: &GlyphStyle) -> Result<GlyphMesh> {
    match style.kind {
        GlyphKind::Squid => build_squid(summary, style),
        _ => build_comparison(summary, style),
    }
}
