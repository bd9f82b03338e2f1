//! Scene assembly: one glyph per location, all sharing one length scale.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    build_glyph, BodyShape, GlyphKind, GlyphMesh, GlyphStyle, DEFAULT_EXPONENT, DEFAULT_SEGMENTS,
};
use crate::error::{Error, Result};
use crate::field::{EnsembleField, GridIndex, RegionSelection};
use crate::summary::{LocationSummary, UncertaintySummary};
use crate::vecmath::add;

pub const DEFAULT_USER_SCALE: f64 = 0.8;

/// Common scale so the longest glyph of the field spans
/// `cell_size · user_scale`.
pub fn normalize_scene<'a, I>(summaries: I, cell_size: f64, user_scale: f64) -> Result<f64>
where
    I: IntoIterator<Item = &'a UncertaintySummary>,
{
    if !(cell_size > 0.0 && user_scale > 0.0 && cell_size.is_finite() && user_scale.is_finite()) {
        return Err(Error::Argument(format!(
            "cell size {cell_size} and user scale {user_scale} must be positive"
        )));
    }
    let longest = summaries
        .into_iter()
        .filter(|s| s.is_drawable())
        .map(UncertaintySummary::max_magnitude)
        .fold(0.0, f64::max);
    if longest.is_nan() || longest <= 0.0 {
        return Err(Error::Degenerate(
            "no drawable summary to normalize against".into(),
        ));
    }
    Ok(cell_size * user_scale / longest)
}

/// Smallest grid spacing over axes with more than one cell (all axes if
/// the grid is a single cell).
pub fn cell_size(field: &EnsembleField) -> f64 {
    let dims = field.dims();
    let spacing = field.spacing();
    let over = |pred: &dyn Fn(usize) -> bool| {
        (0..3)
            .filter(|&a| pred(a))
            .map(|a| spacing[a])
            .fold(f64::INFINITY, f64::min)
    };
    let c = over(&|a| dims[a] > 1);
    if c.is_finite() {
        c
    } else {
        over(&|_| true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneRequest {
    pub t: usize,
    pub region: Option<RegionSelection>,
    pub kind: GlyphKind,
    pub exponent: f64,
    pub segments: usize,
    pub user_scale: f64,
    pub body: BodyShape,
}

impl Default for SceneRequest {
    fn default() -> Self {
        SceneRequest {
            t: 0,
            region: None,
            kind: GlyphKind::Squid,
            exponent: DEFAULT_EXPONENT,
            segments: DEFAULT_SEGMENTS,
            user_scale: DEFAULT_USER_SCALE,
            body: BodyShape::Tapered,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SceneGlyph {
    pub location: GridIndex,
    pub mesh: GlyphMesh,
    pub summary: UncertaintySummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlyphScene {
    pub dataset: String,
    pub t: usize,
    pub region: RegionSelection,
    pub style: GlyphStyle,
    pub cell_size: f64,
    pub user_scale: f64,
    /// World units per magnitude unit, shared by every glyph of time `t`.
    pub scale: f64,
    pub glyphs: Vec<SceneGlyph>,
    /// Locations without a glyph (zero median vector).
    pub skipped: Vec<GridIndex>,
}

impl GlyphScene {
    /// Builds glyphs for the requested region. `summaries` must cover every
    /// location of the field at `req.t` in `(k, j, i)` order; the scale is
    /// normalized over all of them so regional views match the global one.
    pub fn build(
        field: &EnsembleField,
        summaries: &[LocationSummary],
        req: &SceneRequest,
    ) -> Result<Self> {
        field.check_time(req.t)?;
        if summaries.len() != field.location_count()
            || summaries.iter().any(|s| s.location.t != req.t)
        {
            return Err(Error::Argument(format!(
                "scene needs one summary per location at t={}",
                req.t
            )));
        }
        let region = req
            .region
            .unwrap_or_else(|| RegionSelection::full(field.dims()));
        region.check_within(field.dims())?;
        let cell = cell_size(field);
        let scale = normalize_scene(summaries.iter().map(|s| &s.summary), cell, req.user_scale)?;
        let style = GlyphStyle {
            exponent: req.exponent,
            segments: req.segments,
            body: req.body,
            ..GlyphStyle::new(req.kind, scale)
        };
        style.validate()?;

        let selected: Vec<&LocationSummary> = summaries
            .iter()
            .filter(|s| region.contains(s.location.i, s.location.j, s.location.k))
            .collect();
        let built: Vec<Option<SceneGlyph>> = selected
            .par_iter()
            .map(|ls| {
                if !ls.summary.is_drawable() {
                    return Ok(None);
                }
                let mut mesh = build_glyph(&ls.summary, &style)?;
                let l = ls.location;
                mesh.transform.origin = field.position(l.i, l.j, l.k);
                Ok(Some(SceneGlyph {
                    location: l,
                    mesh,
                    summary: ls.summary.clone(),
                }))
            })
            .collect::<Result<_>>()?;

        let mut glyphs = Vec::with_capacity(built.len());
        let mut skipped = Vec::new();
        for (ls, g) in selected.iter().zip(built) {
            match g {
                Some(g) => glyphs.push(g),
                None => skipped.push(ls.location),
            }
        }
        Ok(GlyphScene {
            dataset: field.name().to_string(),
            t: req.t,
            region,
            style,
            cell_size: cell,
            user_scale: req.user_scale,
            scale,
            glyphs,
            skipped,
        })
    }

    /// Compact JSON. Identical scenes give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scene values are finite")
    }

    pub fn write_obj<W: Write>(&self, w: W) -> io::Result<()> {
        let meshes: Vec<(String, &GlyphMesh)> = self
            .glyphs
            .iter()
            .map(|g| {
                let l = g.location;
                (format!("glyph_{}_{}_{}", l.i, l.j, l.k), &g.mesh)
            })
            .collect();
        let header = [
            "squid glyph scene".to_string(),
            format!("dataset: {}", self.dataset),
            format!("t: {}", self.t),
            format!(
                "style: {} exponent {} segments {} body {:?}",
                self.style.kind, self.style.exponent, self.style.segments, self.style.body
            ),
            format!("scale: {}", self.scale),
            format!("glyphs: {}", self.glyphs.len()),
        ];
        export_obj(&header, &meshes, w)
    }
}

/// Writes meshes as Wavefront OBJ, one group per mesh, positions in world
/// coordinates.
pub fn export_obj<W: Write>(
    header: &[String],
    meshes: &[(String, &GlyphMesh)],
    w: W,
) -> io::Result<()> {
    let mut w = io::BufWriter::new(w);
    for line in header {
        writeln!(w, "# {line}")?;
    }
    let mut base = 1usize;
    for (name, mesh) in meshes {
        writeln!(w, "g {name}")?;
        for p in &mesh.positions {
            let q = add(*p, mesh.transform.origin);
            writeln!(w, "v {} {} {}", q[0], q[1], q[2])?;
        }
        for n in &mesh.normals {
            writeln!(w, "vn {} {} {}", n[0], n[1], n[2])?;
        }
        for t in &mesh.indices {
            let [a, b, c] = t.map(|v| v as usize + base);
            writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
        }
        base += mesh.positions.len();
    }
    w.flush()
}
