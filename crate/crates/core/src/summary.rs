//! Per-location squid glyph parameters.
//!
//! The median member (maximum vector depth) fixes the glyph axis. Magnitude
//! range gives body and head lengths. Directional spread comes from the
//! widest member angle (`α₀`) and from PCA of where member rays cross the
//! plane orthogonal to the median at distance `h + Δh`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{depth_of_vectors, MIN_MEMBERS};
use crate::error::{Error, Result};
use crate::field::{EnsembleField, GridIndex, RegionSelection};
use crate::vecmath::{
    add, angle_between, cross, dot, is_finite, norm, normalize, scale, sub, Vec3,
};

/// Apex angles are clamped to `π - APEX_MARGIN`.
pub const APEX_MARGIN: f64 = 1e-3;
/// Relative tolerance for a member ray to reach the tip plane.
pub const PLANE_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degeneracy {
    pub zero_median: bool,
    pub zero_spread: bool,
    /// Members that cannot reach the tip plane (≥ 90° from the median, or zero).
    pub clipped_members: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintySummary {
    pub median_index: usize,
    pub median_dir: Vec3,
    pub h: f64,
    pub delta_h: f64,
    pub alpha0: f64,
    pub sigma0: Vec3,
    pub sigma1: Vec3,
    pub r0: f64,
    pub r1: f64,
    pub alpha1: f64,
    pub degenerate: Degeneracy,
}

impl UncertaintySummary {
    /// `h + Δh`, the largest member magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.h + self.delta_h
    }

    pub fn is_drawable(&self) -> bool {
        !self.degenerate.zero_median
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagnitudeStats {
    pub h: f64,
    pub delta_h: f64,
    pub max_index: usize,
}

pub fn magnitude_stats(members: &[Vec3]) -> Result<MagnitudeStats> {
    if members.is_empty() {
        return Err(Error::Argument(
            "magnitude statistics of an empty ensemble".into(),
        ));
    }
    let mags: Vec<f64> = members.iter().map(|&v| norm(v)).collect();
    let h = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let max_index = mags
        .iter()
        .enumerate()
        .fold(0, |best, (m, &x)| if x > mags[best] { m } else { best });
    Ok(MagnitudeStats {
        h,
        delta_h: mags[max_index] - h,
        max_index,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApexAngle {
    /// Twice the largest member deviation from the median direction.
    pub apex: f64,
    pub clamped: bool,
}

pub fn max_angular_deviation(members: &[Vec3], median_dir: Vec3) -> Result<ApexAngle> {
    let mut widest: Option<f64> = None;
    for &v in members {
        if norm(v) > 0.0 {
            let a = angle_between(v, median_dir);
            widest = Some(widest.map_or(a, |w: f64| w.max(a)));
        }
    }
    let widest = widest.ok_or_else(|| Error::Degenerate("every member vector is zero".into()))?;
    let limit = std::f64::consts::PI - APEX_MARGIN;
    let apex = 2.0 * widest;
    Ok(if apex > limit {
        ApexAngle {
            apex: limit,
            clamped: true,
        }
    } else {
        ApexAngle {
            apex,
            clamped: false,
        }
    })
}

/// Orthonormal frame of the plane orthogonal to `normal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneBasis {
    pub normal: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl PlaneBasis {
    /// `e1` is the global axis least aligned with `normal` (first on ties),
    /// projected into the plane; `e2 = normal × e1`.
    pub fn new(normal: Vec3) -> Self {
        let axis = (0..3).fold(0, |best, a| {
            if normal[a].abs() < normal[best].abs() {
                a
            } else {
                best
            }
        });
        let mut a = [0.0; 3];
        a[axis] = 1.0;
        let e1 =
            normalize(sub(a, scale(normal, dot(a, normal)))).expect("axis not parallel to normal");
        PlaneBasis {
            normal,
            e1,
            e2: cross(normal, e1),
        }
    }

    pub fn lift(&self, p: [f64; 2]) -> Vec3 {
        add(scale(self.e1, p[0]), scale(self.e2, p[1]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneProjection {
    pub basis: PlaneBasis,
    /// In-plane offsets from the median tip, one per reaching member.
    pub points: Vec<[f64; 2]>,
    pub clipped: usize,
}

/// Intersects member rays with the plane orthogonal to `median` through
/// `max_magnitude · median/|median|`.
pub fn plane_intersections(
    members: &[Vec3],
    median: Vec3,
    max_magnitude: f64,
) -> Result<PlaneProjection> {
    let n_hat =
        normalize(median).ok_or_else(|| Error::Degenerate("median vector is zero".into()))?;
    if max_magnitude.is_nan() || max_magnitude <= 0.0 {
        return Err(Error::Degenerate(format!(
            "tip distance {max_magnitude} is not positive"
        )));
    }
    let basis = PlaneBasis::new(n_hat);
    let tip = scale(n_hat, max_magnitude);
    let mut points = Vec::with_capacity(members.len());
    let mut clipped = 0;
    for &v in members {
        let along = dot(n_hat, v);
        if along > PLANE_EPS * norm(v) {
            let q = sub(scale(v, max_magnitude / along), tip);
            points.push([dot(q, basis.e1), dot(q, basis.e2)]);
        } else {
            clipped += 1;
        }
    }
    Ok(PlaneProjection {
        basis,
        points,
        clipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spread {
    pub sigma0: f64,
    pub sigma1: f64,
    /// Unit direction of the first principal axis.
    pub axis0: [f64; 2],
    /// Set when fewer than two points were given.
    pub insufficient: bool,
}

/// PCA of 2D points: covariance about the mean (divisor `n`), square-rooted
/// eigenvalues, `σ₀ ≥ σ₁`.
pub fn principal_spread(points: &[[f64; 2]]) -> Spread {
    if points.len() < 2 {
        return Spread {
            sigma0: 0.0,
            sigma1: 0.0,
            axis0: [1.0, 0.0],
            insufficient: true,
        };
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let (sxx, sxy, syy) = (sxx / n, sxy / n, syy / n);

    let mean = 0.5 * (sxx + syy);
    let half_gap = (0.5 * (sxx - syy)).hypot(sxy);
    let l0 = mean + half_gap;
    let l1 = (mean - half_gap).max(0.0);
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut axis0 = [angle.cos(), angle.sin()];
    let lead = if axis0[0] != 0.0 { axis0[0] } else { axis0[1] };
    if lead < 0.0 {
        axis0 = [-axis0[0], -axis0[1]];
    }
    Spread {
        sigma0: l0.sqrt(),
        sigma1: l1.sqrt(),
        axis0,
        insufficient: false,
    }
}

/// Derived glyph quantities from `h + Δh`, `α₀` and the spread ratio.
///
/// Returns `(r0, r1, alpha1)`. A zero `σ₀` keeps the base circular.
pub fn glyph_radii(max_magnitude: f64, alpha0: f64, sigma0: f64, sigma1: f64) -> (f64, f64, f64) {
    let r0 = max_magnitude * (0.5 * alpha0).tan();
    let r1 = if sigma0 > 0.0 {
        r0 * sigma1 / sigma0
    } else {
        r0
    };
    // atan2 covers r1 = 0 (α₁ = π/2)
    let alpha1 = max_magnitude.atan2(r1);
    (r0, r1, alpha1)
}

fn zero_median_summary(median_index: usize, h: f64, delta_h: f64) -> UncertaintySummary {
    UncertaintySummary {
        median_index,
        median_dir: [0.0; 3],
        h,
        delta_h,
        alpha0: 0.0,
        sigma0: [0.0; 3],
        sigma1: [0.0; 3],
        r0: 0.0,
        r1: 0.0,
        alpha1: 0.0,
        degenerate: Degeneracy {
            zero_median: true,
            zero_spread: true,
            clipped_members: 0,
        },
    }
}

/// Summarizes one ensemble with its depth median.
pub fn summarize(members: &[Vec3]) -> Result<UncertaintySummary> {
    if members.len() < MIN_MEMBERS {
        return Err(Error::Argument(format!(
            "summaries need at least {MIN_MEMBERS} members, got {}",
            members.len()
        )));
    }
    if let Some(bad) = members.iter().find(|v| !is_finite(**v)) {
        return Err(Error::Argument(format!("non-finite member vector {bad:?}")));
    }
    let median_index = depth_of_vectors(members)?.median_index;
    summarize_with_median(members, median_index)
}

/// Summary around a given median member.
pub fn summarize_with_median(members: &[Vec3], median_index: usize) -> Result<UncertaintySummary> {
    let mags = magnitude_stats(members)?;
    let median = members[median_index];
    let Some(median_dir) = normalize(median) else {
        return Ok(zero_median_summary(median_index, mags.h, mags.delta_h));
    };
    let max_magnitude = mags.h + mags.delta_h;
    let apex = max_angular_deviation(members, median_dir)?;
    let proj = plane_intersections(members, median, max_magnitude)?;
    let spread = principal_spread(&proj.points);

    let axis0 = proj.basis.lift(spread.axis0);
    let axis1 = cross(median_dir, axis0);
    let sigma0 = scale(axis0, spread.sigma0);
    let sigma1 = scale(axis1, spread.sigma1);
    let (r0, r1, alpha1) = glyph_radii(max_magnitude, apex.apex, spread.sigma0, spread.sigma1);

    Ok(UncertaintySummary {
        median_index,
        median_dir,
        h: mags.h,
        delta_h: mags.delta_h,
        alpha0: apex.apex,
        sigma0,
        sigma1,
        r0,
        r1,
        alpha1,
        degenerate: Degeneracy {
            zero_median: false,
            zero_spread: spread.sigma0.is_nan() || spread.sigma0 <= 0.0,
            clipped_members: proj.clipped,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationSummary {
    pub location: GridIndex,
    #[serde(flatten)]
    pub summary: UncertaintySummary,
}

/// Summaries for every location of `region` at time `t`, in `(k, j, i)`
/// order. Locations are processed in parallel.
pub fn summarize_region(
    field: &EnsembleField,
    region: &RegionSelection,
    t: usize,
) -> Result<Vec<LocationSummary>> {
    let indices = field.region_indices(region, t)?;
    indices
        .into_par_iter()
        .map(|location| {
            let members = field.members(location)?;
            Ok(LocationSummary {
                location,
                summary: summarize(&members)?,
            })
        })
        .collect()
}

pub fn summarize_time(field: &EnsembleField, t: usize) -> Result<Vec<LocationSummary>> {
    summarize_region(field, &RegionSelection::full(field.dims()), t)
}

const CSV_HEADER: [&str; 26] = [
    "location",
    "i",
    "j",
    "k",
    "t",
    "median_index",
    "median_dir_x",
    "median_dir_y",
    "median_dir_z",
    "h",
    "delta_h",
    "alpha0",
    "sigma0_x",
    "sigma0_y",
    "sigma0_z",
    "sigma1_x",
    "sigma1_y",
    "sigma1_z",
    "r0",
    "r1",
    "alpha1",
    "zero_median",
    "zero_spread",
    "clipped_members",
    "max_magnitude",
    "sigma_ratio",
];

/// Flattened CSV, one row per location.
pub fn write_summaries_csv<W: std::io::Write>(rows: &[LocationSummary], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in rows {
        let s = &row.summary;
        let l = row.location;
        let ratio = if norm(s.sigma0) > 0.0 {
            norm(s.sigma1) / norm(s.sigma0)
        } else {
            1.0
        };
        let mut rec = vec![
            l.to_string(),
            l.i.to_string(),
            l.j.to_string(),
            l.k.to_string(),
            l.t.to_string(),
            s.median_index.to_string(),
        ];
        rec.extend(s.median_dir.iter().map(f64::to_string));
        rec.extend([s.h, s.delta_h, s.alpha0].iter().map(f64::to_string));
        rec.extend(s.sigma0.iter().chain(&s.sigma1).map(f64::to_string));
        rec.extend([s.r0, s.r1, s.alpha1].iter().map(f64::to_string));
        rec.push(s.degenerate.zero_median.to_string());
        rec.push(s.degenerate.zero_spread.to_string());
        rec.push(s.degenerate.clipped_members.to_string());
        rec.push(s.max_magnitude().to_string());
        rec.push(ratio.to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Magnitude range over time: the per-step maximum of `Δh`, and optionally
/// every location's `Δh` at one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeVariation {
    pub series: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<MagnitudeSlice>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeSlice {
    pub t: usize,
    pub locations: Vec<GridIndex>,
    pub delta_h: Vec<f64>,
}

fn delta_h_at(field: &EnsembleField, t: usize) -> Result<Vec<(GridIndex, f64)>> {
    let indices = field.region_indices(&RegionSelection::full(field.dims()), t)?;
    indices
        .into_par_iter()
        .map(|idx| Ok((idx, magnitude_stats(&field.members(idx)?)?.delta_h)))
        .collect()
}

pub fn magvar(field: &EnsembleField, slice_t: Option<usize>) -> Result<MagnitudeVariation> {
    if let Some(t) = slice_t {
        field.check_time(t)?;
    }
    let mut series = Vec::with_capacity(field.nt());
    let mut slice = None;
    for t in 0..field.nt() {
        let values = delta_h_at(field, t)?;
        series.push(values.iter().map(|v| v.1).fold(0.0, f64::max));
        if slice_t == Some(t) {
            let (locations, delta_h) = values.into_iter().unzip();
            slice = Some(MagnitudeSlice {
                t,
                locations,
                delta_h,
            });
        }
    }
    Ok(MagnitudeVariation { series, slice })
}

impl MagnitudeVariation {
    pub fn write_series_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "max_delta_h"])?;
        for (t, v) in self.series.iter().enumerate() {
            out.write_record([t.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_slice_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["location", "i", "j", "k", "t", "delta_h"])?;
        if let Some(s) = &self.slice {
            for (l, v) in s.locations.iter().zip(&s.delta_h) {
                out.write_record([
                    l.to_string(),
                    l.i.to_string(),
                    l.j.to_string(),
                    l.k.to_string(),
                    l.t.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}
