//! Distribution detail at a single location, and depth heatmaps over a region.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{depth_of_vectors, lowest_depth_indices, DepthMatrix, MIN_MEMBERS};
use crate::error::{Error, Result};
use crate::field::{EnsembleField, GridIndex, RegionSelection};
use crate::summary::{summarize, summarize_with_median, UncertaintySummary};
use crate::vecmath::{angle_between, norm, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDetail {
    pub member_index: usize,
    pub magnitude: f64,
    /// Radians from the median member's direction; 0 for zero vectors.
    pub angle_to_median: f64,
    pub depth: f64,
    pub is_outlier_candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAnalysis {
    pub location: GridIndex,
    pub outliers: usize,
    pub details: Vec<PointDetail>,
    pub summary: UncertaintySummary,
    /// Summary of the retained members; `median_index` refers to the full
    /// member numbering.
    pub filtered_summary: UncertaintySummary,
    pub retained: Vec<usize>,
}

pub fn point_detail(
    field: &EnsembleField,
    idx: GridIndex,
    k_outliers: usize,
) -> Result<PointAnalysis> {
    let members = field.members(idx)?;
    analyze_members(idx, &members, k_outliers)
}

/// [`point_detail`] on an explicit member list.
pub fn analyze_members(
    location: GridIndex,
    members: &[Vec3],
    k_outliers: usize,
) -> Result<PointAnalysis> {
    let n = members.len();
    if n < MIN_MEMBERS + k_outliers {
        return Err(Error::Argument(format!(
            "removing {k_outliers} outliers from {n} members leaves fewer than {MIN_MEMBERS}"
        )));
    }
    let depth = depth_of_vectors(members)?;
    let summary = summarize_with_median(members, depth.median_index)?;
    let flagged = lowest_depth_indices(&depth, k_outliers);
    let retained: Vec<usize> = (0..n).filter(|m| !flagged.contains(m)).collect();

    let subset: Vec<Vec3> = retained.iter().map(|&m| members[m]).collect();
    let mut filtered_summary = summarize(&subset)?;
    filtered_summary.median_index = retained[filtered_summary.median_index];

    let median = members[depth.median_index];
    let details = members
        .iter()
        .enumerate()
        .map(|(m, &v)| PointDetail {
            member_index: m,
            magnitude: norm(v),
            angle_to_median: if norm(v) > 0.0 && norm(median) > 0.0 {
                angle_between(v, median)
            } else {
                0.0
            },
            depth: depth.values[m],
            is_outlier_candidate: flagged.contains(&m),
        })
        .collect();

    Ok(PointAnalysis {
        location,
        outliers: k_outliers,
        details,
        summary,
        filtered_summary,
        retained,
    })
}

impl PointAnalysis {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "member",
            "magnitude",
            "angle_to_median",
            "depth",
            "is_outlier_candidate",
        ])?;
        for d in &self.details {
            out.write_record([
                d.member_index.to_string(),
                d.magnitude.to_string(),
                d.angle_to_median.to_string(),
                d.depth.to_string(),
                d.is_outlier_candidate.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Member depths for every location of `region` at `t`, rows in `(k, j, i)`
/// order.
pub fn depth_heatmap(
    field: &EnsembleField,
    region: &RegionSelection,
    t: usize,
) -> Result<DepthMatrix> {
    let indices = field.region_indices(region, t)?;
    let rows = indices
        .into_par_iter()
        .map(|idx| Ok((idx, depth_of_vectors(&field.members(idx)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DepthMatrix::from_rows(field.n_members(), rows))
}
