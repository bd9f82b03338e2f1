//! Vector depth: the fraction of 4-member subsets whose bounding box in
//! spherical coordinates `(r, θ, φ)` contains a query vector.
//!
//! Boxes are closed, azimuth is a linear coordinate on `(-π, π]` (no
//! wrap-around), and subsets that contain the query itself are counted.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridIndex;
use crate::vecmath::{is_finite, Vec3};

/// Smallest ensemble for which depth is computed.
pub const MIN_MEMBERS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalTriple {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalTriple {
    #[inline]
    pub fn coords(&self) -> [f64; 3] {
        [self.r, self.theta, self.phi]
    }
}

/// Converts a Cartesian vector into `(r, θ, φ)`.
///
/// The zero vector maps to `(0, 0, 0)`; vectors on the polar axis get `φ = 0`.
pub fn to_spherical(v: Vec3) -> Result<SphericalTriple> {
    if !is_finite(v) {
        return Err(Error::Argument(format!("non-finite vector {v:?}")));
    }
    let [x, y, z] = v;
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return Ok(SphericalTriple {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        });
    }
    let theta = (z / r).clamp(-1.0, 1.0).acos();
    let phi = if x == 0.0 && y == 0.0 {
        0.0
    } else {
        let p = y.atan2(x);
        if p == -PI {
            PI
        } else {
            p
        }
    };
    Ok(SphericalTriple { r, theta, phi })
}

pub fn to_spherical_all(members: &[Vec3]) -> Result<Vec<SphericalTriple>> {
    members.iter().map(|&v| to_spherical(v)).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[inline]
fn choose4(n: u64) -> u64 {
    if n < 4 {
        0
    } else {
        n * (n - 1) * (n - 2) * (n - 3) / 24
    }
}

/// Exact subset count and the resulting depth fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthCount {
    pub count: u64,
    pub depth: f64,
}

impl DepthCount {
    fn new(count: u64, n: usize) -> Self {
        DepthCount {
            count,
            depth: count as f64 / choose4(n as u64) as f64,
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < MIN_MEMBERS {
        return Err(Error::Argument(format!(
            "vector depth needs at least {MIN_MEMBERS} members, got {n}"
        )));
    }
    Ok(())
}

/// Depth by enumerating all `C(n, 4)` subsets.
pub fn vector_depth_bruteforce(set: &[SphericalTriple], x: &SphericalTriple) -> Result<DepthCount> {
    let n = set.len();
    check_size(n)?;
    let q = x.coords();
    let pts: Vec<[f64; 3]> = set.iter().map(SphericalTriple::coords).collect();
    let mut count = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let quad = [pts[a], pts[b], pts[c], pts[d]];
                    let inside = (0..3).all(|axis| {
                        let lo = quad.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
                        let hi = quad
                            .iter()
                            .map(|p| p[axis])
                            .fold(f64::NEG_INFINITY, f64::max);
                        lo <= q[axis] && q[axis] <= hi
                    });
                    if inside {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(DepthCount::new(count, n))
}

/// Per-member side of the query on each axis: 0 below, 1 equal, 2 above.
/// Encoded base 3 into one of 27 buckets.
fn side_histogram(set: &[SphericalTriple], q: [f64; 3]) -> [u64; 27] {
    let mut hist = [0u64; 27];
    for p in set {
        let c = p.coords();
        let mut code = 0;
        for axis in (0..3).rev() {
            let side = if c[axis] < q[axis] {
                0
            } else if c[axis] > q[axis] {
                2
            } else {
                1
            };
            code = code * 3 + side;
        }
        hist[code] += 1;
    }
    hist
}

fn containing_count(set: &[SphericalTriple], q: [f64; 3]) -> u64 {
    let hist = side_histogram(set, q);
    // A box misses q iff on some axis all four members lie strictly on one
    // side. Inclusion-exclusion over the events "all below / all above on
    // axis a"; picking both sides of one axis is impossible, so each axis
    // contributes one of {no event, below, above}.
    let mut total: i64 = 0;
    for choice in 0..27usize {
        let pick = [choice % 3, (choice / 3) % 3, choice / 9];
        let events = pick.iter().filter(|&&p| p != 1).count();
        // members consistent with every chosen event
        let size: u64 = (0..27usize)
            .filter(|code| {
                let side = [code % 3, (code / 3) % 3, code / 9];
                (0..3).all(|a| pick[a] == 1 || side[a] == pick[a])
            })
            .map(|code| hist[code])
            .sum();
        let term = choose4(size) as i64;
        if events % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    debug_assert!(total >= 0);
    total as u64
}

/// Depth by inclusion-exclusion over per-axis side classes; `O(n)`.
pub fn vector_depth_fast(set: &[SphericalTriple], x: &SphericalTriple) -> Result<DepthCount> {
    check_size(set.len())?;
    Ok(DepthCount::new(
        containing_count(set, x.coords()),
        set.len(),
    ))
}

/// Depth of every member within its own ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthResult {
    pub values: Vec<f64>,
    pub median_index: usize,
    pub counts: Vec<u64>,
}

pub fn depth_all_members(set: &[SphericalTriple]) -> Result<DepthResult> {
    let n = set.len();
    check_size(n)?;
    let counts: Vec<u64> = set
        .iter()
        .map(|x| containing_count(set, x.coords()))
        .collect();
    let total = choose4(n as u64) as f64;
    let values = counts.iter().map(|&c| c as f64 / total).collect();
    // lowest index wins ties
    let median_index = counts
        .iter()
        .enumerate()
        .fold(0, |best, (m, &c)| if c > counts[best] { m } else { best });
    Ok(DepthResult {
        values,
        median_index,
        counts,
    })
}

/// [`depth_all_members`] for Cartesian member vectors.
pub fn depth_of_vectors(members: &[Vec3]) -> Result<DepthResult> {
    depth_all_members(&to_spherical_all(members)?)
}

/// Indices of the `k` least deep members: ascending depth, and among equal
/// depths the higher index goes first.
pub fn lowest_depth_indices(depth: &DepthResult, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..depth.counts.len()).collect();
    order.sort_by(|&a, &b| depth.counts[a].cmp(&depth.counts[b]).then(b.cmp(&a)));
    order.truncate(k);
    order
}

/// Drops the `k` least deep members and returns the survivors' indices in
/// ascending order.
pub fn filter_outliers(set: &[SphericalTriple], k: usize) -> Result<Vec<usize>> {
    let n = set.len();
    check_size(n)?;
    if k > n - MIN_MEMBERS {
        return Err(Error::Argument(format!(
            "cannot remove {k} of {n} members; at least {MIN_MEMBERS} must remain"
        )));
    }
    let depth = depth_all_members(set)?;
    let removed = lowest_depth_indices(&depth, k);
    Ok((0..n).filter(|m| !removed.contains(m)).collect())
}

/// Locations × members grid of depth values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthMatrix {
    pub locations: Vec<GridIndex>,
    pub n_members: usize,
    pub values: Vec<Vec<f64>>,
    pub counts: Vec<Vec<u64>>,
    pub median_indices: Vec<usize>,
}

impl DepthMatrix {
    pub fn from_rows(n_members: usize, rows: Vec<(GridIndex, DepthResult)>) -> Self {
        let mut m = DepthMatrix {
            locations: Vec::with_capacity(rows.len()),
            n_members,
            values: Vec::with_capacity(rows.len()),
            counts: Vec::with_capacity(rows.len()),
            median_indices: Vec::with_capacity(rows.len()),
        };
        for (loc, r) in rows {
            m.locations.push(loc);
            m.values.push(r.values);
            m.counts.push(r.counts);
            m.median_indices.push(r.median_index);
        }
        m
    }

    /// Long-format CSV: `location,member,depth,count`, location as `i:j:k`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["location", "member", "depth", "count"])?;
        for (row, loc) in self.locations.iter().enumerate() {
            for m in 0..self.n_members {
                out.write_record([
                    loc.to_string(),
                    m.to_string(),
                    self.values[row][m].to_string(),
                    self.counts[row][m].to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Wide heatmap CSV: one row per location, one column per member.
    pub fn write_heatmap_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["location".to_string()];
        header.extend((0..self.n_members).map(|m| m.to_string()));
        out.write_record(&header)?;
        for (row, loc) in self.locations.iter().enumerate() {
            let mut rec = vec![loc.to_string()];
            rec.extend(self.values[row].iter().map(f64::to_string));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}
