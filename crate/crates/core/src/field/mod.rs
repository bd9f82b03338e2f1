//! Time-varying ensemble vector fields on a regular grid.
//!
//! Vectors are held as `f64` in memory. The [`Dtype`] tag records the
//! on-disk precision; a field tagged [`Dtype::F32`] only ever contains
//! values that are exactly representable in `f32`, so persistence is
//! lossless for both tags.

mod brick;
mod io;
mod synthetic;

pub use brick::{brick_to_ensemble, load_brick, write_brick, Brick, BrickManifest, ResamplePlan};
pub use io::{load_dataset, write_dataset, Manifest, DATA_FILE, MANIFEST_FILE};
pub use synthetic::{generate_synthetic, SyntheticParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecmath::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dtype::F32 => "f32",
            Dtype::F64 => "f64",
        }
    }

    fn quantize(self, v: Vec3) -> Vec3 {
        match self {
            Dtype::F32 => [v[0] as f32 as f64, v[1] as f32 as f64, v[2] as f32 as f64],
            Dtype::F64 => v,
        }
    }
}

impl FromStr for Dtype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" => Ok(Dtype::F32),
            "f64" => Ok(Dtype::F64),
            other => Err(Error::Argument(format!("unknown dtype {other:?}"))),
        }
    }
}

/// A spatio-temporal grid location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndex {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub t: usize,
}

impl GridIndex {
    pub fn new(i: usize, j: usize, k: usize, t: usize) -> Self {
        GridIndex { i, j, k, t }
    }
}

impl fmt::Display for GridIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.i, self.j, self.k)
    }
}

/// Inclusive axis-aligned box of grid cells, `[i, j, k]` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSelection {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl RegionSelection {
    pub fn new(lo: [usize; 3], hi: [usize; 3]) -> Result<Self> {
        if (0..3).any(|a| lo[a] > hi[a]) {
            return Err(Error::Argument(format!(
                "region lower corner {lo:?} exceeds upper corner {hi:?}"
            )));
        }
        Ok(RegionSelection { lo, hi })
    }

    pub fn full(dims: [usize; 3]) -> Self {
        RegionSelection {
            lo: [0; 3],
            hi: [dims[0] - 1, dims[1] - 1, dims[2] - 1],
        }
    }

    pub fn single(i: usize, j: usize, k: usize) -> Self {
        RegionSelection {
            lo: [i, j, k],
            hi: [i, j, k],
        }
    }

    pub fn extent(&self) -> [usize; 3] {
        [
            self.hi[0] - self.lo[0] + 1,
            self.hi[1] - self.lo[1] + 1,
            self.hi[2] - self.lo[2] + 1,
        ]
    }

    pub fn len(&self) -> usize {
        self.extent().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        let p = [i, j, k];
        (0..3).all(|a| self.lo[a] <= p[a] && p[a] <= self.hi[a])
    }

    pub fn check_within(&self, dims: [usize; 3]) -> Result<()> {
        if (0..3).any(|a| self.hi[a] >= dims[a]) {
            return Err(Error::Range(format!(
                "region {self} exceeds grid dims {}x{}x{}",
                dims[0], dims[1], dims[2]
            )));
        }
        Ok(())
    }

    /// Cell coordinates `(i, j, k)` in k-outer, i-inner order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let (lo, hi) = (self.lo, self.hi);
        (lo[2]..=hi[2]).flat_map(move |k| {
            (lo[1]..=hi[1]).flat_map(move |j| (lo[0]..=hi[0]).map(move |i| (i, j, k)))
        })
    }
}

impl fmt::Display for RegionSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{},{}:{},{}:{}",
            self.lo[0], self.hi[0], self.lo[1], self.hi[1], self.lo[2], self.hi[2]
        )
    }
}

/// Parses `i0:i1,j0:j1,k0:k1` (inclusive). A bare `n` stands for `n:n`.
impl FromStr for RegionSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Argument(format!(
                "region {s:?} must have the form i0:i1,j0:j1,k0:k1"
            )));
        }
        let mut lo = [0; 3];
        let mut hi = [0; 3];
        for (axis, part) in parts.iter().enumerate() {
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Argument(format!("bad region bound {x:?} in {s:?}")))
            };
            match part.split_once(':') {
                Some((a, b)) => {
                    lo[axis] = parse(a)?;
                    hi[axis] = parse(b)?;
                }
                None => {
                    lo[axis] = parse(part)?;
                    hi[axis] = lo[axis];
                }
            }
        }
        RegionSelection::new(lo, hi)
    }
}

/// Members of one location, as yielded by [`EnsembleField::slice_region`].
#[derive(Clone, Debug, PartialEq)]
pub struct LocationMembers {
    pub index: GridIndex,
    pub members: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleField {
    name: String,
    dims: [usize; 3],
    nt: usize,
    n_members: usize,
    spacing: [f64; 3],
    origin: [f64; 3],
    dtype: Dtype,
    data: Vec<Vec3>,
}

impl EnsembleField {
    /// Builds a field from a dense `(t, member, k, j, i)` array.
    ///
    /// Values are rounded to `dtype` precision.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dims: [usize; 3],
        nt: usize,
        n_members: usize,
        spacing: [f64; 3],
        origin: [f64; 3],
        dtype: Dtype,
        data: Vec<Vec3>,
    ) -> Result<Self> {
        validate_shape(dims, nt, n_members, spacing, origin)?;
        let expected = nt * n_members * dims.iter().product::<usize>();
        if data.len() != expected {
            return Err(Error::Validation(format!(
                "data holds {} vectors, shape requires {expected}",
                data.len()
            )));
        }
        let data = match dtype {
            Dtype::F32 => data.into_iter().map(|v| dtype.quantize(v)).collect(),
            Dtype::F64 => data,
        };
        Ok(EnsembleField {
            name: name.into(),
            dims,
            nt,
            n_members,
            spacing,
            origin,
            dtype,
            data,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn n_members(&self) -> usize {
        self.n_members
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn dtype(&self) -> Dtype {
        self.dtype
    }

    pub fn data(&self) -> &[Vec3] {
        &self.data
    }

    pub fn location_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Re-tags the field, rounding values when narrowing to `f32`.
    pub fn with_dtype(mut self, dtype: Dtype) -> Self {
        if dtype == Dtype::F32 && self.dtype != Dtype::F32 {
            for v in &mut self.data {
                *v = dtype.quantize(*v);
            }
        }
        self.dtype = dtype;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    fn offset(&self, t: usize, m: usize, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, nz] = self.dims;
        (((t * self.n_members + m) * nz + k) * ny + j) * nx + i
    }

    pub fn check_index(&self, idx: GridIndex) -> Result<()> {
        let [nx, ny, nz] = self.dims;
        if idx.i >= nx || idx.j >= ny || idx.k >= nz || idx.t >= self.nt {
            return Err(Error::Range(format!(
                "index (i={}, j={}, k={}, t={}) outside grid {nx}x{ny}x{nz} with {} time steps",
                idx.i, idx.j, idx.k, idx.t, self.nt
            )));
        }
        Ok(())
    }

    pub fn check_time(&self, t: usize) -> Result<()> {
        if t >= self.nt {
            return Err(Error::Range(format!(
                "time index {t} outside 0..{}",
                self.nt
            )));
        }
        Ok(())
    }

    pub fn get(&self, idx: GridIndex, member: usize) -> Vec3 {
        self.data[self.offset(idx.t, member, idx.i, idx.j, idx.k)]
    }

    /// All ensemble vectors at one location, in member order.
    pub fn members(&self, idx: GridIndex) -> Result<Vec<Vec3>> {
        self.check_index(idx)?;
        Ok(self.members_unchecked(idx))
    }

    fn members_unchecked(&self, idx: GridIndex) -> Vec<Vec3> {
        let stride = self.location_count();
        let base = self.offset(idx.t, 0, idx.i, idx.j, idx.k);
        (0..self.n_members)
            .map(|m| self.data[base + m * stride])
            .collect()
    }

    /// World-space position of cell `(i, j, k)`.
    pub fn position(&self, i: usize, j: usize, k: usize) -> Vec3 {
        [
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
            self.origin[2] + k as f64 * self.spacing[2],
        ]
    }

    /// Member vectors for every location in `region` at time `t`, in
    /// `(k, j, i)` ascending order.
    pub fn slice_region(
        &self,
        region: &RegionSelection,
        t: usize,
    ) -> Result<impl Iterator<Item = LocationMembers> + '_> {
        region.check_within(self.dims)?;
        self.check_time(t)?;
        let region = *region;
        Ok((region.lo[2]..=region.hi[2]).flat_map(move |k| {
            (region.lo[1]..=region.hi[1]).flat_map(move |j| {
                (region.lo[0]..=region.hi[0]).map(move |i| {
                    let index = GridIndex::new(i, j, k, t);
                    LocationMembers {
                        index,
                        members: self.members_unchecked(index),
                    }
                })
            })
        }))
    }

    /// Grid indices of every location in `region` at time `t`, `(k, j, i)` order.
    pub fn region_indices(&self, region: &RegionSelection, t: usize) -> Result<Vec<GridIndex>> {
        region.check_within(self.dims)?;
        self.check_time(t)?;
        Ok(region
            .cells()
            .map(|(i, j, k)| GridIndex::new(i, j, k, t))
            .collect())
    }
}

pub(crate) fn validate_shape(
    dims: [usize; 3],
    nt: usize,
    n_members: usize,
    spacing: [f64; 3],
    origin: [f64; 3],
) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::Validation(format!(
            "grid dims {dims:?} must all be positive"
        )));
    }
    if nt == 0 {
        return Err(Error::Validation("nt must be positive".into()));
    }
    if n_members == 0 {
        return Err(Error::Validation("n_members must be positive".into()));
    }
    if spacing.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Validation(format!(
            "spacing {spacing:?} must be positive and finite"
        )));
    }
    if origin.iter().any(|o| !o.is_finite()) {
        return Err(Error::Validation(format!(
            "origin {origin:?} must be finite"
        )));
    }
    Ok(())
}
