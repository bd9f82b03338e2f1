//! Single-member bricks and their conversion into pseudo-ensembles.
//!
//! A brick is one deterministic field per time step. Sampling it on a
//! coarser grid and gathering the neighbourhood patch around each sample
//! turns the patch into the ensemble at that sample.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{validate_shape, Dtype, EnsembleField};
use crate::error::{Error, Result};
use crate::vecmath::Vec3;

pub const BRICK_MANIFEST_FILE: &str = "brick.json";

fn default_template() -> String {
    "{component}_t{t}.bin".to_string()
}

fn default_components() -> [String; 3] {
    ["u".to_string(), "v".to_string(), "w".to_string()]
}

/// On-disk description of a brick: one `f32` little-endian file per
/// component per time step, each laid out `z, y, x`.
///
/// `file_template` may use `{component}` and `{t}` placeholders and is
/// resolved relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrickManifest {
    pub name: String,
    pub dims: [usize; 3],
    pub nt: usize,
    #[serde(default = "unit_spacing")]
    pub spacing: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
    #[serde(default = "default_template")]
    pub file_template: String,
    #[serde(default = "default_components")]
    pub components: [String; 3],
}

fn unit_spacing() -> [f64; 3] {
    [1.0; 3]
}

impl BrickManifest {
    pub fn file_name(&self, component: usize, t: usize) -> String {
        self.file_template
            .replace("{component}", &self.components[component])
            .replace("{t}", &t.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Brick {
    pub name: String,
    pub dims: [usize; 3],
    pub nt: usize,
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    /// Indexed `(t, k, j, i)`.
    pub data: Vec<Vec3>,
}

impl Brick {
    pub fn new(
        name: impl Into<String>,
        dims: [usize; 3],
        nt: usize,
        spacing: [f64; 3],
        origin: [f64; 3],
        data: Vec<Vec3>,
    ) -> Result<Self> {
        validate_shape(dims, nt, 1, spacing, origin)?;
        if data.len() != nt * dims.iter().product::<usize>() {
            return Err(Error::Validation(format!(
                "brick holds {} vectors, shape requires {}",
                data.len(),
                nt * dims.iter().product::<usize>()
            )));
        }
        Ok(Brick {
            name: name.into(),
            dims,
            nt,
            spacing,
            origin,
            data,
        })
    }

    #[inline]
    pub fn get(&self, t: usize, i: usize, j: usize, k: usize) -> Vec3 {
        let [nx, ny, nz] = self.dims;
        self.data[((t * nz + k) * ny + j) * nx + i]
    }
}

pub fn load_brick(manifest_path: impl AsRef<Path>) -> Result<Brick> {
    let manifest_path = manifest_path.as_ref();
    let bytes = fs::read(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let m: BrickManifest =
        serde_json::from_slice(&bytes).map_err(|e| Error::format(manifest_path, e.to_string()))?;
    validate_shape(m.dims, m.nt, 1, m.spacing, m.origin)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let per_step = m.dims.iter().product::<usize>();
    let mut data = vec![[0.0; 3]; m.nt * per_step];
    for t in 0..m.nt {
        #[allow(clippy::needless_range_loop)]
        for c in 0..3 {
            let path: PathBuf = base.join(m.file_name(c, t));
            let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let expected = (per_step * 4) as u64;
            if raw.len() as u64 != expected {
                return Err(Error::SizeMismatch {
                    path,
                    expected,
                    actual: raw.len() as u64,
                });
            }
            for (n, chunk) in raw.chunks_exact(4).enumerate() {
                data[t * per_step + n][c] = f32::from_le_bytes(chunk.try_into().unwrap()) as f64;
            }
        }
    }
    Brick::new(m.name, m.dims, m.nt, m.spacing, m.origin, data)
}

/// Writes `brick` into `dir` with the default file template and returns the
/// manifest path. Values are stored as `f32`.
pub fn write_brick(brick: &Brick, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = BrickManifest {
        name: brick.name.clone(),
        dims: brick.dims,
        nt: brick.nt,
        spacing: brick.spacing,
        origin: brick.origin,
        file_template: default_template(),
        components: default_components(),
    };
    let per_step = brick.dims.iter().product::<usize>();
    for t in 0..brick.nt {
        for c in 0..3 {
            let path = dir.join(manifest.file_name(c, t));
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            for v in &brick.data[t * per_step..(t + 1) * per_step] {
                w.write_all(&(v[c] as f32).to_le_bytes())
                    .map_err(|e| Error::io(&path, e))?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
    }
    let path = dir.join(BRICK_MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Where to sample a brick and which neighbourhood to gather.
#[derive(Clone, Debug, PartialEq)]
pub struct ResamplePlan {
    in_dims: [usize; 3],
    patch: [usize; 3],
    /// Sample positions along each axis, in input cell indices.
    centers: [Vec<usize>; 3],
    /// Mean input cells per output cell along each axis.
    step: [f64; 3],
}

fn check_patch(patch: [usize; 3]) -> Result<()> {
    if patch.iter().any(|&p| p == 0 || p % 2 == 0) {
        return Err(Error::Argument(format!(
            "patch dimensions {patch:?} must be odd and positive"
        )));
    }
    Ok(())
}

impl ResamplePlan {
    /// Samples every `stride`-th cell, giving `ceil(n / stride)` cells per axis.
    pub fn from_stride(in_dims: [usize; 3], stride: [usize; 3], patch: [usize; 3]) -> Result<Self> {
        check_patch(patch)?;
        if stride.contains(&0) {
            return Err(Error::Argument(format!(
                "stride {stride:?} must be positive"
            )));
        }
        let centers = std::array::from_fn(|a| {
            (0..in_dims[a].div_ceil(stride[a]))
                .map(|n| n * stride[a])
                .collect()
        });
        Ok(ResamplePlan {
            in_dims,
            patch,
            centers,
            step: stride.map(|s| s as f64),
        })
    }

    /// Samples the centre of each of `out_dims` equal bins per axis. Covers
    /// down-sampling ratios that are not integers (e.g. 500 → 40).
    pub fn from_target_dims(
        in_dims: [usize; 3],
        out_dims: [usize; 3],
        patch: [usize; 3],
    ) -> Result<Self> {
        check_patch(patch)?;
        if (0..3).any(|a| out_dims[a] == 0 || out_dims[a] > in_dims[a]) {
            return Err(Error::Argument(format!(
                "target dims {out_dims:?} must be positive and no larger than {in_dims:?}"
            )));
        }
        let centers = std::array::from_fn(|a| {
            (0..out_dims[a])
                .map(|n| ((2 * n + 1) * in_dims[a]) / (2 * out_dims[a]))
                .collect()
        });
        Ok(ResamplePlan {
            in_dims,
            patch,
            centers,
            step: std::array::from_fn(|a| in_dims[a] as f64 / out_dims[a] as f64),
        })
    }

    pub fn out_dims(&self) -> [usize; 3] {
        [
            self.centers[0].len(),
            self.centers[1].len(),
            self.centers[2].len(),
        ]
    }

    pub fn n_members(&self) -> usize {
        self.patch.iter().product()
    }

    pub fn centers(&self, axis: usize) -> &[usize] {
        &self.centers[axis]
    }

    /// Input cell for member `m` at output cell `(i, j, k)`, clamped to the grid.
    pub fn source_cell(&self, i: usize, j: usize, k: usize, m: usize) -> [usize; 3] {
        let [px, py, _] = self.patch;
        let offs = [m % px, (m / px) % py, m / (px * py)];
        let out = [i, j, k];
        std::array::from_fn(|a| {
            let half = (self.patch[a] / 2) as isize;
            let c = self.centers[a][out[a]] as isize + offs[a] as isize - half;
            c.clamp(0, self.in_dims[a] as isize - 1) as usize
        })
    }
}

/// Gathers the patch around each plan sample, per time step, as an ensemble.
///
/// Member order scans the patch z-outer, y, x-inner. Border patches clamp
/// to the nearest valid cell so every location keeps the full member count.
pub fn brick_to_ensemble(brick: &Brick, plan: &ResamplePlan) -> Result<EnsembleField> {
    if plan.in_dims != brick.dims {
        return Err(Error::Argument(format!(
            "plan built for {:?}, brick is {:?}",
            plan.in_dims, brick.dims
        )));
    }
    let out = plan.out_dims();
    let n_members = plan.n_members();
    let mut data = Vec::with_capacity(brick.nt * n_members * out.iter().product::<usize>());
    for t in 0..brick.nt {
        for m in 0..n_members {
            for k in 0..out[2] {
                for j in 0..out[1] {
                    for i in 0..out[0] {
                        let [si, sj, sk] = plan.source_cell(i, j, k, m);
                        data.push(brick.get(t, si, sj, sk));
                    }
                }
            }
        }
    }
    let spacing = std::array::from_fn(|a| brick.spacing[a] * plan.step[a]);
    let origin =
        std::array::from_fn(|a| brick.origin[a] + plan.centers[a][0] as f64 * brick.spacing[a]);
    EnsembleField::new(
        brick.name.clone(),
        out,
        brick.nt,
        n_members,
        spacing,
        origin,
        Dtype::F32,
        data,
    )
}
