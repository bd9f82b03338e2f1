//! Dataset directories: `manifest.json` plus a headerless `data.bin`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{validate_shape, Dtype, EnsembleField};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const DATA_FILE: &str = "data.bin";
pub const LAYOUT: &str = "t,member,z,y,x,component";
pub const BYTE_ORDER: &str = "little";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub dims: [usize; 3],
    pub nt: usize,
    pub n_members: usize,
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
}

impl Manifest {
    pub fn for_field(field: &EnsembleField) -> Self {
        Manifest {
            name: field.name().to_string(),
            dims: field.dims(),
            nt: field.nt(),
            n_members: field.n_members(),
            spacing: field.spacing(),
            origin: field.origin(),
            dtype: field.dtype().as_str().to_string(),
            byte_order: BYTE_ORDER.to_string(),
            layout: LAYOUT.to_string(),
        }
    }

    pub fn vector_count(&self) -> usize {
        self.nt * self.n_members * self.dims.iter().product::<usize>()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| Error::format(path, e.to_string()))
    }

    fn validate(&self, path: &Path) -> Result<Dtype> {
        validate_shape(
            self.dims,
            self.nt,
            self.n_members,
            self.spacing,
            self.origin,
        )?;
        let dtype = self
            .dtype
            .parse::<Dtype>()
            .map_err(|_| Error::format(path, format!("unknown dtype {:?}", self.dtype)))?;
        if self.byte_order != BYTE_ORDER {
            return Err(Error::format(
                path,
                format!("unsupported byte order {:?}", self.byte_order),
            ));
        }
        if self.layout != LAYOUT {
            return Err(Error::format(
                path,
                format!("unsupported layout {:?}, expected {LAYOUT:?}", self.layout),
            ));
        }
        Ok(dtype)
    }
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<EnsembleField> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = Manifest::read(&manifest_path)?;
    let dtype = manifest.validate(&manifest_path)?;

    let data_path = dir.join(DATA_FILE);
    let expected = (manifest.vector_count() * 3 * dtype.size()) as u64;
    let actual = fs::metadata(&data_path)
        .map_err(|e| Error::io(&data_path, e))?
        .len();
    if actual != expected {
        return Err(Error::SizeMismatch {
            path: data_path,
            expected,
            actual,
        });
    }
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            path: data_path,
            expected,
            actual: bytes.len() as u64,
        });
    }

    let data = match dtype {
        Dtype::F32 => bytes
            .chunks_exact(12)
            .map(|c| {
                let f = |o: usize| f32::from_le_bytes(c[o..o + 4].try_into().unwrap()) as f64;
                [f(0), f(4), f(8)]
            })
            .collect(),
        Dtype::F64 => bytes
            .chunks_exact(24)
            .map(|c| {
                let f = |o: usize| f64::from_le_bytes(c[o..o + 8].try_into().unwrap());
                [f(0), f(8), f(16)]
            })
            .collect(),
    };
    EnsembleField::new(
        manifest.name,
        manifest.dims,
        manifest.nt,
        manifest.n_members,
        manifest.spacing,
        manifest.origin,
        dtype,
        data,
    )
}

pub fn write_dataset(field: &EnsembleField, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let manifest_path = dir.join(MANIFEST_FILE);
    let mut json =
        serde_json::to_string_pretty(&Manifest::for_field(field)).expect("manifest serializes");
    json.push('\n');
    fs::write(&manifest_path, json).map_err(|e| Error::io(&manifest_path, e))?;

    let data_path = dir.join(DATA_FILE);
    let file = fs::File::create(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(&data_path, e);
    for v in field.data() {
        for c in v {
            match field.dtype() {
                Dtype::F32 => w.write_all(&(*c as f32).to_le_bytes()).map_err(io_err)?,
                Dtype::F64 => w.write_all(&c.to_le_bytes()).map_err(io_err)?,
            }
        }
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
