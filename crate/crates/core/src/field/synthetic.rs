//! Analytic rotating test field with uniform per-member noise.
//!
//! Base field on `x, y ∈ [-1, 1]`: `u₀ = sin x`, `v₀ = sin y`, `w = 0.5`.
//! The horizontal state at step `k + 1` is the state at step `k` rotated by
//! the angle `t_k`, where `t_k` are `nt` uniform samples of `[0, 3π/4]`.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dtype, EnsembleField};
use crate::error::{Error, Result};
use crate::vecmath::Vec3;

pub const T_END: f64 = 0.75 * std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticParams {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub n_members: usize,
    pub noise_amp: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            nx: 10,
            ny: 10,
            nt: 5,
            n_members: 20,
            noise_amp: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticParams {
    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Argument(format!(
                "nx and ny must be at least 2 (got {}x{})",
                self.nx, self.ny
            )));
        }
        if self.nt < 1 || self.n_members < 1 {
            return Err(Error::Argument(
                "nt and n_members must be at least 1".into(),
            ));
        }
        if !(self.noise_amp >= 0.0 && self.noise_amp.is_finite()) {
            return Err(Error::Argument(format!(
                "noise amplitude {} must be a finite non-negative number",
                self.noise_amp
            )));
        }
        Ok(())
    }

    /// The `k`-th time sample.
    pub fn time(&self, k: usize) -> f64 {
        if self.nt == 1 {
            0.0
        } else {
            T_END * k as f64 / (self.nt - 1) as f64
        }
    }
}

/// Noise-free base vectors, indexed `(t, j, i)`.
fn base_field(p: &SyntheticParams) -> Vec<Vec3> {
    let mut out = vec![[0.0; 3]; p.nt * p.ny * p.nx];
    for j in 0..p.ny {
        let y = -1.0 + 2.0 * j as f64 / (p.ny - 1) as f64;
        for i in 0..p.nx {
            let x = -1.0 + 2.0 * i as f64 / (p.nx - 1) as f64;
            let (mut u, mut v) = (x.sin(), y.sin());
            for k in 0..p.nt {
                out[(k * p.ny + j) * p.nx + i] = [u, v, 0.5];
                let (s, c) = p.time(k).sin_cos();
                (u, v) = (u * c - v * s, u * s + v * c);
            }
        }
    }
    out
}

/// Generates the rotating synthetic ensemble. Deterministic for a given seed.
///
/// The returned field carries [`Dtype::F64`]; narrow it with
/// [`EnsembleField::with_dtype`] before writing compact `f32` datasets.
pub fn generate_synthetic(p: &SyntheticParams) -> Result<EnsembleField> {
    p.validate()?;
    let base = base_field(p);
    let per_slice = p.nx * p.ny;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let noise = Uniform::new_inclusive(-p.noise_amp, p.noise_amp);
    let mut data = Vec::with_capacity(p.nt * p.n_members * per_slice);
    for t in 0..p.nt {
        for _ in 0..p.n_members {
            for loc in 0..per_slice {
                let b = base[t * per_slice + loc];
                let v = if p.noise_amp > 0.0 {
                    [
                        b[0] + noise.sample(&mut rng),
                        b[1] + noise.sample(&mut rng),
                        b[2] + noise.sample(&mut rng),
                    ]
                } else {
                    b
                };
                data.push(v);
            }
        }
    }
    EnsembleField::new(
        format!("synthetic-{}x{}x{}-seed{}", p.nx, p.ny, p.nt, p.seed),
        [p.nx, p.ny, 1],
        p.nt,
        p.n_members,
        [2.0 / (p.nx - 1) as f64, 2.0 / (p.ny - 1) as f64, 1.0],
        [-1.0, -1.0, 0.0],
        Dtype::F64,
        data,
    )
}
