use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::superellipse::signed_pow;
use crate::vecmath::{add, norm, normalize, scale, Vec3};

pub const PART_BODY: u8 = 0;
pub const PART_HEAD: u8 = 1;
pub const PART_DISC: u8 = 2;

/// Placement of a glyph. `frame` holds the local x, y and axis directions;
/// positions are already rotated into it, so world = position + origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Placement {
    pub origin: Vec3,
    pub frame: [Vec3; 3],
}

impl Placement {
    /// Row-major 3×3 matrix whose columns are the frame vectors.
    pub fn rotation(&self) -> [f64; 9] {
        let [a, b, c] = self.frame;
        [a[0], b[0], c[0], a[1], b[1], c[1], a[2], b[2], c[2]]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlyphMesh {
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub indices: Vec<[u32; 3]>,
    pub part_ids: Vec<u8>,
    pub transform: Placement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeshDefect {
    IndexOutOfRange { triangle: usize },
    NonUnitNormal { vertex: usize },
    NonFinite { vertex: usize },
    PartCount,
    OpenEdge { part: u8, count: usize },
}

impl GlyphMesh {
    pub fn triangle_count(&self) -> usize {
        self.indices.len()
    }

    /// Checks index bounds, unit normals, finiteness and that every edge
    /// of each part is shared by exactly two of that part's triangles.
    /// Vertices are welded by position for the edge test.
    pub fn validate(&self) -> Result<(), MeshDefect> {
        if self.part_ids.len() != self.indices.len() {
            return Err(MeshDefect::PartCount);
        }
        let nv = self.positions.len();
        for (vertex, (p, n)) in self.positions.iter().zip(&self.normals).enumerate() {
            if !p.iter().chain(n).all(|c| c.is_finite()) {
                return Err(MeshDefect::NonFinite { vertex });
            }
            if (norm(*n) - 1.0).abs() > 1e-6 {
                return Err(MeshDefect::NonUnitNormal { vertex });
            }
        }
        if self.normals.len() != nv {
            return Err(MeshDefect::NonUnitNormal {
                vertex: self.normals.len().min(nv),
            });
        }
        if let Some(triangle) = self
            .indices
            .iter()
            .position(|t| t.iter().any(|&v| v as usize >= nv))
        {
            return Err(MeshDefect::IndexOutOfRange { triangle });
        }

        let key = |v: u32| self.positions[v as usize].map(|c| (c + 0.0).to_bits());
        let mut welded: HashMap<[u64; 3], usize> = HashMap::new();
        let ids: Vec<usize> = (0..nv as u32)
            .map(|v| {
                let n = welded.len();
                *welded.entry(key(v)).or_insert(n)
            })
            .collect();
        let mut edges: HashMap<(u8, usize, usize), usize> = HashMap::new();
        for (tri, &part) in self.indices.iter().zip(&self.part_ids) {
            for e in 0..3 {
                let (a, b) = (ids[tri[e] as usize], ids[tri[(e + 1) % 3] as usize]);
                if a == b {
                    continue;
                }
                *edges.entry((part, a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if let Some((&(part, _, _), &count)) = edges
            .iter()
            .filter(|(_, &c)| c != 2)
            .min_by_key(|(k, _)| **k)
        {
            return Err(MeshDefect::OpenEdge { part, count });
        }
        Ok(())
    }
}

impl Serialize for GlyphMesh {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Transform {
            origin: Vec3,
            rotation: [f64; 9],
        }
        let flat = |v: &[Vec3]| v.iter().flatten().copied().collect::<Vec<f64>>();
        let mut st = s.serialize_struct("GlyphMesh", 5)?;
        st.serialize_field("positions", &flat(&self.positions))?;
        st.serialize_field("normals", &flat(&self.normals))?;
        st.serialize_field(
            "indices",
            &self.indices.iter().flatten().copied().collect::<Vec<u32>>(),
        )?;
        st.serialize_field("part_ids", &self.part_ids)?;
        st.serialize_field(
            "transform",
            &Transform {
                origin: self.transform.origin,
                rotation: self.transform.rotation(),
            },
        )?;
        st.end()
    }
}

/// Orthonormal glyph frame; `axis = x_dir × y_dir`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Frame {
    pub x_dir: Vec3,
    pub y_dir: Vec3,
    pub axis: Vec3,
}

impl Frame {
    fn place(&self, x: f64, y: f64, z: f64) -> Vec3 {
        add(
            add(scale(self.x_dir, x), scale(self.y_dir, y)),
            scale(self.axis, z),
        )
    }
}

/// A superelliptic cross-section with semi-axes `(a, b)` at unit scale.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Section {
    pub a: f64,
    pub b: f64,
    pub exponent: f64,
}

/// One slab of a generalized cone: between `z0` and `z1` along the axis
/// the section scale varies linearly from `s0` to `s1`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Slab {
    pub z0: f64,
    pub z1: f64,
    pub s0: f64,
    pub s1: f64,
}

pub(crate) struct MeshBuilder {
    frame: Frame,
    segments: usize,
    mesh: GlyphMesh,
}

impl MeshBuilder {
    pub fn new(frame: Frame, segments: usize) -> Self {
        MeshBuilder {
            frame,
            segments,
            mesh: GlyphMesh {
                positions: Vec::new(),
                normals: Vec::new(),
                indices: Vec::new(),
                part_ids: Vec::new(),
                transform: Placement {
                    origin: [0.0; 3],
                    frame: [frame.x_dir, frame.y_dir, frame.axis],
                },
            },
        }
    }

    fn vertex(&mut self, p: Vec3, n: Vec3) -> u32 {
        self.mesh.positions.push(p);
        self.mesh.normals.push(n);
        (self.mesh.positions.len() - 1) as u32
    }

    fn tri(&mut self, a: u32, b: u32, c: u32, part: u8) {
        self.mesh.indices.push([a, b, c]);
        self.mesh.part_ids.push(part);
    }

    fn ring(&self, sec: Section, z: f64, s: f64) -> Vec<Vec3> {
        let e = 2.0 / sec.exponent;
        (0..self.segments)
            .map(|j| {
                if s == 0.0 {
                    return self.frame.place(0.0, 0.0, z);
                }
                let (st, ct) = (TAU * j as f64 / self.segments as f64).sin_cos();
                self.frame.place(
                    s * sec.a * signed_pow(ct, e),
                    s * sec.b * signed_pow(st, e),
                    z,
                )
            })
            .collect()
    }

    /// Adds a closed slab; caps are emitted for non-degenerate ends.
    pub fn slab(&mut self, sec: Section, slab: Slab, part: u8) {
        let seg = self.segments;
        let ring0 = self.ring(sec, slab.z0, slab.s0);
        let ring1 = self.ring(sec, slab.z1, slab.s1);
        let slope = (slab.s1 - slab.s0) / (slab.z1 - slab.z0);
        // gradient of (|x/a|ⁿ + |y/b|ⁿ)^(1/n) - s(z); independent of z
        let g = 2.0 - 2.0 / sec.exponent;
        let side_normals: Vec<Vec3> = (0..seg)
            .map(|j| {
                let (st, ct) = (TAU * j as f64 / seg as f64).sin_cos();
                let local =
                    self.frame
                        .place(signed_pow(ct, g) / sec.a, signed_pow(st, g) / sec.b, -slope);
                normalize(local).expect("side normal is nonzero")
            })
            .collect();

        let base = self.mesh.positions.len() as u32;
        for j in 0..seg {
            self.vertex(ring0[j], side_normals[j]);
        }
        for j in 0..seg {
            self.vertex(ring1[j], side_normals[j]);
        }
        for j in 0..seg {
            let j1 = (j + 1) % seg;
            let (a0, b0) = (base + j as u32, base + j1 as u32);
            let (a1, b1) = (base + (seg + j) as u32, base + (seg + j1) as u32);
            if slab.s0 > 0.0 {
                self.tri(a0, b0, b1, part);
            }
            if slab.s1 > 0.0 {
                self.tri(a0, b1, a1, part);
            }
        }

        if slab.s0 > 0.0 {
            self.cap(&ring0, slab.z0, false, part);
        }
        if slab.s1 > 0.0 {
            self.cap(&ring1, slab.z1, true, part);
        }
    }

    fn cap(&mut self, ring: &[Vec3], z: f64, top: bool, part: u8) {
        let n = if top {
            self.frame.axis
        } else {
            scale(self.frame.axis, -1.0)
        };
        let center = self.vertex(self.frame.place(0.0, 0.0, z), n);
        let first = self.mesh.positions.len() as u32;
        for &p in ring {
            self.vertex(p, n);
        }
        let seg = ring.len() as u32;
        for j in 0..seg {
            let (a, b) = (first + j, first + (j + 1) % seg);
            if top {
                self.tri(center, a, b, part);
            } else {
                self.tri(center, b, a, part);
            }
        }
    }

    pub fn finish(self) -> GlyphMesh {
        self.mesh
    }
}
