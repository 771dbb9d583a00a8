//! Triangulated surfaces of revolution as Wavefront OBJ.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub n_profile: usize,
    pub n_revolve: usize,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self { n_profile: 128, n_revolve: 48 }
    }
}

impl MeshSpec {
    pub fn new(n_profile: usize, n_revolve: usize) -> Result<Self> {
        if n_profile < 16 || n_revolve < 8 {
            return Err(Error::InvalidSpec(format!(
                "mesh needs n_profile >= 16 and n_revolve >= 8, got {n_profile} and {n_revolve}"
            )));
        }
        Ok(Self { n_profile, n_revolve })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Signed volume enclosed by the triangles (positive when they face out).
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0]))
                    / 6.0
            })
            .sum()
    }

    /// Whether every edge shared by two triangles is traversed in opposite
    /// directions by them.
    pub fn has_coherent_winding(&self) -> bool {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                *seen.entry(e).or_default() += 1;
            }
        }
        seen.values().all(|&n| n == 1)
    }

    pub fn write_obj<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# surface of revolution")?;
        for v in &self.vertices {
            writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2])?;
        }
        for n in &self.normals {
            writeln!(out, "vn {:?} {:?} {:?}", n[0], n[1], n[2])?;
        }
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| i + 1);
            writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}")?;
        }
        Ok(())
    }
}

/// Revolves the profile over `s in [s_lo, s_hi]` about the `z` axis:
/// `X(s, phi) = (x cos phi, x sin phi, z)`. Produces `n_profile * n_revolve`
/// vertices; faces are flipped if needed so the enclosed volume is positive.
pub fn revolve(traj: &Trajectory, span: (f64, f64), spec: &MeshSpec) -> Result<Mesh> {
    let spec = MeshSpec::new(spec.n_profile, spec.n_revolve)?;
    let (lo, hi) = (span.0.max(traj.s_min()), span.1.min(traj.s_max()));
    let usable = traj.samples.iter().filter(|s| s.s >= lo && s.s <= hi).count();
    if !(hi > lo) || usable < 16 {
        return Err(Error::DegenerateProfile(usable));
    }
    let (np, nr) = (spec.n_profile, spec.n_revolve);
    let mut vertices = Vec::with_capacity(np * nr);
    let mut normals = Vec::with_capacity(np * nr);
    for i in 0..np {
        let s = if i + 1 == np { hi } else { lo + (hi - lo) * i as f64 / (np - 1) as f64 };
        let st = traj.state_at(s).ok_or(Error::OutOfRange(s))?;
        let (sin, cos) = st.theta.sin_cos();
        for j in 0..nr {
            let (sp, cp) = (TAU * j as f64 / nr as f64).sin_cos();
            vertices.push([st.x * cp, st.x * sp, st.z]);
            // Profile normal (sin theta, -cos theta) rotated with the section.
            normals.push([sin * cp, sin * sp, -cos]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * (np - 1) * nr);
    for i in 0..np - 1 {
        for j in 0..nr {
            let a = i * nr + j;
            let b = i * nr + (j + 1) % nr;
            let c = (i + 1) * nr + j;
            let d = (i + 1) * nr + (j + 1) % nr;
            triangles.push([a, c, b]);
            triangles.push([b, c, d]);
        }
    }
    let mut mesh = Mesh { vertices, normals, triangles };
    if mesh.signed_volume() < 0.0 {
        for t in &mut mesh.triangles {
            t.swap(1, 2);
        }
    }
    // Normals point to the side the faces face.
    let face_normal = |m: &Mesh, t: [usize; 3]| {
        let [a, b, c] = t.map(|i| m.vertices[i]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
    };
    let probe = mesh
        .triangles
        .iter()
        .copied()
        .max_by(|p, q| {
            let n = |t| {
                let f = face_normal(&mesh, t);
                f[0] * f[0] + f[1] * f[1] + f[2] * f[2]
            };
            n(*p).total_cmp(&n(*q))
        })
        .expect("at least one triangle");
    let f = face_normal(&mesh, probe);
    let vn = mesh.normals[probe[0]];
    if f[0] * vn[0] + f[1] * vn[1] + f[2] * vn[2] < 0.0 {
        for n in &mut mesh.normals {
            *n = n.map(|c| -c);
        }
    }
    Ok(mesh)
}

/// Arclength span to mesh: `n_periods` periods for periodic classes, the
/// whole trajectory otherwise.
pub fn mesh_span(traj: &Trajectory, period: Option<f64>, n_periods: usize) -> (f64, f64) {
    match period {
        Some(t) if t > 0.0 && n_periods > 0 => {
            let lo = traj.s_min();
            (lo, (lo + n_periods as f64 * t).min(traj.s_max()))
        }
        _ => (traj.s_min(), traj.s_max()),
    }
}
