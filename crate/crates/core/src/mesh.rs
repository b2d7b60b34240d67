//! Quad tessellation of a canal surface and OBJ / CSV export.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::curvature::{curvature_triple, CurvatureTriple};
use crate::curve::Vec3;
use crate::error::{Error, Result};
use crate::grid::Interval;
use crate::surface::CanalSurface;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MeshOptions {
    pub with_curvature: bool,
    /// For a full turn in t, also connect the last t column to the first.
    pub weld_seam: bool,
}

/// Vertices are stored row-major: index = i·nt + j for s index i, t index j.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    pub ns: usize,
    pub nt: usize,
    pub params: Vec<(f64, f64)>,
    pub vertices: Vec<Vec3>,
    /// Unit normals; zero at singular vertices.
    pub normals: Vec<Vec3>,
    pub regular: Vec<bool>,
    /// Per-vertex curvatures, empty unless requested.
    pub curvature: Vec<CurvatureTriple>,
    /// Corner indices counterclockwise about C_s × C_t.
    pub quads: Vec<[usize; 4]>,
    /// (i, j) of cells left out because a corner is singular.
    pub masked: Vec<(usize, usize)>,
}

struct Vertex {
    point: Vec3,
    normal: Option<Vec3>,
    curvature: Option<CurvatureTriple>,
}

/// Samples `surf` on an ns × nt grid. A t range of length 2π is sampled
/// half-open, any other range inclusive of both ends.
pub fn tessellate(
    surf: &CanalSurface,
    s_range: Interval,
    t_range: Interval,
    ns: usize,
    nt: usize,
    opts: MeshOptions,
) -> Result<SurfaceMesh> {
    if ns < 2 || nt < 3 {
        return Err(Error::InvalidParams(format!("mesh needs ns >= 2 and nt >= 3, got {ns} x {nt}")));
    }
    let periodic = (t_range.length() - TAU).abs() <= 1e-12;
    let s_values = s_range.linspace(ns);
    let t_values = if periodic { t_range.half_open(nt) } else { t_range.linspace(nt) };
    let params: Vec<(f64, f64)> = s_values.iter().flat_map(|&s| t_values.iter().map(move |&t| (s, t))).collect();

    let vertices: Vec<Vertex> = params
        .par_iter()
        .map(|&(s, t)| {
            let point = surf.evaluate(s, t)?;
            let normal = match surf.normal(s, t) {
                Ok(n) => Some(n),
                Err(Error::SingularPoint { .. }) => None,
                Err(e) => return Err(e),
            };
            let curvature = if opts.with_curvature { Some(curvature_triple(surf, s, t)?) } else { None };
            Ok(Vertex { point, normal, curvature })
        })
        .collect::<Result<_>>()?;

    let columns = if periodic && opts.weld_seam { nt } else { nt - 1 };
    let mut quads = Vec::new();
    let mut masked = Vec::new();
    for i in 0..ns - 1 {
        for j in 0..columns {
            let jn = (j + 1) % nt;
            let corners = [i * nt + j, (i + 1) * nt + j, (i + 1) * nt + jn, i * nt + jn];
            if corners.iter().all(|&c| vertices[c].normal.is_some()) {
                quads.push(corners);
            } else {
                masked.push((i, j));
            }
        }
    }
    if quads.is_empty() {
        return Err(Error::AllSingular);
    }
    Ok(SurfaceMesh {
        ns,
        nt,
        params,
        regular: vertices.iter().map(|v| v.normal.is_some()).collect(),
        normals: vertices.iter().map(|v| v.normal.unwrap_or_else(Vec3::zeros)).collect(),
        curvature: vertices.iter().filter_map(|v| v.curvature).collect(),
        vertices: vertices.into_iter().map(|v| v.point).collect(),
        quads,
        masked,
    })
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn ensure_nonempty(mesh: &SurfaceMesh) -> Result<()> {
    if mesh.vertices.is_empty() {
        return Err(Error::InvalidParams("mesh is empty".into()));
    }
    Ok(())
}

/// Wavefront OBJ: `v`, `vn` and 1-indexed `f v//vn` quads.
pub fn export_obj(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    ensure_nonempty(mesh)?;
    let err = io_error(path);
    let mut out = BufWriter::new(File::create(path).map_err(&err)?);
    writeln!(out, "# canal surface, {} x {} vertices, {} masked cells", mesh.ns, mesh.nt, mesh.masked.len())
        .map_err(&err)?;
    for v in &mesh.vertices {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z).map_err(&err)?;
    }
    for n in &mesh.normals {
        writeln!(out, "vn {:.16e} {:.16e} {:.16e}", n.x, n.y, n.z).map_err(&err)?;
    }
    for q in &mesh.quads {
        let [a, b, c, d] = q.map(|i| i + 1);
        writeln!(out, "f {a}//{a} {b}//{b} {c}//{c} {d}//{d}").map_err(&err)?;
    }
    out.flush().map_err(&err)
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

/// One row per vertex: `s,t,x,y,z,K,H,K_II,regular`. Curvature cells are
/// empty where undefined or not computed.
pub fn export_csv(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    ensure_nonempty(mesh)?;
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_err)?;
    w.write_record(["s", "t", "x", "y", "z", "K", "H", "K_II", "regular"]).map_err(csv_err)?;
    for (idx, (&(s, t), p)) in mesh.params.iter().zip(&mesh.vertices).enumerate() {
        let c = mesh.curvature.get(idx);
        w.write_record([
            number(s),
            number(t),
            number(p.x),
            number(p.y),
            number(p.z),
            optional(c.and_then(|c| c.k)),
            optional(c.and_then(|c| c.h)),
            optional(c.and_then(|c| c.k_ii)),
            mesh.regular[idx].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
