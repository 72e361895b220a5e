//! ASCII mesh export. Coordinates are printed with 17 significant digits so
//! that re-reading them reproduces the `f64` values bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::intersect::{witness_segments, IntersectionReport};
use crate::point::Point3;
use crate::scalar::Scalar;
use crate::surface::TriangleMesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
        }
    }
}

fn coords<T: Scalar>(p: Point3<T>) -> String {
    format!(
        "{:.16e} {:.16e} {:.16e}",
        p.x.to_f64_lossy(),
        p.y.to_f64_lossy(),
        p.z.to_f64_lossy()
    )
}

pub fn write_obj<T: Scalar, W: Write>(mesh: &TriangleMesh<T>, w: &mut W) -> std::io::Result<()> {
    writeln!(
        w,
        "# knotmorph mesh: {} vertices, {} triangles",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    for &v in &mesh.vertices {
        writeln!(w, "v {}", coords(v))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

pub fn write_ply<T: Scalar, W: Write>(mesh: &TriangleMesh<T>, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "comment knotmorph mesh")?;
    writeln!(w, "element vertex {}", mesh.vertices.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    writeln!(w, "element face {}", mesh.triangles.len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for &v in &mesh.vertices {
        writeln!(w, "{}", coords(v))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

/// Witness segments as OBJ line elements, one `l` per intersecting pair.
pub fn write_witness_obj<T: Scalar, W: Write>(
    report: &IntersectionReport<T>,
    w: &mut W,
) -> std::io::Result<()> {
    let segs = witness_segments(report);
    writeln!(w, "# knotmorph witnesses: {} segments", segs.len())?;
    for (a, b) in &segs {
        writeln!(w, "v {}", coords(*a))?;
        writeln!(w, "v {}", coords(*b))?;
    }
    for (i, p) in report.pairs.iter().enumerate() {
        writeln!(w, "# triangles {} {}", p.first, p.second)?;
        writeln!(w, "l {} {}", 2 * i + 1, 2 * i + 2)?;
    }
    Ok(())
}

/// Writes `path` (extension replaced by the format's) and, when a report is
/// given, the sibling `<stem>.witness.obj`. Returns the files written.
pub fn export_mesh<T: Scalar>(
    mesh: &TriangleMesh<T>,
    report: Option<&IntersectionReport<T>>,
    format: MeshFormat,
    path: &Path,
) -> Result<Vec<PathBuf>> {
    let main = path.with_extension(format.extension());
    let mut written = vec![main.clone()];
    let mut w = BufWriter::new(File::create(&main)?);
    match format {
        MeshFormat::Obj => write_obj(mesh, &mut w)?,
        MeshFormat::Ply => write_ply(mesh, &mut w)?,
    }
    w.flush()?;
    if let Some(report) = report {
        let stem = main
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "mesh".into());
        let witness = main.with_file_name(format!("{stem}.witness.obj"));
        let mut w = BufWriter::new(File::create(&witness)?);
        write_witness_obj(report, &mut w)?;
        w.flush()?;
        written.push(witness);
    }
    Ok(written)
}

/// Reads the `v` and triangular `f` records of an OBJ file; other records
/// are ignored. Face indices may be negative (relative) or carry `/vt/vn`.
pub fn read_obj(text: &str) -> Result<TriangleMesh<f64>> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let bad = |message: String| Error::Parse { line, message };
        let mut fields = raw.split_whitespace();
        match fields.next() {
            Some("v") => {
                let c: Vec<f64> = fields
                    .map(|f| f.parse::<f64>().map_err(|e| bad(format!("{f:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if c.len() < 3 {
                    return Err(bad("vertex needs three coordinates".into()));
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = fields
                    .map(|f| {
                        let head = f.split('/').next().unwrap_or("");
                        let i: i64 = head.parse().map_err(|e| bad(format!("{f:?}: {e}")))?;
                        let resolved = if i < 0 { vertices.len() as i64 + i } else { i - 1 };
                        usize::try_from(resolved).map_err(|_| bad(format!("face index {i} out of range")))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(bad(format!("expected a triangle, got {} indices", idx.len())));
                }
                triangles.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles, None)
}
