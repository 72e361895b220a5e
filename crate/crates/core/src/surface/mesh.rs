use crate::error::{Error, Result};
use crate::point::Point3;
use crate::scalar::Scalar;

use super::RuledSurface;

/// Triangles with area at or below this are dropped during triangulation.
pub const DEGENERATE_AREA: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh<T> {
    pub vertices: Vec<Point3<T>>,
    pub triangles: Vec<[usize; 3]>,
    /// `(u, v)` grid coordinates per vertex, when the mesh came from a surface.
    pub provenance: Option<Vec<[T; 2]>>,
}

impl<T: Scalar> TriangleMesh<T> {
    /// Checks index ranges and rejects degenerate triangles.
    pub fn new(
        vertices: Vec<Point3<T>>,
        triangles: Vec<[usize; 3]>,
        provenance: Option<Vec<[T; 2]>>,
    ) -> Result<Self> {
        let mesh = Self {
            vertices,
            triangles,
            provenance,
        };
        if let Some(p) = &mesh.provenance {
            if p.len() != mesh.vertices.len() {
                return Err(Error::domain("provenance length differs from vertex count"));
            }
        }
        for (t, tri) in mesh.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= mesh.vertices.len()) {
                return Err(Error::domain(format!("triangle {t} has an out-of-range index")));
            }
            if mesh.area(t) <= T::lit(DEGENERATE_AREA) {
                return Err(Error::domain(format!("triangle {t} is degenerate")));
            }
        }
        Ok(mesh)
    }

    pub fn triangle(&self, t: usize) -> [Point3<T>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> T {
        triangle_area(self.triangle(t))
    }

    /// For each triangle, the other triangles sharing at least one vertex index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut by_vertex = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                by_vertex[v].push(t);
            }
        }
        self.triangles
            .iter()
            .enumerate()
            .map(|(t, tri)| {
                let mut n: Vec<usize> = tri
                    .iter()
                    .flat_map(|&v| by_vertex[v].iter().copied())
                    .filter(|&o| o != t)
                    .collect();
                n.sort_unstable();
                n.dedup();
                n
            })
            .collect()
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(Point3<T>) -> Point3<T>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            triangles: self.triangles.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

pub(crate) fn triangle_area<T: Scalar>([a, b, c]: [Point3<T>; 3]) -> T {
    (b - a).cross(c - a).norm() * T::lit(0.5)
}

/// Splits the `m x v_steps` quad grid of `s` into triangles along the
/// lower-left to upper-right diagonal. Degenerate triangles are skipped;
/// a surface with no surviving triangle is an error.
pub fn triangulate<T: Scalar>(s: &RuledSurface<T>, v_steps: usize) -> Result<TriangleMesh<T>> {
    triangulate_skin(std::slice::from_ref(s), v_steps)
}

/// Triangulates consecutive patches into one mesh. Rows on shared boundary
/// curves are emitted once, so neighbouring patches share vertex indices.
/// The `v` provenance runs from `0` to the patch count.
pub fn triangulate_skin<T: Scalar>(
    patches: &[RuledSurface<T>],
    v_steps: usize,
) -> Result<TriangleMesh<T>> {
    if v_steps == 0 {
        return Err(Error::domain("v_steps must be at least 1"));
    }
    let first = patches
        .first()
        .ok_or_else(|| Error::domain("nothing to triangulate"))?;
    let m = first.intervals();
    let closed = first.is_closed();
    if patches
        .iter()
        .any(|p| p.intervals() != m || p.is_closed() != closed)
    {
        return Err(Error::domain("patches have incompatible sampling"));
    }
    let cols = if closed { m } else { m + 1 };
    let rows = patches.len() * v_steps + 1;

    let mut vertices = Vec::with_capacity(rows * cols);
    let mut provenance = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (patch, j) = if r == rows - 1 {
            (patches.len() - 1, v_steps)
        } else {
            (r / v_steps, r % v_steps)
        };
        let s = &patches[patch];
        let v_local = T::lit(j as f64 / v_steps as f64);
        for k in 0..cols {
            let p = match j {
                0 => s.c1().samples()[k],
                j if j == v_steps => s.c2().samples()[k],
                _ => s.point(k, v_local),
            };
            vertices.push(p);
            provenance.push([
                T::lit(k as f64 / m as f64),
                T::lit(patch as f64) + v_local,
            ]);
        }
    }

    let idx = |k: usize, r: usize| r * cols + (k % cols);
    let min_area = T::lit(DEGENERATE_AREA);
    let mut triangles = Vec::with_capacity(2 * m * (rows - 1));
    for r in 0..rows - 1 {
        for k in 0..m {
            let a = idx(k, r);
            let b = idx(k + 1, r);
            let c = idx(k + 1, r + 1);
            let d = idx(k, r + 1);
            for tri in [[a, b, c], [a, c, d]] {
                let area = triangle_area([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
                if area > min_area {
                    triangles.push(tri);
                }
            }
        }
    }
    if triangles.is_empty() {
        return Err(Error::domain("every triangle of the surface is degenerate"));
    }
    Ok(TriangleMesh {
        vertices,
        triangles,
        provenance: Some(provenance),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::super::{rule, skin, sweep};
    use super::*;
    use crate::curve::SampledCurve;

    type P = Point3<f64>;

    fn circle(m: usize, z: f64) -> SampledCurve<f64> {
        let samples = (0..=m)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / m as f64;
                P::new(a.cos(), a.sin(), z)
            })
            .collect();
        SampledCurve::new(samples, true).unwrap()
    }

    fn edge_counts(mesh: &TriangleMesh<f64>) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for t in &mesh.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    #[test]
    fn cylinder_grid_is_watertight() {
        let s = sweep(&circle(16, 0.0), P::new(0.0, 0.0, 1.0), 0.5).unwrap();
        let mesh = triangulate(&s, 4).unwrap();
        assert_eq!(mesh.vertices.len(), 16 * 5);
        assert_eq!(mesh.triangles.len(), 2 * 16 * 4);
        // closed in u, so only the top and bottom rows are boundary edges
        let counts = edge_counts(&mesh);
        let boundary = counts.values().filter(|&&c| c == 1).count();
        assert_eq!(boundary, 32);
        assert!(counts.values().all(|&c| c == 1 || c == 2));
    }

    #[test]
    fn diagonal_runs_lower_left_to_upper_right() {
        let s = sweep(&circle(8, 0.0), P::new(0.0, 0.0, 1.0), 1.0).unwrap();
        let mesh = triangulate(&s, 1).unwrap();
        // quad 0: a = 0, b = 1, c = 9, d = 8
        assert_eq!(mesh.triangles[0], [0, 1, 9]);
        assert_eq!(mesh.triangles[1], [0, 9, 8]);
        let uv = mesh.provenance.as_ref().unwrap();
        assert_eq!(uv[9], [0.125, 1.0]);
    }

    #[test]
    fn boundary_rows_are_sample_data() {
        let c1 = circle(12, 0.0);
        let c2 = circle(12, 0.7).translated(P::new(0.3, 0.0, 0.0));
        let mesh = triangulate(&rule(&c1, &c2).unwrap(), 3).unwrap();
        for k in 0..12 {
            assert_eq!(mesh.vertices[k], c1.samples()[k]);
            assert_eq!(mesh.vertices[3 * 12 + k], c2.samples()[k]);
        }
    }

    #[test]
    fn skin_shares_boundary_rows() {
        let curves: Vec<_> = (0..3).map(|i| circle(8, i as f64)).collect();
        let mesh = triangulate_skin(&skin(&curves).unwrap(), 2).unwrap();
        assert_eq!(mesh.vertices.len(), 8 * 5);
        let counts = edge_counts(&mesh);
        assert_eq!(counts.values().filter(|&&c| c == 1).count(), 16);
    }

    #[test]
    fn collapsed_rulings_drop_triangles() {
        let c1 = circle(8, 0.0);
        // reversed circle in the same plane: rulings at u = 0 and u = 1/2 have zero length
        let mesh = triangulate(&rule(&c1, &c1.reversed()).unwrap(), 2).unwrap();
        assert!(mesh.triangles.len() < 2 * 8 * 2);
        for t in 0..mesh.triangles.len() {
            assert!(mesh.area(t) > DEGENERATE_AREA);
        }
    }

    #[test]
    fn new_validates() {
        let v = vec![P::zero(), P::new(1.0, 0.0, 0.0), P::new(0.0, 1.0, 0.0)];
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 2]], None).is_ok());
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 3]], None).is_err());
        assert!(TriangleMesh::new(v, vec![[0, 1, 1]], None).is_err());
    }
}
