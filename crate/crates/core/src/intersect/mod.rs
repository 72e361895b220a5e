//! Mesh self-intersection detection and the isotopy certificate built on it.

mod bvh;
mod certificate;
mod tri;

pub use bvh::{Aabb, AabbTree, Node, LEAF_SIZE};
pub use certificate::{certify_isotopy, IsotopyCertificate, Resolution, Verdict, CERTIFICATE_CAVEAT};
pub use tri::{tri_tri_intersect, Triangle, Witness, WitnessKind};

use rayon::prelude::*;

use crate::error::Result;
use crate::point::Point3;
use crate::scalar::Scalar;
use crate::surface::TriangleMesh;

/// Default degeneracy tolerance in model units.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Vertices closer than this make two triangles adjacent.
pub const COINCIDENT_VERTEX: f64 = 1e-12;

/// Triangle boxes are padded by this multiple of `eps`, which bounds how far
/// apart two triangles can be while the predicates still report contact.
pub const BOX_PAD_FACTOR: f64 = 4.0;

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectingPair<T> {
    pub first: usize,
    pub second: usize,
    pub witness: Witness<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionReport<T> {
    /// Intersections with witness extent at least `eps`, sorted by index pair.
    pub pairs: Vec<IntersectingPair<T>>,
    /// Contacts thinner than `eps`; they do not count as self-intersection.
    pub grazing: Vec<IntersectingPair<T>>,
    /// Pairs handed to the triangle-triangle predicate.
    pub tested_pairs: usize,
    /// Candidate pairs skipped because the triangles are adjacent.
    pub excluded_adjacent: usize,
}

impl<T: Scalar> IntersectionReport<T> {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair_indices(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|p| (p.first, p.second)).collect()
    }
}

/// True when the triangles share a vertex index or have coincident vertices.
pub fn triangles_adjacent<T: Scalar>(mesh: &TriangleMesh<T>, a: usize, b: usize) -> bool {
    let ta = mesh.triangles[a];
    let tb = mesh.triangles[b];
    if ta.iter().any(|i| tb.contains(i)) {
        return true;
    }
    let tol = T::lit(COINCIDENT_VERTEX);
    ta.iter().any(|&i| {
        tb.iter()
            .any(|&j| mesh.vertices[i].distance(mesh.vertices[j]) <= tol)
    })
}

fn narrow_phase<T: Scalar>(
    mesh: &TriangleMesh<T>,
    candidates: Vec<(usize, usize)>,
    excluded_adjacent: usize,
    eps: T,
) -> Result<IntersectionReport<T>> {
    let tested_pairs = candidates.len();
    let hits: Vec<Option<IntersectingPair<T>>> = candidates
        .into_par_iter()
        .map(|(i, j)| {
            tri_tri_intersect(&mesh.triangle(i), &mesh.triangle(j), eps).map(|w| {
                w.map(|witness| IntersectingPair {
                    first: i,
                    second: j,
                    witness,
                })
            })
        })
        .collect::<Result<_>>()?;
    let (pairs, grazing) = hits
        .into_iter()
        .flatten()
        .partition(|p| p.witness.extent() >= eps);
    Ok(IntersectionReport {
        pairs,
        grazing,
        tested_pairs,
        excluded_adjacent,
    })
}

/// Tests every nonadjacent triangle pair. Quadratic; the reference for
/// [`self_intersections`].
pub fn self_intersections_bruteforce<T: Scalar>(
    mesh: &TriangleMesh<T>,
    eps: T,
) -> Result<IntersectionReport<T>> {
    let n = mesh.triangles.len();
    let rows: Vec<(Vec<(usize, usize)>, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut keep = Vec::new();
            let mut skipped = 0;
            for j in i + 1..n {
                if triangles_adjacent(mesh, i, j) {
                    skipped += 1;
                } else {
                    keep.push((i, j));
                }
            }
            (keep, skipped)
        })
        .collect();
    let excluded = rows.iter().map(|r| r.1).sum();
    let candidates = rows.into_iter().flat_map(|r| r.0).collect();
    narrow_phase(mesh, candidates, excluded, eps)
}

/// Self-intersections found through an [`AabbTree`]; same pair set as the
/// brute-force search.
pub fn self_intersections<T: Scalar>(
    mesh: &TriangleMesh<T>,
    eps: T,
) -> Result<IntersectionReport<T>> {
    let tree = AabbTree::build(mesh, eps * T::lit(BOX_PAD_FACTOR));
    let mut excluded = 0;
    let candidates: Vec<(usize, usize)> = tree
        .overlapping_pairs()
        .into_iter()
        .filter(|&(i, j)| {
            let adj = triangles_adjacent(mesh, i, j);
            excluded += adj as usize;
            !adj
        })
        .collect();
    narrow_phase(mesh, candidates, excluded, eps)
}

/// Witness segments of a report, for export.
pub fn witness_segments<T: Scalar>(report: &IntersectionReport<T>) -> Vec<(Point3<T>, Point3<T>)> {
    report
        .pairs
        .iter()
        .map(|p| (p.witness.start, p.witness.end))
        .collect()
}
