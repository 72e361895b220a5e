use std::cmp::Ordering;

use crate::point::Point3;
use crate::scalar::Scalar;
use crate::surface::TriangleMesh;

pub const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb<T> {
    pub min: Point3<T>,
    pub max: Point3<T>,
}

impl<T: Scalar> Aabb<T> {
    pub fn empty() -> Self {
        let inf = T::infinity();
        Self {
            min: Point3::new(inf, inf, inf),
            max: Point3::new(-inf, -inf, -inf),
        }
    }

    pub fn of_points(pts: &[Point3<T>]) -> Self {
        pts.iter().fold(Self::empty(), |b, &p| b.grow(p))
    }

    pub fn grow(self, p: Point3<T>) -> Self {
        Self {
            min: self.min.component_min(p),
            max: self.max.component_max(p),
        }
    }

    pub fn union(self, o: Self) -> Self {
        Self {
            min: self.min.component_min(o.min),
            max: self.max.component_max(o.max),
        }
    }

    pub fn padded(self, pad: T) -> Self {
        let d = Point3::new(pad, pad, pad);
        Self {
            min: self.min - d,
            max: self.max + d,
        }
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
            && self.min.z <= o.max.z
            && o.min.z <= self.max.z
    }

    pub fn contains(&self, o: &Self) -> bool {
        self.min.x <= o.min.x
            && self.min.y <= o.min.y
            && self.min.z <= o.min.z
            && self.max.x >= o.max.x
            && self.max.y >= o.max.y
            && self.max.z >= o.max.z
    }

    pub fn center(&self) -> Point3<T> {
        self.min.midpoint(self.max)
    }

    fn longest_axis(&self) -> usize {
        let e = self.max - self.min;
        if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        }
    }
}

#[derive(Clone, Debug)]
pub enum Node<T> {
    Leaf { bounds: Aabb<T>, start: usize, end: usize },
    Inner { bounds: Aabb<T>, left: usize, right: usize },
}

impl<T: Scalar> Node<T> {
    pub fn bounds(&self) -> &Aabb<T> {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// Binary bounding volume hierarchy over the triangles of a mesh, with
/// median splits along the longest centroid extent.
#[derive(Clone, Debug)]
pub struct AabbTree<T> {
    nodes: Vec<Node<T>>,
    /// Triangle indices; leaves refer to ranges of this array.
    order: Vec<usize>,
    boxes: Vec<Aabb<T>>,
}

impl<T: Scalar> AabbTree<T> {
    /// Every triangle box is padded by `pad` before insertion.
    pub fn build(mesh: &TriangleMesh<T>, pad: T) -> Self {
        let boxes: Vec<Aabb<T>> = (0..mesh.triangles.len())
            .map(|t| Aabb::of_points(&mesh.triangle(t)).padded(pad))
            .collect();
        let mut tree = Self {
            nodes: Vec::new(),
            order: (0..boxes.len()).collect(),
            boxes,
        };
        if !tree.order.is_empty() {
            tree.build_node(0, tree.order.len());
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let bounds = self.order[start..end]
            .iter()
            .fold(Aabb::empty(), |b, &t| b.union(self.boxes[t]));
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds, start, end });
            return id;
        }
        let centroids = self.order[start..end]
            .iter()
            .fold(Aabb::empty(), |b, &t| b.grow(self.boxes[t].center()));
        let axis = centroids.longest_axis();
        let boxes = &self.boxes;
        self.order[start..end].sort_by(|&a, &b| {
            boxes[a]
                .center()
                .axis(axis)
                .partial_cmp(&boxes[b].center().axis(axis))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        // placeholder, patched once children exist
        self.nodes.push(Node::Leaf { bounds, start, end });
        let mid = start + (end - start) / 2;
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Inner { bounds, left, right };
        id
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn triangle_box(&self, t: usize) -> &Aabb<T> {
        &self.boxes[t]
    }

    /// Triangle indices stored under `node`.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        match &self.nodes[node] {
            Node::Leaf { start, end, .. } => self.order[*start..*end].to_vec(),
            Node::Inner { left, right, .. } => {
                let mut v = self.leaves_under(*left);
                v.extend(self.leaves_under(*right));
                v
            }
        }
    }

    /// All pairs `(i, j)`, `i < j`, whose padded boxes overlap, sorted.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.self_pairs(0, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn self_pairs(&self, node: usize, out: &mut Vec<(usize, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end, .. } => {
                for a in start..end {
                    for b in a + 1..end {
                        self.push_if_overlapping(self.order[a], self.order[b], out);
                    }
                }
            }
            Node::Inner { left, right, .. } => {
                self.self_pairs(left, out);
                self.self_pairs(right, out);
                self.cross_pairs(left, right, out);
            }
        }
    }

    fn cross_pairs(&self, a: usize, b: usize, out: &mut Vec<(usize, usize)>) {
        if !self.nodes[a].bounds().overlaps(self.nodes[b].bounds()) {
            return;
        }
        match (&self.nodes[a], &self.nodes[b]) {
            (
                Node::Leaf { start: s1, end: e1, .. },
                Node::Leaf { start: s2, end: e2, .. },
            ) => {
                for &x in &self.order[*s1..*e1] {
                    for &y in &self.order[*s2..*e2] {
                        self.push_if_overlapping(x, y, out);
                    }
                }
            }
            (Node::Inner { left, right, .. }, Node::Leaf { .. }) => {
                self.cross_pairs(*left, b, out);
                self.cross_pairs(*right, b, out);
            }
            (_, Node::Inner { left, right, .. }) => {
                self.cross_pairs(a, *left, out);
                self.cross_pairs(a, *right, out);
            }
        }
    }

    fn push_if_overlapping(&self, x: usize, y: usize, out: &mut Vec<(usize, usize)>) {
        if self.boxes[x].overlaps(&self.boxes[y]) {
            out.push((x.min(y), x.max(y)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point3<f64>;

    fn grid_mesh(n: usize) -> TriangleMesh<f64> {
        let mut vertices = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(P::new(i as f64, j as f64, ((i * 7 + j * 3) % 5) as f64 * 0.1));
            }
        }
        let mut triangles = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let a = j * (n + 1) + i;
                triangles.push([a, a + 1, a + n + 2]);
                triangles.push([a, a + n + 2, a + n + 1]);
            }
        }
        TriangleMesh::new(vertices, triangles, None).unwrap()
    }

    #[test]
    fn ancestors_contain_children() {
        let mesh = grid_mesh(9);
        let tree = AabbTree::build(&mesh, 1e-9);
        for (id, node) in tree.nodes().iter().enumerate() {
            for t in tree.leaves_under(id) {
                assert!(node.bounds().contains(tree.triangle_box(t)));
            }
            if let Node::Leaf { start, end, .. } = node {
                assert!(end - start <= LEAF_SIZE);
            }
        }
        let mut all = tree.leaves_under(0);
        all.sort_unstable();
        assert_eq!(all, (0..mesh.triangles.len()).collect::<Vec<_>>());
    }

    #[test]
    fn pairs_match_exhaustive_box_test() {
        let mesh = grid_mesh(7);
        let tree = AabbTree::build(&mesh, 1e-9);
        let mut expected = Vec::new();
        for i in 0..mesh.triangles.len() {
            for j in i + 1..mesh.triangles.len() {
                if tree.triangle_box(i).overlaps(tree.triangle_box(j)) {
                    expected.push((i, j));
                }
            }
        }
        assert_eq!(tree.overlapping_pairs(), expected);
    }
}
