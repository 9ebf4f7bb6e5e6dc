use std::collections::HashMap;

use super::dyadic::{orient, DyadicPoint};
use crate::Result;

/// Interned vertex handle; equal coordinates always give the same id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Debug, Default)]
pub struct VertexTable {
    points: Vec<DyadicPoint>,
    index: HashMap<DyadicPoint, VertexId>,
}

impl VertexTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, p: DyadicPoint) -> VertexId {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = VertexId(u32::try_from(self.points.len()).expect("too many vertices"));
        self.points.push(p);
        self.index.insert(p, id);
        id
    }

    pub fn lookup(&self, p: &DyadicPoint) -> Option<VertexId> {
        self.index.get(p).copied()
    }

    pub fn point(&self, v: VertexId) -> DyadicPoint {
        self.points[v.0 as usize]
    }

    pub fn coords(&self, v: VertexId) -> [f64; 2] {
        self.point(v).to_f64()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn midpoint(&mut self, a: VertexId, b: VertexId) -> Result<VertexId> {
        let m = DyadicPoint::midpoint(self.point(a), self.point(b))?;
        Ok(self.intern(m))
    }
}

/// Sorted vertex pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey(VertexId, VertexId);

impl EdgeKey {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn endpoints(self) -> (VertexId, VertexId) {
        (self.0, self.1)
    }
}

/// Triangle `(a0, a1, a2)` whose newest vertex is `a1`; the refinement edge
/// is `a0 a2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub verts: [VertexId; 3],
}

impl Triangle {
    pub fn new(a0: VertexId, a1: VertexId, a2: VertexId) -> Self {
        Self { verts: [a0, a1, a2] }
    }

    pub fn newest(&self) -> VertexId {
        self.verts[1]
    }

    pub fn refinement_edge(&self) -> EdgeKey {
        EdgeKey::new(self.verts[0], self.verts[2])
    }

    pub fn edges(&self) -> [EdgeKey; 3] {
        let [a0, a1, a2] = self.verts;
        [EdgeKey::new(a0, a2), EdgeKey::new(a0, a1), EdgeKey::new(a1, a2)]
    }

    /// Orientation sign of the vertex triple (never zero for valid cells).
    pub fn orientation(&self, table: &VertexTable) -> i32 {
        let [a, b, c] = self.verts.map(|v| table.point(v));
        orient(a, b, c)
    }

    pub fn coords(&self, table: &VertexTable) -> [[f64; 2]; 3] {
        self.verts.map(|v| table.coords(v))
    }

    pub fn area(&self, table: &VertexTable) -> f64 {
        triangle_area(&self.coords(table))
    }
}

pub fn triangle_area(t: &[[f64; 2]; 3]) -> f64 {
    let [a, b, c] = t;
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
}

/// Newest-vertex bisection: `(a0, a, a1)` and `(a2, a, a1)` with `a` the
/// midpoint of the refinement edge.
pub fn nvb_children(table: &mut VertexTable, t: &Triangle) -> Result<(Triangle, Triangle)> {
    let [a0, a1, a2] = t.verts;
    let a = table.midpoint(a0, a2)?;
    Ok((Triangle::new(a0, a, a1), Triangle::new(a2, a, a1)))
}
