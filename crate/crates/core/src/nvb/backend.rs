use std::collections::HashMap;

use super::dyadic::{cross_sign, on_segment, orient, DyadicPoint};
use super::labeling::{boundary_edges, check_compatibility, InitialMesh};
use super::mesh::{nvb_children, triangle_area, EdgeKey, Triangle, VertexId, VertexTable};
use crate::tree::{Arena, CellId, GeometryBackend, RefinementTree, SubdivisionPatch};
use crate::{Error, Result};

/// Newest-vertex bisection over a compatibly labeled initial mesh.
#[derive(Clone, Debug)]
pub struct NvbBackend {
    arena: Arena<Triangle>,
    vertices: VertexTable,
    boundary: Vec<(DyadicPoint, DyadicPoint)>,
    /// Refinement-edge mate of every cell looked up so far (`None`: the
    /// refinement edge is on the boundary).
    mates: HashMap<CellId, Option<CellId>>,
}

/// A point just across a refinement edge, perturbed symbolically: the
/// midpoint `p` pushed by `ε·d + ε²·f`.
struct Probe {
    p: DyadicPoint,
    d: (DyadicPoint, DyadicPoint),
    f: (DyadicPoint, DyadicPoint),
}

impl NvbBackend {
    pub fn new(mesh: &InitialMesh) -> Result<Self> {
        check_compatibility(mesh)?;
        let mut vertices = VertexTable::new();
        let ids: Vec<VertexId> = mesh.points.iter().map(|&p| vertices.intern(p)).collect();
        let mut arena = Arena::new();
        for t in &mesh.triangles {
            arena.add_root(Triangle::new(ids[t[0]], ids[t[1]], ids[t[2]]));
        }
        Ok(Self {
            arena,
            vertices,
            boundary: boundary_edges(mesh),
            mates: HashMap::new(),
        })
    }

    pub fn vertices(&self) -> &VertexTable {
        &self.vertices
    }

    pub fn triangle(&self, cell: CellId) -> &Triangle {
        self.arena.geometry(cell)
    }

    pub fn boundary_segments(&self) -> &[(DyadicPoint, DyadicPoint)] {
        &self.boundary
    }

    /// Whether the edge lies on the boundary of the initial mesh.
    pub fn on_boundary(&self, e: EdgeKey) -> bool {
        let (a, b) = e.endpoints();
        let (pa, pb) = (self.vertices.point(a), self.vertices.point(b));
        self.boundary
            .iter()
            .any(|&(s, t)| on_segment(s, t, pa) && on_segment(s, t, pb))
    }

    fn contains_probe(&self, cell: CellId, probe: &Probe) -> bool {
        let mut v = self.arena.geometry(cell).verts.map(|v| self.vertices.point(v));
        if orient(v[0], v[1], v[2]) < 0 {
            v.swap(1, 2);
        }
        (0..3).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            match orient(a, b, probe.p) {
                0 => match cross_sign(a, b, probe.d.0, probe.d.1) {
                    0 => cross_sign(a, b, probe.f.0, probe.f.1) > 0,
                    s => s > 0,
                },
                s => s > 0,
            }
        })
    }

    /// The cell of the same generation on the other side of the refinement
    /// edge, materialising its ancestors as needed.
    fn find_mate(&mut self, cell: CellId) -> Result<Option<CellId>> {
        if let Some(&m) = self.mates.get(&cell) {
            return Ok(m);
        }
        let tri = *self.arena.geometry(cell);
        let [a0, a1, a2] = tri.verts.map(|v| self.vertices.point(v));
        let p = DyadicPoint::midpoint(a0, a2)?;
        let probe = Probe { p, d: (a1, p), f: (a0, a2) };
        let root = self
            .arena
            .roots()
            .iter()
            .copied()
            .find(|&r| self.contains_probe(r, &probe));
        let Some(mut cur) = root else {
            self.mates.insert(cell, None);
            return Ok(None);
        };
        let generation = self.arena.generation(cell);
        while self.arena.generation(cur) < generation {
            let children = self.expand(cur)?;
            cur = children
                .into_iter()
                .find(|&c| self.contains_probe(c, &probe))
                .ok_or_else(|| Error::Geometry(format!("children of cell {cur} do not cover their parent")))?;
        }
        if self.arena.geometry(cur).refinement_edge() != tri.refinement_edge() {
            return Err(Error::Geometry(format!(
                "cells {cell} and {cur} share an edge but not their refinement edge; the labeling is incompatible"
            )));
        }
        self.mates.insert(cell, Some(cur));
        self.mates.insert(cur, Some(cell));
        Ok(Some(cur))
    }

    /// Current leaf containing `cell` (the cell itself or an ancestor), if any.
    fn leaf_ancestor(&self, tree: &RefinementTree, cell: CellId) -> Option<CellId> {
        self.arena.lineage(cell).find(|&c| tree.is_leaf(c))
    }
}

/// Edge counts of the current leaves for incremental conformity checks.
#[derive(Clone, Debug, Default)]
pub struct EdgeTracker {
    counts: HashMap<EdgeKey, (u32, bool)>,
    unmatched: usize,
    overfull: usize,
}

impl EdgeTracker {
    pub fn is_conforming(&self) -> bool {
        self.unmatched == 0 && self.overfull == 0
    }

    fn classify(count: u32, boundary: bool) -> (usize, usize) {
        ((count == 1 && !boundary) as usize, (count > 2 || (count == 2 && boundary)) as usize)
    }

    fn adjust(&mut self, backend: &NvbBackend, e: EdgeKey, delta: i32) {
        let entry = self
            .counts
            .entry(e)
            .or_insert_with(|| (0, backend.on_boundary(e)));
        let (u0, o0) = Self::classify(entry.0, entry.1);
        entry.0 = (entry.0 as i32 + delta) as u32;
        let (u1, o1) = Self::classify(entry.0, entry.1);
        if entry.0 == 0 {
            self.counts.remove(&e);
        }
        self.unmatched = self.unmatched + u1 - u0;
        self.overfull = self.overfull + o1 - o0;
    }
}

impl GeometryBackend for NvbBackend {
    type Geometry = Triangle;
    type Shape = [[f64; 2]; 3];
    type Tracker = EdgeTracker;

    fn arena(&self) -> &Arena<Triangle> {
        &self.arena
    }

    fn expand(&mut self, cell: CellId) -> Result<Vec<CellId>> {
        let vertices = &mut self.vertices;
        let ids = self.arena.expand_with(cell, |t| {
            let (c1, c2) = nvb_children(vertices, t)?;
            Ok(vec![c1, c2])
        })?;
        Ok(ids.to_vec())
    }

    fn subdivision_patch(&mut self, cell: CellId) -> Result<SubdivisionPatch> {
        self.arena.try_get(cell)?;
        match self.find_mate(cell)? {
            None => Ok(SubdivisionPatch::singleton(cell)),
            Some(m) => SubdivisionPatch::new(vec![cell, m]),
        }
    }

    /// Follows the bisection chain: while the patch of the current cell is
    /// not contained in the leaves, its mate is covered by a coarser leaf,
    /// which has to be subdivided first.
    fn necessary_patch(&mut self, tree: &RefinementTree, cell: CellId) -> Result<SubdivisionPatch> {
        if !tree.is_leaf(cell) {
            return Err(Error::PatchNotInLeaves(cell));
        }
        let mut cur = cell;
        loop {
            let patch = self.subdivision_patch(cur)?;
            let Some(&other) = patch.cells().iter().find(|&&c| !tree.is_leaf(c)) else {
                return Ok(patch);
            };
            if tree.is_internal(other) {
                return Err(Error::NonConforming(format!(
                    "cell {other} is subdivided while its mate {cur} is a leaf"
                )));
            }
            cur = self.leaf_ancestor(tree, other).ok_or_else(|| {
                Error::NonConforming(format!("no leaf covers cell {other}"))
            })?;
        }
    }

    fn is_conforming(&self, tree: &RefinementTree) -> bool {
        self.start_tracking(tree).is_conforming()
    }

    fn max_patch_size(&self) -> usize {
        2
    }

    fn shape(&self, cell: CellId) -> [[f64; 2]; 3] {
        self.arena.geometry(cell).coords(&self.vertices)
    }

    fn measure(&self, cell: CellId) -> f64 {
        triangle_area(&self.shape(cell))
    }

    fn start_tracking(&self, tree: &RefinementTree) -> EdgeTracker {
        let mut tracker = EdgeTracker::default();
        for leaf in tree.leaves() {
            for e in self.arena.geometry(leaf).edges() {
                tracker.adjust(self, e, 1);
            }
        }
        tracker
    }

    fn track_subdivision(&self, tracker: &mut EdgeTracker, removed: &[CellId], added: &[CellId]) -> bool {
        for &c in removed {
            for e in self.arena.geometry(c).edges() {
                tracker.adjust(self, e, -1);
            }
        }
        for &c in added {
            for e in self.arena.geometry(c).edges() {
                tracker.adjust(self, e, 1);
            }
        }
        tracker.is_conforming()
    }
}
