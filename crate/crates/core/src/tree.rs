//! Master-tree arena, refinement trees and subdivision patches.
//!
//! The master tree is infinite, so it is materialised lazily: a cell gets
//! its children the first time somebody asks for them and keeps them for the
//! lifetime of the arena. Cell ids are dense and handed out in creation
//! order, which makes every run reproducible as long as the sequence of
//! queries is.
//!
//! A [`RefinementTree`] is a full subtree rooted at the initial cells. It only
//! grows, one [`SubdivisionPatch`] at a time, and its complexity is the number
//! of patches subdivided so far.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// Handle of a cell in the master-tree arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(u32);

impl CellId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        CellId(u32::try_from(index).expect("arena exceeds u32 cells"))
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct CellRecord<G> {
    parent: Option<CellId>,
    children: Option<Box<[CellId]>>,
    generation: u32,
    geometry: G,
}

impl<G> CellRecord<G> {
    pub fn parent(&self) -> Option<CellId> {
        self.parent
    }

    /// Children, or `None` while the cell has not been expanded.
    pub fn children(&self) -> Option<&[CellId]> {
        self.children.as_deref()
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn geometry(&self) -> &G {
        &self.geometry
    }
}

/// Storage for the materialised part of the master tree.
#[derive(Clone, Debug)]
pub struct Arena<G> {
    cells: Vec<CellRecord<G>>,
    roots: Vec<CellId>,
}

impl<G> Default for Arena<G> {
    fn default() -> Self {
        Self {
            cells: Vec::new(),
            roots: Vec::new(),
        }
    }
}

impl<G> Arena<G> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a cell of generation zero. Roots must be added before any
    /// expansion so that they get the smallest ids.
    pub fn add_root(&mut self, geometry: G) -> CellId {
        let id = CellId::from_index(self.cells.len());
        self.cells.push(CellRecord {
            parent: None,
            children: None,
            generation: 0,
            geometry,
        });
        self.roots.push(id);
        id
    }

    pub fn roots(&self) -> &[CellId] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, id: CellId) -> bool {
        id.index() < self.cells.len()
    }

    pub fn get(&self, id: CellId) -> &CellRecord<G> {
        &self.cells[id.index()]
    }

    pub fn try_get(&self, id: CellId) -> Result<&CellRecord<G>> {
        self.cells.get(id.index()).ok_or(Error::UnknownCell(id))
    }

    pub fn parent(&self, id: CellId) -> Option<CellId> {
        self.get(id).parent
    }

    pub fn generation(&self, id: CellId) -> u32 {
        self.get(id).generation
    }

    pub fn geometry(&self, id: CellId) -> &G {
        &self.get(id).geometry
    }

    pub fn children(&self, id: CellId) -> Option<&[CellId]> {
        self.get(id).children()
    }

    /// Iterates over `id` and its ancestors, innermost first.
    pub fn lineage(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        std::iter::successors(Some(id), move |&c| self.parent(c))
    }

    /// Materialises the children of `id` using `split`, unless they exist
    /// already. Repeated calls return the same ids.
    pub fn expand_with<F>(&mut self, id: CellId, split: F) -> Result<&[CellId]>
    where
        F: FnOnce(&G) -> Result<Vec<G>>,
    {
        let record = self.try_get(id)?;
        if record.children.is_none() {
            let pieces = split(&record.geometry)?;
            if pieces.len() < 2 {
                return Err(Error::Subdivision {
                    cell: id,
                    reason: format!("split produced {} pieces", pieces.len()),
                });
            }
            let generation = record.generation + 1;
            let first = self.cells.len();
            for geometry in pieces {
                self.cells.push(CellRecord {
                    parent: Some(id),
                    children: None,
                    generation,
                    geometry,
                });
            }
            let ids: Box<[CellId]> = (first..self.cells.len()).map(CellId::from_index).collect();
            self.cells[id.index()].children = Some(ids);
        }
        Ok(self.cells[id.index()].children.as_deref().unwrap())
    }
}

/// A set of cells that is subdivided in one go.
///
/// Members are kept sorted by id. Whether the set really is a subdivision
/// patch of some backend is up to whoever builds it; the backend's
/// `subdivision_patch` is the canonical source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubdivisionPatch {
    cells: Vec<CellId>,
}

impl SubdivisionPatch {
    pub fn new(mut cells: Vec<CellId>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyPatch);
        }
        cells.sort_unstable();
        cells.dedup();
        Ok(Self { cells })
    }

    pub fn singleton(cell: CellId) -> Self {
        Self { cells: vec![cell] }
    }

    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    /// Smallest member; used as the canonical representative.
    pub fn first(&self) -> CellId {
        self.cells[0]
    }
}

/// What a geometry backend has to provide to the tree algorithms.
pub trait GeometryBackend {
    /// Per-cell payload stored in the arena.
    type Geometry;
    /// Plain floating-point description handed to error functionals.
    type Shape;
    /// Incremental conformity bookkeeping for one refinement tree.
    type Tracker;

    fn arena(&self) -> &Arena<Self::Geometry>;

    /// Children of `cell`, created on first use.
    fn expand(&mut self, cell: CellId) -> Result<Vec<CellId>>;

    /// The unique subdivision patch containing `cell`.
    fn subdivision_patch(&mut self, cell: CellId) -> Result<SubdivisionPatch>;

    /// A patch contained in the leaves of `tree` that has to be subdivided
    /// in every conforming tree in which `cell` is subdivided.
    fn necessary_patch(&mut self, tree: &RefinementTree, cell: CellId) -> Result<SubdivisionPatch>;

    fn is_conforming(&self, tree: &RefinementTree) -> bool;

    /// Largest possible patch cardinality.
    fn max_patch_size(&self) -> usize;

    fn shape(&self, cell: CellId) -> Self::Shape;

    /// Lebesgue measure of the cell.
    fn measure(&self, cell: CellId) -> f64;

    fn start_tracking(&self, tree: &RefinementTree) -> Self::Tracker;

    /// Updates the tracker after `removed` leaves were replaced by `added`
    /// and reports whether the mesh is conforming afterwards.
    fn track_subdivision(&self, tracker: &mut Self::Tracker, removed: &[CellId], added: &[CellId]) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Absent,
    Leaf,
    Internal,
}

/// Children created by subdividing one cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivided {
    pub parent: CellId,
    pub children: Vec<CellId>,
}

/// A full subtree of the master tree rooted at the initial cells.
#[derive(Clone, Debug)]
pub struct RefinementTree {
    roots: Vec<CellId>,
    status: Vec<Status>,
    leaves: BTreeSet<CellId>,
    nodes: usize,
    patch_history: Vec<SubdivisionPatch>,
}

impl RefinementTree {
    /// The tree consisting only of the given initial cells.
    pub fn new(roots: &[CellId]) -> Self {
        let mut tree = Self {
            roots: roots.to_vec(),
            status: Vec::new(),
            leaves: BTreeSet::new(),
            nodes: 0,
            patch_history: Vec::new(),
        };
        for &r in roots {
            tree.set(r, Status::Leaf);
            tree.leaves.insert(r);
            tree.nodes += 1;
        }
        tree
    }

    /// The initial tree of a backend: all of its arena roots.
    pub fn initial<B: GeometryBackend>(backend: &B) -> Self {
        Self::new(backend.arena().roots())
    }

    fn get(&self, id: CellId) -> Status {
        self.status.get(id.index()).copied().unwrap_or(Status::Absent)
    }

    fn set(&mut self, id: CellId, s: Status) {
        if id.index() >= self.status.len() {
            self.status.resize(id.index() + 1, Status::Absent);
        }
        self.status[id.index()] = s;
    }

    pub fn roots(&self) -> &[CellId] {
        &self.roots
    }

    /// Leaves in increasing id order.
    pub fn leaves(&self) -> impl Iterator<Item = CellId> + '_ {
        self.leaves.iter().copied()
    }

    pub fn leaf_set(&self) -> &BTreeSet<CellId> {
        &self.leaves
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.get(id) != Status::Absent
    }

    pub fn is_leaf(&self, id: CellId) -> bool {
        self.get(id) == Status::Leaf
    }

    pub fn is_internal(&self, id: CellId) -> bool {
        self.get(id) == Status::Internal
    }

    /// All nodes in increasing id order.
    pub fn nodes(&self) -> impl Iterator<Item = CellId> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != Status::Absent)
            .map(|(i, _)| CellId::from_index(i))
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = CellId> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Status::Internal)
            .map(|(i, _)| CellId::from_index(i))
    }

    /// Number of subdivided patches.
    pub fn complexity(&self) -> usize {
        self.patch_history.len()
    }

    pub fn patch_history(&self) -> &[SubdivisionPatch] {
        &self.patch_history
    }

    /// Replaces every cell of `patch` by its children and records the patch.
    pub fn subdivide_patch<B: GeometryBackend>(
        &mut self,
        backend: &mut B,
        patch: &SubdivisionPatch,
    ) -> Result<Vec<Subdivided>> {
        if patch.is_empty() {
            return Err(Error::EmptyPatch);
        }
        if let Some(&c) = patch.cells().iter().find(|&&c| !self.is_leaf(c)) {
            return Err(Error::PatchNotInLeaves(c));
        }
        let mut out = Vec::with_capacity(patch.len());
        for &c in patch.cells() {
            out.push(self.split(backend, c)?);
        }
        self.patch_history.push(patch.clone());
        Ok(out)
    }

    /// Splits a single leaf without recording a patch. Meant for building
    /// arbitrary, possibly nonconforming trees; the complexity is untouched.
    pub fn split_leaf<B: GeometryBackend>(&mut self, backend: &mut B, cell: CellId) -> Result<Subdivided> {
        if !self.is_leaf(cell) {
            return Err(Error::PatchNotInLeaves(cell));
        }
        self.split(backend, cell)
    }

    fn split<B: GeometryBackend>(&mut self, backend: &mut B, cell: CellId) -> Result<Subdivided> {
        let children = backend.expand(cell)?;
        self.leaves.remove(&cell);
        self.set(cell, Status::Internal);
        for &ch in &children {
            self.set(ch, Status::Leaf);
            self.leaves.insert(ch);
        }
        self.nodes += children.len();
        Ok(Subdivided { parent: cell, children })
    }

    /// Builds the tree whose internal nodes are exactly `internal`, replaying
    /// the subdivision patches generation by generation. Fails if the nodes
    /// are not a union of subdivision patches, which is the case for
    /// nonconforming trees.
    pub fn from_internal_nodes<B, I>(backend: &mut B, roots: &[CellId], internal: I) -> Result<Self>
    where
        B: GeometryBackend,
        I: IntoIterator<Item = CellId>,
    {
        let mut pending: Vec<CellId> = internal.into_iter().collect();
        pending.sort_unstable_by_key(|&c| (backend.arena().generation(c), c));
        pending.dedup();
        let wanted: BTreeSet<CellId> = pending.iter().copied().collect();
        let mut tree = Self::new(roots);
        for c in pending {
            if tree.is_internal(c) {
                continue;
            }
            let patch = backend.subdivision_patch(c)?;
            if let Some(&m) = patch.cells().iter().find(|m| !wanted.contains(m)) {
                return Err(Error::NonConforming(format!(
                    "cell {c} is subdivided but its patch member {m} is not"
                )));
            }
            tree.subdivide_patch(backend, &patch)?;
        }
        Ok(tree)
    }

    /// Builds the full tree with the given leaves (all ancestors become
    /// internal nodes).
    pub fn from_leaves<B, I>(backend: &mut B, roots: &[CellId], leaves: I) -> Result<Self>
    where
        B: GeometryBackend,
        I: IntoIterator<Item = CellId>,
    {
        let mut internal = BTreeSet::new();
        for leaf in leaves {
            let arena = backend.arena();
            internal.extend(arena.lineage(leaf).skip(1));
        }
        Self::from_internal_nodes(backend, roots, internal)
    }
}

/// Recounts the patches covering the internal nodes of a conforming tree
/// straight from the node set, independently of the recorded history.
pub fn count_patches<B: GeometryBackend>(backend: &mut B, tree: &RefinementTree) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for c in tree.internal_nodes() {
        let patch = backend.subdivision_patch(c)?;
        seen.insert(patch.first());
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisect1d::Bisection1d;

    #[test]
    fn expansion_is_idempotent() {
        let mut b = Bisection1d::unit();
        let root = b.arena().roots()[0];
        let first = b.expand(root).unwrap();
        let again = b.expand(root).unwrap();
        assert_eq!(first, again);
        assert_eq!(first.len(), 2);
        for &c in &first {
            assert_eq!(b.arena().generation(c), 1);
            assert_eq!(b.arena().parent(c), Some(root));
        }
    }

    #[test]
    fn single_root_tree() {
        let b = Bisection1d::unit();
        let tree = RefinementTree::initial(&b);
        assert_eq!(tree.leaves().collect::<Vec<_>>(), b.arena().roots());
        assert_eq!(tree.complexity(), 0);
        assert_eq!(tree.num_nodes(), 1);
    }

    #[test]
    fn root_patch_gives_complexity_one() {
        let mut b = Bisection1d::unit();
        let mut tree = RefinementTree::initial(&b);
        let root = tree.roots()[0];
        let new = tree.subdivide_patch(&mut b, &SubdivisionPatch::singleton(root)).unwrap();
        assert_eq!(tree.complexity(), 1);
        assert_eq!(tree.num_leaves(), 2);
        assert_eq!(new[0].children.len(), 2);
        assert!(tree.is_internal(root));
    }

    #[test]
    fn patch_outside_leaves_is_rejected() {
        let mut b = Bisection1d::unit();
        let mut tree = RefinementTree::initial(&b);
        let root = tree.roots()[0];
        tree.subdivide_patch(&mut b, &SubdivisionPatch::singleton(root)).unwrap();
        let err = tree.subdivide_patch(&mut b, &SubdivisionPatch::singleton(root));
        assert!(matches!(err, Err(Error::PatchNotInLeaves(c)) if c == root));
        assert!(matches!(SubdivisionPatch::new(vec![]), Err(Error::EmptyPatch)));
    }

    #[test]
    fn rebuild_from_leaves_matches() {
        let mut b = Bisection1d::unit();
        let mut tree = RefinementTree::initial(&b);
        for _ in 0..5 {
            let c = tree.leaves().last().unwrap();
            tree.subdivide_patch(&mut b, &SubdivisionPatch::singleton(c)).unwrap();
        }
        let leaves: Vec<_> = tree.leaves().collect();
        let rebuilt = RefinementTree::from_leaves(&mut b, tree.roots(), leaves.clone()).unwrap();
        assert_eq!(rebuilt.leaves().collect::<Vec<_>>(), leaves);
        assert_eq!(rebuilt.complexity(), 5);
        assert_eq!(count_patches(&mut b, &tree).unwrap(), 5);
    }
}
