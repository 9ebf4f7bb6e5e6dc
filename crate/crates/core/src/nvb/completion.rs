use std::collections::{HashMap, HashSet};

use super::backend::NvbBackend;
use super::dyadic::DyadicPoint;
use crate::tree::{CellId, GeometryBackend, RefinementTree};
use crate::Result;

fn edge_midpoints(backend: &NvbBackend, cell: CellId) -> Result<[DyadicPoint; 3]> {
    let [a, b, c] = backend.triangle(cell).verts.map(|v| backend.vertices().point(v));
    Ok([
        DyadicPoint::midpoint(a, c)?,
        DyadicPoint::midpoint(a, b)?,
        DyadicPoint::midpoint(b, c)?,
    ])
}

/// Smallest conforming tree containing `tree`.
///
/// A leaf with a mesh vertex in the interior of one of its edges has to be
/// bisected in every conforming refinement, and the first vertex to appear
/// inside an edge is always its midpoint. Splitting exactly those leaves
/// until none is left therefore only performs forced splits, so the result
/// is the minimal conforming superset. The output carries a fresh patch
/// history in generation order.
pub fn complete(backend: &mut NvbBackend, tree: &RefinementTree) -> Result<RefinementTree> {
    let mut work = tree.clone();
    let mut vertices: HashSet<DyadicPoint> = HashSet::new();
    // edge midpoint -> leaves having it
    let mut by_midpoint: HashMap<DyadicPoint, Vec<CellId>> = HashMap::new();
    for leaf in work.leaves() {
        for v in backend.triangle(leaf).verts {
            vertices.insert(backend.vertices().point(v));
        }
    }
    let mut queue = Vec::new();
    for leaf in work.leaves() {
        for m in edge_midpoints(backend, leaf)? {
            by_midpoint.entry(m).or_default().push(leaf);
            if vertices.contains(&m) {
                queue.push(leaf);
            }
        }
    }
    while let Some(cell) = queue.pop() {
        if !work.is_leaf(cell) {
            continue;
        }
        let split = work.split_leaf(backend, cell)?;
        for &child in &split.children {
            for v in backend.triangle(child).verts {
                let p = backend.vertices().point(v);
                if vertices.insert(p) {
                    if let Some(waiting) = by_midpoint.get(&p) {
                        queue.extend(waiting.iter().copied().filter(|&c| work.is_leaf(c)));
                    }
                }
            }
            for m in edge_midpoints(backend, child)? {
                by_midpoint.entry(m).or_default().push(child);
                if vertices.contains(&m) {
                    queue.push(child);
                }
            }
        }
    }
    let internal: Vec<CellId> = work.internal_nodes().collect();
    let out = RefinementTree::from_internal_nodes(backend, tree.roots(), internal)?;
    debug_assert!(backend.is_conforming(&out));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nvb::domains::{build_domain_mesh, Domain};

    #[test]
    fn conforming_input_is_unchanged() {
        let mut b = NvbBackend::new(&build_domain_mesh(Domain::Square)).unwrap();
        let tree = RefinementTree::initial(&b);
        let done = complete(&mut b, &tree).unwrap();
        assert_eq!(done.leaves().collect::<Vec<_>>(), tree.leaves().collect::<Vec<_>>());
        assert_eq!(done.complexity(), 0);
    }

    #[test]
    fn single_hanging_node_pulls_in_mate() {
        let mut b = NvbBackend::new(&build_domain_mesh(Domain::LShape)).unwrap();
        let mut tree = RefinementTree::initial(&b);
        let r = tree.roots()[0];
        tree.split_leaf(&mut b, r).unwrap();
        let done = complete(&mut b, &tree).unwrap();
        assert!(b.is_conforming(&done));
        assert_eq!(done.num_leaves(), 8);
        assert_eq!(done.complexity(), 1);
        let again = complete(&mut b, &done).unwrap();
        assert_eq!(again.leaves().collect::<Vec<_>>(), done.leaves().collect::<Vec<_>>());
    }
}
