use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::nvb::dyadic::{strictly_inside_segment, DyadicPoint};
use crate::nvb::NvbBackend;
use crate::tree::{CellId, GeometryBackend, RefinementTree};
use crate::{Error, Result};

pub const DEFAULT_SEARCH_CAP: usize = 1_000_000;

fn leaves_of(backend: &mut NvbBackend, roots: &[CellId], internal: &BTreeSet<CellId>) -> Result<Vec<CellId>> {
    let mut out = roots.to_vec();
    for &c in internal {
        out.extend(backend.expand(c)?);
    }
    out.retain(|c| !internal.contains(c));
    Ok(out)
}

/// Leaves with some mesh vertex strictly inside one of their edges, found
/// by testing every vertex against every edge.
fn hanging_leaves(backend: &NvbBackend, leaves: &[CellId]) -> Vec<CellId> {
    let table = backend.vertices();
    let corners: Vec<[DyadicPoint; 3]> =
        leaves.iter().map(|&c| backend.triangle(c).verts.map(|v| table.point(v))).collect();
    let vertices: HashSet<DyadicPoint> = corners.iter().flatten().copied().collect();
    leaves
        .iter()
        .zip(&corners)
        .filter(|(_, t)| {
            (0..3).any(|i| {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                vertices.iter().any(|&p| strictly_inside_segment(a, b, p))
            })
        })
        .map(|(&c, _)| c)
        .collect()
}

/// Smallest conforming tree containing `tree`, by breadth-first search over
/// supersets in the number of extra bisections.
///
/// A leaf with a vertex inside one of its edges stays such a leaf in every
/// superset that does not bisect it, since vertices never disappear. So
/// every conforming superset bisects at least one of the current offenders,
/// and branching over those alone still reaches every minimal superset.
pub fn minimal_completion(backend: &mut NvbBackend, tree: &RefinementTree, cap: usize) -> Result<RefinementTree> {
    let roots = tree.roots().to_vec();
    let start: BTreeSet<CellId> = tree.internal_nodes().collect();
    let mut seen: HashSet<BTreeSet<CellId>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(internal) = queue.pop_front() {
        let leaves = leaves_of(backend, &roots, &internal)?;
        let offenders = hanging_leaves(backend, &leaves);
        if offenders.is_empty() {
            return RefinementTree::from_internal_nodes(backend, &roots, internal);
        }
        for c in offenders {
            let mut next = internal.clone();
            next.insert(c);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::SearchCap { cap });
                }
                queue.push_back(next);
            }
        }
    }
    unreachable!("uniform refinement is always conforming")
}
