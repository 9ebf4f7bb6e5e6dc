use std::collections::{BTreeSet, HashSet};

use crate::tree::{CellId, GeometryBackend, RefinementTree};
use crate::{Error, Result};

/// Default bound on the number of stored states.
pub const DEFAULT_STATE_CAP: usize = 10_000_000;

/// A conforming tree, identified by its sorted leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeshState {
    pub leaves: Vec<CellId>,
    pub complexity: usize,
}

/// Conforming trees grouped by complexity: `levels[n]` holds every state
/// with exactly `n` subdivided patches, sorted.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub levels: Vec<Vec<MeshState>>,
    /// Set when the state cap stopped the search. The last level is then
    /// incomplete and is not included in `levels`.
    pub truncated: Option<Truncation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub cap: usize,
    pub states: usize,
    /// Complexity of the level that was being built.
    pub complexity: usize,
}

impl From<Truncation> for Error {
    fn from(t: Truncation) -> Self {
        Error::StateCap { cap: t.cap, states: t.states, complexity: t.complexity }
    }
}

impl Enumeration {
    pub fn num_states(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Largest complexity that was enumerated completely.
    pub fn max_complexity(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn states(&self) -> impl Iterator<Item = &MeshState> {
        self.levels.iter().flatten()
    }
}

/// Patches contained in the leaves, each reported once.
fn available_patches<B: GeometryBackend>(backend: &mut B, leaves: &[CellId]) -> Result<Vec<Vec<CellId>>> {
    let mut out = Vec::new();
    for &c in leaves {
        let patch = backend.subdivision_patch(c)?;
        if patch.first() != c {
            // reported from its smallest member
            continue;
        }
        if patch.cells().iter().all(|m| leaves.binary_search(m).is_ok()) {
            out.push(patch.cells().to_vec());
        }
    }
    Ok(out)
}

/// Breadth-first enumeration over complexity. Every conforming tree can be
/// reached by subdividing patches that lie in the current leaves, so the
/// transitions are exactly those subdivisions; states reached along
/// different orders coincide as leaf sets.
///
/// Stops gracefully once more than `cap` states have been stored; the
/// result then carries the cap error and the completed levels.
pub fn enumerate_levels<B: GeometryBackend>(
    backend: &mut B,
    initial: &RefinementTree,
    n_max: usize,
    cap: usize,
) -> Result<Enumeration> {
    let start = MeshState { leaves: initial.leaves().collect(), complexity: initial.complexity() };
    let mut levels = vec![vec![start]];
    let mut total = 1;
    for n in 1..=n_max {
        let mut next: HashSet<Vec<CellId>> = HashSet::new();
        for state in levels.last().unwrap() {
            for patch in available_patches(backend, &state.leaves)? {
                let mut leaves: Vec<CellId> = state.leaves.iter().copied().filter(|c| !patch.contains(c)).collect();
                for &c in &patch {
                    leaves.extend(backend.expand(c)?);
                }
                leaves.sort_unstable();
                if next.insert(leaves) && total + next.len() > cap {
                    return Ok(Enumeration {
                        levels,
                        truncated: Some(Truncation { cap, states: total + next.len(), complexity: n }),
                    });
                }
            }
        }
        if next.is_empty() {
            break;
        }
        total += next.len();
        let mut level: Vec<MeshState> = next
            .into_iter()
            .map(|leaves| MeshState { leaves, complexity: initial.complexity() + n })
            .collect();
        level.sort_unstable();
        levels.push(level);
    }
    Ok(Enumeration { levels, truncated: None })
}

/// Every conforming tree with at most `n_max` patches beyond `initial`,
/// each exactly once.
pub fn enumerate_conforming<B: GeometryBackend>(
    backend: &mut B,
    initial: &RefinementTree,
    n_max: usize,
) -> Result<Enumeration> {
    let e = enumerate_levels(backend, initial, n_max, DEFAULT_STATE_CAP)?;
    match e.truncated {
        Some(t) => Err(t.into()),
        None => Ok(e),
    }
}

/// Independent count of conforming trees per complexity, used to check
/// [`enumerate_levels`]. It enumerates *all* full trees (conforming or not)
/// with at most `max_patch_size · n_max` internal nodes by splitting single
/// leaves, keyed by their internal-node sets, then keeps the conforming
/// ones and recounts their patches from scratch.
pub fn count_conforming_by_internal_nodes<B: GeometryBackend>(
    backend: &mut B,
    n_max: usize,
) -> Result<Vec<usize>> {
    let roots = backend.arena().roots().to_vec();
    let max_internal = backend.max_patch_size() * n_max;
    let mut seen: HashSet<BTreeSet<CellId>> = HashSet::new();
    let mut counts = vec![0usize; n_max + 1];
    visit(backend, &roots, &mut BTreeSet::new(), max_internal, &mut seen, &mut counts)?;
    Ok(counts)
}

fn visit<B: GeometryBackend>(
    backend: &mut B,
    roots: &[CellId],
    internal: &mut BTreeSet<CellId>,
    max_internal: usize,
    seen: &mut HashSet<BTreeSet<CellId>>,
    counts: &mut [usize],
) -> Result<()> {
    if !seen.insert(internal.clone()) {
        return Ok(());
    }
    let tree = RefinementTree::from_internal_nodes(backend, roots, internal.iter().copied());
    if let Ok(tree) = tree {
        if backend.is_conforming(&tree) {
            let n = crate::tree::count_patches(backend, &tree)?;
            if n < counts.len() {
                counts[n] += 1;
            }
        }
    }
    if internal.len() == max_internal {
        return Ok(());
    }
    // leaves of the current full tree
    let mut leaves: Vec<CellId> = roots.to_vec();
    for &c in internal.iter() {
        leaves.extend(backend.expand(c)?);
    }
    leaves.retain(|c| !internal.contains(c));
    for leaf in leaves {
        internal.insert(leaf);
        visit(backend, roots, internal, max_internal, seen, counts)?;
        internal.remove(&leaf);
    }
    Ok(())
}
