//! Initial triangulations and their newest-vertex labelings.
//!
//! A labeling picks one refinement edge per triangle. It is compatible when
//! every interior edge is the refinement edge of both adjacent triangles or
//! of neither; this is what makes the refinement-edge mate of every
//! descendant well defined.

use std::collections::BTreeMap;

use super::dyadic::{orient, strictly_inside_segment, DyadicPoint};
use crate::{Error, Result};

/// A labeled initial triangulation. Every triple is `(a0, a1, a2)` with the
/// newest vertex in the middle, indexing into `points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialMesh {
    pub points: Vec<DyadicPoint>,
    pub triangles: Vec<[usize; 3]>,
}

type Edge = (usize, usize);

fn edge(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

/// Local edge `k` of a triangle is the one opposite vertex `k`.
fn local_edge(t: &[usize; 3], k: usize) -> Edge {
    edge(t[(k + 1) % 3], t[(k + 2) % 3])
}

/// Incidence of every edge: `(triangle, local index)` pairs.
fn edge_map(points: &[DyadicPoint], triangles: &[[usize; 3]]) -> Result<BTreeMap<Edge, Vec<(usize, usize)>>> {
    let mut map: BTreeMap<Edge, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, t) in triangles.iter().enumerate() {
        if t.iter().any(|&v| v >= points.len()) {
            return Err(Error::Labeling(format!("triangle {i} references a missing vertex")));
        }
        if orient(points[t[0]], points[t[1]], points[t[2]]) == 0 {
            return Err(Error::Labeling(format!("triangle {i} is degenerate")));
        }
        for k in 0..3 {
            map.entry(local_edge(t, k)).or_default().push((i, k));
        }
    }
    for (e, inc) in &map {
        if inc.len() > 2 {
            return Err(Error::Labeling(format!("edge {e:?} is shared by {} triangles", inc.len())));
        }
        for (v, &p) in points.iter().enumerate() {
            if strictly_inside_segment(points[e.0], points[e.1], p) && triangles.iter().flatten().any(|&w| w == v) {
                return Err(Error::Labeling(format!("vertex {v} hangs on edge {e:?}")));
            }
        }
    }
    Ok(map)
}

fn labeled(points: &[DyadicPoint], t: &[usize; 3], k: usize) -> [usize; 3] {
    let (p, q) = (t[(k + 1) % 3], t[(k + 2) % 3]);
    let r = t[k];
    if orient(points[p], points[r], points[q]) > 0 {
        [p, r, q]
    } else {
        [q, r, p]
    }
}

fn squared_len(points: &[DyadicPoint], e: Edge) -> f64 {
    let (a, b) = (points[e.0].to_f64(), points[e.1].to_f64());
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Finds a compatible labeling by backtracking with forward checking.
/// Candidate refinement edges are tried longest first, so the result is
/// deterministic and favours the usual longest-edge choice.
pub fn compatible_initial_labeling(points: &[DyadicPoint], triangles: &[[usize; 3]]) -> Result<InitialMesh> {
    let map = edge_map(points, triangles)?;
    let n = triangles.len();
    // neighbours[t][k] = (u, j): local edge k of t is local edge j of u
    let mut neighbours = vec![[None; 3]; n];
    for inc in map.values() {
        if let [(t, k), (u, j)] = inc[..] {
            neighbours[t][k] = Some((u, j));
            neighbours[u][j] = Some((t, k));
        }
    }
    let candidates: Vec<Vec<usize>> = triangles
        .iter()
        .map(|t| {
            let mut ks = vec![0, 1, 2];
            ks.sort_by(|&a, &b| {
                squared_len(points, local_edge(t, b))
                    .total_cmp(&squared_len(points, local_edge(t, a)))
                    .then(a.cmp(&b))
            });
            ks
        })
        .collect();

    let consistent = |choice: &[Option<usize>], t: usize, c: usize| {
        neighbours[t].iter().enumerate().all(|(k, nb)| match nb {
            Some((u, j)) => match choice[*u] {
                Some(cu) => (c == k) == (cu == *j),
                None => true,
            },
            None => true,
        })
    };

    fn search(
        t: usize,
        choice: &mut Vec<Option<usize>>,
        candidates: &[Vec<usize>],
        neighbours: &[[Option<(usize, usize)>; 3]],
        consistent: &dyn Fn(&[Option<usize>], usize, usize) -> bool,
    ) -> bool {
        if t == choice.len() {
            return true;
        }
        for &c in &candidates[t] {
            if !consistent(choice, t, c) {
                continue;
            }
            choice[t] = Some(c);
            // forward check: every unassigned neighbour keeps some option
            let alive = neighbours[t].iter().flatten().all(|&(u, _)| {
                choice[u].is_some() || candidates[u].iter().any(|&cu| consistent(choice, u, cu))
            });
            if alive && search(t + 1, choice, candidates, neighbours, consistent) {
                return true;
            }
            choice[t] = None;
        }
        false
    }

    let mut choice = vec![None; n];
    if !search(0, &mut choice, &candidates, &neighbours, &consistent) {
        return Err(Error::Labeling(format!(
            "no compatible labeling exists for this {n}-triangle mesh"
        )));
    }
    let triangles = triangles
        .iter()
        .zip(&choice)
        .map(|(t, c)| labeled(points, t, c.unwrap()))
        .collect();
    Ok(InitialMesh { points: points.to_vec(), triangles })
}

/// Checks that the mesh is an edge-to-edge triangulation and that its
/// labeling is compatible.
pub fn check_compatibility(mesh: &InitialMesh) -> Result<()> {
    let map = edge_map(&mesh.points, &mesh.triangles)?;
    for (e, inc) in &map {
        if let [(t, _), (u, _)] = inc[..] {
            let rt = edge(mesh.triangles[t][0], mesh.triangles[t][2]) == *e;
            let ru = edge(mesh.triangles[u][0], mesh.triangles[u][2]) == *e;
            if rt != ru {
                return Err(Error::Labeling(format!(
                    "edge {e:?} is the refinement edge of triangle {} but not of triangle {}",
                    if rt { t } else { u },
                    if rt { u } else { t }
                )));
            }
        }
    }
    Ok(())
}

/// Edges of the mesh that belong to a single triangle.
pub fn boundary_edges(mesh: &InitialMesh) -> Vec<(DyadicPoint, DyadicPoint)> {
    let mut count: BTreeMap<Edge, usize> = BTreeMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            *count.entry(local_edge(t, k)).or_default() += 1;
        }
    }
    count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|(e, _)| (mesh.points[e.0], mesh.points[e.1]))
        .collect()
}
