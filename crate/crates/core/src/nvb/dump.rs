//! Plain-text mesh and patch-history dumps.
//!
//! ```text
//! vertices <nv> cells <nc>
//! v <x> <y>
//! c <i0> <i1> <i2> <newest-slot>
//! ```
//!
//! Numbers are written with 17 significant digits; vertex indices are
//! 0-based. Cells are always written with the newest vertex in slot 1.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::backend::NvbBackend;
use super::dyadic::DyadicPoint;
use crate::fmt::g17;
use crate::tree::RefinementTree;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MeshDump {
    pub vertices: Vec<[f64; 2]>,
    /// `(a0, a1, a2)` with the newest vertex `a1`.
    pub cells: Vec<[usize; 3]>,
}

impl MeshDump {
    /// Leaves of `tree` in id order; vertices numbered by first use.
    pub fn from_tree(backend: &NvbBackend, tree: &RefinementTree) -> Self {
        let mut index = HashMap::new();
        let mut vertices = Vec::new();
        let mut cells = Vec::with_capacity(tree.num_leaves());
        for leaf in tree.leaves() {
            let tri = backend.triangle(leaf);
            cells.push(tri.verts.map(|v| {
                *index.entry(v).or_insert_with(|| {
                    vertices.push(backend.vertices().coords(v));
                    vertices.len() - 1
                })
            }));
        }
        Self { vertices, cells }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(48 * (self.vertices.len() + self.cells.len()));
        writeln!(s, "vertices {} cells {}", self.vertices.len(), self.cells.len()).unwrap();
        for [x, y] in &self.vertices {
            writeln!(s, "v {} {}", g17(*x), g17(*y)).unwrap();
        }
        for [a, b, c] in &self.cells {
            writeln!(s, "c {a} {b} {c} 1").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| Error::Parse { line: line + 1, message };
        let (n0, header) = lines.next().ok_or_else(|| err(0, "empty dump".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (nv, nc) = match h[..] {
            ["vertices", nv, "cells", nc] => (
                nv.parse::<usize>().map_err(|e| err(n0, e.to_string()))?,
                nc.parse::<usize>().map_err(|e| err(n0, e.to_string()))?,
            ),
            _ => return Err(err(n0, format!("bad header `{header}`"))),
        };
        let mut vertices = Vec::with_capacity(nv);
        let mut cells = Vec::with_capacity(nc);
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[..] {
                ["v", x, y] => {
                    if !cells.is_empty() {
                        return Err(err(n, "vertex after cells".into()));
                    }
                    let x = x.parse::<f64>().map_err(|e| err(n, e.to_string()))?;
                    let y = y.parse::<f64>().map_err(|e| err(n, e.to_string()))?;
                    vertices.push([x, y]);
                }
                ["c", a, b, c, slot] => {
                    let mut t = [0usize; 3];
                    for (k, s) in [a, b, c].into_iter().enumerate() {
                        t[k] = s.parse().map_err(|_| err(n, format!("bad vertex index `{s}`")))?;
                        if t[k] >= nv {
                            return Err(err(n, format!("vertex index {} out of range", t[k])));
                        }
                    }
                    let slot: usize = slot.parse().map_err(|_| err(n, format!("bad slot `{slot}`")))?;
                    if slot > 2 {
                        return Err(err(n, format!("newest-vertex slot {slot} not in 0..=2")));
                    }
                    // rotate so the newest vertex sits in the middle; the
                    // refinement edge (opposite it) is unchanged
                    t.rotate_left((slot + 2) % 3);
                    cells.push(t);
                }
                _ => return Err(err(n, format!("unrecognised line `{line}`"))),
            }
        }
        if vertices.len() != nv || cells.len() != nc {
            return Err(err(
                n0,
                format!("header announces {nv}/{nc} vertices/cells, found {}/{}", vertices.len(), cells.len()),
            ));
        }
        Ok(Self { vertices, cells })
    }

    pub fn area(&self) -> f64 {
        self.cells
            .iter()
            .map(|t| super::mesh::triangle_area(&t.map(|i| self.vertices[i])))
            .sum()
    }

    /// Whether no vertex sits at the midpoint of a cell edge. For bisection
    /// meshes a hanging vertex always shows up at some edge midpoint, so
    /// this decides conformity.
    pub fn has_no_hanging_vertices(&self) -> Result<bool> {
        let pts: Vec<DyadicPoint> = self
            .vertices
            .iter()
            .map(|&[x, y]| DyadicPoint::from_f64(x, y))
            .collect::<Result<_>>()?;
        let set: HashSet<DyadicPoint> = pts.iter().copied().collect();
        for t in &self.cells {
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                if set.contains(&DyadicPoint::midpoint(pts[t[i]], pts[t[j]])?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// One line per recorded patch, listing its cell ids.
pub fn patches_text(tree: &RefinementTree) -> String {
    let mut s = String::new();
    for patch in tree.patch_history() {
        let ids: Vec<String> = patch.cells().iter().map(|c| c.to_string()).collect();
        writeln!(s, "{}", ids.join(" ")).unwrap();
    }
    s
}
