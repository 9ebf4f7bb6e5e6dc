//! Unconstrained bisection of an interval.
//!
//! Every cell is its own subdivision patch, so any full tree is admissible
//! and the conformity-aware algorithm collapses to the classical tree
//! algorithm. This backend is the reference setting for comparing the two
//! marking strategies.

use crate::tree::{Arena, CellId, GeometryBackend, RefinementTree, SubdivisionPatch};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Clone, Debug)]
pub struct Bisection1d {
    arena: Arena<Interval>,
}

impl Bisection1d {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty interval");
        let mut arena = Arena::new();
        arena.add_root(Interval { lo, hi });
        Self { arena }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0)
    }
}

impl GeometryBackend for Bisection1d {
    type Geometry = Interval;
    type Shape = Interval;
    type Tracker = ();

    fn arena(&self) -> &Arena<Interval> {
        &self.arena
    }

    fn expand(&mut self, cell: CellId) -> Result<Vec<CellId>> {
        let ids = self.arena.expand_with(cell, |iv| {
            let m = iv.midpoint();
            Ok(vec![Interval { lo: iv.lo, hi: m }, Interval { lo: m, hi: iv.hi }])
        })?;
        Ok(ids.to_vec())
    }

    fn subdivision_patch(&mut self, cell: CellId) -> Result<SubdivisionPatch> {
        Ok(SubdivisionPatch::singleton(cell))
    }

    fn necessary_patch(&mut self, _tree: &RefinementTree, cell: CellId) -> Result<SubdivisionPatch> {
        Ok(SubdivisionPatch::singleton(cell))
    }

    fn is_conforming(&self, _tree: &RefinementTree) -> bool {
        true
    }

    fn max_patch_size(&self) -> usize {
        1
    }

    fn shape(&self, cell: CellId) -> Interval {
        *self.arena.geometry(cell)
    }

    fn measure(&self, cell: CellId) -> f64 {
        self.arena.geometry(cell).len()
    }

    fn start_tracking(&self, _tree: &RefinementTree) {}

    fn track_subdivision(&self, _tracker: &mut (), _removed: &[CellId], _added: &[CellId]) -> bool {
        true
    }
}

/// Squared L² distance of `x ↦ x²` from the constants on an interval.
///
/// With midpoint `c` and length `h` this is `c²h³/3 + h⁵/180`, evaluated in
/// that form to avoid cancellation on short intervals.
pub fn squared_l2_error_of_x_squared(iv: &Interval) -> f64 {
    let c = iv.midpoint();
    let h = iv.len();
    c * c * h * h * h / 3.0 + h.powi(5) / 180.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(iv: &Interval) -> f64 {
        // midpoint rule with many cells
        let n = 20_000;
        let h = iv.len() / n as f64;
        let xs: Vec<f64> = (0..n).map(|i| iv.lo + (i as f64 + 0.5) * h).collect();
        let mean = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        xs.iter().map(|x| (x * x - mean).powi(2)).sum::<f64>() * h
    }

    #[test]
    fn closed_form_matches_sampling() {
        for iv in [
            Interval { lo: 0.0, hi: 1.0 },
            Interval { lo: 0.25, hi: 0.5 },
            Interval { lo: 0.75, hi: 0.875 },
        ] {
            let exact = squared_l2_error_of_x_squared(&iv);
            let approx = brute_force(&iv);
            assert!((exact - approx).abs() <= 1e-6 * exact, "{exact} vs {approx}");
        }
        // on [0,1]: ∫x⁴ - (∫x²)² = 1/5 - 1/9
        let unit = squared_l2_error_of_x_squared(&Interval { lo: 0.0, hi: 1.0 });
        assert!((unit - 4.0 / 45.0).abs() < 1e-15);
    }

    #[test]
    fn complexity_is_leaves_minus_one() {
        let mut b = Bisection1d::unit();
        let mut tree = RefinementTree::initial(&b);
        for k in 0..30 {
            let c = tree.leaves().nth(k % tree.num_leaves()).unwrap();
            let patch = b.necessary_patch(&tree, c).unwrap();
            tree.subdivide_patch(&mut b, &patch).unwrap();
            assert_eq!(tree.complexity(), tree.num_leaves() - 1);
        }
        let total: f64 = tree.leaves().map(|c| b.measure(c)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
