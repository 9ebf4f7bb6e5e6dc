use std::cmp::Reverse;
use std::collections::BTreeSet;

use ordered_float::OrderedFloat;

use super::extended::{marking_indicator, CompensatedSum, ExtendedReal};
use super::trace::{RunTrace, StopReason, TraceRow};
use crate::tree::{CellId, GeometryBackend, RefinementTree};
use crate::{Error, Result};

/// A local error functional on cell shapes.
pub trait ErrorFunctional<S> {
    fn local_error(&self, shape: &S) -> f64;
}

impl<S, F: Fn(&S) -> f64> ErrorFunctional<S> for F {
    fn local_error(&self, shape: &S) -> f64 {
        self(shape)
    }
}

/// Memoised local errors keyed by cell id. Local errors are static, so every
/// cell is evaluated at most once.
#[derive(Clone, Debug, Default)]
pub struct LocalErrors {
    values: Vec<f64>,
}

impl LocalErrors {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get<B, F>(&mut self, backend: &B, functional: &F, cell: CellId) -> Result<f64>
    where
        B: GeometryBackend,
        F: ErrorFunctional<B::Shape> + ?Sized,
    {
        if let Some(&v) = self.values.get(cell.index()) {
            if !v.is_nan() {
                return Ok(v);
            }
        }
        let v = functional.local_error(&backend.shape(cell));
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidLocalError { cell, value: v });
        }
        if cell.index() >= self.values.len() {
            self.values.resize(cell.index() + 1, f64::NAN);
        }
        self.values[cell.index()] = v;
        Ok(v)
    }

    pub fn cached(&self, cell: CellId) -> Option<f64> {
        self.values.get(cell.index()).copied().filter(|v| !v.is_nan())
    }
}

/// `Σ err` over the leaves, summed with compensation.
pub fn global_error<B, F>(backend: &B, functional: &F, tree: &RefinementTree) -> Result<f64>
where
    B: GeometryBackend,
    F: ErrorFunctional<B::Shape> + ?Sized,
{
    let mut cache = LocalErrors::new();
    let mut sum = CompensatedSum::new();
    for leaf in tree.leaves() {
        sum.add(cache.get(backend, functional, leaf)?);
    }
    Ok(sum.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Marks the leaf of largest marking indicator, subdivides a necessary
    /// patch for it and penalises the marked cell as long as it is not
    /// subdivided itself.
    Conforming,
    /// Same marking, but indicators are fixed when a cell is created from its
    /// parent's indicator; the marked cell is never penalised.
    Simple,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alg1" | "conforming" => Ok(Algorithm::Conforming),
            "alg2" | "simple" => Ok(Algorithm::Simple),
            _ => Err(Error::Config(format!("unknown algorithm `{s}` (expected alg1 or alg2)"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Conforming => "alg1",
            Algorithm::Simple => "alg2",
        })
    }
}

/// When to stop in addition to the vanishing of all indicators, which
/// always ends a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StoppingRule {
    MaxIterations(usize),
    ErrorBelow(f64),
    /// Only stop once every marking indicator is zero.
    IndicatorZero,
    MaxLeaves(usize),
}

/// Per-leaf indicator state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafState {
    pub err: f64,
    pub lambda: ExtendedReal,
    pub mu: f64,
}

impl LeafState {
    fn new(err: f64, lambda: ExtendedReal) -> Self {
        Self { err, lambda, mu: marking_indicator(err, lambda) }
    }
}

pub enum StepOutcome {
    Stepped(TraceRow),
    /// All indicators are zero; nothing left to do.
    Converged,
}

/// Default bound on the number of iterations for rules that are not
/// iteration counts themselves.
pub const DEFAULT_ITERATION_CAP: usize = 10_000_000;

/// A greedy refinement run over a geometry backend.
pub struct Greedy<'a, B: GeometryBackend, F: ?Sized> {
    backend: &'a mut B,
    functional: &'a F,
    algorithm: Algorithm,
    tree: RefinementTree,
    errors: LocalErrors,
    states: Vec<Option<LeafState>>,
    queue: BTreeSet<(Reverse<OrderedFloat<f64>>, CellId)>,
    err_sum: CompensatedSum,
    tracker: B::Tracker,
    rows: Vec<TraceRow>,
}

impl<'a, B, F> Greedy<'a, B, F>
where
    B: GeometryBackend,
    F: ErrorFunctional<B::Shape> + ?Sized,
{
    /// Starts from the initial mesh of the backend with `λ = 0`, `μ = err`.
    pub fn new(backend: &'a mut B, functional: &'a F, algorithm: Algorithm) -> Result<Self> {
        let tree = RefinementTree::initial(backend);
        Self::from_tree(backend, functional, algorithm, tree)
    }

    /// Starts from an arbitrary conforming tree, treating its leaves as
    /// fresh cells with zero penalisation.
    pub fn from_tree(backend: &'a mut B, functional: &'a F, algorithm: Algorithm, tree: RefinementTree) -> Result<Self> {
        if !backend.is_conforming(&tree) {
            return Err(Error::NonConforming("initial tree".into()));
        }
        let tracker = backend.start_tracking(&tree);
        let mut run = Self {
            backend,
            functional,
            algorithm,
            tree,
            errors: LocalErrors::new(),
            states: Vec::new(),
            queue: BTreeSet::new(),
            err_sum: CompensatedSum::new(),
            tracker,
            rows: Vec::new(),
        };
        let leaves: Vec<CellId> = run.tree.leaves().collect();
        for leaf in leaves {
            let err = run.err(leaf)?;
            run.err_sum.add(err);
            run.insert(leaf, LeafState::new(err, ExtendedReal::ZERO));
        }
        Ok(run)
    }

    fn err(&mut self, cell: CellId) -> Result<f64> {
        self.errors.get(&*self.backend, self.functional, cell)
    }

    fn insert(&mut self, cell: CellId, state: LeafState) {
        if cell.index() >= self.states.len() {
            self.states.resize(cell.index() + 1, None);
        }
        self.states[cell.index()] = Some(state);
        self.queue.insert((Reverse(OrderedFloat(state.mu)), cell));
    }

    fn remove(&mut self, cell: CellId) -> LeafState {
        let state = self.states[cell.index()].take().expect("leaf state");
        self.queue.remove(&(Reverse(OrderedFloat(state.mu)), cell));
        state
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn tree(&self) -> &RefinementTree {
        &self.tree
    }

    pub fn backend(&self) -> &B {
        self.backend
    }

    pub fn iteration(&self) -> usize {
        self.rows.len()
    }

    pub fn leaf_state(&self, cell: CellId) -> Option<&LeafState> {
        self.states.get(cell.index()).and_then(|s| s.as_ref())
    }

    pub fn leaf_states(&self) -> impl Iterator<Item = (CellId, &LeafState)> + '_ {
        self.tree.leaves().map(|c| (c, self.leaf_state(c).expect("leaf state")))
    }

    /// Largest marking indicator and the smallest cell attaining it.
    pub fn argmax(&self) -> Option<(f64, CellId)> {
        self.queue.first().map(|&(Reverse(OrderedFloat(mu)), c)| (mu, c))
    }

    pub fn max_indicator(&self) -> f64 {
        self.argmax().map_or(0.0, |(mu, _)| mu)
    }

    pub fn global_error(&self) -> f64 {
        self.err_sum.value()
    }

    /// Compares the stored indicators with a recomputation from `(err, λ)`
    /// and the priority queue with a linear scan. Returns the first
    /// mismatching cell.
    pub fn audit(&self) -> Option<CellId> {
        let mut best: Option<(f64, CellId)> = None;
        for (c, s) in self.leaf_states() {
            if s.mu != marking_indicator(s.err, s.lambda) {
                return Some(c);
            }
            if best.map_or(true, |(m, _)| s.mu > m) {
                best = Some((s.mu, c));
            }
        }
        if best != self.argmax() || self.queue.len() != self.tree.num_leaves() {
            return best.map(|(_, c)| c).or(Some(CellId::from_index(0)));
        }
        None
    }

    fn row(&self, marked: Option<CellId>, patch_size: usize) -> TraceRow {
        TraceRow {
            n: self.rows.len(),
            marked,
            patch_size,
            t_n: self.max_indicator(),
            err: self.global_error(),
            leaves: self.tree.num_leaves(),
            complexity: self.tree.complexity(),
        }
    }

    /// One pass of the loop body.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let Some((t, marked)) = self.argmax() else {
            return Ok(StepOutcome::Converged);
        };
        if t == 0.0 {
            return Ok(StepOutcome::Converged);
        }
        let patch = self.backend.necessary_patch(&self.tree, marked)?;
        let row = self.row(Some(marked), patch.len());

        if self.algorithm == Algorithm::Conforming {
            let s = self.remove(marked);
            let lambda = ExtendedReal::recip_of(s.err) + s.lambda;
            self.insert(marked, LeafState::new(s.err, lambda));
        }

        let subdivided = self.tree.subdivide_patch(self.backend, &patch)?;
        let mut added = Vec::with_capacity(2 * subdivided.len());
        for sub in &subdivided {
            let parent = self.remove(sub.parent);
            let lambda = match self.algorithm {
                Algorithm::Conforming => parent.lambda,
                Algorithm::Simple => ExtendedReal::recip_of(parent.err) + parent.lambda,
            };
            for &child in &sub.children {
                let err = self.err(child)?;
                self.err_sum.add(err);
                self.insert(child, LeafState::new(err, lambda));
                added.push(child);
            }
            self.err_sum.add(-parent.err);
        }
        let removed: Vec<CellId> = subdivided.iter().map(|s| s.parent).collect();
        if !self.backend.track_subdivision(&mut self.tracker, &removed, &added) {
            return Err(Error::NonConforming(format!(
                "mesh after iteration {} has a hanging vertex",
                row.n
            )));
        }
        self.rows.push(row.clone());
        Ok(StepOutcome::Stepped(row))
    }

    fn satisfied(&self, rule: StoppingRule) -> bool {
        match rule {
            StoppingRule::MaxIterations(n) => self.iteration() >= n,
            StoppingRule::ErrorBelow(tol) => self.global_error() <= tol,
            StoppingRule::IndicatorZero => false,
            StoppingRule::MaxLeaves(n) => self.tree.num_leaves() >= n,
        }
    }

    /// The trace so far, closed by a row for the current tree.
    pub fn trace(&self, stop: Option<StopReason>) -> RunTrace {
        let mut rows = self.rows.clone();
        rows.push(self.row(None, 0));
        RunTrace::new(rows, stop)
    }

    pub fn run(&mut self, rule: StoppingRule) -> Result<RunTrace> {
        self.run_with_cap(rule, DEFAULT_ITERATION_CAP)
    }

    /// Runs until the rule holds or the indicators vanish. Hitting `cap`
    /// iterations first is an error carrying the partial trace.
    pub fn run_with_cap(&mut self, rule: StoppingRule, cap: usize) -> Result<RunTrace> {
        loop {
            if self.max_indicator() == 0.0 {
                return Ok(self.trace(Some(StopReason::IndicatorsVanished)));
            }
            if self.satisfied(rule) {
                return Ok(self.trace(Some(StopReason::RuleSatisfied)));
            }
            if self.iteration() >= cap {
                return Err(Error::IterationCap { cap, trace: Box::new(self.trace(None)) });
            }
            self.step()?;
        }
    }

    pub fn into_tree(self) -> RefinementTree {
        self.tree
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisect1d::{squared_l2_error_of_x_squared, Bisection1d, Interval};

    fn x_squared(iv: &Interval) -> f64 {
        squared_l2_error_of_x_squared(iv)
    }

    #[test]
    fn first_step_penalises_children_by_root_error() {
        let mut b = Bisection1d::unit();
        let f = x_squared;
        let mut run = Greedy::new(&mut b, &f, Algorithm::Conforming).unwrap();
        let root = run.tree().roots()[0];
        let e0 = run.leaf_state(root).unwrap().err;
        run.step().unwrap();
        for (_, s) in run.leaf_states() {
            assert_eq!(s.lambda, ExtendedReal::new(1.0 / e0));
        }
    }

    #[test]
    fn zero_error_stops_immediately() {
        let mut b = Bisection1d::unit();
        let f = |_: &Interval| 0.0;
        let mut run = Greedy::new(&mut b, &f, Algorithm::Conforming).unwrap();
        let trace = run.run(StoppingRule::IndicatorZero).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.stop_reason(), Some(StopReason::IndicatorsVanished));
    }

    #[test]
    fn cap_returns_partial_trace() {
        let mut b = Bisection1d::unit();
        let f = x_squared;
        let mut run = Greedy::new(&mut b, &f, Algorithm::Simple).unwrap();
        match run.run_with_cap(StoppingRule::IndicatorZero, 7) {
            Err(Error::IterationCap { cap: 7, trace }) => {
                assert_eq!(trace.len(), 8);
                assert_eq!(trace.stop_reason(), None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_error_is_rejected() {
        let mut b = Bisection1d::unit();
        let f = |_: &Interval| -1.0;
        assert!(matches!(
            Greedy::new(&mut b, &f, Algorithm::Conforming),
            Err(Error::InvalidLocalError { .. })
        ));
    }
}
