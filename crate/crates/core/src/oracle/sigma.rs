use std::io::Write;

use super::enumerate::{Enumeration, MeshState};
use crate::indicators::{CompensatedSum, ErrorFunctional, LocalErrors, RunTrace};
use crate::tree::{CellId, GeometryBackend};
use crate::Result;

/// Best global error among conforming trees of complexity at most `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaEntry {
    pub n: usize,
    pub sigma: f64,
    pub argmin: MeshState,
}

#[derive(Clone, Debug, Default)]
pub struct SigmaTable {
    entries: Vec<SigmaEntry>,
}

/// `Σ err` over a leaf list, in the given order, with compensation.
pub fn state_error<B, F>(backend: &B, functional: &F, cache: &mut LocalErrors, leaves: &[CellId]) -> Result<f64>
where
    B: GeometryBackend,
    F: ErrorFunctional<B::Shape> + ?Sized,
{
    let mut sum = CompensatedSum::new();
    for &c in leaves {
        sum.add(cache.get(backend, functional, c)?);
    }
    Ok(sum.value())
}

impl SigmaTable {
    /// σ for every complexity covered by the enumeration. Ties go to the
    /// first state in sorted order.
    pub fn from_enumeration<B, F>(backend: &B, functional: &F, enumeration: &Enumeration) -> Result<Self>
    where
        B: GeometryBackend,
        F: ErrorFunctional<B::Shape> + ?Sized,
    {
        let mut cache = LocalErrors::new();
        let mut entries: Vec<SigmaEntry> = Vec::new();
        for (n, level) in enumeration.levels.iter().enumerate() {
            let mut best = entries.last().cloned();
            for state in level {
                let err = state_error(backend, functional, &mut cache, &state.leaves)?;
                if best.as_ref().is_none_or(|b| err < b.sigma) {
                    best = Some(SigmaEntry { n, sigma: err, argmin: state.clone() });
                }
            }
            let mut best = best.expect("level 0 holds the initial tree");
            best.n = n;
            entries.push(best);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[SigmaEntry] {
        &self.entries
    }

    pub fn sigma(&self, n: usize) -> Option<f64> {
        self.entries.get(n).map(|e| e.sigma)
    }

    /// Largest `n` with an entry.
    pub fn coverage(&self) -> Option<usize> {
        self.entries.len().checked_sub(1)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].sigma <= w[0].sigma)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,sigma_n,argmin_leaves")?;
        for e in &self.entries {
            let leaves: Vec<String> = e.argmin.leaves.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{},{}", e.n, crate::fmt::g17(e.sigma), leaves.join(" "))?;
        }
        Ok(())
    }
}

/// Relative slack allowed in the near-best inequality.
pub const CERTIFICATION_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationRow {
    pub big_n: usize,
    /// The `n` attaining the smallest bound.
    pub best_n: usize,
    pub bound: f64,
    pub err: f64,
    pub pass: bool,
}

impl CertificationRow {
    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            if self.err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.err / self.bound
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport {
    pub rows: Vec<CertificationRow>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Largest `err / bound` over all rows.
    pub fn tightest_ratio(&self) -> f64 {
        self.rows.iter().map(CertificationRow::ratio).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "N,best_n,bound,err,ratio,pass")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.big_n,
                r.best_n,
                crate::fmt::g17(r.bound),
                crate::fmt::g17(r.err),
                crate::fmt::g17(r.ratio()),
                r.pass
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let failed = self.rows.iter().filter(|r| !r.pass).count();
        format!(
            "{} of {} inequalities hold; tightest err/bound = {:.6}",
            self.rows.len() - failed,
            self.rows.len(),
            self.tightest_ratio()
        )
    }
}

/// `min_n (N + 1 + (P - 1) n) / (N - n + 1) · σ_n` over `n ≤ N` with table
/// coverage, and the minimising `n`.
pub fn near_best_bound(table: &SigmaTable, big_n: usize, patch_size: usize) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for n in 0..=big_n {
        let Some(sigma) = table.sigma(n) else { break };
        let factor = (big_n + 1 + (patch_size - 1) * n) as f64 / (big_n - n + 1) as f64;
        let bound = factor * sigma;
        if best.is_none_or(|(_, b)| bound < b) {
            best = Some((n, bound));
        }
    }
    best
}

/// Checks `Err(T_N) ≤ bound_N · (1 + slack)` for every row of the trace.
pub fn certify_near_best(trace: &RunTrace, table: &SigmaTable, patch_size: usize) -> CertificationReport {
    let rows = trace
        .rows()
        .iter()
        .filter_map(|row| {
            let (best_n, bound) = near_best_bound(table, row.complexity, patch_size)?;
            Some(CertificationRow {
                big_n: row.complexity,
                best_n,
                bound,
                err: row.err,
                pass: row.err <= bound * (1.0 + CERTIFICATION_SLACK),
            })
        })
        .collect();
    CertificationReport { rows }
}
