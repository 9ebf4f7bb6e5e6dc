use std::io::Write;

use crate::fmt::g17;
use crate::tree::CellId;

/// State of the run at iteration `n`, i.e. of the tree `T_n`, together with
/// the decision taken from it. The last row of a finished run describes the
/// final tree and has no marked cell.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub marked: Option<CellId>,
    pub patch_size: usize,
    /// Largest marking indicator over the leaves of `T_n`.
    pub t_n: f64,
    pub err: f64,
    pub leaves: usize,
    pub complexity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Every marking indicator vanished, so the global error is zero.
    IndicatorsVanished,
    RuleSatisfied,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    rows: Vec<TraceRow>,
    stop: Option<StopReason>,
}

impl RunTrace {
    pub(crate) fn new(rows: Vec<TraceRow>, stop: Option<StopReason>) -> Self {
        Self { rows, stop }
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `None` for a partial trace cut off by an iteration cap.
    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    pub fn marked_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.rows.iter().filter_map(|r| r.marked)
    }

    /// `(n, t_n, t_{n+1})` for every consecutive pair with `t_{n+1} > t_n`.
    pub fn monotonicity_violations(&self) -> Vec<(usize, f64, f64)> {
        self.rows
            .windows(2)
            .filter(|w| w[1].t_n > w[0].t_n)
            .map(|w| (w[0].n, w[0].t_n, w[1].t_n))
            .collect()
    }

    /// `(#leaves, √Err)` at every iteration divisible by `stride`.
    pub fn checkpoints(&self, stride: usize) -> Vec<(usize, f64)> {
        let stride = stride.max(1);
        self.rows
            .iter()
            .filter(|r| r.n % stride == 0)
            .map(|r| (r.leaves, r.err.sqrt()))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,marked_cell,patch_size,t_n,err_global,leaves,complexity")?;
        for r in &self.rows {
            let marked = r.marked.map(|c| c.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.n,
                marked,
                r.patch_size,
                g17(r.t_n),
                g17(r.err),
                r.leaves,
                r.complexity
            )?;
        }
        Ok(())
    }

    /// The same trace with every global error multiplied by `factor`.
    pub fn with_scaled_errors(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.err *= factor;
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Convergence table `cards,err_sqrt`.
pub fn write_convergence_csv<W: Write>(points: &[(usize, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "cards,err_sqrt")?;
    for (cards, e) in points {
        writeln!(w, "{},{}", cards, g17(*e))?;
    }
    Ok(())
}
