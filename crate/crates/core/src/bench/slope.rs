use crate::{Error, Result};

pub const MIN_SLOPE_POINTS: usize = 5;

/// `(cards, err)` pairs of a `cards,err_sqrt` table.
pub fn read_convergence_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "cards,err_sqrt" => {}
        Some((i, h)) => return Err(Error::Parse { line: i + 1, message: format!("unexpected header `{h}`") }),
        None => return Err(Error::Parse { line: 1, message: "empty file".into() }),
    }
    lines
        .map(|(i, l)| {
            let bad = || Error::Parse { line: i + 1, message: format!("expected `cards,err`, got `{l}`") };
            let (a, b) = l.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Least-squares slope of `ln err` against `ln cards` over the points with
/// `lo ≤ cards ≤ hi`.
pub fn fit_loglog_slope(points: &[(f64, f64)], lo: f64, hi: f64) -> Result<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|(c, e)| *c >= lo && *c <= hi && *c > 0.0 && *e > 0.0)
        .map(|(c, e)| (c.ln(), e.ln()))
        .collect();
    if xy.len() < MIN_SLOPE_POINTS {
        return Err(Error::InsufficientPoints { needed: MIN_SLOPE_POINTS, got: xy.len() });
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints { needed: 2, got: 1 });
    }
    Ok(sxy / sxx)
}
