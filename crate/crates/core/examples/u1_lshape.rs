//! Conforming greedy refinement for the corner singularity on the L-shape.
//! Prints the convergence history and the fitted rate.

use conftree::bench::fit_loglog_slope;
use conftree::indicators::{Algorithm, Greedy, StoppingRule};
use conftree::local_error::{H1Error, QuadratureSettings, Target, U1};
use conftree::nvb::{build_domain_mesh, NvbBackend};

fn main() -> conftree::Result<()> {
    let mut backend = NvbBackend::new(&build_domain_mesh(U1.domain()))?;
    let f = H1Error::new(U1, QuadratureSettings::default());
    let mut run = Greedy::new(&mut backend, &f, Algorithm::Conforming)?;
    let trace = run.run(StoppingRule::MaxLeaves(20_000))?;

    println!("{:>8} {:>12}", "leaves", "sqrt(err)");
    let points = trace.checkpoints(10);
    for &(cards, e) in points.iter().step_by(points.len() / 15 + 1) {
        println!("{cards:>8} {e:>12.4e}");
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(c, e)| (c as f64, e)).collect();
    println!("slope over [1e2, 2e4]: {:.3}", fit_loglog_slope(&pts, 1e2, 2e4)?);
    println!("max marking indicator never increased: {}", trace.monotonicity_violations().is_empty());
    Ok(())
}
