//! On dyadic intervals every patch is a single cell, and the two
//! algorithms make exactly the same choices.

use conftree::bisect1d::{squared_l2_error_of_x_squared, Bisection1d, Interval};
use conftree::indicators::{Algorithm, Greedy, StoppingRule};

fn main() -> conftree::Result<()> {
    let f = |iv: &Interval| squared_l2_error_of_x_squared(iv);
    let mut traces = Vec::new();
    for alg in [Algorithm::Conforming, Algorithm::Simple] {
        let mut b = Bisection1d::unit();
        traces.push(Greedy::new(&mut b, &f, alg)?.run(StoppingRule::MaxIterations(200))?);
    }
    let same = traces[0].marked_cells().eq(traces[1].marked_cells());
    println!("identical marking sequences: {same}");
    let last = traces[0].last().unwrap();
    println!("after {} steps: {} intervals, err = {:e}", last.n, last.leaves, last.err);
    Ok(())
}
