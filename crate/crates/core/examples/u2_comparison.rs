//! Both algorithms on the circular-kink target, compared at equal
//! iteration counts.

use conftree::indicators::{Algorithm, Greedy, StoppingRule};
use conftree::local_error::{H1Error, QuadratureSettings, Target, U2};
use conftree::nvb::{build_domain_mesh, NvbBackend};

fn main() -> conftree::Result<()> {
    let f = H1Error::new(U2, QuadratureSettings::default());
    let mut traces = Vec::new();
    for alg in [Algorithm::Conforming, Algorithm::Simple] {
        let mut backend = NvbBackend::new(&build_domain_mesh(U2.domain()))?;
        traces.push(Greedy::new(&mut backend, &f, alg)?.run(StoppingRule::MaxIterations(5000))?);
    }
    println!("{:>6} {:>8} {:>12} {:>8} {:>12}", "n", "alg1 #T", "alg1 err", "alg2 #T", "alg2 err");
    for n in [0, 10, 50, 100, 500, 1000, 2000, 5000] {
        let (a, b) = (&traces[0].rows()[n], &traces[1].rows()[n]);
        println!("{n:>6} {:>8} {:>12.4e} {:>8} {:>12.4e}", a.leaves, a.err, b.leaves, b.err);
    }
    Ok(())
}
