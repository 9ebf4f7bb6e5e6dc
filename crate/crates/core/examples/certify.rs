//! Exhaustive best errors for small complexities, and a check of the
//! near-best inequality for the conforming algorithm.

use conftree::indicators::{Algorithm, Greedy, StoppingRule};
use conftree::local_error::{H1Error, QuadratureSettings, Target, U2};
use conftree::nvb::{build_domain_mesh, NvbBackend};
use conftree::oracle::{certify_near_best, enumerate_conforming, SigmaTable};
use conftree::tree::{GeometryBackend, RefinementTree};

fn main() -> conftree::Result<()> {
    let depth = 6;
    let mut backend = NvbBackend::new(&build_domain_mesh(U2.domain()))?;
    let initial = RefinementTree::initial(&backend);
    let enumeration = enumerate_conforming(&mut backend, &initial, depth)?;
    println!("conforming trees per complexity: {:?}", enumeration.counts());

    let f = H1Error::new(U2, QuadratureSettings::default());
    let table = SigmaTable::from_enumeration(&backend, &f, &enumeration)?;
    let trace = Greedy::new(&mut backend, &f, Algorithm::Conforming)?.run(StoppingRule::MaxIterations(depth))?;
    let report = certify_near_best(&trace, &table, backend.max_patch_size());
    println!("{:>3} {:>12} {:>12} {:>12}", "N", "sigma_N", "err", "bound");
    for r in &report.rows {
        println!("{:>3} {:>12.5e} {:>12.5e} {:>12.5e}", r.big_n, table.sigma(r.big_n).unwrap(), r.err, r.bound);
    }
    println!("{}", report.summary());
    Ok(())
}
