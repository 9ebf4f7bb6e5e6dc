//! Completion of a nonconforming tree, checked against a brute-force
//! search for the smallest conforming superset.

use conftree::nvb::dump::MeshDump;
use conftree::nvb::{build_domain_mesh, complete, Domain, NvbBackend};
use conftree::oracle::{minimal_completion, DEFAULT_SEARCH_CAP};
use conftree::tree::{CellId, GeometryBackend, RefinementTree};

fn main() -> conftree::Result<()> {
    let mut b = NvbBackend::new(&build_domain_mesh(Domain::Square))?;
    let mut t = RefinementTree::initial(&b);
    // keep splitting the first leaf: a deep, badly nonconforming chain
    for _ in 0..6 {
        let c: CellId = t.leaves().next().unwrap();
        t.split_leaf(&mut b, c)?;
    }
    println!("split tree: {} nodes, conforming: {}", t.num_nodes(), b.is_conforming(&t));
    let c = complete(&mut b, &t)?;
    let m = minimal_completion(&mut b, &t, DEFAULT_SEARCH_CAP)?;
    println!("completion: {} nodes, brute-force minimum: {} nodes", c.num_nodes(), m.num_nodes());
    print!("{}", MeshDump::from_tree(&b, &c).to_text());
    Ok(())
}
