//! Corner points of the outer bound for four SBSs at M = 5.

use fogran::converse::{converse_system, region_corners};
use fogran::{q, Topology};

fn main() -> fogran::Result<()> {
    let topology = Topology::new(4, vec![6, 4, 3, 3], 20)?;
    let system = converse_system(&topology, &q(5, 1))?;
    for ineq in &system.inequalities {
        println!("{} R_mbs + {} R_sbs >= {}   ({:?})", ineq.a, ineq.b, ineq.c, ineq.kind);
    }
    for (r_sbs, r_mbs) in region_corners(&system)? {
        println!("corner R_sbs = {r_sbs}, R_mbs = {r_mbs}");
    }
    Ok(())
}
