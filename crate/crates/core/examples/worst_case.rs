//! Brute-force worst-case demand compared with the closed-form load.

use fogran::oracle::{worst_case_demand, DemandSpace, DEFAULT_DEMAND_CAP};
use fogran::scheme::{Approach, Scheme};
use fogran::Topology;

fn main() -> fogran::Result<()> {
    let topology = Topology::new(1, vec![2, 1], 4)?;
    for approach in Approach::ALL {
        let t = 1;
        let scheme = Scheme::symmetric(&topology, t, approach)?;
        let worst = worst_case_demand(&topology, &scheme, DemandSpace::Raw, DEFAULT_DEMAND_CAP)?;
        let (r_mbs, r_sbs) = scheme.worst_case_loads(&topology);
        println!(
            "{approach}: searched ({}, {}) over {} demands, closed form ({r_mbs}, {r_sbs}), argmax {:?}",
            worst.r_mbs, worst.r_sbs, worst.demands_checked, worst.demand
        );
    }
    Ok(())
}
