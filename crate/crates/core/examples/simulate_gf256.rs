//! Runs placement and delivery over GF(256) and checks every user decodes.

use fogran::codec::simulate;
use fogran::partition::Partition;
use fogran::scheme::{Approach, Scheme};
use fogran::{DemandVector, Topology};

fn main() -> fogran::Result<()> {
    let topology = Topology::new(2, vec![2, 1, 1], 6)?;
    let d = DemandVector::new(&topology, vec![5, 6, 1, 2, 3, 4])?;
    let phi = Partition::parse("1|2,3", &topology)?;
    for scheme in [
        Scheme::symmetric(&topology, 2, Approach::Side2)?,
        Scheme::new(&topology, phi, 1, Approach::Shared2)?,
    ] {
        let tr = simulate(&topology, &scheme, &d, 42, 1)?;
        println!(
            "{} t={} B={}: decoded {:?}, R_mbs={}, R_sbs={}",
            scheme.approach, scheme.t, tr.b, tr.decoded, tr.r_mbs, tr.r_sbs
        );
    }
    Ok(())
}
