//! Achievable points of the symmetric and grouped placements on a small network.

use fogran::partition::Partition;
use fogran::scheme_asym::{asym_shared_point, PartitionStrategy};
use fogran::region::{achievable_points, curve_value, shared_curve, Family};
use fogran::scheme_sym::sym_points;
use fogran::Topology;

fn main() -> fogran::Result<()> {
    let topology = Topology::new(2, vec![2, 1, 1], 6)?;
    let (shared, side) = sym_points(&topology)?;
    println!("symmetric, downlink only:");
    shared.iter().for_each(|p| println!("  {p}"));
    println!("symmetric, sidelink:");
    side.iter().for_each(|p| println!("  {p}"));

    let phi = Partition::parse("1|2,3", &topology)?;
    let grouped = asym_shared_point(&topology, 2, 1, &PartitionStrategy::Given(phi))?;
    let envelope = shared_curve(&achievable_points(&topology, Family::Sym)?)?;
    let sym = curve_value(&envelope, &grouped.point.m).expect("inside the curve");
    println!("grouped {} vs symmetric envelope R_mbs = {sym} at the same M", grouped.point);
    Ok(())
}
