//! Ratio between achievable and converse loads on a cache-size grid.

use fogran::oracle::{gap_report, grid};
use fogran::{q, Topology};

fn main() -> fogran::Result<()> {
    let topology = Topology::new(1, vec![4, 2, 1], 8)?;
    for row in gap_report(&topology, &grid(&q(8, 1), &q(1, 1))?)? {
        let ratio = row.ratio.map(|r| r.to_decimal()).unwrap_or_else(|| "-".into());
        println!("M={} {:?} corner=({}, {}) ratio={ratio} bound={} ok={}", row.m, row.kind, row.corner.0, row.corner.1, row.bound, row.holds);
    }
    Ok(())
}
