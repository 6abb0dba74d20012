//! Message list for one demand under the sidelink delivery with regrouping.

use fogran::delivery::plan;
use fogran::scheme::{Approach, Scheme};
use fogran::{DemandVector, Topology};

fn main() -> fogran::Result<()> {
    let topology = Topology::new(2, vec![2, 1, 1], 6)?;
    let scheme = Scheme::symmetric(&topology, 2, Approach::Side2)?;
    let d = DemandVector::new(&topology, vec![1, 2, 3, 4, 5, 6])?;
    let p = plan(&topology, &scheme, &d)?;
    println!("{}", serde_json::to_string_pretty(&p.to_json()).expect("json"));
    Ok(())
}
