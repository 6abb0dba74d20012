//! Achievable points with one subfile per `t`-subset of SBSs.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scheme::{Approach, Scheme};
use crate::topology::{DemandVector, MemoryLoadPoint, Topology};

/// Symmetric placement with parameter `t`, i.e. cache size `t (N - K_mbs) / H`.
#[derive(Clone, Debug)]
pub struct SymSchemeParams {
    pub topology: Topology,
    pub t: usize,
}

impl SymSchemeParams {
    pub fn new(topology: &Topology, t: usize) -> Result<Self> {
        if topology.residual_files().is_none() {
            return Err(Error::UseTrivialScheme);
        }
        if t > topology.h() {
            return Err(Error::Domain(format!("t = {t} exceeds H = {}", topology.h())));
        }
        Ok(SymSchemeParams { topology: topology.clone(), t })
    }

    pub fn memory(&self) -> Rational {
        Rational::from(self.t) * Rational::from(self.topology.n() - self.topology.k_mbs())
            / Rational::from(self.topology.h())
    }

    pub fn scheme(&self, approach: Approach) -> Result<Scheme> {
        Scheme::symmetric(&self.topology, self.t, approach)
    }

    fn worst(&self, approach: Approach) -> (Rational, Rational) {
        self.scheme(approach)
            .expect("parameters validated")
            .worst_case_loads(&self.topology)
    }
}

/// Downlink-only point: the better of the two downlink approaches.
pub fn sym_shared_point(params: &SymSchemeParams) -> MemoryLoadPoint {
    let (a, _) = params.worst(Approach::Shared1);
    let (b, _) = params.worst(Approach::Shared2);
    MemoryLoadPoint::new(params.memory(), a.min(b), Rational::zero())
}

/// Sidelink point with `R_mbs = K_mbs`: the better of the two sidelink approaches.
pub fn sym_sidelink_point(params: &SymSchemeParams) -> Result<MemoryLoadPoint> {
    if params.t == 0 {
        return Err(Error::SidelinkNeedsCaching);
    }
    let (r_mbs, a) = params.worst(Approach::Side1);
    let (_, b) = params.worst(Approach::Side2);
    Ok(MemoryLoadPoint::new(params.memory(), r_mbs, a.min(b)))
}

/// Loads of one demand vector under the given approach.
pub fn sym_per_demand_loads(
    params: &SymSchemeParams,
    d: &DemandVector,
    approach: Approach,
) -> Result<(Rational, Rational)> {
    params.scheme(approach)?.demand_loads(&params.topology, d)
}

/// Every point of the family: downlink points for `t = 0..=H`, sidelink points for `t = 1..=H`.
pub fn sym_points(topology: &Topology) -> Result<(Vec<MemoryLoadPoint>, Vec<MemoryLoadPoint>)> {
    let mut shared = Vec::new();
    let mut side = Vec::new();
    for t in 0..=topology.h() {
        let p = SymSchemeParams::new(topology, t)?;
        shared.push(sym_shared_point(&p));
        if t >= 1 {
            side.push(sym_sidelink_point(&p)?);
        }
    }
    Ok((shared, side))
}
