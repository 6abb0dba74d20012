//! Achievable points with SBS groups sharing cache contents.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::envelope::{evaluate, lower_convex_envelope};
use crate::error::{Error, Result};
use crate::partition::{enumerate_partitions, heuristic_partitions, partition_cap, Partition, RgsIter};
use crate::rational::{binom, Rational};
use crate::scheme::{multiround_load, regrouped_sidelink_load, Approach, Scheme};
use crate::topology::{MemoryLoadPoint, Topology};

/// How the partition is chosen.
#[derive(Clone, Debug)]
pub enum PartitionStrategy {
    /// Minimum over all `G`-way partitions.
    ExhaustiveMin,
    /// Minimum over a small heuristic pool; not guaranteed optimal.
    Heuristic,
    Given(Partition),
}

/// A point together with the partition that attains it.
#[derive(Clone, Debug, Serialize)]
pub struct AsymPoint {
    pub point: MemoryLoadPoint,
    #[serde(serialize_with = "crate::scheme_asym::ser_partition")]
    pub partition: Partition,
    pub exhaustive: bool,
}

pub(crate) fn ser_partition<S: serde::Serializer>(p: &Partition, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn check(topology: &Topology, g: usize, t: usize, min_t: usize) -> Result<usize> {
    let residual = topology
        .n()
        .checked_sub(topology.k_mbs())
        .ok_or(Error::UseTrivialScheme)?;
    if g == 0 || g > topology.h() {
        return Err(Error::Domain(format!("G = {g} outside 1..={}", topology.h())));
    }
    if t < min_t || t > g {
        return Err(Error::Domain(format!("t = {t} outside {min_t}..={g}")));
    }
    Ok(residual)
}

/// Minimizes `load(clipped group sums)` over the partitions allowed by `strategy`.
/// Ties go to the smallest restricted-growth encoding.
fn minimize(
    topology: &Topology,
    g: usize,
    strategy: &PartitionStrategy,
    load: impl Fn(&[usize]) -> Rational,
) -> Result<(Rational, Partition, bool)> {
    let cap = topology.n() - topology.k_mbs();
    let weights = topology.occupancy();
    let mut best: Option<(Rational, Vec<usize>, Partition)> = None;
    let mut consider = |p: Partition, memo: &mut HashMap<Vec<usize>, Rational>| {
        let sums = p.clipped_sums(weights, cap);
        let value = memo.entry(sums).or_insert_with_key(|s| load(s)).clone();
        let enc = p.encoding();
        let better = match &best {
            None => true,
            Some((v, e, _)) => value < *v || (value == *v && enc < *e),
        };
        if better {
            best = Some((value, enc, p));
        }
    };
    let mut memo = HashMap::new();
    let exhaustive = match strategy {
        PartitionStrategy::Given(p) => {
            if p.g() != g || p.h() != topology.h() {
                return Err(Error::Partition(format!("partition {p} is not a {g}-way partition of the SBSs")));
            }
            consider(p.renormalized(weights), &mut memo);
            false
        }
        PartitionStrategy::ExhaustiveMin => {
            for p in enumerate_partitions(topology, g)? {
                consider(p, &mut memo);
            }
            true
        }
        PartitionStrategy::Heuristic => {
            for p in heuristic_partitions(weights, g) {
                consider(p, &mut memo);
            }
            if g == topology.h() {
                consider(Partition::singletons(g).renormalized(weights), &mut memo);
            }
            false
        }
    };
    let (v, _, p) = best.expect("at least one partition");
    Ok((v, p, exhaustive))
}

/// Downlink-only point `(t (N - K_mbs)/G, K_mbs + min_partition multi-round load, 0)`.
pub fn asym_shared_point(topology: &Topology, g: usize, t: usize, strategy: &PartitionStrategy) -> Result<AsymPoint> {
    let residual = check(topology, g, t, 0)?;
    let (load, partition, exhaustive) = minimize(topology, g, strategy, |s| multiround_load(s, t))?;
    let m = Rational::from(t) * Rational::from(residual) / Rational::from(g);
    Ok(AsymPoint {
        point: MemoryLoadPoint::new(m, Rational::from(topology.k_mbs()) + load, Rational::zero()),
        partition,
        exhaustive,
    })
}

/// Sidelink point `(t (N - K_mbs)/G, K_mbs, min_partition regrouped sidelink load)`.
pub fn asym_sidelink_point(
    topology: &Topology,
    g: usize,
    t: usize,
    strategy: &PartitionStrategy,
) -> Result<AsymPoint> {
    if t == 0 {
        return Err(Error::SidelinkNeedsCaching);
    }
    let residual = check(topology, g, t, 1)?;
    let (load, partition, exhaustive) = minimize(topology, g, strategy, |s| regrouped_sidelink_load(s, t))?;
    let m = Rational::from(t) * Rational::from(residual) / Rational::from(g);
    Ok(AsymPoint {
        point: MemoryLoadPoint::new(m, Rational::from(topology.k_mbs()), load),
        partition,
        exhaustive,
    })
}

/// `((N - K_mbs)/H, K_mbs, min(N - K_mbs, K_sbs))`: every SBS relays combinations of its own pieces.
pub fn combination_relay_point(topology: &Topology) -> Result<MemoryLoadPoint> {
    let residual = topology.n().checked_sub(topology.k_mbs()).ok_or(Error::UseTrivialScheme)?;
    Ok(MemoryLoadPoint::new(
        Rational::new(residual as i64, topology.h() as i64),
        Rational::from(topology.k_mbs()),
        Rational::from(residual.min(topology.k_sbs())),
    ))
}

fn default_strategy(topology: &Topology) -> PartitionStrategy {
    if topology.h() > partition_cap() {
        PartitionStrategy::Heuristic
    } else {
        PartitionStrategy::ExhaustiveMin
    }
}

/// Every point of the family over all `G` and `t`: downlink points for `t = 0..=G`,
/// sidelink points for `t = 1..=G` plus the combination-relay point.
pub fn asym_points(topology: &Topology) -> Result<(Vec<MemoryLoadPoint>, Vec<MemoryLoadPoint>)> {
    let strategy = default_strategy(topology);
    let mut shared = Vec::new();
    let mut side = Vec::new();
    for g in 1..=topology.h() {
        for t in 0..=g {
            shared.push(asym_shared_point(topology, g, t, &strategy)?.point);
            if t >= 1 {
                side.push(asym_sidelink_point(topology, g, t, &strategy)?.point);
            }
        }
    }
    side.push(combination_relay_point(topology)?);
    Ok((shared, side))
}

/// Placement family whose subpacketization is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subpacketization {
    Sym { h: usize, t: usize },
    Asym { g: usize, t: usize },
}

/// Number of subfiles per file.
pub fn subpacketization_level(scheme: Subpacketization) -> BigInt {
    match scheme {
        Subpacketization::Sym { h, t } => binom(h as i64, t as i64),
        Subpacketization::Asym { g, t } => binom(g as i64, t as i64),
    }
}

/// Whether some `G`-way partition puts the most loaded SBS alone in the heaviest group.
pub fn has_isolated_leader(topology: &Topology, g: usize) -> bool {
    let h = topology.h();
    if g == 0 || g > h {
        return false;
    }
    if g == 1 {
        return h == 1;
    }
    let rest: Vec<usize> = topology.occupancy()[1..].to_vec();
    let l1 = topology.l(0);
    if h - 1 <= partition_cap() {
        RgsIter::new(h - 1, g - 1).any(|rgs| {
            let mut sums = vec![0; g - 1];
            for (i, &label) in rgs.iter().enumerate() {
                sums[label] += rest[i];
            }
            sums.iter().all(|&s| s <= l1)
        })
    } else {
        let p = crate::partition::balanced_assignment(&rest, g - 1, &[]);
        p.group_sums(&rest).iter().all(|&s| s <= l1)
    }
}

/// Outcome of comparing an achievable curve with the outer bound on a grid of cache sizes.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalityVerdict {
    pub equal: bool,
    pub from_m: Rational,
    pub checked: usize,
    /// First grid point where the curves differ, with (achievable, bound).
    pub witness: Option<(Rational, Rational, Rational)>,
}

/// Checks that the `G`-way downlink curve meets `K_mbs + L_1 (1 - M/(N - K_mbs))` for every
/// `M` on `[(1 - 1/G)(N - K_mbs), N - K_mbs]` with grid spacing `step`.
pub fn check_isolated_leader_optimality(topology: &Topology, g: usize, step: &Rational) -> Result<OptimalityVerdict> {
    let residual = topology.n().saturating_sub(topology.k_mbs());
    if residual < topology.l(0) || residual == 0 {
        return Err(Error::Inapplicable("requires N >= K_mbs + L_1".into()));
    }
    if !has_isolated_leader(topology, g) {
        return Err(Error::Inapplicable(format!("no {g}-way partition isolates the most loaded SBS")));
    }
    let strategy = default_strategy(topology);
    let points: Vec<(Rational, Rational)> = (0..=g)
        .map(|t| asym_shared_point(topology, g, t, &strategy).map(|p| (p.point.m, p.point.r_mbs)))
        .collect::<Result<_>>()?;
    let curve = lower_convex_envelope(&points)?;
    let res = Rational::from(residual);
    let from_m = (Rational::one() - Rational::new(1, g as i64)) * &res;
    let bound = |m: &Rational| Rational::from(topology.k_mbs()) + Rational::from(topology.l(0)) * (Rational::one() - m / &res);
    let mut m = from_m.clone();
    let mut checked = 0;
    let mut witness = None;
    while m <= res {
        let achieved = evaluate(&curve, &m).expect("grid inside curve range");
        let b = bound(&m);
        checked += 1;
        if achieved != b && witness.is_none() {
            witness = Some((m.clone(), achieved, b));
        }
        m += step;
    }
    Ok(OptimalityVerdict { equal: witness.is_none(), from_m, checked, witness })
}

/// Scheme descriptor for a fixed partition, convenient for planning and simulation.
pub fn asym_scheme(topology: &Topology, partition: Partition, t: usize, approach: Approach) -> Result<Scheme> {
    Scheme::new(topology, partition, t, approach)
}
