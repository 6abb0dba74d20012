//! Scheme descriptors, demand profiles and load formulas shared by both
//! subpacketization families.
//!
//! A scheme places identical coded caches on every SBS of a partition group,
//! so both families reduce to one virtual SBS per group. The symmetric family
//! is the all-singletons partition.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rational::{binom, binom_q, Rational};
use crate::topology::{DemandVector, Topology};

/// How the files left after the first delivery step reach the SBSs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Approach {
    /// MBS sends random combinations of each remaining file.
    Shared1,
    /// MBS sends multi-round XOR multicasts.
    Shared2,
    /// Every group sends random combinations of the sub-pieces it owns.
    Side1,
    /// Sidelink XORs over regrouped users.
    Side2,
    /// Sidelink XORs over the round-robin groups, without regrouping.
    SideDirect,
}

impl Approach {
    pub const ALL: [Approach; 5] =
        [Approach::Shared1, Approach::Shared2, Approach::Side1, Approach::Side2, Approach::SideDirect];

    pub fn is_sidelink(self) -> bool {
        matches!(self, Approach::Side1 | Approach::Side2 | Approach::SideDirect)
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Approach::Shared1 => "shared1",
            Approach::Shared2 => "shared2",
            Approach::Side1 => "side1",
            Approach::Side2 => "side2",
            Approach::SideDirect => "side-direct",
        };
        f.write_str(s)
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared1" => Ok(Approach::Shared1),
            "shared2" => Ok(Approach::Shared2),
            "side1" => Ok(Approach::Side1),
            "side2" => Ok(Approach::Side2),
            "side-direct" | "direct" => Ok(Approach::SideDirect),
            _ => Err(Error::Parse(format!("unknown approach {s:?}"))),
        }
    }
}

/// Placement parameters plus a delivery approach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    pub partition: Partition,
    pub t: usize,
    pub approach: Approach,
}

impl Scheme {
    pub fn new(topology: &Topology, partition: Partition, t: usize, approach: Approach) -> Result<Self> {
        if topology.n() < topology.k_mbs() {
            return Err(Error::UseTrivialScheme);
        }
        if partition.h() != topology.h() {
            return Err(Error::Partition(format!(
                "partition covers {} SBSs, topology has {}",
                partition.h(),
                topology.h()
            )));
        }
        let g = partition.g();
        if t > g {
            return Err(Error::Domain(format!("t = {t} exceeds G = {g}")));
        }
        if approach.is_sidelink() && t == 0 {
            return Err(Error::SidelinkNeedsCaching);
        }
        let partition = partition.renormalized(topology.occupancy());
        Ok(Scheme { partition, t, approach })
    }

    pub fn symmetric(topology: &Topology, t: usize, approach: Approach) -> Result<Self> {
        Scheme::new(topology, Partition::singletons(topology.h()), t, approach)
    }

    pub fn g(&self) -> usize {
        self.partition.g()
    }

    pub fn is_symmetric(&self) -> bool {
        self.partition.groups().iter().all(|g| g.len() == 1)
    }

    /// Cache size `t (N - K_mbs) / G`.
    pub fn memory(&self, topology: &Topology) -> Rational {
        Rational::from(self.t) * Rational::from(topology.n() - topology.k_mbs()) / Rational::from(self.g())
    }

    /// Number of subfiles per file, `C(G, t)`.
    pub fn subpacketization(&self) -> BigInt {
        binom(self.g() as i64, self.t as i64)
    }

    /// Size units per file: one unit is a sub-piece (a subfile when `t <= 1`).
    pub fn units_per_file(&self) -> u64 {
        self.t.max(1) as u64 * crate::rational::binom_u64(self.g() as i64, self.t as i64)
    }

    /// Worst-case `(R_mbs, R_sbs)` of this approach over all demands.
    pub fn worst_case_loads(&self, topology: &Topology) -> (Rational, Rational) {
        let cap = topology.n() - topology.k_mbs();
        let k_mbs = Rational::from(topology.k_mbs());
        let distinct = Rational::from(cap.min(topology.k_sbs()));
        let clipped = self.partition.clipped_sums(topology.occupancy(), cap);
        let (g, t) = (self.g(), self.t);
        match self.approach {
            Approach::Shared1 => (k_mbs + distinct * shared1_fraction(g, t), Rational::zero()),
            Approach::Shared2 => (k_mbs + multiround_load(&clipped, t), Rational::zero()),
            Approach::Side1 => (k_mbs, distinct * side1_fraction(g, t)),
            Approach::Side2 => (k_mbs, regrouped_sidelink_load(&clipped, t)),
            Approach::SideDirect => (k_mbs, direct_sidelink_load(&clipped, t)),
        }
    }

    /// `(R_mbs(d), R_sbs(d))` for one demand vector.
    pub fn demand_loads(&self, topology: &Topology, d: &DemandVector) -> Result<(Rational, Rational)> {
        let profile = DemandProfile::new(topology, &self.partition, d)?;
        Ok(self.profile_loads(topology, &profile))
    }

    pub fn profile_loads(&self, topology: &Topology, profile: &DemandProfile) -> (Rational, Rational) {
        let k_mbs = Rational::from(topology.k_mbs());
        let remaining = Rational::from(profile.residual.len());
        let counts = profile.sorted_counts();
        let (g, t) = (self.g(), self.t);
        match self.approach {
            Approach::Shared1 => (k_mbs + remaining * shared1_fraction(g, t), Rational::zero()),
            Approach::Shared2 => (k_mbs + multiround_load(&counts, t), Rational::zero()),
            Approach::Side1 => (k_mbs, remaining * side1_fraction(g, t)),
            Approach::Side2 => (k_mbs, regrouped_sidelink_load(&counts, t)),
            Approach::SideDirect => (k_mbs, direct_sidelink_load(&counts, t)),
        }
    }
}

/// Downlink cost per remaining file when the MBS tops up each SBS: `(G - t) / G`.
pub fn shared1_fraction(g: usize, t: usize) -> Rational {
    Rational::new((g - t) as i64, g as i64)
}

/// Sidelink cost per remaining file when every group sends combinations of
/// its own sub-pieces: `G C(G-2, t-1) / (t C(G, t))`, which equals `(G - t) / (G - 1)`.
pub fn side1_fraction(g: usize, t: usize) -> Rational {
    assert!(t >= 1);
    let (g, t) = (g as i64, t as i64);
    Rational::from(binom(g - 2, t - 1) * g) / (Rational::from(t) * binom_q(g, t))
}

/// Multi-round XOR load `sum_r c_r C(G - r, t) / C(G, t)` for per-group counts
/// sorted non-increasingly.
pub fn multiround_load(counts: &[usize], t: usize) -> Rational {
    let g = counts.len() as i64;
    let t = t as i64;
    let num: BigInt = counts
        .iter()
        .enumerate()
        .map(|(r, &c)| binom(g - 1 - r as i64, t) * c)
        .sum();
    Rational::from(num) / binom_q(g, t)
}

/// Sum over `(t+1)`-subsets `S` of `x_1 + [x_{t+1} - x_1 + x_t]^+ / t`, divided by `C(G, t)`,
/// with `x_j` the `j`-th largest count in `S`. `counts` must be sorted non-increasingly.
pub fn regrouped_sidelink_load(counts: &[usize], t: usize) -> Rational {
    sidelink_sum(counts, t, |x1, xt, xt1, t| {
        let bracket = (xt1 as i64 - x1 as i64 + xt as i64).max(0);
        BigInt::from(t as i64 * x1 as i64 + bracket)
    })
}

/// Like [`regrouped_sidelink_load`] with per-subset term `x_1 + x_{t+1} / t`.
pub fn direct_sidelink_load(counts: &[usize], t: usize) -> Rational {
    sidelink_sum(counts, t, |x1, _xt, xt1, t| BigInt::from(t as i64 * x1 as i64 + xt1 as i64))
}

/// Evaluates `sum_S term(x_1, x_t, x_{t+1}) / (t C(G, t))` for sorted `counts`.
fn sidelink_sum(counts: &[usize], t: usize, term: impl Fn(usize, usize, usize, usize) -> BigInt) -> Rational {
    debug_assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    let g = counts.len();
    let num = positional_subset_sum(g, t, |a, b, c| term(counts[a], counts[b], counts[c], t));
    Rational::from(num) / (Rational::from(t) * binom_q(g as i64, t as i64))
}

/// `sum_S term(a, b, c)` over `(t+1)`-subsets `S` of `0..g`, where `a`, `b`, `c` are the
/// first, `t`-th and `(t+1)`-th smallest positions in `S` (`b = a` when `t = 1`).
/// Runs in `O(g^3)`: `S` is fixed by `a < b < c` plus `t - 2` free picks in `(a, b)`.
pub(crate) fn positional_subset_sum(g: usize, t: usize, term: impl Fn(usize, usize, usize) -> BigInt) -> BigInt {
    assert!(t >= 1, "sidelink delivery needs t >= 1");
    let mut num = BigInt::from(0);
    if t == 1 {
        for a in 0..g {
            for c in a + 1..g {
                num += term(a, a, c);
            }
        }
    } else {
        for a in 0..g {
            for b in a + 1..g {
                let ways = binom(b as i64 - a as i64 - 1, t as i64 - 2);
                if ways == BigInt::from(0) {
                    continue;
                }
                for c in b + 1..g {
                    num += &ways * term(a, b, c);
                }
            }
        }
    }
    num
}

/// One user slot of a virtual SBS: a distinct remaining file and the user that stands for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub file: usize,
    pub user: usize,
}

/// What a demand vector leaves to the second delivery step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandProfile {
    /// Whole files broadcast first: the downlink users' files, then the smallest
    /// SBS-only files, then (if still short of `K_mbs`) the smallest unrequested files.
    pub step1: Vec<usize>,
    /// Requested files not broadcast in the first step, ascending.
    pub residual: Vec<usize>,
    /// Per group, the distinct residual files requested there, in picking order.
    pub slots: Vec<Vec<Slot>>,
    /// Whether every requested file fits in the first step.
    pub single_step: bool,
}

impl DemandProfile {
    pub fn new(topology: &Topology, partition: &Partition, d: &DemandVector) -> Result<Self> {
        if d.files().len() != topology.k() {
            return Err(Error::Demand("demand length does not match topology".into()));
        }
        let d_mbs = d.d_mbs(topology);
        let d_sbs = d.d_sbs(topology);
        let single_step = d_mbs.len() + d_sbs.len() <= topology.k_mbs();
        let mut step1: Vec<usize> = d_mbs.iter().copied().collect();
        let extra = topology.k_mbs() - d_mbs.len();
        step1.extend(d_sbs.iter().copied().take(extra));
        let sent: BTreeSet<usize> = step1.iter().copied().collect();
        let mut filler = (1..=topology.n()).filter(|f| !sent.contains(f) && !d_sbs.contains(f));
        while step1.len() < topology.k_mbs() {
            step1.push(filler.next().expect("N >= K_mbs leaves enough files"));
        }
        let sent: BTreeSet<usize> = step1.iter().copied().collect();
        let residual: Vec<usize> = d_sbs.iter().copied().filter(|f| !sent.contains(f)).collect();

        let mut slots = Vec::with_capacity(partition.g());
        for group in partition.groups() {
            let mut users: Vec<usize> = group.iter().flat_map(|&h| topology.users_of(h)).collect();
            users.sort_unstable();
            let mut seen = BTreeSet::new();
            let mut group_slots: Vec<Slot> = Vec::new();
            for u in users {
                let f = d.get(u);
                if !sent.contains(&f) && seen.insert(f) {
                    group_slots.push(Slot { file: f, user: u });
                }
            }
            group_slots.reverse();
            slots.push(group_slots);
        }
        Ok(DemandProfile { step1, residual, slots, single_step })
    }

    /// Distinct residual files per group, in group order.
    pub fn counts(&self) -> Vec<usize> {
        self.slots.iter().map(Vec::len).collect()
    }

    pub fn sorted_counts(&self) -> Vec<usize> {
        let mut c = self.counts();
        c.sort_unstable_by(|a, b| b.cmp(a));
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn subsets(g: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << g) {
            if mask.count_ones() as usize == k {
                out.push((0..g).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
        out
    }

    fn brute_sidelink(counts: &[usize], t: usize, regroup: bool) -> Rational {
        let mut total = Rational::zero();
        for s in subsets(counts.len(), t + 1) {
            let mut x: Vec<usize> = s.iter().map(|&i| counts[i]).collect();
            x.sort_unstable_by(|a, b| b.cmp(a));
            let (x1, xt, xt1) = (x[0] as i64, x[t - 1] as i64, x[t] as i64);
            let extra = if regroup { (xt1 - x1 + xt).max(0) } else { xt1 };
            total += Rational::from(x1) + Rational::new(extra, t as i64);
        }
        total / binom_q(counts.len() as i64, t as i64)
    }

    fn brute_multiround(counts: &[usize], t: usize) -> Rational {
        let g = counts.len();
        let rounds = counts.iter().copied().max().unwrap_or(0);
        let mut msgs = 0i64;
        for j in 1..=rounds {
            for s in subsets(g, t + 1) {
                if s.iter().any(|&i| counts[i] >= j) {
                    msgs += 1;
                }
            }
        }
        Rational::from(msgs) / binom_q(g as i64, t as i64)
    }

    #[test]
    fn closed_forms_match_subset_enumeration() {
        let profiles: &[&[usize]] = &[&[2, 1, 1], &[3, 1, 0], &[5, 5, 2, 2, 1], &[4, 3, 3, 1, 1, 0], &[2, 2, 2, 2]];
        for counts in profiles {
            for t in 1..=counts.len() {
                assert_eq!(regrouped_sidelink_load(counts, t), brute_sidelink(counts, t, true), "{counts:?} t={t}");
                assert_eq!(direct_sidelink_load(counts, t), brute_sidelink(counts, t, false), "{counts:?} t={t}");
            }
            for t in 0..=counts.len() {
                assert_eq!(multiround_load(counts, t), brute_multiround(counts, t), "{counts:?} t={t}");
            }
        }
    }

    #[test]
    fn side1_fraction_simplifies() {
        for g in 2..8usize {
            for t in 1..=g {
                assert_eq!(side1_fraction(g, t), Rational::new((g - t) as i64, (g - 1) as i64));
            }
        }
    }

    #[test]
    fn three_sbs_profile() {
        let topo = Topology::new(2, vec![2, 1, 1], 6).unwrap();
        let d = DemandVector::new(&topo, vec![5, 6, 1, 2, 3, 4]).unwrap();
        let p = DemandProfile::new(&topo, &Partition::singletons(3), &d).unwrap();
        assert_eq!(p.step1, vec![5, 6]);
        assert_eq!(p.residual, vec![1, 2, 3, 4]);
        assert_eq!(p.counts(), vec![2, 1, 1]);
        assert_eq!(p.slots[0][0], Slot { file: 2, user: 3 });
        let side2 = Scheme::symmetric(&topo, 2, Approach::Side2).unwrap();
        assert_eq!(side2.profile_loads(&topo, &p), (q(2, 1), q(2, 3)));
        let direct = Scheme::symmetric(&topo, 2, Approach::SideDirect).unwrap();
        assert_eq!(direct.profile_loads(&topo, &p), (q(2, 1), q(5, 6)));
    }

    #[test]
    fn single_step_pads_broadcast() {
        let topo = Topology::new(2, vec![2, 1, 1], 6).unwrap();
        let d = DemandVector::new(&topo, vec![1, 1, 1, 1, 1, 1]).unwrap();
        let p = DemandProfile::new(&topo, &Partition::singletons(3), &d).unwrap();
        assert!(p.single_step);
        assert_eq!(p.step1, vec![1, 2]);
        assert!(p.residual.is_empty());
        for a in Approach::ALL {
            let s = Scheme::symmetric(&topo, 1, a).unwrap();
            assert_eq!(s.profile_loads(&topo, &p), (q(2, 1), q(0, 1)));
        }
    }

    #[test]
    fn validation() {
        let topo = Topology::new(2, vec![2, 1, 1], 6).unwrap();
        assert!(matches!(Scheme::symmetric(&topo, 0, Approach::Side2), Err(Error::SidelinkNeedsCaching)));
        assert!(Scheme::symmetric(&topo, 4, Approach::Shared2).is_err());
        let crowded = Topology::new(7, vec![1], 6).unwrap();
        assert!(matches!(Scheme::symmetric(&crowded, 0, Approach::Shared1), Err(Error::UseTrivialScheme)));
    }
}
