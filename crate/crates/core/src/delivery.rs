//! Explicit delivery plans: ordered, sized messages for one demand vector.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{binom_u64, Rational};
use crate::scheme::{Approach, DemandProfile, Scheme};
use crate::topology::{DemandVector, Topology};

/// A subfile `F_{file, subset}`; `subset` holds 1-based group ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubfileRef {
    pub file: usize,
    pub subset: Vec<usize>,
}

/// The piece of `F_{file, subset}` owned by group `owner` (a member of `subset`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubpieceRef {
    pub file: usize,
    pub subset: Vec<usize>,
    pub owner: usize,
}

/// Symbols that a random-combination message mixes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "scope")]
pub enum RlcScope {
    /// Every symbol of a file.
    File { file: usize },
    /// Pieces `F_{file, W, group}` over all `W` containing `group` (1-based).
    OwnedSubpieces { file: usize, group: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Payload {
    WholeFile { file: usize },
    Rlc { mix: RlcScope },
    XorSubfiles { terms: Vec<SubfileRef> },
    XorSubpieces { terms: Vec<SubpieceRef> },
}

/// One transmission. `source` is 0 for the MBS and `h` (1-based) for SBS `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub source: usize,
    pub payload: Payload,
    /// Length in plan units (see [`DeliveryPlan::units_per_file`]).
    pub units: u64,
}

#[derive(Clone, Debug)]
pub struct DeliveryPlan {
    pub scheme: Scheme,
    pub demand: DemandVector,
    pub profile: DemandProfile,
    pub step1: Vec<Message>,
    pub step2: Vec<Message>,
    /// Units in one file; a unit is one sub-piece, i.e. `1 / (max(t,1) C(G,t))` of a file.
    pub units_per_file: u64,
    h: usize,
}

impl DeliveryPlan {
    pub fn size(&self, m: &Message) -> Rational {
        Rational::new(m.units as i64, self.units_per_file as i64)
    }

    fn total(&self, pred: impl Fn(&Message) -> bool) -> Rational {
        let units: u64 = self.step1.iter().chain(&self.step2).filter(|m| pred(m)).map(|m| m.units).sum();
        Rational::new(units as i64, self.units_per_file as i64)
    }

    pub fn r_mbs(&self) -> Rational {
        self.total(|m| m.source == 0)
    }

    pub fn r_sbs(&self) -> Rational {
        self.total(|m| m.source != 0)
    }

    /// Sidelink load sent by each SBS, indexed by 0-based SBS.
    pub fn per_sbs_loads(&self) -> Vec<Rational> {
        (1..=self.h).map(|h| self.total(|m| m.source == h)).collect()
    }

    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.step1.iter().chain(&self.step2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let render = |msgs: &[Message]| -> Vec<serde_json::Value> {
            msgs.iter()
                .map(|m| {
                    let mut v = serde_json::to_value(m).expect("plain data");
                    v["size"] = serde_json::Value::String(self.size(m).to_string());
                    v
                })
                .collect()
        };
        serde_json::json!({
            "partition": self.scheme.partition.to_string(),
            "t": self.scheme.t,
            "approach": self.scheme.approach.to_string(),
            "step1": render(&self.step1),
            "step2": render(&self.step2),
            "R_mbs": self.r_mbs().to_string(),
            "R_sbs": self.r_sbs().to_string(),
            "per_sbs": self.per_sbs_loads().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Splits the users of the groups in `subset` into multicast groups.
///
/// `counts[g]` is the number of user slots of group `g`; slot `(g, j)` is the
/// `j`-th of them. Initial groups take one slot per group per round; with
/// `regroup`, the slots of the group with the `(t+1)`-th largest count are moved
/// from the first rounds into the rounds where the `t`-th largest has run out.
pub fn build_groups(subset: &[usize], counts: &[usize], t: usize, regroup: bool) -> Result<Vec<Vec<(usize, usize)>>> {
    if subset.len() != t + 1 {
        return Err(Error::Domain(format!("subset has {} groups, expected t + 1 = {}", subset.len(), t + 1)));
    }
    let mut v: Vec<usize> = subset.to_vec();
    v.sort_by(|&x, &y| counts[y].cmp(&counts[x]).then(x.cmp(&y)));
    let a = counts[v[0]];
    let b = counts[v[t - 1]];
    let c = counts[v[t]];
    let mut groups: Vec<Vec<(usize, usize)>> = (0..a)
        .map(|j| v.iter().filter(|&&g| counts[g] > j).map(|&g| (g, j)).collect())
        .collect();
    if regroup {
        let moves = if c <= a - b { c } else { a - b };
        let last = v[t];
        for gi in 0..moves {
            let pos = groups[gi].iter().position(|&(g, _)| g == last).expect("round has the slot");
            let slot = groups[gi].remove(pos);
            groups[b + gi].push(slot);
        }
    }
    Ok(groups)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn without(subset: &[usize], g: usize) -> Vec<usize> {
    subset.iter().filter(|&&x| x != g).map(|&x| x + 1).collect()
}

/// Builds the plan of `scheme` for demand `d`.
pub fn plan(topology: &Topology, scheme: &Scheme, d: &DemandVector) -> Result<DeliveryPlan> {
    let profile = DemandProfile::new(topology, &scheme.partition, d)?;
    let g = scheme.g();
    let t = scheme.t;
    let per_file = scheme.units_per_file();
    let subfile = t.max(1) as u64;
    let leaders = scheme.partition.leaders();
    let counts = profile.counts();

    let step1 = profile
        .step1
        .iter()
        .map(|&file| Message { source: 0, payload: Payload::WholeFile { file }, units: per_file })
        .collect();

    let mut step2 = Vec::new();
    match scheme.approach {
        Approach::Shared1 => {
            let units = binom_u64(g as i64 - 1, t as i64) * subfile;
            if units > 0 {
                for &file in &profile.residual {
                    step2.push(Message { source: 0, payload: Payload::Rlc { mix: RlcScope::File { file } }, units });
                }
            }
        }
        Approach::Shared2 => {
            let rounds = counts.iter().copied().max().unwrap_or(0);
            let all = subsets(g, t + 1);
            for j in 0..rounds {
                for s in &all {
                    let terms: Vec<SubfileRef> = s
                        .iter()
                        .filter(|&&gi| counts[gi] > j)
                        .map(|&gi| SubfileRef { file: profile.slots[gi][j].file, subset: without(s, gi) })
                        .collect();
                    if !terms.is_empty() {
                        step2.push(Message { source: 0, payload: Payload::XorSubfiles { terms }, units: subfile });
                    }
                }
            }
        }
        Approach::Side1 => {
            let units = binom_u64(g as i64 - 2, t as i64 - 1);
            if units > 0 {
                for &file in &profile.residual {
                    for (gi, &leader) in leaders.iter().enumerate() {
                        step2.push(Message {
                            source: leader + 1,
                            payload: Payload::Rlc { mix: RlcScope::OwnedSubpieces { file, group: gi + 1 } },
                            units,
                        });
                    }
                }
            }
        }
        Approach::Side2 | Approach::SideDirect => {
            let regroup = scheme.approach == Approach::Side2;
            for s in subsets(g, t + 1) {
                for group in build_groups(&s, &counts, t, regroup)? {
                    if group.len() == t + 1 {
                        for &h in &s {
                            let terms: Vec<SubpieceRef> = group
                                .iter()
                                .filter(|&&(gk, _)| gk != h)
                                .map(|&(gk, j)| SubpieceRef {
                                    file: profile.slots[gk][j].file,
                                    subset: without(&s, gk),
                                    owner: h + 1,
                                })
                                .collect();
                            step2.push(Message {
                                source: leaders[h] + 1,
                                payload: Payload::XorSubpieces { terms },
                                units: 1,
                            });
                        }
                    } else {
                        let sender = *s
                            .iter()
                            .find(|&&h| group.iter().all(|&(gk, _)| gk != h))
                            .expect("a short group leaves some group of the subset idle");
                        let terms = group
                            .iter()
                            .map(|&(gk, j)| SubfileRef { file: profile.slots[gk][j].file, subset: without(&s, gk) })
                            .collect();
                        step2.push(Message {
                            source: leaders[sender] + 1,
                            payload: Payload::XorSubfiles { terms },
                            units: subfile,
                        });
                    }
                }
            }
        }
    }
    Ok(DeliveryPlan { scheme: scheme.clone(), demand: d.clone(), profile, step1, step2, units_per_file: per_file, h: topology.h() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::rational::q;

    fn three_sbs() -> Topology {
        Topology::new(2, vec![2, 1, 1], 6).unwrap()
    }

    fn sf(file: usize, subset: &[usize]) -> SubfileRef {
        SubfileRef { file, subset: subset.to_vec() }
    }

    /// Literal replay of the regrouping prose on explicit user lists.
    fn replay(subset: &[usize], counts: &[usize], t: usize) -> Vec<Vec<(usize, usize)>> {
        let mut order = subset.to_vec();
        order.sort_by(|&x, &y| counts[y].cmp(&counts[x]).then(x.cmp(&y)));
        let mut unpicked: Vec<Vec<(usize, usize)>> = order.iter().map(|&g| (0..counts[g]).map(|j| (g, j)).collect()).collect();
        let mut groups = Vec::new();
        while unpicked.iter().any(|u| !u.is_empty()) {
            let mut grp = Vec::new();
            for u in unpicked.iter_mut() {
                if !u.is_empty() {
                    grp.push(u.remove(0));
                }
            }
            groups.push(grp);
        }
        let (u1, ut, ut1) = (counts[order[0]], counts[order[t - 1]], counts[order[t]]);
        let range = if ut1 <= u1 - ut { ut1 } else { u1 - ut };
        for g in 1..=range {
            let member = groups[g - 1].iter().position(|&(s, _)| s == order[t]).unwrap();
            let user = groups[g - 1].remove(member);
            groups[ut + g - 1].push(user);
        }
        groups
    }

    #[test]
    fn regrouping_matches_replay() {
        let cases: &[&[usize]] = &[&[2, 1, 1], &[3, 1, 0], &[4, 4, 1, 3], &[5, 2, 2, 4], &[3, 3, 3], &[2, 0], &[4, 2, 1, 1, 3], &[1, 6, 2, 5]];
        for counts in cases {
            let s: Vec<usize> = (0..counts.len()).collect();
            let t = counts.len() - 1;
            assert_eq!(build_groups(&s, counts, t, true).unwrap(), replay(&s, counts, t), "{counts:?}");
        }
    }

    #[test]
    fn group_sizes() {
        let g = build_groups(&[0, 1, 2], &[2, 1, 1], 2, true).unwrap();
        assert_eq!(g, vec![vec![(0, 0), (1, 0)], vec![(0, 1), (2, 0)]]);
        let balanced = build_groups(&[0, 1, 2], &[2, 2, 2], 2, true).unwrap();
        assert!(balanced.iter().all(|grp| grp.len() == 3));
        let skew = build_groups(&[0, 1, 2], &[3, 1, 0], 2, true).unwrap();
        assert_eq!(skew, vec![vec![(0, 0), (1, 0)], vec![(0, 1)], vec![(0, 2)]]);
        assert!(build_groups(&[0, 1], &[1, 1], 2, true).is_err());
    }

    #[test]
    fn regrouped_sidelink_plan() {
        let topo = three_sbs();
        let scheme = Scheme::symmetric(&topo, 2, Approach::Side2).unwrap();
        let d = DemandVector::new(&topo, vec![5, 6, 1, 2, 3, 4]).unwrap();
        let p = plan(&topo, &scheme, &d).unwrap();
        assert_eq!(p.step1.iter().map(|m| m.payload.clone()).collect::<Vec<_>>(), vec![
            Payload::WholeFile { file: 5 },
            Payload::WholeFile { file: 6 }
        ]);
        assert_eq!(p.step2, vec![
            Message { source: 3, payload: Payload::XorSubfiles { terms: vec![sf(2, &[2, 3]), sf(3, &[1, 3])] }, units: 2 },
            Message { source: 2, payload: Payload::XorSubfiles { terms: vec![sf(1, &[2, 3]), sf(4, &[1, 2])] }, units: 2 },
        ]);
        assert_eq!((p.r_mbs(), p.r_sbs()), (q(2, 1), q(2, 3)));
        assert_eq!(p.per_sbs_loads(), vec![q(0, 1), q(1, 3), q(1, 3)]);
    }

    #[test]
    fn round_robin_sidelink_plan() {
        let topo = three_sbs();
        let scheme = Scheme::symmetric(&topo, 2, Approach::SideDirect).unwrap();
        let d = DemandVector::new(&topo, vec![5, 6, 1, 2, 3, 4]).unwrap();
        let p = plan(&topo, &scheme, &d).unwrap();
        assert_eq!(p.r_sbs(), q(5, 6));
        assert_eq!(p.step2.len(), 4);
        assert_eq!(p.step2[3].payload, Payload::XorSubfiles { terms: vec![sf(1, &[2, 3])] });
        assert_eq!(p.step2[3].source, 2);
    }

    #[test]
    fn grouped_downlink_plan() {
        let topo = three_sbs();
        let phi = Partition::parse("1|2,3", &topo).unwrap();
        let scheme = Scheme::new(&topo, phi, 1, Approach::Shared2).unwrap();
        let d = DemandVector::new(&topo, vec![5, 6, 1, 2, 3, 4]).unwrap();
        let p = plan(&topo, &scheme, &d).unwrap();
        let mut xors: Vec<Vec<SubfileRef>> = p
            .step2
            .iter()
            .map(|m| match &m.payload {
                Payload::XorSubfiles { terms } => terms.clone(),
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        xors.sort();
        assert_eq!(xors, vec![vec![sf(1, &[2]), sf(3, &[1])], vec![sf(2, &[2]), sf(4, &[1])]]);
        assert_eq!((p.r_mbs(), p.r_sbs()), (q(3, 1), q(0, 1)));
    }

    #[test]
    fn single_step_has_no_second_step() {
        let topo = three_sbs();
        let d = DemandVector::new(&topo, vec![1, 2, 1, 2, 2, 1]).unwrap();
        for a in Approach::ALL {
            let p = plan(&topo, &Scheme::symmetric(&topo, 1, a).unwrap(), &d).unwrap();
            assert!(p.step2.is_empty());
            assert_eq!(p.r_mbs(), q(2, 1));
        }
    }

    #[test]
    fn plan_sizes_match_profile_loads() {
        let topo = Topology::new(1, vec![2, 1, 1], 4).unwrap();
        let weights = topo.clipped_occupancy();
        let partitions = [Partition::singletons(3), Partition::new(vec![vec![0], vec![1, 2]], &weights).unwrap()];
        let k = topo.k();
        for code in 0..4usize.pow(k as u32) {
            let files: Vec<usize> = (0..k).map(|i| (code / 4usize.pow(i as u32)) % 4 + 1).collect();
            let d = DemandVector::new(&topo, files).unwrap();
            for phi in &partitions {
                for t in 0..=phi.g() {
                    for a in Approach::ALL {
                        let Ok(scheme) = Scheme::new(&topo, phi.clone(), t, a) else { continue };
                        let p = plan(&topo, &scheme, &d).unwrap();
                        let expect = scheme.profile_loads(&topo, &p.profile);
                        assert_eq!((p.r_mbs(), p.r_sbs()), expect, "{d:?} {phi} t={t} {a}");
                    }
                }
            }
        }
    }
}
