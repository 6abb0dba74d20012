//! Set partitions of the SBS indices into groups that share cache contents.

use std::fmt;

use crate::error::{Error, Result};
use crate::topology::Topology;

/// Default largest `H` for which all `G`-way partitions are enumerated.
pub const DEFAULT_PARTITION_CAP: usize = 14;

/// Exhaustive-enumeration cap, overridable through `FOGRAN_PARTITION_CAP`.
pub fn partition_cap() -> usize {
    std::env::var("FOGRAN_PARTITION_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_PARTITION_CAP)
}

/// A partition of the 0-based SBS indices `0..H` into nonempty groups.
///
/// Groups are kept in normalized order: non-increasing total weight, ties
/// broken by smallest member. Members within a group are ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds and normalizes a partition; `weights[h]` is the occupancy of SBS `h`.
    pub fn new(mut groups: Vec<Vec<usize>>, weights: &[usize]) -> Result<Self> {
        let h = weights.len();
        let mut seen = vec![false; h];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Partition("empty group".into()));
            }
            for &m in g {
                if m >= h {
                    return Err(Error::Partition(format!("SBS {} does not exist", m + 1)));
                }
                if std::mem::replace(&mut seen[m], true) {
                    return Err(Error::Partition(format!("SBS {} appears twice", m + 1)));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Partition(format!("SBS {} is not covered", missing + 1)));
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        let sum = |g: &Vec<usize>| g.iter().map(|&m| weights[m]).sum::<usize>();
        groups.sort_by(|a, b| sum(b).cmp(&sum(a)).then(a[0].cmp(&b[0])));
        Ok(Partition { groups })
    }

    /// One group per SBS, in index order.
    pub fn singletons(h: usize) -> Self {
        Partition { groups: (0..h).map(|i| vec![i]).collect() }
    }

    /// Builds the partition whose restricted-growth string is `rgs`.
    pub fn from_rgs(rgs: &[usize], weights: &[usize]) -> Self {
        let g = rgs.iter().max().map_or(0, |m| m + 1);
        let mut groups = vec![Vec::new(); g];
        for (h, &label) in rgs.iter().enumerate() {
            groups[label].push(h);
        }
        Partition::new(groups, weights).expect("restricted-growth strings describe valid partitions")
    }

    /// Parses `"1|2,3"`: groups separated by `|`, 1-based members by `,`.
    pub fn parse(literal: &str, topology: &Topology) -> Result<Self> {
        Partition::parse_weighted(literal, topology.occupancy())
    }

    /// Like [`Partition::parse`] with explicit per-SBS weights.
    pub fn parse_weighted(literal: &str, weights: &[usize]) -> Result<Self> {
        let groups = literal
            .split('|')
            .map(|g| {
                g.split(',')
                    .map(|m| match m.trim().parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::Parse(format!("bad partition member {m:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(groups, weights)
    }

    pub fn g(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn h(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Group index (0-based, normalized order) of each SBS.
    pub fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.h()];
        for (gi, g) in self.groups.iter().enumerate() {
            for &m in g {
                out[m] = gi;
            }
        }
        out
    }

    /// Restricted-growth string: group labels numbered by first appearance.
    pub fn encoding(&self) -> Vec<usize> {
        let group_of = self.group_of();
        let mut relabel = vec![usize::MAX; self.g()];
        let mut next = 0;
        group_of
            .iter()
            .map(|&g| {
                if relabel[g] == usize::MAX {
                    relabel[g] = next;
                    next += 1;
                }
                relabel[g]
            })
            .collect()
    }

    /// Total weight of each group, in group order.
    pub fn group_sums(&self, weights: &[usize]) -> Vec<usize> {
        self.groups.iter().map(|g| g.iter().map(|&m| weights[m]).sum()).collect()
    }

    /// Group sums clipped at `cap`, sorted non-increasingly.
    pub fn clipped_sums(&self, weights: &[usize], cap: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.group_sums(weights).into_iter().map(|v| v.min(cap)).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Re-normalizes with respect to different weights.
    pub fn renormalized(&self, weights: &[usize]) -> Self {
        Partition::new(self.groups.clone(), weights).expect("already valid")
    }

    /// Smallest SBS index in each group.
    pub fn leaders(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g[0]).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|g| g.iter().map(|m| (m + 1).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&parts.join("|"))
    }
}

/// Lazily enumerates all partitions of `0..h` into exactly `g` groups as
/// restricted-growth strings in lexicographic order.
pub struct RgsIter {
    a: Vec<usize>,
    g: usize,
    done: bool,
}

impl RgsIter {
    pub fn new(h: usize, g: usize) -> Self {
        if g == 0 || g > h {
            return RgsIter { a: Vec::new(), g, done: true };
        }
        let mut a = vec![0; h];
        fill_tail(&mut a, 0, 0, g);
        RgsIter { a, g, done: false }
    }
}

/// Sets `a[from+1..]` to the smallest suffix reaching `g` labels given prefix maximum `max`.
fn fill_tail(a: &mut [usize], from: usize, max: usize, g: usize) {
    let h = a.len();
    let need = g - 1 - max;
    for (j, slot) in a.iter_mut().enumerate().skip(from + 1) {
        let from_end = h - j;
        *slot = if from_end <= need { g - from_end } else { 0 };
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.a.clone();
        let h = self.a.len();
        let mut prefix_max = vec![0; h];
        for i in 1..h {
            prefix_max[i] = prefix_max[i - 1].max(self.a[i]);
        }
        self.done = true;
        for i in (1..h).rev() {
            let before = prefix_max[i - 1];
            let cand = self.a[i] + 1;
            if cand > before + 1 || cand >= self.g {
                continue;
            }
            let new_max = before.max(cand);
            if h - 1 - i < self.g - 1 - new_max {
                continue;
            }
            self.a[i] = cand;
            fill_tail(&mut self.a, i, new_max, self.g);
            self.done = false;
            break;
        }
        Some(out)
    }
}

/// Every `g`-way partition of the SBSs of `topology`, normalized.
pub fn enumerate_partitions(topology: &Topology, g: usize) -> Result<impl Iterator<Item = Partition> + '_> {
    let h = topology.h();
    if g == 0 || g > h {
        return Err(Error::Domain(format!("G = {g} outside 1..={h}")));
    }
    let cap = partition_cap();
    if h > cap {
        return Err(Error::PartitionSpaceTooLarge { h, cap });
    }
    Ok(RgsIter::new(h, g).map(move |rgs| Partition::from_rgs(&rgs, topology.occupancy())))
}

/// Sum of squared deviations of group totals from their common mean, scaled by `g^2`
/// so it stays an integer.
pub fn imbalance(sums: &[u64]) -> u128 {
    let g = sums.len() as i128;
    let total: i128 = sums.iter().map(|&s| s as i128).sum();
    sums.iter().map(|&s| (g * s as i128 - total).pow(2) as u128).sum()
}

/// Non-exhaustive candidates for large `H`: a balanced split and a balanced
/// split that isolates the most loaded SBS.
pub fn heuristic_partitions(weights: &[usize], g: usize) -> Vec<Partition> {
    let mut pool = vec![balanced_assignment(weights, g, &[])];
    if g >= 2 {
        pool.push(balanced_assignment(weights, g, &[0]));
    }
    pool.dedup();
    pool
}

/// Greedy largest-first assignment followed by single moves and pairwise swaps
/// that reduce [`imbalance`]. Indices in `isolated` get a group each.
pub fn balanced_assignment(weights: &[usize], g: usize, isolated: &[usize]) -> Partition {
    balanced_assignment_by(weights, g, isolated, |w| w as u64)
}

pub(crate) fn balanced_assignment_by(
    weights: &[usize],
    g: usize,
    isolated: &[usize],
    key: impl Fn(usize) -> u64,
) -> Partition {
    let h = weights.len();
    assert!(g >= 1 && g <= h && isolated.len() < g);
    let mut label = vec![usize::MAX; h];
    for (i, &m) in isolated.iter().enumerate() {
        label[m] = i;
    }
    let free: Vec<usize> = (0..g).skip(isolated.len()).collect();
    let mut order: Vec<usize> = (0..h).filter(|&m| label[m] == usize::MAX).collect();
    order.sort_by(|&a, &b| key(weights[b]).cmp(&key(weights[a])).then(a.cmp(&b)));
    let mut sums = vec![0u64; g];
    for (i, &m) in isolated.iter().enumerate() {
        sums[i] = key(weights[m]);
    }
    // Make sure every free group is nonempty before balancing.
    for (slot, &m) in free.iter().zip(order.iter()) {
        label[m] = *slot;
        sums[*slot] += key(weights[m]);
    }
    for &m in order.iter().skip(free.len()) {
        let target = *free.iter().min_by_key(|&&gi| (sums[gi], gi)).expect("at least one free group");
        label[m] = target;
        sums[target] += key(weights[m]);
    }
    let movable: Vec<usize> = order.clone();
    let count = |label: &[usize], gi: usize| label.iter().filter(|&&l| l == gi).count();
    loop {
        let mut improved = false;
        let base = imbalance(&sums);
        'moves: for &m in &movable {
            let from = label[m];
            if count(&label, from) == 1 {
                continue;
            }
            for &to in &free {
                if to == from {
                    continue;
                }
                let w = key(weights[m]);
                sums[from] -= w;
                sums[to] += w;
                if imbalance(&sums) < base {
                    label[m] = to;
                    improved = true;
                    break 'moves;
                }
                sums[from] += w;
                sums[to] -= w;
            }
        }
        if !improved {
            'swaps: for (i, &a) in movable.iter().enumerate() {
                for &b in &movable[i + 1..] {
                    let (ga, gb) = (label[a], label[b]);
                    if ga == gb {
                        continue;
                    }
                    let (wa, wb) = (key(weights[a]), key(weights[b]));
                    sums[ga] = sums[ga] - wa + wb;
                    sums[gb] = sums[gb] - wb + wa;
                    if imbalance(&sums) < base {
                        label.swap(a, b);
                        improved = true;
                        break 'swaps;
                    }
                    sums[ga] = sums[ga] - wb + wa;
                    sums[gb] = sums[gb] - wa + wb;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let mut groups = vec![Vec::new(); g];
    for (m, &l) in label.iter().enumerate() {
        groups[l].push(m);
    }
    Partition::new(groups, weights).expect("assignment covers every SBS")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stirling2(n: usize, k: usize) -> u64 {
        let mut s = vec![vec![0u64; k + 1]; n + 1];
        s[0][0] = 1;
        for i in 1..=n {
            for j in 1..=k.min(i) {
                s[i][j] = j as u64 * s[i - 1][j] + s[i - 1][j - 1];
            }
        }
        s[n][k]
    }

    #[test]
    fn counts_match_stirling_numbers() {
        for h in 1..=8 {
            for g in 1..=h {
                let all: Vec<_> = RgsIter::new(h, g).collect();
                assert_eq!(all.len() as u64, stirling2(h, g), "H={h} G={g}");
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted, all, "lexicographic and distinct");
                for rgs in &all {
                    assert_eq!(rgs.iter().max().unwrap() + 1, g);
                }
            }
        }
    }

    #[test]
    fn three_into_two() {
        let t = Topology::new(0, vec![2, 1, 1], 6).unwrap();
        let parts: Vec<String> = enumerate_partitions(&t, 2).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(parts, vec!["1,2|3", "1,3|2", "1|2,3"]);
        assert_eq!(enumerate_partitions(&t, 3).unwrap().count(), 1);
    }

    #[test]
    fn normalization_orders_by_weight() {
        let p = Partition::new(vec![vec![2, 1], vec![0]], &[2, 1, 1]).unwrap();
        assert_eq!(p.groups(), &[vec![0], vec![1, 2]]);
        assert_eq!(p.group_sums(&[2, 1, 1]), vec![2, 2]);
        assert_eq!(p.encoding(), vec![0, 1, 1]);
        assert_eq!(p.renormalized(&[2, 1, 1]), p);
    }

    #[test]
    fn parse_and_display() {
        let t = Topology::new(2, vec![2, 1, 1], 6).unwrap();
        let p = Partition::parse("2,3|1", &t).unwrap();
        assert_eq!(p.to_string(), "1|2,3");
        assert!(Partition::parse("1|1,2,3", &t).is_err());
        assert!(Partition::parse("1|2", &t).is_err());
        assert!(Partition::parse("1|2,x", &t).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let t = Topology::new(0, vec![1; 15], 30).unwrap();
        assert!(matches!(enumerate_partitions(&t, 2), Err(Error::PartitionSpaceTooLarge { .. })));
    }

    #[test]
    fn heuristic_balances() {
        let w = [20, 20, 8, 6, 4, 2];
        let p = balanced_assignment(&w, 3, &[]);
        assert_eq!(p.group_sums(&w), vec![20, 20, 20]);
        let iso = balanced_assignment(&w, 3, &[0]);
        assert_eq!(iso.groups()[0], vec![0]);
    }
}
