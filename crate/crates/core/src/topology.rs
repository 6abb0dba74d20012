//! Network shape, demand vectors and memory-load triples.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One MBS, `H` cache-equipped SBSs with occupancy numbers `L_1 >= ... >= L_H > 0`,
/// `K_mbs` cache-less users on the downlink and a library of `N` files.
///
/// SBS indices are 0-based in the API (`0..H`); user-facing output (plans,
/// partition literals) uses 1-based SBS ids with 0 reserved for the MBS.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Topology {
    k_mbs: usize,
    occupancy: Vec<usize>,
    n_files: usize,
    /// `original_index[h]` is the input position of the SBS now at sorted position `h`.
    original_index: Vec<usize>,
}

impl Topology {
    /// Builds a topology, sorting `occupancy` non-increasingly (stable) and
    /// remembering the original order.
    pub fn new(k_mbs: usize, occupancy: Vec<usize>, n_files: usize) -> Result<Self> {
        if occupancy.is_empty() {
            return Err(Error::Topology("at least one SBS is required".into()));
        }
        if let Some(pos) = occupancy.iter().position(|&l| l == 0) {
            return Err(Error::Topology(format!("SBS {} has zero occupancy", pos + 1)));
        }
        if n_files == 0 {
            return Err(Error::Topology("library must hold at least one file".into()));
        }
        let mut order: Vec<usize> = (0..occupancy.len()).collect();
        order.sort_by(|&a, &b| occupancy[b].cmp(&occupancy[a]));
        let sorted = order.iter().map(|&i| occupancy[i]).collect();
        Ok(Topology {
            k_mbs,
            occupancy: sorted,
            n_files,
            original_index: order,
        })
    }

    /// Strict constructor: rejects occupancy lists that are not already sorted.
    pub fn new_sorted(k_mbs: usize, occupancy: Vec<usize>, n_files: usize) -> Result<Self> {
        if occupancy.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Topology(format!("occupancy {occupancy:?} is not non-increasing")));
        }
        Self::new(k_mbs, occupancy, n_files)
    }

    pub fn h(&self) -> usize {
        self.occupancy.len()
    }

    pub fn k_mbs(&self) -> usize {
        self.k_mbs
    }

    pub fn k_sbs(&self) -> usize {
        self.occupancy.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.k_mbs + self.k_sbs()
    }

    pub fn n(&self) -> usize {
        self.n_files
    }

    /// Occupancy numbers in non-increasing order.
    pub fn occupancy(&self) -> &[usize] {
        &self.occupancy
    }

    /// `L_h` for 0-based sorted index `h`.
    pub fn l(&self, h: usize) -> usize {
        self.occupancy[h]
    }

    /// `L_[s]`: total occupancy of the `s` most loaded SBSs.
    pub fn l_prefix(&self, s: usize) -> usize {
        self.occupancy[..s].iter().sum()
    }

    /// `L_S` for a subset of 0-based SBS indices.
    pub fn l_subset(&self, subset: &[usize]) -> usize {
        subset.iter().map(|&h| self.occupancy[h]).sum()
    }

    pub fn l_max(&self) -> usize {
        self.occupancy[0]
    }

    pub fn original_index(&self) -> &[usize] {
        &self.original_index
    }

    /// `N - K_mbs` if positive.
    pub fn residual_files(&self) -> Option<usize> {
        self.n_files.checked_sub(self.k_mbs).filter(|&r| r > 0)
    }

    /// Clipped occupancies `L'_h = min(L_h, N - K_mbs)`.
    pub fn clipped_occupancy(&self) -> Vec<usize> {
        let cap = self.n_files.saturating_sub(self.k_mbs);
        self.occupancy.iter().map(|&l| l.min(cap)).collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.occupancy.iter().all(|&l| l == self.occupancy[0])
    }

    /// SBS (0-based) serving global user `k`, or `None` for MBS users.
    /// Users `0..K_mbs` are on the downlink, then `L_1` users of SBS 0, and so on.
    pub fn user_sbs(&self, k: usize) -> Option<usize> {
        if k < self.k_mbs {
            return None;
        }
        let mut start = self.k_mbs;
        for (h, &l) in self.occupancy.iter().enumerate() {
            if k < start + l {
                return Some(h);
            }
            start += l;
        }
        None
    }

    /// Global user ids attached to SBS `h`.
    pub fn users_of(&self, h: usize) -> std::ops::Range<usize> {
        let start = self.k_mbs + self.l_prefix(h);
        start..start + self.occupancy[h]
    }

    pub fn to_json(&self) -> TopologyJson {
        TopologyJson {
            h: self.h(),
            k_mbs: self.k_mbs,
            l: self.occupancy.clone(),
            n: self.n_files,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H={} K_mbs={} L={:?} N={}",
            self.h(),
            self.k_mbs,
            self.occupancy,
            self.n_files
        )
    }
}

/// On-disk topology: `{"H": int, "K_mbs": int, "L": [int,...], "N": int}`; `L` may be unsorted.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TopologyJson {
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(rename = "K_mbs")]
    pub k_mbs: usize,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    #[serde(rename = "N")]
    pub n: usize,
}

impl TryFrom<TopologyJson> for Topology {
    type Error = Error;

    fn try_from(j: TopologyJson) -> Result<Self> {
        if j.h != j.l.len() {
            return Err(Error::Topology(format!("H = {} but L has {} entries", j.h, j.l.len())));
        }
        Topology::new(j.k_mbs, j.l, j.n)
    }
}

impl Topology {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: TopologyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }
}

/// Files demanded by each user; entries are 1-based file ids.
///
/// The first `K_mbs` entries belong to the downlink users, the rest to SBS
/// users in the order of [`Topology::users_of`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(topology: &Topology, files: Vec<usize>) -> Result<Self> {
        if files.len() != topology.k() {
            return Err(Error::Demand(format!(
                "demand has length {} but the topology has K = {} users",
                files.len(),
                topology.k()
            )));
        }
        if let Some(bad) = files.iter().find(|&&f| f == 0 || f > topology.n()) {
            return Err(Error::Demand(format!("file {bad} outside 1..={}", topology.n())));
        }
        Ok(DemandVector(files))
    }

    pub fn parse(topology: &Topology, s: &str) -> Result<Self> {
        let files = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad demand entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(topology, files)
    }

    pub fn files(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, k: usize) -> usize {
        self.0[k]
    }

    /// `D_mbs(d)`: distinct files of the downlink users.
    pub fn d_mbs(&self, topology: &Topology) -> BTreeSet<usize> {
        self.0[..topology.k_mbs()].iter().copied().collect()
    }

    /// `D_sbs(d)`: distinct SBS-demanded files not already in `D_mbs(d)`.
    pub fn d_sbs(&self, topology: &Topology) -> BTreeSet<usize> {
        let mbs = self.d_mbs(topology);
        self.0[topology.k_mbs()..]
            .iter()
            .copied()
            .filter(|f| !mbs.contains(f))
            .collect()
    }
}

/// `(M, R_mbs, R_sbs)` in units of files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryLoadPoint {
    #[serde(rename = "M")]
    pub m: Rational,
    #[serde(rename = "R_mbs")]
    pub r_mbs: Rational,
    #[serde(rename = "R_sbs")]
    pub r_sbs: Rational,
}

impl MemoryLoadPoint {
    pub fn new(m: Rational, r_mbs: Rational, r_sbs: Rational) -> Self {
        debug_assert!(!m.is_negative() && !r_mbs.is_negative() && !r_sbs.is_negative());
        MemoryLoadPoint { m, r_mbs, r_sbs }
    }
}

impl fmt::Display for MemoryLoadPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.r_mbs, self.r_sbs)
    }
}
