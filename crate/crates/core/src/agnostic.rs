//! Expected loads when occupancies are random and placement only knows their law.
//!
//! A placement parameter `n` fixes how many broadcast files the coded cache
//! expects: each `F_W` block is cached as `(N - n)/N` of its size in random
//! combinations. At delivery the realization `(k0, l_1..l_H)` is known to all
//! nodes and the loads below are evaluated per realization, then averaged.

use num_bigint::BigInt;
use rand::distr::{Distribution, weighted::WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{balanced_assignment_by, partition_cap, Partition, RgsIter};
use crate::rational::{binom_q, Rational};
use crate::scheme::{multiround_load, positional_subset_sum, regrouped_sidelink_load};
use crate::topology::{MemoryLoadPoint, Topology};

/// Upper tail mass dropped from each Poisson marginal in exhaustive mode.
pub const POISSON_TAIL: f64 = 1e-12;
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;
const CHUNK: usize = 4096;

/// Law of one occupancy number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marginal {
    Poisson(f64),
    Fixed(usize),
    /// `(value, probability)` pairs summing to exactly one.
    Histogram(Vec<(usize, Rational)>),
}

impl Marginal {
    fn validate(&self) -> Result<()> {
        match self {
            Marginal::Poisson(l) if !(l.is_finite() && *l >= 0.0) => {
                Err(Error::Domain(format!("Poisson rate {l} must be finite and nonnegative")))
            }
            Marginal::Histogram(h) => {
                if h.iter().any(|(_, p)| p.is_negative()) {
                    return Err(Error::Domain("negative histogram mass".into()));
                }
                let total = h.iter().fold(Rational::zero(), |acc, (_, p)| acc + p);
                if total != Rational::one() {
                    return Err(Error::Domain(format!("histogram mass sums to {total}, not 1")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> Rational {
        match self {
            Marginal::Poisson(l) => Rational::from_f64(*l).expect("validated"),
            Marginal::Fixed(v) => Rational::from(*v),
            Marginal::Histogram(h) => h.iter().fold(Rational::zero(), |acc, (v, p)| acc + Rational::from(*v) * p),
        }
    }

    /// Exact support with renormalized masses, and the dropped tail mass.
    fn support(&self) -> (Vec<(usize, Rational)>, f64) {
        match self {
            Marginal::Fixed(v) => (vec![(*v, Rational::one())], 0.0),
            Marginal::Histogram(h) => (h.iter().filter(|(_, p)| !p.is_zero()).cloned().collect(), 0.0),
            Marginal::Poisson(l) => {
                let pmf = poisson_pmf(*l);
                let kept: f64 = pmf.iter().sum();
                let mut mass: Vec<(usize, Rational)> = pmf
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(k, &p)| (k, Rational::from_f64(p).expect("finite")))
                    .collect();
                let total = mass.iter().fold(Rational::zero(), |acc, (_, p)| acc + p);
                for (_, p) in mass.iter_mut() {
                    *p = &*p / &total;
                }
                (mass, (1.0 - kept).max(0.0))
            }
        }
    }
}

/// Poisson probabilities from 0 up to the point where the upper tail drops below [`POISSON_TAIL`].
fn poisson_pmf(lambda: f64) -> Vec<f64> {
    if lambda == 0.0 {
        return vec![1.0];
    }
    let mut out = Vec::new();
    let mut log_fact = 0.0;
    let mut cdf = 0.0;
    let mut k = 0usize;
    loop {
        if k > 0 {
            log_fact += (k as f64).ln();
        }
        let p = (-lambda + k as f64 * lambda.ln() - log_fact).exp();
        out.push(p);
        cdf += p;
        if k as f64 > lambda && 1.0 - cdf < POISSON_TAIL {
            return out;
        }
        k += 1;
    }
}

enum Sampler {
    Poisson(Poisson<f64>),
    Fixed(usize),
    Table(Vec<usize>, WeightedIndex<f64>),
}

impl Sampler {
    fn new(m: &Marginal) -> Self {
        match m {
            Marginal::Poisson(l) if *l == 0.0 => Sampler::Fixed(0),
            Marginal::Poisson(l) => Sampler::Poisson(Poisson::new(*l).expect("validated rate")),
            Marginal::Fixed(v) => Sampler::Fixed(*v),
            Marginal::Histogram(h) => {
                let values = h.iter().map(|(v, _)| *v).collect();
                let weights = WeightedIndex::new(h.iter().map(|(_, p)| p.to_f64())).expect("validated histogram");
                Sampler::Table(values, weights)
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Sampler::Poisson(p) => p.sample(rng) as usize,
            Sampler::Fixed(v) => *v,
            Sampler::Table(values, w) => values[w.sample(rng)],
        }
    }
}

/// Independent laws of `K_mbs` and each `L_h`, plus the library size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyDistribution {
    #[serde(rename = "K_mbs")]
    pub k_mbs: Marginal,
    #[serde(rename = "L")]
    pub l: Vec<Marginal>,
    #[serde(rename = "N")]
    pub n: usize,
}

impl TopologyDistribution {
    pub fn new(k_mbs: Marginal, l: Vec<Marginal>, n: usize) -> Result<Self> {
        let d = TopologyDistribution { k_mbs, l, n };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        if self.l.is_empty() {
            return Err(Error::Topology("at least one SBS is required".into()));
        }
        if self.n == 0 {
            return Err(Error::Topology("library must hold at least one file".into()));
        }
        self.k_mbs.validate()?;
        self.l.iter().try_for_each(Marginal::validate)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let d: TopologyDistribution = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    /// Point mass at `topology` (SBSs in its sorted order).
    pub fn point_mass(topology: &Topology) -> Self {
        TopologyDistribution {
            k_mbs: Marginal::Fixed(topology.k_mbs()),
            l: topology.occupancy().iter().map(|&v| Marginal::Fixed(v)).collect(),
            n: topology.n(),
        }
    }

    pub fn h(&self) -> usize {
        self.l.len()
    }

    pub fn mean_k_mbs(&self) -> Rational {
        self.k_mbs.mean()
    }

    /// Draws `count` realizations; chunk `i` uses its own stream so results do
    /// not depend on the thread count.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Realization> {
        let k_sampler = Sampler::new(&self.k_mbs);
        let l_samplers: Vec<Sampler> = self.l.iter().map(Sampler::new).collect();
        let chunks = count.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = CHUNK.min(count - c * CHUNK);
                (0..len)
                    .map(|_| {
                        let k0 = k_sampler.draw(&mut rng);
                        let l = l_samplers.iter().map(|s| s.draw(&mut rng)).collect();
                        Realization { k0, l }
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// All realizations with their exact probabilities, or an error when the
    /// product of supports exceeds `cap`. Also returns the dropped Poisson tail mass.
    pub fn enumerate(&self, cap: u64) -> Result<(Vec<(Rational, Realization)>, f64)> {
        let mut supports = vec![self.k_mbs.support()];
        supports.extend(self.l.iter().map(Marginal::support));
        let size = supports.iter().try_fold(1u64, |acc, (s, _)| acc.checked_mul(s.len() as u64));
        match size {
            Some(size) if size <= cap => {}
            _ => {
                return Err(Error::Domain(format!(
                    "exhaustive evaluation needs more than {cap} realizations; use Monte Carlo"
                )))
            }
        }
        let cut = supports.iter().map(|(_, c)| *c).sum();
        let mut out: Vec<(Rational, Vec<usize>)> = vec![(Rational::one(), Vec::new())];
        for (support, _) in &supports {
            out = out
                .into_iter()
                .flat_map(|(p, vals)| {
                    support.iter().map(move |(v, q)| {
                        let mut vals = vals.clone();
                        vals.push(*v);
                        (&p * q, vals)
                    })
                })
                .collect();
        }
        let real = out
            .into_iter()
            .map(|(p, vals)| (p, Realization { k0: vals[0], l: vals[1..].to_vec() }))
            .collect();
        Ok((real, cut))
    }
}

/// One draw of the topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub k0: usize,
    pub l: Vec<usize>,
}

/// How expectations are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    /// Exact sum over the joint support (Poisson tails cut at [`POISSON_TAIL`]).
    Exhaustive { cap: u64 },
    MonteCarlo { samples: usize, seed: u64 },
}

/// Which bracket term the sidelink formula uses for the `t`-th largest group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SidelinkVariant {
    /// Clipped at `N - k0`, as in the topology-aware formula.
    #[default]
    Primed,
    Unprimed,
}

/// What a realization contributes: exceeding the library is treated as serving
/// everyone by broadcasting every file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverflowPolicy {
    Evaluate,
    Truncate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Exact value in exhaustive mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Rational>,
    pub std_err: f64,
}

impl Estimate {
    pub fn as_rational(&self) -> Rational {
        self.exact.clone().unwrap_or_else(|| Rational::from_f64(self.value).expect("finite estimate"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AgnosticPoint {
    pub n: usize,
    pub t: usize,
    #[serde(rename = "M")]
    pub m: Rational,
    #[serde(rename = "R_mbs")]
    pub r_mbs: Estimate,
    #[serde(rename = "R_sbs")]
    pub r_sbs: Estimate,
    /// Poisson tail mass dropped by exhaustive evaluation.
    pub support_cut_mass: f64,
    /// Probability of realizations with more users than files, dropped under [`OverflowPolicy::Truncate`].
    pub truncated_mass: f64,
}

impl AgnosticPoint {
    pub fn point(&self) -> MemoryLoadPoint {
        MemoryLoadPoint::new(self.m.clone(), self.r_mbs.as_rational(), self.r_sbs.as_rational())
    }
}

/// Per-realization pieces that do not depend on `n`.
#[derive(Clone, Debug)]
struct Pieces {
    k0: usize,
    total: usize,
    /// Downlink: multi-round load. Sidelink: `min(relay load, grouped load)`.
    step2: Rational,
    step2_f: f64,
}

fn clipped_sorted(sums: &[usize], cap: usize) -> Vec<usize> {
    let mut v: Vec<usize> = sums.iter().map(|&s| s.min(cap)).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// `sum_S (q'_1 + [q'_{t+1} - q'_1 + q_t]^+ / t) / C(G, t)` with the unclipped `q_t`.
fn unprimed_sidelink_load(sums: &[usize], cap: usize, t: usize) -> Rational {
    let mut raw = sums.to_vec();
    raw.sort_unstable_by(|a, b| b.cmp(a));
    let clip: Vec<i64> = raw.iter().map(|&s| s.min(cap) as i64).collect();
    let g = raw.len();
    let num = positional_subset_sum(g, t, |a, b, c| {
        let bracket = (clip[c] - clip[a] + raw[b] as i64).max(0);
        BigInt::from(t as i64 * clip[a] + bracket)
    });
    Rational::from(num) / (Rational::from(t) * binom_q(g as i64, t as i64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Shared,
    Sidelink(SidelinkVariant),
}

fn pieces(n_files: usize, r: &Realization, phi: &Partition, t: usize, class: Class) -> Pieces {
    let total: usize = r.l.iter().sum();
    if r.k0 >= n_files {
        return Pieces { k0: r.k0, total, step2: Rational::zero(), step2_f: 0.0 };
    }
    let cap = n_files - r.k0;
    let sums = phi.group_sums(&r.l);
    let step2 = match class {
        Class::Shared => multiround_load(&clipped_sorted(&sums, cap), t),
        Class::Sidelink(variant) => {
            let g = phi.g();
            let relay = Rational::from(cap.min(total) * (g - t)) / Rational::from(g - 1);
            let grouped = match variant {
                SidelinkVariant::Primed => regrouped_sidelink_load(&clipped_sorted(&sums, cap), t),
                SidelinkVariant::Unprimed => unprimed_sidelink_load(&sums, cap, t),
            };
            relay.min(grouped)
        }
    };
    let step2_f = step2.to_f64();
    Pieces { k0: r.k0, total, step2, step2_f }
}

fn positive_part(a: usize, b: usize) -> usize {
    a.saturating_sub(b)
}

fn shared_load(n_files: usize, p: &Pieces, n: usize) -> Rational {
    if p.k0 >= n_files {
        return Rational::from(n_files);
    }
    let base = Rational::from(p.k0.max(n));
    if p.total == 0 {
        return base;
    }
    let kept = positive_part(p.total, positive_part(n, p.k0));
    base + Rational::new(kept as i64, p.total as i64) * &p.step2
}

fn shared_load_f(n_files: usize, p: &Pieces, n: usize) -> f64 {
    if p.k0 >= n_files {
        return n_files as f64;
    }
    let base = p.k0.max(n) as f64;
    if p.total == 0 {
        return base;
    }
    let kept = positive_part(p.total, positive_part(n, p.k0));
    base + kept as f64 / p.total as f64 * p.step2_f
}

fn sidelink_loads_f(n_files: usize, g: usize, p: &Pieces, n: usize) -> (f64, f64) {
    if p.k0 >= n_files {
        return (n_files as f64, 0.0);
    }
    let recover = (g * positive_part(n, p.k0)) as f64 / (g - 1) as f64;
    (p.k0 as f64, recover + p.step2_f)
}

fn sidelink_loads(n_files: usize, g: usize, p: &Pieces, n: usize) -> (Rational, Rational) {
    if p.k0 >= n_files {
        return (Rational::from(n_files), Rational::zero());
    }
    let recover = Rational::new((g * positive_part(n, p.k0)) as i64, (g - 1) as i64);
    (Rational::from(p.k0), recover + &p.step2)
}

struct Weighted {
    weights: Option<Vec<Rational>>,
    pieces: Vec<Pieces>,
    cut: f64,
    truncated: f64,
}

fn collect(
    dist: &TopologyDistribution,
    phi: &Partition,
    t: usize,
    class: Class,
    eval: Evaluation,
    overflow: OverflowPolicy,
) -> Result<Weighted> {
    let over = |r: &Realization| r.k0 + r.l.iter().sum::<usize>() > dist.n;
    match eval {
        Evaluation::Exhaustive { cap } => {
            let (real, cut) = dist.enumerate(cap)?;
            let (kept, dropped): (Vec<_>, Vec<_>) =
                real.into_iter().partition(|(_, r)| overflow == OverflowPolicy::Evaluate || !over(r));
            let dropped_mass = dropped.iter().fold(Rational::zero(), |acc, (p, _)| acc + p);
            if !dropped_mass.is_zero() && dropped_mass == Rational::one() {
                return Err(Error::Domain("every realization exceeds the library".into()));
            }
            let scale = Rational::one() - &dropped_mass;
            let (weights, pieces): (Vec<_>, Vec<_>) = kept
                .par_iter()
                .map(|(p, r)| (p / &scale, pieces(dist.n, r, phi, t, class)))
                .unzip();
            Ok(Weighted { weights: Some(weights), pieces, cut, truncated: dropped_mass.to_f64() })
        }
        Evaluation::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
            }
            let real = dist.sample(samples, seed);
            let before = real.len();
            let kept: Vec<Realization> =
                real.into_iter().filter(|r| overflow == OverflowPolicy::Evaluate || !over(r)).collect();
            if kept.is_empty() {
                return Err(Error::Domain("every sample exceeds the library".into()));
            }
            let truncated = (before - kept.len()) as f64 / before as f64;
            let pieces = kept.par_iter().map(|r| pieces(dist.n, r, phi, t, class)).collect();
            Ok(Weighted { weights: None, pieces, cut: 0.0, truncated })
        }
    }
}

fn average(
    w: &Weighted,
    f: impl Fn(&Pieces) -> Rational + Sync,
    fast: impl Fn(&Pieces) -> f64 + Sync,
) -> Estimate {
    match &w.weights {
        Some(weights) => {
            let exact = weights.iter().zip(&w.pieces).fold(Rational::zero(), |acc, (p, x)| acc + p * f(x));
            Estimate { value: exact.to_f64(), exact: Some(exact), std_err: 0.0 }
        }
        None => {
            let values: Vec<f64> = w.pieces.par_iter().map(&fast).collect();
            let count = values.len() as f64;
            let mean = values.iter().sum::<f64>() / count;
            let var = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            Estimate { value: mean, exact: None, std_err: (var / count).sqrt() }
        }
    }
}

fn check_partition(dist: &TopologyDistribution, phi: &Partition) -> Result<usize> {
    if phi.h() != dist.h() {
        return Err(Error::Partition(format!("partition covers {} SBSs, distribution has {}", phi.h(), dist.h())));
    }
    Ok(phi.g())
}

fn memory(dist: &TopologyDistribution, g: usize, t: usize, n: usize) -> Rational {
    Rational::from(t * (dist.n - n)) / Rational::from(g)
}

/// Options shared by the expected-load evaluators.
#[derive(Clone, Copy, Debug)]
pub struct AgnosticOptions {
    pub eval: Evaluation,
    pub overflow: OverflowPolicy,
    pub variant: SidelinkVariant,
}

impl AgnosticOptions {
    pub fn new(eval: Evaluation) -> Self {
        AgnosticOptions { eval, overflow: OverflowPolicy::Evaluate, variant: SidelinkVariant::Primed }
    }
}

/// Downlink-only expected point for every `n` in `ns`.
pub fn agnostic_shared_sweep(
    dist: &TopologyDistribution,
    phi: &Partition,
    t: usize,
    ns: &[usize],
    opts: &AgnosticOptions,
) -> Result<Vec<AgnosticPoint>> {
    let g = check_partition(dist, phi)?;
    if t > g {
        return Err(Error::Domain(format!("t = {t} exceeds G = {g}")));
    }
    if let Some(&bad) = ns.iter().find(|&&n| n >= dist.n) {
        return Err(Error::Domain(format!("n = {bad} outside 0..{}", dist.n)));
    }
    let w = collect(dist, phi, t, Class::Shared, opts.eval, opts.overflow)?;
    Ok(ns
        .iter()
        .map(|&n| AgnosticPoint {
            n,
            t,
            m: memory(dist, g, t, n),
            r_mbs: average(&w, |p| shared_load(dist.n, p, n), |p| shared_load_f(dist.n, p, n)),
            r_sbs: Estimate { value: 0.0, exact: Some(Rational::zero()), std_err: 0.0 },
            support_cut_mass: w.cut,
            truncated_mass: w.truncated,
        })
        .collect())
}

pub fn agnostic_shared_point(
    dist: &TopologyDistribution,
    phi: &Partition,
    t: usize,
    n: usize,
    opts: &AgnosticOptions,
) -> Result<AgnosticPoint> {
    Ok(agnostic_shared_sweep(dist, phi, t, &[n], opts)?.remove(0))
}

/// Sidelink expected point for every `n` in `ns` that stores the whole library
/// across the groups, i.e. `(N - n) t >= N`.
pub fn agnostic_sidelink_sweep(
    dist: &TopologyDistribution,
    phi: &Partition,
    t: usize,
    ns: &[usize],
    opts: &AgnosticOptions,
) -> Result<Vec<AgnosticPoint>> {
    let g = check_partition(dist, phi)?;
    if g < 2 {
        return Err(Error::Domain("sidelink delivery needs G >= 2".into()));
    }
    if t == 0 {
        return Err(Error::SidelinkNeedsCaching);
    }
    if t > g {
        return Err(Error::Domain(format!("t = {t} exceeds G = {g}")));
    }
    if let Some(&bad) = ns.iter().find(|&&n| n >= dist.n) {
        return Err(Error::Domain(format!("n = {bad} outside 0..{}", dist.n)));
    }
    if ns.iter().any(|&n| (dist.n - n) * t < dist.n) {
        return Err(Error::LibraryCoverage);
    }
    let w = collect(dist, phi, t, Class::Sidelink(opts.variant), opts.eval, opts.overflow)?;
    Ok(ns
        .iter()
        .map(|&n| AgnosticPoint {
            n,
            t,
            m: memory(dist, g, t, n),
            r_mbs: average(&w, |p| sidelink_loads(dist.n, g, p, n).0, |p| sidelink_loads_f(dist.n, g, p, n).0),
            r_sbs: average(&w, |p| sidelink_loads(dist.n, g, p, n).1, |p| sidelink_loads_f(dist.n, g, p, n).1),
            support_cut_mass: w.cut,
            truncated_mass: w.truncated,
        })
        .collect())
}

pub fn agnostic_sidelink_point(
    dist: &TopologyDistribution,
    phi: &Partition,
    t: usize,
    n: usize,
    opts: &AgnosticOptions,
) -> Result<AgnosticPoint> {
    Ok(agnostic_sidelink_sweep(dist, phi, t, &[n], opts)?.remove(0))
}

/// `sum_i (E[S_i] - E[sum L]/G)^2`; the variance part of the objective is the
/// same for every partition of independent occupancies.
fn spread(means: &[Rational], groups: &[Vec<usize>]) -> Rational {
    let g = Rational::from(groups.len());
    let total = means.iter().fold(Rational::zero(), |acc, m| acc + m);
    let target = total / g;
    groups
        .iter()
        .map(|grp| {
            let s = grp.iter().fold(Rational::zero(), |acc, &j| acc + &means[j]);
            let d = s - &target;
            &d * &d
        })
        .fold(Rational::zero(), |acc, x| acc + x)
}

fn groups_of(rgs: &[usize], g: usize) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); g];
    for (j, &label) in rgs.iter().enumerate() {
        groups[label].push(j);
    }
    groups
}

/// Partition whose group totals have the least expected squared deviation
/// from their common mean; ties go to the smallest restricted-growth string.
pub fn variance_partition(dist: &TopologyDistribution, g: usize) -> Result<Partition> {
    let h = dist.h();
    if g == 0 || g > h {
        return Err(Error::Domain(format!("G = {g} outside 1..={h}")));
    }
    let means: Vec<Rational> = dist.l.iter().map(Marginal::mean).collect();
    let zeros = vec![0usize; h];
    if h <= partition_cap() {
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for rgs in RgsIter::new(h, g) {
            let v = spread(&means, &groups_of(&rgs, g));
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, rgs));
            }
        }
        let (_, rgs) = best.expect("G <= H admits a partition");
        return Ok(Partition::from_rgs(&rgs, &zeros));
    }
    let scaled: Vec<u64> = dist.l.iter().map(|m| (m.mean().to_f64() * 1e6).round() as u64).collect();
    let index: Vec<usize> = (0..h).collect();
    let p = balanced_assignment_by(&index, g, &[], |i| scaled[i]);
    Ok(p.renormalized(&zeros))
}

/// Fraction of `samples` draws where `K_mbs + sum L_h` exceeds the library size.
pub fn sanity_tail_probability(dist: &TopologyDistribution, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let hits: usize = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let k_sampler = Sampler::new(&dist.k_mbs);
            let l_samplers: Vec<Sampler> = dist.l.iter().map(Sampler::new).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len)
                .filter(|_| {
                    let total = k_sampler.draw(&mut rng) + l_samplers.iter().map(|s| s.draw(&mut rng)).sum::<usize>();
                    total > dist.n
                })
                .count()
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}

/// The Poisson configuration with six SBSs and 140 files.
pub fn reference_distribution() -> TopologyDistribution {
    TopologyDistribution {
        k_mbs: Marginal::Poisson(20.0),
        l: [20.0, 20.0, 8.0, 6.0, 4.0, 2.0].into_iter().map(Marginal::Poisson).collect(),
        n: 140,
    }
}
