#![allow(dead_code)]

use fogran::partition::enumerate_partitions;
use fogran::scheme::{Approach, Scheme};
use fogran::{Rational, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every non-increasing occupancy vector with `h` entries, each at least 1, summing to at most `total`.
pub fn occupancies(h: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(h: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == h {
            out.push(cur.clone());
            return;
        }
        let remaining = h - cur.len();
        for v in (1..=cap.min(left + 1 - remaining)).rev() {
            cur.push(v);
            rec(h, left - v, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if total >= h {
        rec(h, total, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Topologies with `H <= max_h`, `N <= max_n`, `K <= max_k` and `N > K_mbs`.
pub fn small_corpus(max_h: usize, max_n: usize, max_k: usize) -> Vec<Topology> {
    let mut out = Vec::new();
    for h in 1..=max_h {
        for k_mbs in 0..=max_k.saturating_sub(h) {
            for l in occupancies(h, max_k - k_mbs) {
                for n in k_mbs + 1..=max_n {
                    out.push(Topology::new(k_mbs, l.clone(), n).unwrap());
                }
            }
        }
    }
    out
}

/// Seeded random topologies with `H <= max_h` and `N <= max_n`. Every fifth one has equal occupancies.
pub fn random_corpus(count: usize, max_h: usize, max_n: usize, seed: u64) -> Vec<Topology> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let h = rng.random_range(1..=max_h);
            let n = rng.random_range(2..=max_n);
            let k_mbs = if rng.random_bool(0.1) { rng.random_range(n..=n + 3) } else { rng.random_range(0..n) };
            let l = if i % 5 == 0 {
                vec![rng.random_range(1..=10); h]
            } else {
                (0..h).map(|_| rng.random_range(1..=12)).collect()
            };
            Topology::new(k_mbs, l, n).unwrap()
        })
        .collect()
}

/// `M = j (N - K_mbs) / (2H)` for `j = 0..=2H`, plus `N`.
pub fn memory_grid(topology: &Topology) -> Vec<Rational> {
    let h = topology.h() as i64;
    let residual = topology.n().saturating_sub(topology.k_mbs()) as i64;
    let mut out: Vec<Rational> = (0..=2 * h).map(|j| Rational::new(j * residual, 2 * h)).collect();
    out.push(Rational::from(topology.n()));
    out.dedup();
    out
}

/// Every valid scheme over every partition, `t` and approach.
pub fn all_schemes(topology: &Topology) -> Vec<Scheme> {
    let mut out = Vec::new();
    for g in 1..=topology.h() {
        for phi in enumerate_partitions(topology, g).unwrap() {
            for t in 0..=g {
                for approach in Approach::ALL {
                    if approach.is_sidelink() && t == 0 {
                        continue;
                    }
                    out.push(Scheme::new(topology, phi.clone(), t, approach).unwrap());
                }
            }
        }
    }
    out
}
