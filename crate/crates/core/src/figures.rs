//! Curve data for the reference figures, emitted as CSV.
//!
//! Each figure is a table whose first column is the swept quantity (cache size
//! `M`, or `R_sbs` for the converse slice) and whose other columns hold one
//! load per curve label. Cells are empty where a curve is undefined.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::agnostic::{
    agnostic_shared_sweep, agnostic_sidelink_sweep, reference_distribution, variance_partition, AgnosticOptions,
    Evaluation, TopologyDistribution,
};
use crate::converse::{converse_system, min_sidelink_at, region_corners};
use crate::envelope::lower_convex_envelope;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rational::{q, Rational};
use crate::region::{achievable_points, curve_value, shared_curve, sidelink_curve, Family};
use crate::scheme::{direct_sidelink_load, multiround_load, regrouped_sidelink_load};
use crate::scheme_asym::{asym_shared_point, PartitionStrategy};
use crate::topology::Topology;

/// Monte Carlo samples per `(G, t)` pair for the topology-agnostic figures.
pub const AGNOSTIC_SAMPLES: usize = 20_000;
/// Seed of the topology-agnostic figures.
pub const AGNOSTIC_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FigureId {
    Two,
    ThreeA,
    ThreeB,
    FiveA,
    FiveB,
    Six,
    SevenA,
    SevenB,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Two,
        FigureId::ThreeA,
        FigureId::ThreeB,
        FigureId::FiveA,
        FigureId::FiveB,
        FigureId::Six,
        FigureId::SevenA,
        FigureId::SevenB,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigureId::Two => "2",
            FigureId::ThreeA => "3a",
            FigureId::ThreeB => "3b",
            FigureId::FiveA => "5a",
            FigureId::FiveB => "5b",
            FigureId::Six => "6",
            FigureId::SevenA => "7a",
            FigureId::SevenB => "7b",
        };
        f.write_str(s)
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Domain(format!("unknown figure id {s:?} (expected 2, 3a, 3b, 5a, 5b, 6, 7a or 7b)")))
    }
}

/// One table of curve data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Figure {
    pub id: FigureId,
    pub x_label: String,
    pub labels: Vec<String>,
    pub rows: Vec<(Rational, Vec<Option<Rational>>)>,
}

impl Figure {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.x_label);
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (x, values) in &self.rows {
            out.push_str(&x.to_decimal());
            for v in values {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&v.to_decimal());
                }
            }
            out.push('\n');
        }
        out
    }

    /// `(x, value)` pairs of one labelled curve.
    pub fn column(&self, label: &str) -> Option<Vec<(Rational, Option<Rational>)>> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|(x, v)| (x.clone(), v[i].clone())).collect())
    }
}

/// `H = 4`, `N = 20`, `K_mbs = 4`, `L = (6, 4, 3, 3)`.
pub fn small_topology() -> Topology {
    Topology::new(4, vec![6, 4, 3, 3], 20).expect("valid topology")
}

/// `H = 6`, `N = 70`, `K_mbs = 10`, `L = (20, 20, 8, 6, 4, 2)`.
pub fn skewed_topology() -> Topology {
    Topology::new(10, vec![20, 20, 8, 6, 4, 2], 70).expect("valid topology")
}

/// `H = 30`, `N = 360`, `K_mbs = 0`, ten SBSs with 30 users and twenty with 3.
pub fn wide_topology() -> Topology {
    let mut l = vec![30; 10];
    l.extend(vec![3; 20]);
    Topology::new(0, l, 360).expect("valid topology")
}

/// Twelve groups for [`wide_topology`]: each busy SBS alone, the quiet ones in two blocks of ten.
pub fn wide_partition() -> Partition {
    let mut groups: Vec<Vec<usize>> = (0..10).map(|h| vec![h]).collect();
    groups.push((10..20).collect());
    groups.push((20..30).collect());
    Partition::new(groups, wide_topology().occupancy()).expect("valid partition")
}

/// Uncoded placement of every file over all `C(H, t)` subsets, `M = t N / H`, with the
/// `K_mbs` requested files broadcast whole and the rest served by the better of unicast
/// top-up and multi-round XORs. Returns `(M, R_mbs)` for `t = 0..=H`.
pub fn uncoded_shared_points(topology: &Topology) -> Vec<(Rational, Rational)> {
    let h = topology.h();
    let n = Rational::from(topology.n());
    let k_mbs = Rational::from(topology.k_mbs());
    let Some(residual) = topology.residual_files() else {
        return vec![(Rational::zero(), n)];
    };
    let distinct = Rational::from(residual.min(topology.k_sbs()));
    let clipped = topology.clipped_occupancy();
    (0..=h)
        .map(|t| {
            let m = Rational::from(t) * &n / Rational::from(h);
            let unicast = &distinct * Rational::new((h - t) as i64, h as i64);
            let load = (&k_mbs + unicast.min(multiround_load(&clipped, t))).min(Rational::from(topology.n()));
            (m, load)
        })
        .collect()
}

/// Sidelink counterpart of [`uncoded_shared_points`] at `R_mbs = K_mbs`: `(M, R_sbs)` for `t = 1..=H`.
pub fn uncoded_sidelink_points(topology: &Topology) -> Vec<(Rational, Rational)> {
    let h = topology.h();
    let Some(residual) = topology.residual_files() else {
        return Vec::new();
    };
    if h < 2 {
        return Vec::new();
    }
    let n = Rational::from(topology.n());
    let distinct = Rational::from(residual.min(topology.k_sbs()));
    let clipped = topology.clipped_occupancy();
    (1..=h)
        .map(|t| {
            let m = Rational::from(t) * &n / Rational::from(h);
            let relay = &distinct * Rational::new((h - t) as i64, (h - 1) as i64);
            (m, relay.min(regrouped_sidelink_load(&clipped, t)))
        })
        .collect()
}

/// Symmetric coded placement with the plain multi-round sidelink delivery: `(M, R_sbs)` for `t = 1..=H`.
pub fn direct_sidelink_points(topology: &Topology) -> Vec<(Rational, Rational)> {
    let h = topology.h();
    let Some(residual) = topology.residual_files() else {
        return Vec::new();
    };
    let clipped = topology.clipped_occupancy();
    (1..=h)
        .map(|t| {
            let m = Rational::from(t * residual) / Rational::from(h);
            (m, direct_sidelink_load(&clipped, t))
        })
        .collect()
}

/// Load of one curve at a cache size, `None` where the curve is undefined.
type CurveFn = Box<dyn Fn(&Rational) -> Option<Rational>>;

fn grid(hi: i64, step: Rational) -> Vec<Rational> {
    crate::oracle::grid(&Rational::from(hi), &step).expect("positive step")
}

fn tabulate(id: FigureId, ms: &[Rational], curves: Vec<(String, CurveFn)>) -> Figure {
    let (labels, fns): (Vec<_>, Vec<_>) = curves.into_iter().unzip();
    let rows = ms.iter().map(|m| (m.clone(), fns.iter().map(|f| f(m)).collect())).collect();
    Figure { id, x_label: "M".into(), labels, rows }
}

fn envelope_fn(points: &[(Rational, Rational)]) -> Result<CurveFn> {
    let env = lower_convex_envelope(points)?;
    Ok(Box::new(move |m| curve_value(&env, m)))
}

fn converse_downlink(topology: &Topology) -> CurveFn {
    let topology = topology.clone();
    Box::new(move |m| {
        let corners = region_corners(&converse_system(&topology, m).ok()?).ok()?;
        corners.first().filter(|c| c.0.is_zero()).map(|c| c.1.clone())
    })
}

fn converse_sidelink(topology: &Topology) -> CurveFn {
    let topology = topology.clone();
    Box::new(move |m| {
        let corners = region_corners(&converse_system(&topology, m).ok()?).ok()?;
        min_sidelink_at(&corners, &Rational::from(topology.k_mbs()))
    })
}

fn family_downlink(topology: &Topology, family: Family) -> Result<CurveFn> {
    let curve = shared_curve(&achievable_points(topology, family)?)?;
    Ok(Box::new(move |m| curve_value(&curve, m)))
}

fn family_sidelink(topology: &Topology, family: Family) -> Result<CurveFn> {
    let curve = sidelink_curve(&achievable_points(topology, family)?, &Rational::from(topology.k_mbs()))?;
    Ok(Box::new(move |m| curve_value(&curve, m)))
}

fn downlink_figure(id: FigureId, topology: &Topology, ms: &[Rational], with_asym: bool) -> Result<Figure> {
    let mut curves = vec![
        ("converse".to_string(), converse_downlink(topology)),
        ("symmetric".to_string(), family_downlink(topology, Family::Sym)?),
    ];
    if with_asym {
        curves.push(("asymmetric".to_string(), family_downlink(topology, Family::Asym)?));
    }
    curves.push(("uncoded_placement".to_string(), envelope_fn(&uncoded_shared_points(topology))?));
    Ok(tabulate(id, ms, curves))
}

fn sidelink_figure(id: FigureId, topology: &Topology, ms: &[Rational], with_asym: bool) -> Result<Figure> {
    let mut curves = vec![
        ("converse".to_string(), converse_sidelink(topology)),
        ("symmetric".to_string(), family_sidelink(topology, Family::Sym)?),
    ];
    if with_asym {
        curves.push(("asymmetric".to_string(), family_sidelink(topology, Family::Asym)?));
    }
    curves.push(("uncoded_placement".to_string(), envelope_fn(&uncoded_sidelink_points(topology))?));
    curves.push(("direct_sidelink".to_string(), envelope_fn(&direct_sidelink_points(topology))?));
    Ok(tabulate(id, ms, curves))
}

fn converse_corners_figure() -> Result<Figure> {
    let corners = region_corners(&converse_system(&small_topology(), &q(5, 1))?)?;
    Ok(Figure {
        id: FigureId::Two,
        x_label: "R_sbs".into(),
        labels: vec!["R_mbs".into()],
        rows: corners.into_iter().map(|(s, m)| (s, vec![Some(m)])).collect(),
    })
}

fn wide_figure() -> Result<Figure> {
    let topology = wide_topology();
    let phi = wide_partition();
    let strategy = PartitionStrategy::Given(phi.clone());
    let asym: Vec<(Rational, Rational)> = (0..=phi.g())
        .map(|t| asym_shared_point(&topology, phi.g(), t, &strategy).map(|p| (p.point.m, p.point.r_mbs)))
        .collect::<Result<_>>()?;
    let curves = vec![
        ("asymmetric".to_string(), envelope_fn(&asym)?),
        ("uncoded_placement".to_string(), envelope_fn(&uncoded_shared_points(&topology))?),
    ];
    Ok(tabulate(FigureId::Six, &grid(360, q(6, 1)), curves))
}

/// Expected-load points of one family of topology-agnostic schemes.
fn agnostic_points(
    dist: &TopologyDistribution,
    partitions: &[Partition],
    all_n: bool,
    sidelink: bool,
    opts: &AgnosticOptions,
) -> Result<Vec<(Rational, Rational)>> {
    let n_files = dist.n;
    let mut out = Vec::new();
    for phi in partitions {
        let g = phi.g();
        let t_range = if sidelink { 1..=g } else { 0..=g };
        for t in t_range {
            let ns: Vec<usize> = (0..if all_n { n_files } else { 1 })
                .filter(|&n| !sidelink || (n_files - n) * t >= n_files)
                .collect();
            if ns.is_empty() {
                continue;
            }
            let pts = if sidelink {
                agnostic_sidelink_sweep(dist, phi, t, &ns, opts)?
            } else {
                agnostic_shared_sweep(dist, phi, t, &ns, opts)?
            };
            for p in pts {
                let load = if sidelink { &p.r_sbs } else { &p.r_mbs };
                let value = Rational::from_f64(load.value).ok_or_else(|| Error::Domain("non-finite estimate".into()))?;
                out.push((p.m, value));
            }
        }
    }
    Ok(out)
}

fn agnostic_figure(id: FigureId, sidelink: bool) -> Result<Figure> {
    let dist = reference_distribution();
    let h = dist.h();
    let opts = AgnosticOptions::new(Evaluation::MonteCarlo { samples: AGNOSTIC_SAMPLES, seed: AGNOSTIC_SEED });
    let singletons = vec![Partition::singletons(h)];
    let min_g = if sidelink { 2 } else { 1 };
    let balanced: Vec<Partition> = (min_g..=h).map(|g| variance_partition(&dist, g)).collect::<Result<_>>()?;
    let curves = vec![
        ("uncoded_placement".to_string(), envelope_fn(&agnostic_points(&dist, &singletons, false, sidelink, &opts)?)?),
        ("inter_file".to_string(), envelope_fn(&agnostic_points(&dist, &singletons, true, sidelink, &opts)?)?),
        ("proposed".to_string(), envelope_fn(&agnostic_points(&dist, &balanced, true, sidelink, &opts)?)?),
    ];
    Ok(tabulate(id, &grid(dist.n as i64, q(2, 1)), curves))
}

/// Curve data for one figure. Output is deterministic.
pub fn figure(id: FigureId) -> Result<Figure> {
    match id {
        FigureId::Two => converse_corners_figure(),
        FigureId::ThreeA => downlink_figure(id, &small_topology(), &grid(20, q(1, 4)), false),
        FigureId::ThreeB => sidelink_figure(id, &small_topology(), &grid(20, q(1, 4)), false),
        FigureId::FiveA => downlink_figure(id, &skewed_topology(), &grid(70, q(1, 1)), true),
        FigureId::FiveB => sidelink_figure(id, &skewed_topology(), &grid(70, q(1, 1)), true),
        FigureId::Six => wide_figure(),
        FigureId::SevenA => agnostic_figure(id, false),
        FigureId::SevenB => agnostic_figure(id, true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converse_corners_csv() {
        let csv = figure(FigureId::Two).unwrap().to_csv();
        assert_eq!(csv, "R_sbs,R_mbs\n0,8.125\n2.25,5.875\n6,4\n");
    }

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.to_string().parse::<FigureId>().unwrap(), id);
        }
        assert!("4".parse::<FigureId>().is_err());
    }

    #[test]
    fn wide_partition_beats_uncoded_placement_from_24() {
        let fig = figure(FigureId::Six).unwrap();
        let asym = fig.column("asymmetric").unwrap();
        let base = fig.column("uncoded_placement").unwrap();
        let topo = wide_topology();
        for ((m, a), (_, b)) in asym.iter().zip(&base) {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            if *m < 24 {
                continue;
            }
            if a == b {
                // Equal only where both already meet the outer bound.
                let corners = region_corners(&converse_system(&topo, m).unwrap()).unwrap();
                assert_eq!(&corners[0].1, a, "M = {m}");
                assert!(*m >= 348, "M = {m}");
            } else {
                assert!(a < b, "M = {m}");
            }
        }
    }

    #[test]
    fn small_topology_curves_sit_above_converse() {
        for id in [FigureId::ThreeA, FigureId::ThreeB] {
            let fig = figure(id).unwrap();
            let lower = fig.column("converse").unwrap();
            for label in &fig.labels[1..] {
                for ((m, lb), (_, v)) in lower.iter().zip(fig.column(label).unwrap()) {
                    if let (Some(lb), Some(v)) = (lb, v) {
                        assert!(&v >= lb, "{id} {label} at M = {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn uncoded_placement_needs_more_memory() {
        let topo = small_topology();
        let pts = uncoded_shared_points(&topo);
        assert_eq!(pts[0], (q(0, 1), q(20, 1)));
        assert_eq!(pts.last().unwrap(), &(q(20, 1), q(4, 1)));
    }
}
