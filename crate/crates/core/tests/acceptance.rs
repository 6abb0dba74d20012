//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fogran::agnostic::{
    agnostic_shared_point, agnostic_sidelink_point, reference_distribution, sanity_tail_probability, AgnosticOptions,
    Evaluation, TopologyDistribution,
};
use fogran::codec::{block_length, simulate};
use fogran::converse::{converse_system, cutset_bound, min_sidelink_at, region_corners, sum_bound_rhs};
use fogran::delivery::plan;
use fogran::oracle::{demand_space_size, gap_report, worst_case_demand, DemandSpace, DEFAULT_DEMAND_CAP};
use fogran::partition::{enumerate_partitions, Partition};
use fogran::region::{achievable_points, curve_value, shared_curve, sidelink_curve, slice, Family};
use fogran::scheme::{Approach, Scheme};
use fogran::scheme_asym::{
    asym_shared_point, asym_sidelink_point, subpacketization_level, PartitionStrategy, Subpacketization,
};
use fogran::scheme_sym::{sym_sidelink_point, SymSchemeParams};
use fogran::{q, DemandVector, MemoryLoadPoint, Rational, Topology};
use num_bigint::BigInt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn three_sbs() -> Topology {
    Topology::new(2, vec![2, 1, 1], 6).unwrap()
}

fn small_topology() -> Topology {
    Topology::new(4, vec![6, 4, 3, 3], 20).unwrap()
}

fn skewed_topology() -> Topology {
    Topology::new(10, vec![20, 20, 8, 6, 4, 2], 70).unwrap()
}

fn converse_corners_at_five() -> Outcome {
    let corners = region_corners(&converse_system(&small_topology(), &q(5, 1)).map_err(err)?).map_err(err)?;
    let want = vec![(q(0, 1), q(65, 8)), (q(9, 4), q(47, 8)), (q(6, 1), q(4, 1))];
    ensure!(corners == want, "corners {corners:?}");
    Ok("(0, 65/8), (9/4, 47/8), (6, 4)".into())
}

fn worked_sidelink_case() -> Outcome {
    let topo = three_sbs();
    let point = sym_sidelink_point(&SymSchemeParams::new(&topo, 2).map_err(err)?).map_err(err)?;
    ensure!(point == MemoryLoadPoint::new(q(8, 3), q(2, 1), q(2, 3)), "point {point}");

    let direct = Scheme::symmetric(&topo, 2, Approach::SideDirect).map_err(err)?;
    let (_, direct_sbs) = direct.worst_case_loads(&topo);
    ensure!(direct_sbs == q(5, 6), "direct extension sends {direct_sbs}");

    let scheme = Scheme::symmetric(&topo, 2, Approach::Side2).map_err(err)?;
    let d = DemandVector::new(&topo, vec![5, 6, 1, 2, 3, 4]).map_err(err)?;
    let p = plan(&topo, &scheme, &d).map_err(err)?;
    let direct_plan = plan(&topo, &direct, &d).map_err(err)?;
    ensure!(direct_plan.r_sbs() == q(5, 6), "direct plan sends {}", direct_plan.r_sbs());
    let tr = simulate(&topo, &scheme, &d, 1, 1).map_err(err)?;
    ensure!(tr.b == block_length(&scheme, 1) && tr.b == 6, "B = {}", tr.b);
    ensure!(tr.decoded.len() == 6 && tr.decoded.iter().all(|&x| x), "decoded {:?}", tr.decoded);
    ensure!((tr.r_mbs.clone(), tr.r_sbs.clone()) == (q(2, 1), q(2, 3)), "measured ({}, {})", tr.r_mbs, tr.r_sbs);
    ensure!((p.r_mbs(), p.r_sbs()) == (q(2, 1), q(2, 3)), "plan ({}, {})", p.r_mbs(), p.r_sbs());
    Ok(format!("(8/3, 2, 2/3); direct 5/6; B = {} decodes 6/6 at (2, 2/3)", tr.b))
}

fn worked_grouped_case() -> Outcome {
    let topo = three_sbs();
    let phi = Partition::parse("1|2,3", &topo).map_err(err)?;
    let grouped = asym_shared_point(&topo, 2, 1, &PartitionStrategy::Given(phi.clone())).map_err(err)?;
    ensure!(grouped.point == MemoryLoadPoint::new(q(2, 1), q(3, 1), q(0, 1)), "grouped {}", grouped.point);
    let sym = shared_curve(&achievable_points(&topo, Family::Sym).map_err(err)?).map_err(err)?;
    let at_two = curve_value(&sym, &q(2, 1));
    ensure!(at_two == Some(q(19, 6)), "symmetric envelope {at_two:?}");
    let scheme = Scheme::new(&topo, phi, 1, Approach::Shared2).map_err(err)?;
    let d = DemandVector::new(&topo, vec![5, 6, 1, 2, 3, 4]).map_err(err)?;
    let tr = simulate(&topo, &scheme, &d, 2, 1).map_err(err)?;
    ensure!(tr.decoded.iter().all(|&x| x), "decoded {:?}", tr.decoded);
    ensure!((tr.r_mbs.clone(), tr.r_sbs.clone()) == (q(3, 1), q(0, 1)), "measured ({}, {})", tr.r_mbs, tr.r_sbs);
    Ok("(2, 3, 0) vs (2, 19/6, 0); simulated (3, 0)".into())
}

fn quarter_grid(from: i64, to: i64) -> Vec<Rational> {
    (4 * from..=4 * to).map(|j| Rational::new(j, 4)).collect()
}

/// Downlink-only and sidelink optimality of a family's curves on `[from, N - K_mbs]`.
fn curves_meet_converse(topo: &Topology, family: Family, shared_from: i64, side_from: i64) -> Result<usize, String> {
    let points = achievable_points(topo, family).map_err(err)?;
    let k_mbs = Rational::from(topo.k_mbs());
    let shared = shared_curve(&points).map_err(err)?;
    let side = sidelink_curve(&points, &k_mbs).map_err(err)?;
    let residual = (topo.n() - topo.k_mbs()) as i64;
    let mut checked = 0;
    for m in quarter_grid(shared_from.min(side_from), residual) {
        let corners = region_corners(&converse_system(topo, &m).map_err(err)?).map_err(err)?;
        if m >= shared_from {
            let lower = corners[0].1.clone();
            let got = curve_value(&shared, &m);
            ensure!(corners[0].0.is_zero() && got.as_ref() == Some(&lower), "downlink at M = {m}: {got:?} vs {lower}");
            checked += 1;
        }
        if m >= side_from {
            let lower = min_sidelink_at(&corners, &k_mbs);
            let got = curve_value(&side, &m);
            ensure!(got == lower, "sidelink at M = {m}: {got:?} vs {lower:?}");
            checked += 1;
        }
    }
    Ok(checked)
}

fn optimality_regimes() -> Outcome {
    // Library no larger than the cache-less population.
    for (k_mbs, l, n) in [(5, vec![2], 3), (4, vec![3, 1], 4), (6, vec![1, 1, 1], 2)] {
        let topo = Topology::new(k_mbs, l, n).unwrap();
        for m in 0..=n as i64 {
            let corners = region_corners(&converse_system(&topo, &q(m, 1)).map_err(err)?).map_err(err)?;
            ensure!(corners == vec![(q(0, 1), Rational::from(n))], "N <= K_mbs corners {corners:?}");
        }
        for family in [Family::Sym, Family::Asym] {
            let pts = achievable_points(&topo, family).map_err(err)?;
            ensure!(pts == vec![MemoryLoadPoint::new(q(0, 1), Rational::from(n), q(0, 1))], "N <= K_mbs points {pts:?}");
        }
    }
    // Cache holds every file the SBS users can want.
    for topo in [three_sbs(), small_topology(), Topology::new(0, vec![3, 2, 2, 1], 7).unwrap()] {
        let residual = topo.n() - topo.k_mbs();
        let pts = achievable_points(&topo, Family::Sym).map_err(err)?;
        for m in residual..=topo.n() {
            let m = Rational::from(m);
            let corners = region_corners(&converse_system(&topo, &m).map_err(err)?).map_err(err)?;
            let want = vec![(q(0, 1), Rational::from(topo.k_mbs()))];
            ensure!(corners == want, "large-cache corners {corners:?}");
            let frontier = slice(&pts, &m).ok_or("empty slice")?;
            ensure!(frontier.vertices == want, "large-cache frontier {:?}", frontier.vertices);
        }
    }
    let small = curves_meet_converse(&small_topology(), Family::Sym, 12, 12)?;
    let skewed = curves_meet_converse(&skewed_topology(), Family::Asym, 40, 45)?;
    Ok(format!("trivial regimes exact; {small} + {skewed} grid comparisons equal"))
}

fn gap_corpus() -> Outcome {
    let corpus = common::random_corpus(220, 6, 40, 11);
    let mut rows = 0;
    let mut kinds = std::collections::BTreeSet::new();
    for topo in &corpus {
        for row in gap_report(topo, &common::memory_grid(topo)).map_err(err)? {
            ensure!(row.holds, "{topo}: {row:?}");
            kinds.insert(format!("{:?}", row.kind).split_whitespace().next().unwrap().to_string());
            rows += 1;
        }
    }
    ensure!(kinds.len() == 5, "only regimes {kinds:?} exercised");
    Ok(format!("{} topologies, {rows} rows, regimes {kinds:?}", corpus.len()))
}

fn oracle_equivalence() -> Outcome {
    let corpus = common::small_corpus(3, 5, 6);
    let mut schemes = 0;
    let mut demands = 0u64;
    for topo in &corpus {
        let raw_ok = demand_space_size(topo) <= 1296;
        for scheme in common::all_schemes(topo) {
            let worst = worst_case_demand(topo, &scheme, DemandSpace::Compressed, DEFAULT_DEMAND_CAP)
                .map_err(|e| format!("{topo} {scheme:?}: {e}"))?;
            let formula = scheme.worst_case_loads(topo);
            ensure!(
                (worst.r_mbs.clone(), worst.r_sbs.clone()) == formula,
                "{topo} {scheme:?}: searched ({}, {}) formula ({}, {})",
                worst.r_mbs,
                worst.r_sbs,
                formula.0,
                formula.1
            );
            if raw_ok {
                let raw = worst_case_demand(topo, &scheme, DemandSpace::Raw, DEFAULT_DEMAND_CAP).map_err(err)?;
                ensure!((raw.r_mbs, raw.r_sbs) == formula, "{topo} {scheme:?}: raw search differs");
            }
            let d = DemandVector::new(topo, worst.demand.clone()).map_err(err)?;
            let p = plan(topo, &scheme, &d).map_err(err)?;
            let tr = simulate(topo, &scheme, &d, 5, 1).map_err(|e| format!("{topo} {scheme:?}: {e}"))?;
            ensure!(tr.decoded.iter().all(|&x| x), "{topo} {scheme:?} {:?}: not decoded", worst.demand);
            ensure!(
                (tr.r_mbs.clone(), tr.r_sbs.clone()) == (p.r_mbs(), p.r_sbs()),
                "{topo} {scheme:?}: measured ({}, {}) plan ({}, {})",
                tr.r_mbs,
                tr.r_sbs,
                p.r_mbs(),
                p.r_sbs()
            );
            schemes += 1;
            demands += worst.demands_checked;
        }
    }
    Ok(format!("{} topologies, {schemes} schemes, {demands} demand plans", corpus.len()))
}

fn containment() -> Outcome {
    let corpus = common::random_corpus(220, 6, 40, 11);
    let mut checked = 0;
    for topo in corpus.iter().filter(|t| t.residual_files().is_some()) {
        let sym = achievable_points(topo, Family::Sym).map_err(err)?;
        let asym = achievable_points(topo, Family::Asym).map_err(err)?;
        let k_mbs = Rational::from(topo.k_mbs());
        let pairs = [
            (shared_curve(&sym).map_err(err)?, shared_curve(&asym).map_err(err)?),
            (sidelink_curve(&sym, &k_mbs).map_err(err)?, sidelink_curve(&asym, &k_mbs).map_err(err)?),
        ];
        for m in common::memory_grid(topo) {
            for (s, a) in &pairs {
                match (curve_value(s, &m), curve_value(a, &m)) {
                    (Some(sv), Some(av)) => ensure!(av <= sv, "{topo} M = {m}: grouped {av} above symmetric {sv}"),
                    (Some(sv), None) => return Err(format!("{topo} M = {m}: grouped undefined, symmetric {sv}")),
                    _ => {}
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} comparisons"))
}

fn cutset_dominance() -> Outcome {
    let corpus = common::random_corpus(220, 6, 40, 11);
    let mut checked = 0;
    for topo in corpus.iter().filter(|t| t.residual_files().is_some()) {
        for m in common::memory_grid(topo) {
            for s in 1..=topo.h() {
                let Ok(cut) = cutset_bound(topo, &m, s) else { continue };
                let sum = sum_bound_rhs(topo, &m, s).map_err(err)?;
                ensure!(cut <= sum, "{topo} M = {m} s = {s}: cut-set {cut} above {sum}");
                checked += 1;
            }
        }
    }
    ensure!(checked > 0, "no applicable cut-set bound");
    Ok(format!("{checked} comparisons"))
}

fn subpacketization() -> Outcome {
    let sym = subpacketization_level(Subpacketization::Sym { h: 30, t: 15 });
    let grouped = subpacketization_level(Subpacketization::Asym { g: 12, t: 6 });
    ensure!(sym == BigInt::from(155_117_520u64), "C(30,15) = {sym}");
    ensure!(grouped == BigInt::from(924u64), "C(12,6) = {grouped}");
    let ratio = Rational::from_bigints(sym, grouped).to_f64();
    ensure!((ratio / 1.679e5 - 1.0).abs() < 1e-3 && ratio >= 1e5, "ratio {ratio}");
    Ok(format!("155117520 / 924 = {ratio:.4e}"))
}

fn agnostic_reduction() -> Outcome {
    let exhaustive = AgnosticOptions::new(Evaluation::Exhaustive { cap: 1_000_000 });
    let mut checked = 0;
    for topo in [
        three_sbs(),
        small_topology(),
        Topology::new(1, vec![4, 2, 1], 8).unwrap(),
        Topology::new(0, vec![3, 3, 2, 1], 9).unwrap(),
    ] {
        let dist = TopologyDistribution::point_mass(&topo);
        let n = topo.k_mbs();
        for g in 1..=topo.h() {
            for phi in enumerate_partitions(&topo, g).map_err(err)? {
                for t in 0..=g {
                    let given = PartitionStrategy::Given(phi.clone());
                    let want = asym_shared_point(&topo, g, t, &given).map_err(err)?.point;
                    let got = agnostic_shared_point(&dist, &phi, t, n, &exhaustive).map_err(err)?.point();
                    ensure!(got == want, "{topo} {phi} t = {t}: shared {got} vs {want}");
                    checked += 1;
                    let covered = (topo.n() - n) * t >= topo.n();
                    if g >= 2 && t >= 1 && covered {
                        let regrouped = asym_sidelink_point(&topo, g, t, &given).map_err(err)?.point;
                        let relay = Scheme::new(&topo, phi.clone(), t, Approach::Side1).map_err(err)?;
                        let want = regrouped.r_sbs.min(relay.worst_case_loads(&topo).1);
                        let got = agnostic_sidelink_point(&dist, &phi, t, n, &exhaustive).map_err(err)?.point();
                        ensure!(got.m == regrouped.m && got.r_mbs == regrouped.r_mbs, "{topo} {phi}: sidelink {got}");
                        ensure!(got.r_sbs == want, "{topo} {phi} t = {t}: sidelink {} vs {want}", got.r_sbs);
                        checked += 1;
                    }
                }
            }
        }
    }
    let tail = sanity_tail_probability(&reference_distribution(), 10_000_000, 2024).map_err(err)?;
    ensure!(tail == 0.0, "tail estimate {tail}");
    Ok(format!("{checked} point-mass reductions exact; 0 of 10^7 draws exceed N = 140"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("converse corners", converse_corners_at_five, Duration::from_secs(1)),
        ("sidelink worked example", worked_sidelink_case, Duration::from_secs(1)),
        ("grouped worked example", worked_grouped_case, Duration::from_secs(1)),
        ("exact-optimality regimes", optimality_regimes, Duration::from_secs(10)),
        ("gap guarantees", gap_corpus, Duration::from_secs(60)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(300)),
        ("containment", containment, Duration::from_secs(300)),
        ("cut-set dominance", cutset_dominance, Duration::from_secs(300)),
        ("subpacketization", subpacketization, Duration::from_secs(1)),
        ("topology-agnostic reduction", agnostic_reduction, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
