//! Cross-module properties on random topologies.

mod common;

use fogran::converse::converse_system;
use fogran::region::{achievable_points, slice, Family};
use fogran::scheme::Approach;
use fogran::scheme_sym::{sym_per_demand_loads, SymSchemeParams};
use fogran::{DemandVector, Rational, Topology};
use proptest::prelude::*;

fn topology() -> impl Strategy<Value = Topology> {
    (1usize..=5, 0usize..=6, 2usize..=16)
        .prop_flat_map(|(h, k_mbs, n)| (Just(k_mbs), proptest::collection::vec(1usize..=8, h), Just(n)))
        .prop_map(|(k, l, n)| Topology::new(k, l, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn achievable_points_respect_the_outer_bound(topo in topology()) {
        for family in [Family::Sym, Family::Asym] {
            for p in achievable_points(&topo, family).unwrap() {
                let system = converse_system(&topo, &p.m).unwrap();
                prop_assert!(system.contains(&p.r_mbs, &p.r_sbs), "{topo} {family:?} {p}");
            }
        }
    }

    #[test]
    fn achievable_slice_lies_inside_the_outer_bound(topo in topology(), j in 0i64..=8) {
        let m = Rational::new(j * topo.n() as i64, 8);
        let system = converse_system(&topo, &m).unwrap();
        let frontier = slice(&achievable_points(&topo, Family::Sym).unwrap(), &m).unwrap();
        for (r_sbs, r_mbs) in &frontier.vertices {
            prop_assert!(system.contains(r_mbs, r_sbs));
        }
    }

    #[test]
    fn per_demand_loads_never_exceed_worst_case(topo in topology(), seed in any::<u64>()) {
        prop_assume!(topo.residual_files().is_some());
        let files: Vec<usize> = (0..topo.k()).map(|i| ((seed >> (i % 60)) as usize + i) % topo.n() + 1).collect();
        let d = DemandVector::new(&topo, files).unwrap();
        for t in 1..=topo.h() {
            let params = SymSchemeParams::new(&topo, t).unwrap();
            for approach in Approach::ALL {
                let (a, b) = sym_per_demand_loads(&params, &d, approach).unwrap();
                let (wa, wb) = params.scheme(approach).unwrap().worst_case_loads(&topo);
                prop_assert!(a <= wa && b <= wb, "{topo} t={t} {approach}");
            }
        }
    }
}

#[test]
fn corpus_helpers_cover_the_small_space() {
    let corpus = common::small_corpus(3, 5, 6);
    assert!(corpus.iter().all(|t| t.h() <= 3 && t.n() <= 5 && t.k() <= 6 && t.n() > t.k_mbs()));
    assert!(corpus.len() > 200);
}
