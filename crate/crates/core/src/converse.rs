//! Outer bound on the `(R_mbs, R_sbs)` region at a fixed cache size.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::topology::Topology;

/// Which bound family produced an inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Nonnegative,
    Downlink,
    Sum { s: usize },
    Weighted { s: usize },
    AllSbs,
}

/// `a * R_mbs + b * R_sbs >= c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub kind: BoundKind,
}

impl Inequality {
    pub fn holds(&self, r_mbs: &Rational, r_sbs: &Rational) -> bool {
        &self.a * r_mbs + &self.b * r_sbs >= self.c
    }

    pub fn tight(&self, r_mbs: &Rational, r_sbs: &Rational) -> bool {
        &self.a * r_mbs + &self.b * r_sbs == self.c
    }
}

#[derive(Clone, Debug)]
pub struct HalfspaceSystem {
    pub inequalities: Vec<Inequality>,
    pub topology: Topology,
    pub m: Rational,
}

impl HalfspaceSystem {
    pub fn contains(&self, r_mbs: &Rational, r_sbs: &Rational) -> bool {
        self.inequalities.iter().all(|i| i.holds(r_mbs, r_sbs))
    }
}

/// `[1 - sM/(N - K_mbs)]^+`, the fraction of a file an `s`-set of caches misses.
fn miss_fraction(s: usize, m: &Rational, residual: usize) -> Rational {
    (Rational::one() - Rational::from(s) * m / Rational::from(residual)).pos()
}

/// Right-hand side of the sum-rate bound `R_mbs + R_sbs >= ...` for the `s` fullest SBSs.
pub fn sum_bound_rhs(topology: &Topology, m: &Rational, s: usize) -> Result<Rational> {
    let residual = topology
        .residual_files()
        .ok_or_else(|| Error::Inapplicable("requires N > K_mbs".into()))?;
    let lead = topology.l_prefix(s).min(residual);
    Ok(Rational::from(topology.k_mbs()) + Rational::from(lead) * miss_fraction(s, m, residual))
}

fn check_memory(topology: &Topology, m: &Rational) -> Result<()> {
    if m.is_negative() || m > &Rational::from(topology.n()) {
        return Err(Error::Domain(format!("cache size {m} outside [0, {}]", topology.n())));
    }
    Ok(())
}

/// All outer-bound inequalities that apply to `topology` at cache size `m`.
pub fn converse_system(topology: &Topology, m: &Rational) -> Result<HalfspaceSystem> {
    check_memory(topology, m)?;
    let one = Rational::one();
    let zero = Rational::zero();
    let mut ineq = vec![
        Inequality { a: one.clone(), b: zero.clone(), c: zero.clone(), kind: BoundKind::Nonnegative },
        Inequality { a: zero.clone(), b: one.clone(), c: zero.clone(), kind: BoundKind::Nonnegative },
        Inequality {
            a: one.clone(),
            b: zero.clone(),
            c: Rational::from(topology.n().min(topology.k_mbs())),
            kind: BoundKind::Downlink,
        },
    ];
    let h = topology.h();
    if let Some(residual) = topology.residual_files() {
        let k_mbs = Rational::from(topology.k_mbs());
        for s in 1..=h {
            ineq.push(Inequality {
                a: one.clone(),
                b: one.clone(),
                c: sum_bound_rhs(topology, m, s)?,
                kind: BoundKind::Sum { s },
            });
        }
        if topology.n() >= topology.k() {
            for s in 1..=h {
                let frac = Rational::new(s as i64, h as i64);
                ineq.push(Inequality {
                    a: one.clone(),
                    b: &one - &frac,
                    c: &k_mbs + frac * Rational::from(topology.k_sbs()) * miss_fraction(s, m, residual),
                    kind: BoundKind::Weighted { s },
                });
            }
        }
        let lead = topology.k_sbs().min(residual);
        ineq.push(Inequality {
            a: one.clone(),
            b: zero.clone(),
            c: &k_mbs + Rational::from(lead) * miss_fraction(h, m, residual),
            kind: BoundKind::AllSbs,
        });
    }
    Ok(HalfspaceSystem { inequalities: ineq, topology: topology.clone(), m: m.clone() })
}

fn intersect(p: &Inequality, r: &Inequality) -> Option<(Rational, Rational)> {
    let det = &p.a * &r.b - &p.b * &r.a;
    if det.is_zero() {
        return None;
    }
    let r_mbs = (&p.c * &r.b - &p.b * &r.c) / &det;
    let r_sbs = (&p.a * &r.c - &p.c * &r.a) / &det;
    Some((r_sbs, r_mbs))
}

/// Pareto-optimal vertices `(R_sbs, R_mbs)` of the region, sorted by `R_sbs`.
pub fn region_corners(system: &HalfspaceSystem) -> Result<Vec<(Rational, Rational)>> {
    let ineq = &system.inequalities;
    let mut vertices = Vec::new();
    for i in 0..ineq.len() {
        for j in i + 1..ineq.len() {
            if let Some((rs, rm)) = intersect(&ineq[i], &ineq[j]) {
                if system.contains(&rm, &rs) {
                    vertices.push((rs, rm));
                }
            }
        }
    }
    vertices.sort();
    vertices.dedup();
    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    let frontier = pareto_frontier(vertices);
    Ok(drop_collinear(frontier))
}

/// Points not weakly dominated by another, sorted by first coordinate.
pub(crate) fn pareto_frontier(mut points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    points.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for p in points {
        if out.last().is_none_or(|last| p.1 < last.1) {
            out.push(p);
        }
    }
    out
}

pub(crate) fn drop_collinear(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
            if cross.is_zero() {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Smallest `R_sbs` the outer bound allows when `R_mbs = r_mbs`, if any.
pub fn min_sidelink_at(corners: &[(Rational, Rational)], r_mbs: &Rational) -> Option<Rational> {
    let last = corners.last()?;
    if r_mbs < &last.1 {
        return None;
    }
    if r_mbs >= &corners[0].1 {
        return Some(corners[0].0.clone());
    }
    for w in corners.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if r_mbs >= &b.1 {
            let frac = (&a.1 - r_mbs) / (&a.1 - &b.1);
            return Some(&a.0 + frac * (&b.0 - &a.0));
        }
    }
    None
}

/// Cut-set lower bound on `R_mbs + R_sbs` from the `s` fullest SBSs.
pub fn cutset_bound(topology: &Topology, m: &Rational, s: usize) -> Result<Rational> {
    check_memory(topology, m)?;
    let residual = topology
        .residual_files()
        .ok_or_else(|| Error::Inapplicable("requires N > K_mbs".into()))?;
    if s == 0 || s > topology.h() {
        return Err(Error::Domain(format!("s = {s} outside 1..={}", topology.h())));
    }
    let ls = topology.l_prefix(s);
    if ls > residual {
        return Err(Error::Inapplicable(format!("L_[{s}] = {ls} exceeds N - K_mbs = {residual}")));
    }
    let rounds = residual / ls;
    let excess = Rational::from(ls) - Rational::from(s) * m / Rational::from(rounds);
    Ok(Rational::from(topology.k_mbs()) + excess.pos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn four_sbs() -> Topology {
        Topology::new(4, vec![6, 4, 3, 3], 20).unwrap()
    }

    #[test]
    fn four_sbs_corners() {
        let sys = converse_system(&four_sbs(), &q(5, 1)).unwrap();
        let s1 = sys.inequalities.iter().find(|i| i.kind == BoundKind::Sum { s: 1 }).unwrap();
        assert_eq!(s1.c, q(65, 8));
        let corners = region_corners(&sys).unwrap();
        assert_eq!(corners, vec![(q(0, 1), q(65, 8)), (q(9, 4), q(47, 8)), (q(6, 1), q(4, 1))]);
    }

    #[test]
    fn no_residual_library() {
        let t = Topology::new(5, vec![2, 1], 4).unwrap();
        let sys = converse_system(&t, &q(1, 1)).unwrap();
        assert_eq!(sys.inequalities.len(), 3);
        assert_eq!(region_corners(&sys).unwrap(), vec![(q(0, 1), q(4, 1))]);
    }

    #[test]
    fn full_residual_cache() {
        let corners = region_corners(&converse_system(&four_sbs(), &q(16, 1)).unwrap()).unwrap();
        assert_eq!(corners, vec![(q(0, 1), q(4, 1))]);
    }

    #[test]
    fn memory_domain() {
        assert!(converse_system(&four_sbs(), &q(-1, 1)).is_err());
        assert!(converse_system(&four_sbs(), &q(21, 1)).is_err());
    }

    #[test]
    fn cutset_values() {
        let t = Topology::new(2, vec![2, 2], 10).unwrap();
        assert_eq!(cutset_bound(&t, &q(2, 1), 1).unwrap(), q(7, 2));
        assert_eq!(cutset_bound(&t, &q(4, 1), 1).unwrap(), q(3, 1));
        assert_eq!(sum_bound_rhs(&t, &q(4, 1), 1).unwrap(), q(3, 1));
        assert_eq!(cutset_bound(&t, &q(0, 1), 2).unwrap(), q(6, 1));
        let wide = Topology::new(2, vec![5, 5], 10).unwrap();
        assert!(matches!(cutset_bound(&wide, &q(0, 1), 2), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn sidelink_lookup() {
        let corners = vec![(q(0, 1), q(65, 8)), (q(9, 4), q(47, 8)), (q(6, 1), q(4, 1))];
        assert_eq!(min_sidelink_at(&corners, &q(4, 1)), Some(q(6, 1)));
        assert_eq!(min_sidelink_at(&corners, &q(47, 8)), Some(q(9, 4)));
        assert_eq!(min_sidelink_at(&corners, &q(9, 1)), Some(q(0, 1)));
        assert_eq!(min_sidelink_at(&corners, &q(3, 1)), None);
    }
}
