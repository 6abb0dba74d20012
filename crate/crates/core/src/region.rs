//! Achievable regions: memory-load curves and `(R_sbs, R_mbs)` slices at a fixed cache size.

use crate::converse::{drop_collinear, pareto_frontier};
use crate::envelope::{evaluate, lower_convex_envelope};
use crate::error::Result;
use crate::rational::Rational;
use crate::scheme_asym::asym_points;
use crate::scheme_sym::sym_points;
use crate::topology::{MemoryLoadPoint, Topology};

/// Which placement family contributes points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Sym,
    Asym,
}

/// Broadcasting every requested file needs no cache: `(0, min(N, K), 0)`.
pub fn uncached_point(topology: &Topology) -> MemoryLoadPoint {
    MemoryLoadPoint::new(
        Rational::zero(),
        Rational::from(topology.n().min(topology.k())),
        Rational::zero(),
    )
}

/// Every corner point of a family, plus the uncached point. With `N <= K_mbs`
/// only the uncached point remains.
pub fn achievable_points(topology: &Topology, family: Family) -> Result<Vec<MemoryLoadPoint>> {
    let mut out = vec![uncached_point(topology)];
    if topology.residual_files().is_none() {
        return Ok(out);
    }
    let (shared, side) = match family {
        Family::Sym => sym_points(topology)?,
        Family::Asym => asym_points(topology)?,
    };
    out.extend(shared);
    out.extend(side);
    Ok(out)
}

/// Lower convex envelope of `(M, R_mbs)` over the points with no sidelink traffic.
pub fn shared_curve(points: &[MemoryLoadPoint]) -> Result<Vec<(Rational, Rational)>> {
    let pts: Vec<_> = points
        .iter()
        .filter(|p| p.r_sbs.is_zero())
        .map(|p| (p.m.clone(), p.r_mbs.clone()))
        .collect();
    lower_convex_envelope(&pts)
}

/// Lower convex envelope of `(M, R_sbs)` over the points whose downlink load is `r_mbs`.
pub fn sidelink_curve(points: &[MemoryLoadPoint], r_mbs: &Rational) -> Result<Vec<(Rational, Rational)>> {
    let pts: Vec<_> = points
        .iter()
        .filter(|p| &p.r_mbs == r_mbs)
        .map(|p| (p.m.clone(), p.r_sbs.clone()))
        .collect();
    lower_convex_envelope(&pts)
}

/// Smallest value of a curve usable at cache size `m` (memory beyond the curve's end is left idle).
pub fn curve_value(curve: &[(Rational, Rational)], m: &Rational) -> Option<Rational> {
    let last = curve.last()?;
    if m > &last.0 {
        return Some(last.1.clone());
    }
    evaluate(curve, m)
}

/// Pareto frontier of an upward-closed convex set in the `(R_sbs, R_mbs)` plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    /// Vertices sorted by `R_sbs` ascending (so `R_mbs` descending).
    pub vertices: Vec<(Rational, Rational)>,
}

impl Frontier {
    /// Convex frontier of the upward closure of the convex hull of `points` (`(R_sbs, R_mbs)` pairs).
    pub fn from_points(points: Vec<(Rational, Rational)>) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        let pareto = pareto_frontier(points);
        let mut hull: Vec<(Rational, Rational)> = Vec::with_capacity(pareto.len());
        for p in pareto {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
                if cross.is_positive() {
                    break;
                }
                hull.pop();
            }
            hull.push(p);
        }
        Some(Frontier { vertices: drop_collinear(hull) })
    }

    /// Inequalities `a R_mbs + b R_sbs >= c` (with `a, b >= 0`) describing the set.
    pub fn halfplanes(&self) -> Vec<(Rational, Rational, Rational)> {
        let v = &self.vertices;
        let first = &v[0];
        let last = &v[v.len() - 1];
        let mut out = vec![
            (Rational::zero(), Rational::one(), first.0.clone()),
            (Rational::one(), Rational::zero(), last.1.clone()),
        ];
        for w in v.windows(2) {
            let a = &w[1].0 - &w[0].0;
            let b = &w[0].1 - &w[1].1;
            let c = &b * &w[0].0 + &a * &w[0].1;
            out.push((a, b, c));
        }
        out
    }

    /// Whether `(r_sbs, r_mbs)` lies in the set.
    pub fn contains(&self, r_sbs: &Rational, r_mbs: &Rational) -> bool {
        self.halfplanes().iter().all(|(a, b, c)| a * r_mbs + b * r_sbs >= *c)
    }

    /// Smallest `alpha >= 0` with `alpha (r_sbs, r_mbs)` in the set, `None` if no scaling works.
    pub fn min_scale(&self, r_sbs: &Rational, r_mbs: &Rational) -> Option<Rational> {
        let mut alpha = Rational::zero();
        for (a, b, c) in self.halfplanes() {
            if !c.is_positive() {
                continue;
            }
            let dot = &a * r_mbs + &b * r_sbs;
            if !dot.is_positive() {
                return None;
            }
            alpha = alpha.max(c / dot);
        }
        Some(alpha)
    }
}

/// Achievable `(R_sbs, R_mbs)` frontier at cache size `m` by memory sharing among `points`.
pub fn slice(points: &[MemoryLoadPoint], m: &Rational) -> Option<Frontier> {
    let mut cands = Vec::new();
    for p in points {
        if &p.m <= m {
            cands.push((p.r_sbs.clone(), p.r_mbs.clone()));
        }
    }
    for lo in points.iter().filter(|p| &p.m < m) {
        for hi in points.iter().filter(|p| &p.m > m) {
            let frac = (m - &lo.m) / (&hi.m - &lo.m);
            let mix = |a: &Rational, b: &Rational| a + &frac * (b - a);
            cands.push((mix(&lo.r_sbs, &hi.r_sbs), mix(&lo.r_mbs, &hi.r_mbs)));
        }
    }
    Frontier::from_points(cands)
}
