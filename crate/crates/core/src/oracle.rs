//! Brute-force checks: worst-case demand search over explicit delivery plans,
//! and multiplicative gaps between the converse and the achievable regions.

use rayon::prelude::*;
use serde::Serialize;

use crate::converse::{converse_system, min_sidelink_at, region_corners};
use crate::delivery::plan;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::region::{achievable_points, slice, Family};
use crate::scheme::Scheme;
use crate::scheme_asym::has_isolated_leader;
use crate::topology::{DemandVector, MemoryLoadPoint, Topology};

pub const DEFAULT_DEMAND_CAP: u128 = 1_000_000;

/// Which demand vectors are searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandSpace {
    /// All `N^K` vectors.
    Raw,
    /// Vectors whose requested files are exactly `1..=m` for some `m`. Loads only
    /// depend on which users share a file and on the relative order of the
    /// requested files, so every vector has a representative here.
    Compressed,
}

#[derive(Clone, Debug, Serialize)]
pub struct WorstCase {
    /// Lexicographically smallest demand attaining the larger load of the scheme's class.
    pub demand: Vec<usize>,
    #[serde(rename = "R_mbs")]
    pub r_mbs: Rational,
    #[serde(rename = "R_sbs")]
    pub r_sbs: Rational,
    pub demands_checked: u64,
    pub space: DemandSpace,
}

fn pow_u128(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Size of the raw demand space.
pub fn demand_space_size(topology: &Topology) -> u128 {
    pow_u128(topology.n(), topology.k())
}

/// Demand with index `i` in lexicographic order over `radix^k` vectors (files 1-based).
fn decode(mut i: u128, radix: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (i % radix as u128) as usize + 1;
        i /= radix as u128;
    }
    out
}

fn uses_prefix(files: &[usize]) -> bool {
    let mut seen = vec![false; files.len() + 1];
    for &f in files {
        seen[f] = true;
    }
    let m = seen.iter().rposition(|&s| s).unwrap_or(0);
    seen[1..=m].iter().all(|&s| s)
}

/// Replaces files by their rank among the requested ones.
pub fn compress(files: &[usize]) -> Vec<usize> {
    let mut distinct: Vec<usize> = files.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    files.iter().map(|f| distinct.binary_search(f).expect("present") + 1).collect()
}

/// Every demand of `space`, in lexicographic order.
pub fn demands(topology: &Topology, space: DemandSpace, cap: u128) -> Result<Vec<Vec<usize>>> {
    let k = topology.k();
    let radix = match space {
        DemandSpace::Raw => topology.n(),
        DemandSpace::Compressed => topology.n().min(k.max(1)),
    };
    let size = pow_u128(radix, k);
    if size > cap {
        return Err(Error::DemandSpaceTooLarge { size, cap });
    }
    Ok((0..size)
        .map(|i| decode(i, radix, k))
        .filter(|d| space == DemandSpace::Raw || uses_prefix(d))
        .collect())
}

/// Per-demand loads from the explicit delivery plan, checked against the
/// closed-form per-demand loads.
pub fn plan_loads(topology: &Topology, scheme: &Scheme, d: &DemandVector) -> Result<(Rational, Rational)> {
    let p = plan(topology, scheme, d)?;
    let measured = (p.r_mbs(), p.r_sbs());
    let formula = scheme.profile_loads(topology, &p.profile);
    if measured != formula {
        return Err(Error::Mismatch(format!(
            "plan for {:?} sends ({}, {}) but the per-demand formula gives ({}, {})",
            d.files(),
            measured.0,
            measured.1,
            formula.0,
            formula.1
        )));
    }
    Ok(measured)
}

/// Searches every demand of `space` for the worst-case loads of `scheme`.
pub fn worst_case_demand(topology: &Topology, scheme: &Scheme, space: DemandSpace, cap: u128) -> Result<WorstCase> {
    let all = demands(topology, space, cap)?;
    let sidelink = scheme.approach.is_sidelink();
    let evaluated: Vec<(Vec<usize>, Rational, Rational)> = all
        .into_par_iter()
        .map(|files| {
            let d = DemandVector::new(topology, files.clone())?;
            let (a, b) = plan_loads(topology, scheme, &d)?;
            Ok((files, a, b))
        })
        .collect::<Result<_>>()?;
    let checked = evaluated.len() as u64;
    let mut best: Option<(Vec<usize>, Rational)> = None;
    let mut r_mbs = Rational::zero();
    let mut r_sbs = Rational::zero();
    for (files, a, b) in evaluated {
        let key = if sidelink { b.clone() } else { a.clone() };
        if best.as_ref().is_none_or(|(_, v)| key > *v) {
            best = Some((files, key));
        }
        r_mbs = r_mbs.max(a);
        r_sbs = r_sbs.max(b);
    }
    let (demand, _) = best.ok_or(Error::NoPoints)?;
    Ok(WorstCase { demand, r_mbs, r_sbs, demands_checked: checked, space })
}

/// Raw search when the space fits under `cap`, compressed otherwise.
pub fn worst_case_auto(topology: &Topology, scheme: &Scheme, cap: u128) -> Result<WorstCase> {
    if demand_space_size(topology) <= cap {
        worst_case_demand(topology, scheme, DemandSpace::Raw, cap)
    } else {
        worst_case_demand(topology, scheme, DemandSpace::Compressed, cap)
    }
}

/// Which guarantee a gap row checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    /// Region equals the converse (scale 1 on both loads).
    Exact,
    /// Downlink kept, sidelink scaled by `H/(H-1)`; symmetric family.
    SidelinkScaled,
    /// Both loads scaled by `2 min(H, (N - K_mbs)/M)`; symmetric family.
    UniformTwoG,
    /// Both loads scaled by 22 for equal occupancies; symmetric family.
    UniformTwentyTwo,
    /// Downlink kept, sidelink scaled by `G/(G-1)`; grouped family.
    GroupedSidelinkScaled { g: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    #[serde(rename = "M")]
    pub m: Rational,
    pub kind: GapKind,
    /// Converse corner as `(R_sbs, R_mbs)`.
    pub corner: (Rational, Rational),
    /// Smallest factor that makes the scaled corner achievable; `None` if none does.
    pub ratio: Option<Rational>,
    pub bound: Rational,
    pub holds: bool,
}

fn scale_ratio(frontier: &crate::region::Frontier, corner: &(Rational, Rational), sidelink_only: bool) -> Option<Rational> {
    let (r_sbs, r_mbs) = corner;
    if sidelink_only {
        let need = min_sidelink_at(&frontier.vertices, r_mbs)?;
        if need.is_zero() {
            Some(Rational::one())
        } else if r_sbs.is_zero() {
            None
        } else {
            Some((need / r_sbs).max(Rational::one()))
        }
    } else {
        frontier.min_scale(r_sbs, r_mbs).map(|a| a.max(Rational::one()))
    }
}

struct Regions {
    sym: Vec<MemoryLoadPoint>,
    asym: Option<Vec<MemoryLoadPoint>>,
}

fn regions(topology: &Topology, with_asym: bool) -> Result<Regions> {
    Ok(Regions {
        sym: achievable_points(topology, Family::Sym)?,
        asym: if with_asym { Some(achievable_points(topology, Family::Asym)?) } else { None },
    })
}

/// Grouped-family guarantee applies at this `G`.
fn grouped_applies(topology: &Topology, g: usize, m: &Rational) -> bool {
    let residual = Rational::from(topology.n() - topology.k_mbs());
    g >= 2
        && topology.n() >= topology.k_mbs() + topology.l(0)
        && has_isolated_leader(topology, g)
        && *m >= (Rational::one() - Rational::new(1, g as i64)) * residual
}

/// Compares converse corners with the achievable frontier at each `M` of `grid`
/// under every guarantee that applies there.
pub fn gap_report(topology: &Topology, grid: &[Rational]) -> Result<Vec<GapRow>> {
    let h = topology.h();
    let n = topology.n();
    let k_mbs = topology.k_mbs();
    let in_gap_regime = |m: &Rational| h >= 2 && n > k_mbs && *m < Rational::from(n - k_mbs);
    let want_asym = grid.iter().any(|m| in_gap_regime(m) && (2..=h).any(|g| grouped_applies(topology, g, m)));
    let reg = regions(topology, want_asym)?;
    let mut rows = Vec::new();
    for m in grid {
        if m.is_negative() || *m > Rational::from(n) {
            return Err(Error::Domain(format!("M = {m} outside [0, N]")));
        }
        let corners = region_corners(&converse_system(topology, m)?)?;
        let sym = slice(&reg.sym, m).ok_or(Error::NoPoints)?;
        let mut kinds: Vec<(GapKind, Rational, bool)> = Vec::new();
        if n <= k_mbs || *m >= Rational::from(n - k_mbs) {
            kinds.push((GapKind::Exact, Rational::one(), false));
        } else if h >= 2 {
            if n <= k_mbs + topology.l(0) {
                kinds.push((GapKind::SidelinkScaled, Rational::new(h as i64, h as i64 - 1), true));
            } else {
                let g = if m.is_zero() {
                    Rational::from(h)
                } else {
                    Rational::from(h).min(Rational::from(n - k_mbs) / m)
                };
                kinds.push((GapKind::UniformTwoG, Rational::from(2i64) * g, false));
                if topology.is_uniform() {
                    kinds.push((GapKind::UniformTwentyTwo, Rational::from(22i64), false));
                }
            }
            for g in 2..=h {
                if grouped_applies(topology, g, m) {
                    kinds.push((GapKind::GroupedSidelinkScaled { g }, Rational::new(g as i64, g as i64 - 1), true));
                }
            }
        }
        for (kind, bound, sidelink_only) in kinds {
            let frontier = match kind {
                GapKind::GroupedSidelinkScaled { .. } => {
                    slice(reg.asym.as_ref().expect("computed when needed"), m).ok_or(Error::NoPoints)?
                }
                _ => sym.clone(),
            };
            for corner in &corners {
                let ratio = scale_ratio(&frontier, corner, sidelink_only);
                let holds = ratio.as_ref().is_some_and(|r| *r <= bound);
                rows.push(GapRow { m: m.clone(), kind, corner: corner.clone(), ratio, bound: bound.clone(), holds });
            }
        }
    }
    Ok(rows)
}

/// Evenly spaced grid `0, step, ..., <= hi`.
pub fn grid(hi: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() {
        return Err(Error::Domain("grid step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut m = Rational::zero();
    while m <= *hi {
        out.push(m.clone());
        m += step;
    }
    Ok(out)
}
