//! Lower convex envelope of memory-load samples.

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Cross product of `(b - a)` and `(c - a)`.
fn cross(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> Rational {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0)
}

/// Vertices of the lower convex hull of `(M, R)` points, sorted by `M`.
///
/// Points sharing an `M` keep only the smallest `R`; points lying on a hull
/// edge (collinear with its endpoints) are dropped.
pub fn lower_convex_envelope(points: &[(Rational, Rational)]) -> Result<Vec<(Rational, Rational)>> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup_by(|later, earlier| later.0 == earlier.0);

    let mut hull: Vec<(Rational, Rational)> = Vec::with_capacity(sorted.len());
    for p in sorted {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(hull)
}

/// Piecewise-linear interpolation of an envelope at `m`, `None` outside its `M` range.
pub fn evaluate(envelope: &[(Rational, Rational)], m: &Rational) -> Option<Rational> {
    let first = envelope.first()?;
    let last = envelope.last()?;
    if m < &first.0 || m > &last.0 {
        return None;
    }
    for w in envelope.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if m <= &b.0 {
            let frac = (m - &a.0) / (&b.0 - &a.0);
            return Some(&a.1 + frac * (&b.1 - &a.1));
        }
    }
    Some(first.1.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn pts(v: &[(i64, i64)]) -> Vec<(Rational, Rational)> {
        v.iter().map(|&(a, b)| (q(a, 1), q(b, 1))).collect()
    }

    #[test]
    fn collinear_keeps_endpoints() {
        let hull = lower_convex_envelope(&pts(&[(0, 20), (4, 16), (8, 12), (12, 8), (16, 4)])).unwrap();
        assert_eq!(hull, pts(&[(0, 20), (16, 4)]));
    }

    #[test]
    fn convex_input_is_kept() {
        let p = pts(&[(0, 4), (1, 1), (2, 1)]);
        assert_eq!(lower_convex_envelope(&p).unwrap(), p);
    }

    #[test]
    fn point_above_chord_is_dropped() {
        let p = vec![(q(0, 1), q(4, 1)), (q(1, 1), q(7, 2)), (q(2, 1), q(1, 1))];
        assert_eq!(lower_convex_envelope(&p).unwrap(), vec![p[0].clone(), p[2].clone()]);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(lower_convex_envelope(&[]), Err(Error::NoPoints)));
    }

    #[test]
    fn interpolation() {
        let hull = pts(&[(0, 4), (2, 0)]);
        assert_eq!(evaluate(&hull, &q(1, 2)), Some(q(3, 1)));
        assert_eq!(evaluate(&hull, &q(3, 1)), None);
    }

    proptest! {
        #[test]
        fn hull_is_convex_and_below_inputs(raw in prop::collection::vec((0i64..20, 0i64..30), 1..12)) {
            let p = pts(&raw);
            let hull = lower_convex_envelope(&p).unwrap();
            for w in hull.windows(3) {
                let s1 = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                let s2 = (&w[2].1 - &w[1].1) / (&w[2].0 - &w[1].0);
                prop_assert!(s1 < s2);
            }
            for (m, r) in &p {
                let v = evaluate(&hull, m).unwrap();
                prop_assert!(&v <= r);
            }
        }
    }
}
