//! Constructive piercing of bounded-aspect-ratio rectangle families.
//!
//! Each round either finds a point common to every remaining rectangle (one
//! point finishes the job) or picks the rectangle `R_ε` with the smallest
//! shorter side `ε`, places the points that cut both long edges of `R_ε`
//! into segments of length at most `ε`, and discards everything those points
//! pierce. A rectangle with both sides at least `ε` that meets a cell whose
//! sides are at most `ε` must contain one of the cell's corners, so the
//! discarded set is exactly the closed neighbourhood of `R_ε`. The chosen
//! rectangles are therefore pairwise disjoint and certify the bound.
//!
//! When the last round is an `eps` round, the family it emptied had no common
//! point and so holds two disjoint rectangles; that pair replaces the final
//! `R_ε` in the certificate. Either way `|T| ≤ 2(⌈r⌉+1)(|I|−1)+1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{contains_point, intersects, Point, Rect};
use crate::instance::Instance;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PierceError {
    #[error("cannot pierce an empty family")]
    Empty,
    #[error(
        "step {step}: points of rectangle {rect} pierce {pierced:?} but its closed neighbourhood is {neighborhood:?}"
    )]
    NeighborhoodMismatch {
        step: usize,
        rect: usize,
        pierced: Vec<usize>,
        neighborhood: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Eps,
    Helly,
}

/// One round of [`construct_transversal`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub kind: StepKind,
    /// `R_ε` for an `eps` step, `None` for the final common-point step.
    pub rect: Option<usize>,
    /// Number of points appended to the transversal in this round.
    pub added: usize,
    /// Ids discarded in this round, ascending.
    pub removed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiercingResult {
    #[serde(rename = "points")]
    pub transversal: Vec<Point>,
    /// Pairwise-disjoint rectangles: the `R_ε` of every round but the last,
    /// then either the last `R_ε` and one member of the family left for the
    /// common-point round, or two disjoint members of the family emptied by a
    /// final `eps` round.
    pub certificate: Vec<usize>,
    /// Largest number of segments per long edge used in any round.
    pub k_per_side: usize,
    pub trace: Vec<TraceStep>,
}

impl PiercingResult {
    pub fn ends_with_helly(&self) -> bool {
        matches!(self.trace.last(), Some(TraceStep { kind: StepKind::Helly, .. }))
    }
}

/// `2(⌈r⌉+1)(m−1)+1` for a certificate of size `m ≥ 1`.
pub fn transversal_bound(r: &Scalar, certificate_len: usize) -> usize {
    let r_ceil = r.ceil().to_i64().expect("aspect ratio fits i64") as usize;
    2 * (r_ceil + 1) * certificate_len.saturating_sub(1) + 1
}

/// Rectangle with the smallest shorter side, ties to the smallest id.
pub fn select_min_rect<'a, I>(remaining: I) -> Option<&'a Rect>
where
    I: IntoIterator<Item = &'a Rect>,
{
    remaining
        .into_iter()
        .map(|r| (r.shorter_side(), r))
        .min_by(|(ea, a), (eb, b)| ea.cmp(eb).then(a.id().cmp(&b.id())))
        .map(|(_, r)| r)
}

/// Number of segments each long edge of `r` is cut into: `max(1, ⌈b/ε⌉)`.
pub fn segments_per_side(r: &Rect) -> usize {
    let k = (r.longer_side() / r.shorter_side()).ceil();
    (k.to_i64().expect("aspect ratio fits i64") as usize).max(1)
}

/// Points cutting both long edges of `r` into `k` equal segments of length
/// at most the shorter side. Returned edge by edge: bottom then top for a
/// wide (or square) rectangle, left then right for a tall one, each in
/// increasing coordinate order.
pub fn build_p_grid(r: &Rect) -> Vec<Point> {
    let k = segments_per_side(r);
    let wide = r.width() >= r.height();
    let (lo, len) = if wide {
        (r.x_lo(), r.width())
    } else {
        (r.y_lo(), r.height())
    };
    let step = len / Scalar::from(k);
    let ticks: Vec<Scalar> = (0..=k).map(|j| lo + &step * Scalar::from(j)).collect();
    let edges = if wide {
        [r.y_lo(), r.y_hi()]
    } else {
        [r.x_lo(), r.x_hi()]
    };
    edges
        .iter()
        .flat_map(|&fixed| {
            ticks.iter().map(move |t| {
                if wide {
                    Point::new(t.clone(), fixed.clone())
                } else {
                    Point::new(fixed.clone(), t.clone())
                }
            })
        })
        .collect()
}

/// Lower-left point of the common intersection, if it is nonempty.
pub fn helly_point<'a, I>(family: I) -> Option<Point>
where
    I: IntoIterator<Item = &'a Rect>,
{
    let mut it = family.into_iter();
    let first = it.next()?;
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (first.x_lo(), first.x_hi(), first.y_lo(), first.y_hi());
    for r in it {
        x_lo = x_lo.max(r.x_lo());
        x_hi = x_hi.min(r.x_hi());
        y_lo = y_lo.max(r.y_lo());
        y_hi = y_hi.min(r.y_hi());
        if x_lo > x_hi || y_lo > y_hi {
            return None;
        }
    }
    Some(Point::new(x_lo.clone(), y_lo.clone()))
}

fn first_disjoint_pair(family: &[&Rect]) -> Option<(usize, usize)> {
    family.iter().enumerate().find_map(|(k, a)| {
        family[k + 1..]
            .iter()
            .find(|b| !intersects(a, b))
            .map(|b| (a.id(), b.id()))
    })
}

/// Builds a transversal together with a disjointness certificate.
pub fn construct_transversal(i: &Instance) -> Result<PiercingResult, PierceError> {
    if i.is_empty() {
        return Err(PierceError::Empty);
    }
    let mut remaining: Vec<&Rect> = i.rects().iter().collect();
    let mut transversal = Vec::new();
    let mut certificate = Vec::new();
    let mut trace = Vec::new();
    let mut k_per_side = 1;

    while !remaining.is_empty() {
        let step = trace.len();
        if let Some(p) = helly_point(remaining.iter().copied()) {
            let rep = select_min_rect(remaining.iter().copied()).expect("nonempty");
            certificate.push(rep.id());
            transversal.push(p);
            trace.push(TraceStep {
                step,
                kind: StepKind::Helly,
                rect: None,
                added: 1,
                removed: remaining.iter().map(|r| r.id()).collect(),
            });
            break;
        }

        let r_eps = select_min_rect(remaining.iter().copied()).expect("nonempty");
        let grid = build_p_grid(r_eps);
        k_per_side = k_per_side.max(segments_per_side(r_eps));

        let (pierced, kept): (Vec<&Rect>, Vec<&Rect>) = remaining
            .iter()
            .partition(|r| grid.iter().any(|p| contains_point(r, p)));
        let pierced: Vec<usize> = pierced.iter().map(|r| r.id()).collect();
        let neighborhood: Vec<usize> = remaining
            .iter()
            .filter(|r| intersects(r, r_eps))
            .map(|r| r.id())
            .collect();
        if pierced != neighborhood {
            return Err(PierceError::NeighborhoodMismatch {
                step,
                rect: r_eps.id(),
                pierced,
                neighborhood,
            });
        }

        certificate.push(r_eps.id());
        trace.push(TraceStep {
            step,
            kind: StepKind::Eps,
            rect: Some(r_eps.id()),
            added: grid.len(),
            removed: pierced,
        });
        transversal.extend(grid);
        if kept.is_empty() {
            // No common point, so by the Helly property two members are disjoint.
            let (a, b) = first_disjoint_pair(&remaining).expect("family without a common point");
            certificate.pop();
            certificate.extend([a, b]);
        }
        remaining = kept;
    }

    Ok(PiercingResult {
        transversal,
        certificate,
        k_per_side,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d).unwrap()
    }

    fn rect(id: usize, x: (i64, i64), y: (i64, i64)) -> Rect {
        Rect::new(id, x.0, x.1, y.0, y.1).unwrap()
    }

    #[test]
    fn select_examples() {
        let a = [rect(0, (0, 1), (0, 1)), rect(1, (0, 4), (0, 2))];
        assert_eq!(select_min_rect(&a).unwrap().id(), 0);
        let b = [rect(0, (0, 1), (0, 1)), rect(1, (0, 1), (0, 1))];
        assert_eq!(select_min_rect(&b).unwrap().id(), 0);
        let c = [rect(0, (0, 6), (0, 3)), rect(1, (0, 2), (0, 2))];
        let pick = select_min_rect(&c).unwrap();
        assert_eq!((pick.id(), pick.shorter_side()), (1, Scalar::from(2)));
        assert!(select_min_rect(&[]).is_none());
    }

    #[test]
    fn p_grid_examples() {
        let unit = rect(0, (0, 1), (0, 1));
        assert_eq!(
            build_p_grid(&unit),
            vec![Point::new(0, 0), Point::new(1, 0), Point::new(0, 1), Point::new(1, 1)]
        );

        let wide = rect(0, (0, 3), (0, 1));
        let pts = build_p_grid(&wide);
        assert_eq!(pts.len(), 8);
        let expected: Vec<Point> = [0, 1]
            .iter()
            .flat_map(|&y| (0..=3).map(move |x| Point::new(x, y)))
            .collect();
        assert_eq!(pts, expected);

        let r = Rect::new(0, 0, q(5, 2), 0, 1).unwrap();
        assert_eq!(segments_per_side(&r), 3);
        let pts = build_p_grid(&r);
        let xs: Vec<Scalar> = pts[..4].iter().map(|p| p.x.clone()).collect();
        assert_eq!(xs, vec![Scalar::zero(), q(5, 6), q(5, 3), q(5, 2)]);
        for w in xs.windows(2) {
            let seg = &w[1] - &w[0];
            assert_eq!(seg, q(5, 6));
            assert!(seg <= Scalar::one());
        }
        assert!(pts[4..].iter().all(|p| p.y == Scalar::one()));
    }

    #[test]
    fn p_grid_rotates_for_tall_rectangles() {
        let tall = rect(0, (0, 1), (0, 3));
        let pts = build_p_grid(&tall);
        let expected: Vec<Point> = [0, 1]
            .iter()
            .flat_map(|&x| (0..=3).map(move |y| Point::new(x, y)))
            .collect();
        assert_eq!(pts, expected);
    }

    #[test]
    fn helly_examples() {
        assert_eq!(
            helly_point(&[rect(0, (0, 2), (0, 2)), rect(1, (1, 3), (1, 3))]),
            Some(Point::new(1, 1))
        );
        assert_eq!(helly_point(&[rect(0, (0, 1), (0, 1)), rect(1, (3, 4), (0, 1))]), None);
        assert_eq!(
            helly_point(&[rect(0, (0, 2), (0, 2)), rect(1, (1, 3), (0, 2)), rect(2, (0, 2), (1, 3))]),
            Some(Point::new(1, 1))
        );
        assert_eq!(helly_point(&[]), None);
    }

    #[test]
    fn single_square_is_one_helly_step() {
        let i = Instance::from_rects([rect(0, (0, 1), (0, 1))]);
        let res = construct_transversal(&i).unwrap();
        assert_eq!(res.transversal.len(), 1);
        assert_eq!(res.certificate, vec![0]);
        assert!(res.ends_with_helly());
    }

    #[test]
    fn two_disjoint_squares() {
        let i = Instance::from_rects([rect(0, (0, 1), (0, 1)), rect(1, (3, 4), (0, 1))]);
        let res = construct_transversal(&i).unwrap();
        assert_eq!(res.transversal.len(), 5);
        assert_eq!(res.certificate, vec![0, 1]);
        assert_eq!(res.trace.len(), 2);
        assert_eq!(res.trace[0].kind, StepKind::Eps);
        assert_eq!(res.trace[0].rect, Some(0));
        assert_eq!(res.trace[0].added, 4);
        assert_eq!(res.trace[0].removed, vec![0]);
        assert_eq!(res.trace[1].kind, StepKind::Helly);
        assert_eq!(res.trace[1].removed, vec![1]);
        assert_eq!(transversal_bound(&Scalar::one(), 2), 5);
    }

    #[test]
    fn overlapping_pair_is_immediate() {
        let i = Instance::from_rects([rect(0, (0, 2), (0, 2)), rect(1, (1, 3), (1, 3))]);
        let res = construct_transversal(&i).unwrap();
        assert_eq!(res.transversal, vec![Point::new(1, 1)]);
        assert_eq!(res.trace.len(), 1);
    }

    #[test]
    fn empty_instance_is_an_error() {
        assert_eq!(construct_transversal(&Instance::from_rects([])), Err(PierceError::Empty));
    }

    #[test]
    fn json_shape() {
        let i = Instance::from_rects([rect(0, (0, 1), (0, 1)), rect(1, (3, 4), (0, 1))]);
        let res = construct_transversal(&i).unwrap();
        let v = serde_json::to_value(&res).unwrap();
        assert_eq!(v["points"][0], serde_json::json!([0, 0]));
        assert_eq!(v["k_per_side"], 1);
        assert_eq!(
            v["trace"][1],
            serde_json::json!({"step":1,"kind":"helly","rect":null,"added":1,"removed":[1]})
        );
        let back: PiercingResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, res);
    }

    #[test]
    fn final_eps_round_certifies_a_disjoint_pair() {
        // Both neighbours of the unit square touch it but not each other.
        let i = Instance::from_rects([
            rect(0, (0, 1), (0, 1)),
            rect(1, (-2, 0), (0, 2)),
            rect(2, (1, 3), (0, 2)),
        ]);
        let res = construct_transversal(&i).unwrap();
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.trace[0].kind, StepKind::Eps);
        assert_eq!(res.trace[0].removed, vec![0, 1, 2]);
        assert_eq!(res.certificate, vec![1, 2]);
        assert_eq!(res.transversal.len(), 4);
        assert!(res.transversal.len() <= transversal_bound(&Scalar::one(), 2));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(transversal_bound(&q(5, 2), 3), 2 * 4 * 2 + 1);
        assert_eq!(transversal_bound(&Scalar::from(2), 1), 1);
    }

    mod props {
        use super::*;
        use crate::instance::{generate_random, GeneratorConfig};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn certificate_invariants(n in 1usize..60, r4 in 4i64..14, seed in any::<u64>()) {
                let r = q(r4, 4);
                let cfg = GeneratorConfig {
                    n, r_max: r.clone(), seed, window: Scalar::from(30), resolution: 8,
                    side_min: Scalar::one(), side_max: Scalar::from(5),
                };
                let i = generate_random(&cfg).unwrap();
                let res = construct_transversal(&i).unwrap();
                for rect in i.rects() {
                    prop_assert!(res.transversal.iter().any(|p| contains_point(rect, p)));
                }
                for (a, &x) in res.certificate.iter().enumerate() {
                    for &y in &res.certificate[a + 1..] {
                        prop_assert!(!intersects(&i.rects()[x], &i.rects()[y]));
                    }
                }
                let ratio = i.family_ratio().unwrap();
                prop_assert!(res.transversal.len() <= transversal_bound(&ratio, res.certificate.len()));
                prop_assert!(res.k_per_side as i64 <= ratio.ceil().to_i64().unwrap());
                // Each round removes something, and ε never decreases.
                prop_assert!(res.trace.iter().all(|t| !t.removed.is_empty()));
                let eps: Vec<Scalar> = res.trace.iter().filter_map(|t| t.rect).map(|id| i.rects()[id].shorter_side()).collect();
                prop_assert!(eps.windows(2).all(|w| w[0] <= w[1]));
                let removed: usize = res.trace.iter().map(|t| t.removed.len()).sum();
                prop_assert_eq!(removed, n);
            }
        }
    }
}
