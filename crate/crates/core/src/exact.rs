//! Exponential-time exact solvers for τ, ν, χ and ω on small families.
//!
//! τ and ν never touch the piercing construction; χ uses the greedy coloring
//! only as its starting upper bound. Vertex sets are `u64` bitmasks, so no solver accepts more than 64
//! rectangles regardless of the configured limits.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::color::{greedy_degeneracy_coloring, Coloring};
use crate::geometry::{contains_point, intersects, Point, Rect};
use crate::igraph::{build_graph_bruteforce, degeneracy_order, max_depth_omega, IntersectionGraph};
use crate::instance::Instance;

const MASK_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{what}: instance has {n} rectangles, limit is {limit}")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("{what}: time budget of {budget:?} exceeded")]
    BudgetExceeded { what: &'static str, budget: Duration },
    #[error("instance is empty")]
    Empty,
    #[error("rectangle {id} contains none of the supplied points")]
    Uncoverable { id: usize },
}

/// Size and time limits for the exact solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_n_tau: usize,
    pub max_n_nu: usize,
    pub max_n_chi: usize,
    pub time_budget: Duration,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_n_tau: 12,
            max_n_nu: 24,
            max_n_chi: 16,
            time_budget: Duration::from_secs(60),
        }
    }
}

impl ExactLimits {
    /// Same budget with every size limit set to `n`.
    pub fn with_max_n(mut self, n: usize) -> Self {
        self.max_n_tau = n;
        self.max_n_nu = n;
        self.max_n_chi = n;
        self
    }
}

struct Budget {
    what: &'static str,
    start: Instant,
    limit: Duration,
    ticks: u32,
}

impl Budget {
    fn new(what: &'static str, limit: Duration) -> Self {
        Budget {
            what,
            start: Instant::now(),
            limit,
            ticks: 0,
        }
    }

    fn tick(&mut self) -> Result<(), ExactError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 1024 == 1 && self.start.elapsed() > self.limit {
            return Err(ExactError::BudgetExceeded {
                what: self.what,
                budget: self.limit,
            });
        }
        Ok(())
    }
}

fn check_size(what: &'static str, n: usize, limit: usize) -> Result<(), ExactError> {
    let limit = limit.min(MASK_BITS);
    if n > limit {
        return Err(ExactError::TooLarge { what, n, limit });
    }
    Ok(())
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let b = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(b)
    })
}

/// Closed-neighbourhood masks (each vertex adjacent to itself).
fn closed_neighborhoods(g: &IntersectionGraph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(1u64 << v, |m, &w| m | (1u64 << w)))
        .collect()
}

fn grid_points(i: &Instance, xs: Vec<&crate::scalar::Scalar>, ys: Vec<&crate::scalar::Scalar>) -> Vec<Point> {
    let mut xs = xs;
    let mut ys = ys;
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();
    let mut out = Vec::new();
    for x in &xs {
        for y in &ys {
            let p = Point::new((*x).clone(), (*y).clone());
            if i.rects().iter().any(|r| contains_point(r, &p)) {
                out.push(p);
            }
        }
    }
    out
}

/// Lower-left coordinate grid, filtered to points inside some rectangle,
/// in lexicographic `(x, y)` order. Some minimum transversal lives on it.
pub fn candidate_points(i: &Instance) -> Result<Vec<Point>, ExactError> {
    if i.is_empty() {
        return Err(ExactError::Empty);
    }
    Ok(grid_points(
        i,
        i.rects().iter().map(Rect::x_lo).collect(),
        i.rects().iter().map(Rect::y_lo).collect(),
    ))
}

/// Every combination of corner coordinates (both low and high ends),
/// filtered to points inside some rectangle.
pub fn fine_grid_points(i: &Instance) -> Result<Vec<Point>, ExactError> {
    if i.is_empty() {
        return Err(ExactError::Empty);
    }
    Ok(grid_points(
        i,
        i.rects().iter().flat_map(|r| [r.x_lo(), r.x_hi()]).collect(),
        i.rects().iter().flat_map(|r| [r.y_lo(), r.y_hi()]).collect(),
    ))
}

/// Minimum transversal over the candidate grid.
pub fn exact_tau(i: &Instance, lim: &ExactLimits) -> Result<(usize, Vec<Point>), ExactError> {
    check_size("tau", i.len(), lim.max_n_tau)?;
    let points = candidate_points(i)?;
    min_point_cover(i, &points, lim)
}

/// Minimum number of points from `points` piercing every rectangle, found
/// by iterative deepening on the solution size.
pub fn min_point_cover(
    i: &Instance,
    points: &[Point],
    lim: &ExactLimits,
) -> Result<(usize, Vec<Point>), ExactError> {
    check_size("tau", i.len(), lim.max_n_tau)?;
    if i.is_empty() {
        return Err(ExactError::Empty);
    }
    let n = i.len();
    let masks: Vec<u64> = points
        .iter()
        .map(|p| {
            i.rects()
                .iter()
                .enumerate()
                .filter(|(_, r)| contains_point(r, p))
                .fold(0u64, |m, (k, _)| m | (1u64 << k))
        })
        .collect();

    // Drop points whose pierced set is contained in an earlier or strictly
    // larger one.
    let mut kept: Vec<usize> = Vec::new();
    for (a, &ma) in masks.iter().enumerate() {
        if ma == 0 {
            continue;
        }
        let dominated = masks.iter().enumerate().any(|(b, &mb)| {
            b != a && ma & !mb == 0 && (ma != mb || b < a)
        });
        if !dominated {
            kept.push(a);
        }
    }

    let full = if n == MASK_BITS { u64::MAX } else { (1u64 << n) - 1 };
    let covered = kept.iter().fold(0u64, |m, &k| m | masks[k]);
    if covered != full {
        let id = bits(full & !covered).next().expect("some bit uncovered");
        return Err(ExactError::Uncoverable { id });
    }

    let covering: Vec<Vec<usize>> = (0..n)
        .map(|v| kept.iter().copied().filter(|&k| masks[k] >> v & 1 == 1).collect())
        .collect();
    let adjacency = closed_neighborhoods(&build_graph_bruteforce(i));

    struct Search<'a> {
        masks: &'a [u64],
        covering: &'a [Vec<usize>],
        adjacency: &'a [u64],
        chosen: Vec<usize>,
        budget: Budget,
    }

    impl Search<'_> {
        /// Size of a greedy packing of pairwise-disjoint uncovered rectangles.
        fn packing_bound(&self, uncovered: u64) -> usize {
            let mut left = uncovered;
            let mut count = 0;
            while left != 0 {
                let v = left.trailing_zeros() as usize;
                left &= !self.adjacency[v];
                count += 1;
            }
            count
        }

        fn dfs(&mut self, uncovered: u64, left: usize) -> Result<bool, ExactError> {
            self.budget.tick()?;
            if uncovered == 0 {
                return Ok(true);
            }
            if self.packing_bound(uncovered) > left {
                return Ok(false);
            }
            let v = bits(uncovered)
                .min_by_key(|&v| (self.covering[v].len(), v))
                .expect("uncovered is nonempty");
            for idx in 0..self.covering[v].len() {
                let p = self.covering[v][idx];
                self.chosen.push(p);
                if self.dfs(uncovered & !self.masks[p], left - 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
            Ok(false)
        }
    }

    let mut search = Search {
        masks: &masks,
        covering: &covering,
        adjacency: &adjacency,
        chosen: Vec::new(),
        budget: Budget::new("tau", lim.time_budget),
    };
    let start = search.packing_bound(full);
    for size in start..=n {
        if search.dfs(full, size)? {
            let mut chosen = search.chosen;
            chosen.sort_unstable();
            let pts = chosen.into_iter().map(|k| points[k].clone()).collect::<Vec<_>>();
            return Ok((pts.len(), pts));
        }
    }
    unreachable!("n points always suffice once every rectangle is coverable")
}

/// Maximum set of pairwise-disjoint rectangles.
pub fn exact_nu(i: &Instance, lim: &ExactLimits) -> Result<(usize, Vec<usize>), ExactError> {
    check_size("nu", i.len(), lim.max_n_nu)?;
    if i.is_empty() {
        return Err(ExactError::Empty);
    }
    let adjacency = closed_neighborhoods(&build_graph_bruteforce(i));
    let mut best = Vec::new();
    let mut current = Vec::new();
    let mut budget = Budget::new("nu", lim.time_budget);
    let all = if i.len() == MASK_BITS { u64::MAX } else { (1u64 << i.len()) - 1 };
    mis(&adjacency, all, &mut current, &mut best, &mut budget)?;
    best.sort_unstable();
    Ok((best.len(), best))
}

/// Number of cliques in a greedy clique cover of `cand`; bounds any
/// independent subset from above.
fn clique_cover_bound(adjacency: &[u64], cand: u64) -> usize {
    let mut left = cand;
    let mut count = 0;
    while left != 0 {
        let v = left.trailing_zeros() as usize;
        let mut clique = 1u64 << v;
        let mut pool = left & adjacency[v] & !clique;
        while pool != 0 {
            let w = pool.trailing_zeros() as usize;
            clique |= 1u64 << w;
            pool &= adjacency[w] & !(1u64 << w);
        }
        left &= !clique;
        count += 1;
    }
    count
}

fn mis(
    adjacency: &[u64],
    cand: u64,
    current: &mut Vec<usize>,
    best: &mut Vec<usize>,
    budget: &mut Budget,
) -> Result<(), ExactError> {
    budget.tick()?;
    if cand == 0 {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return Ok(());
    }
    if current.len() + clique_cover_bound(adjacency, cand) <= best.len() {
        return Ok(());
    }
    // Some maximum independent set contains a vertex of N[v] for any v;
    // a minimum-degree v keeps the branching narrow.
    let v = bits(cand)
        .min_by_key(|&v| ((adjacency[v] & cand).count_ones(), v))
        .expect("cand is nonempty");
    for u in bits(adjacency[v] & cand) {
        current.push(u);
        mis(adjacency, cand & !adjacency[u], current, best, budget)?;
        current.pop();
    }
    Ok(())
}

/// Maximum clique of `g` by branch and bound, using only the graph.
pub fn exact_omega_clique(g: &IntersectionGraph, lim: &ExactLimits) -> Result<usize, ExactError> {
    check_size("omega", g.n(), lim.max_n_chi)?;
    let open: Vec<u64> = closed_neighborhoods(g)
        .into_iter()
        .enumerate()
        .map(|(v, m)| m & !(1u64 << v))
        .collect();
    let mut best = 0;
    let mut budget = Budget::new("omega", lim.time_budget);
    let all = if g.n() == MASK_BITS { u64::MAX } else { (1u64 << g.n()) - 1 };
    clique(&open, all, 0, &mut best, &mut budget)?;
    Ok(best)
}

/// Greedy coloring count of `cand`; bounds any clique inside it.
fn coloring_bound(open: &[u64], cand: u64) -> usize {
    let mut left = cand;
    let mut classes = 0;
    while left != 0 {
        let mut pool = left;
        while pool != 0 {
            let v = pool.trailing_zeros() as usize;
            left &= !(1u64 << v);
            pool &= !open[v] & !(1u64 << v);
        }
        classes += 1;
    }
    classes
}

fn clique(open: &[u64], mut cand: u64, size: usize, best: &mut usize, budget: &mut Budget) -> Result<(), ExactError> {
    budget.tick()?;
    if cand == 0 {
        *best = (*best).max(size);
        return Ok(());
    }
    if size + coloring_bound(open, cand) <= *best {
        return Ok(());
    }
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best {
            break;
        }
        let v = cand.trailing_zeros() as usize;
        clique(open, cand & open[v], size + 1, best, budget)?;
        cand &= !(1u64 << v);
    }
    Ok(())
}

/// Chromatic number with an optimal coloring.
pub fn exact_chi(i: &Instance, lim: &ExactLimits) -> Result<(usize, Coloring), ExactError> {
    check_size("chi", i.len(), lim.max_n_chi)?;
    let (omega, _) = max_depth_omega(i).map_err(|_| ExactError::Empty)?;
    let g = build_graph_bruteforce(i);
    let greedy = greedy_degeneracy_coloring(&g);
    if greedy.num_colors <= omega {
        return Ok((greedy.num_colors, greedy));
    }
    // Most constrained first: reverse of the peeling order.
    let order: Vec<usize> = degeneracy_order(&g).order.into_iter().rev().collect();
    let open: Vec<u64> = closed_neighborhoods(&g)
        .into_iter()
        .enumerate()
        .map(|(v, m)| m & !(1u64 << v))
        .collect();
    let mut budget = Budget::new("chi", lim.time_budget);
    for k in omega..greedy.num_colors {
        let mut colors = vec![usize::MAX; g.n()];
        if try_color(&open, &order, 0, k, 0, &mut colors, &mut budget)? {
            let c = Coloring::from_colors(colors);
            return Ok((c.num_colors, c));
        }
    }
    Ok((greedy.num_colors, greedy))
}

fn try_color(
    open: &[u64],
    order: &[usize],
    pos: usize,
    k: usize,
    used: usize,
    colors: &mut [usize],
    budget: &mut Budget,
) -> Result<bool, ExactError> {
    budget.tick()?;
    let Some(&v) = order.get(pos) else {
        return Ok(true);
    };
    let mut blocked = 0u64;
    for w in bits(open[v]) {
        if colors[w] != usize::MAX {
            blocked |= 1u64 << colors[w];
        }
    }
    // New colors only in increasing order, so permuted solutions are skipped.
    for c in 0..k.min(used + 1) {
        if blocked >> c & 1 == 1 {
            continue;
        }
        colors[v] = c;
        if try_color(open, order, pos + 1, k, used.max(c + 1), colors, budget)? {
            return Ok(true);
        }
    }
    colors[v] = usize::MAX;
    Ok(false)
}

/// True when no two ids in `ids` intersect.
pub fn pairwise_disjoint(i: &Instance, ids: &[usize]) -> bool {
    ids.iter().enumerate().all(|(a, &x)| {
        ids[a + 1..]
            .iter()
            .all(|&y| !intersects(&i.rects()[x], &i.rects()[y]))
    })
}
