//! Intersection graphs, degeneracy orderings and clique number by point depth.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{contains_point, intersects, Point, Rect};
use crate::instance::{Instance, InstanceError};
use crate::scalar::Scalar;

/// Undirected simple graph on `0..n`; vertex `i` is rectangle id `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntersectionGraph {
    adjacency: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    /// Builds a graph from an edge list. Self-loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for n = {n}");
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        IntersectionGraph { adjacency }
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|b| (b - 1, b)))
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

/// Tests all pairs.
pub fn build_graph_bruteforce(i: &Instance) -> IntersectionGraph {
    let rects = i.rects();
    let mut edges = Vec::new();
    for (a, ra) in rects.iter().enumerate() {
        for (b, rb) in rects.iter().enumerate().skip(a + 1) {
            if intersects(ra, rb) {
                edges.push((a, b));
            }
        }
    }
    IntersectionGraph::from_edges(rects.len(), edges)
}

/// Active y-intervals indexed by rank of `y_lo`, with a max-`y_hi` tournament
/// tree for output-sensitive stabbing of `[q_lo, q_hi]`.
struct ActiveIntervals<'a> {
    rects: &'a [Rect],
    /// Rectangle ids sorted by `(y_lo, id)`.
    by_ylo: Vec<usize>,
    slot_of: Vec<usize>,
    size: usize,
    /// Node holds the active id with the largest `y_hi` in its subtree.
    tree: Vec<Option<usize>>,
}

impl<'a> ActiveIntervals<'a> {
    fn new(rects: &'a [Rect]) -> Self {
        let mut by_ylo: Vec<usize> = (0..rects.len()).collect();
        by_ylo.sort_by(|&a, &b| rects[a].y_lo().cmp(rects[b].y_lo()).then(a.cmp(&b)));
        let mut slot_of = vec![0; rects.len()];
        for (slot, &id) in by_ylo.iter().enumerate() {
            slot_of[id] = slot;
        }
        let size = rects.len().next_power_of_two().max(1);
        ActiveIntervals {
            rects,
            by_ylo,
            slot_of,
            size,
            tree: vec![None; 2 * size],
        }
    }

    fn better(&self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if self.rects[y].y_hi() > self.rects[x].y_hi() { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn set(&mut self, id: usize, active: bool) {
        let mut node = self.size + self.slot_of[id];
        self.tree[node] = active.then_some(id);
        while node > 1 {
            node /= 2;
            self.tree[node] = self.better(self.tree[2 * node], self.tree[2 * node + 1]);
        }
    }

    /// Pushes every active id whose y-range meets `[q_lo, q_hi]`.
    fn stab(&self, q_lo: &Scalar, q_hi: &Scalar, out: &mut Vec<usize>) {
        let limit = self.by_ylo.partition_point(|&id| self.rects[id].y_lo() <= q_hi);
        if limit > 0 {
            self.descend(1, 0, self.size, limit, q_lo, out);
        }
    }

    fn descend(&self, node: usize, lo: usize, hi: usize, limit: usize, q_lo: &Scalar, out: &mut Vec<usize>) {
        if lo >= limit {
            return;
        }
        let Some(best) = self.tree[node] else { return };
        if self.rects[best].y_hi() < q_lo {
            return;
        }
        if hi - lo == 1 {
            out.push(best);
            return;
        }
        let mid = (lo + hi) / 2;
        self.descend(2 * node, lo, mid, limit, q_lo, out);
        self.descend(2 * node + 1, mid, hi, limit, q_lo, out);
    }
}

/// Left-to-right sweep over x with an interval structure on active y-ranges.
/// Produces the same graph as [`build_graph_bruteforce`].
pub fn build_graph_sweep(i: &Instance) -> IntersectionGraph {
    let rects = i.rects();
    // (x, 0 = open / 1 = close, id): opens precede closes at equal x so that
    // boundary contact is reported.
    let mut events: Vec<(&Scalar, u8, usize)> = Vec::with_capacity(2 * rects.len());
    for r in rects {
        events.push((r.x_lo(), 0, r.id()));
        events.push((r.x_hi(), 1, r.id()));
    }
    events.sort();

    let mut active = ActiveIntervals::new(rects);
    let mut edges = Vec::new();
    let mut hits = Vec::new();
    for (_, kind, id) in events {
        if kind == 0 {
            hits.clear();
            active.stab(rects[id].y_lo(), rects[id].y_hi(), &mut hits);
            edges.extend(hits.iter().map(|&other| (other, id)));
            active.set(id, true);
        } else {
            active.set(id, false);
        }
    }
    IntersectionGraph::from_edges(rects.len(), edges)
}

/// Vertex removal sequence of min-degree peeling and its degeneracy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyOrder {
    pub order: Vec<usize>,
    pub degeneracy: usize,
}

/// Repeatedly removes a minimum-degree vertex, ties to the smallest id.
pub fn degeneracy_order(g: &IntersectionGraph) -> DegeneracyOrder {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    while let Some((d, v)) = queue.pop_first() {
        degeneracy = degeneracy.max(d);
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                queue.remove(&(degree[w], w));
                degree[w] -= 1;
                queue.insert((degree[w], w));
            }
        }
    }
    DegeneracyOrder { order, degeneracy }
}

/// Largest number of later-positioned neighbours of any vertex in `order`.
pub fn max_back_degree(g: &IntersectionGraph, order: &[usize]) -> usize {
    let mut position = vec![0; g.n()];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    order
        .iter()
        .enumerate()
        .map(|(k, &v)| g.neighbors(v).iter().filter(|&&w| position[w] > k).count())
        .max()
        .unwrap_or(0)
}

/// Clique number as the maximum depth over the grid of lower-left corner
/// coordinates. Returns the depth and the lexicographically smallest point
/// attaining it.
pub fn max_depth_omega(i: &Instance) -> Result<(usize, Point), InstanceError> {
    let rects = i.rects();
    if rects.is_empty() {
        return Err(InstanceError::Empty);
    }
    let mut xs: Vec<&Scalar> = rects.iter().map(Rect::x_lo).collect();
    xs.sort();
    xs.dedup();

    let mut best: Option<(usize, Point)> = None;
    let mut events: Vec<(&Scalar, u8)> = Vec::new();
    for x in xs {
        events.clear();
        for r in rects.iter().filter(|r| r.x_lo() <= x && x <= r.x_hi()) {
            events.push((r.y_lo(), 0));
            events.push((r.y_hi(), 1));
        }
        events.sort();
        let mut depth = 0usize;
        for &(y, kind) in &events {
            if kind == 0 {
                depth += 1;
                if best.as_ref().is_none_or(|(d, _)| depth > *d) {
                    best = Some((depth, Point::new(x.clone(), y.clone())));
                }
            } else {
                depth -= 1;
            }
        }
    }
    let (omega, witness) = best.expect("nonempty family has depth >= 1");
    debug_assert_eq!(
        rects.iter().filter(|r| contains_point(r, &witness)).count(),
        omega
    );
    Ok((omega, witness))
}
