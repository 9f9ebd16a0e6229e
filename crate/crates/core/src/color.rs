//! Greedy coloring along a degeneracy order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::igraph::{degeneracy_order, DegeneracyOrder, IntersectionGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorError {
    #[error("coloring has {colors} entries but the graph has {vertices} vertices")]
    SizeMismatch { colors: usize, vertices: usize },
}

/// Color index per rectangle id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub num_colors: usize,
    /// Order that produced the coloring; absent for colorings read from disk
    /// or produced by the exact solver.
    #[serde(skip)]
    pub order_used: Option<DegeneracyOrder>,
}

impl Coloring {
    /// Wraps raw colors, deriving `num_colors` as one past the largest index.
    pub fn from_colors(colors: Vec<usize>) -> Self {
        let num_colors = colors.iter().max().map_or(0, |m| m + 1);
        Coloring {
            colors,
            num_colors,
            order_used: None,
        }
    }
}

/// Colors vertices in reverse removal order, each with the smallest color not
/// used by an already-colored neighbour. Uses at most `degeneracy + 1` colors.
pub fn greedy_degeneracy_coloring(g: &IntersectionGraph) -> Coloring {
    let order = degeneracy_order(g);
    let n = g.n();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut taken = vec![usize::MAX; n + 1];
    for &v in order.order.iter().rev() {
        for &w in g.neighbors(v) {
            if let Some(c) = colors[w] {
                taken[c] = v;
            }
        }
        let c = (0..).find(|&c| taken[c] != v).expect("a free color exists");
        colors[v] = Some(c);
    }
    let colors: Vec<usize> = colors.into_iter().map(|c| c.expect("all colored")).collect();
    let mut coloring = Coloring::from_colors(colors);
    coloring.order_used = Some(order);
    coloring
}

/// True iff `c` is proper on `g`, `num_colors` matches, and every color in
/// `0..num_colors` is used.
pub fn validate_coloring(g: &IntersectionGraph, c: &Coloring) -> Result<bool, ColorError> {
    if c.colors.len() != g.n() {
        return Err(ColorError::SizeMismatch {
            colors: c.colors.len(),
            vertices: g.n(),
        });
    }
    let proper = g.edges().all(|(a, b)| c.colors[a] != c.colors[b]);
    let mut used = vec![false; c.num_colors];
    for &col in &c.colors {
        match used.get_mut(col) {
            Some(slot) => *slot = true,
            None => return Ok(false),
        }
    }
    Ok(proper && used.into_iter().all(|u| u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::igraph::build_graph_bruteforce;
    use crate::instance::{generate_structured, StructureKind};

    #[test]
    fn greedy_examples() {
        let edgeless = IntersectionGraph::from_edges(5, []);
        assert_eq!(greedy_degeneracy_coloring(&edgeless).num_colors, 1);

        let k4 = IntersectionGraph::complete(4);
        let c = greedy_degeneracy_coloring(&k4);
        assert_eq!(c.num_colors, 4);
        assert!(validate_coloring(&k4, &c).unwrap());

        let chain = build_graph_bruteforce(&generate_structured(StructureKind::Chain, 3));
        let c = greedy_degeneracy_coloring(&chain);
        assert_eq!(c.num_colors, 2);
        assert!(validate_coloring(&chain, &c).unwrap());
        assert_eq!(c.order_used.as_ref().unwrap().degeneracy, 1);
    }

    #[test]
    fn validate_examples() {
        let k4 = IntersectionGraph::complete(4);
        assert!(validate_coloring(&k4, &Coloring::from_colors(vec![0, 1, 2, 3])).unwrap());
        assert!(!validate_coloring(&k4, &Coloring::from_colors(vec![0, 0, 1, 2])).unwrap());
        let e3 = IntersectionGraph::from_edges(3, []);
        assert!(validate_coloring(&e3, &Coloring::from_colors(vec![0, 0, 0])).unwrap());
        // gap in the palette
        assert!(!validate_coloring(&e3, &Coloring::from_colors(vec![0, 0, 2])).unwrap());
        let lying = Coloring { colors: vec![0, 1, 0], num_colors: 1, order_used: None };
        assert!(!validate_coloring(&IntersectionGraph::path(3), &lying).unwrap());
        assert_eq!(
            validate_coloring(&e3, &Coloring::from_colors(vec![0])),
            Err(ColorError::SizeMismatch { colors: 1, vertices: 3 })
        );
    }

    #[test]
    fn empty_graph() {
        let c = greedy_degeneracy_coloring(&IntersectionGraph::default());
        assert_eq!(c.num_colors, 0);
        assert!(validate_coloring(&IntersectionGraph::default(), &c).unwrap());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn greedy_is_proper_and_within_degeneracy(
                n in 1usize..30,
                edges in proptest::collection::vec((0usize..30, 0usize..30), 0..120),
            ) {
                let g = IntersectionGraph::from_edges(n, edges.into_iter().filter(|&(a, b)| a < n && b < n));
                let c = greedy_degeneracy_coloring(&g);
                prop_assert!(validate_coloring(&g, &c).unwrap());
                prop_assert!(c.num_colors <= c.order_used.as_ref().unwrap().degeneracy + 1);
            }
        }
    }
}
