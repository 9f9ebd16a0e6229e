//! Piercing and coloring of axis-parallel rectangle families with bounded
//! aspect ratio, with certificates and exact oracles for small instances.
//!
//! All coordinates are exact rationals ([`Scalar`]); rectangles are closed,
//! so touching boundaries count as intersecting.

// Error variants carry the offending exact values; boxing them buys nothing here.
#![allow(clippy::result_large_err)]

pub mod color;
pub mod exact;
pub mod geometry;
pub mod igraph;
pub mod instance;
pub mod pierce;
pub mod scalar;
pub mod verify;

pub use color::{greedy_degeneracy_coloring, validate_coloring, Coloring};
pub use geometry::{contains_point, intersection, intersects, snap_point, ClosedBox, Point, Rect};
pub use igraph::{
    build_graph_bruteforce, build_graph_sweep, degeneracy_order, max_depth_omega, DegeneracyOrder,
    IntersectionGraph,
};
pub use instance::{
    generate_random, generate_structured, parse_instance, serialize_instance, GeneratorConfig, Instance,
    StructureKind,
};
pub use pierce::{construct_transversal, PiercingResult};
pub use scalar::Scalar;
