//! Rectangle families, their JSON form and deterministic generators.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Rect};
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance does not match the schema: {0}")]
    Schema(String),
    #[error("rectangle {id}: bad coordinate: {source}")]
    Coordinate { id: usize, source: ScalarError },
    #[error("rectangle {id}: denominator is zero")]
    ZeroDenominator { id: usize },
    #[error("rectangle {id}: non-positive side ({axis} extent is empty)")]
    NonPositiveSide { id: usize, axis: char },
    #[error("rectangle {id}: duplicate id")]
    DuplicateId { id: usize },
    #[error("rectangle {id}: ids must be 0..n-1 in order (found at position {position})")]
    IdOutOfOrder { id: usize, position: usize },
    #[error("rectangle {id}: aspect ratio {ratio} exceeds declared bound {bound}")]
    RatioExceeded { id: usize, ratio: Scalar, bound: Scalar },
    #[error("declared ratio bound is malformed: {0}")]
    BadRatio(ScalarError),
    #[error("instance is empty")]
    Empty,
    #[error("generator configuration is infeasible: {0}")]
    InfeasibleConfig(String),
}

/// A finite family of rectangles with ids `0..n`, plus an optional declared
/// aspect-ratio bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    rects: Vec<Rect>,
    r_declared: Option<Scalar>,
}

impl Instance {
    /// Validates id canonicity and the declared ratio bound.
    pub fn new(rects: Vec<Rect>, r_declared: Option<Scalar>) -> Result<Self, InstanceError> {
        let mut seen = HashSet::with_capacity(rects.len());
        for (position, r) in rects.iter().enumerate() {
            if !seen.insert(r.id()) {
                return Err(InstanceError::DuplicateId { id: r.id() });
            }
            if r.id() != position {
                return Err(InstanceError::IdOutOfOrder {
                    id: r.id(),
                    position,
                });
            }
        }
        if let Some(bound) = &r_declared {
            for r in &rects {
                let ratio = r.aspect_ratio();
                if &ratio > bound {
                    return Err(InstanceError::RatioExceeded {
                        id: r.id(),
                        ratio,
                        bound: bound.clone(),
                    });
                }
            }
        }
        Ok(Instance { rects, r_declared })
    }

    /// Builds an instance from rectangles in order, overwriting their ids.
    pub fn from_rects(rects: impl IntoIterator<Item = Rect>) -> Self {
        let rects = rects
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.with_id(i))
            .collect();
        Instance {
            rects,
            r_declared: None,
        }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn rect(&self, id: usize) -> Option<&Rect> {
        self.rects.get(id)
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn r_declared(&self) -> Option<&Scalar> {
        self.r_declared.as_ref()
    }

    /// Maximum aspect ratio over the family.
    pub fn family_ratio(&self) -> Result<Scalar, InstanceError> {
        family_ratio(self)
    }

    /// Restriction to a subset of ids, renumbered `0..k` in the given order.
    pub fn subfamily(&self, ids: &[usize]) -> Instance {
        Instance::from_rects(ids.iter().map(|&i| self.rects[i].clone()))
    }
}

pub fn family_ratio(i: &Instance) -> Result<Scalar, InstanceError> {
    i.rects
        .iter()
        .map(Rect::aspect_ratio)
        .max()
        .ok_or(InstanceError::Empty)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<serde_json::Value>,
    rects: Vec<RawRect>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRect {
    id: usize,
    x: [serde_json::Value; 2],
    y: [serde_json::Value; 2],
}

fn scalar_from_json(v: &serde_json::Value) -> Result<Scalar, ScalarError> {
    match v {
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse(),
        serde_json::Value::Number(n) => n.to_string().parse(),
        serde_json::Value::String(s) => s.parse(),
        other => Err(ScalarError::Malformed(other.to_string())),
    }
}

fn scalar_to_json(s: &Scalar) -> serde_json::Value {
    serde_json::to_value(s).expect("scalars always encode")
}

fn coordinate(id: usize, v: &serde_json::Value) -> Result<Scalar, InstanceError> {
    scalar_from_json(v).map_err(|source| match source {
        ScalarError::ZeroDenominator => InstanceError::ZeroDenominator { id },
        source => InstanceError::Coordinate { id, source },
    })
}

/// Parses the instance JSON document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| InstanceError::Schema(e.to_string()))?;
    let r_declared = raw
        .r
        .as_ref()
        .map(scalar_from_json)
        .transpose()
        .map_err(InstanceError::BadRatio)?;
    let mut rects = Vec::with_capacity(raw.rects.len());
    for rr in &raw.rects {
        let id = rr.id;
        let x_lo = coordinate(id, &rr.x[0])?;
        let x_hi = coordinate(id, &rr.x[1])?;
        let y_lo = coordinate(id, &rr.y[0])?;
        let y_hi = coordinate(id, &rr.y[1])?;
        let rect = Rect::new(id, x_lo, x_hi, y_lo, y_hi).map_err(|e| match e {
            GeometryError::NonPositiveWidth { id } => InstanceError::NonPositiveSide { id, axis: 'x' },
            GeometryError::NonPositiveHeight { id } => InstanceError::NonPositiveSide { id, axis: 'y' },
            other => InstanceError::Schema(other.to_string()),
        })?;
        rects.push(rect);
    }
    Instance::new(rects, r_declared)
}

pub fn serialize_instance(i: &Instance) -> String {
    let raw = RawInstance {
        r: i.r_declared.as_ref().map(scalar_to_json),
        rects: i
            .rects
            .iter()
            .map(|r| RawRect {
                id: r.id(),
                x: [scalar_to_json(r.x_lo()), scalar_to_json(r.x_hi())],
                y: [scalar_to_json(r.y_lo()), scalar_to_json(r.y_hi())],
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("instance always encodes")
}

/// Parameters of [`generate_random`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub r_max: Scalar,
    /// Side of the square window `[0, window]²` holding every rectangle.
    pub window: Scalar,
    pub side_min: Scalar,
    pub side_max: Scalar,
    /// Grid resolution: all corners are multiples of `1 / resolution`.
    pub resolution: u32,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n: 50,
            r_max: Scalar::one(),
            window: Scalar::from(100),
            side_min: Scalar::one(),
            side_max: Scalar::from(10),
            resolution: 1000,
            seed: 0,
        }
    }
}

fn to_units(s: &Scalar, q: u32, round_up: bool) -> Result<u64, InstanceError> {
    let scaled = s * &Scalar::from(q);
    let rounded = if round_up { scaled.ceil() } else { scaled.floor() };
    rounded
        .to_i64()
        .and_then(|v| u64::try_from(v).ok())
        .ok_or_else(|| InstanceError::InfeasibleConfig(format!("{s} is out of range on the 1/{q} grid")))
}

/// Draws `cfg.n` rectangles with corners on the `1/Q` grid.
///
/// The PRNG is ChaCha8 seeded with `seed_from_u64(cfg.seed)`; integer draws use
/// `rand` 0.8 `gen_range` over inclusive ranges. For each rectangle, in order:
/// 1. shorter side `s` (grid units) uniform in `[⌈side_min·Q⌉, ⌊side_max·Q⌋]`;
/// 2. ratio numerator `t` uniform in `[Q, ⌊r_max·Q⌋]`; the longer side is
///    `min(⌊s·t/Q⌋, ⌊window·Q⌋)`;
/// 3. orientation: `gen_bool(0.5)`, true means wide (width is the longer side);
/// 4. `x_lo` uniform in `[0, W − width]`, then `y_lo` uniform in `[0, W − height]`.
pub fn generate_random(cfg: &GeneratorConfig) -> Result<Instance, InstanceError> {
    let q = cfg.resolution;
    if cfg.n == 0 {
        return Err(InstanceError::InfeasibleConfig("n must be positive".into()));
    }
    if q == 0 {
        return Err(InstanceError::InfeasibleConfig("resolution must be positive".into()));
    }
    if cfg.r_max < Scalar::one() {
        return Err(InstanceError::InfeasibleConfig(format!("r_max {} < 1", cfg.r_max)));
    }
    if !cfg.side_min.is_positive() || cfg.side_min > cfg.side_max {
        return Err(InstanceError::InfeasibleConfig(format!(
            "need 0 < side_min <= side_max, got {} and {}",
            cfg.side_min, cfg.side_max
        )));
    }
    if cfg.side_max > cfg.window {
        return Err(InstanceError::InfeasibleConfig(format!(
            "side_max {} exceeds window {}",
            cfg.side_max, cfg.window
        )));
    }
    let s_lo = to_units(&cfg.side_min, q, true)?;
    let s_hi = to_units(&cfg.side_max, q, false)?;
    let window = to_units(&cfg.window, q, false)?;
    let t_hi = to_units(&cfg.r_max, q, false)?;
    if s_lo > s_hi {
        return Err(InstanceError::InfeasibleConfig(format!(
            "no grid value in [{}, {}] at resolution 1/{q}",
            cfg.side_min, cfg.side_max
        )));
    }

    let q64 = q as u64;
    let unit = |v: u64| Scalar::new(v as i64, q as i64).expect("q > 0");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rects = Vec::with_capacity(cfg.n);
    for id in 0..cfg.n {
        let short = rng.gen_range(s_lo..=s_hi);
        let t = rng.gen_range(q64..=t_hi);
        let long = ((short as u128 * t as u128) / q64 as u128).min(window as u128) as u64;
        let (w, h) = if rng.gen_bool(0.5) { (long, short) } else { (short, long) };
        let x = rng.gen_range(0..=window - w);
        let y = rng.gen_range(0..=window - h);
        let rect = Rect::new(id, unit(x), unit(x + w), unit(y), unit(y + h))
            .expect("generated sides are positive");
        rects.push(rect);
    }
    Instance::new(rects, Some(cfg.r_max.clone()))
}

/// Fixed-shape families used as oracle fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    /// Pairwise-disjoint unit squares (edgeless intersection graph).
    DisjointGrid,
    /// Unit squares sharing the point (1, 1) (complete graph).
    CommonPointClique,
    /// Unit squares in a row, consecutive ones touching (path graph).
    Chain,
}

impl StructureKind {
    pub const ALL: [StructureKind; 3] = [
        StructureKind::DisjointGrid,
        StructureKind::CommonPointClique,
        StructureKind::Chain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::DisjointGrid => "disjoint_grid",
            StructureKind::CommonPointClique => "common_point_clique",
            StructureKind::Chain => "chain",
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StructureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown structure kind {s:?}"))
    }
}

pub fn generate_structured(kind: StructureKind, n: usize) -> Instance {
    let square = |id: usize, x: Scalar, y: Scalar| {
        Rect::new(id, x.clone(), x + Scalar::one(), y.clone(), y + Scalar::one())
            .expect("unit square")
    };
    let rects = match kind {
        StructureKind::DisjointGrid => {
            let cols = (1..).find(|c| c * c >= n).unwrap_or(1);
            (0..n)
                .map(|i| square(i, Scalar::from(2 * (i % cols)), Scalar::from(2 * (i / cols))))
                .collect()
        }
        StructureKind::CommonPointClique => (0..n)
            .map(|i| {
                let shift = Scalar::new(i as i64, n as i64).expect("n > 0");
                square(i, shift.clone(), shift)
            })
            .collect(),
        StructureKind::Chain => (0..n)
            .map(|i| square(i, Scalar::from(i), Scalar::zero()))
            .collect(),
    };
    Instance::new(rects, Some(Scalar::one())).expect("structured families are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::intersects;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d).unwrap()
    }

    #[test]
    fn parse_examples() {
        let i = parse_instance(r#"{"rects":[{"id":0,"x":[0,1],"y":[0,1]}]}"#).unwrap();
        assert_eq!(i.len(), 1);
        assert_eq!(i.rects()[0].width(), Scalar::one());

        let i = parse_instance(r#"{"rects":[{"id":0,"x":[0,"1/2"],"y":[0,"1/2"]}]}"#).unwrap();
        assert_eq!(i.rects()[0].x_hi(), &q(1, 2));
        assert_eq!(i.rects()[0].aspect_ratio(), Scalar::one());

        let e = parse_instance(r#"{"rects":[{"id":0,"x":[1,1],"y":[0,1]}]}"#).unwrap_err();
        assert_eq!(e, InstanceError::NonPositiveSide { id: 0, axis: 'x' });
    }

    #[test]
    fn parse_errors_name_the_rectangle() {
        let dup = r#"{"rects":[{"id":0,"x":[0,1],"y":[0,1]},{"id":0,"x":[0,1],"y":[0,1]}]}"#;
        assert_eq!(parse_instance(dup).unwrap_err(), InstanceError::DuplicateId { id: 0 });

        let zero = r#"{"rects":[{"id":0,"x":[0,"1/0"],"y":[0,1]}]}"#;
        assert_eq!(parse_instance(zero).unwrap_err(), InstanceError::ZeroDenominator { id: 0 });

        let gap = r#"{"rects":[{"id":1,"x":[0,1],"y":[0,1]}]}"#;
        assert!(matches!(parse_instance(gap).unwrap_err(), InstanceError::IdOutOfOrder { id: 1, .. }));

        let ratio = r#"{"r":2,"rects":[{"id":0,"x":[0,3],"y":[0,1]}]}"#;
        assert!(matches!(parse_instance(ratio).unwrap_err(), InstanceError::RatioExceeded { id: 0, .. }));

        assert!(matches!(parse_instance(r#"{"rects":[{"id":0}]}"#), Err(InstanceError::Schema(_))));
        assert!(matches!(parse_instance("[]"), Err(InstanceError::Schema(_))));
        assert!(matches!(
            parse_instance(r#"{"rects":[{"id":3,"x":[0,"a"],"y":[0,1]}]}"#),
            Err(InstanceError::Coordinate { id: 3, .. })
        ));
    }

    #[test]
    fn round_trip_keeps_declared_ratio() {
        let text = r#"{"r":"5/2","rects":[{"id":0,"x":[0,"5/2"],"y":[0,1]},{"id":1,"x":["-1/3",2],"y":[4,5]}]}"#;
        let i = parse_instance(text).unwrap();
        assert_eq!(i.r_declared(), Some(&q(5, 2)));
        assert_eq!(parse_instance(&serialize_instance(&i)).unwrap(), i);
    }

    #[test]
    fn family_ratio_examples() {
        let a = Rect::new(0, 0, 1, 0, 1).unwrap();
        let b = Rect::new(1, 0, 3, 0, 1).unwrap();
        assert_eq!(Instance::from_rects([a.clone(), b]).family_ratio().unwrap(), Scalar::from(3));
        assert_eq!(Instance::from_rects([a.clone()]).family_ratio().unwrap(), Scalar::one());
        let c = Rect::new(0, 0, 5, 0, 2).unwrap();
        assert_eq!(Instance::from_rects([c, a]).family_ratio().unwrap(), q(5, 2));
        assert_eq!(Instance::from_rects([]).family_ratio(), Err(InstanceError::Empty));
    }

    #[test]
    fn generator_examples() {
        for seed in 0..5 {
            let cfg = GeneratorConfig { n: 1, seed, ..Default::default() };
            let i = generate_random(&cfg).unwrap();
            assert_eq!(i.rects()[0].aspect_ratio(), Scalar::one());
        }

        let cfg = GeneratorConfig { n: 50, r_max: Scalar::from(3), seed: 7, ..Default::default() };
        assert_eq!(generate_random(&cfg).unwrap(), generate_random(&cfg).unwrap());

        let cfg = GeneratorConfig { n: 200, r_max: q(5, 2), seed: 1, ..Default::default() };
        let i = generate_random(&cfg).unwrap();
        assert!(i.family_ratio().unwrap() <= q(5, 2));
    }

    #[test]
    fn generator_rejects_infeasible() {
        let cfg = GeneratorConfig { side_max: Scalar::from(200), ..Default::default() };
        assert!(matches!(generate_random(&cfg), Err(InstanceError::InfeasibleConfig(_))));
        let cfg = GeneratorConfig { n: 0, ..Default::default() };
        assert!(generate_random(&cfg).is_err());
        let cfg = GeneratorConfig { r_max: q(1, 2), ..Default::default() };
        assert!(generate_random(&cfg).is_err());
        let cfg = GeneratorConfig {
            side_min: q(1, 3000),
            side_max: q(1, 2000),
            ..Default::default()
        };
        assert!(generate_random(&cfg).is_err());
    }

    #[test]
    fn structured_shapes() {
        let edges = |i: &Instance| {
            let mut out = vec![];
            for a in 0..i.len() {
                for b in a + 1..i.len() {
                    if intersects(&i.rects()[a], &i.rects()[b]) {
                        out.push((a, b));
                    }
                }
            }
            out
        };
        assert!(edges(&generate_structured(StructureKind::DisjointGrid, 7)).is_empty());
        assert_eq!(edges(&generate_structured(StructureKind::CommonPointClique, 5)).len(), 10);
        assert_eq!(edges(&generate_structured(StructureKind::Chain, 3)), vec![(0, 1), (1, 2)]);
        assert_eq!("chain".parse::<StructureKind>(), Ok(StructureKind::Chain));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn generated_instances_validate(
                n in 1usize..40,
                r_num in 4i64..16,
                seed in any::<u64>(),
                q_res in prop::sample::select(vec![1u32, 7, 100, 1000]),
            ) {
                let r_max = q(r_num, 4);
                let cfg = GeneratorConfig {
                    n, r_max: r_max.clone(), resolution: q_res, seed,
                    window: Scalar::from(30), side_min: Scalar::one(), side_max: Scalar::from(6),
                };
                let i = generate_random(&cfg).unwrap();
                prop_assert_eq!(i.len(), n);
                let grid = Scalar::from(q_res);
                for (k, r) in i.rects().iter().enumerate() {
                    prop_assert_eq!(r.id(), k);
                    prop_assert!(r.aspect_ratio() <= r_max);
                    prop_assert!(r.shorter_side() >= Scalar::one() && r.shorter_side() <= Scalar::from(6));
                    for c in [r.x_lo(), r.x_hi(), r.y_lo(), r.y_hi()] {
                        prop_assert!((c * &grid).is_integer());
                        prop_assert!(c >= &Scalar::zero() && c <= &Scalar::from(30));
                    }
                }
                let again = parse_instance(&serialize_instance(&i)).unwrap();
                prop_assert_eq!(again, i);
            }
        }
    }
}
