//! Points, closed axis-parallel rectangles and the predicates between them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("rectangle {id}: zero or negative width")]
    NonPositiveWidth { id: usize },
    #[error("rectangle {id}: zero or negative height")]
    NonPositiveHeight { id: usize },
    #[error("point {0} is not contained in any rectangle of the family")]
    PointNotCovered(Point),
}

/// A point of the plane. Ordered lexicographically by `(x, y)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(Scalar, Scalar)", into = "(Scalar, Scalar)")]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: impl Into<Scalar>, y: impl Into<Scalar>) -> Self {
        Point {
            x: x.into(),
            y: y.into(),
        }
    }
}

impl From<(Scalar, Scalar)> for Point {
    fn from((x, y): (Scalar, Scalar)) -> Self {
        Point { x, y }
    }
}

impl From<Point> for (Scalar, Scalar) {
    fn from(p: Point) -> Self {
        (p.x, p.y)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

/// A closed box `[x_lo, x_hi] × [y_lo, y_hi]` that may be degenerate
/// (zero width and/or height). Produced by [`intersection`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedBox {
    pub x_lo: Scalar,
    pub x_hi: Scalar,
    pub y_lo: Scalar,
    pub y_hi: Scalar,
}

impl ClosedBox {
    pub fn width(&self) -> Scalar {
        &self.x_hi - &self.x_lo
    }

    pub fn height(&self) -> Scalar {
        &self.y_hi - &self.y_lo
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.x_lo <= p.x && p.x <= self.x_hi && self.y_lo <= p.y && p.y <= self.y_hi
    }

    /// Corners in the order lower-left, lower-right, upper-left, upper-right.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_lo.clone(), self.y_lo.clone()),
            Point::new(self.x_hi.clone(), self.y_lo.clone()),
            Point::new(self.x_lo.clone(), self.y_hi.clone()),
            Point::new(self.x_hi.clone(), self.y_hi.clone()),
        ]
    }

    pub fn lower_left(&self) -> Point {
        Point::new(self.x_lo.clone(), self.y_lo.clone())
    }
}

/// A closed axis-parallel rectangle with strictly positive width and height.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rect {
    id: usize,
    x_lo: Scalar,
    x_hi: Scalar,
    y_lo: Scalar,
    y_hi: Scalar,
}

impl Rect {
    pub fn new(
        id: usize,
        x_lo: impl Into<Scalar>,
        x_hi: impl Into<Scalar>,
        y_lo: impl Into<Scalar>,
        y_hi: impl Into<Scalar>,
    ) -> Result<Self, GeometryError> {
        let (x_lo, x_hi, y_lo, y_hi) = (x_lo.into(), x_hi.into(), y_lo.into(), y_hi.into());
        if x_lo >= x_hi {
            return Err(GeometryError::NonPositiveWidth { id });
        }
        if y_lo >= y_hi {
            return Err(GeometryError::NonPositiveHeight { id });
        }
        Ok(Rect {
            id,
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    pub fn x_lo(&self) -> &Scalar {
        &self.x_lo
    }

    pub fn x_hi(&self) -> &Scalar {
        &self.x_hi
    }

    pub fn y_lo(&self) -> &Scalar {
        &self.y_lo
    }

    pub fn y_hi(&self) -> &Scalar {
        &self.y_hi
    }

    pub fn width(&self) -> Scalar {
        &self.x_hi - &self.x_lo
    }

    pub fn height(&self) -> Scalar {
        &self.y_hi - &self.y_lo
    }

    /// Length of the shorter side.
    pub fn shorter_side(&self) -> Scalar {
        std::cmp::min(self.width(), self.height())
    }

    /// Length of the longer side.
    pub fn longer_side(&self) -> Scalar {
        std::cmp::max(self.width(), self.height())
    }

    /// Longer side over shorter side; always at least 1.
    pub fn aspect_ratio(&self) -> Scalar {
        self.longer_side() / self.shorter_side()
    }

    pub fn as_box(&self) -> ClosedBox {
        ClosedBox {
            x_lo: self.x_lo.clone(),
            x_hi: self.x_hi.clone(),
            y_lo: self.y_lo.clone(),
            y_hi: self.y_hi.clone(),
        }
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        contains_point(self, p)
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        intersects(self, other)
    }
}

/// Closed-set intersection test; boundary contact counts.
pub fn intersects(a: &Rect, b: &Rect) -> bool {
    a.x_lo <= b.x_hi && b.x_lo <= a.x_hi && a.y_lo <= b.y_hi && b.y_lo <= a.y_hi
}

/// Intersection of two closed rectangles, `None` when empty.
pub fn intersection(a: &Rect, b: &Rect) -> Option<ClosedBox> {
    if !intersects(a, b) {
        return None;
    }
    Some(ClosedBox {
        x_lo: std::cmp::max(&a.x_lo, &b.x_lo).clone(),
        x_hi: std::cmp::min(&a.x_hi, &b.x_hi).clone(),
        y_lo: std::cmp::max(&a.y_lo, &b.y_lo).clone(),
        y_hi: std::cmp::min(&a.y_hi, &b.y_hi).clone(),
    })
}

pub fn box_intersects(r: &Rect, c: &ClosedBox) -> bool {
    r.x_lo <= c.x_hi && c.x_lo <= r.x_hi && r.y_lo <= c.y_hi && c.y_lo <= r.y_hi
}

pub fn contains_point(r: &Rect, p: &Point) -> bool {
    r.x_lo <= p.x && p.x <= r.x_hi && r.y_lo <= p.y && p.y <= r.y_hi
}

/// Moves `p` to the lower-left corner of the common intersection of every
/// rectangle in `family` that contains it. The result stays inside all of them.
pub fn snap_point(p: &Point, family: &[Rect]) -> Result<Point, GeometryError> {
    let mut hits = family.iter().filter(|r| contains_point(r, p));
    let first = hits
        .next()
        .ok_or_else(|| GeometryError::PointNotCovered(p.clone()))?;
    let (mut x, mut y) = (&first.x_lo, &first.y_lo);
    for r in hits {
        x = std::cmp::max(x, &r.x_lo);
        y = std::cmp::max(y, &r.y_lo);
    }
    Ok(Point::new(x.clone(), y.clone()))
}
