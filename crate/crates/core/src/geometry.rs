//! Rectangles, placements, bounding boxes and the three cost functions.

use serde::Serialize;

use crate::error::PackError;
pub use crate::length::Length;

/// An axis-parallel rectangle waiting to be packed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Piece {
    width: Length,
    height: Length,
}

impl Piece {
    /// Rejects zero or negative sides.
    pub fn new(width: Length, height: Length) -> Result<Self, PackError> {
        if !width.is_positive() || !height.is_positive() {
            return Err(PackError::DegeneratePiece {
                width: width.to_f64(),
                height: height.to_f64(),
            });
        }
        Ok(Self { width, height })
    }

    /// Convenience constructor for rational sides given as `num/den` pairs.
    pub fn ratio(w: (i64, i64), h: (i64, i64)) -> Result<Self, PackError> {
        Self::new(Length::from_ratio(w.0, w.1), Length::from_ratio(h.0, h.1))
    }

    pub fn square(side: Length) -> Result<Self, PackError> {
        Self::new(side.clone(), side)
    }

    pub fn from_f64(width: f64, height: f64) -> Result<Self, PackError> {
        let conv = |v: f64| {
            Length::from_f64(v).ok_or(PackError::DegeneratePiece {
                width,
                height,
            })
        };
        Self::new(conv(width)?, conv(height)?)
    }

    pub fn width(&self) -> &Length {
        &self.width
    }

    pub fn height(&self) -> &Length {
        &self.height
    }

    pub fn area(&self) -> Length {
        &self.width * &self.height
    }

    pub fn rotated(&self) -> Piece {
        Piece {
            width: self.height.clone(),
            height: self.width.clone(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    pub fn long_edge(&self) -> &Length {
        if self.width >= self.height {
            &self.width
        } else {
            &self.height
        }
    }

    pub fn short_edge(&self) -> &Length {
        if self.width >= self.height {
            &self.height
        } else {
            &self.width
        }
    }

    /// Extents after an optional quarter turn.
    pub fn oriented(&self, rotated: bool) -> (&Length, &Length) {
        if rotated {
            (&self.height, &self.width)
        } else {
            (&self.width, &self.height)
        }
    }
}

/// Where a piece ended up: lower-left corner plus a quarter-turn flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub piece_index: usize,
    pub x: Length,
    pub y: Length,
    pub rotated: bool,
}

impl Placement {
    pub fn new(piece_index: usize, x: Length, y: Length, rotated: bool) -> Self {
        Self {
            piece_index,
            x,
            y,
            rotated,
        }
    }

    /// The closed rectangle this placement covers.
    pub fn rect(&self, piece: &Piece) -> BoundingBox {
        let (w, h) = piece.oriented(self.rotated);
        BoundingBox {
            x_min: self.x.clone(),
            y_min: self.y.clone(),
            x_max: &self.x + w,
            y_max: &self.y + h,
        }
    }
}

/// Axis-parallel box `[x_min, x_max] x [y_min, y_max]`. Also used as a plain rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoundingBox {
    pub x_min: Length,
    pub y_min: Length,
    pub x_max: Length,
    pub y_max: Length,
}

impl BoundingBox {
    pub fn new(x_min: Length, y_min: Length, x_max: Length, y_max: Length) -> Self {
        debug_assert!(x_min <= x_max && y_min <= y_max);
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn from_origin(x: Length, y: Length, width: &Length, height: &Length) -> Self {
        let x_max = &x + width;
        let y_max = &y + height;
        Self::new(x, y, x_max, y_max)
    }

    pub fn width(&self) -> Length {
        &self.x_max - &self.x_min
    }

    pub fn height(&self) -> Length {
        &self.y_max - &self.y_min
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            x_min: self.x_min.clone().min_of(other.x_min.clone()),
            y_min: self.y_min.clone().min_of(other.y_min.clone()),
            x_max: self.x_max.clone().max_of(other.x_max.clone()),
            y_max: self.y_max.clone().max_of(other.y_max.clone()),
        }
    }

    pub fn contains(&self, other: &BoundingBox) -> bool {
        self.x_min <= other.x_min
            && self.y_min <= other.y_min
            && other.x_max <= self.x_max
            && other.y_max <= self.y_max
    }

    /// True iff the open interiors intersect.
    pub fn interiors_overlap(&self, other: &BoundingBox) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }

    pub fn translate(&self, dx: &Length, dy: &Length) -> BoundingBox {
        BoundingBox {
            x_min: &self.x_min + dx,
            y_min: &self.y_min + dy,
            x_max: &self.x_max + dx,
            y_max: &self.y_max + dy,
        }
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [
            self.x_min.to_f64(),
            self.y_min.to_f64(),
            self.x_max.to_f64(),
            self.y_max.to_f64(),
        ]
    }
}

/// A piece together with its final pose.
pub type PlacedPiece = (Piece, Placement);

/// Smallest box containing every placed rectangle.
pub fn bounding_box(placed: &[PlacedPiece]) -> Result<BoundingBox, PackError> {
    let mut iter = placed.iter().map(|(p, pl)| pl.rect(p));
    let first = iter.next().ok_or(PackError::EmptyPacking)?;
    Ok(iter.fold(first, |acc, r| acc.union(&r)))
}

pub fn semiperimeter(b: &BoundingBox) -> Length {
    b.width() + b.height()
}

pub fn perimeter_cost(b: &BoundingBox) -> Length {
    semiperimeter(b).scale(2)
}

pub fn area_cost(b: &BoundingBox) -> Length {
    b.width() * b.height()
}

/// Area of the smallest enclosing axis-parallel square.
pub fn square_area_cost(b: &BoundingBox) -> Length {
    let side = b.width().max_of(b.height());
    &side * &side
}

/// True iff no two placed rectangles share interior points. Edge contact is allowed.
///
/// A float sweep proposes candidate pairs; every candidate is decided exactly.
pub fn interiors_disjoint(placed: &[PlacedPiece]) -> bool {
    let rects: Vec<BoundingBox> = placed.iter().map(|(p, pl)| pl.rect(p)).collect();
    rects_interiors_disjoint(&rects)
}

pub fn rects_interiors_disjoint(rects: &[BoundingBox]) -> bool {
    let approx: Vec<[f64; 4]> = rects.iter().map(BoundingBox::to_f64).collect();
    let scale = approx
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(1.0f64, f64::max);
    let tol = scale * 1e-9;
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| approx[a][0].total_cmp(&approx[b][0]));
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let x0 = approx[i][0];
        active.retain(|&j| approx[j][2] > x0 - tol);
        for &j in &active {
            let (a, b) = (&approx[i], &approx[j]);
            let may_overlap = a[1] < b[3] + tol && b[1] < a[3] + tol;
            if may_overlap && rects[i].interiors_overlap(&rects[j]) {
                return false;
            }
        }
        active.push(i);
    }
    true
}
