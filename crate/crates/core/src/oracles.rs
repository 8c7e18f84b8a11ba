//! Offline optimum: analytic lower bounds and an exact search for tiny instances.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{Integer, One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::PackError;
use crate::geometry::{Length, Piece, Placement};
use crate::packer::Objective;

pub const EXACT_MAX_PIECES: usize = 6;
pub const EXACT_MAX_NODES: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptKind {
    Exact,
    Lower,
    /// Cost of an explicit packing, hence an upper bound.
    Witness,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptBound {
    pub kind: OptKind,
    pub objective: Objective,
    pub rotations: bool,
    pub value: f64,
}

struct Extremes {
    area: Length,
    longest: Length,
    max_w: Length,
    max_h: Length,
    max_short: Length,
}

fn extremes(pieces: &[Piece]) -> Result<Extremes, PackError> {
    if pieces.is_empty() {
        return Err(PackError::EmptyStream);
    }
    let mut e = Extremes {
        area: Length::zero(),
        longest: Length::zero(),
        max_w: Length::zero(),
        max_h: Length::zero(),
        max_short: Length::zero(),
    };
    for p in pieces {
        e.area += p.area();
        e.longest = e.longest.max_of(p.long_edge().clone());
        e.max_short = e.max_short.max_of(p.short_edge().clone());
        e.max_w = e.max_w.max_of(p.width().clone());
        e.max_h = e.max_h.max_of(p.height().clone());
    }
    Ok(e)
}

/// Perimeter floor: the enclosing box has one side at least `L` and area at least `A`.
pub fn lower_bound_perimeter(pieces: &[Piece], rotations: bool) -> Result<f64, PackError> {
    let e = extremes(pieces)?;
    let l = &e.longest;
    let by_area = if l * l > e.area {
        (l + &(&e.area / l)).to_f64()
    } else {
        2.0 * e.area.to_f64().sqrt()
    };
    let by_dims = if rotations {
        &e.longest + &e.max_short
    } else {
        &e.max_w + &e.max_h
    };
    Ok(2.0 * by_area.max(by_dims.to_f64()))
}

/// Area floor: total area, and the product of the extreme dimensions.
pub fn lower_bound_area_exact(pieces: &[Piece], rotations: bool) -> Result<Length, PackError> {
    let e = extremes(pieces)?;
    let dims = if rotations {
        &e.longest * &e.max_short
    } else {
        &e.max_w * &e.max_h
    };
    Ok(e.area.max_of(dims))
}

pub fn lower_bound_area(pieces: &[Piece], rotations: bool) -> Result<f64, PackError> {
    lower_bound_area_exact(pieces, rotations).map(|v| v.to_f64())
}

/// Square-area floor: the square holds every piece and has side at least the longest edge.
pub fn lower_bound_square_area(pieces: &[Piece]) -> Result<f64, PackError> {
    let e = extremes(pieces)?;
    Ok(e.area.max_of(&e.longest * &e.longest).to_f64())
}

pub fn lower_bound(pieces: &[Piece], objective: Objective, rotations: bool) -> Result<f64, PackError> {
    match objective {
        Objective::Perimeter => lower_bound_perimeter(pieces, rotations),
        Objective::Area => lower_bound_area(pieces, rotations),
        Objective::SquareArea => lower_bound_square_area(pieces),
    }
}

/// Optimal cost with a packing that achieves it.
#[derive(Clone, Debug, Serialize)]
pub struct ExactOpt {
    pub value: Length,
    pub container_width: Length,
    pub container_height: Length,
    pub witness: Vec<Placement>,
    pub nodes: u64,
}

/// Piece sides as integers over a common unit.
fn to_grid(pieces: &[Piece]) -> Result<(Vec<(i64, i64)>, BigInt), PackError> {
    let mut den = BigInt::one();
    for p in pieces {
        for side in [p.width(), p.height()] {
            if !side.is_rational() {
                return Err(PackError::InstanceTooLarge(
                    "sides must be rational multiples of a common unit".into(),
                ));
            }
            den = den.lcm(side.rational_part().denom());
        }
    }
    let scale = |l: &Length| -> Result<i64, PackError> {
        let r = l.rational_part();
        let v = r.numer() * (&den / r.denom());
        v.to_i64()
            .filter(|&v| v <= 1 << 40)
            .ok_or_else(|| PackError::InstanceTooLarge("sides too fine for the common unit".into()))
    };
    let dims = pieces
        .iter()
        .map(|p| Ok((scale(p.width())?, scale(p.height())?)))
        .collect::<Result<_, PackError>>()?;
    Ok((dims, den))
}

fn subset_sums<F: Fn(&(i64, i64)) -> Vec<i64>>(dims: &[(i64, i64)], extents: F) -> Vec<i64> {
    let mut sums = BTreeSet::from([0i64]);
    for d in dims {
        let next: Vec<i64> = sums
            .iter()
            .flat_map(|s| extents(d).into_iter().map(move |e| s + e))
            .collect();
        sums.extend(next);
    }
    sums.into_iter().collect()
}

fn cost(objective: Objective, w: i64, h: i64) -> i128 {
    let (w, h) = (w as i128, h as i128);
    match objective {
        Objective::Perimeter => 2 * (w + h),
        Objective::Area => w * h,
        Objective::SquareArea => w.max(h) * w.max(h),
    }
}

/// Feasibility search for one container on the grid spanned by the anchor coordinates.
struct GridSearch<'a> {
    xs: Vec<i64>,
    ys: Vec<i64>,
    free_area: i128,
    cells: Vec<bool>,
    kinds: &'a [PieceKind],
    remaining: Vec<usize>,
    placed: Vec<(usize, i64, i64, bool)>,
    nodes: &'a mut u64,
}

struct PieceKind {
    dims: (i64, i64),
    orientations: Vec<(i64, i64, bool)>,
    members: Vec<usize>,
}

impl GridSearch<'_> {
    fn cols(&self) -> usize {
        self.xs.len() - 1
    }

    fn cell_area(&self, r: usize, c: usize) -> i128 {
        ((self.xs[c + 1] - self.xs[c]) as i128) * ((self.ys[r + 1] - self.ys[r]) as i128)
    }

    fn span(&self, r: usize, c: usize, w: i64, h: i64) -> Option<(usize, usize)> {
        let c1 = self.xs.binary_search(&(self.xs[c] + w)).ok()?;
        let r1 = self.ys.binary_search(&(self.ys[r] + h)).ok()?;
        let cols = self.cols();
        for rr in r..r1 {
            if self.cells[rr * cols + c..rr * cols + c1].iter().any(|&b| b) {
                return None;
            }
        }
        Some((r1, c1))
    }

    fn fill(&mut self, r0: usize, r1: usize, c0: usize, c1: usize, value: bool) {
        let cols = self.cols();
        for rr in r0..r1 {
            self.cells[rr * cols + c0..rr * cols + c1].fill(value);
        }
    }

    fn search(&mut self, from: usize) -> Result<bool, PackError> {
        *self.nodes += 1;
        if *self.nodes > EXACT_MAX_NODES {
            return Err(PackError::InstanceTooLarge(format!(
                "more than {EXACT_MAX_NODES} search nodes"
            )));
        }
        if self.remaining.iter().all(|&c| c == 0) {
            return Ok(true);
        }
        let Some(first) = (from..self.cells.len()).find(|&i| !self.cells[i]) else {
            return Ok(false);
        };
        let cols = self.cols();
        let (r, c) = (first / cols, first % cols);

        // Either some piece has its lower-left corner here, or this cell stays empty.
        for k in 0..self.kinds.len() {
            if self.remaining[k] == 0 {
                continue;
            }
            let kind = &self.kinds[k];
            for &(w, h, rotated) in &kind.orientations {
                if let Some((r1, c1)) = self.span(r, c, w, h) {
                    self.fill(r, r1, c, c1, true);
                    self.remaining[k] -= 1;
                    let member = kind.members[self.remaining[k]];
                    self.placed.push((member, self.xs[c], self.ys[r], rotated));
                    if self.search(first + 1)? {
                        return Ok(true);
                    }
                    self.placed.pop();
                    self.remaining[k] += 1;
                    self.fill(r, r1, c, c1, false);
                }
            }
        }
        let waste = self.cell_area(r, c);
        if waste <= self.free_area {
            self.free_area -= waste;
            self.cells[first] = true;
            let found = self.search(first + 1)?;
            self.cells[first] = false;
            self.free_area += waste;
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Minimum-cost packing of a small instance with rational sides.
///
/// Completeness: slide every piece left, then down, and repeat. Coordinates
/// only decrease and stay in a finite set, so this stops, and then every piece
/// touches the container wall or another piece on its left and below. Each
/// coordinate is then a sum of extents of other pieces. The container sides are
/// such sums too, so trying every container spanned by subset sums and every
/// placement on the induced grid finds an optimum. The search fills the grid
/// in row-major order; the first uncovered cell is either a piece's
/// lower-left cell or left empty.
pub fn exact_opt(pieces: &[Piece], objective: Objective, rotations: bool) -> Result<ExactOpt, PackError> {
    if pieces.is_empty() {
        return Err(PackError::EmptyStream);
    }
    if pieces.len() > EXACT_MAX_PIECES {
        return Err(PackError::InstanceTooLarge(format!(
            "{} pieces, at most {EXACT_MAX_PIECES} supported",
            pieces.len()
        )));
    }
    let (dims, den) = to_grid(pieces)?;

    let mut kinds: Vec<PieceKind> = Vec::new();
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(dims[i].0 * dims[i].1));
    for i in order {
        let (w, h) = dims[i];
        let key = if rotations { (w.max(h), w.min(h)) } else { (w, h) };
        match kinds.iter_mut().find(|k| k.dims == key) {
            Some(k) => k.members.push(i),
            None => {
                let mut orientations = vec![(w, h, false)];
                if rotations && w != h {
                    orientations.push((h, w, true));
                }
                kinds.push(PieceKind {
                    dims: key,
                    orientations,
                    members: vec![i],
                })
            }
        }
    }
    // Orientation flags are relative to each member's own sides.
    let mut flips = vec![false; dims.len()];
    for k in &kinds {
        let base = (k.orientations[0].0, k.orientations[0].1);
        for &m in &k.members {
            flips[m] = dims[m] != base;
        }
    }

    let (xs, ys) = if rotations {
        let s = subset_sums(&dims, |&(w, h)| vec![w, h]);
        (s.clone(), s)
    } else {
        (subset_sums(&dims, |&(w, _)| vec![w]), subset_sums(&dims, |&(_, h)| vec![h]))
    };
    let total: i128 = dims.iter().map(|&(w, h)| w as i128 * h as i128).sum();
    let min_w = dims.iter().map(|&(w, h)| if rotations { w.min(h) } else { w }).max().unwrap();
    let min_h = dims.iter().map(|&(w, h)| if rotations { w.min(h) } else { h }).max().unwrap();
    let longest = dims.iter().map(|&(w, h)| w.max(h)).max().unwrap();

    // Row and column packings bound the search from above.
    let row = (dims.iter().map(|d| d.0).sum::<i64>(), dims.iter().map(|d| d.1).max().unwrap());
    let col = (dims.iter().map(|d| d.0).max().unwrap(), dims.iter().map(|d| d.1).sum::<i64>());
    let upper = cost(objective, row.0, row.1).min(cost(objective, col.0, col.1));

    let mut containers: Vec<(i128, i64, i64)> = Vec::new();
    for &w in xs.iter().filter(|&&w| w >= min_w) {
        for &h in ys.iter().filter(|&&h| h >= min_h) {
            if rotations && w.max(h) < longest {
                continue;
            }
            let c = cost(objective, w, h);
            if (w as i128) * (h as i128) >= total && c <= upper {
                containers.push((c, w, h));
            }
        }
    }
    containers.sort();

    let mut nodes = 0u64;
    for (c, w, h) in containers {
        let gx: Vec<i64> = xs.iter().copied().filter(|&x| x <= w).collect();
        let gy: Vec<i64> = ys.iter().copied().filter(|&y| y <= h).collect();
        let cells = vec![false; (gx.len() - 1) * (gy.len() - 1)];
        let mut search = GridSearch {
            free_area: (w as i128) * (h as i128) - total,
            xs: gx,
            ys: gy,
            cells,
            kinds: &kinds,
            remaining: kinds.iter().map(|k| k.members.len()).collect(),
            placed: Vec::new(),
            nodes: &mut nodes,
        };
        if search.search(0)? {
            let unit = |v: i64| Length::from_rational(num::BigRational::new(BigInt::from(v), den.clone()));
            let mut witness: Vec<Placement> = search
                .placed
                .iter()
                .map(|&(i, x, y, rotated)| Placement::new(i, unit(x), unit(y), rotated ^ flips[i]))
                .collect();
            witness.sort_by_key(|p| p.piece_index);
            let value = match objective {
                Objective::Perimeter => (unit(w) + unit(h)).scale(2),
                Objective::Area => unit(w) * unit(h),
                Objective::SquareArea => {
                    let s = unit(w.max(h));
                    &s * &s
                }
            };
            debug_assert_eq!(value, {
                let d = Length::from_rational(num::BigRational::new(BigInt::one(), den.clone()));
                match objective {
                    Objective::Perimeter => d.scale(c as i64),
                    _ => &d * &d.scale(c as i64),
                }
            });
            return Ok(ExactOpt {
                value,
                container_width: unit(w),
                container_height: unit(h),
                witness,
                nodes,
            });
        }
    }
    // The row packing is always a feasible container.
    Err(PackError::Invariant("exact search found no packing".into()))
}
