//! Next-fit shelf packing inside a box of width `2^k`.
//!
//! A piece of height `h` with `2^(j-1) < h <= 2^j` goes on a shelf of height
//! `2^j`. Each height class keeps at most one sparse shelf (filled width at most
//! half the box width); new shelves are opened on top of the stack.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::PackError;
use crate::geometry::{Length, Piece};

/// Unique `j` with `2^(j-1) < h <= 2^j`.
pub fn shelf_class(h: &Length) -> i32 {
    debug_assert!(h.is_positive());
    let mut j = h.to_f64().log2().ceil() as i32;
    while &Length::pow2(j) < h {
        j += 1;
    }
    while &Length::pow2(j - 1) >= h {
        j -= 1;
    }
    j
}

#[derive(Clone, Debug, Serialize)]
pub struct Shelf {
    pub height_class: i32,
    pub y_bottom: Length,
    pub fill_width: Length,
    pub piece_area: Length,
}

impl Shelf {
    pub fn height(&self) -> Length {
        Length::pow2(self.height_class)
    }
}

/// Where a piece landed, relative to the box's lower-left corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NfsOutcome {
    Placed { x: Length, y: Length },
    Overflow,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShelfState {
    box_width_exp: i32,
    #[serde(skip)]
    box_width: Length,
    shelves: Vec<Shelf>,
    total_height: Length,
    #[serde(skip)]
    sparse: BTreeMap<i32, usize>,
    #[serde(skip)]
    max_piece_height: Length,
    #[serde(skip)]
    piece_area: Length,
}

impl ShelfState {
    pub fn new(box_width_exp: i32) -> Self {
        Self {
            box_width_exp,
            box_width: Length::pow2(box_width_exp),
            shelves: Vec::new(),
            total_height: Length::zero(),
            sparse: BTreeMap::new(),
            max_piece_height: Length::zero(),
            piece_area: Length::zero(),
        }
    }

    pub fn box_width_exp(&self) -> i32 {
        self.box_width_exp
    }

    pub fn box_width(&self) -> &Length {
        &self.box_width
    }

    pub fn shelves(&self) -> &[Shelf] {
        &self.shelves
    }

    pub fn total_height(&self) -> &Length {
        &self.total_height
    }

    pub fn max_piece_height(&self) -> &Length {
        &self.max_piece_height
    }

    pub fn is_empty(&self) -> bool {
        self.shelves.is_empty()
    }

    pub fn is_sparse(&self, shelf: &Shelf) -> bool {
        shelf.fill_width.scale(2) <= self.box_width
    }

    /// Number of sparse shelves per height class.
    pub fn sparse_counts(&self) -> BTreeMap<i32, usize> {
        let mut counts = BTreeMap::new();
        for s in self.shelves.iter().filter(|s| self.is_sparse(s)) {
            *counts.entry(s.height_class).or_insert(0) += 1;
        }
        counts
    }

    /// Shelf heights, piece area and used box area `2^k * H`.
    pub fn density_report(&self) -> (Length, Length, Length) {
        (
            self.total_height.clone(),
            self.piece_area.clone(),
            &self.box_width * &self.total_height,
        )
    }
}

/// Next-fit placement of `piece` (already in its final orientation).
///
/// Overflow is only possible when a new shelf is needed: its top would rise
/// above `threshold`. The state is left untouched in that case.
pub fn nfs_place(
    state: &mut ShelfState,
    piece: &Piece,
    threshold: f64,
) -> Result<NfsOutcome, PackError> {
    let (w, h) = (piece.width(), piece.height());
    if w > &state.box_width {
        return Err(PackError::PieceTooWide {
            width: w.to_f64(),
            box_width: state.box_width.to_f64(),
        });
    }
    let class = shelf_class(h);

    let target = match state.sparse.get(&class) {
        Some(&i) if &state.shelves[i].fill_width + w <= state.box_width => i,
        _ => {
            let top = &state.total_height + &Length::pow2(class);
            if top.to_f64() > threshold * (1.0 + 1e-12) {
                return Ok(NfsOutcome::Overflow);
            }
            state.shelves.push(Shelf {
                height_class: class,
                y_bottom: state.total_height.clone(),
                fill_width: Length::zero(),
                piece_area: Length::zero(),
            });
            state.total_height = top;
            let i = state.shelves.len() - 1;
            // A sparse shelf of this class without room forces w > 2^(k-1),
            // so the new shelf is dense at once and the old one stays current.
            state.sparse.entry(class).or_insert(i);
            i
        }
    };

    let shelf = &mut state.shelves[target];
    let x = shelf.fill_width.clone();
    let y = shelf.y_bottom.clone();
    shelf.fill_width += w;
    let area = piece.area();
    shelf.piece_area += &area;
    state.piece_area += &area;
    if h > &state.max_piece_height {
        state.max_piece_height = h.clone();
    }
    if state.shelves[target].fill_width.scale(2) > state.box_width {
        if state.sparse.get(&class) == Some(&target) {
            state.sparse.remove(&class);
        }
    }
    Ok(NfsOutcome::Placed { x, y })
}
