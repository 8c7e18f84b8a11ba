//! Dynamic-box area packers.
//!
//! Box `B_k` has width `2^k`, sits on the x-axis at `x = 2^k` and is filled by
//! next-fit shelves up to a height threshold that grows with the stream. Exactly
//! one box is active; it only ever moves right.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::PackError;
use crate::geometry::{bounding_box, BoundingBox, Length, Piece, PlacedPiece, Placement};
use crate::packer::{OnlinePacker, Overlay, OverlayKind};
use crate::shelves::{nfs_place, shelf_class, NfsOutcome, ShelfState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DynBoxVariant {
    Trans,
    Rot,
    RotOpt4,
    RotCombined,
}

impl DynBoxVariant {
    pub fn rotates(self) -> bool {
        self != DynBoxVariant::Trans
    }
}

/// Height threshold after `j` pieces with running max height `h` and area `sigma`.
pub fn threshold(variant: DynBoxVariant, j: u64, h: f64, sigma: f64, prev: f64) -> f64 {
    let by_count = h * (j as f64).sqrt() + 7.0 * h;
    let by_area = sigma.powf(0.75) + 7.0 * h;
    match variant {
        DynBoxVariant::Trans | DynBoxVariant::Rot => by_count,
        DynBoxVariant::RotOpt4 => by_area,
        DynBoxVariant::RotCombined => {
            let jf = j as f64;
            let candidate = if sigma < jf * jf { by_area } else { by_count };
            prev.max(candidate)
        }
    }
}

/// How a piece reached its box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxMove {
    Stay,
    WidthJump,
    Overflow,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynBoxEvent {
    pub piece_index: usize,
    pub box_index: i32,
    pub threshold: f64,
    pub moved: BoxMove,
}

#[derive(Clone, Debug)]
pub struct DynBox {
    variant: DynBoxVariant,
    boxes: BTreeMap<i32, ShelfState>,
    active: Option<i32>,
    count: u64,
    max_height: Length,
    sigma: Length,
    threshold: f64,
    placed: Vec<PlacedPiece>,
    events: Vec<DynBoxEvent>,
}

impl DynBox {
    pub fn new(variant: DynBoxVariant) -> Self {
        Self {
            variant,
            boxes: BTreeMap::new(),
            active: None,
            count: 0,
            max_height: Length::zero(),
            sigma: Length::zero(),
            threshold: 0.0,
            placed: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn variant(&self) -> DynBoxVariant {
        self.variant
    }

    pub fn active(&self) -> Option<i32> {
        self.active
    }

    pub fn threshold_value(&self) -> f64 {
        self.threshold
    }

    pub fn boxes(&self) -> &BTreeMap<i32, ShelfState> {
        &self.boxes
    }

    pub fn events(&self) -> &[DynBoxEvent] {
        &self.events
    }

    /// Exact bounding box of everything placed so far.
    pub fn report_cost(&self) -> Result<BoundingBox, PackError> {
        bounding_box(&self.placed)
    }

    /// Outline of box `k` at the current threshold.
    pub fn box_rect(&self, k: i32) -> BoundingBox {
        let x = Length::pow2(k);
        let height = Length::from_f64(self.threshold).unwrap_or_else(Length::zero);
        BoundingBox::from_origin(x, Length::zero(), &Length::pow2(k), &height)
    }

    fn try_box(&mut self, k: i32, piece: &Piece) -> Option<(Length, Length)> {
        let state = self.boxes.entry(k).or_insert_with(|| ShelfState::new(k));
        let outcome = nfs_place(state, piece, self.threshold).expect("box is wide enough");
        match outcome {
            NfsOutcome::Placed { x, y } => Some((x + Length::pow2(k), y)),
            NfsOutcome::Overflow => {
                if state.is_empty() {
                    self.boxes.remove(&k);
                }
                None
            }
        }
    }
}

impl OnlinePacker for DynBox {
    fn name(&self) -> &'static str {
        match self.variant {
            DynBoxVariant::Trans => "dynbox-trans",
            DynBoxVariant::Rot => "dynbox-rot",
            DynBoxVariant::RotOpt4 => "dynbox-rot-opt4",
            DynBoxVariant::RotCombined => "dynbox-rot-combined",
        }
    }

    fn rotations(&self) -> bool {
        self.variant.rotates()
    }

    fn place(&mut self, piece: &Piece) -> Placement {
        let index = self.placed.len();
        let rotated = self.variant.rotates() && piece.width() > piece.height();
        let p = if rotated { piece.rotated() } else { piece.clone() };

        self.count += 1;
        if p.height() > &self.max_height {
            self.max_height = p.height().clone();
        }
        self.sigma += p.area();
        self.threshold = threshold(
            self.variant,
            self.count,
            self.max_height.to_f64(),
            self.sigma.to_f64(),
            self.threshold,
        );

        let mut moved = BoxMove::Stay;
        let mut k = match self.active {
            Some(a) if p.width() <= &Length::pow2(a) => a,
            _ => {
                moved = BoxMove::WidthJump;
                shelf_class(p.width())
            }
        };
        let (x, y) = loop {
            // A fresh box never overflows: T >= 7H exceeds any shelf height 2^j < 2H.
            match self.try_box(k, &p) {
                Some(pos) => break pos,
                None => {
                    moved = BoxMove::Overflow;
                    k += 1;
                }
            }
        };
        self.active = Some(k);
        self.events.push(DynBoxEvent {
            piece_index: index,
            box_index: k,
            threshold: self.threshold,
            moved,
        });
        let placement = Placement::new(index, x, y, rotated);
        self.placed.push((piece.clone(), placement.clone()));
        placement
    }

    fn overlays(&self) -> Vec<Overlay> {
        let mut out = Vec::new();
        for (&k, state) in &self.boxes {
            out.push(Overlay {
                kind: OverlayKind::Box,
                label: format!("B_{k}"),
                rect: self.box_rect(k).to_f64(),
            });
            let x0 = Length::pow2(k);
            for shelf in state.shelves() {
                let r = BoundingBox::from_origin(x0.clone(), shelf.y_bottom.clone(), state.box_width(), &shelf.height());
                out.push(Overlay {
                    kind: OverlayKind::Shelf,
                    label: format!("2^{}", shelf.height_class),
                    rect: r.to_f64(),
                });
            }
        }
        out
    }
}
