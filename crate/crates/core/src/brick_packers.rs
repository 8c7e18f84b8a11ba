//! Online perimeter packers built on the brick hierarchy.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bricks::{suitable_level, Brick, BrickStack, BrickTree, Root};
use crate::geometry::{Piece, Placement};
use crate::packer::{OnlinePacker, Overlay, OverlayKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BrickVariant {
    Translation,
    /// Turns every piece upright (height at least width) first.
    Rotation,
    /// Treats `B_{>k}` as one fundamental brick, `k` being the level of the first piece.
    Modified,
}

/// What happened to one piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrickEvent {
    pub piece_index: usize,
    pub brick: Brick,
    pub opened: bool,
    pub rotated: bool,
}

#[derive(Clone, Debug)]
pub struct BrickPacker {
    variant: BrickVariant,
    tree: BrickTree,
    stacks: BTreeMap<Brick, BrickStack>,
    tail_level: Option<i32>,
    events: Vec<BrickEvent>,
}

impl BrickPacker {
    pub fn new(variant: BrickVariant) -> Self {
        Self {
            variant,
            tree: BrickTree::new(),
            stacks: BTreeMap::new(),
            tail_level: None,
            events: Vec::new(),
        }
    }

    pub fn variant(&self) -> BrickVariant {
        self.variant
    }

    /// The occupied bricks `D`, in level order then `≺`.
    pub fn stacks(&self) -> impl Iterator<Item = &BrickStack> {
        self.stacks.values()
    }

    pub fn events(&self) -> &[BrickEvent] {
        &self.events
    }

    /// Level of the synthetic root, once the modified variant has seen a piece.
    pub fn tail_level(&self) -> Option<i32> {
        self.tail_level
    }

    fn first_stack_with_room(&self, level: i32, piece: &Piece) -> Option<Brick> {
        let mut stacks = self
            .stacks
            .range(Brick::tail(level)..Brick::tail(level + 1));
        let probe = stacks.clone().next()?;
        let extent = probe.1.extent(piece);
        let extent_f64 = extent.to_f64();
        stacks
            .find(|(_, s)| s.room_for(extent, extent_f64))
            .map(|(b, _)| b.clone())
    }

    /// The `≺`-minimum free brick of `level`.
    fn min_free_brick(&self, level: i32) -> Brick {
        let top = match self.tail_level {
            Some(t) if self.variant == BrickVariant::Modified => {
                if t <= level {
                    if let Some(b) = self.tree.min_free_in(Root::Tail(t), level) {
                        return b;
                    }
                }
                t.min(level)
            }
            _ => level,
        };
        // An untouched fundamental brick is always free, so this terminates.
        (i32::MIN..=top)
            .rev()
            .find_map(|i| self.tree.min_free_in(Root::Fundamental(i), level))
            .expect("the quadrant always has a free brick")
    }
}

impl OnlinePacker for BrickPacker {
    fn name(&self) -> &'static str {
        match self.variant {
            BrickVariant::Translation => "brick-translation",
            BrickVariant::Rotation => "brick-rotation",
            BrickVariant::Modified => "brick-modified",
        }
    }

    fn rotations(&self) -> bool {
        self.variant == BrickVariant::Rotation
    }

    fn place(&mut self, piece: &Piece) -> Placement {
        let index = self.events.len();
        let rotated = self.variant == BrickVariant::Rotation && piece.width() > piece.height();
        let upright = if rotated { piece.rotated() } else { piece.clone() };
        let level = suitable_level(&upright);
        if self.variant == BrickVariant::Modified && self.tail_level.is_none() {
            self.tail_level = Some(level);
        }

        let (brick, opened) = match self.first_stack_with_room(level, &upright) {
            Some(b) => (b, false),
            None => {
                let b = self.min_free_brick(level);
                self.tree.occupy(&b);
                self.stacks.insert(b.clone(), BrickStack::new(b.clone()));
                (b, true)
            }
        };
        let stack = self.stacks.get_mut(&brick).expect("stack exists");
        let placement = stack
            .stack_place(&upright, index, rotated)
            .expect("an empty suitable brick always has room");
        self.events.push(BrickEvent {
            piece_index: index,
            brick,
            opened,
            rotated,
        });
        placement
    }

    fn overlays(&self) -> Vec<Overlay> {
        self.stacks
            .values()
            .map(|s| Overlay {
                kind: OverlayKind::Brick,
                label: s.brick().to_string(),
                rect: s.rect().to_f64(),
            })
            .collect()
    }
}

/// Result of feeding a whole stream to a brick packer.
#[derive(Clone, Debug)]
pub struct BrickRun {
    pub placements: Vec<Placement>,
    pub events: Vec<BrickEvent>,
    pub stacks: Vec<BrickStack>,
}

impl BrickRun {
    /// Occupied bricks right after piece `prefix_len - 1` was placed.
    pub fn bricks_after(&self, prefix_len: usize) -> Vec<Brick> {
        self.events[..prefix_len]
            .iter()
            .filter(|e| e.opened)
            .map(|e| e.brick.clone())
            .collect()
    }
}

pub fn run_stream(variant: BrickVariant, pieces: &[Piece]) -> BrickRun {
    let mut packer = BrickPacker::new(variant);
    let placements = pieces.iter().map(|p| packer.place(p)).collect();
    BrickRun {
        placements,
        stacks: packer.stacks().cloned().collect(),
        events: packer.events,
    }
}
