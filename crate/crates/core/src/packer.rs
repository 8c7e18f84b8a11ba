//! The online packing contract shared by every algorithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::brick_packers::{BrickPacker, BrickVariant};
use crate::dynbox::{DynBox, DynBoxVariant};
use crate::error::PackError;
use crate::geometry::{Piece, Placement};

/// An online packer sees one piece at a time and must commit to its pose.
pub trait OnlinePacker {
    fn name(&self) -> &'static str;

    /// Whether the packer may turn pieces by 90 degrees.
    fn rotations(&self) -> bool;

    /// Places the next piece. The returned placement's `piece_index` counts
    /// pieces seen so far, starting at zero.
    fn place(&mut self, piece: &Piece) -> Placement;

    /// Outlines of internal structure (bricks, boxes, shelves) for drawing.
    fn overlays(&self) -> Vec<Overlay> {
        Vec::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlayKind {
    Brick,
    Box,
    Shelf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub kind: OverlayKind,
    pub label: String,
    /// `[x_min, y_min, x_max, y_max]`
    pub rect: [f64; 4],
}

/// Cost measured on the final bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Perimeter,
    Area,
    SquareArea,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Perimeter => "perimeter",
            Objective::Area => "area",
            Objective::SquareArea => "square",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = PackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perimeter" => Ok(Objective::Perimeter),
            "area" => Ok(Objective::Area),
            "square" | "square_area" | "square-area" => Ok(Objective::SquareArea),
            other => Err(PackError::Config(format!("unknown objective '{other}'"))),
        }
    }
}

/// Every implemented online algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    BrickTranslation,
    BrickRotation,
    BrickModified,
    DynBoxTrans,
    DynBoxRot,
    DynBoxRotOpt4,
    DynBoxRotCombined,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::BrickTranslation,
        Algorithm::BrickRotation,
        Algorithm::BrickModified,
        Algorithm::DynBoxTrans,
        Algorithm::DynBoxRot,
        Algorithm::DynBoxRotOpt4,
        Algorithm::DynBoxRotCombined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::BrickTranslation => "brick-translation",
            Algorithm::BrickRotation => "brick-rotation",
            Algorithm::BrickModified => "brick-modified",
            Algorithm::DynBoxTrans => "dynbox-trans",
            Algorithm::DynBoxRot => "dynbox-rot",
            Algorithm::DynBoxRotOpt4 => "dynbox-rot-opt4",
            Algorithm::DynBoxRotCombined => "dynbox-rot-combined",
        }
    }

    pub fn rotations(self) -> bool {
        matches!(
            self,
            Algorithm::BrickRotation
                | Algorithm::DynBoxRot
                | Algorithm::DynBoxRotOpt4
                | Algorithm::DynBoxRotCombined
        )
    }

    pub fn is_brick(self) -> bool {
        matches!(
            self,
            Algorithm::BrickTranslation | Algorithm::BrickRotation | Algorithm::BrickModified
        )
    }

    /// Brick packers target perimeter and square area, dynamic boxes target area.
    pub fn supports(self, objective: Objective) -> bool {
        match objective {
            Objective::Area => !self.is_brick(),
            Objective::Perimeter | Objective::SquareArea => self.is_brick(),
        }
    }

    pub fn build(self) -> Box<dyn OnlinePacker + Send> {
        match self {
            Algorithm::BrickTranslation => Box::new(BrickPacker::new(BrickVariant::Translation)),
            Algorithm::BrickRotation => Box::new(BrickPacker::new(BrickVariant::Rotation)),
            Algorithm::BrickModified => Box::new(BrickPacker::new(BrickVariant::Modified)),
            Algorithm::DynBoxTrans => Box::new(DynBox::new(DynBoxVariant::Trans)),
            Algorithm::DynBoxRot => Box::new(DynBox::new(DynBoxVariant::Rot)),
            Algorithm::DynBoxRotOpt4 => Box::new(DynBox::new(DynBoxVariant::RotOpt4)),
            Algorithm::DynBoxRotCombined => Box::new(DynBox::new(DynBoxVariant::RotCombined)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = PackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| PackError::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Feeds a whole stream through a packer.
pub fn pack_all(packer: &mut dyn OnlinePacker, pieces: &[Piece]) -> Vec<Placement> {
    pieces.iter().map(|p| packer.place(p)).collect()
}
