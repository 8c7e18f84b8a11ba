//! Online rectangle packing into a small bounding box.
//!
//! Pieces arrive one at a time and must be placed immediately. The brick
//! packers minimize the perimeter (or the enclosing square) of the bounding
//! box; the dynamic-box packers minimize its area. Lengths are exact elements
//! of `Q(sqrt2)`, so every geometric decision is made without rounding.

pub mod adversaries;
pub mod brick_packers;
pub mod bricks;
pub mod dynbox;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod length;
pub mod oracles;
pub mod packer;
pub mod shelves;
pub mod svg;

pub use brick_packers::{BrickPacker, BrickVariant};
pub use bricks::{Brick, BrickStack, Root};
pub use dynbox::{DynBox, DynBoxVariant};
pub use error::PackError;
pub use geometry::{BoundingBox, Piece, PlacedPiece, Placement};
pub use harness::{parse_stream, run, Generator, RunOptions, RunReport};
pub use length::Length;
pub use oracles::{exact_opt, OptKind};
pub use packer::{Algorithm, Objective, OnlinePacker};
pub use svg::{render_svg, SvgOptions};
