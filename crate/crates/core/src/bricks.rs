//! The brick hierarchy.
//!
//! A `k`-brick has size `sqrt2^-k x sqrt2^-(k+1)` for even `k` and the transpose
//! for odd `k`, so its aspect ratio is always `sqrt2`. One fundamental brick
//! `B_k` per integer `k` tiles the open positive quadrant; every derived brick is
//! reached from a root by a path of halvings (`1` = left/lower half, `2` =
//! right/upper half). The union of all fundamental bricks with index `> k` is
//! itself a `k`-brick sitting at the origin; it is available as a [`Root::Tail`]
//! for the modified packer.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::PackError;
use crate::geometry::{BoundingBox, Length, Piece, Placement};

/// The brick a derived brick descends from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Root {
    /// The fundamental brick `B_k`.
    Fundamental(i32),
    /// `B_{>k}`: the `k`-brick below (even `k`) or left of (odd `k`) `B_k`.
    Tail(i32),
}

impl Root {
    pub fn level(self) -> i32 {
        match self {
            Root::Fundamental(k) | Root::Tail(k) => k,
        }
    }

    /// Position in the `≺` order among roots: the tail first, then larger indices first.
    fn rank(self) -> (u8, i32) {
        match self {
            Root::Tail(_) => (0, 0),
            Root::Fundamental(k) => (1, -k),
        }
    }

    pub fn rect(self) -> BoundingBox {
        match self {
            Root::Fundamental(k) => fundamental_rect(k),
            Root::Tail(k) => {
                let (w, h) = brick_size(k);
                BoundingBox::from_origin(Length::zero(), Length::zero(), &w, &h)
            }
        }
    }
}

/// Width and height of a `level`-brick.
pub fn brick_size(level: i32) -> (Length, Length) {
    let long = Length::sqrt2_pow(-level);
    let short = Length::sqrt2_pow(-level - 1);
    if level.rem_euclid(2) == 0 {
        (long, short)
    } else {
        (short, long)
    }
}

/// The fundamental brick `B_k` of the quadrant tiling.
pub fn fundamental_rect(k: i32) -> BoundingBox {
    let (w, h) = brick_size(k);
    let offset = Length::sqrt2_pow(-k - 1);
    if k.rem_euclid(2) == 0 {
        BoundingBox::from_origin(Length::zero(), offset, &w, &h)
    } else {
        BoundingBox::from_origin(offset, Length::zero(), &w, &h)
    }
}

/// Splits a `level`-brick rectangle into its `†1` and `†2` halves.
pub fn split_rect(rect: &BoundingBox, level: i32) -> (BoundingBox, BoundingBox) {
    if level.rem_euclid(2) == 0 {
        let mid = (&rect.x_min + &rect.x_max).half();
        (
            BoundingBox::new(rect.x_min.clone(), rect.y_min.clone(), mid.clone(), rect.y_max.clone()),
            BoundingBox::new(mid, rect.y_min.clone(), rect.x_max.clone(), rect.y_max.clone()),
        )
    } else {
        let mid = (&rect.y_min + &rect.y_max).half();
        (
            BoundingBox::new(rect.x_min.clone(), rect.y_min.clone(), rect.x_max.clone(), mid.clone()),
            BoundingBox::new(rect.x_min.clone(), mid, rect.x_max.clone(), rect.y_max.clone()),
        )
    }
}

/// A derived brick: a root plus a path of halvings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Brick {
    root: Root,
    path: Vec<u8>,
}

impl Brick {
    pub fn fundamental(k: i32) -> Self {
        Self {
            root: Root::Fundamental(k),
            path: Vec::new(),
        }
    }

    pub fn tail(k: i32) -> Self {
        Self {
            root: Root::Tail(k),
            path: Vec::new(),
        }
    }

    pub fn from_path(root: Root, path: Vec<u8>) -> Self {
        assert!(path.iter().all(|&d| d == 1 || d == 2), "dagger path uses 1 and 2 only");
        Self { root, path }
    }

    pub fn root(&self) -> Root {
        self.root
    }

    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn level(&self) -> i32 {
        self.root.level() + self.path.len() as i32
    }

    pub fn child(&self, which: u8) -> Brick {
        let mut path = self.path.clone();
        path.push(which);
        Brick::from_path(self.root, path)
    }

    pub fn split(&self) -> (Brick, Brick) {
        (self.child(1), self.child(2))
    }

    pub fn parent(&self) -> Option<Brick> {
        if self.path.is_empty() {
            return None;
        }
        let mut path = self.path.clone();
        path.pop();
        Some(Brick::from_path(self.root, path))
    }

    pub fn rect(&self) -> BoundingBox {
        let mut rect = self.root.rect();
        let mut level = self.root.level();
        for &d in &self.path {
            let (a, b) = split_rect(&rect, level);
            rect = if d == 1 { a } else { b };
            level += 1;
        }
        rect
    }

    /// Whether `self` is `other` or one of its descendants.
    pub fn is_within(&self, other: &Brick) -> bool {
        self.root == other.root && self.path.starts_with(&other.path)
    }

    /// The same brick with every fundamental index lowered by `shift`.
    ///
    /// The tiling is self-similar under this relabelling (scale by `sqrt2^shift`,
    /// transposing when `shift` is odd), so the shifted brick set is an
    /// equivalent configuration.
    pub fn shifted(&self, shift: i32) -> Brick {
        let root = match self.root {
            Root::Fundamental(k) => Root::Fundamental(k - shift),
            Root::Tail(k) => Root::Tail(k - shift),
        };
        Brick::from_path(root, self.path.clone())
    }

    /// Extent along which pieces are stacked: height for even levels, width for odd.
    pub fn stacking_extent(&self) -> Length {
        let (w, h) = brick_size(self.level());
        if self.level().rem_euclid(2) == 0 {
            h
        } else {
            w
        }
    }
}

impl fmt::Display for Brick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            Root::Fundamental(k) => write!(f, "B_{k}")?,
            Root::Tail(k) => write!(f, "B_>{k}")?,
        }
        for d in &self.path {
            write!(f, "†{d}")?;
        }
        Ok(())
    }
}

/// Total order: level first, then `≺` within a level.
impl Ord for Brick {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level()
            .cmp(&other.level())
            .then_with(|| self.root.rank().cmp(&other.root.rank()))
            .then_with(|| self.path.cmp(&other.path))
    }
}

impl PartialOrd for Brick {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `d1 ≺ d2` for two bricks of the same level.
pub fn precedes(d1: &Brick, d2: &Brick) -> Result<bool, PackError> {
    if d1.level() != d2.level() {
        return Err(PackError::LevelMismatch(d1.level(), d2.level()));
    }
    Ok(d1 < d2)
}

fn fits(piece: &Piece, level: i32) -> bool {
    let (w, h) = brick_size(level);
    piece.width() <= &w && piece.height() <= &h
}

/// Largest `k` such that a `k`-brick is at least as wide and as tall as the piece.
pub fn suitable_level(piece: &Piece) -> i32 {
    // Start from a float guess and settle it exactly; brick sides shrink
    // monotonically with the level, so the answer is unique.
    let long = piece.width().to_f64().max(piece.height().to_f64());
    let mut k = (-2.0 * long.log2()).floor() as i32 - 2;
    while !fits(piece, k) {
        k -= 1;
    }
    while fits(piece, k + 1) {
        k += 1;
    }
    k
}

/// Pieces stacked in one brick, flush against its left (even level) or bottom (odd level) edge.
#[derive(Clone, Debug, Serialize)]
pub struct BrickStack {
    brick: Brick,
    #[serde(skip)]
    rect: BoundingBox,
    pieces: Vec<(Piece, Placement)>,
    fill: Length,
    #[serde(skip)]
    capacity: Length,
    #[serde(skip)]
    fill_f64: f64,
    #[serde(skip)]
    capacity_f64: f64,
}

impl BrickStack {
    pub fn new(brick: Brick) -> Self {
        let rect = brick.rect();
        let capacity = brick.stacking_extent();
        Self {
            brick,
            rect,
            pieces: Vec::new(),
            fill: Length::zero(),
            capacity_f64: capacity.to_f64(),
            capacity,
            fill_f64: 0.0,
        }
    }

    pub fn brick(&self) -> &Brick {
        &self.brick
    }

    pub fn rect(&self) -> &BoundingBox {
        &self.rect
    }

    pub fn pieces(&self) -> &[(Piece, Placement)] {
        &self.pieces
    }

    pub fn fill(&self) -> &Length {
        &self.fill
    }

    pub fn capacity(&self) -> &Length {
        &self.capacity
    }

    pub(crate) fn extent<'a>(&self, piece: &'a Piece) -> &'a Length {
        if self.brick.level().rem_euclid(2) == 0 {
            piece.height()
        } else {
            piece.width()
        }
    }

    /// `piece` is given in the orientation it will be placed in.
    pub fn has_room(&self, piece: &Piece) -> bool {
        let extent = self.extent(piece);
        self.room_for(extent, extent.to_f64())
    }

    /// Room test with a float pre-check; only near-ties are decided exactly.
    pub(crate) fn room_for(&self, extent: &Length, extent_f64: f64) -> bool {
        let slack = self.capacity_f64 - self.fill_f64 - extent_f64;
        let tol = 1e-9 * self.capacity_f64;
        if slack > tol {
            true
        } else if slack < -tol {
            false
        } else {
            &self.fill + extent <= self.capacity
        }
    }

    pub fn stack_place(
        &mut self,
        piece: &Piece,
        piece_index: usize,
        rotated: bool,
    ) -> Result<Placement, PackError> {
        if !self.has_room(piece) {
            return Err(PackError::NoRoom);
        }
        debug_assert_eq!(suitable_level(piece), self.brick.level());
        let (x, y) = if self.brick.level().rem_euclid(2) == 0 {
            (self.rect.x_min.clone(), &self.rect.y_min + &self.fill)
        } else {
            (&self.rect.x_min + &self.fill, self.rect.y_min.clone())
        };
        self.fill += self.extent(piece);
        self.fill_f64 = self.fill.to_f64();
        let placement = Placement::new(piece_index, x, y, rotated);
        let original = if rotated { piece.rotated() } else { piece.clone() };
        self.pieces.push((original, placement.clone()));
        Ok(placement)
    }

    pub(crate) fn set_fill(&mut self, fill: Length) {
        self.fill_f64 = fill.to_f64();
        self.fill = fill;
    }

    /// Less than half of the stacking extent is filled.
    pub fn is_sparse(&self) -> bool {
        self.fill.scale(2) < self.capacity
    }
}

#[derive(Clone, Debug, Default)]
struct Node {
    occupied: bool,
    occupied_below: bool,
    children: Option<Box<[Node; 2]>>,
}

/// Occupancy of derived bricks, answering "is this brick free" and
/// "which is the `≺`-minimum free brick of a level".
#[derive(Clone, Debug, Default)]
pub struct BrickTree {
    roots: BTreeMap<(u8, i32), (Root, Node)>,
}

impl BrickTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Marks `brick` as occupied. It must be free.
    pub fn occupy(&mut self, brick: &Brick) {
        let mut node = &mut self
            .roots
            .entry(brick.root.rank())
            .or_insert_with(|| (brick.root, Node::default()))
            .1;
        for &d in &brick.path {
            debug_assert!(!node.occupied);
            node.occupied_below = true;
            let children = node.children.get_or_insert_with(Default::default);
            node = &mut children[(d - 1) as usize];
        }
        debug_assert!(!node.occupied && !node.occupied_below);
        node.occupied = true;
    }

    /// Interior-disjoint from every occupied brick.
    pub fn is_free(&self, brick: &Brick) -> bool {
        let Some(mut node) = self.roots.get(&brick.root.rank()).map(|(_, n)| n) else {
            return true;
        };
        for &d in &brick.path {
            if node.occupied {
                return false;
            }
            match &node.children {
                Some(children) => node = &children[(d - 1) as usize],
                None => return true,
            }
        }
        !node.occupied && !node.occupied_below
    }

    /// The `≺`-minimum free brick of `level` below `root`, if any.
    pub fn min_free_in(&self, root: Root, level: i32) -> Option<Brick> {
        let depth = level - root.level();
        if depth < 0 {
            return None;
        }
        let mut path = Vec::with_capacity(depth as usize);
        let node = self.roots.get(&root.rank()).map(|(_, n)| n);
        if search_free(node, depth as usize, &mut path) {
            Some(Brick::from_path(root, path))
        } else {
            None
        }
    }

    /// Maximal free bricks below `root` with level at most `max_level`.
    pub fn maximal_free_in(&self, root: Root, max_level: i32) -> Vec<Brick> {
        let mut out = Vec::new();
        let node = self.roots.get(&root.rank()).map(|(_, n)| n);
        collect_maximal_free(node, Brick::from_path(root, Vec::new()), max_level, &mut out);
        out
    }
}

fn search_free(node: Option<&Node>, depth: usize, path: &mut Vec<u8>) -> bool {
    let node = match node {
        None => {
            path.extend(std::iter::repeat(1).take(depth));
            return true;
        }
        Some(n) => n,
    };
    if node.occupied {
        return false;
    }
    if !node.occupied_below {
        path.extend(std::iter::repeat(1).take(depth));
        return true;
    }
    if depth == 0 {
        return false;
    }
    let children = node.children.as_ref().expect("occupied_below implies children");
    for (i, child) in children.iter().enumerate() {
        path.push(i as u8 + 1);
        if search_free(Some(child), depth - 1, path) {
            return true;
        }
        path.pop();
    }
    false
}

fn collect_maximal_free(node: Option<&Node>, brick: Brick, max_level: i32, out: &mut Vec<Brick>) {
    if brick.level() > max_level {
        return;
    }
    match node {
        None => out.push(brick),
        Some(n) if n.occupied => {}
        Some(n) if !n.occupied_below => out.push(brick),
        Some(n) => {
            let children = n.children.as_ref().expect("occupied_below implies children");
            collect_maximal_free(Some(&children[0]), brick.child(1), max_level, out);
            collect_maximal_free(Some(&children[1]), brick.child(2), max_level, out);
        }
    }
}

/// Label of a brick in a terminated, normalized configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BrickClass {
    Sparse,
    Dense,
    Free,
    Empty,
}

/// Occupied bricks labelled sparse/dense, plus every empty (maximal free)
/// brick inside `B_{>=0}` up to `max_level`.
#[derive(Clone, Debug, Default)]
pub struct Classification {
    pub labels: BTreeMap<Brick, BrickClass>,
    pub empty: Vec<Brick>,
    tree: BrickTree,
}

impl Classification {
    pub fn class_of(&self, brick: &Brick) -> Option<BrickClass> {
        if let Some(c) = self.labels.get(brick) {
            return Some(*c);
        }
        if self.empty.contains(brick) {
            return Some(BrickClass::Empty);
        }
        self.tree.is_free(brick).then_some(BrickClass::Free)
    }

    pub fn is_free(&self, brick: &Brick) -> bool {
        self.tree.is_free(brick)
    }

    pub fn tree(&self) -> &BrickTree {
        &self.tree
    }
}

/// Labels a configuration whose bricks all descend from fundamental bricks of
/// non-negative index (the normalized form `∪D ⊆ B_{>=0}`).
pub fn classify(stacks: &[BrickStack], max_level: i32) -> Classification {
    let mut out = Classification::default();
    for s in stacks {
        out.tree.occupy(&s.brick);
        let class = if s.is_sparse() {
            BrickClass::Sparse
        } else {
            BrickClass::Dense
        };
        out.labels.insert(s.brick.clone(), class);
    }
    for k in 0..=max_level {
        out.empty
            .extend(out.tree.maximal_free_in(Root::Fundamental(k), max_level));
    }
    out
}

/// Relabels every stack so the largest occupied fundamental brick is `B_0`.
pub fn normalize(stacks: &[BrickStack]) -> Vec<BrickStack> {
    let Some(min_root) = stacks.iter().map(|s| s.brick.root.level()).min() else {
        return Vec::new();
    };
    stacks
        .iter()
        .map(|s| {
            let mut t = BrickStack::new(s.brick.shifted(min_root));
            // Only the relative fill matters for labels; keep the stacked pieces
            // in their original coordinates.
            t.set_fill(&s.fill * &Length::sqrt2_pow(min_root));
            t.pieces = s.pieces.clone();
            t
        })
        .collect()
}
