//! Adaptive adversaries and fixed worst-case streams.
//!
//! Adversaries only look at the placements a packer returns. Each outcome
//! carries an explicit offline packing (the witness) whose cost bounds the
//! optimum from above.

use serde::Serialize;

use crate::error::PackError;
use crate::geometry::{
    area_cost, bounding_box, interiors_disjoint, perimeter_cost, square_area_cost, BoundingBox,
    Length, Piece, PlacedPiece, Placement,
};
use crate::packer::{Objective, OnlinePacker};

#[derive(Clone, Debug, Serialize)]
pub struct AdversaryOutcome {
    pub adversary: String,
    pub algorithm: String,
    pub objective: Objective,
    pub branch: String,
    pub stream: Vec<Piece>,
    pub placements: Vec<Placement>,
    pub witness: Vec<Placement>,
    pub alg_cost: Length,
    pub opt_upper: Length,
    pub ratio: f64,
}

impl AdversaryOutcome {
    /// `alg_cost / opt_upper >= bound`, decided exactly.
    pub fn ratio_at_least(&self, bound: &Length) -> bool {
        self.alg_cost >= &self.opt_upper * bound
    }
}

pub fn cost_of(objective: Objective, b: &BoundingBox) -> Length {
    match objective {
        Objective::Perimeter => perimeter_cost(b),
        Objective::Area => area_cost(b),
        Objective::SquareArea => square_area_cost(b),
    }
}

fn zip(stream: &[Piece], placements: &[Placement]) -> Vec<PlacedPiece> {
    placements
        .iter()
        .map(|pl| (stream[pl.piece_index].clone(), pl.clone()))
        .collect()
}

/// Checks that `witness` places every piece exactly once without overlap and returns its cost.
pub fn verify_witness(
    stream: &[Piece],
    witness: &[Placement],
    objective: Objective,
) -> Result<Length, PackError> {
    let mut seen = vec![false; stream.len()];
    for pl in witness {
        match seen.get_mut(pl.piece_index) {
            Some(s) if !*s => *s = true,
            _ => return Err(PackError::Invariant(format!("witness index {} invalid", pl.piece_index))),
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(PackError::Invariant("witness misses a piece".into()));
    }
    let placed = zip(stream, witness);
    if !interiors_disjoint(&placed) {
        return Err(PackError::Invariant("witness pieces overlap".into()));
    }
    Ok(cost_of(objective, &bounding_box(&placed)?))
}

/// A live session against one packer.
struct Session<'a> {
    packer: &'a mut dyn OnlinePacker,
    stream: Vec<Piece>,
    placements: Vec<Placement>,
}

impl<'a> Session<'a> {
    fn new(packer: &'a mut dyn OnlinePacker) -> Self {
        Self {
            packer,
            stream: Vec::new(),
            placements: Vec::new(),
        }
    }

    fn feed(&mut self, piece: Piece) {
        let mut pl = self.packer.place(&piece);
        pl.piece_index = self.stream.len();
        self.stream.push(piece);
        self.placements.push(pl);
    }

    fn feed_many(&mut self, piece: &Piece, count: usize) {
        for _ in 0..count {
            self.feed(piece.clone());
        }
    }

    fn bbox(&self) -> BoundingBox {
        bounding_box(&zip(&self.stream, &self.placements)).expect("session has pieces")
    }

    fn finish(
        self,
        adversary: &str,
        objective: Objective,
        branch: String,
        witness: Vec<Placement>,
        claimed: Length,
    ) -> Result<AdversaryOutcome, PackError> {
        let opt_upper = verify_witness(&self.stream, &witness, objective)?;
        if opt_upper != claimed {
            return Err(PackError::Invariant(format!(
                "{adversary}: witness costs {opt_upper}, expected {claimed}"
            )));
        }
        let alg_cost = cost_of(objective, &self.bbox());
        Ok(AdversaryOutcome {
            adversary: adversary.to_string(),
            algorithm: self.packer.name().to_string(),
            objective,
            branch,
            ratio: alg_cost.to_f64() / opt_upper.to_f64(),
            stream: self.stream,
            placements: self.placements,
            witness,
            alg_cost,
            opt_upper,
        })
    }
}

fn at(i: usize, x: Length, y: Length) -> Placement {
    Placement::new(i, x, y, false)
}

fn int(v: i64) -> Length {
    Length::from_int(v)
}

fn piece(w: Length, h: Length) -> Piece {
    Piece::new(w, h).expect("adversary pieces have positive sides")
}

fn unit() -> Piece {
    piece(Length::one(), Length::one())
}

/// Two unit squares, then a `2 x eps` bar. Any translation-only packer loses 4/3.
pub fn adv_perimeter_translation(
    packer: &mut dyn OnlinePacker,
    eps: &Length,
) -> Result<AdversaryOutcome, PackError> {
    let mut s = Session::new(packer);
    s.feed_many(&unit(), 2);
    let seen = s.bbox();
    // The bar runs across the short side of the box the squares already span.
    let wide = seen.width() >= seen.height();
    let witness = if wide {
        s.feed(piece(eps.clone(), int(2)));
        vec![at(0, int(0), int(0)), at(1, int(0), int(1)), at(2, int(1), int(0))]
    } else {
        s.feed(piece(int(2), eps.clone()));
        vec![at(0, int(0), int(0)), at(1, int(1), int(0)), at(2, int(0), int(1))]
    };
    let claimed = int(6) + eps.scale(2);
    let branch = format!(
        "squares boxed in {} x {}: {} bar",
        seen.width(),
        seen.height(),
        if wide { "upright" } else { "flat" }
    );
    s.finish("peri-trans", Objective::Perimeter, branch, witness, claimed)
}

/// Three unit squares, then either an `eps x 3` bar or a fourth square. Loses 5/4.
pub fn adv_perimeter_rotation(
    packer: &mut dyn OnlinePacker,
    eps: &Length,
) -> Result<AdversaryOutcome, PackError> {
    let mut s = Session::new(packer);
    s.feed_many(&unit(), 3);
    let seen = s.bbox();
    let b = seen.width().max_of(seen.height());
    let column = (0..3).map(|i| at(i, int(0), int(i as i64)));
    if b < int(3) {
        s.feed(piece(eps.clone(), int(3)));
        let mut witness: Vec<Placement> = column.collect();
        witness.push(at(3, int(1), int(0)));
        let claimed = int(8) + eps.scale(2);
        s.finish("peri-rot", Objective::Perimeter, "b<3: thin bar".into(), witness, claimed)
    } else {
        s.feed(unit());
        let witness = vec![
            at(0, int(0), int(0)),
            at(1, int(1), int(0)),
            at(2, int(0), int(1)),
            at(3, int(1), int(1)),
        ];
        s.finish("peri-rot", Objective::Perimeter, "b>=3: fourth square".into(), witness, int(8))
    }
}

/// `m^2` flat rectangles `p x p/m^2`, then a very long bar or a `p x p` square.
pub fn adv_area_general(
    packer: &mut dyn OnlinePacker,
    m: i64,
    p: &Length,
) -> Result<AdversaryOutcome, PackError> {
    if m < 2 || !p.is_positive() {
        return Err(PackError::Config("area-general needs m >= 2 and p > 0".into()));
    }
    let m2 = m * m;
    let thin_h = p / &int(m2);
    let thin = piece(p.clone(), thin_h.clone());
    let mut s = Session::new(packer);
    s.feed_many(&thin, m2 as usize);
    let seen = s.bbox();
    let side = p / &int(m);
    let n = m2 as usize;
    if seen.width() >= side && seen.height() >= side {
        s.feed(piece(p.scale(m2), thin_h.clone()));
        // thin pieces in one row along the bar
        let mut witness: Vec<Placement> = (0..n)
            .map(|i| at(i, p.scale(i as i64), Length::zero()))
            .collect();
        witness.push(at(n, Length::zero(), thin_h.clone()));
        let claimed = (p * p).scale(2);
        s.finish("area-general", Objective::Area, "both sides >= p/m: long bar".into(), witness, claimed)
    } else {
        s.feed(piece(p.clone(), p.clone()));
        // thin pieces stacked on top of the square
        let mut witness: Vec<Placement> = (0..n)
            .map(|i| at(i, Length::zero(), p + &thin_h.scale(i as i64)))
            .collect();
        witness.push(at(n, Length::zero(), Length::zero()));
        let claimed = (p * p).scale(2);
        s.finish("area-general", Objective::Area, "narrow box: square".into(), witness, claimed)
    }
}

/// `n^2` unit squares, then an `n^2 x 1` bar laid across the longer side of their box.
pub fn adv_area_longedge_translation(
    packer: &mut dyn OnlinePacker,
    n: i64,
) -> Result<AdversaryOutcome, PackError> {
    if n < 2 {
        return Err(PackError::Config("longedge-trans needs n >= 2".into()));
    }
    let n2 = n * n;
    let mut s = Session::new(packer);
    s.feed_many(&unit(), n2 as usize);
    let seen = s.bbox();
    let idx = n2 as usize;
    let row = |horizontal: bool| -> Vec<Placement> {
        (0..idx)
            .map(|i| {
                if horizontal {
                    at(i, int(i as i64), int(0))
                } else {
                    at(i, int(0), int(i as i64))
                }
            })
            .collect()
    };
    let claimed = int(2 * n2);
    if seen.height() >= seen.width() {
        s.feed(piece(int(n2), int(1)));
        let mut witness = row(true);
        witness.push(at(idx, int(0), int(1)));
        s.finish("longedge-trans", Objective::Area, "tall box: horizontal bar".into(), witness, claimed)
    } else {
        s.feed(piece(int(1), int(n2)));
        let mut witness = row(false);
        witness.push(at(idx, int(1), int(0)));
        s.finish("longedge-trans", Objective::Area, "wide box: vertical bar".into(), witness, claimed)
    }
}

/// `n^2` unit squares, then a `1 x n^2` bar if their box is fat, else an `n x n` square.
pub fn adv_area_longedge_rotation(
    packer: &mut dyn OnlinePacker,
    n: i64,
) -> Result<AdversaryOutcome, PackError> {
    if n < 2 {
        return Err(PackError::Config("longedge-rot needs n >= 2".into()));
    }
    let n2 = n * n;
    let mut s = Session::new(packer);
    s.feed_many(&unit(), n2 as usize);
    let seen = s.bbox();
    let a = seen.width().min_of(seen.height());
    let idx = n2 as usize;
    let claimed = int(2 * n2);
    // a >= sqrt(n), compared exactly
    if &a * &a >= int(n) {
        s.feed(piece(int(1), int(n2)));
        let mut witness: Vec<Placement> =
            (0..idx).map(|i| at(i, int(0), int(i as i64))).collect();
        witness.push(at(idx, int(1), int(0)));
        s.finish("longedge-rot", Objective::Area, "a >= sqrt n: bar".into(), witness, claimed)
    } else {
        s.feed(piece(int(n), int(n)));
        let mut witness: Vec<Placement> = (0..idx)
            .map(|i| at(i, int(n + (i as i64) % n), int((i as i64) / n)))
            .collect();
        witness.push(at(idx, int(0), int(0)));
        s.finish("longedge-rot", Objective::Area, "a < sqrt n: square".into(), witness, claimed)
    }
}

/// Four unit squares, then a `2 x 2` square unless the first four are already spread out.
pub fn adv_square_16_9(packer: &mut dyn OnlinePacker) -> Result<AdversaryOutcome, PackError> {
    let mut s = Session::new(packer);
    s.feed_many(&unit(), 4);
    let seen = s.bbox();
    let side = seen.width().max_of(seen.height());
    let quad = |dx: i64| -> Vec<Placement> {
        (0..4)
            .map(|i| at(i, int(dx + (i as i64) % 2), int((i as i64) / 2)))
            .collect()
    };
    if side >= int(3) {
        s.finish("square169", Objective::SquareArea, "l>=3: stop".into(), quad(0), int(4))
    } else {
        s.feed(piece(int(2), int(2)));
        let mut witness = quad(0);
        witness[2] = at(2, int(2), int(0));
        witness[3] = at(3, int(2), int(1));
        witness[1] = at(1, int(0), int(2));
        witness[0] = at(0, int(1), int(2));
        witness.push(at(4, int(0), int(0)));
        s.finish("square169", Objective::SquareArea, "l<3: big square".into(), witness, int(9))
    }
}

/// Runs a fixed stream through a packer and scores it against a witness.
pub fn score_stream(
    packer: &mut dyn OnlinePacker,
    name: &str,
    objective: Objective,
    stream: &[Piece],
    witness: Vec<Placement>,
) -> Result<AdversaryOutcome, PackError> {
    let mut s = Session::new(packer);
    for p in stream {
        s.feed(p.clone());
    }
    let claimed = verify_witness(stream, &witness, objective)?;
    s.finish(name, objective, "fixed stream".into(), witness, claimed)
}

/// Number of `ℓ_k` squares that drives the brick packer into its worst
/// configuration: every `k`-brick of `B_{>=1}` holds one square, and below
/// `B_0` the left halves keep splitting while the right halves stay empty.
pub fn fekete_count(k: u32) -> usize {
    assert!(k % 2 == 0, "the square only reaches level k for even k");
    let above = (1usize << k) - 1;
    let chain: usize = (1..=k / 2).map(|i| 1usize << (k - 2 * i)).sum();
    above + chain + 1
}

/// Side of the square used by the tightness stream.
pub fn fekete_side(k: u32, eps: &Length) -> Length {
    let scale = Length::sqrt2_pow(-(k as i32));
    scale.half() + eps * &scale
}

/// `n_k` copies of the square of side `sqrt2^-k / 2 + eps sqrt2^-k`.
pub fn stream_fekete_tightness(k: u32, eps: &Length) -> Vec<Piece> {
    let side = fekete_side(k, eps);
    vec![piece(side.clone(), side); fekete_count(k)]
}

/// The squares in a near-square grid of `ceil(sqrt n)` columns.
pub fn fekete_witness(k: u32, eps: &Length) -> Vec<Placement> {
    let n = fekete_count(k);
    let cols = (n as f64).sqrt().ceil() as usize;
    let side = fekete_side(k, eps);
    (0..n)
        .map(|i| at(i, side.scale((i % cols) as i64), side.scale((i / cols) as i64)))
        .collect()
}

/// The worst-case stream for the modified packer and the role of each piece.
#[derive(Clone, Debug)]
pub struct Ratio4Plan {
    pub stream: Vec<Piece>,
    pub filler: Piece,
    pub opener: usize,
    pub tall_special: usize,
    pub flat_special: usize,
    pub fillers: Vec<usize>,
}

fn ratio4_pieces(k: i32, eps: &Length) -> (Piece, Piece, Piece, Piece) {
    let filler = piece(
        Length::sqrt2_pow(-k - 1) + eps,
        Length::sqrt2_pow(-k) + eps,
    );
    // The three thin pieces stand upright or lie flat so that they land in
    // B_{>1}, B_1†2 and B_0†1†1†2 as the construction requires.
    let opener = piece(eps.clone(), Length::sqrt2_pow(-3) + eps);
    let flat = piece(Length::from_ratio(1, 4) + eps, eps.clone());
    let tall = piece(eps.clone(), Length::sqrt2_pow(-5) + eps);
    (filler, opener, flat, tall)
}

/// Number of `level`-bricks inside one brick of level `outer`.
fn bricks_below(outer: i32, level: i32) -> usize {
    1usize << (level - outer)
}

/// The fixed stream showing that the modified packer is at least 4-competitive.
///
/// `k` must be odd; fillers have suitable level `k - 2` and fill `B_1†1`,
/// `B_0†1†1†1` and `B_0†1†2†1` one per brick.
pub fn stream_modified_ratio4(k: i32, eps: &Length) -> Result<Ratio4Plan, PackError> {
    if k < 5 || k % 2 == 0 {
        return Err(PackError::Config("modified ratio-4 stream needs an odd k >= 5".into()));
    }
    let (filler, opener, flat, tall) = ratio4_pieces(k, eps);
    let level = k - 2;
    let mut stream = vec![opener];
    let mut fillers = Vec::new();
    let mut add_fillers = |stream: &mut Vec<Piece>, count: usize| {
        for _ in 0..count {
            fillers.push(stream.len());
            stream.push(filler.clone());
        }
    };
    add_fillers(&mut stream, bricks_below(2, level));
    let flat_special = stream.len();
    stream.push(flat);
    add_fillers(&mut stream, bricks_below(3, level));
    let tall_special = stream.len();
    stream.push(tall);
    add_fillers(&mut stream, bricks_below(3, level));
    Ok(Ratio4Plan {
        stream,
        filler,
        opener: 0,
        tall_special,
        flat_special,
        fillers,
    })
}

/// All pieces of the ratio-4 stream packed into a box about the size of `B_3`:
/// fillers in a square grid, the two upright pieces to its right and the flat
/// piece on top.
pub fn modified_ratio4_witness(plan: &Ratio4Plan) -> Vec<Placement> {
    let cols = (plan.fillers.len() as f64).sqrt().ceil() as usize;
    let (fw, fh) = (plan.filler.width().clone(), plan.filler.height().clone());
    let mut witness: Vec<Placement> = plan
        .fillers
        .iter()
        .enumerate()
        .map(|(j, &i)| at(i, fw.scale((j % cols) as i64), fh.scale((j / cols) as i64)))
        .collect();
    let rows = plan.fillers.len().div_ceil(cols);
    let grid_w = fw.scale(cols as i64);
    let grid_h = fh.scale(rows as i64);
    let opener = &plan.stream[plan.opener];
    witness.push(at(plan.opener, grid_w.clone(), Length::zero()));
    witness.push(at(plan.tall_special, &grid_w + opener.width(), Length::zero()));
    witness.push(at(plan.flat_special, Length::zero(), grid_h));
    witness.sort_by_key(|p| p.piece_index);
    witness
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brick_packers::{BrickPacker, BrickVariant};
    use crate::bricks::{suitable_level, Brick, Root};
    use crate::dynbox::{DynBox, DynBoxVariant};

    fn eps() -> Length {
        Length::from_ratio(1, 1000)
    }

    #[test]
    fn perimeter_translation_floor() {
        let mut p = BrickPacker::new(BrickVariant::Translation);
        let out = adv_perimeter_translation(&mut p, &Length::from_ratio(1, 100)).unwrap();
        assert_eq!(out.opt_upper, Length::from_ratio(602, 100));
        assert!(out.ratio >= 8.0 / 6.02 - 1e-12);
        // side-by-side squares get an upright bar
        let mut m = BrickPacker::new(BrickVariant::Modified);
        let out = adv_perimeter_translation(&mut m, &Length::from_ratio(1, 100)).unwrap();
        assert!(out.ratio >= 8.0 / 6.02 - 1e-12, "{}", out.branch);
    }

    #[test]
    fn perimeter_rotation_floor() {
        let mut p = BrickPacker::new(BrickVariant::Rotation);
        let out = adv_perimeter_rotation(&mut p, &eps()).unwrap();
        assert!(out.ratio >= 10.0 / 8.002 - 1e-12, "{}", out.ratio);
    }

    #[test]
    fn rotation_branch_follows_the_box() {
        // A packer that lines everything up on the x-axis forces the b >= 3 branch.
        struct Row(Length, usize);
        impl OnlinePacker for Row {
            fn name(&self) -> &'static str {
                "row"
            }
            fn rotations(&self) -> bool {
                true
            }
            fn place(&mut self, p: &Piece) -> Placement {
                let pl = Placement::new(self.1, self.0.clone(), Length::zero(), false);
                self.0 += p.width();
                self.1 += 1;
                pl
            }
        }
        let out = adv_perimeter_rotation(&mut Row(Length::zero(), 0), &eps()).unwrap();
        assert!(out.branch.starts_with("b>=3"));
        assert_eq!(out.opt_upper, Length::from_int(8));
        assert_eq!(out.alg_cost, Length::from_int(10));
    }

    #[test]
    fn area_general_floor() {
        for variant in [DynBoxVariant::Trans, DynBoxVariant::Rot] {
            let mut p = DynBox::new(variant);
            let out = adv_area_general(&mut p, 3, &Length::one()).unwrap();
            assert!(out.ratio_at_least(&Length::from_ratio(3, 2)), "{}", out.ratio);
        }
    }

    #[test]
    fn longedge_floors() {
        let mut p = DynBox::new(DynBoxVariant::Trans);
        let out = adv_area_longedge_translation(&mut p, 4).unwrap();
        assert!(out.ratio_at_least(&Length::from_int(2)));
        let mut p = DynBox::new(DynBoxVariant::Rot);
        let out = adv_area_longedge_rotation(&mut p, 4).unwrap();
        assert!(out.ratio_at_least(&Length::one()));
    }

    #[test]
    fn square_floor() {
        let mut p = BrickPacker::new(BrickVariant::Translation);
        let out = adv_square_16_9(&mut p).unwrap();
        assert!(out.ratio_at_least(&Length::from_ratio(16, 9)), "{}", out.ratio);
    }

    #[test]
    fn fekete_counts() {
        assert_eq!(fekete_count(2), 3 + 1 + 1);
        assert_eq!(fekete_count(10), 1365);
        let side = fekete_side(10, &eps());
        let p = Piece::new(side.clone(), side).unwrap();
        assert_eq!(suitable_level(&p), 10);
    }

    #[test]
    fn fekete_stream_leaves_right_halves_empty() {
        let k = 6;
        let stream = stream_fekete_tightness(k, &eps());
        let mut packer = BrickPacker::new(BrickVariant::Translation);
        for p in &stream {
            packer.place(p);
        }
        // one square per k-brick
        assert!(packer.stacks().all(|s| s.pieces().len() == 1 && s.brick().level() == k as i32));
        assert_eq!(packer.stacks().count(), stream.len());
        let mut u = Brick::fundamental(0);
        let mut empty = Vec::new();
        for _ in 0..k / 2 {
            let e = u.child(2);
            assert!(packer.stacks().all(|s| !s.brick().is_within(&e)));
            empty.push(e);
            u = u.child(1).child(2);
        }
        assert!(packer.stacks().any(|s| s.brick() == &u));
        // only now does a square enter an empty right half, the deepest one first
        let mut next = packer.clone();
        next.place(&stream[0]);
        let last = next.events().last().unwrap();
        assert!(last.brick.is_within(empty.last().unwrap()));
    }

    #[test]
    fn ratio4_specials_land_where_intended() {
        let k = 7;
        let plan = stream_modified_ratio4(k, &Length::from_ratio(1, 10_000)).unwrap();
        assert_eq!(suitable_level(&plan.stream[plan.opener]), 1);
        assert_eq!(suitable_level(&plan.stream[plan.flat_special]), 2);
        assert_eq!(suitable_level(&plan.stream[plan.tall_special]), 3);
        assert_eq!(suitable_level(&plan.filler), k - 2);

        let mut packer = BrickPacker::new(BrickVariant::Modified);
        for p in &plan.stream {
            packer.place(p);
        }
        let ev = packer.events();
        assert_eq!(ev[plan.opener].brick, Brick::tail(1));
        assert_eq!(ev[plan.flat_special].brick, Brick::from_path(Root::Fundamental(1), vec![2]));
        assert_eq!(
            ev[plan.tall_special].brick,
            Brick::from_path(Root::Fundamental(0), vec![1, 1, 2])
        );
        let regions = [
            Brick::from_path(Root::Fundamental(1), vec![1]),
            Brick::from_path(Root::Fundamental(0), vec![1, 1, 1]),
            Brick::from_path(Root::Fundamental(0), vec![1, 2, 1]),
        ];
        for &i in &plan.fillers {
            assert!(ev[i].opened);
            assert!(regions.iter().any(|r| ev[i].brick.is_within(r)));
        }

        let witness = modified_ratio4_witness(&plan);
        verify_witness(&plan.stream, &witness, Objective::Perimeter).unwrap();
    }
}
