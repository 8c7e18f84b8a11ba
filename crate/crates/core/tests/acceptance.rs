//! End-to-end acceptance checks. Every criterion prints one PASS/FAIL line.

use std::io::Write;

use boxpack::adversaries::{
    adv_area_general, adv_area_longedge_rotation, adv_area_longedge_translation,
    adv_perimeter_rotation, adv_perimeter_translation, adv_square_16_9, fekete_witness,
    modified_ratio4_witness, score_stream, stream_fekete_tightness, stream_modified_ratio4,
    verify_witness,
};
use boxpack::bricks::{classify, normalize, BrickStack};
use boxpack::geometry::{
    area_cost, bounding_box, interiors_disjoint, perimeter_cost, square_area_cost, PlacedPiece,
};
use boxpack::oracles::{
    exact_opt, lower_bound_area, lower_bound_area_exact, lower_bound_perimeter,
    lower_bound_square_area,
};
use boxpack::shelves::{nfs_place, NfsOutcome, ShelfState};
use boxpack::{
    Algorithm, Brick, BrickPacker, BrickVariant, DynBox, DynBoxVariant, Generator, Length,
    Objective, OnlinePacker, Piece, Placement,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    // Bypass the test harness capture so the line is always visible.
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n}: {verdict} {detail}").unwrap();
    out.flush().unwrap();
}

fn pack(alg: Algorithm, stream: &[Piece]) -> Vec<PlacedPiece> {
    let mut packer = alg.build();
    stream
        .iter()
        .map(|p| (p.clone(), packer.place(p)))
        .collect()
}

fn perimeter_of(placed: &[PlacedPiece]) -> f64 {
    perimeter_cost(&bounding_box(placed).unwrap()).to_f64()
}

fn area_of(placed: &[PlacedPiece]) -> f64 {
    area_cost(&bounding_box(placed).unwrap()).to_f64()
}

fn uniform_stream(seed: u64, max_n: usize) -> Vec<Piece> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(1..=max_n);
    Generator::LogUniform { lo: -6.0, hi: 6.0 }.generate(n, seed)
}

#[test]
fn criterion_1_perimeter_below_four() {
    let mut worst = [(0.0f64, 0u64); 2];
    let algs = [Algorithm::BrickTranslation, Algorithm::BrickRotation];
    for seed in 0..500u64 {
        let stream = uniform_stream(seed, 60);
        for (slot, alg) in algs.iter().enumerate() {
            let placed = pack(*alg, &stream);
            let lb = lower_bound_perimeter(&stream, alg.rotations()).unwrap();
            let ratio = perimeter_of(&placed) / lb;
            if ratio > worst[slot].0 {
                worst[slot] = (ratio, seed);
            }
        }
    }
    let pass = worst.iter().all(|w| w.0 < 4.0);
    report(
        1,
        pass,
        &format!(
            "max perimeter/LB over 500 streams: translation {:.4} (seed {}), rotation {:.4} (seed {})",
            worst[0].0, worst[0].1, worst[1].0, worst[1].1
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_modified_variant_reaches_four() {
    let eps = Length::from_ratio(1, 10_000);
    let plan = stream_modified_ratio4(11, &eps).unwrap();
    let witness = modified_ratio4_witness(&plan);

    let mut modified = BrickPacker::new(BrickVariant::Modified);
    let m = score_stream(&mut modified, "ratio4", Objective::Perimeter, &plan.stream, witness.clone())
        .unwrap();
    let mut original = BrickPacker::new(BrickVariant::Translation);
    let o = score_stream(&mut original, "ratio4", Objective::Perimeter, &plan.stream, witness)
        .unwrap();
    let lb = lower_bound_perimeter(&plan.stream, false).unwrap();

    let pass = m.ratio_at_least(&Length::from_ratio(7, 2)) && !o.ratio_at_least(&Length::from_int(4));
    report(
        2,
        pass,
        &format!(
            "n={} modified/witness {:.4} (vs LB {:.4}); translation/witness {:.4} (vs LB {:.4})",
            plan.stream.len(),
            m.ratio,
            m.alg_cost.to_f64() / lb,
            o.ratio,
            o.alg_cost.to_f64() / lb
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_square_tightness() {
    let eps = Length::from_ratio(1, 1000);
    let stream = stream_fekete_tightness(10, &eps);
    let mut packer = BrickPacker::new(BrickVariant::Translation);
    let tight = score_stream(
        &mut packer,
        "fekete",
        Objective::SquareArea,
        &stream,
        fekete_witness(10, &eps),
    )
    .unwrap();
    let tight_ok = tight.ratio >= 5.5;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let stream: Vec<Piece> = (0..n)
            .map(|_| Piece::square(Length::from_ratio(rng.gen_range(1..=16), 4)).unwrap())
            .collect();
        let opt = exact_opt(&stream, Objective::SquareArea, false).unwrap().value;
        for alg in [Algorithm::BrickTranslation, Algorithm::BrickRotation] {
            let placed = pack(alg, &stream);
            let cost = square_area_cost(&bounding_box(&placed).unwrap());
            worst = worst.max(cost.to_f64() / opt.to_f64());
        }
    }
    let random_ok = worst <= 6.0 + 1e-9;
    let pass = tight_ok && random_ok;
    report(
        3,
        pass,
        &format!(
            "tightness stream n={} ratio {:.4}; worst random square ratio vs exact OPT {:.4}",
            stream.len(),
            tight.ratio,
            worst
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_adversary_floors() {
    let eps = Length::from_ratio(1, 1000);
    let mut lines = Vec::new();
    let mut pass = true;
    let mut check = |label: String, ratio: f64, floor: f64| {
        let ok = ratio >= floor;
        pass &= ok;
        lines.push(format!("{label} {ratio:.4}{}", if ok { "" } else { " (below floor)" }));
    };

    let brick = [Algorithm::BrickTranslation, Algorithm::BrickRotation, Algorithm::BrickModified];
    for alg in brick {
        let o = adv_perimeter_translation(alg.build().as_mut(), &eps).unwrap();
        check(format!("peri-trans/{alg}"), o.ratio, 4.0 / 3.0 - 0.01);
        let o = adv_perimeter_rotation(alg.build().as_mut(), &eps).unwrap();
        check(format!("peri-rot/{alg}"), o.ratio, 5.0 / 4.0 - 0.01);
        let o = adv_square_16_9(alg.build().as_mut()).unwrap();
        check(format!("square169/{alg}"), o.ratio, 16.0 / 9.0 - 0.01);
    }
    let area = [
        Algorithm::DynBoxTrans,
        Algorithm::DynBoxRot,
        Algorithm::DynBoxRotOpt4,
        Algorithm::DynBoxRotCombined,
    ];
    for alg in area {
        for p in [1, 36] {
            let o = adv_area_general(alg.build().as_mut(), 6, &Length::from_int(p)).unwrap();
            check(format!("area-general(p={p})/{alg}"), o.ratio, 3.0);
        }
    }
    let o = adv_area_longedge_translation(Algorithm::DynBoxTrans.build().as_mut(), 8).unwrap();
    check("longedge-trans(8)/dynbox-trans".into(), o.ratio, 4.0);
    let o = adv_area_longedge_rotation(Algorithm::DynBoxRot.build().as_mut(), 16).unwrap();
    check("longedge-rot(16)/dynbox-rot".into(), o.ratio, 2.0);

    report(4, pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_5_shelf_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut qualifying, mut violations, mut tried) = (0, 0, 0u64);
    let mut worst = f64::INFINITY;
    while qualifying < 10_000 {
        tried += 1;
        let k = rng.gen_range(-2..=2);
        let mut state = ShelfState::new(k);
        let max_w = 64i64 << (k + 2);
        let len = rng.gen_range(1..=60);
        for _ in 0..len {
            let w = Length::from_ratio(rng.gen_range(1..=max_w), 256);
            let h = Length::from_ratio(rng.gen_range(1..=64), 64);
            let piece = Piece::new(w, h).unwrap();
            assert!(matches!(
                nfs_place(&mut state, &piece, f64::INFINITY).unwrap(),
                NfsOutcome::Placed { .. }
            ));
        }
        let (h_total, piece_area, used) = state.density_report();
        if h_total < state.max_piece_height().scale(6) {
            continue;
        }
        qualifying += 1;
        if piece_area.scale(12) < used {
            violations += 1;
        }
        worst = worst.min(piece_area.to_f64() / used.to_f64());
    }
    let pass = violations == 0;
    report(
        5,
        pass,
        &format!("{qualifying} qualifying of {tried} sequences, {violations} violations, min density {worst:.4}"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_sqrt_n_ceiling() {
    let mut worst = [(0.0f64, 0usize); 2];
    let mut pass = true;
    for n in [25usize, 100, 400] {
        for seed in 0..50u64 {
            let stream = Generator::LogUniform { lo: -6.0, hi: 6.0 }.generate(n, 600 + seed);
            for (slot, alg) in [Algorithm::DynBoxTrans, Algorithm::DynBoxRot].iter().enumerate() {
                let ratio = area_of(&pack(*alg, &stream)) / lower_bound_area(&stream, alg.rotations()).unwrap();
                let scaled = ratio / (n as f64).sqrt();
                pass &= ratio <= 64.0 * (n as f64).sqrt();
                if scaled > worst[slot].0 {
                    worst[slot] = (scaled, n);
                }
            }
        }
    }
    report(
        6,
        pass,
        &format!(
            "max ratio/sqrt(n): dynbox-trans {:.4} (n={}), dynbox-rot {:.4} (n={}); ceiling 64",
            worst[0].0, worst[0].1, worst[1].0, worst[1].1
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_combined_variant() {
    let (mut worst_ceiling, mut worst_rel) = (0.0f64, 0.0f64);
    let mut pass = true;
    for n in [25usize, 100, 400] {
        for seed in 0..50u64 {
            let stream = Generator::LongEdge { hi: 6.0 }.generate(n, 700 + seed);
            let lb = lower_bound_area(&stream, true).unwrap();
            let ratio = |alg| area_of(&pack(alg, &stream)) / lb;
            let combined = ratio(Algorithm::DynBoxRotCombined);
            let best = ratio(Algorithm::DynBoxRot).min(ratio(Algorithm::DynBoxRotOpt4));
            let ceiling = (n as f64).sqrt().min(lb.powf(0.25));
            pass &= combined <= 64.0 * ceiling && combined <= 4.0 * best;
            worst_ceiling = worst_ceiling.max(combined / ceiling);
            worst_rel = worst_rel.max(combined / best);
        }
    }
    report(
        7,
        pass,
        &format!(
            "max combined/min(sqrt n, LB^(1/4)) {worst_ceiling:.4} (ceiling 64); max combined/best-of-others {worst_rel:.4} (ceiling 4)"
        ),
    );
    assert!(pass);
}

/// Unit-cell search over every container and every cell position, with no anchor reduction.
fn brute_force(dims: &[(i64, i64)], objective: Objective, rotations: bool) -> i64 {
    let orient = |&(w, h): &(i64, i64)| -> Vec<(i64, i64)> {
        if rotations && w != h {
            vec![(w, h), (h, w)]
        } else {
            vec![(w, h)]
        }
    };
    let total: i64 = dims.iter().map(|(w, h)| w * h).sum();
    let span: i64 = dims.iter().map(|(w, h)| w.max(h)).sum();
    let mut containers = Vec::new();
    for w in 1..=span {
        for h in 1..=span {
            if w * h < total {
                continue;
            }
            let cost = match objective {
                Objective::Perimeter => 2 * (w + h),
                Objective::Area => w * h,
                Objective::SquareArea => w.max(h) * w.max(h),
            };
            containers.push((cost, w, h));
        }
    }
    containers.sort();

    fn place(
        i: usize,
        options: &[Vec<(i64, i64)>],
        grid: &mut Vec<Vec<bool>>,
        w: i64,
        h: i64,
    ) -> bool {
        if i == options.len() {
            return true;
        }
        for &(pw, ph) in &options[i] {
            for x in 0..=(w - pw) {
                for y in 0..=(h - ph) {
                    let cells = (x..x + pw).flat_map(|a| (y..y + ph).map(move |b| (a as usize, b as usize)));
                    if cells.clone().any(|(a, b)| grid[a][b]) {
                        continue;
                    }
                    cells.clone().for_each(|(a, b)| grid[a][b] = true);
                    let done = place(i + 1, options, grid, w, h);
                    cells.for_each(|(a, b)| grid[a][b] = false);
                    if done {
                        return true;
                    }
                }
            }
        }
        false
    }

    let options: Vec<_> = dims.iter().map(orient).collect();
    for (cost, w, h) in containers {
        let mut grid = vec![vec![false; h as usize]; w as usize];
        if place(0, &options, &mut grid, w, h) {
            return cost;
        }
    }
    unreachable!("the row packing always fits")
}

#[test]
fn criterion_8_oracle_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut mismatches, mut below_lb, mut bad_witness, mut checks) = (0, 0, 0, 0);
    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let dims: Vec<(i64, i64)> = (0..n)
            .map(|_| (rng.gen_range(1..=3), rng.gen_range(1..=3)))
            .collect();
        let stream: Vec<Piece> = dims.iter().map(|&(w, h)| Piece::ratio((w, 1), (h, 1)).unwrap()).collect();
        for objective in [Objective::Perimeter, Objective::Area, Objective::SquareArea] {
            for rotations in [false, true] {
                checks += 1;
                let opt = exact_opt(&stream, objective, rotations).unwrap();
                if opt.value != Length::from_int(brute_force(&dims, objective, rotations)) {
                    mismatches += 1;
                }
                let lb = match objective {
                    Objective::Perimeter => lower_bound_perimeter(&stream, rotations).unwrap(),
                    Objective::Area => lower_bound_area_exact(&stream, rotations).unwrap().to_f64(),
                    Objective::SquareArea => lower_bound_square_area(&stream).unwrap(),
                };
                if opt.value.to_f64() < lb * (1.0 - 1e-12) {
                    below_lb += 1;
                }
                let witness_ok = verify_witness(&stream, &opt.witness, objective)
                    .map(|c| c == opt.value)
                    .unwrap_or(false)
                    && (rotations || opt.witness.iter().all(|p| !p.rotated));
                if !witness_ok {
                    bad_witness += 1;
                }
            }
        }
    }
    let pass = mismatches == 0 && below_lb == 0 && bad_witness == 0;
    report(
        8,
        pass,
        &format!("{checks} instance/objective/rotation checks: {mismatches} brute-force mismatches, {below_lb} below a lower bound, {bad_witness} bad witnesses"),
    );
    assert!(pass);
}

/// Brick-state properties of the normalized configuration. Returns a description of the first failure.
fn brick_properties(raw: &[BrickStack]) -> Result<(), String> {
    // Edge length: every occupied brick holds a piece spanning half of its long side.
    for s in raw {
        let rect = s.rect();
        let horizontal = rect.width() > rect.height();
        let ok = s.pieces().iter().any(|(p, pl)| {
            let (w, h) = p.oriented(pl.rotated);
            if horizontal {
                w.scale(2) >= rect.width()
            } else {
                h.scale(2) >= rect.height()
            }
        });
        if !ok {
            return Err(format!("{} has no suitable piece", s.brick()));
        }
        let area = s.pieces().iter().fold(Length::zero(), |acc, (p, _)| acc + p.area());
        if !s.is_sparse() && area.scale(4) < area_cost(rect) {
            return Err(format!("dense {} below 1/4 density", s.brick()));
        }
    }

    let stacks = normalize(raw);
    let max_level = stacks.iter().map(|s| s.brick().level()).max().unwrap_or(0);
    let class = classify(&stacks, max_level);
    for k in 0..=max_level {
        let sparse = stacks.iter().filter(|s| s.brick().level() == k && s.is_sparse()).count();
        let empty = class.empty.iter().filter(|b| b.level() == k).count();
        if k == 0 && empty > 0 {
            return Err("empty 0-brick".into());
        }
        if k >= 1 && (sparse > 1 || empty > 1) {
            return Err(format!("level {k}: {sparse} sparse, {empty} empty"));
        }
    }

    // Free monotonicity among k-bricks that are not strictly inside an occupied
    // or empty brick: every free one follows every occupied or split one.
    let occupied: std::collections::BTreeSet<Brick> = stacks.iter().map(|s| s.brick().clone()).collect();
    let inside_larger = |b: &Brick| {
        let mut cur = b.parent();
        while let Some(p) = cur {
            if occupied.contains(&p) || class.empty.contains(&p) {
                return true;
            }
            cur = p.parent();
        }
        false
    };
    for k in 1..=max_level {
        let mut candidates = Vec::new();
        for j in 0..=k {
            collect_candidates(Brick::fundamental(j), k, &occupied, &class, &mut candidates);
        }
        candidates.retain(|b| !inside_larger(b));
        let last_taken = candidates.iter().filter(|b| !class.is_free(b)).max();
        let first_free = candidates.iter().filter(|b| class.is_free(b)).min();
        if let (Some(t), Some(f)) = (last_taken, first_free) {
            if f < t {
                return Err(format!("free {f} precedes non-free {t}"));
            }
        }
    }
    Ok(())
}

/// `k`-bricks below `b` reached without entering an occupied or empty brick of lower level.
fn collect_candidates(
    b: Brick,
    k: i32,
    occupied: &std::collections::BTreeSet<Brick>,
    class: &boxpack::bricks::Classification,
    out: &mut Vec<Brick>,
) {
    if b.level() == k {
        out.push(b);
        return;
    }
    if occupied.contains(&b) || class.empty.contains(&b) || class.is_free(&b) {
        return;
    }
    let (l, r) = b.split();
    collect_candidates(l, k, occupied, class, out);
    collect_candidates(r, k, occupied, class, out);
}

#[test]
fn criterion_9_structural_invariants() {
    let mut failures: Vec<String> = Vec::new();
    let (mut prefixes, mut brick_checks) = (0u64, 0u64);
    let mut streams: Vec<Vec<Piece>> = (0..40u64).map(|s| uniform_stream(900 + s, 40)).collect();
    streams.extend((0..10u64).map(|s| Generator::Squares { lo: -4.0, hi: 2.0 }.generate(40, 950 + s)));
    streams.extend((0..10u64).map(|s| Generator::LongEdge { hi: 5.0 }.generate(40, 970 + s)));
    streams.push(Generator::UnitSquares.generate(60, 0));

    for (si, stream) in streams.iter().enumerate() {
        for variant in [BrickVariant::Translation, BrickVariant::Rotation, BrickVariant::Modified] {
            let mut packer = BrickPacker::new(variant);
            let mut placed = Vec::new();
            for p in stream {
                placed.push((p.clone(), packer.place(p)));
                prefixes += 1;
                if !interiors_disjoint(&placed) {
                    failures.push(format!("stream {si} {variant:?}: overlap at prefix {}", placed.len()));
                    break;
                }
                if variant == BrickVariant::Modified {
                    continue;
                }
                brick_checks += 1;
                let stacks: Vec<BrickStack> = packer.stacks().cloned().collect();
                if let Err(e) = brick_properties(&stacks) {
                    failures.push(format!("stream {si} {variant:?} prefix {}: {e}", placed.len()));
                    break;
                }
            }
        }
        for variant in [DynBoxVariant::Trans, DynBoxVariant::Rot, DynBoxVariant::RotOpt4, DynBoxVariant::RotCombined] {
            let mut packer = DynBox::new(variant);
            let mut placed: Vec<(Piece, Placement)> = Vec::new();
            let (mut prev_t, mut prev_a) = (f64::NEG_INFINITY, i32::MIN);
            for p in stream {
                placed.push((p.clone(), packer.place(p)));
                prefixes += 1;
                let n = placed.len();
                let active = packer.active().unwrap();
                let bad = if !interiors_disjoint(&placed) {
                    Some("overlap")
                } else if packer.threshold_value() < prev_t {
                    Some("threshold decreased")
                } else if active < prev_a {
                    Some("active box moved left")
                } else if packer.boxes().values().any(|b| b.sparse_counts().values().any(|&c| c > 1)) {
                    Some("two sparse shelves in one class")
                } else {
                    None
                };
                if let Some(e) = bad {
                    failures.push(format!("stream {si} {variant:?} prefix {n}: {e}"));
                    break;
                }
                prev_t = packer.threshold_value();
                prev_a = active;
            }
        }
    }
    let pass = failures.is_empty();
    report(
        9,
        pass,
        &format!(
            "{} streams, {prefixes} prefixes, {brick_checks} brick-state checks, {} failures{}",
            streams.len(),
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    );
    assert!(pass);
}
