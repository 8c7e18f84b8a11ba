//! Stream parsing, random stream generators and run reports.

use std::str::FromStr;
use std::time::Instant;

use num::bigint::BigInt;
use num::{BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversaries::cost_of;
use crate::error::PackError;
use crate::geometry::{bounding_box, interiors_disjoint, Length, Piece, PlacedPiece, Placement};
use crate::oracles::{exact_opt, lower_bound, OptKind};
use crate::packer::{Algorithm, Objective, Overlay};

fn parse_decimal(tok: &str) -> Option<BigRational> {
    let (mantissa, exp) = match tok.find(['e', 'E']) {
        Some(i) => (&tok[..i], tok[i + 1..].parse::<i32>().ok()?),
        None => (tok, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    let factor = BigRational::from_integer(num::pow(ten, shift.unsigned_abs() as usize));
    if shift >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if neg { -value } else { value })
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    match tok.split_once('/') {
        Some((p, q)) => {
            let p = parse_decimal(p)?;
            let q = parse_decimal(q)?;
            (!q.is_zero()).then(|| p / q)
        }
        None => parse_decimal(tok),
    }
}

/// One length token: a decimal, `p/q`, `r*sqrt2`, `p/q*sqrt2`, `sqrt2`, or
/// a rational plus or minus a radical term such as `1-1/2*sqrt2`.
pub fn parse_length(tok: &str) -> Option<Length> {
    let tok = tok.trim();
    if tok.ends_with("sqrt2") {
        let bytes = tok.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        if let Some(i) = split {
            let rational = parse_rational(&tok[..i])?;
            let radical = parse_length(&tok[i..])?;
            return Some(Length::from_rational(rational) + radical);
        }
    }
    if let Some(coef) = tok.strip_suffix("sqrt2") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let r = match coef {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c)?,
        };
        return Some(Length::from_parts(BigRational::zero(), r));
    }
    parse_rational(tok).map(Length::from_rational)
}

/// One piece per line as `<width> <height>`; `#` starts a comment.
pub fn parse_stream(text: &str) -> Result<Vec<Piece>, PackError> {
    let mut pieces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| PackError::Parse { line, message };
        if toks.len() != 2 {
            return Err(err(format!("expected '<width> <height>', got '{content}'")));
        }
        let w = parse_length(toks[0]).ok_or_else(|| err(format!("bad length '{}'", toks[0])))?;
        let h = parse_length(toks[1]).ok_or_else(|| err(format!("bad length '{}'", toks[1])))?;
        let piece = Piece::new(w, h).map_err(|e| err(e.to_string()))?;
        pieces.push(piece);
    }
    Ok(pieces)
}

/// Writes a stream back in the grammar `parse_stream` reads.
pub fn format_stream(pieces: &[Piece]) -> String {
    pieces
        .iter()
        .map(|p| format!("{} {}\n", p.width().exact_string(), p.height().exact_string()))
        .collect()
}

/// Seeded random stream families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Width and height independently log-uniform in `[2^lo, 2^hi]`.
    LogUniform { lo: f64, hi: f64 },
    /// Squares with log-uniform side.
    Squares { lo: f64, hi: f64 },
    UnitSquares,
    /// Log-uniform sides in `[1, 2^hi]`.
    LongEdge { hi: f64 },
}

impl Generator {
    pub fn names() -> &'static [&'static str] {
        &["uniform", "squares", "unit-squares", "long-edge"]
    }

    pub fn from_name(name: &str, lo: f64, hi: f64) -> Result<Self, PackError> {
        match name {
            "uniform" => Ok(Generator::LogUniform { lo, hi }),
            "squares" => Ok(Generator::Squares { lo, hi }),
            "unit-squares" => Ok(Generator::UnitSquares),
            "long-edge" => Ok(Generator::LongEdge { hi }),
            other => Err(PackError::Config(format!(
                "unknown generator '{other}' (expected one of {})",
                Self::names().join(", ")
            ))),
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Vec<Piece> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| match *self {
                Generator::LogUniform { lo, hi } => {
                    let w = log_uniform(&mut rng, lo, hi);
                    let h = log_uniform(&mut rng, lo, hi);
                    Piece::new(w, h)
                }
                Generator::Squares { lo, hi } => Piece::square(log_uniform(&mut rng, lo, hi)),
                Generator::UnitSquares => Piece::square(Length::one()),
                Generator::LongEdge { hi } => {
                    let w = log_uniform(&mut rng, 0.0, hi);
                    let h = log_uniform(&mut rng, 0.0, hi);
                    Piece::new(w, h)
                }
            }
            .expect("generated sides are positive"))
            .collect()
    }
}

/// `2^u` for `u` uniform in `[lo, hi]`, rounded to 20 significant bits and kept inside the range.
fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Length {
    let v = 2f64.powf(rng.gen_range(lo..=hi));
    let e = v.log2().floor() as i32 - 20;
    let scale = 2f64.powi(e);
    let q = ((v / scale).round() * scale).clamp(2f64.powf(lo), 2f64.powf(hi));
    Length::from_f64(q).expect("finite positive")
}

/// A placement with its rectangle, in floats and exact form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub rotated: bool,
    pub x_exact: String,
    pub y_exact: String,
    pub width_exact: String,
    pub height_exact: String,
}

impl PlacementRecord {
    pub fn new(piece: &Piece, pl: &Placement) -> Self {
        let (w, h) = piece.oriented(pl.rotated);
        Self {
            index: pl.piece_index,
            x: sig15(pl.x.to_f64()),
            y: sig15(pl.y.to_f64()),
            width: sig15(w.to_f64()),
            height: sig15(h.to_f64()),
            rotated: pl.rotated,
            x_exact: pl.x.exact_string(),
            y_exact: pl.y.exact_string(),
            width_exact: w.exact_string(),
            height_exact: h.exact_string(),
        }
    }
}

/// Rounds to 15 significant digits.
pub fn sig15(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub objective: Objective,
    pub rotations: bool,
    pub n: usize,
    pub alg_cost: f64,
    pub alg_cost_exact: String,
    pub opt_kind: OptKind,
    pub opt_value: f64,
    pub ratio: f64,
    /// `[x_min, y_min, x_max, y_max]`
    pub bounding_box: [f64; 4],
    pub placements: Vec<PlacementRecord>,
    pub overlays: Vec<Overlay>,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub const CSV_HEADER: &'static str =
        "algorithm,objective,rotations,n,alg_cost,opt_kind,opt_value,ratio,wall_time_ms";

    pub fn csv_row(&self) -> String {
        let kind = match self.opt_kind {
            OptKind::Exact => "exact",
            OptKind::Lower => "lower",
            OptKind::Witness => "witness",
        };
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            self.algorithm,
            self.objective,
            self.rotations,
            self.n,
            self.alg_cost,
            kind,
            self.opt_value,
            self.ratio,
            self.wall_time_ms
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Try the exact oracle before falling back to the lower bound.
    pub exact: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { exact: true }
    }
}

/// Packs the stream, verifies the packing and scores it.
pub fn run(
    stream: &[Piece],
    algorithm: Algorithm,
    objective: Objective,
    options: RunOptions,
) -> Result<RunReport, PackError> {
    if !algorithm.supports(objective) {
        return Err(PackError::Config(format!(
            "algorithm {algorithm} does not target the {objective} objective"
        )));
    }
    if stream.is_empty() {
        return Err(PackError::EmptyStream);
    }
    let start = Instant::now();
    let mut packer = algorithm.build();
    let placed: Vec<PlacedPiece> = stream
        .iter()
        .map(|p| (p.clone(), packer.place(p)))
        .collect();
    let overlays = packer.overlays();
    let elapsed = start.elapsed();

    if !interiors_disjoint(&placed) {
        return Err(PackError::Invariant(format!("{algorithm} produced overlapping pieces")));
    }
    let bbox = bounding_box(&placed)?;
    let alg = cost_of(objective, &bbox);
    let rotations = packer.rotations();

    let exact = if options.exact {
        match exact_opt(stream, objective, rotations) {
            Ok(opt) => Some(opt.value.to_f64()),
            Err(PackError::InstanceTooLarge(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (opt_kind, opt_value) = match exact {
        Some(v) => (OptKind::Exact, v),
        None => (OptKind::Lower, lower_bound(stream, objective, rotations)?),
    };
    let alg_cost = alg.to_f64();
    Ok(RunReport {
        algorithm,
        objective,
        rotations,
        n: stream.len(),
        alg_cost: sig15(alg_cost),
        alg_cost_exact: alg.exact_string(),
        opt_kind,
        opt_value: sig15(opt_value),
        ratio: sig15(alg_cost / opt_value),
        bounding_box: bbox.to_f64().map(sig15),
        placements: placed.iter().map(|(p, pl)| PlacementRecord::new(p, pl)).collect(),
        overlays,
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    })
}

impl FromStr for Generator {
    type Err = PackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::from_name(s, -6.0, 6.0)
    }
}
