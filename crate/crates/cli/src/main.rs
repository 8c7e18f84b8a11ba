use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boxpack::adversaries::{
    adv_area_general, adv_area_longedge_rotation, adv_area_longedge_translation,
    adv_perimeter_rotation, adv_perimeter_translation, adv_square_16_9, fekete_witness,
    modified_ratio4_witness, score_stream, stream_fekete_tightness, stream_modified_ratio4,
    AdversaryOutcome,
};
use boxpack::harness::{format_stream, parse_length, sig15, PlacementRecord};
use boxpack::oracles::{exact_opt, lower_bound};
use boxpack::{
    parse_stream, render_svg, run, Algorithm, Generator, Length, Objective, PackError, Piece,
    RunOptions, RunReport, SvgOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "boxpack", version, about = "Online rectangle packing into small bounding boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack a stream with one online algorithm and report its competitive ratio.
    Pack(PackArgs),
    /// Play an adaptive adversary (or a fixed worst-case stream) against an algorithm.
    Adversary(AdversaryArgs),
    /// Offline optimum of a small stream, or a lower bound when it is too large.
    Opt(OptArgs),
    /// Write a random stream in the text format read by `--input`.
    Gen(GenArgs),
    /// Draw a JSON report produced by `pack` as SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct StreamArgs {
    /// Stream file: one `<width> <height>` pair per line.
    #[arg(long, conflicts_with = "generator")]
    input: Option<PathBuf>,
    /// Random stream family: uniform, squares, unit-squares, long-edge.
    #[arg(long)]
    generator: Option<String>,
    /// Pieces per generated stream.
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest log2 side for generated pieces.
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    lo: f64,
    /// Largest log2 side for generated pieces.
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    hi: f64,
}

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    algorithm: String,
    /// perimeter, area or square; defaults to the algorithm's own objective.
    #[arg(long)]
    objective: Option<String>,
    /// Must agree with the algorithm when given.
    #[arg(long)]
    rotations: Option<Toggle>,
    #[command(flatten)]
    stream: StreamArgs,
    /// Independent generated trials with seeds `seed, seed+1, ...`, run in parallel.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Skip the exact oracle and always divide by the lower bound.
    #[arg(long)]
    no_exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG drawing of the packing.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Draw bricks, boxes and shelves in the SVG.
    #[arg(long)]
    overlays: bool,
}

#[derive(Args)]
struct AdversaryArgs {
    /// peri-trans, peri-rot, area-general, longedge-trans, longedge-rot, square169, fekete, ratio4
    #[arg(long)]
    name: String,
    #[arg(long)]
    algorithm: String,
    /// Grid size of area-general.
    #[arg(long, default_value_t = 6)]
    m: i64,
    /// Side of the square grid for the long-edge adversaries.
    #[arg(long)]
    n: Option<i64>,
    /// Level parameter of the fixed streams (fekete: even, ratio4: odd).
    #[arg(long)]
    k: Option<i32>,
    #[arg(long)]
    eps: Option<String>,
    /// Piece scale of area-general.
    #[arg(long, default_value = "1")]
    p: String,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long)]
    objective: String,
    #[arg(long, value_enum, default_value = "off")]
    rotations: Toggle,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "uniform")]
    generator: String,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// JSON report written by `pack --report json`.
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    overlays: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Pack(a) => pack(a),
        Command::Adversary(a) => adversary(a),
        Command::Opt(a) => opt(a),
        Command::Gen(a) => gen(a),
        Command::Render(a) => render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boxpack: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &PackError) -> u8 {
    match e {
        PackError::Parse { .. } | PackError::DegeneratePiece { .. } => 2,
        PackError::Invariant(_) => 4,
        _ => 3,
    }
}

fn read(path: &Path) -> Result<String, PackError> {
    fs::read_to_string(path).map_err(|e| PackError::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), PackError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| PackError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| PackError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn length_arg(name: &str, text: &str) -> Result<Length, PackError> {
    parse_length(text)
        .filter(Length::is_positive)
        .ok_or_else(|| PackError::Config(format!("--{name} must be a positive length, got '{text}'")))
}

fn streams(args: &StreamArgs, trials: usize) -> Result<Vec<Vec<Piece>>, PackError> {
    match (&args.input, &args.generator) {
        (Some(path), _) => {
            if trials > 1 {
                return Err(PackError::Config("--trials needs --generator, not --input".into()));
            }
            Ok(vec![parse_stream(&read(path)?)?])
        }
        (None, Some(name)) => {
            let g = Generator::from_name(name, args.lo, args.hi)?;
            if !(args.lo <= args.hi) {
                return Err(PackError::Config("--lo must not exceed --hi".into()));
            }
            Ok((0..trials as u64).map(|t| g.generate(args.n, args.seed + t)).collect())
        }
        (None, None) => Err(PackError::Config("give --input or --generator".into())),
    }
}

fn pack(args: PackArgs) -> Result<(), PackError> {
    let algorithm: Algorithm = args.algorithm.parse()?;
    let objective = match &args.objective {
        Some(o) => o.parse()?,
        None if algorithm.is_brick() => Objective::Perimeter,
        None => Objective::Area,
    };
    if let Some(r) = args.rotations {
        if (r == Toggle::On) != algorithm.rotations() {
            return Err(PackError::Config(format!(
                "{algorithm} runs with rotations {}",
                if algorithm.rotations() { "on" } else { "off" }
            )));
        }
    }
    if args.trials == 0 {
        return Err(PackError::Config("--trials must be at least 1".into()));
    }
    if args.svg.is_some() && args.trials > 1 {
        return Err(PackError::Config("--svg draws a single trial".into()));
    }
    let options = RunOptions { exact: !args.no_exact };
    let inputs = streams(&args.stream, args.trials)?;
    let reports: Vec<RunReport> = inputs
        .par_iter()
        .map(|s| run(s, algorithm, objective, options))
        .collect::<Result<_, _>>()?;

    if let Some(path) = &args.svg {
        let svg = render_svg(&reports[0], SvgOptions { overlays: args.overlays })?;
        emit(Some(path), &svg)?;
    }
    let text = match args.report {
        ReportFormat::Json if reports.len() == 1 => reports[0].to_json(),
        ReportFormat::Json => serde_json::to_string_pretty(&reports).expect("reports serialize"),
        ReportFormat::Csv => {
            let mut lines = vec![RunReport::CSV_HEADER.to_string()];
            lines.extend(reports.iter().map(RunReport::csv_row));
            lines.join("\n")
        }
    };
    emit(args.out.as_deref(), &with_newline(text))
}

fn adversary_objective(name: &str) -> Result<Objective, PackError> {
    match name {
        "peri-trans" | "peri-rot" | "ratio4" => Ok(Objective::Perimeter),
        "area-general" | "longedge-trans" | "longedge-rot" => Ok(Objective::Area),
        "square169" | "fekete" => Ok(Objective::SquareArea),
        other => Err(PackError::Config(format!("unknown adversary '{other}'"))),
    }
}

fn adversary(args: AdversaryArgs) -> Result<(), PackError> {
    let algorithm: Algorithm = args.algorithm.parse()?;
    let objective = adversary_objective(&args.name)?;
    if !algorithm.supports(objective) {
        return Err(PackError::Config(format!(
            "{} targets {objective}, which {algorithm} does not minimize",
            args.name
        )));
    }
    let mut packer = algorithm.build();
    let packer = packer.as_mut();
    let eps = |default: &str| length_arg("eps", args.eps.as_deref().unwrap_or(default));
    let outcome: AdversaryOutcome = match args.name.as_str() {
        "peri-trans" => adv_perimeter_translation(packer, &eps("1/1000")?)?,
        "peri-rot" => adv_perimeter_rotation(packer, &eps("1/1000")?)?,
        "area-general" => adv_area_general(packer, args.m, &length_arg("p", &args.p)?)?,
        "longedge-trans" => adv_area_longedge_translation(packer, args.n.unwrap_or(8))?,
        "longedge-rot" => adv_area_longedge_rotation(packer, args.n.unwrap_or(16))?,
        "square169" => adv_square_16_9(packer)?,
        "fekete" => {
            let k = args.k.unwrap_or(10);
            if k < 2 || k % 2 != 0 || k > 20 {
                return Err(PackError::Config("fekete needs an even --k in 2..=20".into()));
            }
            let e = eps("1/1000")?;
            let stream = stream_fekete_tightness(k as u32, &e);
            score_stream(packer, "fekete", objective, &stream, fekete_witness(k as u32, &e))?
        }
        "ratio4" => {
            let k = args.k.unwrap_or(11);
            if k > 21 {
                return Err(PackError::Config("ratio4 needs --k at most 21".into()));
            }
            let plan = stream_modified_ratio4(k, &eps("1/10000")?)?;
            let witness = modified_ratio4_witness(&plan);
            score_stream(packer, "ratio4", objective, &plan.stream, witness)?
        }
        _ => unreachable!("name checked above"),
    };

    let text = match args.report {
        ReportFormat::Json => {
            let placements: Vec<PlacementRecord> = outcome
                .placements
                .iter()
                .map(|pl| PlacementRecord::new(&outcome.stream[pl.piece_index], pl))
                .collect();
            let witness: Vec<PlacementRecord> = outcome
                .witness
                .iter()
                .map(|pl| PlacementRecord::new(&outcome.stream[pl.piece_index], pl))
                .collect();
            let doc = json!({
                "adversary": outcome.adversary,
                "algorithm": outcome.algorithm,
                "objective": outcome.objective,
                "branch": outcome.branch,
                "n": outcome.stream.len(),
                "alg_cost": sig15(outcome.alg_cost.to_f64()),
                "alg_cost_exact": outcome.alg_cost.exact_string(),
                "opt_kind": "witness",
                "opt_value": sig15(outcome.opt_upper.to_f64()),
                "opt_value_exact": outcome.opt_upper.exact_string(),
                "ratio": sig15(outcome.ratio),
                "placements": placements,
                "witness": witness,
            });
            serde_json::to_string_pretty(&doc).expect("outcome serializes")
        }
        ReportFormat::Csv => format!(
            "adversary,algorithm,objective,branch,n,alg_cost,opt_value,ratio\n{},{},{},\"{}\",{},{},{},{}",
            outcome.adversary,
            outcome.algorithm,
            outcome.objective,
            outcome.branch,
            outcome.stream.len(),
            sig15(outcome.alg_cost.to_f64()),
            sig15(outcome.opt_upper.to_f64()),
            sig15(outcome.ratio)
        ),
    };
    emit(args.out.as_deref(), &with_newline(text))
}

fn opt(args: OptArgs) -> Result<(), PackError> {
    let objective: Objective = args.objective.parse()?;
    let rotations = args.rotations == Toggle::On;
    let stream = parse_stream(&read(&args.input)?)?;
    if stream.is_empty() {
        return Err(PackError::EmptyStream);
    }
    let doc = match exact_opt(&stream, objective, rotations) {
        Ok(o) => {
            let witness: Vec<PlacementRecord> = o
                .witness
                .iter()
                .map(|pl| PlacementRecord::new(&stream[pl.piece_index], pl))
                .collect();
            json!({
                "objective": objective,
                "rotations": rotations,
                "n": stream.len(),
                "opt_kind": "exact",
                "value": sig15(o.value.to_f64()),
                "value_exact": o.value.exact_string(),
                "container": [sig15(o.container_width.to_f64()), sig15(o.container_height.to_f64())],
                "nodes": o.nodes,
                "witness": witness,
            })
        }
        Err(PackError::InstanceTooLarge(why)) => json!({
            "objective": objective,
            "rotations": rotations,
            "n": stream.len(),
            "opt_kind": "lower",
            "value": sig15(lower_bound(&stream, objective, rotations)?),
            "note": why,
        }),
        Err(e) => return Err(e),
    };
    let text = serde_json::to_string_pretty(&doc).expect("opt serializes");
    emit(args.out.as_deref(), &with_newline(text))
}

fn gen(args: GenArgs) -> Result<(), PackError> {
    if !(args.lo <= args.hi) {
        return Err(PackError::Config("--lo must not exceed --hi".into()));
    }
    let g = Generator::from_name(&args.generator, args.lo, args.hi)?;
    emit(args.out.as_deref(), &format_stream(&g.generate(args.n, args.seed)))
}

fn render(args: RenderArgs) -> Result<(), PackError> {
    let text = read(&args.input)?;
    let report: RunReport = serde_json::from_str(&text).map_err(|e| PackError::Parse {
        line: e.line(),
        message: format!("not a pack report: {e}"),
    })?;
    let svg = render_svg(&report, SvgOptions { overlays: args.overlays })?;
    emit(args.svg.as_deref(), &svg)
}
