//! Command-line front end. Exact values are printed as `p/q` strings.
//!
//! Exit codes: 0 success, 1 a checked property failed (or the computation
//! could not certify it), 2 bad input. Errors are reported on stderr as
//! `{"error": {"kind": ..., "message": ...}}`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tfractal::address::ElusiveAddress;
use tfractal::atlas::{self, boundary_loops, is_cone_corner_at, vertex_classes, Atlas, GlobalPoint, PieceId};
use tfractal::billiard::{billiard_trace, simulate_table};
use tfractal::dynamics::{cutting_sequence, separation_witness, twist_trace};
use tfractal::metric::{bracket, box_dimension, certified_m_at, compare_metrics, DiameterEstimate, MetricChoice};
use tfractal::render::{render_net, render_table};
use tfractal::singularity::{approach_sequence, default_apex, nearest_cone_witness, sector_obstruction_witness};
use tfractal::tracer::{trace, Budgets};
use tfractal::{sample, Direction, Error, Rat};

/// Environment variable naming a directory for cached results.
const CACHE_ENV: &str = "TFRACTAL_CACHE_DIR";

#[derive(Parser)]
#[command(name = "tfractal", version, about = "Exact analysis of the T-fractal translation surface")]
struct Cli {
    /// Output format; not every command supports every format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every sampled input.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Flow-time budget.
    #[arg(long, default_value = "10")]
    max_length: Rat,
    #[arg(long, default_value_t = 1000)]
    max_crossings: usize,
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
}

impl BudgetArgs {
    fn budgets(&self) -> Result<Budgets, Error> {
        if !self.max_length.is_positive() || self.max_crossings == 0 {
            return Err(Error::Precondition("budgets must be positive".into()));
        }
        Ok(Budgets::new(self.max_length.clone(), self.max_crossings, self.max_depth))
    }
}

#[derive(Args, Clone)]
struct RayArgs {
    /// Start point `ADDRESS:PIECE:x,y`, e.g. `ε:UR:1/3,1/7`.
    #[arg(long)]
    start: GlobalPoint,
    /// Direction `dx,dy` (primitive integers).
    #[arg(long, allow_hyphen_values = true)]
    dir: Direction,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Atlas inspection.
    #[command(subcommand)]
    Atlas(AtlasCommand),
    /// Trace a straight-line flow.
    Trace(RayArgs),
    /// Cutting sequence (quad-Ts visited) of a trace.
    Cutseq(RayArgs),
    /// Twist iterates of a trace and their cutting sequences.
    Twist {
        #[command(flatten)]
        ray: RayArgs,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
    },
    /// Pairwise intersections of twist iterates of an upward trace.
    Separation {
        #[command(flatten)]
        ray: RayArgs,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
    },
    /// Lower and upper bounds on the distance between two points.
    Distance {
        /// Two points `ADDRESS:PIECE:x,y`.
        #[arg(long, num_args = 2, required = true)]
        pair: Vec<GlobalPoint>,
        #[arg(long, default_value_t = 8)]
        density: usize,
    },
    /// Certified quad-T diameter bound and the waypoint-graph estimate.
    Diameter {
        #[arg(long, default_value_t = 8)]
        density: usize,
    },
    /// Compare the surface distance bounds with the 2-adic metric.
    CompareMetrics {
        /// Number of seeded address pairs.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Box-counting dimension of the elusive singularities.
    Dimension {
        #[arg(long, default_value = "d2")]
        metric: MetricChoice,
        #[arg(long, default_value_t = 1)]
        kmin: u32,
        #[arg(long, default_value_t = 16)]
        kmax: u32,
    },
    /// Vertex classes, cone points and boundary loops of a truncation.
    Cones {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Cauchy approach sequence toward an elusive singularity.
    Approach {
        /// Eventually periodic address `head(period)`, e.g. `0(01)`.
        #[arg(long)]
        address: ElusiveAddress,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// A cone point within `eps` of an elusive singularity.
    WitnessCone {
        #[arg(long)]
        address: ElusiveAddress,
        #[arg(long)]
        eps: Rat,
    },
    /// A cone point inside the triangle of two straight approaches.
    WitnessSector {
        #[arg(long, default_value = "(1)")]
        address: ElusiveAddress,
        /// Two directions `dx,dy;dx,dy`.
        #[arg(long, default_value = "1,1;1,2")]
        dirs: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Apex `ADDRESS:PIECE:x,y`; defaults to a point on the boundary
        /// between the root and the first quad-T of the address.
        #[arg(long)]
        apex: Option<GlobalPoint>,
    },
    /// Billiard path in the level-n table.
    Billiard {
        #[arg(long, default_value_t = 2)]
        level: usize,
        /// Table point `x,y`.
        #[arg(long, default_value = "1/3,1/5")]
        start: String,
        #[arg(long, default_value = "1,3", allow_hyphen_values = true)]
        dir: Direction,
        #[arg(long, default_value_t = 50)]
        bounces: usize,
    },
    /// Compare folded surface geodesics with direct billiard paths.
    Foldcheck {
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        bounces: usize,
    },
    /// SVG net of the depth-n truncation.
    Render {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Draw the billiard table instead of the net.
        #[arg(long)]
        table: bool,
    },
}

#[derive(Subcommand)]
enum AtlasCommand {
    /// Run the structural checks on the gluing table.
    Validate {
        #[arg(long, default_value_t = atlas::validate::VALIDATION_DEPTH)]
        depth: usize,
    },
    /// Chart geometry and gluings of one quad-T.
    Dump {
        #[arg(long, default_value = "ε")]
        address: tfractal::Address,
    },
}

/// Result of a command: the text to print and whether its checks passed.
struct Outcome {
    text: String,
    passed: bool,
}

fn json_out<T: Serialize>(v: &T, passed: bool) -> Outcome {
    Outcome { text: serde_json::to_string_pretty(v).expect("output serializes"), passed }
}

fn need(format: Format, allowed: &[Format]) -> Result<(), Error> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Error::Precondition("output format not supported by this command".into()))
    }
}

fn parse_pair(s: &str) -> Result<[Rat; 2], Error> {
    let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse(format!("invalid point {s:?}, expected x,y")))?;
    Ok([x.trim().parse()?, y.trim().parse()?])
}

fn csv<R: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: R) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

fn cached_diameter(density: usize) -> DiameterEstimate {
    #[derive(serde::Deserialize)]
    struct Stored {
        m_bar: String,
        m_hat: String,
        density: usize,
    }
    let path = std::env::var_os(CACHE_ENV).map(|d| PathBuf::from(d).join(format!("diameter-k{density}.json")));
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(s) = serde_json::from_str::<Stored>(&text) {
                if let (Ok(m_bar), Ok(m_hat)) = (s.m_bar.parse(), s.m_hat.parse()) {
                    if s.density == density {
                        return DiameterEstimate { m_bar, m_hat, density };
                    }
                }
            }
        }
    }
    let est = certified_m_at(density);
    if let Some(p) = &path {
        // a cache that cannot be written is not an error
        let _ = std::fs::create_dir_all(p.parent().expect("cache file has a parent"));
        let _ = std::fs::write(p, serde_json::to_string(&est).expect("estimate serializes"));
    }
    est
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let atlas = Atlas::canonical();
    let f = cli.format;
    match &cli.command {
        Command::Atlas(AtlasCommand::Validate { depth }) => {
            need(f, &[Format::Json])?;
            let r = atlas::validate_table(atlas.table(), *depth);
            let passed = r.passed;
            Ok(json_out(&r, passed))
        }
        Command::Atlas(AtlasCommand::Dump { address }) => {
            need(f, &[Format::Json])?;
            Ok(json_out(&atlas::dump::dump(atlas.table(), address)?, true))
        }
        Command::Trace(ray) => {
            need(f, &[Format::Json, Format::Svg])?;
            let tr = trace(&atlas, &ray.start, ray.dir, &ray.budgets.budgets()?)?;
            if f == Format::Svg {
                return Ok(Outcome { text: render_net(tr.max_depth().min(5), Some(&tr)), passed: true });
            }
            Ok(json_out(&tr, true))
        }
        Command::Cutseq(ray) => {
            need(f, &[Format::Json])?;
            let tr = trace(&atlas, &ray.start, ray.dir, &ray.budgets.budgets()?)?;
            let cs = cutting_sequence(&tr);
            let steps = cs.is_one_bit_steps();
            Ok(json_out(&json!({ "entries": cs.entries, "one_bit_steps": steps, "termination": tr.termination }), steps))
        }
        Command::Twist { ray, iterations } => {
            need(f, &[Format::Json])?;
            let mut tr = trace(&atlas, &ray.start, ray.dir, &ray.budgets.budgets()?)?;
            let base = cutting_sequence(&tr);
            let mut rows = Vec::new();
            let mut same = true;
            for i in 0..=*iterations {
                if i > 0 {
                    tr = twist_trace(&atlas, &tr)?;
                }
                let cs = cutting_sequence(&tr);
                same &= cs == base;
                rows.push(json!({
                    "iterate": i,
                    "start": tr.start,
                    "direction": tr.direction,
                    "flow_time": tr.flow_time,
                    "termination": tr.termination,
                    "cutting_sequence": cs.entries,
                }));
            }
            Ok(json_out(&json!({ "iterates": rows, "cutting_sequences_agree": same }), same))
        }
        Command::Separation { ray, iterations } => {
            need(f, &[Format::Json])?;
            let tr = trace(&atlas, &ray.start, ray.dir, &ray.budgets.budgets()?)?;
            let r = separation_witness(&atlas, &tr, *iterations)?;
            let ok = r.success;
            Ok(json_out(&r, ok))
        }
        Command::Distance { pair, density } => {
            need(f, &[Format::Json])?;
            let b = bracket(&atlas, &pair[0], &pair[1], *density)?;
            let ok = b.lower <= b.upper;
            Ok(json_out(&b, ok))
        }
        Command::Diameter { density } => {
            need(f, &[Format::Json])?;
            let est = cached_diameter(*density);
            let ok = est.m_hat <= est.m_bar;
            Ok(json_out(&est, ok))
        }
        Command::CompareMetrics { pairs, depth } => {
            need(f, &[Format::Json, Format::Csv])?;
            let mut rng = sample::rng(cli.seed);
            let ps: Vec<_> = (0..*pairs).map(|_| sample::elusive_pair(&mut rng)).collect();
            let rows = compare_metrics(&atlas, &ps, *depth)?;
            let ok = rows.iter().all(|r| r.holds);
            if f == Format::Csv {
                let body = rows.iter().map(|r| {
                    vec![
                        r.a.to_string(),
                        r.b.to_string(),
                        r.wedge_len.to_string(),
                        r.d2.to_string(),
                        r.lower.to_string(),
                        r.tree_upper.to_string(),
                        r.holds.to_string(),
                    ]
                });
                let header = ["a", "b", "wedge_len", "d2", "lower", "tree_upper", "holds"];
                return Ok(Outcome { text: csv(&header, body), passed: ok });
            }
            Ok(json_out(&rows, ok))
        }
        Command::Dimension { metric, kmin, kmax } => {
            need(f, &[Format::Json, Format::Csv])?;
            let r = box_dimension(&atlas, *metric, *kmin, *kmax)?;
            if f == Format::Csv {
                let body = r.scales.iter().zip(&r.counts).map(|(k, n)| vec![k.to_string(), n.to_string()]);
                return Ok(Outcome { text: csv(&["k", "count"], body), passed: true });
            }
            Ok(json_out(&r, true))
        }
        Command::Cones { depth } => {
            need(f, &[Format::Json])?;
            let classes = vertex_classes(atlas.table(), *depth)?;
            let loops = boundary_loops(atlas.table(), *depth)?;
            let count = |a: i64| classes.iter().filter(|c| c.total_angle == Rat::int(a)).count();
            let other = classes.len() - count(2) - count(6);
            let single = loops.iter().all(|l| l.has_single_cone_point());
            let corners = |s: &tfractal::Address| -> serde_json::Value {
                PieceId::ALL
                    .iter()
                    .map(|&p| (p.to_string(), json!((0..10).filter(|&v| is_cone_corner_at(s, p, v)).collect::<Vec<_>>())))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            };
            let v = json!({
                "depth": depth,
                "classes": classes.len(),
                "two_pi": count(2),
                "six_pi": count(6),
                "other": other,
                "boundary_loops": loops.len(),
                "loops_with_single_cone_point": single,
                "cone_corners_root": corners(&tfractal::Address::root()),
                "cone_corners": corners(&tfractal::Address::from_bits(&[1])),
            });
            Ok(json_out(&v, other == 0 && single))
        }
        Command::Approach { address, depth } => {
            need(f, &[Format::Json, Format::Csv])?;
            let seq = approach_sequence(address, *depth);
            let violation = seq.first_violation(&atlas)?;
            if f == Format::Csv {
                let body = seq
                    .points
                    .iter()
                    .zip(&seq.gap_bounds)
                    .enumerate()
                    .map(|(j, (p, b))| vec![j.to_string(), p.to_string(), b.to_string()]);
                return Ok(Outcome { text: csv(&["j", "point", "tail_bound"], body), passed: violation.is_none() });
            }
            Ok(json_out(&json!({ "sequence": seq, "violation": violation }), violation.is_none()))
        }
        Command::WitnessCone { address, eps } => {
            need(f, &[Format::Json])?;
            Ok(json_out(&nearest_cone_witness(&atlas, address, eps)?, true))
        }
        Command::WitnessSector { address, dirs, depth, apex } => {
            need(f, &[Format::Json])?;
            let (a, b) = dirs.split_once(';').ok_or_else(|| Error::Parse(format!("invalid --dirs {dirs:?}, expected dx,dy;dx,dy")))?;
            let (d1, d2): (Direction, Direction) = (a.parse()?, b.parse()?);
            let apex = apex.clone().unwrap_or_else(|| default_apex(address));
            let r = sector_obstruction_witness(&atlas, address, &apex, d1, d2, *depth)?;
            let found = r.cone.is_some();
            Ok(json_out(&r, found))
        }
        Command::Billiard { level, start, dir, bounces } => {
            need(f, &[Format::Json, Format::Svg])?;
            let b = billiard_trace(&atlas, *level, &parse_pair(start)?, *dir, *bounces)?;
            if f == Format::Svg {
                return Ok(Outcome { text: render_table(*level, Some(&b)), passed: true });
            }
            Ok(json_out(&b, true))
        }
        Command::Foldcheck { level, samples, bounces } => {
            need(f, &[Format::Json])?;
            let mut rng = sample::rng(cli.seed);
            let mut mismatches = Vec::new();
            for i in 0..*samples {
                let start = sample::table_point(&mut rng);
                let dir = sample::direction(&mut rng, 12, true);
                let folded = billiard_trace(&atlas, *level, &start, dir, *bounces)?;
                let (direct, end) = simulate_table(*level, &start, (dir.dx, dir.dy), *bounces)?;
                if folded.polyline != direct || folded.end != end {
                    mismatches.push(json!({ "sample": i, "start": start, "direction": dir }));
                }
            }
            let matches = samples - mismatches.len();
            let v = json!({
                "level": level,
                "samples": samples,
                "bounces": bounces,
                "matches": matches,
                "summary": format!("{matches}/{samples} exact matches"),
                "mismatches": mismatches,
            });
            Ok(json_out(&v, mismatches.is_empty()))
        }
        Command::Render { depth, table } => {
            need(f, &[Format::Svg, Format::Json])?;
            let svg = if *table { render_table(*depth, None) } else { render_net(*depth, None) };
            Ok(Outcome { text: svg, passed: true })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not a failure of the command
            let _ = writeln!(std::io::stdout().lock(), "{}", out.text.trim_end());
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.code(), "message": e.to_string() } }));
            ExitCode::from(if e.is_bad_input() { 2 } else { 1 })
        }
    }
}
