use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fogran::agnostic::{
    agnostic_shared_point, agnostic_sidelink_point, variance_partition, AgnosticOptions, Evaluation, OverflowPolicy,
    SidelinkVariant, TopologyDistribution, DEFAULT_EXHAUSTIVE_CAP,
};
use fogran::codec::{simulate, DEFAULT_SYMBOLS_PER_PIECE};
use fogran::converse::{converse_system, region_corners};
use fogran::delivery::plan;
use fogran::figures::{figure, FigureId};
use fogran::oracle::{gap_report, grid, worst_case_auto, worst_case_demand, DemandSpace, DEFAULT_DEMAND_CAP};
use fogran::partition::Partition;
use fogran::region::{achievable_points, slice, Family};
use fogran::scheme::{Approach, Scheme};
use fogran::scheme_asym::{asym_scheme, asym_shared_point, asym_sidelink_point, PartitionStrategy};
use fogran::scheme_sym::{sym_shared_point, sym_sidelink_point, SymSchemeParams};
use fogran::{DemandVector, Error, MemoryLoadPoint, Rational, Topology};

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Memory-load tradeoffs for cache-aided fog radio access networks.
#[derive(Parser)]
#[command(name = "fogran", version)]
struct Cli {
    /// Output format; curves default to CSV, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Sym,
    Asym,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    Shared,
    Sidelink,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Auto,
    Raw,
    Compressed,
}

#[derive(Subcommand)]
enum Command {
    /// Outer bound at one cache size: inequalities and corner points.
    Region {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long = "M")]
        m: Rational,
        /// Also report the achievable frontier of this family.
        #[arg(long, value_enum)]
        achievable: Option<FamilyArg>,
    },
    /// Worst-case point of one scheme.
    Scheme {
        #[arg(long)]
        topology: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Downlink-only or sidelink point; ignored when `--approach` is given.
        #[arg(long, value_enum, default_value = "shared")]
        class: Class,
    },
    /// Explicit delivery messages for one demand.
    Plan {
        #[arg(long)]
        topology: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Comma-separated 1-based file indices, one per user.
        #[arg(long)]
        demand: String,
    },
    /// Bit-exact GF(256) run of placement and delivery.
    Simulate {
        #[arg(long)]
        topology: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        demand: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// File length in symbols; a multiple of the sub-pieces per file.
        #[arg(long = "B")]
        b: Option<usize>,
    },
    /// Expected loads when the occupancies are random.
    Agnostic {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long = "G")]
        g: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "shared")]
        class: Class,
        /// Groups separated by `|`, 1-based members by `,`; defaults to the least-variance partition.
        #[arg(long)]
        partition: Option<String>,
        /// Monte Carlo sample count; exhaustive summation when absent.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest joint support summed exhaustively.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        cap: u64,
        /// Drop realizations with more users than files and renormalize.
        #[arg(long)]
        truncate: bool,
        /// Use the unclipped count in the sidelink bracket term.
        #[arg(long)]
        unprimed: bool,
    },
    /// Brute-force worst case over demands, compared with the closed form.
    Verify {
        #[arg(long)]
        topology: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = DEFAULT_DEMAND_CAP)]
        cap: u128,
        #[arg(long, value_enum, default_value = "auto")]
        space: SpaceArg,
        /// Also simulate the worst-case demand.
        #[arg(long)]
        simulate: bool,
    },
    /// Achievable-to-converse ratios on a grid of cache sizes.
    Gaps {
        #[arg(long)]
        topology: PathBuf,
        /// `lo:hi:step`; `hi` may be `N`.
        #[arg(long)]
        grid: String,
    },
    /// Curve data of a reference figure.
    Figure {
        #[arg(long, value_parser = ["2", "3a", "3b", "5a", "5b", "6", "7a", "7b"])]
        id: String,
    },
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long, value_enum, default_value = "sym")]
    family: FamilyArg,
    #[arg(long)]
    t: usize,
    /// Number of groups (grouped family).
    #[arg(long = "G")]
    g: Option<usize>,
    #[arg(long)]
    partition: Option<String>,
    /// shared1, shared2, side1, side2 or side-direct.
    #[arg(long)]
    approach: Option<Approach>,
    /// Search a heuristic pool instead of all partitions.
    #[arg(long)]
    heuristic: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Mismatch(_) | Error::DecodeFailure { .. } => EXIT_VERIFY,
            _ => EXIT_DOMAIN,
        };
        Failure { code, message: e.to_string() }
    }
}

fn domain(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_DOMAIN, message: message.into() }
}

fn verify_failure(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_VERIFY, message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Rendered result plus whether it reports a failed check.
struct Output {
    text: String,
    failed: Option<String>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_topology(path: &Path) -> CliResult<Topology> {
    Ok(Topology::from_json_str(&read(path)?)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn point_json(p: &MemoryLoadPoint) -> Value {
    json!({ "M": p.m, "R_mbs": p.r_mbs, "R_sbs": p.r_sbs })
}

fn point_csv(p: &MemoryLoadPoint) -> String {
    format!("M,R_mbs,R_sbs\n{},{},{}\n", p.m.to_decimal(), p.r_mbs.to_decimal(), p.r_sbs.to_decimal())
}

fn strategy(args: &SchemeArgs, topology: &Topology) -> CliResult<PartitionStrategy> {
    Ok(match &args.partition {
        Some(lit) => PartitionStrategy::Given(Partition::parse(lit, topology)?),
        None if args.heuristic => PartitionStrategy::Heuristic,
        None => PartitionStrategy::ExhaustiveMin,
    })
}

fn group_count(args: &SchemeArgs, topology: &Topology) -> CliResult<usize> {
    match (&args.partition, args.g) {
        (Some(lit), g) => {
            let p = Partition::parse(lit, topology)?;
            if g.is_some_and(|g| g != p.g()) {
                return Err(domain(format!("--G {} disagrees with a {}-way partition", g.unwrap(), p.g())));
            }
            Ok(p.g())
        }
        (None, Some(g)) => Ok(g),
        (None, None) => Ok(topology.h()),
    }
}

/// Builds the scheme named by the flags; an approach is required.
fn build_scheme(args: &SchemeArgs, topology: &Topology) -> CliResult<Scheme> {
    let approach = args.approach.ok_or_else(|| domain("--approach is required"))?;
    match args.family {
        FamilyArg::Sym => {
            if args.partition.is_some() || args.g.is_some() {
                return Err(domain("--G and --partition need --family asym"));
            }
            Ok(Scheme::symmetric(topology, args.t, approach)?)
        }
        FamilyArg::Asym => {
            let g = group_count(args, topology)?;
            let strat = strategy(args, topology)?;
            let best = if approach.is_sidelink() {
                asym_sidelink_point(topology, g, args.t, &strat)?
            } else {
                asym_shared_point(topology, g, args.t, &strat)?
            };
            Ok(asym_scheme(topology, best.partition, args.t, approach)?)
        }
    }
}

fn run_region(topology: &Topology, m: &Rational, achievable: Option<FamilyArg>, format: Format) -> CliResult<Output> {
    let system = converse_system(topology, m)?;
    let corners = region_corners(&system)?;
    let frontier = match achievable {
        None => None,
        Some(f) => {
            let family = if f == FamilyArg::Sym { Family::Sym } else { Family::Asym };
            let points = achievable_points(topology, family)?;
            Some(slice(&points, m).map(|f| f.vertices).unwrap_or_default())
        }
    };
    let text = match format {
        Format::Csv => {
            let mut s = String::from("R_sbs,R_mbs\n");
            for (rs, rm) in &corners {
                s.push_str(&format!("{},{}\n", rs.to_decimal(), rm.to_decimal()));
            }
            s
        }
        Format::Json => {
            let mut v = json!({ "M": m, "inequalities": system.inequalities, "corners": corners });
            if let Some(f) = frontier {
                v["achievable"] = json!(f);
            }
            pretty(&v)
        }
    };
    Ok(Output { text, failed: None })
}

fn run_scheme(topology: &Topology, args: &SchemeArgs, class: Class, format: Format) -> CliResult<Output> {
    let (point, partition) = if args.approach.is_some() {
        let s = build_scheme(args, topology)?;
        let (r_mbs, r_sbs) = s.worst_case_loads(topology);
        (MemoryLoadPoint::new(s.memory(topology), r_mbs, r_sbs), Some(s.partition.to_string()))
    } else {
        match args.family {
            FamilyArg::Sym => {
                let params = SymSchemeParams::new(topology, args.t)?;
                let p = match class {
                    Class::Shared => sym_shared_point(&params),
                    Class::Sidelink => sym_sidelink_point(&params)?,
                };
                (p, None)
            }
            FamilyArg::Asym => {
                let g = group_count(args, topology)?;
                let strat = strategy(args, topology)?;
                let p = match class {
                    Class::Shared => asym_shared_point(topology, g, args.t, &strat)?,
                    Class::Sidelink => asym_sidelink_point(topology, g, args.t, &strat)?,
                };
                (p.point, Some(p.partition.to_string()))
            }
        }
    };
    let text = match format {
        Format::Csv => point_csv(&point),
        Format::Json => {
            let mut v = point_json(&point);
            if let Some(p) = partition {
                v["partition"] = json!(p);
            }
            pretty(&v)
        }
    };
    Ok(Output { text, failed: None })
}

fn run_plan(topology: &Topology, args: &SchemeArgs, demand: &str, format: Format) -> CliResult<Output> {
    let scheme = build_scheme(args, topology)?;
    let d = DemandVector::parse(topology, demand)?;
    let p = plan(topology, &scheme, &d)?;
    let text = match format {
        Format::Json => pretty(&p.to_json()),
        Format::Csv => {
            let mut s = String::from("step,source,size,payload\n");
            for (step, msgs) in [(1, &p.step1), (2, &p.step2)] {
                for m in msgs {
                    let payload = serde_json::to_string(&m.payload).expect("serializable").replace('"', "'");
                    s.push_str(&format!("{step},{},{},\"{payload}\"\n", m.source, p.size(m).to_decimal()));
                }
            }
            s
        }
    };
    Ok(Output { text, failed: None })
}

fn symbols_per_piece(scheme: &Scheme, b: Option<usize>) -> CliResult<usize> {
    let units = scheme.units_per_file() as usize;
    match b {
        None => Ok(DEFAULT_SYMBOLS_PER_PIECE),
        Some(b) if b > 0 && b % units == 0 => Ok(b / units),
        Some(b) => Err(domain(format!("B = {b} is not a positive multiple of the {units} sub-pieces per file"))),
    }
}

fn run_simulate(
    topology: &Topology,
    args: &SchemeArgs,
    demand: &str,
    seed: u64,
    b: Option<usize>,
    format: Format,
) -> CliResult<Output> {
    let scheme = build_scheme(args, topology)?;
    let d = DemandVector::parse(topology, demand)?;
    let c = symbols_per_piece(&scheme, b)?;
    let p = plan(topology, &scheme, &d)?;
    let tr = simulate(topology, &scheme, &d, seed, c)?;
    let mut failed = None;
    if tr.decoded.iter().any(|ok| !ok) {
        failed = Some("some users did not decode".to_string());
    } else if (tr.r_mbs.clone(), tr.r_sbs.clone()) != (p.r_mbs(), p.r_sbs()) {
        failed = Some(format!(
            "measured ({}, {}) differs from plan ({}, {})",
            tr.r_mbs,
            tr.r_sbs,
            p.r_mbs(),
            p.r_sbs()
        ));
    }
    let text = match format {
        Format::Json => {
            let mut v = serde_json::to_value(&tr).expect("serializable");
            v["measured_loads"] = json!({ "R_mbs": tr.r_mbs, "R_sbs": tr.r_sbs });
            v["planned_loads"] = json!({ "R_mbs": p.r_mbs(), "R_sbs": p.r_sbs() });
            pretty(&v)
        }
        Format::Csv => {
            let mut s = String::from("user,decoded\n");
            for (k, ok) in tr.decoded.iter().enumerate() {
                s.push_str(&format!("{},{ok}\n", k + 1));
            }
            s
        }
    };
    Ok(Output { text, failed })
}

#[allow(clippy::too_many_arguments)]
fn run_agnostic(
    dist_path: &Path,
    g: usize,
    t: usize,
    n: usize,
    class: Class,
    partition: Option<&str>,
    mc: Option<usize>,
    seed: u64,
    cap: u64,
    truncate: bool,
    unprimed: bool,
    format: Format,
) -> CliResult<Output> {
    let dist = TopologyDistribution::from_json_str(&read(dist_path)?)?;
    let phi = match partition {
        Some(lit) => {
            let p = Partition::parse_weighted(lit, &vec![0; dist.h()])?;
            if p.g() != g {
                return Err(domain(format!("--G {g} disagrees with a {}-way partition", p.g())));
            }
            p
        }
        None => variance_partition(&dist, g)?,
    };
    let eval = match mc {
        Some(samples) => Evaluation::MonteCarlo { samples, seed },
        None => Evaluation::Exhaustive { cap },
    };
    let mut opts = AgnosticOptions::new(eval);
    if truncate {
        opts.overflow = OverflowPolicy::Truncate;
    }
    if unprimed {
        opts.variant = SidelinkVariant::Unprimed;
    }
    let p = match class {
        Class::Shared => agnostic_shared_point(&dist, &phi, t, n, &opts)?,
        Class::Sidelink => agnostic_sidelink_point(&dist, &phi, t, n, &opts)?,
    };
    let text = match format {
        Format::Json => {
            let mut v = serde_json::to_value(&p).expect("serializable");
            v["partition"] = json!(phi.to_string());
            pretty(&v)
        }
        Format::Csv => format!(
            "M,R_mbs,R_mbs_std_err,R_sbs,R_sbs_std_err\n{},{},{},{},{}\n",
            p.m.to_decimal(),
            p.r_mbs.value,
            p.r_mbs.std_err,
            p.r_sbs.value,
            p.r_sbs.std_err
        ),
    };
    Ok(Output { text, failed: None })
}

fn run_verify(
    topology: &Topology,
    args: &SchemeArgs,
    cap: u128,
    space: SpaceArg,
    also_simulate: bool,
    format: Format,
) -> CliResult<Output> {
    let scheme = build_scheme(args, topology)?;
    let worst = match space {
        SpaceArg::Auto => worst_case_auto(topology, &scheme, cap)?,
        SpaceArg::Raw => worst_case_demand(topology, &scheme, DemandSpace::Raw, cap)?,
        SpaceArg::Compressed => worst_case_demand(topology, &scheme, DemandSpace::Compressed, cap)?,
    };
    let (f_mbs, f_sbs) = scheme.worst_case_loads(topology);
    let mut failed = None;
    if (worst.r_mbs.clone(), worst.r_sbs.clone()) != (f_mbs.clone(), f_sbs.clone()) {
        failed = Some(format!(
            "searched worst case ({}, {}) differs from closed form ({f_mbs}, {f_sbs})",
            worst.r_mbs, worst.r_sbs
        ));
    }
    let mut simulated = Value::Null;
    if also_simulate {
        let d = DemandVector::new(topology, worst.demand.clone())?;
        let p = plan(topology, &scheme, &d)?;
        let tr = simulate(topology, &scheme, &d, 0, 1)?;
        let ok = tr.decoded.iter().all(|&x| x) && tr.r_mbs == p.r_mbs() && tr.r_sbs == p.r_sbs();
        if !ok && failed.is_none() {
            failed = Some("simulation of the worst-case demand disagrees with its plan".into());
        }
        simulated = json!({ "R_mbs": tr.r_mbs, "R_sbs": tr.r_sbs, "all_decoded": tr.decoded.iter().all(|&x| x) });
    }
    let text = match format {
        Format::Json => pretty(&json!({
            "worst_case": worst,
            "closed_form": { "R_mbs": f_mbs, "R_sbs": f_sbs },
            "simulated": simulated,
            "equal": failed.is_none(),
        })),
        Format::Csv => format!(
            "R_mbs_searched,R_sbs_searched,R_mbs_formula,R_sbs_formula,equal\n{},{},{},{},{}\n",
            worst.r_mbs.to_decimal(),
            worst.r_sbs.to_decimal(),
            f_mbs.to_decimal(),
            f_sbs.to_decimal(),
            failed.is_none()
        ),
    };
    Ok(Output { text, failed })
}

fn parse_grid(text: &str, topology: &Topology) -> CliResult<Vec<Rational>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(domain(format!("grid {text:?} is not lo:hi:step")));
    };
    let num = |s: &str| -> CliResult<Rational> {
        if s.eq_ignore_ascii_case("n") {
            Ok(Rational::from(topology.n()))
        } else {
            s.parse::<Rational>().map_err(Failure::from)
        }
    };
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    let span = &hi - &lo;
    Ok(grid(&span, &step)?.into_iter().map(|m| m + &lo).collect())
}

fn run_gaps(topology: &Topology, grid_text: &str, format: Format) -> CliResult<Output> {
    let ms = parse_grid(grid_text, topology)?;
    let rows = gap_report(topology, &ms)?;
    let violations = rows.iter().filter(|r| !r.holds).count();
    let text = match format {
        Format::Json => pretty(&json!({ "rows": rows, "violations": violations })),
        Format::Csv => {
            let mut s = String::from("M,kind,corner_R_sbs,corner_R_mbs,ratio,bound,holds\n");
            for r in &rows {
                let kind = serde_json::to_value(r.kind).expect("serializable");
                let kind = match kind {
                    Value::String(k) => k,
                    other => other.to_string().replace(',', ";").replace('"', ""),
                };
                s.push_str(&format!(
                    "{},{kind},{},{},{},{},{}\n",
                    r.m.to_decimal(),
                    r.corner.0.to_decimal(),
                    r.corner.1.to_decimal(),
                    r.ratio.as_ref().map(|x| x.to_decimal()).unwrap_or_default(),
                    r.bound.to_decimal(),
                    r.holds
                ));
            }
            s
        }
    };
    let failed = (violations > 0).then(|| format!("{violations} gap rows exceed their bound"));
    Ok(Output { text, failed })
}

fn run_figure(id: &str, format: Format) -> CliResult<Output> {
    let id: FigureId = id.parse()?;
    let fig = figure(id)?;
    let text = match format {
        Format::Csv => fig.to_csv(),
        Format::Json => {
            let rows: Vec<Value> = fig
                .rows
                .iter()
                .map(|(x, vals)| {
                    let mut row = serde_json::Map::new();
                    row.insert(fig.x_label.clone(), json!(x));
                    for (label, v) in fig.labels.iter().zip(vals) {
                        row.insert(label.clone(), json!(v));
                    }
                    Value::Object(row)
                })
                .collect();
            pretty(&json!({ "figure": id.to_string(), "rows": rows }))
        }
    };
    Ok(Output { text, failed: None })
}

fn run(cli: Cli) -> CliResult<Output> {
    let json_default = cli.format.unwrap_or(Format::Json);
    match cli.command {
        Command::Region { topology, m, achievable } => run_region(&load_topology(&topology)?, &m, achievable, json_default),
        Command::Scheme { topology, scheme, class } => run_scheme(&load_topology(&topology)?, &scheme, class, json_default),
        Command::Plan { topology, scheme, demand } => run_plan(&load_topology(&topology)?, &scheme, &demand, json_default),
        Command::Simulate { topology, scheme, demand, seed, b } => {
            run_simulate(&load_topology(&topology)?, &scheme, &demand, seed, b, json_default)
        }
        Command::Agnostic { dist, g, t, n, class, partition, mc, seed, cap, truncate, unprimed } => run_agnostic(
            &dist,
            g,
            t,
            n,
            class,
            partition.as_deref(),
            mc,
            seed,
            cap,
            truncate,
            unprimed,
            json_default,
        ),
        Command::Verify { topology, scheme, cap, space, simulate } => {
            run_verify(&load_topology(&topology)?, &scheme, cap, space, simulate, json_default)
        }
        Command::Gaps { topology, grid } => run_gaps(&load_topology(&topology)?, &grid, json_default),
        Command::Figure { id } => run_figure(&id, cli.format.unwrap_or(Format::Csv)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            match out.failed {
                Some(msg) => {
                    eprintln!("error: {}", verify_failure(msg).message);
                    ExitCode::from(EXIT_VERIFY)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
