//! Batch command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::debruijn::{build_colored_graph, export_dot, fixed_point_subgraph};
use crate::digitcore::BigCount;
use crate::error::{Error, ErrorKind, Result};
use crate::globaldyn::{
    characteristic_samples, decode, samples_csv, shift_group_report, table_report_json,
    transition_table, GlobalIndex,
};
use crate::lattice::{evolve, RingState, SpacetimeRaster};
use crate::realmap::{
    bifurcation_scan, classify_behavior, cycle_detect, parse_rational, scan_csv, InducedCa,
    MapSpec, Orbit, ScanConfig, Thresholds,
};
use crate::rulespace::{code_of_rule, shift_rule, Geometry, RuleArg};

/// Largest spacetime raster (rows x sites) the tool will render.
pub const MAX_RASTER_CELLS: u64 = 1 << 26;

#[derive(Parser, Debug)]
#[command(
    name = "cellarith",
    version,
    about = "Cellular-automaton arithmetic toolkit"
)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for the ChaCha8 generator behind `--ic random`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Initial condition: zero, single:<site>, digits:<msd-first> or random.
    #[arg(long, global = true)]
    pub ic: Option<IcSpec>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spacetime raster of a local rule on a ring.
    Evolve(EvolveArgs),
    /// Characteristic function samples as CSV.
    Charfn(RingArgs),
    /// Global transition table, Gardens of Eden and attractors as JSON.
    Table(RingArgs),
    /// De Bruijn graph of a rule in DOT format.
    Debruijn(DebruijnArgs),
    /// Decimal code of a shift rule.
    Shiftcode(ShiftArgs),
    /// Evolve the CA induced by a real map.
    Approx(ApproxArgs),
    /// Logistic parameter sweep as CSV.
    Bifurcate(BifurcateArgs),
    /// Group axioms of the shift operators.
    Grouptest(GroupArgs),
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Rule as l:r:p:code, l:r:p:[a0,...] or either with a trailing T for totalistic.
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub ns: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = RasterFormat::Pgm)]
    pub format: RasterFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RingArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub ns: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DebruijnArgs {
    #[arg(long)]
    pub rule: String,
    /// Keep only vertices whose output equals their center digit.
    #[arg(long)]
    pub fixed_points: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ShiftArgs {
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RasterFormat {
    Pgm,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKindArg {
    Logistic,
    Poly,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    #[arg(long, value_enum, default_value_t = MapKindArg::Logistic)]
    pub map: MapKindArg,
    /// Logistic parameter as a decimal or a/b.
    #[arg(long)]
    pub mu: Option<String>,
    /// Polynomial coefficients, lowest degree first, comma separated.
    #[arg(long)]
    pub coeffs: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 50)]
    pub ns: usize,
    /// Site holding the single 1 of the initial state (ignored with --ic).
    #[arg(long, default_value_t = 1)]
    pub seed_site: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = RasterFormat::Pgm)]
    pub format: RasterFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print transient, period and behavior class.
    #[arg(long)]
    pub report: bool,
    /// Step budget for the report's cycle search.
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: u64,
}

#[derive(Args, Debug)]
pub struct BifurcateArgs {
    #[arg(long)]
    pub mu_lo: String,
    #[arg(long)]
    pub mu_hi: String,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 50)]
    pub ns: usize,
    #[arg(long, default_value_t = 1)]
    pub seed_site: usize,
    #[arg(long, default_value_t = 1000)]
    pub transient: u64,
    #[arg(long, default_value_t = 1000)]
    pub sample: u64,
    /// Number of phi columns per row.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub p: u32,
    /// Ring size (default l + r + 1).
    #[arg(long)]
    pub ns: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IcSpec {
    Zero,
    Single(usize),
    Digits(String),
    Random,
}

impl FromStr for IcSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "zero" => Ok(IcSpec::Zero),
            None if s == "random" => Ok(IcSpec::Random),
            Some(("single", site)) => site
                .parse()
                .map(IcSpec::Single)
                .map_err(|_| Error::parse("initial condition", s)),
            Some(("digits", d)) if !d.is_empty() => Ok(IcSpec::Digits(d.to_string())),
            _ => Err(Error::parse("initial condition", s)),
        }
    }
}

impl IcSpec {
    pub fn build(&self, radix: u32, sites: usize, seed: Option<u64>) -> Result<RingState> {
        match self {
            IcSpec::Zero => RingState::zeros(radix, sites),
            IcSpec::Single(site) => RingState::single_seed(radix, sites, *site),
            IcSpec::Digits(d) => {
                let s = RingState::parse_msd(radix, d)?;
                if s.len() != sites {
                    return Err(Error::SizeMismatch {
                        expected: sites,
                        got: s.len(),
                    });
                }
                Ok(s)
            }
            IcSpec::Random => {
                let seed = seed.ok_or_else(|| {
                    Error::Parameter("a random initial condition needs --seed".into())
                })?;
                RingState::random(radix, sites, &mut ChaCha8Rng::seed_from_u64(seed))
            }
        }
    }
}

/// One finished output: a file target (or stdout) and its full contents.
struct Output {
    path: Option<PathBuf>,
    text: String,
}

fn raster_text(raster: &SpacetimeRaster, format: RasterFormat) -> String {
    match format {
        RasterFormat::Pgm => raster.to_pgm(),
        RasterFormat::Text => raster.to_text(),
    }
}

fn check_raster(rows: usize, sites: usize) -> Result<()> {
    let cells = (rows as u64 + 1).saturating_mul(sites as u64);
    if cells > MAX_RASTER_CELLS {
        return Err(Error::guard(
            format!("raster of {} x {sites} cells", rows + 1),
            MAX_RASTER_CELLS,
        ));
    }
    Ok(())
}

fn parse_rule(s: &str) -> Result<crate::rulespace::RuleSpec> {
    Ok(s.parse::<RuleArg>()?.to_rule())
}

fn build_map(args: &ApproxArgs) -> Result<MapSpec> {
    match args.map {
        MapKindArg::Logistic => {
            let mu = args
                .mu
                .as_deref()
                .ok_or_else(|| Error::Parameter("--map logistic needs --mu".into()))?;
            MapSpec::logistic_str(mu)
        }
        MapKindArg::Poly => {
            let coeffs = args
                .coeffs
                .as_deref()
                .ok_or_else(|| Error::Parameter("--map poly needs --coeffs".into()))?;
            let c = coeffs
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            MapSpec::polynomial(c)
        }
    }
}

fn run_approx(cli: &Cli, args: &ApproxArgs) -> Result<Vec<Output>> {
    let map = build_map(args)?;
    let ca = InducedCa::new(map, args.p, args.ns)?;
    check_raster(args.steps, args.ns)?;
    let start = match &cli.ic {
        Some(ic) => {
            let s = ic.build(args.p, args.ns, cli.seed)?;
            crate::globaldyn::encode(&s).index().as_biguint().clone()
        }
        None => ca.seed_index(args.seed_site)?,
    };
    let orbit = ca.orbit(&start, args.steps)?;
    let rows = orbit
        .iter()
        .map(|i| {
            let g = GlobalIndex::new(args.p, args.ns, BigCount::from(i.clone()))?;
            Ok(decode(&g))
        })
        .collect::<Result<Vec<_>>>()?;
    let raster = SpacetimeRaster::from_rows(args.p, rows)?;
    let mut outputs = Vec::new();
    if args.report {
        let found = cycle_detect(|s| ca.step(s), start, args.max_steps)?;
        let class = classify_behavior(&found, |s| ca.is_homogeneous(s), Thresholds::default());
        let text = match &found {
            Orbit::Resolved(r) => format!(
                "transient {}\nperiod {}\nbehavior {class}\n",
                r.transient, r.period
            ),
            Orbit::Unresolved { max_steps } => {
                format!("unresolved at {max_steps} steps\nbehavior {class}\n")
            }
        };
        outputs.push(Output { path: None, text });
    }
    outputs.insert(
        0,
        Output {
            path: args.out.clone(),
            text: raster_text(&raster, args.format),
        },
    );
    Ok(outputs)
}

fn run_bifurcate(args: &BifurcateArgs) -> Result<Vec<Output>> {
    if args.seed_site == 0 || args.seed_site > args.ns {
        return Err(Error::Parameter(format!(
            "seed site {} is outside [1, {}]",
            args.seed_site, args.ns
        )));
    }
    let cfg = ScanConfig {
        mu_lo: parse_rational(&args.mu_lo)?,
        mu_hi: parse_rational(&args.mu_hi)?,
        points: args.points,
        radix: args.p,
        sites: args.ns,
        initial: BigUint::from(args.p).pow(args.seed_site as u32 - 1),
        t_transient: args.transient,
        t_sample: args.sample,
        samples: args.samples,
    };
    let rows = bifurcation_scan(&cfg)?;
    Ok(vec![Output {
        path: args.out.clone(),
        text: scan_csv(&cfg, &rows),
    }])
}

fn execute(cli: &Cli) -> Result<Vec<Output>> {
    let single = |path: &Option<PathBuf>, text: String| {
        Ok(vec![Output {
            path: path.clone(),
            text,
        }])
    };
    match &cli.command {
        Command::Evolve(a) => {
            let rule = parse_rule(&a.rule)?;
            check_raster(a.steps, a.ns)?;
            let ic = cli.ic.clone().unwrap_or(IcSpec::Single(1));
            let s0 = ic.build(rule.radix(), a.ns, cli.seed)?;
            let raster = evolve(&rule, &s0, a.steps)?;
            single(&a.out, raster_text(&raster, a.format))
        }
        Command::Charfn(a) => {
            let rule = parse_rule(&a.rule)?;
            let samples = characteristic_samples(&rule, a.ns)?;
            single(&a.out, samples_csv(rule.radix(), a.ns, &samples))
        }
        Command::Table(a) => {
            let rule = parse_rule(&a.rule)?;
            let t = transition_table(&rule, a.ns)?;
            single(&a.out, table_report_json(&rule, &t))
        }
        Command::Debruijn(a) => {
            let rule = parse_rule(&a.rule)?;
            let graph = if a.fixed_points {
                fixed_point_subgraph(&rule)
            } else {
                build_colored_graph(&rule)
            };
            single(&a.out, export_dot(&graph))
        }
        Command::Shiftcode(a) => {
            let rule = shift_rule(Geometry::new(a.l, a.r, a.p)?, a.m)?;
            single(&None, format!("{}\n", code_of_rule(&rule)))
        }
        Command::Approx(a) => run_approx(cli, a),
        Command::Bifurcate(a) => run_bifurcate(a),
        Command::Grouptest(a) => {
            let g = Geometry::new(a.l, a.r, a.p)?;
            let report = shift_group_report(g, a.ns.unwrap_or(g.range()))?;
            single(&None, report.to_text())
        }
    }
}

/// Runs a parsed command. Every output is computed before any file is
/// written, so a failure leaves no partial files behind.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Parameter("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let outputs = pool.install(|| execute(cli))?;
    for out in outputs {
        match out.path {
            Some(path) => std::fs::write(&path, out.text.as_bytes())?,
            None => stdout.write_all(out.text.as_bytes())?,
        }
    }
    Ok(())
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Guard => 2,
        ErrorKind::Domain => 3,
    }
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}
