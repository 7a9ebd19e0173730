//! The `farsight` command line.
//!
//! Exit codes: 0 verdict true or success, 1 verdict false, 2 undecided or a
//! budget ran out, 3 input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use farsight_core::blocking::directly_dominates;
use farsight_core::dominance::{dominance_graph, indirectly_dominates, Relation};
use farsight_core::enumeration::{count_matchings, enumerate_ir_matchings, enumerate_matchings};
use farsight_core::stable_sets::{
    enumerate_dem, enumerate_fss, stable_matchings, Condition, Context, Pool, SearchOptions, SetError, Strategy,
    DEFAULT_SUBSET_BUDGET,
};
use farsight_core::{BlockMode, Diagnostic, DominanceVerdict, Market, Matching, Policy, StableSetReport, Verdict};
use serde::Serialize;

use crate::dot::export_dot;
use crate::fixtures::{self, Fixture, FIXTURES};
use crate::format::{parse_market, parse_matching_or_name, parse_set, serialize_market, serialize_matching};
use crate::random::{header, random_market, RandomParams};
use crate::report::{
    dominance_json, dominance_text, search_json, search_text, set_report_json, set_report_text, AnalyzeJson,
};
use crate::stats::{stats_csv, StatsConfig};

pub const EXIT_TRUE: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "farsight",
    version,
    about = "Stability and farsighted stable sets in matching markets with couples"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Largest matching space searched exhaustively when deciding dominance
    /// by a matching that is not individually rational.
    #[arg(long, global = true, env = "FARSIGHT_EXHAUSTIVE_CAP", default_value_t = Policy::default().exhaustive_cap)]
    pub exhaustive_cap: u128,

    /// Subsets examined by a set search before it gives up.
    #[arg(long, global = true, env = "FARSIGHT_SUBSET_BUDGET", default_value_t = DEFAULT_SUBSET_BUDGET)]
    pub subset_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Literal,
    Extended,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationArg {
    Direct,
    Indirect,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoolArg {
    Ir,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    Auto,
    Sweep,
    Kernel,
}

impl From<ModeArg> for BlockMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Literal => BlockMode::Literal,
            ModeArg::Extended => BlockMode::Extended,
        }
    }
}

impl From<RelationArg> for Relation {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::Direct => Relation::Direct,
            RelationArg::Indirect => Relation::Indirect,
        }
    }
}

impl From<PoolArg> for Pool {
    fn from(p: PoolArg) -> Self {
        match p {
            PoolArg::Ir => Pool::IndividuallyRational,
            PoolArg::All => Pool::All,
        }
    }
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Sweep => Strategy::Sweep,
            StrategyArg::Kernel => Strategy::Kernel,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Matching count, individually rational count and stable matchings.
    Analyze {
        /// A `.cm` file, or `@name` for a bundled fixture.
        market: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Extended)]
        block_mode: ModeArg,
    },
    /// Decides whether matching A dominates matching B.
    Dominates {
        market: String,
        /// Matching literal such as `{s1:h2, s2:h3}`, or a fixture name such as `mu4`.
        a: String,
        b: String,
        #[arg(long, value_enum, default_value_t = RelationArg::Indirect)]
        relation: RelationArg,
    },
    /// Verifies or searches for farsighted stable sets.
    Fss(SetArgs),
    /// Verifies or searches for DEM farsighted stable sets.
    Dem(SetArgs),
    /// Dominance graph over a pool of matchings.
    Graph {
        market: String,
        #[arg(long, value_enum, default_value_t = RelationArg::Direct)]
        relation: RelationArg,
        #[arg(long, value_enum, default_value_t = PoolArg::Ir)]
        pool: PoolArg,
    },
    /// Generates seeded random markets.
    Random {
        #[command(flatten)]
        params: RandomArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Write `market-<i>.cm` files here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Existence rates over seeded random markets, as CSV.
    Stats {
        /// Hospital counts; each combination of values is one row.
        #[arg(long, value_delimiter = ',', required = true)]
        hospitals: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        couples: Vec<usize>,
        /// Hospital list lengths; full lists when omitted.
        #[arg(long, value_delimiter = ',')]
        hospital_list_len: Vec<usize>,
        /// Couple list lengths; full lists when omitted.
        #[arg(long, value_delimiter = ',')]
        couple_list_len: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Largest DEM set searched for.
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Bundled example markets.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long)]
    pub hospitals: usize,
    #[arg(long)]
    pub couples: usize,
    /// Defaults to listing every student.
    #[arg(long)]
    pub hospital_list_len: Option<usize>,
    /// Defaults to listing every pair other than `(u,u)`.
    #[arg(long)]
    pub couple_list_len: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SetArgs {
    pub market: String,
    /// Set literal, e.g. `[mu1, mu2]` or `{mu1, mu2}` or `[{s1:h1}, {s3:h2}]`.
    #[arg(long, conflicts_with = "search", required_unless_present = "search")]
    pub verify: Option<String>,
    #[arg(long)]
    pub search: bool,
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Candidate pool; for DEM sets also where deviations are drawn from.
    #[arg(long, value_enum, default_value_t = PoolArg::Ir)]
    pub pool: PoolArg,
    /// Check cardinality-two subsets during a sweep instead of skipping them.
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    pub strategy: StrategyArg,
}

#[derive(Subcommand, Debug)]
pub enum FixtureAction {
    /// Names of the bundled markets and their named matchings.
    List,
    /// Prints a bundled market file.
    Show { name: String },
    /// Checks the documented facts about every bundled market.
    Check,
}

/// Runs the command line, writing to standard output and standard error.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> u8 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I: IntoIterator<Item = OsString>>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_TRUE };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(Output { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure { message, code }) => {
            let _ = err.write_all(message.as_bytes());
            code
        }
    }
}

pub struct Output {
    pub text: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: EXIT_INPUT,
        }
    }
}

fn set_failure(e: SetError) -> Failure {
    let code = match e {
        SetError::EmptySet => EXIT_INPUT,
        _ => EXIT_UNKNOWN,
    };
    Failure {
        message: format!("error: {e}\n"),
        code,
    }
}

/// A parsed market with the fixture it came from, if any.
pub struct Loaded {
    pub market: Market,
    pub source: String,
    pub fixture: Option<&'static Fixture>,
}

impl Loaded {
    fn matching(&self, text: &str) -> Result<Matching, Failure> {
        parse_matching_or_name(text, &self.market, &|n| self.named(n))
            .map_err(|d| Failure::input(render(&self.source_name(), &[d])))
    }

    fn set(&self, text: &str) -> Result<Vec<Matching>, Failure> {
        parse_set(text, &self.market, &|n| self.named(n)).map_err(|d| Failure::input(render(&self.source_name(), &[d])))
    }

    fn named(&self, name: &str) -> Option<Matching> {
        self.fixture.and_then(|f| f.matching(&self.market, name))
    }

    fn source_name(&self) -> String {
        self.source.clone()
    }
}

fn render(source: &str, diags: &[Diagnostic]) -> String {
    let mut s = String::new();
    for d in diags {
        writeln!(s, "{source}:{d}").unwrap();
    }
    s
}

pub fn load(arg: &str) -> Result<Loaded, Failure> {
    if let Some(name) = arg.strip_prefix('@') {
        let f =
            fixtures::find(name).ok_or_else(|| Failure::input(format!("error: no bundled fixture named {name}\n")))?;
        return Ok(Loaded {
            market: f.market(),
            source: arg.to_string(),
            fixture: Some(f),
        });
    }
    let text = fs::read_to_string(Path::new(arg)).map_err(|e| Failure::input(format!("error: {arg}: {e}\n")))?;
    let market = parse_market(&text).map_err(|d| Failure::input(render(arg, &d)))?;
    Ok(Loaded {
        market,
        source: arg.to_string(),
        fixture: None,
    })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn set_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => EXIT_TRUE,
        Verdict::Fails => EXIT_FALSE,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn verdict_exit(v: Option<bool>) -> u8 {
    match v {
        Some(true) => EXIT_TRUE,
        Some(false) => EXIT_FALSE,
        None => EXIT_UNKNOWN,
    }
}

fn no_dot(cli: &Cli, what: &str) -> Result<(), Failure> {
    if cli.format == OutputFormat::Dot {
        Err(Failure::input(format!(
            "error: {what} has no DOT output; use `graph`\n"
        )))
    } else {
        Ok(())
    }
}

fn policy(cli: &Cli) -> Policy {
    Policy {
        exhaustive_cap: cli.exhaustive_cap,
        ..Policy::default()
    }
}

pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Analyze { market, block_mode } => {
            no_dot(cli, "analyze")?;
            analyze(cli, &load(market)?, (*block_mode).into())
        }
        Command::Dominates { market, a, b, relation } => {
            no_dot(cli, "dominates")?;
            let l = load(market)?;
            let (a, b) = (l.matching(a)?, l.matching(b)?);
            let relation: Relation = (*relation).into();
            let v = match relation {
                Relation::Direct => {
                    if let Some(t) = directly_dominates(&l.market, &a, &b) {
                        let mut p = farsight_core::DominancePath::new(b.clone());
                        p.push(t, a.clone());
                        DominanceVerdict::Dominates(p)
                    } else {
                        DominanceVerdict::Refuted(None)
                    }
                }
                Relation::Indirect => indirectly_dominates(&l.market, &a, &b, &policy(cli)),
            };
            let text = match cli.format {
                OutputFormat::Json => json(&dominance_json(&l.market, relation, &a, &b, &v)),
                _ => dominance_text(&l.market, relation, &a, &b, &v),
            };
            Ok(Output {
                text,
                code: verdict_exit(v.holds()),
            })
        }
        Command::Fss(args) => sets(cli, args, Condition::Farsighted),
        Command::Dem(args) => sets(cli, args, Condition::Dem),
        Command::Graph { market, relation, pool } => {
            let l = load(market)?;
            let scope: Vec<Matching> = match Pool::from(*pool) {
                Pool::IndividuallyRational => enumerate_ir_matchings(&l.market).collect(),
                Pool::All => {
                    let n = count_matchings(&l.market);
                    if n > 4096 {
                        return Err(Failure {
                            message: format!("error: {n} matchings are too many to draw; use --pool ir\n"),
                            code: EXIT_UNKNOWN,
                        });
                    }
                    enumerate_matchings(&l.market).collect()
                }
            };
            let relation: Relation = (*relation).into();
            let g = dominance_graph(&l.market, &scope, relation, &policy(cli));
            let code = if g.unknown.is_empty() { EXIT_TRUE } else { EXIT_UNKNOWN };
            let text = match cli.format {
                OutputFormat::Json => {
                    #[derive(Serialize)]
                    struct GraphJson {
                        relation: &'static str,
                        nodes: Vec<String>,
                        edges: Vec<(usize, usize)>,
                        undecided: Vec<(usize, usize)>,
                    }
                    json(&GraphJson {
                        relation: crate::report::relation_word(relation),
                        nodes: g.nodes.iter().map(|m| serialize_matching(&l.market, m)).collect(),
                        edges: g.edges().collect(),
                        undecided: g.unknown.clone(),
                    })
                }
                _ => export_dot(&l.market, &g, relation),
            };
            Ok(Output { text, code })
        }
        Command::Random {
            params,
            seed,
            count,
            out,
        } => {
            no_dot(cli, "random")?;
            let p = RandomParams {
                hospitals: params.hospitals,
                couples: params.couples,
                hospital_list_len: params.hospital_list_len,
                couple_list_len: params.couple_list_len,
            };
            p.lengths().map_err(|e| Failure::input(format!("error: {e}\n")))?;
            let mut text = String::new();
            for i in 0..*count {
                let m = random_market(&p, *seed, i).expect("parameters checked");
                let file = format!("{}{}", header(&p, *seed, i), serialize_market(&m));
                match out {
                    Some(dir) => {
                        let path = dir.join(format!("market-{i}.cm"));
                        fs::create_dir_all(dir)
                            .and_then(|_| fs::write(&path, &file))
                            .map_err(|e| Failure::input(format!("error: {}: {e}\n", path.display())))?;
                        writeln!(text, "{}", path.display()).unwrap();
                    }
                    None => {
                        if i > 0 {
                            text.push('\n');
                        }
                        text.push_str(&file);
                    }
                }
            }
            Ok(Output { text, code: EXIT_TRUE })
        }
        Command::Stats {
            hospitals,
            couples,
            hospital_list_len,
            couple_list_len,
            seed,
            count,
            max_size,
            threads,
        } => {
            no_dot(cli, "stats")?;
            let opt = |v: &Vec<usize>| -> Vec<Option<usize>> {
                if v.is_empty() {
                    vec![None]
                } else {
                    v.iter().copied().map(Some).collect()
                }
            };
            let mut points = Vec::new();
            for &m in hospitals {
                for &n in couples {
                    for lh in opt(hospital_list_len) {
                        for lc in opt(couple_list_len) {
                            points.push(RandomParams {
                                hospitals: m,
                                couples: n,
                                hospital_list_len: lh,
                                couple_list_len: lc,
                            });
                        }
                    }
                }
            }
            let cfg = StatsConfig {
                seed: *seed,
                count: *count,
                policy: policy(cli),
                search: SearchOptions {
                    pool: Pool::IndividuallyRational,
                    max_size: Some(*max_size),
                    budget: cli.subset_budget,
                    ..SearchOptions::default()
                },
                threads: *threads,
            };
            let text = stats_csv(&points, &cfg).map_err(|e| Failure::input(format!("error: {e}\n")))?;
            Ok(Output { text, code: EXIT_TRUE })
        }
        Command::Fixtures { action } => fixtures_cmd(cli, action),
    }
}

fn analyze(cli: &Cli, l: &Loaded, mode: BlockMode) -> Result<Output, Failure> {
    let m = &l.market;
    let matchings = count_matchings(m);
    let ir = enumerate_ir_matchings(m).count();
    // Enumerating stable matchings walks the whole space.
    let stable: Vec<String> = stable_matchings(m, mode)
        .iter()
        .map(|x| serialize_matching(m, x))
        .collect();
    let j = AnalyzeJson {
        hospitals: m.hospital_count(),
        couples: m.couple_count(),
        matchings,
        individually_rational: ir,
        block_mode: match mode {
            BlockMode::Literal => "literal",
            BlockMode::Extended => "extended",
        },
        verdict: if stable.is_empty() { "false" } else { "true" },
        stable,
    };
    let text = match cli.format {
        OutputFormat::Json => json(&j),
        _ => {
            let mut s = String::new();
            writeln!(s, "hospitals: {}", j.hospitals).unwrap();
            writeln!(s, "couples: {}", j.couples).unwrap();
            writeln!(s, "matchings: {}", j.matchings).unwrap();
            writeln!(s, "individually rational: {}", j.individually_rational).unwrap();
            writeln!(s, "stable ({}): {}", j.block_mode, j.stable.len()).unwrap();
            for x in &j.stable {
                writeln!(s, "  {x}").unwrap();
            }
            s
        }
    };
    Ok(Output { text, code: EXIT_TRUE })
}

fn sets(cli: &Cli, args: &SetArgs, condition: Condition) -> Result<Output, Failure> {
    no_dot(cli, "a set query")?;
    let l = load(&args.market)?;
    let ctx = Context::new(&l.market, policy(cli)).map_err(set_failure)?;
    let pool: Pool = args.pool.into();
    if let Some(lit) = &args.verify {
        let set = l.set(lit)?;
        let (report, universe): (StableSetReport, Option<Pool>) = match condition {
            Condition::Farsighted => (
                farsight_core::stable_sets::verify_fss(&ctx, &set).map_err(set_failure)?,
                None,
            ),
            Condition::Dem => (
                farsight_core::stable_sets::verify_dem(&ctx, &set, pool, true).map_err(set_failure)?,
                Some(pool),
            ),
        };
        let text = match cli.format {
            OutputFormat::Json => json(&set_report_json(&l.market, &report, universe)),
            _ => set_report_text(&l.market, &report),
        };
        return Ok(Output {
            text,
            code: set_exit(report.verdict),
        });
    }
    let opts = SearchOptions {
        pool,
        max_size: args.max_size,
        prune_pairs: !args.no_prune,
        budget: cli.subset_budget,
        strategy: args.strategy.into(),
    };
    let found = match condition {
        Condition::Farsighted => enumerate_fss(&ctx, &opts),
        Condition::Dem => enumerate_dem(&ctx, &opts),
    }
    .map_err(set_failure)?;
    let j = search_json(&l.market, condition, pool, args.max_size, &found);
    let text = match cli.format {
        OutputFormat::Json => json(&j),
        _ => search_text(&j),
    };
    Ok(Output {
        text,
        code: if found.complete { EXIT_TRUE } else { EXIT_UNKNOWN },
    })
}

fn fixtures_cmd(cli: &Cli, action: &FixtureAction) -> Result<Output, Failure> {
    match action {
        FixtureAction::List => {
            let mut s = String::new();
            for f in FIXTURES {
                let names: Vec<&str> = f.matchings.iter().map(|(n, _)| *n).collect();
                writeln!(s, "{}: {}", f.name, names.join(" ")).unwrap();
            }
            Ok(Output {
                text: s,
                code: EXIT_TRUE,
            })
        }
        FixtureAction::Show { name } => {
            let f = fixtures::find(name)
                .ok_or_else(|| Failure::input(format!("error: no bundled fixture named {name}\n")))?;
            let mut s = f.source.to_string();
            let market = f.market();
            s.push('\n');
            for (n, m) in f.named(&market) {
                writeln!(s, "# {n} = {}", serialize_matching(&market, &m)).unwrap();
            }
            Ok(Output {
                text: s,
                code: EXIT_TRUE,
            })
        }
        FixtureAction::Check => {
            let results = fixtures::check_all(&policy(cli));
            let mut s = String::new();
            let mut ok = true;
            for (name, pass) in &results {
                ok &= *pass;
                writeln!(s, "{} {name}", if *pass { "PASS" } else { "FAIL" }).unwrap();
            }
            Ok(Output {
                text: s,
                code: if ok { EXIT_TRUE } else { EXIT_FALSE },
            })
        }
    }
}
