//! Command-line front end. [`run`] does all the work and returns the exit
//! code together with the text to print, so it can be tested directly.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use powgroup::grigorchuk::{solve_grigorchuk_report, DEFAULT_ORDER_CAP_EXPONENT};
use powgroup::hardness::{
    cnf_to_a5_wreath_with_primes, cnf_to_free_wreath_with_primes, first_primes, Cnf,
};
use powgroup::oracle::{brute_solve_free, differential, generate_nth, InstanceGroup, InstanceSpec};
use powgroup::rewrite_t::normalize_traced;
use powgroup::shorten::{solve_free_report, FreeOptions, DEFAULT_EXPAND_CAP};
use powgroup::wreath::{solve_wreath_on, BaseGroup, FreeBackend, WreathOptions};
use powgroup::{Error, ParseError, PowerWord};

pub const EXIT_IDENTITY: i32 = 0;
pub const EXIT_NON_IDENTITY: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// `free:<r>`, `wreath:<base>` or `grigorchuk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSelector {
    Free(u32),
    Wreath(BaseGroup),
    Grigorchuk,
}

impl FromStr for GroupSelector {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::GroupSelector(s.to_string());
        if s == "grigorchuk" {
            return Ok(GroupSelector::Grigorchuk);
        }
        match s.split_once(':') {
            Some(("free", r)) => {
                let r: u32 = r.parse().map_err(|_| bad())?;
                if r == 0 || r > FreeBackend::MAX_RANK {
                    return Err(bad());
                }
                Ok(GroupSelector::Free(r))
            }
            Some(("wreath", base)) => base.parse().map(GroupSelector::Wreath).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for GroupSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupSelector::Free(r) => write!(f, "free:{r}"),
            GroupSelector::Wreath(b) => write!(f, "wreath:{b}"),
            GroupSelector::Grigorchuk => write!(f, "grigorchuk"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "powgroup", version, about = "Power word problem solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// free:<r> | wreath:<base> | grigorchuk
    #[arg(long, default_value = "free:2")]
    pub group: String,
    /// Largest literal expansion allowed.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    /// Print every rewriting step (free groups).
    #[arg(long)]
    pub trace: bool,
    /// Most points a periodic membership check may visit.
    #[arg(long)]
    pub membership_cap: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a power word is the identity.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Power word; read from --file or standard input if absent.
        word: Option<String>,
        #[arg(long)]
        file: Option<String>,
    },
    /// Turn a DIMACS CNF into a power word that is trivial iff it is unsatisfiable.
    GenHard {
        #[command(flatten)]
        common: Common,
        /// DIMACS file; standard input if absent.
        file: Option<String>,
        /// Replace the first primes, e.g. 2,3,5.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Compare the solvers with brute force on random instances.
    Fuzz {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        count: u64,
    },
    /// Time solve_free against brute force for growing exponents.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        per_size: u64,
    },
    /// Print the rewriting steps of a free-group power word.
    Trace {
        #[command(flatten)]
        common: Common,
        word: Option<String>,
        #[arg(long)]
        file: Option<String>,
    },
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::MembershipCapExceeded { .. } => "membership-cap",
        Error::OrderCapExceeded { .. } => "order-cap",
        Error::CapExceeded { .. }
        | Error::ZeroShiftOverflow { .. }
        | Error::StepBudgetExceeded { .. }
        | Error::TooManyVariables { .. } => "cap",
        Error::InvalidApplication { .. } | Error::IncompatibleCut { .. } => "internal",
    }
}

fn error_output(e: &Error) -> (i32, String) {
    let v = json!({ "error": error_kind(e), "detail": e.to_string() });
    (EXIT_ERROR, format!("{v}\n"))
}

fn read_input(word: Option<String>, file: Option<String>, stdin: &str) -> Result<String, Error> {
    match (word, file) {
        (Some(w), _) => Ok(w),
        (None, Some(path)) => std::fs::read_to_string(&path).map_err(|e| {
            Error::Parse(ParseError::Dimacs {
                line: 0,
                message: format!("cannot read {path}: {e}"),
            })
        }),
        (None, None) => Ok(stdin.to_string()),
    }
}

fn verdict_text(identity: bool) -> &'static str {
    if identity {
        "identity"
    } else {
        "non-identity"
    }
}

fn verdict_code(identity: bool) -> i32 {
    if identity {
        EXIT_IDENTITY
    } else {
        EXIT_NON_IDENTITY
    }
}

fn solve(common: &Common, text: &str, force_trace: bool) -> Result<(i32, String), Error> {
    let group: GroupSelector = common.group.parse()?;
    let v = PowerWord::parse(text)?;
    let mut out = String::new();
    let (identity, stats) = match &group {
        GroupSelector::Free(r) => {
            if let Some(l) = v.letters().find(|l| l.generator() >= *r) {
                return Err(ParseError::LetterOutOfRange {
                    letter: l.to_char(),
                    group: group.to_string(),
                }
                .into());
            }
            let opts = FreeOptions {
                expand_cap: common.cap.unwrap_or(DEFAULT_EXPAND_CAP),
                threshold: None,
            };
            let report = solve_free_report(&v, &opts)?;
            let trace = common.trace || force_trace;
            let n = normalize_traced(&report.shortened, |ev| {
                if trace {
                    let _ = writeln!(out, "{ev}");
                }
            })?;
            let stats = json!({
                "periods": report.periods,
                "expanded_length": report.expanded_length.to_string(),
                "final_check": report.final_check,
                "steps": n.steps,
            });
            (report.identity, stats)
        }
        GroupSelector::Wreath(base) => {
            let opts = WreathOptions {
                membership_cap: common.membership_cap.unwrap_or(WreathOptions::default().membership_cap),
            };
            let r = solve_wreath_on(&v, base, &opts)?;
            let stats = json!({
                "shift_rejected": r.shift_rejected,
                "points_checked": r.points_checked,
                "gaps": r.gaps,
                "membership_points": r.membership_points,
            });
            (r.identity, stats)
        }
        GroupSelector::Grigorchuk => {
            let cap = common.cap.unwrap_or(powgroup::grigorchuk::DEFAULT_EXPAND_CAP);
            let r = solve_grigorchuk_report(&v, DEFAULT_ORDER_CAP_EXPONENT, cap)?;
            let orders: Vec<String> = r.orders.iter().map(ToString::to_string).collect();
            let stats = json!({
                "orders": orders,
                "expanded_length": r.expanded_length,
            });
            (r.identity, stats)
        }
    };
    if common.json {
        let v = json!({
            "verdict": verdict_text(identity),
            "group": group.to_string(),
            "stats": stats,
        });
        let _ = writeln!(out, "{v}");
    } else {
        let _ = writeln!(out, "{}", verdict_text(identity));
    }
    Ok((verdict_code(identity), out))
}

fn gen_hard(common: &Common, text: &str, primes: Option<Vec<u64>>) -> Result<(i32, String), Error> {
    let cnf = Cnf::parse_dimacs(text)?;
    let primes = primes.unwrap_or_else(|| first_primes(cnf.vars()).0);
    if primes.len() < cnf.vars() {
        return Err(ParseError::Dimacs {
            line: 0,
            message: format!("{} primes given for {} variables", primes.len(), cnf.vars()),
        }
        .into());
    }
    let group: GroupSelector = common.group.parse()?;
    let word = match group {
        GroupSelector::Wreath(BaseGroup::A5) => cnf_to_a5_wreath_with_primes(&cnf, &primes),
        GroupSelector::Wreath(BaseGroup::Free(_)) | GroupSelector::Free(_) => {
            cnf_to_free_wreath_with_primes(&cnf, &primes)
        }
        _ => return Err(ParseError::GroupSelector(common.group.clone()).into()),
    };
    Ok((0, format!("{word}\n")))
}

fn instance_group(g: &GroupSelector) -> (InstanceGroup, u32) {
    match g {
        GroupSelector::Free(r) => (InstanceGroup::Free, *r),
        GroupSelector::Wreath(b) => (InstanceGroup::Wreath(b.clone()), 2),
        GroupSelector::Grigorchuk => (InstanceGroup::Grigorchuk, 4),
    }
}

fn fuzz(common: &Common, count: u64) -> Result<(i32, String), Error> {
    let group: GroupSelector = common.group.parse()?;
    let (ig, rank) = instance_group(&group);
    let spec = InstanceSpec {
        group: ig.clone(),
        rank,
        seed: common.seed,
        max_exponent: BigInt::from(if matches!(ig, InstanceGroup::Free) { 64 } else { 16 }),
        ..InstanceSpec::default()
    };
    let cap = common.cap.unwrap_or(powgroup::oracle::DEFAULT_CAP);
    let mut identities = 0;
    let mut skipped = 0;
    for i in 0..count {
        let inst = generate_nth(&spec, i);
        let v = differential(&ig, &inst.word, cap)?;
        if !v.agree() {
            let msg = format!(
                "disagreement on instance {i}: {}\nsolver {} symbolic {:?} brute {:?}\n",
                inst.word, v.solver, v.symbolic, v.brute
            );
            return Ok((EXIT_NON_IDENTITY, msg));
        }
        identities += v.solver as u64;
        skipped += v.brute.is_none() as u64;
    }
    Ok((
        0,
        format!("{count} instances over {group}: {identities} identities, {skipped} beyond the brute-force cap, all agree\n"),
    ))
}

pub const BENCH_BITS: [u32; 5] = [8, 16, 64, 256, 1024];

/// The instances timed by `bench`, grouped by exponent bit length.
pub fn bench_instances(seed: u64, per_size: u64) -> Vec<(u32, Vec<PowerWord>)> {
    BENCH_BITS
        .iter()
        .map(|&bits| {
            let spec = InstanceSpec {
                group: InstanceGroup::Free,
                rank: 2,
                max_factors: 6,
                max_period_len: 4,
                max_exponent: (BigInt::one() << bits) - 1,
                identity_fraction: 0.5,
                seed: seed ^ u64::from(bits),
            };
            (bits, (0..per_size).map(|i| generate_nth(&spec, i).word).collect())
        })
        .collect()
}

fn bench(common: &Common, per_size: u64) -> Result<(i32, String), Error> {
    let cap = common.cap.unwrap_or(powgroup::oracle::DEFAULT_CAP);
    let mut rows = Vec::new();
    for (bits, words) in bench_instances(common.seed, per_size) {
        let start = Instant::now();
        for v in &words {
            solve_free_report(v, &FreeOptions::default())?;
        }
        let fast = start.elapsed().as_secs_f64() * 1e3;
        let feasible = words.iter().all(|v| v.expanded_len() <= BigInt::from(cap));
        let brute = if feasible {
            let start = Instant::now();
            for v in &words {
                brute_solve_free(v, cap)?;
            }
            Some(start.elapsed().as_secs_f64() * 1e3)
        } else {
            None
        };
        rows.push((bits, words.len(), fast, brute));
    }
    let mut out = String::new();
    if common.json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|(bits, n, fast, brute)| {
                json!({
                    "bits": bits,
                    "instances": n,
                    "solve_free_ms": fast,
                    "brute_ms": brute.map_or(json!("infeasible"), |b| json!(b)),
                })
            })
            .collect();
        let _ = writeln!(out, "{}", json!({ "seed": common.seed, "cap": cap, "rows": rows }));
    } else {
        let _ = writeln!(out, "{:>6} {:>9} {:>14} {:>14}", "bits", "instances", "solve_free_ms", "brute_ms");
        for (bits, n, fast, brute) in rows {
            let brute = brute.map_or("infeasible".to_string(), |b| format!("{b:.3}"));
            let _ = writeln!(out, "{bits:>6} {n:>9} {fast:>14.3} {brute:>14}");
        }
    }
    Ok((0, out))
}

/// Runs one parsed command; `stdin` supplies input not given as an argument.
pub fn run(cli: Cli, stdin: &str) -> (i32, String) {
    let result = match cli.command {
        Command::Solve { common, word, file } => {
            read_input(word, file, stdin).and_then(|t| solve(&common, &t, false))
        }
        Command::Trace { common, word, file } => {
            read_input(word, file, stdin).and_then(|t| solve(&common, &t, true))
        }
        Command::GenHard { common, file, primes } => {
            read_input(None, file, stdin).and_then(|t| gen_hard(&common, &t, primes))
        }
        Command::Fuzz { common, count } => fuzz(&common, count),
        Command::Bench { common, per_size } => bench(&common, per_size),
    };
    result.unwrap_or_else(|e| error_output(&e))
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T>(args: I, stdin: &str) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            (code, e.to_string())
        }
    }
}

/// Whether the command reads standard input.
pub fn wants_stdin(cli: &Cli) -> bool {
    match &cli.command {
        Command::Solve { word, file, .. } | Command::Trace { word, file, .. } => {
            word.is_none() && file.is_none()
        }
        Command::GenHard { file, .. } => file.is_none(),
        Command::Fuzz { .. } | Command::Bench { .. } => false,
    }
}
