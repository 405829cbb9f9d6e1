//! The `specc` command line.
//!
//! Results go to the output stream, diagnostics to the error stream. Exit
//! status: 0 success, 1 runtime error, 2 specification rejected, 3 usage
//! error (including a missing file).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use crate::analyzer::check_well_founded;
use crate::counter::{Counter, LabeledCounter, DEFAULT_TABLE_LIMIT_MB};
use crate::dsl::parse_system;
use crate::enumerator::{Enumerator, RANDOM_ENGINE_VERSION};
use crate::error::Error;
use crate::grammar::{Mode, SpecSystem, Structure};
use crate::recurrence::{guess_recurrence, verify};
use crate::term::to_json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Environment variable capping table memory, in megabytes.
pub const TABLE_LIMIT_ENV: &str = "SPECC_MAX_TABLE_MB";

#[derive(Parser, Debug)]
#[command(name = "specc", version, about = "Count, list, rank and sample structures of combinatorial specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Spec {
    /// Specification file.
    file: PathBuf,
    /// Class to work on; defaults to the first definition.
    #[arg(long)]
    class: Option<String>,
}

#[derive(Args, Debug)]
struct ModeFlag {
    /// Treat the system as labeled.
    #[arg(long)]
    labeled: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and analyze; print valuations.
    Check {
        #[command(flatten)]
        spec: Spec,
    },
    /// Count structures of one size or of every size up to a bound.
    Count {
        #[command(flatten)]
        spec: Spec,
        #[arg(long, conflicts_with = "upto", required_unless_present = "upto")]
        size: Option<usize>,
        #[arg(long)]
        upto: Option<usize>,
        #[command(flatten)]
        mode: ModeFlag,
    },
    /// List structures of a size in canonical order.
    List {
        #[command(flatten)]
        spec: Spec,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// With jsonl, start with a metadata line.
        #[arg(long)]
        meta: bool,
        #[command(flatten)]
        mode: ModeFlag,
    },
    /// Structure of a given rank.
    Unrank {
        #[command(flatten)]
        spec: Spec,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        rank: BigUint,
        #[command(flatten)]
        mode: ModeFlag,
    },
    /// Rank of a structure given in textual form.
    Rank {
        #[command(flatten)]
        spec: Spec,
        #[arg(long)]
        structure: String,
        #[command(flatten)]
        mode: ModeFlag,
    },
    /// Uniformly random structure of a size.
    Random {
        #[command(flatten)]
        spec: Spec,
        #[arg(long)]
        size: usize,
        /// Seed; drawn from system entropy and reported when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        mode: ModeFlag,
    },
    /// Guess a recurrence for the counting sequence.
    GuessRec {
        #[command(flatten)]
        spec: Spec,
        /// Number of terms, sizes 0 to N-1.
        #[arg(long, default_value_t = 30)]
        terms: usize,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[command(flatten)]
        mode: ModeFlag,
    },
}

struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            lines: vec![msg.into()],
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse(_) | Error::Analysis(_) | Error::Validation(_) => EXIT_REJECTED,
            Error::UnknownClass(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        let lines = match e {
            Error::Parse(ds) => ds.iter().map(ToString::to_string).collect(),
            Error::Analysis(ds) => ds.iter().map(ToString::to_string).collect(),
            other => vec![format!("error: {other}")],
        };
        Failure { code, lines }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure {
            code: EXIT_RUNTIME,
            lines: vec![format!("error: {e}")],
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs one command line (program name first) and returns its exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            for line in f.lines {
                let _ = writeln!(err, "{line}");
            }
            f.code
        }
    }
}

/// A seed from the process's randomly keyed hasher state.
fn entropy_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos()));
    h.finish()
}

fn table_limit() -> std::result::Result<usize, Failure> {
    match std::env::var(TABLE_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("error: {TABLE_LIMIT_ENV} must be a whole number of megabytes, got '{v}'"))),
        Err(_) => Ok(DEFAULT_TABLE_LIMIT_MB),
    }
}

/// Reads, parses and analyzes; returns the system rooted at the chosen class.
fn load(spec: &Spec, labeled: bool, err: &mut dyn Write) -> std::result::Result<SpecSystem, Failure> {
    let text = std::fs::read_to_string(&spec.file)
        .map_err(|e| Failure::usage(format!("error: cannot read {}: {e}", spec.file.display())))?;
    let mode = if labeled { Mode::Labeled } else { Mode::Unlabeled };
    let parsed = parse_system(&text, None, mode).map_err(|ds| Failure::from(Error::Parse(ds)))?;
    let class = spec.class.clone().unwrap_or_else(|| parsed.system.root().to_string());
    if parsed.system.get(&class).is_none() {
        return Err(Failure::from(Error::UnknownClass(class)));
    }
    let sys = parsed.system.with_root(&class)?;
    let report = check_well_founded(&sys);
    if !report.ok {
        return Err(Failure::from(Error::Analysis(report.errors().cloned().collect())));
    }
    for w in report.warnings() {
        writeln!(err, "{w}")?;
    }
    Ok(sys)
}

fn enumerator(sys: &SpecSystem, size: usize) -> std::result::Result<Enumerator, Failure> {
    let mut e = Enumerator::new(sys, sys.root())?.with_table_limit_mb(table_limit()?);
    e.prepare(size)?;
    e.seal();
    Ok(e)
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Check { spec } => {
            let sys = load(&spec, false, err)?;
            let report = check_well_founded(&sys);
            writeln!(out, "ok")?;
            for (name, _) in sys.defs() {
                match report.valuation.get(name) {
                    Some(v) => writeln!(out, "val {name} = {v}")?,
                    None => writeln!(out, "val {name} = inf")?,
                }
            }
        }
        Command::Count { spec, size, upto, mode } => {
            let sys = load(&spec, mode.labeled, err)?;
            let top = size.or(upto).expect("clap requires one of --size/--upto");
            let counts: Vec<BigUint> = if mode.labeled {
                LabeledCounter::new(&sys, sys.root())?.series(top)?
            } else {
                Counter::new(&sys, sys.root())?.with_table_limit_mb(table_limit()?).series(top)?
            };
            match size {
                Some(n) => writeln!(out, "{}", counts[n])?,
                None => {
                    for (n, c) in counts.iter().enumerate() {
                        writeln!(out, "{n}\t{c}")?;
                    }
                }
            }
        }
        Command::List {
            spec,
            size,
            limit,
            format,
            meta,
            mode,
        } => {
            let sys = load(&spec, mode.labeled, err)?;
            let e = enumerator(&sys, size)?;
            if meta && matches!(format, Format::Jsonl) {
                let header = serde_json::json!({
                    "v": 1,
                    "class": sys.root(),
                    "size": size,
                    "count": e.count(size)?.to_string(),
                });
                writeln!(out, "{header}")?;
            }
            let items = e.iter(size)?;
            let items: Box<dyn Iterator<Item = Structure>> = match limit {
                Some(k) => Box::new(items.take(k)),
                None => Box::new(items),
            };
            for s in items {
                match format {
                    Format::Text => writeln!(out, "{s}")?,
                    Format::Jsonl => writeln!(out, "{}", to_json(&s))?,
                }
            }
        }
        Command::Unrank { spec, size, rank, mode } => {
            let sys = load(&spec, mode.labeled, err)?;
            let s = enumerator(&sys, size)?.unrank(size, &rank)?;
            writeln!(out, "{s}")?;
        }
        Command::Rank { spec, structure, mode } => {
            let sys = load(&spec, mode.labeled, err)?;
            let s: Structure = structure.parse()?;
            let r = enumerator(&sys, s.size())?.rank(&s)?;
            writeln!(out, "{r}")?;
        }
        Command::Random { spec, size, seed, mode } => {
            let sys = load(&spec, mode.labeled, err)?;
            let seed = match seed {
                Some(s) => s,
                None => {
                    let s = entropy_seed();
                    writeln!(err, "seed: {s} (engine v{RANDOM_ENGINE_VERSION})")?;
                    s
                }
            };
            let s = enumerator(&sys, size)?.random(size, seed)?;
            writeln!(out, "{s}")?;
        }
        Command::GuessRec {
            spec,
            terms,
            max_order,
            max_degree,
            mode,
        } => {
            let sys = load(&spec, mode.labeled, err)?;
            if terms == 0 {
                return Err(Failure::usage("error: --terms must be at least 1"));
            }
            let counts: Vec<BigInt> = if mode.labeled {
                LabeledCounter::new(&sys, sys.root())?.series(terms - 1)?
            } else {
                Counter::new(&sys, sys.root())?.with_table_limit_mb(table_limit()?).series(terms - 1)?
            }
            .into_iter()
            .map(BigInt::from)
            .collect();
            match guess_recurrence(&counts, max_order, max_degree)? {
                Some(rec) => {
                    if rec.is_vacuous_on(counts.len()) {
                        writeln!(err, "warning: too few terms to check the recurrence")?;
                    } else if !verify(&rec, &counts) {
                        return Err(Failure {
                            code: EXIT_RUNTIME,
                            lines: vec!["error: guessed recurrence does not verify".into()],
                        });
                    }
                    writeln!(out, "{rec}")?;
                    if rec.stride > 1 {
                        let offset = if rec.shift > 0 { format!(" + {}", rec.shift) } else { String::new() };
                        writeln!(err, "note: u(n) is the count at size {}*n{offset}; other sizes are empty", rec.stride)?;
                    } else if rec.shift > 0 {
                        writeln!(err, "note: u(0) is the count at size {}", rec.shift)?;
                    }
                }
                None => writeln!(out, "no recurrence found (order<={max_order}, degree<={max_degree})")?,
            }
        }
    }
    Ok(())
}
