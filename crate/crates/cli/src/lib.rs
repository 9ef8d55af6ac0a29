//! Command-line front end for `kfree`.
//!
//! Everything goes through [`run`], which takes the argument vector and two
//! sinks and returns the process exit status: 0 on success, 1 when two
//! computations that must agree do not, 2 on invalid input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use kfree_core::closed_form::{self, rk_auto, sidon_bound};
use kfree_core::forest::{
    build_forest, construct_max_kfree, forest_to_dot, rk_general, select_optimal,
};
use kfree_core::interval::{construct_min_maximal, main_term, tilde_rk};
use kfree_core::oracle::{self, EXHAUSTIVE_RK_MAX_N, PSEUDOFOREST_MAX_N};
use kfree_core::{Error, KFreeSet, Method, ModulusContext, RkValue};

/// Largest `n` for which a witness set is materialized.
pub const MAX_MATERIALIZED_N: u64 = 100_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "kfree",
    version,
    about = "Maximum k-free sets modulo n and minimal maximal k-free subsets of [1, n]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct KN {
    #[arg(long, value_parser = clap::value_parser!(u64))]
    k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Size of a largest k-free subset of Z/nZ.
    Rk {
        #[command(flatten)]
        kn: KN,
        #[arg(long, value_enum, default_value_t = MethodArg::Forest)]
        method: MethodArg,
        /// Compare against the pseudoforest oracle (n <= 10^6) or the forest.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        json: bool,
    },
    /// A largest k-free subset of Z/nZ, ascending.
    Construct {
        #[command(flatten)]
        kn: KN,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Check that a set is k-free modulo n.
    Verify {
        #[command(flatten)]
        kn: KN,
        /// Comma-separated residues.
        #[arg(long, required_unless_present = "file", conflicts_with = "file")]
        set: Option<String>,
        /// File of residues separated by commas or whitespace.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Write the divisor forest as Graphviz DOT.
    Forest {
        #[command(flatten)]
        kn: KN,
        /// Output path, `-` for stdout.
        #[arg(long)]
        dot: PathBuf,
        /// Draw selected nodes as boxes.
        #[arg(long)]
        boxed: bool,
    },
    /// Smallest inclusion-maximal k-free subset of [1, n].
    Tilde {
        #[command(flatten)]
        kn: KN,
        #[arg(long)]
        construct: bool,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// CSV of R_k(n) over a range of n.
    Table {
        #[arg(long)]
        k: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_from: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_to: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        step: u64,
        /// Cross-check rows with n <= M against the pseudoforest oracle.
        #[arg(long)]
        oracle_max: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Upper bound on 2-fold Sidon sets modulo the Mersenne prime 2^m - 1.
    SidonBound {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run one of the brute-force reference implementations.
    Oracle {
        #[arg(long, value_enum)]
        which: OracleArg,
        #[command(flatten)]
        kn: KN,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Coprime,
    Km,
    K2m,
    Thm5,
    Forest,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    RkExhaustive,
    RkPseudoforest,
    TildeExhaustive,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Inconsistent(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(msg) => Failure::Inconsistent(msg),
            Error::NotIntegral(_) => Failure::Inconsistent(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let line: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let _ = writeln!(err, "{}", line.join(" "));
            return 2;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Inconsistent(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Rk {
            kn,
            method,
            check,
            json,
        } => cmd_rk(kn, method, check, json, out, err),
        Command::Construct { kn, json, csv } => cmd_construct(kn, json, csv, out),
        Command::Verify { kn, set, file } => cmd_verify(kn, set, file, out),
        Command::Forest { kn, dot, boxed } => cmd_forest(kn, &dot, boxed, out),
        Command::Tilde {
            kn,
            construct,
            json,
            csv,
        } => cmd_tilde(kn, construct, json, csv, out),
        Command::Table {
            k,
            n_from,
            n_to,
            step,
            oracle_max,
            out: path,
        } => cmd_table(k, n_from, n_to, step, oracle_max, &path, out),
        Command::SidonBound { m, json } => cmd_sidon(m, json, out, err),
        Command::Oracle { which, kn } => cmd_oracle(which, kn, out),
    }
}

fn evaluate(k: u64, n: u64, method: MethodArg) -> std::result::Result<RkValue, Failure> {
    let not_applicable =
        |what: &str| Failure::Usage(format!("method {what} does not apply to k={k}, n={n}"));
    Ok(match method {
        MethodArg::Forest => rk_general(&ModulusContext::new(k, n)?)?,
        MethodArg::Auto => {
            let report = rk_auto(&ModulusContext::new(k, n)?)?;
            report.evaluations[0]
        }
        MethodArg::Coprime => closed_form::rk_coprime(k, n)?,
        MethodArg::Km => {
            if k < 2 || n % k != 0 || (n / k) % k == 0 {
                return Err(not_applicable("km"));
            }
            closed_form::rk_km(k, n / k)?
        }
        MethodArg::K2m => {
            let kk = k.checked_mul(k).filter(|&kk| kk != 0 && n % kk == 0);
            match kk {
                Some(kk) => closed_form::rk_k2m(k, n / kk)?,
                None => return Err(not_applicable("k2m")),
            }
        }
        MethodArg::Thm5 => match closed_form::rk_theorem5(k, n)? {
            Some(eval) => eval.value,
            None => return Err(not_applicable("thm5")),
        },
        MethodArg::Oracle => RkValue::new(oracle_rk(k, n)?, Method::Oracle),
    })
}

fn oracle_rk(k: u64, n: u64) -> std::result::Result<u64, Failure> {
    Ok(if n <= EXHAUSTIVE_RK_MAX_N {
        oracle::oracle_rk_exhaustive(k, n)?
    } else {
        oracle::oracle_rk_pseudoforest(k, n)?
    })
}

#[derive(Serialize)]
struct RkJson {
    k: u64,
    n: u64,
    rk: u64,
    method: &'static str,
}

fn cmd_rk(
    kn: KN,
    method: MethodArg,
    check: bool,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let KN { k, n } = kn;
    let value = evaluate(k, n, method)?;
    if check {
        let (reference, name) = if n <= PSEUDOFOREST_MAX_N {
            (oracle::oracle_rk_pseudoforest(k, n)?, "pseudoforest oracle")
        } else if method != MethodArg::Forest && method != MethodArg::Auto {
            (rk_general(&ModulusContext::new(k, n)?)?.value, "forest")
        } else {
            writeln!(
                err,
                "note: n > {PSEUDOFOREST_MAX_N}, no independent check available"
            )?;
            (value.value, "")
        };
        if reference != value.value {
            return Err(Failure::Inconsistent(format!(
                "internal inconsistency: R_{k}({n}): {} gives {} but the {name} gives {reference}",
                value.method, value.value
            )));
        }
    }
    if json {
        let body = RkJson {
            k,
            n,
            rk: value.value,
            method: value.method.as_str(),
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&body).expect("plain struct")
        )?;
    } else {
        writeln!(out, "{}", value.value)?;
    }
    Ok(())
}

fn check_materializable(n: u64) -> Outcome {
    if n > MAX_MATERIALIZED_N {
        return Err(Failure::Usage(format!(
            "n = {n} exceeds the limit {MAX_MATERIALIZED_N} for listing elements"
        )));
    }
    Ok(())
}

fn join(elements: &[u64]) -> String {
    elements
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Serialize)]
struct SetJson<'a> {
    k: u64,
    n: u64,
    size: usize,
    elements: &'a [u64],
}

fn cmd_construct(kn: KN, json: bool, csv: bool, out: &mut dyn Write) -> Outcome {
    let KN { k, n } = kn;
    check_materializable(n)?;
    let set = construct_max_kfree(&ModulusContext::new(k, n)?)?;
    if !set.verify()? {
        return Err(Failure::Inconsistent(format!(
            "witness for k={k}, n={n} is not k-free"
        )));
    }
    if json {
        let body = SetJson {
            k,
            n,
            size: set.len(),
            elements: &set.elements,
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&body).expect("plain struct")
        )?;
    } else if csv {
        writeln!(out, "element")?;
        for x in &set.elements {
            writeln!(out, "{x}")?;
        }
    } else {
        writeln!(out, "{}", join(&set.elements))?;
    }
    Ok(())
}

fn parse_set(text: &str) -> std::result::Result<Vec<u64>, Failure> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Failure::Usage(format!("not a residue: {t:?}")))
        })
        .collect()
}

fn cmd_verify(kn: KN, set: Option<String>, file: Option<PathBuf>, out: &mut dyn Write) -> Outcome {
    let KN { k, n } = kn;
    let text = match (set, file) {
        (Some(s), _) => s,
        (None, Some(path)) => fs::read_to_string(&path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(Failure::Usage("one of --set or --file is required".into())),
    };
    let set = KFreeSet::new(k, n, parse_set(&text)?);
    let ok = set.verify()?;
    writeln!(out, "k-free: {ok}, size {}", set.len())?;
    Ok(())
}

fn cmd_forest(kn: KN, dot: &Path, boxed: bool, out: &mut dyn Write) -> Outcome {
    let KN { k, n } = kn;
    let ctx = ModulusContext::new(k, n)?;
    let forest = build_forest(&ctx)?;
    let selection = select_optimal(&forest)?;
    let text = forest_to_dot(&forest, boxed.then_some(&selection));
    if dot.as_os_str() == "-" {
        out.write_all(text.as_bytes())?;
    } else {
        fs::write(dot, text)?;
        writeln!(
            out,
            "trees: {}, nodes: {}, selected: {}, rk: {}",
            forest.roots().len(),
            forest.len(),
            selection.chosen.len(),
            selection.total
        )?;
    }
    Ok(())
}

fn ratio_text(r: &Ratio<i128>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Serialize)]
struct TildeJson {
    k: u64,
    n: u64,
    tilde_rk: u64,
    main_term: String,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<Vec<u64>>,
}

fn cmd_tilde(kn: KN, construct: bool, json: bool, csv: bool, out: &mut dyn Write) -> Outcome {
    let KN { k, n } = kn;
    let exact = tilde_rk(k, n)?;
    let main = main_term(k, n);
    let error = Ratio::from_integer(i128::from(exact)) - main;
    let elements = if construct {
        check_materializable(n)?;
        let sol = construct_min_maximal(k, n)?;
        if sol.elements.len() as u64 != exact {
            return Err(Failure::Inconsistent(format!(
                "construction has {} elements, count is {exact}",
                sol.elements.len()
            )));
        }
        Some(sol.elements)
    } else {
        None
    };
    if json {
        let body = TildeJson {
            k,
            n,
            tilde_rk: exact,
            main_term: ratio_text(&main),
            error: ratio_text(&error),
            elements,
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&body).expect("plain struct")
        )?;
    } else if csv {
        writeln!(out, "k,n,tilde_rk,main_term,error")?;
        writeln!(
            out,
            "{k},{n},{exact},{},{}",
            ratio_text(&main),
            ratio_text(&error)
        )?;
    } else {
        writeln!(out, "{exact}")?;
        if let Some(els) = elements {
            writeln!(out, "{}", join(&els))?;
        }
    }
    Ok(())
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KFREE_THREADS") {
        let threads: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            Failure::Usage(format!(
                "KFREE_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_table(
    k: u64,
    n_from: u64,
    n_to: u64,
    step: u64,
    oracle_max: Option<u64>,
    path: &Path,
    out: &mut dyn Write,
) -> Outcome {
    if n_from > n_to {
        return Err(Failure::Usage(format!(
            "--n-from {n_from} is larger than --n-to {n_to}"
        )));
    }
    let oracle_max = oracle_max.unwrap_or(0).min(PSEUDOFOREST_MAX_N);
    let ns: Vec<u64> = (n_from..=n_to).step_by(step as usize).collect();
    let pool = thread_pool()?;
    let rows: Vec<std::result::Result<RkValue, Failure>> = pool.install(|| {
        ns.par_iter()
            .map(|&n| {
                let value = rk_general(&ModulusContext::new(k, n)?)?;
                if n <= oracle_max {
                    let reference = oracle::oracle_rk_pseudoforest(k, n)?;
                    if reference != value.value {
                        return Err(Failure::Inconsistent(format!(
                            "R_{k}({n}): forest gives {} but the pseudoforest oracle gives {reference}",
                            value.value
                        )));
                    }
                }
                Ok(value)
            })
            .collect()
    });
    let mut text = String::from("k,n,rk,method\n");
    for (n, row) in ns.iter().zip(rows) {
        let value = row?;
        text.push_str(&format!("{k},{n},{},{}\n", value.value, value.method));
    }
    fs::write(path, text)?;
    writeln!(out, "{} rows written to {}", ns.len(), path.display())?;
    Ok(())
}

#[derive(Serialize)]
struct SidonJson<'a> {
    m: u32,
    n: u64,
    rk: u64,
    printed: Option<f64>,
    printed_floor: Option<u64>,
    exact: f64,
    exact_floor: u64,
    warnings: &'a [String],
}

fn cmd_sidon(m: u32, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let b = sidon_bound(m)?;
    if json {
        let body = SidonJson {
            m: b.m,
            n: b.n,
            rk: b.rk,
            printed: b.printed,
            printed_floor: b.printed_floor,
            exact: b.exact,
            exact_floor: b.exact_floor,
            warnings: &b.warnings,
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&body).expect("plain struct")
        )?;
        return Ok(());
    }
    writeln!(out, "n = {}", b.n)?;
    writeln!(out, "R_2(n) = {}", b.rk)?;
    match (b.printed, b.printed_floor) {
        (Some(p), Some(f)) => writeln!(out, "printed bound: {p:.6} (floor {f})")?,
        _ => writeln!(out, "printed bound: undefined")?,
    }
    writeln!(out, "exact bound: {:.6} (floor {})", b.exact, b.exact_floor)?;
    for w in &b.warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

fn cmd_oracle(which: OracleArg, kn: KN, out: &mut dyn Write) -> Outcome {
    let KN { k, n } = kn;
    let value = match which {
        OracleArg::RkExhaustive => oracle::oracle_rk_exhaustive(k, n)?,
        OracleArg::RkPseudoforest => oracle::oracle_rk_pseudoforest(k, n)?,
        OracleArg::TildeExhaustive => oracle::oracle_tilde_exhaustive(k, n)?,
    };
    writeln!(out, "{value}")?;
    Ok(())
}
