//! Subcommands. Every entry point returns an exit code in {0, 1, 2}:
//! 0 success, 1 a negative verdict on well-formed input, 2 unusable input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use kwitness_core::nilcat::{nil_index, validate_nil};
use kwitness_core::witness::{reduce_nil_generator, verify_certificate, RelationStep};
use kwitness_core::{NilMulticomplex, Ring, Strategy, Verdict};

use crate::corpus;
use crate::format;
use crate::suites::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Maximal dimension accepted by `reduce` and `gen`.
pub const MAX_REDUCE_DIM: usize = 2;

#[derive(Parser, Debug)]
#[command(name = "kwitness", version, about = "Exact certificates for nilpotent endomorphisms of binary multicomplexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    /// Split off ker ν^(maxIndex−1); the quotient carries ν = 0.
    MaxIndex,
    /// Split off ker ν^(minIndex−1), at least ker ν.
    MinIndex,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::MaxIndex => Strategy::MaxIndex,
            StrategyArg::MinIndex => Strategy::MinIndex,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that an instance file is a valid Nil object.
    Validate { path: PathBuf },
    /// Produce a certificate that [F, ν] − [F, 0] vanishes.
    Reduce {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::MaxIndex)]
        strategy: StrategyArg,
        /// Certificate destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Failure report destination (stdout when absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Replay a certificate.
    Verify { path: PathBuf },
    /// Write a seeded corpus of instance files.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(0..=MAX_REDUCE_DIM as u64))]
        dim: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=8))]
        rank_bound: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long)]
        out: PathBuf,
        /// Work over ℤ localized at this prime instead of ℤ.
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Run a self-test suite and print its statistics.
    Selftest {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Bounds rayon's global pool by `KWITNESS_THREADS` when set.
pub fn configure_threads() -> Result<(), String> {
    let Some(raw) = std::env::var_os("KWITNESS_THREADS") else { return Ok(()) };
    let text = raw.to_string_lossy();
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("KWITNESS_THREADS must be a positive integer, got `{text}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    match cli.command {
        Command::Validate { path } => validate(&path, out, err),
        Command::Reduce { path, strategy, out: dest, report } => {
            reduce(&path, strategy.into(), dest.as_deref(), report.as_deref(), out, err)
        }
        Command::Verify { path } => verify(&path, out, err),
        Command::Gen { seed, dim, rank_bound, count, out: dir, prime } => {
            gen(seed, dim as usize, rank_bound as usize, count, &dir, prime, out, err)
        }
        Command::Selftest { suite, seed } => selftest(suite, seed, out),
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(t) => Some(t),
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn load_instance(path: &Path, err: &mut dyn Write) -> Option<NilMulticomplex> {
    let text = read(path, err)?;
    match format::parse_instance(&text) {
        Ok((n, _)) => Some(n),
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            None
        }
    }
}

fn write_to(dest: Option<&Path>, text: &str, out: &mut dyn Write, err: &mut dyn Write) -> bool {
    match dest {
        None => out.write_all(text.as_bytes()).is_ok(),
        Some(p) => match fs::write(p, text) {
            Ok(()) => true,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                false
            }
        },
    }
}

fn describe(n: &NilMulticomplex) -> String {
    let ranks = n.base().graded().ranks();
    let index = nil_index(n).map(|i| i.max_index.to_string()).unwrap_or_else(|_| "-".into());
    format!(
        "dimension {}, ring {}, ranks {:?}, nilpotency index {index}",
        n.base().dim(),
        n.base().ring(),
        ranks
    )
}

pub fn validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(n) = load_instance(path, err) else { return EXIT_USAGE };
    match validate_nil(&n) {
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            EXIT_USAGE
        }
        Ok(v) if v.report.passed() => {
            let _ = writeln!(out, "pass: {}", describe(&n));
            EXIT_OK
        }
        Ok(v) => {
            let _ = writeln!(out, "{}", v.report);
            EXIT_FAIL
        }
    }
}

pub fn reduce(
    path: &Path,
    strategy: Strategy,
    dest: Option<&Path>,
    report: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(n) = load_instance(path, err) else { return EXIT_USAGE };
    if n.base().dim() > MAX_REDUCE_DIM {
        let _ = writeln!(err, "error: reduction supports dimension at most {MAX_REDUCE_DIM}, got {}", n.base().dim());
        return EXIT_USAGE;
    }
    match validate_nil(&n) {
        Ok(v) if v.report.passed() => {}
        Ok(v) => {
            let _ = writeln!(err, "error: {}: input is not a valid Nil object\n{}", path.display(), v.report);
            return EXIT_USAGE;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    match reduce_nil_generator(&n, strategy) {
        Ok(cert) => {
            if !write_to(dest, &format::write_certificate(&cert), out, err) {
                return EXIT_USAGE;
            }
            if let Some(p) = dest {
                let ses = cert.steps.iter().filter(|s| matches!(s, RelationStep::ShortExact(_))).count();
                let _ = writeln!(
                    out,
                    "certificate: {} objects, {} steps ({ses} short exact, {} isomorphism) written to {}",
                    cert.registry.len(),
                    cert.steps.len(),
                    cert.steps.len() - ses,
                    p.display()
                );
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "{f}");
            write_to(report, &format::write_failure_report(&f), out, err);
            EXIT_FAIL
        }
    }
}

pub fn verify(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else { return EXIT_USAGE };
    let cert = match format::parse_certificate(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let verdict = verify_certificate(&cert);
    let _ = writeln!(out, "{verdict}");
    match verdict {
        Verdict::Accept { .. } => EXIT_OK,
        Verdict::Reject { .. } => EXIT_FAIL,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn gen(
    seed: u64,
    dim: usize,
    rank_bound: usize,
    count: u64,
    dir: &Path,
    prime: Option<u64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let ring = match prime {
        None => Ring::Integers,
        Some(p) => match Ring::localized(p) {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(err, "error: --prime: {e}");
                return EXIT_USAGE;
            }
        },
    };
    if let Err(e) = fs::create_dir_all(dir) {
        let _ = writeln!(err, "error: cannot create {}: {e}", dir.display());
        return EXIT_USAGE;
    }
    let width = count.saturating_sub(1).to_string().len().max(3);
    for i in 0..count {
        let n = corpus::generate(ring, seed, i, dim, rank_bound);
        let path = dir.join(format!("instance-{i:0width$}.json"));
        if !write_to(Some(&path), &format::write_instance(&n), out, err) {
            return EXIT_USAGE;
        }
    }
    let _ = writeln!(out, "wrote {count} instance file(s) (dimension {dim}, ring {ring}) to {}", dir.display());
    EXIT_OK
}

pub fn selftest(suite: Suite, seed: u64, out: &mut dyn Write) -> i32 {
    let reports = suites::run(suite, seed);
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    if reports.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}
