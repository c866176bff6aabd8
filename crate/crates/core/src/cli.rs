//! Command-line front end.
//!
//! Exit codes: 0 success or predicate holds, 1 predicate or certificate
//! failure, 2 resource limit reached, 3 I/O error, 4 parse error, 5 usage
//! error or unmet precondition.

use crate::bounds::bound_table;
use crate::construct::{construction_trace, extremal_system, DEFAULT_TRACE_NODE_LIMIT};
use crate::format::{parse_certificate, render_certificate, ParseError, SystemFile};
use crate::peel::{peel, verify_certificate, CheckKind, PeelError};
use crate::search::{max_objective_with, Mode, Objective, SearchOptions, SearchProblem};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_USAGE: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "skew-bollobas",
    version,
    about = "Skew Bollobás set-pair systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the extremal system for caps (a, b) and check its metrics.
    Construct {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the recursion tree of the construction.
    Trace {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = DEFAULT_TRACE_NODE_LIMIT)]
        node_limit: u64,
    },
    /// Check a system file against the skew or symmetric condition.
    Verify {
        input: PathBuf,
        #[arg(long, default_value = "skew")]
        mode: Mode,
        /// Also require |A_i| = A and |B_i| = B for every pair.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        strict_sizes: Option<Vec<usize>>,
    },
    /// Peel an exact-size skew system into a certificate.
    Peel {
        input: PathBuf,
        /// Defaults to the file's declared A-size cap.
        #[arg(long)]
        a: Option<usize>,
        /// Defaults to the file's declared B-size cap.
        #[arg(long)]
        b: Option<usize>,
        /// Pad sets to exact sizes with fresh elements first.
        #[arg(long)]
        pad: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Re-verify a peeling certificate from scratch.
    CheckCert { cert: PathBuf },
    /// Exact search for the largest objective value.
    Search {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "skew")]
        mode: Mode,
        #[arg(long)]
        objective: Objective,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Explore every labeling instead of normalized systems only.
        #[arg(long)]
        no_symmetry_breaking: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the closed-form bounds for caps (a, b).
    Bounds {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
    },
    /// Reverse the pair order and swap A with B.
    Dual {
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io {
            path: "<output>".into(),
            source,
        }
    }
}

type CmdResult = Result<i32, CliError>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
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
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Construct { a, b, output } => cmd_construct(a, b, output.as_deref(), out),
        Command::Trace { a, b, node_limit } => cmd_trace(a, b, node_limit, out),
        Command::Verify {
            input,
            mode,
            strict_sizes,
        } => cmd_verify(&input, mode, strict_sizes.map(|v| (v[0], v[1])), out),
        Command::Peel {
            input,
            a,
            b,
            pad,
            output,
        } => cmd_peel(&input, a, b, pad, output.as_deref(), out),
        Command::CheckCert { cert } => cmd_check_cert(&cert, out),
        Command::Search {
            a,
            b,
            n,
            mode,
            objective,
            node_limit,
            jobs,
            no_symmetry_breaking,
            output,
        } => {
            let problem = SearchProblem {
                a,
                b,
                n,
                mode,
                objective,
                node_limit,
            };
            let options = SearchOptions {
                symmetry_breaking: !no_symmetry_breaking,
                depth_bound: true,
                jobs: jobs.max(1),
            };
            cmd_search(&problem, &options, output.as_deref(), out, err)
        }
        Command::Bounds { a, b } => cmd_bounds(a, b, out),
        Command::Dual { input, output } => cmd_dual(&input, output.as_deref(), out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_system(path: &Path) -> Result<SystemFile, CliError> {
    SystemFile::parse(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `text` to `output`, or to `out` when no path is given.
fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => write_file(path, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Summary lines are written as `#` comments when they share stdout with a
/// file body, so the whole stream still parses.
fn summary_prefix(output: Option<&Path>) -> &'static str {
    if output.is_some() {
        ""
    } else {
        "# "
    }
}

fn cmd_construct(a: usize, b: usize, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let system = extremal_system(a, b).normalize();
    let table = bound_table(a as u64, b as u64);
    let is_skew = system.is_skew_bollobas();
    let checks = [
        ("m", system.m(), "m_max", &table.frankl_kalai_m),
        ("union_a", system.union_a().len(), "S1", &table.s1),
        ("union_b", system.union_b().len(), "S2", &table.s2),
        ("ground", system.ground().len(), "n_skew", &table.n_skew),
    ];
    emit(&SystemFile::new(a, b, system).render(), output, out)?;

    let prefix = summary_prefix(output);
    let mut all_ok = is_skew;
    for (name, got, label, want) in checks {
        let ok = BigUint::from(got) == *want;
        all_ok &= ok;
        writeln!(
            out,
            "{prefix}{name}={got} ({label}={want}) {}",
            if ok { "OK" } else { "MISMATCH" }
        )?;
    }
    writeln!(out, "{prefix}skew={is_skew}")?;
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_trace(a: u64, b: u64, node_limit: u64, out: &mut dyn Write) -> CmdResult {
    match construction_trace(a, b, node_limit) {
        Ok(trace) => {
            write!(out, "{trace}")?;
            writeln!(out, "leaves={} internal={}", trace.leaves, trace.internal)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(out, "{e}")?;
            Ok(EXIT_LIMIT)
        }
    }
}

fn cmd_verify(
    input: &Path,
    mode: Mode,
    strict_sizes: Option<(usize, usize)>,
    out: &mut dyn Write,
) -> CmdResult {
    let file = read_system(input)?;
    let r = file.system.report();
    writeln!(
        out,
        "m={} n={} union_a={} union_b={} ground={} max_a={} max_b={}",
        r.m,
        file.system.n(),
        r.union_a_size,
        r.union_b_size,
        r.ground_size,
        r.max_a_size,
        r.max_b_size
    )?;
    writeln!(
        out,
        "skew={} symmetric={}",
        r.is_skew, r.is_symmetric_bollobas
    )?;
    let relevant: Vec<(usize, usize)> = match mode {
        Mode::Skew => r.skew_violations().collect(),
        Mode::Symmetric => r.violations.clone(),
    };
    for (i, j) in &relevant {
        writeln!(
            out,
            "violation ({},{}): A_{} and B_{} are disjoint",
            i + 1,
            j + 1,
            i + 1,
            j + 1
        )?;
    }
    let mut holds = relevant.is_empty();
    if let Some((a, b)) = strict_sizes {
        match file.system.check_exact_sizes(a, b) {
            Ok(()) => writeln!(out, "sizes exactly ({a},{b}): OK")?,
            Err(e) => {
                holds = false;
                writeln!(out, "sizes exactly ({a},{b}): FAIL {e}")?;
            }
        }
    }
    writeln!(out, "{mode}: {}", if holds { "HOLDS" } else { "FAILS" })?;
    Ok(if holds { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_peel(
    input: &Path,
    a: Option<usize>,
    b: Option<usize>,
    pad: bool,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let file = read_system(input)?;
    let (a, b) = (a.unwrap_or(file.a), b.unwrap_or(file.b));
    let system = if pad {
        file.system
            .pad(a, b)
            .map_err(|e| CliError::Usage(format!("cannot pad to ({a},{b}): {e}")))?
    } else {
        file.system
    };
    let cert = match peel(&system, a, b) {
        Ok(cert) => cert,
        Err(PeelError::NotExact(e)) => {
            return Err(CliError::Usage(format!(
                "peel needs exact sizes ({a},{b}): {e}; rerun with --pad"
            )))
        }
        Err(e @ PeelError::NotSkew { .. }) => return Err(CliError::Usage(e.to_string())),
        Err(PeelError::RepairCapExceeded {
            level,
            cap,
            partial,
        }) => {
            emit(&render_certificate(&partial), output, out)?;
            writeln!(
                out,
                "{}certificate FAILED: level {level} repair cap {cap} exceeded",
                summary_prefix(output)
            )?;
            return Ok(EXIT_FAILURE);
        }
        Err(e @ PeelError::Stuck { .. }) => {
            writeln!(out, "{}certificate FAILED: {e}", summary_prefix(output))?;
            return Ok(EXIT_FAILURE);
        }
    };
    emit(&render_certificate(&cert), output, out)?;
    let report = verify_certificate(&cert);
    let prefix = summary_prefix(output);
    let sizes: Vec<String> = report.level_sizes.iter().map(|s| s.to_string()).collect();
    writeln!(
        out,
        "{prefix}levels={} |M_j|=[{}] sum={} union_a={}",
        cert.levels.len(),
        sizes.join(","),
        report.level_sizes.iter().sum::<usize>(),
        report.union_a_size
    )?;
    for f in &report.failures {
        writeln!(out, "{prefix}FAIL {f}")?;
    }
    writeln!(
        out,
        "{prefix}certificate {}",
        if report.is_valid() { "OK" } else { "FAILED" }
    )?;
    Ok(if report.is_valid() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_check_cert(path: &Path, out: &mut dyn Write) -> CmdResult {
    let cert = parse_certificate(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    let report = verify_certificate(&cert);
    for check in CheckKind::ALL {
        writeln!(
            out,
            "{} {check}",
            if report.passed(check) { "PASS" } else { "FAIL" }
        )?;
    }
    for f in &report.failures {
        writeln!(out, "failure: {f}")?;
    }
    writeln!(
        out,
        "certificate {}",
        if report.is_valid() { "OK" } else { "FAILED" }
    )?;
    Ok(if report.is_valid() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_search(
    problem: &SearchProblem,
    options: &SearchOptions,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let result =
        max_objective_with(problem, options).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(
        err,
        "search: {} {} a={} b={} n={}: nodes={} best={}",
        problem.mode,
        problem.objective,
        problem.a,
        problem.b,
        problem.n,
        result.nodes_explored,
        result.optimum
    )?;
    let status = if result.proven_optimal {
        "(proven)"
    } else {
        "(not proven: node limit reached)"
    };
    let prefix = summary_prefix(output);
    writeln!(out, "{prefix}optimum {} {status}", result.optimum)?;
    writeln!(out, "{prefix}nodes_explored {}", result.nodes_explored)?;
    writeln!(out, "{prefix}proven_optimal {}", result.proven_optimal)?;
    let witness = SystemFile::new(problem.a, problem.b, result.witness).render();
    match output {
        Some(path) => {
            write_file(path, &witness)?;
            writeln!(out, "{prefix}witness {}", path.display())?;
        }
        None => write!(out, "{witness}")?,
    }
    Ok(if result.proven_optimal {
        EXIT_OK
    } else {
        EXIT_LIMIT
    })
}

fn cmd_bounds(a: u64, b: u64, out: &mut dyn Write) -> CmdResult {
    let table = bound_table(a, b);
    let identity = table.identity_holds();
    writeln!(
        out,
        "{table} identity={}",
        if identity { "OK" } else { "FAIL" }
    )?;
    Ok(if identity { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_dual(input: &Path, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let file = read_system(input)?;
    let dual = SystemFile::new(file.b, file.a, file.system.dual());
    emit(&dual.render(), output, out)?;
    Ok(EXIT_OK)
}
