use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use cadlift_cli::parse::{parse_raw, resolve, OperatorName, OutputFormat, RawJob};
use cadlift_cli::{run_job, EXIT_USER};
use clap::Parser;

/// Cylindrical algebraic decomposition of a polynomial system.
///
/// Settings given as flags override those of the input file; `--poly`
/// adds to its polynomials. Exit status: 0 success, 1 not well oriented,
/// 2 user error, 3 internal error or failed verification.
#[derive(Parser, Debug)]
#[command(name = "cadlift", version)]
struct Args {
    /// Job file; `-` reads standard input. Without it and without
    /// `--poly`, the job is read from standard input.
    input: Option<PathBuf>,
    /// Variables in increasing order, comma separated.
    #[arg(long)]
    vars: Option<String>,
    /// A polynomial; may be repeated.
    #[arg(long = "poly")]
    polys: Vec<String>,
    /// Projection operator: collins or mccallum (default).
    #[arg(long)]
    operator: Option<OperatorName>,
    /// 1-based index of the equational constraint.
    #[arg(long)]
    ec: Option<usize>,
    /// Output format: text (default), json or svg.
    #[arg(long)]
    output: Option<OutputFormat>,
    /// Verify the result with this many random points per cell.
    #[arg(long)]
    verify: Option<usize>,
    /// Seed for the verification points.
    #[arg(long)]
    seed: Option<u64>,
    /// Abort once the decomposition exceeds this many cells.
    #[arg(long)]
    max_cells: Option<usize>,
    /// Lift the cells of each level in parallel.
    #[arg(long)]
    parallel: bool,
}

fn read_source(args: &Args) -> std::io::Result<String> {
    match &args.input {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        None if !args.polys.is_empty() || args.vars.is_some() => Ok(String::new()),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn merge(mut raw: RawJob, args: &Args) -> RawJob {
    if let Some(v) = &args.vars {
        raw.vars = Some((v.split(',').map(|s| s.trim().to_string()).collect(), 0, 1));
    }
    for p in &args.polys {
        raw.polys.push((p.clone(), 0, 1));
    }
    if args.operator.is_some() {
        raw.operator = args.operator;
    }
    if let Some(k) = args.ec {
        raw.ec = Some((k, 0));
    }
    if args.output.is_some() {
        raw.output = args.output;
    }
    if args.verify.is_some() {
        raw.verify = args.verify;
    }
    if args.seed.is_some() {
        raw.seed = args.seed;
    }
    if args.max_cells.is_some() {
        raw.max_cells = args.max_cells;
    }
    raw
}

fn user_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USER as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let source = match read_source(&args) {
        Ok(s) => s,
        Err(e) => return user_error(e),
    };
    let raw = match parse_raw(&source) {
        Ok(r) => merge(r, &args),
        Err(e) => return user_error(e),
    };
    let job = match resolve(&raw) {
        Ok(j) => j,
        Err(e) => return user_error(e),
    };
    let out = run_job(&job, args.parallel);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
