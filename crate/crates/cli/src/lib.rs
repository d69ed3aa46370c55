//! Front end for `cadlift`: job parsing, output rendering and the run loop
//! shared by the binary and its tests.

pub mod emit;
pub mod parse;

use cadlift::arith::rat;
use cadlift::lifting::{build_cad, BuildOptions, Cad, CadOutcome};
use cadlift::projection::OperatorKind;
use cadlift::verify::{
    verify_cylindricity, verify_partition, verify_sign_invariance, VerificationReport,
};
use cadlift::Error;

use parse::{JobSpec, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USER: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Points drawn by the partition check.
pub const PARTITION_TRIALS: usize = 1000;

/// What a run writes and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::NothingToDecompose
        | Error::EcNotTopLevel
        | Error::EcLostInBasis
        | Error::BudgetExceeded(_) => EXIT_USER,
        _ => EXIT_INTERNAL,
    }
}

/// Sign-invariance (for the equational constraint alone when one is
/// designated), partition over `[-10, 10]^n` and cylindricity.
pub fn verify_job(cad: &Cad, job: &JobSpec, k: usize) -> VerificationReport {
    let targets = match job.operator {
        OperatorKind::McCallumReducedEC(i) => vec![job.polynomials[i].clone()],
        _ => job.polynomials.clone(),
    };
    verify_sign_invariance(cad, &targets, k, job.seed)
        .merge(verify_partition(
            cad,
            PARTITION_TRIALS,
            (&rat(-10), &rat(10)),
            job.seed,
        ))
        .merge(verify_cylindricity(cad))
}

/// Build, optionally verify, and render a job.
pub fn run_job(job: &JobSpec, parallel: bool) -> RunOutput {
    let opts = BuildOptions {
        parallel,
        max_cells: job.max_cells,
    };
    let outcome = match build_cad(&job.polynomials, &job.order, job.operator, &opts) {
        Ok(o) => o,
        Err(e) => {
            return RunOutput {
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
                code: error_code(&e),
            }
        }
    };
    let report = match (&outcome, job.verify) {
        (CadOutcome::Complete(cad), Some(k)) => Some(verify_job(cad, job, k)),
        _ => None,
    };
    let mut out = RunOutput {
        stdout: String::new(),
        stderr: String::new(),
        code: EXIT_OK,
    };
    match &outcome {
        CadOutcome::Fail { cell, polynomial } => {
            out.code = EXIT_FAIL;
            out.stdout = match job.output {
                OutputFormat::Json => emit::json_string(&emit::json_fail(
                    cell,
                    polynomial,
                    &job.order,
                    job.operator,
                    &job.polynomials,
                )),
                _ => emit::fail_text(cell, polynomial, &job.order),
            };
        }
        CadOutcome::Complete(cad) => {
            out.stdout = match job.output {
                OutputFormat::Text => {
                    let mut s = emit::text(cad, &job.polynomials);
                    if let Some(r) = &report {
                        s.push_str(&emit::report_text(r));
                    }
                    s
                }
                OutputFormat::Json => {
                    emit::json_string(&emit::json_tree(cad, &job.polynomials, report.as_ref()))
                }
                OutputFormat::Svg => match emit::svg(cad) {
                    Some(s) => s,
                    None => {
                        out.stderr = "error: svg output needs exactly two variables\n".into();
                        out.code = EXIT_USER;
                        return out;
                    }
                },
            };
            if let Some(r) = &report {
                if job.output == OutputFormat::Svg {
                    out.stderr.push_str(&emit::report_text(r));
                }
                if !r.passed() {
                    out.code = EXIT_INTERNAL;
                    out.stderr.push_str(&format!(
                        "error: verification found {} violations\n",
                        r.violations()
                    ));
                }
            }
        }
    }
    out
}
