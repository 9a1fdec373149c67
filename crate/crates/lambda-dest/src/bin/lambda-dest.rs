//! Command-line driver: check, run, trace, corpus, and meta over `.ld`
//! files.
//!
//! Exit codes: 0 success, 1 type error, 2 parse error, 3 evaluator stuck
//! (an internal soundness failure), 4 step budget exceeded, 5 corpus or
//! meta expectation failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lambda_dest::corpus::{load_manifest, run_entry};
use lambda_dest::decode::decode;
use lambda_dest::eval::{run, RunError};
use lambda_dest::meta::check_preservation_progress;
use lambda_dest::pipeline::{check_program, CheckedProgram, PipelineError};

#[derive(Parser)]
#[command(name = "lambda-dest", version, about = "Typecheck and run .ld programs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Input program
    input: PathBuf,
    /// Enable the equirecursive-types and fixpoint extension
    #[arg(long = "ext", value_name = "EXTENSION")]
    ext: Vec<String>,
    /// Step budget for evaluation
    #[arg(long = "max-steps", default_value_t = 100_000)]
    max_steps: usize,
    /// Re-typecheck the command after every N-th step while running
    #[arg(long = "meta-every", default_value_t = 1)]
    meta_every: usize,
    /// Output format
    #[arg(long = "format", value_name = "text|records", default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse, desugar, and typecheck; print the main type
    Check(CommonOpts),
    /// Check and evaluate; print the decoded terminal value
    Run {
        #[command(flatten)]
        opts: CommonOpts,
        /// Print the step trace while running
        #[arg(long)]
        trace: bool,
    },
    /// Check, evaluate, and print one line per step
    Trace(CommonOpts),
    /// Run every entry of a corpus manifest
    Corpus {
        /// Manifest file (entries resolve relative to its directory)
        manifest: PathBuf,
        #[arg(long = "max-steps", default_value_t = 100_000)]
        max_steps: usize,
    },
    /// Emit a metatheory report (preservation, progress, name discipline)
    Meta(CommonOpts),
}

fn load(opts: &CommonOpts) -> Result<CheckedProgram, ExitCode> {
    let src = match std::fs::read_to_string(&opts.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", opts.input.display(), e);
            return Err(ExitCode::from(2));
        }
    };
    let recursion = opts.ext.iter().any(|e| e == "rec");
    match check_program(&src, recursion) {
        Ok(p) => Ok(p),
        Err(e @ PipelineError::Parse(_)) | Err(e @ PipelineError::Resolve(_)) => {
            eprintln!("{}", e);
            Err(ExitCode::from(2))
        }
        Err(e @ PipelineError::Type { .. }) => {
            eprintln!("{}", e);
            Err(ExitCode::from(1))
        }
    }
}

fn recursion_enabled(opts: &CommonOpts) -> bool {
    opts.ext.iter().any(|e| e == "rec")
}

fn run_command(opts: &CommonOpts, trace: bool) -> ExitCode {
    let program = match load(opts) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let outcome = run(program.term.clone(), opts.max_steps, |i, rule, cmd| {
        if trace {
            println!("{:04}  {:<18} {}", i, rule, cmd);
        }
    });
    match outcome {
        Ok(result) => {
            if trace {
                println!("TERMINAL {}", result.value);
            }
            match decode(&result.value, &program.ty) {
                Ok(d) => println!("{}", d),
                Err(_) => println!("{}", result.value),
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Stuck { step, description, command }) => {
            eprintln!("stuck at step {}: {}", step, description);
            eprintln!("  in {}", command);
            ExitCode::from(3)
        }
        Err(RunError::BudgetExceeded { steps }) => {
            eprintln!("step budget exceeded after {} steps", steps);
            ExitCode::from(4)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Cmd::Check(opts) => {
            let program = match load(&opts) {
                Ok(p) => p,
                Err(code) => return code,
            };
            println!("{}", program.ty);
            ExitCode::SUCCESS
        }
        Cmd::Run { opts, trace } => run_command(&opts, trace),
        Cmd::Trace(opts) => run_command(&opts, true),
        Cmd::Corpus { manifest, max_steps } => {
            let entries = match load_manifest(&manifest) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("{}", e);
                    return ExitCode::from(2);
                }
            };
            let dir = manifest.parent().unwrap_or_else(|| std::path::Path::new("."));
            let mut failures = 0;
            for entry in &entries {
                let outcome = run_entry(dir, entry, max_steps);
                let verdict = if outcome.ok { "ok" } else { "FAIL" };
                println!("{:<24} {:<4} {}", outcome.name, verdict, outcome.detail);
                if !outcome.ok {
                    failures += 1;
                }
            }
            if failures == 0 {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} corpus failure(s)", failures);
                ExitCode::from(5)
            }
        }
        Cmd::Meta(opts) => {
            let program = match load(&opts) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let name = opts
                .input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "program".to_string());
            let report = check_preservation_progress(
                &name,
                &program.term,
                &program.ty,
                recursion_enabled(&opts),
                opts.max_steps,
                opts.meta_every,
            );
            if opts.format == "records" {
                println!("{}", serde_json::to_string(&report).expect("serializable"));
            } else {
                println!(
                    "{}: steps={} preservation_failures={} progress={} names={} terminal={} => {}",
                    report.program,
                    report.steps,
                    report.preservation_failures.len(),
                    report.progress_failure.is_none(),
                    report.name_discipline_failures.is_empty(),
                    report.terminal_ok,
                    if report.passed { "PASS" } else { "FAIL" }
                );
                for f in &report.preservation_failures {
                    println!("  preservation failure at step {}: {}", f.step, f.detail);
                }
                if let Some(f) = &report.progress_failure {
                    println!("  progress failure at step {}: {}", f.step, f.detail);
                }
                for f in &report.name_discipline_failures {
                    println!("  name discipline failure at step {}: {}", f.step, f.detail);
                }
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
    }
}
