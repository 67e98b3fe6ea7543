use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cubical::check::{Checker, Ctx, Diagnostic};
use cubical::eval::{self, Goal, Job, Outcome, Schedule, DEFAULT_FUEL};
use cubical::faces::disjunction_split;
use cubical::parse::{self, SourceFile};
use cubical::syntax::{Term, TermKind};

const EXIT_USAGE: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_KERNEL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ctt",
    about = "Evaluate and check cubical type theory definitions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a definition of type N or ||A||
    Eval {
        file: PathBuf,
        /// Definition to evaluate
        name: Option<String>,
        /// Evaluate every N and ||A|| definition in the file
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Write the step log to this file
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Run the substitution audit with this many samples
        #[arg(long)]
        audit: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one JSON record per definition to this file
        #[arg(long)]
        report: Option<PathBuf>,
        /// Worker threads
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Type check every definition in a file
    Check {
        file: PathBuf,
        /// Print diagnostics as JSON records
        #[arg(long)]
        json: bool,
    },
    /// Normalize a face and answer queries about it
    Faces {
        expr: String,
        /// Decide expr <= this face
        #[arg(long)]
        leq: Option<String>,
        /// Which side of expr \/ this face holds
        #[arg(long)]
        split: Option<String>,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("{msg}");
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<SourceFile, ExitCode> {
    let src = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    parse::parse(&src).map_err(|e| fail(EXIT_USAGE, format!("{}:{e}", path.display())))
}

/// What a definition's type asks the evaluator for, if anything.
fn goal_of(file: &SourceFile, ty: &Term) -> Option<(Goal, bool)> {
    let checker = Checker::default();
    let ctx = Ctx::new(file.names.clone());
    let w = checker.whnf(&ctx, ty).ok()?;
    match w.kind() {
        TermKind::Nat => Some((Goal::Numeral, false)),
        TermKind::Inh(a) => {
            let inner = checker.whnf(&ctx, a).ok()?;
            Some((Goal::Witness, matches!(inner.kind(), TermKind::Nat)))
        }
        _ => None,
    }
}

fn run_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(f);
        }
    }
    let _ = jobs;
    f()
}

fn schedule(jobs: usize) -> Schedule {
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        return Schedule::Parallel;
    }
    let _ = jobs;
    Schedule::Sequential
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    path: &Path,
    name: Option<String>,
    all: bool,
    fuel: u64,
    trace: Option<PathBuf>,
    audit: Option<usize>,
    seed: u64,
    report: Option<PathBuf>,
    jobs: usize,
) -> ExitCode {
    let file = match load(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let selected: Vec<_> = match (&name, all) {
        (Some(n), false) => match file.get(n) {
            Some(d) => vec![d.clone()],
            None => return fail(EXIT_USAGE, format!("no definition named {n}")),
        },
        (None, true) => file
            .defs
            .iter()
            .filter(|d| goal_of(&file, &d.ty).is_some())
            .cloned()
            .collect(),
        _ => return fail(EXIT_USAGE, "give a definition name or --all"),
    };
    let sched = schedule(jobs);
    run_pool(jobs, || {
        let checker = Checker { fuel };
        let verdicts: Vec<_> = selected
            .iter()
            .map(|d| checker.check_definition(&file.names, &d.ty, &d.body))
            .collect();
        let mut rejected = false;
        for (d, v) in selected.iter().zip(&verdicts) {
            if let Err(e) = v {
                eprintln!("{}: rejected: {}: {e}", d.name, e.class());
                rejected = true;
            }
        }
        if rejected {
            return ExitCode::from(EXIT_REJECTED);
        }
        let mut work = Vec::new();
        for d in &selected {
            match goal_of(&file, &d.ty) {
                Some((goal, nat_witness)) => work.push((
                    Job {
                        name: d.name.clone(),
                        names: file.names.clone(),
                        term: d.body.clone(),
                        goal,
                    },
                    nat_witness,
                )),
                None => {
                    eprintln!("{}: only N and ||A|| definitions evaluate", d.name);
                    return ExitCode::from(EXIT_REJECTED);
                }
            }
        }
        let job_list: Vec<Job> = work.iter().map(|(j, _)| j.clone()).collect();
        let reports = eval::run_batch(&job_list, fuel, trace.is_some(), sched);

        let mut out = std::io::stdout().lock();
        let mut kernel_failed = false;
        for (r, (job, nat_witness)) in reports.iter().zip(&work) {
            match &r.outcome {
                Outcome::Numeral(n) => {
                    let _ = writeln!(out, "{} = {} ({n})", r.name, Term::numeral(*n));
                }
                Outcome::Witness(w) => {
                    let extra = if *nat_witness {
                        let v = eval::extract_witness(&job.names, &job.term, fuel)
                            .and_then(|v| eval::eval_nat(&job.names, &v, fuel));
                        match v {
                            Ok(n) => format!(" ({})", n.0),
                            Err(e) => {
                                kernel_failed = true;
                                format!(" (kernel failure: {e})")
                            }
                        }
                    } else {
                        String::new()
                    };
                    let _ = writeln!(out, "{} = witness {w}{extra}", r.name);
                }
                Outcome::Failure(e) => {
                    kernel_failed = true;
                    eprintln!("{}: kernel failure: {e}", r.name);
                }
            }
        }
        if let Some(samples) = audit {
            for job in job_list.iter().filter(|j| j.goal == Goal::Numeral) {
                let a = eval::coherence_audit(&job.names, &job.term, samples, seed, fuel, sched);
                let _ = writeln!(
                    out,
                    "audit {}: {} samples, {} violations",
                    job.name,
                    a.samples,
                    a.violations.len()
                );
                for v in &a.violations {
                    kernel_failed = true;
                    let _ = writeln!(
                        out,
                        "  sample {} {}: expected {}, got {}",
                        v.sample, v.subst, v.expected, v.got
                    );
                }
                if a.expected.is_none() {
                    kernel_failed = true;
                }
            }
        }
        if let Some(p) = &report {
            let lines: Vec<String> = reports
                .iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.trace = None;
                    serde_json::to_string(&r).expect("reports serialize")
                })
                .collect();
            if let Err(e) = fs::write(p, lines.join("\n") + "\n") {
                return fail(EXIT_USAGE, format!("{}: {e}", p.display()));
            }
        }
        if let Some(p) = &trace {
            let mut lines = Vec::new();
            for r in &reports {
                for rec in r.trace.iter().flatten() {
                    let v = serde_json::json!({ "definition": r.name, "step": rec });
                    lines.push(v.to_string());
                }
            }
            if let Err(e) = fs::write(p, lines.join("\n") + "\n") {
                return fail(EXIT_USAGE, format!("{}: {e}", p.display()));
            }
        }
        if kernel_failed {
            ExitCode::from(EXIT_KERNEL)
        } else {
            ExitCode::SUCCESS
        }
    })
}

fn cmd_check(path: &Path, json: bool) -> ExitCode {
    let file = match load(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let checker = Checker::default();
    let mut failed = false;
    for d in &file.defs {
        match checker.check_definition(&file.names, &d.ty, &d.body) {
            Ok(()) => {
                if !json {
                    println!("ok {}", d.name);
                }
            }
            Err(e) => {
                failed = true;
                if json {
                    let diag = Diagnostic::new(&d.name, &e);
                    println!(
                        "{}",
                        serde_json::to_string(&diag).expect("diagnostics serialize")
                    );
                } else {
                    println!("FAIL {} (line {}): {}: {e}", d.name, d.line, e.class());
                }
            }
        }
    }
    if failed {
        ExitCode::from(EXIT_REJECTED)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_faces(expr: &str, leq: Option<String>, split: Option<String>) -> ExitCode {
    let f = match parse::parse_face(expr) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    println!("{f}");
    if let Some(g) = leq {
        match parse::parse_face(&g) {
            Ok(g) => println!("leq: {}", f.leq(&g)),
            Err(e) => return fail(EXIT_USAGE, e),
        }
    }
    if let Some(g) = split {
        match parse::parse_face(&g) {
            Ok(g) => println!("split: {:?}", disjunction_split(&f, &g)),
            Err(e) => return fail(EXIT_USAGE, e),
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Eval {
            file,
            name,
            all,
            fuel,
            trace,
            audit,
            seed,
            report,
            jobs,
        } => cmd_eval(&file, name, all, fuel, trace, audit, seed, report, jobs),
        Cmd::Check { file, json } => cmd_check(&file, json),
        Cmd::Faces { expr, leq, split } => cmd_faces(&expr, leq, split),
    }
}
