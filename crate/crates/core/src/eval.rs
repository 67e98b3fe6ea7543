//! Deep evaluation to numerals, witness extraction for truncations and
//! the substitution coherence audit.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::interval::Interval;
use crate::reduce::{Kernel, KernelError, RuleId, Step, StuckReason};
use crate::subst::NameSubst;
use crate::syntax::{Name, NameCtx, Term, TermKind};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// `suc^n 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Numeral(pub u64);

impl Numeral {
    pub fn to_term(self) -> Term {
        Term::numeral(self.0)
    }
}

impl fmt::Display for Numeral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub index: u64,
    pub rule: RuleId,
    /// Congruences taken to reach the redex, outermost first.
    pub path: Vec<RuleId>,
    pub term: String,
}

struct Run<'a> {
    kernel: Kernel<'a>,
    fuel: u64,
    steps: u64,
    tail: Vec<RuleId>,
    trace: Option<Vec<TraceRecord>>,
}

impl<'a> Run<'a> {
    fn new(kernel: Kernel<'a>, fuel: u64, traced: bool) -> Self {
        Run {
            kernel,
            fuel,
            steps: 0,
            tail: Vec::new(),
            trace: traced.then(Vec::new),
        }
    }

    fn whnf(&mut self, t: &Term) -> Result<Term, KernelError> {
        let mut cur = t.clone();
        loop {
            match self.kernel.step(&cur) {
                Step::Whnf => return Ok(cur),
                Step::Stuck(reason) => return Err(KernelError::Stuck { reason, term: cur }),
                Step::Stepped { term, mut rules } => {
                    if self.steps >= self.fuel {
                        return Err(KernelError::FuelExhausted {
                            fuel: self.fuel,
                            tail: self.tail.clone(),
                        });
                    }
                    let rule = rules.pop().expect("nonempty rule chain");
                    if self.tail.len() == 8 {
                        self.tail.remove(0);
                    }
                    self.tail.push(rule);
                    if let Some(trace) = &mut self.trace {
                        trace.push(TraceRecord {
                            index: self.steps,
                            rule,
                            path: rules,
                            term: cur.to_string(),
                        });
                    }
                    self.steps += 1;
                    cur = term;
                }
            }
        }
    }

    fn nat(&mut self, t: &Term) -> Result<Numeral, KernelError> {
        let mut n = 0;
        let mut cur = t.clone();
        loop {
            let w = self.whnf(&cur)?;
            match w.kind() {
                TermKind::Zero => return Ok(Numeral(n)),
                TermKind::Suc(k) => {
                    n += 1;
                    cur = k.clone();
                }
                _ => {
                    return Err(KernelError::Stuck {
                        reason: StuckReason::NoRule(format!("{w} is not a numeral")),
                        term: w,
                    })
                }
            }
        }
    }

    fn witness(&mut self, t: &Term) -> Result<Term, KernelError> {
        let mut cur = t.clone();
        loop {
            let w = self.whnf(&cur)?;
            cur = match w.kind() {
                TermKind::Inc(a) => return Ok(a.clone()),
                TermKind::Squash(u, _, _) => u.clone(),
                TermKind::Hcomp { base, .. } => base.clone(),
                _ => {
                    return Err(KernelError::Stuck {
                        reason: StuckReason::NoRule(format!("{w} is not a truncation element")),
                        term: w,
                    })
                }
            };
        }
    }
}

/// The numeral a closed natural over `names` reduces to, with the number
/// of steps taken.
pub fn eval_nat_steps(names: &NameCtx, u: &Term, fuel: u64) -> Result<(Numeral, u64), KernelError> {
    let mut run = Run::new(Kernel::new(names.clone()), fuel, false);
    let n = run.nat(u)?;
    Ok((n, run.steps))
}

pub fn eval_nat(names: &NameCtx, u: &Term, fuel: u64) -> Result<Numeral, KernelError> {
    eval_nat_steps(names, u, fuel).map(|(n, _)| n)
}

/// A witness `v : A` for `u : ||A||`. Squashes yield their left element
/// and homogeneous compositions their base.
pub fn extract_witness(names: &NameCtx, u: &Term, fuel: u64) -> Result<Term, KernelError> {
    extract_witness_steps(names, u, fuel).map(|(t, _)| t)
}

pub fn extract_witness_steps(
    names: &NameCtx,
    u: &Term,
    fuel: u64,
) -> Result<(Term, u64), KernelError> {
    let mut run = Run::new(Kernel::new(names.clone()), fuel, false);
    let v = run.witness(u)?;
    Ok((v, run.steps))
}

/// What a report records about its definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    Numeral,
    Witness,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Numeral(u64),
    Witness(String),
    Failure(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub name: String,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub steps: u64,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
    #[serde(skip)]
    pub error: Option<KernelError>,
}

/// [`eval_nat`] with every step recorded.
pub fn trace_eval(names: &NameCtx, u: &Term, fuel: u64) -> EvalReport {
    run_report("", names, u, Goal::Numeral, fuel, true)
}

pub fn run_report(
    name: &str,
    names: &NameCtx,
    u: &Term,
    goal: Goal,
    fuel: u64,
    traced: bool,
) -> EvalReport {
    let start = Instant::now();
    let mut run = Run::new(Kernel::new(names.clone()), fuel, traced);
    let result = match goal {
        Goal::Numeral => run.nat(u).map(|n| Outcome::Numeral(n.0)),
        Goal::Witness => run.witness(u).map(|v| Outcome::Witness(v.to_string())),
    };
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(e) => (Outcome::Failure(e.to_string()), Some(e)),
    };
    EvalReport {
        name: name.to_string(),
        outcome,
        steps: run.steps,
        wall_ms: start.elapsed().as_secs_f64() * 1000.0,
        trace: run.trace,
        error,
    }
}

/// One entry of a batch evaluation.
#[derive(Clone, Debug)]
pub struct Job {
    pub name: String,
    pub names: NameCtx,
    pub term: Term,
    pub goal: Goal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Schedule {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Schedule::Parallel;
        #[cfg(not(feature = "parallel"))]
        Schedule::Sequential
    }
}

/// Evaluates every job; results come back in job order whatever the
/// schedule.
pub fn run_batch(jobs: &[Job], fuel: u64, traced: bool, schedule: Schedule) -> Vec<EvalReport> {
    let one = |j: &Job| run_report(&j.name, &j.names, &j.term, j.goal, fuel, traced);
    match schedule {
        Schedule::Sequential => jobs.iter().map(one).collect(),
        #[cfg(feature = "parallel")]
        Schedule::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(one).collect()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub sample: usize,
    pub subst: String,
    pub expected: u64,
    pub got: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub samples: usize,
    pub expected: Option<u64>,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.expected.is_some() && self.violations.is_empty()
    }
}

fn sample_seed(seed: u64, k: usize) -> u64 {
    // splitmix64 of the pair, so samples are independent of evaluation order
    let mut z = seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_literal(rng: &mut ChaCha8Rng, target: &[Name]) -> Interval {
    let k = rng.gen_range(0..target.len());
    let r = Interval::name(target[k].clone());
    if rng.gen_bool(0.5) {
        r.rev()
    } else {
        r
    }
}

fn random_interval(rng: &mut ChaCha8Rng, target: &[Name]) -> Interval {
    let pick = if target.is_empty() {
        rng.gen_range(0..2)
    } else {
        rng.gen_range(0..6)
    };
    match pick {
        0 => Interval::zero(),
        1 => Interval::one(),
        2 | 3 => random_literal(rng, target),
        4 => random_literal(rng, target).meet(&random_literal(rng, target)),
        _ => random_literal(rng, target).join(&random_literal(rng, target)),
    }
}

/// A random substitution out of `names` into a fresh context of up to
/// three names whose bases avoid those of `names`.
pub fn random_subst(names: &NameCtx, rng: &mut ChaCha8Rng) -> NameSubst {
    let width = rng.gen_range(0..=3);
    let mut target = Vec::new();
    let mut k = 0;
    while target.len() < width {
        let n = Name::new(&format!("k{k}"));
        k += 1;
        if !names.contains(&n) {
            target.push(n);
        }
    }
    let map: BTreeMap<Name, Interval> = names
        .names()
        .iter()
        .map(|n| (n.clone(), random_interval(rng, &target)))
        .collect();
    NameSubst::new(names.clone(), NameCtx::from_names(target), map)
        .expect("images are built over the target")
}

fn show_subst(f: &NameSubst) -> String {
    let parts: Vec<String> = f.map().iter().map(|(n, r)| format!("{n} -> {r}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Checks that evaluation at `N` commutes with `samples` random name
/// substitutions.
pub fn coherence_audit(
    names: &NameCtx,
    u: &Term,
    samples: usize,
    seed: u64,
    fuel: u64,
    schedule: Schedule,
) -> AuditReport {
    let expected = match eval_nat(names, u, fuel) {
        Ok(n) => n.0,
        Err(_) => {
            return AuditReport {
                samples,
                expected: None,
                violations: Vec::new(),
            }
        }
    };
    let sample = |k: usize| -> Option<Violation> {
        let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, k));
        let f = random_subst(names, &mut rng);
        let got = f
            .apply(u)
            .map_err(|e| e.to_string())
            .and_then(|uf| eval_nat(f.codomain(), &uf, fuel).map_err(|e| e.to_string()));
        match got {
            Ok(n) if n.0 == expected => None,
            other => Some(Violation {
                sample: k,
                subst: show_subst(&f),
                expected,
                got: match other {
                    Ok(n) => n.0.to_string(),
                    Err(e) => e,
                },
            }),
        }
    };
    let violations: Vec<Violation> = match schedule {
        Schedule::Sequential => (0..samples).filter_map(sample).collect(),
        #[cfg(feature = "parallel")]
        Schedule::Parallel => {
            use rayon::prelude::*;
            (0..samples).into_par_iter().filter_map(sample).collect()
        }
    };
    AuditReport {
        samples,
        expected: Some(expected),
        violations,
    }
}
