//! Deterministic weak-head reduction over name contexts.
//!
//! [`whnf_step`] picks the rule that applies to the outer form of a term
//! by an ordered dispatch and then contracts it. Every rule also has an
//! independent applicability predicate, [`guard`], used by the test suite
//! to check that at most one rule ever applies.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::derived::{self, at_end, map_sys, GlueCompInputs};
use crate::faces::{face_of_eq1, min_true_index, total_face, Face};
use crate::interval::Interval;
use crate::subst::{subst_name, term_subst};
use crate::syntax::{GlueBranch, Name, NameCtx, Sys, Term, TermKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    NatrecZero,
    NatrecSuc,
    NatrecCong,
    Beta,
    AppCong,
    FstPair,
    FstCong,
    SndPair,
    SndCong,
    PathBeta,
    PAppCong,
    PathEndpointNeutral,
    CompFaceOne,
    SystemTSelect,
    SystemESelect,
    GlueTypeCollapse,
    GlueElemCollapse,
    UnglueCollapse,
    UnglueGlue,
    UnglueCong,
    CompTypeCong,
    CompNZero,
    CompNSuc,
    CompNCong,
    CompPi,
    CompSigma,
    CompPath,
    CompGlue,
    CompU,
    CompS1Collapse,
    CompInh,
    LoopEnd,
    S1ElimBase,
    S1ElimLoop,
    S1ElimComp,
    S1ElimCong,
    SquashLeft,
    SquashRight,
    HcompCollapse,
    FwdOne,
    FwdInc,
    FwdSquash,
    FwdHcomp,
    FwdCong,
    InhElimInc,
    InhElimSquash,
    InhElimHcomp,
    InhElimCong,
}

impl RuleId {
    pub const ALL: [RuleId; 48] = {
        use RuleId::*;
        [
            NatrecZero,
            NatrecSuc,
            NatrecCong,
            Beta,
            AppCong,
            FstPair,
            FstCong,
            SndPair,
            SndCong,
            PathBeta,
            PAppCong,
            PathEndpointNeutral,
            CompFaceOne,
            SystemTSelect,
            SystemESelect,
            GlueTypeCollapse,
            GlueElemCollapse,
            UnglueCollapse,
            UnglueGlue,
            UnglueCong,
            CompTypeCong,
            CompNZero,
            CompNSuc,
            CompNCong,
            CompPi,
            CompSigma,
            CompPath,
            CompGlue,
            CompU,
            CompS1Collapse,
            CompInh,
            LoopEnd,
            S1ElimBase,
            S1ElimLoop,
            S1ElimComp,
            S1ElimCong,
            SquashLeft,
            SquashRight,
            HcompCollapse,
            FwdOne,
            FwdInc,
            FwdSquash,
            FwdHcomp,
            FwdCong,
            InhElimInc,
            InhElimSquash,
            InhElimHcomp,
            InhElimCong,
        ]
    };

    pub fn is_congruence(self) -> bool {
        use RuleId::*;
        matches!(
            self,
            NatrecCong
                | AppCong
                | FstCong
                | SndCong
                | PAppCong
                | UnglueCong
                | CompTypeCong
                | CompNCong
                | S1ElimCong
                | FwdCong
                | InhElimCong
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Whether a rule commutes with every name substitution.
///
/// A rule is stable unless it has a premise with a negated face equation
/// or a premise that is itself a reduction. Selecting the least true
/// branch of a constraint list is classified unstable as well: after a
/// substitution an earlier branch may become true.
pub fn is_subst_stable_rule(rule: RuleId) -> bool {
    use RuleId::*;
    match rule {
        NatrecZero | NatrecSuc | Beta | FstPair | SndPair | PathBeta | CompNZero | CompNSuc
        | CompPi | CompSigma | CompPath | CompU | CompInh | LoopEnd | S1ElimBase | SquashLeft
        | SquashRight | FwdOne | InhElimInc | CompFaceOne => true,
        NatrecCong | AppCong | FstCong | SndCong | PAppCong | PathEndpointNeutral
        | SystemTSelect | SystemESelect | GlueTypeCollapse | GlueElemCollapse | UnglueCollapse
        | UnglueGlue | UnglueCong | CompTypeCong | CompNCong | CompGlue | CompS1Collapse
        | S1ElimLoop | S1ElimComp | S1ElimCong | HcompCollapse | FwdInc | FwdSquash | FwdHcomp
        | FwdCong | InhElimSquash | InhElimHcomp | InhElimCong => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StuckReason {
    OpenVariable(String),
    NoRule(String),
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::OpenVariable(x) => write!(f, "open variable {x}"),
            StuckReason::NoRule(what) => write!(f, "no rule applies to {what}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Step {
    /// `rules` lists the congruences taken, outermost first, ending with
    /// the rule that contracted the redex.
    Stepped {
        term: Term,
        rules: Vec<RuleId>,
    },
    Whnf,
    Stuck(StuckReason),
}

impl Step {
    pub fn rule(&self) -> Option<RuleId> {
        match self {
            Step::Stepped { rules, .. } => rules.first().copied(),
            _ => None,
        }
    }

    pub fn redex_rule(&self) -> Option<RuleId> {
        match self {
            Step::Stepped { rules, .. } => rules.last().copied(),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Error)]
pub enum KernelError {
    #[error("evaluation stuck: {reason} (at {term})")]
    Stuck { reason: StuckReason, term: Term },
    #[error("fuel of {fuel} steps exhausted; last rules {tail:?}")]
    FuelExhausted { fuel: u64, tail: Vec<RuleId> },
}

/// Hook for reducing open terms, used by the checker: the endpoint of a
/// neutral path is read off its type.
pub trait Neutrals: Sync {
    fn path_endpoint(&self, p: &Term, one: bool) -> Option<Term>;
}

fn iv(n: &Name) -> Interval {
    Interval::name(n.clone())
}

fn describe(t: &Term) -> String {
    let s = t.to_string();
    if s.len() > 120 {
        format!(
            "{}...",
            &s[..s.char_indices().nth(117).map_or(s.len(), |(k, _)| k)]
        )
    } else {
        s
    }
}

/// Endpoint of an interval element, if it is one.
fn end_of(r: &Interval) -> Option<bool> {
    if r.is_zero() {
        Some(false)
    } else if r.is_one() {
        Some(true)
    } else {
        None
    }
}

fn has_true<T>(sys: &[(Face, T)]) -> bool {
    min_true_index(sys).is_some()
}

fn glue_faces(branches: &[GlueBranch]) -> Vec<(Face, ())> {
    branches.iter().map(|b| (b.face.clone(), ())).collect()
}

/// `t` is `I`-introduced: its outer form is an introduction and the side
/// conditions hold.
pub fn is_introduced(_names: &NameCtx, t: &Term) -> bool {
    introduced(t)
}

fn introduced(t: &Term) -> bool {
    use TermKind::*;
    match t.kind() {
        Nat
        | Zero
        | Suc(_)
        | Pi { .. }
        | Lam { .. }
        | Sigma { .. }
        | Pair(..)
        | PathT { .. }
        | PAbs { .. }
        | U
        | S1
        | Base
        | Inh(_)
        | Inc(_) => true,
        GlueT { branches, .. } => !has_true(&glue_faces(branches)),
        GlueE { sys, .. } => !has_true(sys),
        SystemT(sys) | SystemE(sys) => total_face(sys).is_one() && !has_true(sys),
        Loop(r) | Squash(_, _, r) => end_of(r).is_none(),
        Hcomp { sys, .. } => !has_true(sys),
        Comp { line, sys, .. } => matches!(line.kind(), S1) && !has_true(sys),
        _ => false,
    }
}

/// The rule the ordered dispatch selects for the outer form of `t`.
pub fn dispatch(t: &Term) -> Option<RuleId> {
    use RuleId::*;
    use TermKind::*;
    let r = match t.kind() {
        Natrec { scrut, .. } => match scrut.kind() {
            Zero => NatrecZero,
            Suc(_) => NatrecSuc,
            _ if !introduced(scrut) => NatrecCong,
            _ => return None,
        },
        App(f, _) => match f.kind() {
            Lam { .. } => Beta,
            _ if !introduced(f) => AppCong,
            _ => return None,
        },
        Fst(p) => match p.kind() {
            Pair(..) => FstPair,
            _ if !introduced(p) => FstCong,
            _ => return None,
        },
        Snd(p) => match p.kind() {
            Pair(..) => SndPair,
            _ if !introduced(p) => SndCong,
            _ => return None,
        },
        PApp(p, _) => match p.kind() {
            PAbs { .. } => PathBeta,
            _ if !introduced(p) => PAppCong,
            _ => return None,
        },
        SystemT(sys) if has_true(sys) => SystemTSelect,
        SystemE(sys) if has_true(sys) => SystemESelect,
        GlueT { branches, .. } if has_true(&glue_faces(branches)) => GlueTypeCollapse,
        GlueE { sys, .. } if has_true(sys) => GlueElemCollapse,
        Unglue { sys, arg } => {
            if has_true(sys) {
                UnglueCollapse
            } else if matches!(arg.kind(), GlueE { sys: gs, .. } if !has_true(gs)) {
                UnglueGlue
            } else if !introduced(arg) {
                UnglueCong
            } else {
                return None;
            }
        }
        Comp {
            line, sys, base, ..
        } => {
            if !introduced(line) {
                CompTypeCong
            } else {
                match line.kind() {
                    Nat => match base.kind() {
                        Zero => CompNZero,
                        Suc(_) => CompNSuc,
                        _ if !introduced(base) => CompNCong,
                        _ => return None,
                    },
                    Pi { .. } => CompPi,
                    Sigma { .. } => CompSigma,
                    PathT { .. } => CompPath,
                    GlueT { .. } => CompGlue,
                    U => CompU,
                    S1 if has_true(sys) => CompS1Collapse,
                    Inh(_) => CompInh,
                    _ => return None,
                }
            }
        }
        Loop(r) if end_of(r).is_some() => LoopEnd,
        S1Elim { scrut, .. } => match scrut.kind() {
            Base => S1ElimBase,
            Loop(r) if end_of(r).is_none() => S1ElimLoop,
            Comp { line, .. } if introduced(scrut) && matches!(line.kind(), S1) => S1ElimComp,
            _ if !introduced(scrut) => S1ElimCong,
            _ => return None,
        },
        Squash(_, _, r) => match end_of(r) {
            Some(false) => SquashLeft,
            Some(true) => SquashRight,
            None => return None,
        },
        Hcomp { sys, .. } if has_true(sys) => HcompCollapse,
        Fwd { at, arg, .. } => {
            if at.is_one() {
                FwdOne
            } else {
                match arg.kind() {
                    Inc(_) => FwdInc,
                    Squash(_, _, s) if end_of(s).is_none() => FwdSquash,
                    Hcomp { sys, .. } if !has_true(sys) => FwdHcomp,
                    _ if !introduced(arg) => FwdCong,
                    _ => return None,
                }
            }
        }
        InhElim { scrut, .. } => match scrut.kind() {
            Inc(_) => InhElimInc,
            Squash(_, _, r) if end_of(r).is_none() => InhElimSquash,
            Hcomp { sys, .. } if !has_true(sys) => InhElimHcomp,
            _ if !introduced(scrut) => InhElimCong,
            _ => return None,
        },
        _ => return None,
    };
    Some(r)
}

/// Unordered applicability predicate of each rule, written independently
/// of [`dispatch`].
pub fn guard(rule: RuleId, t: &Term) -> bool {
    use RuleId::*;
    use TermKind::*;
    let ni = |u: &Term| !introduced(u);
    let one = |f: &Face| f.is_one();
    match (rule, t.kind()) {
        (NatrecZero, Natrec { scrut, .. }) => matches!(scrut.kind(), Zero),
        (NatrecSuc, Natrec { scrut, .. }) => matches!(scrut.kind(), Suc(_)),
        (NatrecCong, Natrec { scrut, .. }) => ni(scrut),
        (Beta, App(f, _)) => matches!(f.kind(), Lam { .. }),
        (AppCong, App(f, _)) => ni(f),
        (FstPair, Fst(p)) | (SndPair, Snd(p)) => matches!(p.kind(), Pair(..)),
        (FstCong, Fst(p)) | (SndCong, Snd(p)) => ni(p),
        (PathBeta, PApp(p, _)) => matches!(p.kind(), PAbs { .. }),
        (PAppCong, PApp(p, _)) => ni(p),
        (SystemTSelect, SystemT(sys)) | (SystemESelect, SystemE(sys)) => {
            sys.iter().any(|(f, _)| one(f))
        }
        (GlueTypeCollapse, GlueT { branches, .. }) => branches.iter().any(|b| one(&b.face)),
        (GlueElemCollapse, GlueE { sys, .. }) => sys.iter().any(|(f, _)| one(f)),
        (UnglueCollapse, Unglue { sys, .. }) => sys.iter().any(|(f, _)| one(f)),
        (UnglueGlue, Unglue { sys, arg }) => {
            !sys.iter().any(|(f, _)| one(f))
                && matches!(arg.kind(), GlueE { sys: gs, .. } if !gs.iter().any(|(f, _)| one(f)))
        }
        (UnglueCong, Unglue { sys, arg }) => !sys.iter().any(|(f, _)| one(f)) && ni(arg),
        (CompTypeCong, Comp { line, .. }) => ni(line),
        (
            rule,
            Comp {
                line, sys, base, ..
            },
        ) if !ni(line) => match (rule, line.kind()) {
            (CompNZero, Nat) => matches!(base.kind(), Zero),
            (CompNSuc, Nat) => matches!(base.kind(), Suc(_)),
            (CompNCong, Nat) => ni(base),
            (CompPi, Pi { .. })
            | (CompSigma, Sigma { .. })
            | (CompPath, PathT { .. })
            | (CompGlue, GlueT { .. })
            | (CompU, U)
            | (CompInh, Inh(_)) => true,
            (CompS1Collapse, S1) => sys.iter().any(|(f, _)| one(f)),
            _ => false,
        },
        (LoopEnd, Loop(r)) => r.is_zero() || r.is_one(),
        (S1ElimBase, S1Elim { scrut, .. }) => matches!(scrut.kind(), Base),
        (S1ElimLoop, S1Elim { scrut, .. }) => {
            matches!(scrut.kind(), Loop(r) if !r.is_zero() && !r.is_one())
        }
        (S1ElimComp, S1Elim { scrut, .. }) => match scrut.kind() {
            Comp { line, sys, .. } => matches!(line.kind(), S1) && !sys.iter().any(|(f, _)| one(f)),
            _ => false,
        },
        (S1ElimCong, S1Elim { scrut, .. }) => ni(scrut),
        (SquashLeft, Squash(_, _, r)) => r.is_zero(),
        (SquashRight, Squash(_, _, r)) => r.is_one(),
        (HcompCollapse, Hcomp { sys, .. }) => sys.iter().any(|(f, _)| one(f)),
        (FwdOne, Fwd { at, .. }) => at.is_one(),
        (rule, Fwd { at, arg, .. }) if !at.is_one() => match (rule, arg.kind()) {
            (FwdInc, Inc(_)) => true,
            (FwdSquash, Squash(_, _, s)) => !s.is_zero() && !s.is_one(),
            (FwdHcomp, Hcomp { sys, .. }) => !sys.iter().any(|(f, _)| one(f)),
            (FwdCong, _) => ni(arg),
            _ => false,
        },
        (InhElimInc, InhElim { scrut, .. }) => matches!(scrut.kind(), Inc(_)),
        (InhElimSquash, InhElim { scrut, .. }) => {
            matches!(scrut.kind(), Squash(_, _, r) if !r.is_zero() && !r.is_one())
        }
        (InhElimHcomp, InhElim { scrut, .. }) => match scrut.kind() {
            Hcomp { sys, .. } => !sys.iter().any(|(f, _)| one(f)),
            _ => false,
        },
        (InhElimCong, InhElim { scrut, .. }) => ni(scrut),
        _ => false,
    }
}

/// The reduction engine for one name context.
pub struct Kernel<'a> {
    names: NameCtx,
    neutrals: Option<&'a dyn Neutrals>,
}

impl<'a> Kernel<'a> {
    pub fn new(names: NameCtx) -> Kernel<'static> {
        Kernel {
            names,
            neutrals: None,
        }
    }

    pub fn with_neutrals(names: NameCtx, neutrals: &'a dyn Neutrals) -> Kernel<'a> {
        Kernel {
            names,
            neutrals: Some(neutrals),
        }
    }

    pub fn names(&self) -> &NameCtx {
        &self.names
    }

    fn under(&self, dim: &Name) -> Kernel<'a> {
        Kernel {
            names: self.names.extend(dim.clone()),
            neutrals: self.neutrals,
        }
    }

    pub fn step(&self, t: &Term) -> Step {
        if self.neutrals.is_some() {
            if let Some(s) = self.open_step(t) {
                return s;
            }
        }
        match dispatch(t) {
            Some(rule) => self.contract(rule, t),
            None if introduced(t) => Step::Whnf,
            None => match t.kind() {
                TermKind::Var(x) => Step::Stuck(StuckReason::OpenVariable(x.to_string())),
                _ => Step::Stuck(StuckReason::NoRule(describe(t))),
            },
        }
    }

    /// Adjustments for open terms. A composition with a true face is its
    /// constraint at the end; this holds judgmentally, but the closed
    /// engine never needs it. The zero and successor rules at `N` trust
    /// that constraints agree with the base along the line, which only
    /// follows from typing when the constraints are closed.
    fn open_step(&self, t: &Term) -> Option<Step> {
        let TermKind::Comp {
            dim,
            line,
            sys,
            base,
        } = t.kind()
        else {
            return None;
        };
        if let Some(k) = min_true_index(sys) {
            return Some(Step::Stepped {
                term: at_end(&sys[k].1, dim, true),
                rules: vec![RuleId::CompFaceOne],
            });
        }
        let closed = sys.iter().all(|(_, u)| u.free_vars().is_empty());
        let trusted = matches!(line.kind(), TermKind::Nat)
            && matches!(base.kind(), TermKind::Zero | TermKind::Suc(_));
        (trusted && !closed).then(|| Step::Stuck(StuckReason::NoRule(describe(t))))
    }

    /// Steps `inner` and rebuilds the enclosing term around its reduct.
    fn cong(&self, rule: RuleId, inner: &Term, rebuild: impl FnOnce(Term) -> Term) -> Step {
        match self.step(inner) {
            Step::Stepped { term, rules } => {
                let mut all = Vec::with_capacity(rules.len() + 1);
                all.push(rule);
                all.extend(rules);
                Step::Stepped {
                    term: rebuild(term),
                    rules: all,
                }
            }
            Step::Whnf => Step::Stuck(StuckReason::NoRule(describe(inner))),
            stuck => stuck,
        }
    }

    /// Applies `rule` to the outer form of `t`; the rule must apply.
    pub fn contract(&self, rule: RuleId, t: &Term) -> Step {
        use RuleId::*;
        use TermKind::*;
        let done = |term: Term| Step::Stepped {
            term,
            rules: vec![rule],
        };
        let wrong = || Step::Stuck(StuckReason::NoRule(describe(t)));
        match (rule, t.kind()) {
            (
                NatrecZero | NatrecSuc | NatrecCong,
                Natrec {
                    var,
                    motive,
                    scrut,
                    zero,
                    succ,
                },
            ) => {
                let rebuild = |s: Term| {
                    Term::natrec(var.clone(), motive.clone(), s, zero.clone(), succ.clone())
                };
                match (rule, scrut.kind()) {
                    (NatrecZero, Zero) => done(zero.clone()),
                    (NatrecSuc, Suc(k)) => done(Term::app(
                        Term::app(succ.clone(), k.clone()),
                        rebuild(k.clone()),
                    )),
                    (NatrecCong, _) => self.cong(rule, scrut, rebuild),
                    _ => wrong(),
                }
            }
            (Beta, App(f, a)) => match f.kind() {
                Lam { var, body, .. } => done(term_subst(body, var, a)),
                _ => wrong(),
            },
            (AppCong, App(f, a)) => self.cong(rule, f, |g| Term::app(g, a.clone())),
            (FstPair, Fst(p)) => match p.kind() {
                Pair(a, _) => done(a.clone()),
                _ => wrong(),
            },
            (SndPair, Snd(p)) => match p.kind() {
                Pair(_, b) => done(b.clone()),
                _ => wrong(),
            },
            (FstCong, Fst(p)) => self.cong(rule, p, Term::fst),
            (SndCong, Snd(p)) => self.cong(rule, p, Term::snd),
            (PathBeta, PApp(p, r)) => match p.kind() {
                PAbs { dim, body } => done(subst_name(body, dim, r)),
                _ => wrong(),
            },
            (PAppCong, PApp(p, r)) => {
                let step = self.cong(rule, p, |q| Term::papp(q, r.clone()));
                match (&step, end_of(r), self.neutrals) {
                    (Step::Stuck(_), Some(one), Some(hook)) => match hook.path_endpoint(p, one) {
                        Some(e) => Step::Stepped {
                            term: e,
                            rules: vec![PathEndpointNeutral],
                        },
                        None => step,
                    },
                    _ => step,
                }
            }
            (SystemTSelect, SystemT(sys)) | (SystemESelect, SystemE(sys)) => {
                match min_true_index(sys) {
                    Some(k) => done(sys[k].1.clone()),
                    None => wrong(),
                }
            }
            (GlueTypeCollapse, GlueT { branches, .. }) => {
                match min_true_index(&glue_faces(branches)) {
                    Some(k) => done(branches[k].ty.clone()),
                    None => wrong(),
                }
            }
            (GlueElemCollapse, GlueE { sys, .. }) => match min_true_index(sys) {
                Some(k) => done(sys[k].1.clone()),
                None => wrong(),
            },
            (UnglueCollapse, Unglue { sys, arg }) => match min_true_index(sys) {
                Some(k) => done(Term::app(Term::fst(sys[k].1.clone()), arg.clone())),
                None => wrong(),
            },
            (UnglueGlue, Unglue { arg, .. }) => match arg.kind() {
                GlueE { base, .. } => done(base.clone()),
                _ => wrong(),
            },
            (UnglueCong, Unglue { sys, arg }) => {
                self.cong(rule, arg, |a| Term::unglue(sys.clone(), a))
            }
            (
                _,
                Comp {
                    dim,
                    line,
                    sys,
                    base,
                },
            ) => self.contract_comp(rule, t, dim, line, sys, base),
            (LoopEnd, Loop(r)) if end_of(r).is_some() => done(Term::base()),
            (rule, S1Elim { .. }) => self.contract_s1_elim(rule, t),
            (SquashLeft, Squash(u, _, r)) if r.is_zero() => done(u.clone()),
            (SquashRight, Squash(_, v, r)) if r.is_one() => done(v.clone()),
            (HcompCollapse, Hcomp { dim, sys, .. }) => match min_true_index(sys) {
                Some(k) => done(at_end(&sys[k].1, dim, true)),
                None => wrong(),
            },
            (rule, Fwd { .. }) => self.contract_fwd(rule, t),
            (rule, InhElim { .. }) => self.contract_inh_elim(rule, t),
            _ => wrong(),
        }
    }

    fn contract_comp(
        &self,
        rule: RuleId,
        t: &Term,
        dim: &Name,
        line: &Term,
        sys: &Sys,
        base: &Term,
    ) -> Step {
        use RuleId::*;
        use TermKind::*;
        let done = |term: Term| Step::Stepped {
            term,
            rules: vec![rule],
        };
        let wrong = || Step::Stuck(StuckReason::NoRule(describe(t)));
        match rule {
            CompTypeCong => {
                return self.under(dim).cong(rule, line, |l| {
                    Term::comp(dim.clone(), l, sys.clone(), base.clone())
                })
            }
            CompNCong => {
                return self.cong(rule, base, |b| {
                    Term::comp(dim.clone(), line.clone(), sys.clone(), b)
                })
            }
            _ => {}
        }
        // The constructions below mix terms under the binder with outer
        // terms, so the direction is renamed apart first.
        let i = dim.fresh();
        let ri = iv(&i);
        let line = subst_name(line, dim, &ri);
        let sys = map_sys(sys, |u| subst_name(u, dim, &ri));
        match (rule, line.kind()) {
            (CompNZero, Nat) if matches!(base.kind(), Zero) => done(Term::zero()),
            (CompNSuc, Nat) => match base.kind() {
                Suc(b) => done(Term::suc(Term::comp(
                    i,
                    Term::nat(),
                    map_sys(&sys, |u| Term::app(derived::pred_term(), u.clone())),
                    b.clone(),
                ))),
                _ => wrong(),
            },
            (CompPi, Pi { var, dom, cod }) => {
                let y = var.fresh();
                let rev = ri.rev();
                let yp = derived::fill(
                    &i,
                    &subst_name(dom, &i, &rev),
                    &vec![],
                    &Term::var(y.clone()),
                );
                let ybar = subst_name(&yp, &i, &rev);
                let ybar0 = at_end(&ybar, &i, false);
                done(Term::lam(
                    y,
                    at_end(dom, &i, true),
                    Term::comp(
                        i.clone(),
                        term_subst(cod, var, &ybar),
                        map_sys(&sys, |u| Term::app(u.clone(), ybar.clone())),
                        Term::app(base.clone(), ybar0),
                    ),
                ))
            }
            (
                CompSigma,
                Sigma {
                    var,
                    fst_ty,
                    snd_ty,
                },
            ) => {
                let v = derived::fill(
                    &i,
                    fst_ty,
                    &map_sys(&sys, |u| Term::fst(u.clone())),
                    &Term::fst(base.clone()),
                );
                done(Term::pair(
                    at_end(&v, &i, true),
                    Term::comp(
                        i.clone(),
                        term_subst(snd_ty, var, &v),
                        map_sys(&sys, |u| Term::snd(u.clone())),
                        Term::snd(base.clone()),
                    ),
                ))
            }
            (
                CompPath,
                PathT {
                    dim: j,
                    ty,
                    left,
                    right,
                },
            ) => {
                let k = j.fresh();
                let rk = iv(&k);
                let mut constraints: Sys = vec![
                    (Face::atom(k.clone(), false), left.clone()),
                    (Face::atom(k.clone(), true), right.clone()),
                ];
                constraints.extend(map_sys(&sys, |u| Term::papp(u.clone(), rk.clone())));
                done(Term::pabs(
                    k,
                    Term::comp(
                        i,
                        subst_name(ty, j, &rk),
                        constraints,
                        Term::papp(base.clone(), rk.clone()),
                    ),
                ))
            }
            (CompGlue, GlueT { branches, base: a }) => done(derived::glue_comp(&GlueCompInputs {
                dim: i,
                branches: branches.clone(),
                base_ty: a.clone(),
                sys,
                base: base.clone(),
            })),
            (CompU, U) => done(Term::glue_t(
                sys.iter()
                    .map(|(f, u)| GlueBranch {
                        face: f.clone(),
                        ty: at_end(u, &i, true),
                        equiv: derived::ptoeq(&i, &subst_name(u, &i, &ri.rev())),
                    })
                    .collect(),
                base.clone(),
            )),
            (CompS1Collapse, S1) => match min_true_index(&sys) {
                Some(k) => done(at_end(&sys[k].1, &i, true)),
                None => wrong(),
            },
            (CompInh, Inh(a)) => {
                let j = i.fresh();
                let line_j = subst_name(a, &i, &iv(&j));
                done(Term::hcomp(
                    at_end(a, &i, true),
                    i.clone(),
                    map_sys(&sys, |u| {
                        Term::fwd(j.clone(), line_j.clone(), ri.clone(), u.clone())
                    }),
                    Term::fwd(i.clone(), a.clone(), Interval::zero(), base.clone()),
                ))
            }
            _ => wrong(),
        }
    }

    fn contract_s1_elim(&self, rule: RuleId, t: &Term) -> Step {
        use RuleId::*;
        use TermKind::*;
        let TermKind::S1Elim {
            var,
            motive,
            scrut,
            base_case,
            loop_case,
        } = t.kind()
        else {
            unreachable!("caller matched S1Elim")
        };
        let done = |term: Term| Step::Stepped {
            term,
            rules: vec![rule],
        };
        let wrong = || Step::Stuck(StuckReason::NoRule(describe(t)));
        let elim = |s: Term| {
            Term::s1_elim(
                var.clone(),
                motive.clone(),
                s,
                base_case.clone(),
                loop_case.clone(),
            )
        };
        match (rule, scrut.kind()) {
            (S1ElimBase, Base) => done(base_case.clone()),
            (S1ElimLoop, Loop(r)) => done(Term::papp(loop_case.clone(), r.clone())),
            (S1ElimComp, Comp { dim, sys, base, .. }) => {
                let i = dim.fresh();
                let sys = map_sys(sys, |u| subst_name(u, dim, &iv(&i)));
                let v = derived::fill(&i, &Term::s1(), &sys, base);
                done(Term::comp(
                    i,
                    term_subst(motive, var, &v),
                    map_sys(&sys, |u| elim(u.clone())),
                    elim(base.clone()),
                ))
            }
            (S1ElimCong, _) => self.cong(rule, scrut, elim),
            _ => wrong(),
        }
    }

    fn contract_fwd(&self, rule: RuleId, t: &Term) -> Step {
        use RuleId::*;
        use TermKind::*;
        let TermKind::Fwd { dim, line, at, arg } = t.kind() else {
            unreachable!("caller matched Fwd")
        };
        let done = |term: Term| Step::Stepped {
            term,
            rules: vec![rule],
        };
        let wrong = || Step::Stuck(StuckReason::NoRule(describe(t)));
        let fwd = |u: Term| Term::fwd(dim.clone(), line.clone(), at.clone(), u);
        match (rule, arg.kind()) {
            (FwdOne, _) if at.is_one() => done(arg.clone()),
            (FwdInc, Inc(a)) => {
                let k = dim.fresh();
                let ty = subst_name(line, dim, &iv(&k).join(at));
                done(Term::inc(Term::comp(
                    k,
                    ty,
                    vec![(face_of_eq1(at), a.clone())],
                    a.clone(),
                )))
            }
            (FwdSquash, Squash(u, v, s)) => {
                done(Term::squash(fwd(u.clone()), fwd(v.clone()), s.clone()))
            }
            (
                FwdHcomp,
                Hcomp {
                    dim: j, sys, base, ..
                },
            ) => {
                let k = j.fresh();
                let sys = map_sys(sys, |u| subst_name(u, j, &iv(&k)));
                done(Term::hcomp(
                    at_end(line, dim, true),
                    k,
                    map_sys(&sys, |u| fwd(u.clone())),
                    fwd(base.clone()),
                ))
            }
            (FwdCong, _) => self.cong(rule, arg, fwd),
            _ => wrong(),
        }
    }

    fn contract_inh_elim(&self, rule: RuleId, t: &Term) -> Step {
        use RuleId::*;
        use TermKind::*;
        let TermKind::InhElim {
            var,
            motive,
            scrut,
            inc_case,
            squash_case,
        } = t.kind()
        else {
            unreachable!("caller matched InhElim")
        };
        let done = |term: Term| Step::Stepped {
            term,
            rules: vec![rule],
        };
        let wrong = || Step::Stuck(StuckReason::NoRule(describe(t)));
        let elim = |s: Term| {
            Term::inh_elim(
                var.clone(),
                motive.clone(),
                s,
                inc_case.clone(),
                squash_case.clone(),
            )
        };
        match (rule, scrut.kind()) {
            (InhElimInc, Inc(a)) => done(Term::app(inc_case.clone(), a.clone())),
            (InhElimSquash, Squash(u, v, r)) => done(Term::papp(
                Term::apps(
                    squash_case.clone(),
                    [u.clone(), v.clone(), elim(u.clone()), elim(v.clone())],
                ),
                r.clone(),
            )),
            (InhElimHcomp, Hcomp { ty, dim, sys, base }) => {
                let i = dim.fresh();
                let ri = iv(&i);
                let sys = map_sys(sys, |u| subst_name(u, dim, &ri));
                let j = Name::fresh_named("j");
                let ij = ri.meet(&iv(&j));
                let mut wsys = map_sys(&sys, |u| subst_name(u, &i, &ij));
                wsys.push((Face::atom(i.clone(), false), base.clone()));
                let w = Term::hcomp(ty.clone(), j, wsys, base.clone());
                done(Term::comp(
                    i,
                    term_subst(motive, var, &w),
                    map_sys(&sys, |u| elim(u.clone())),
                    elim(base.clone()),
                ))
            }
            (InhElimCong, _) => self.cong(rule, scrut, elim),
            _ => wrong(),
        }
    }

    /// Iterates [`Kernel::step`] to weak-head normal form.
    pub fn whnf(&self, t: &Term, fuel: u64) -> Result<(Term, u64), KernelError> {
        let mut cur = t.clone();
        let mut steps = 0;
        let mut tail: Vec<RuleId> = Vec::new();
        loop {
            match self.step(&cur) {
                Step::Whnf => return Ok((cur, steps)),
                Step::Stuck(reason) => return Err(KernelError::Stuck { reason, term: cur }),
                Step::Stepped { term, rules } => {
                    if steps >= fuel {
                        return Err(KernelError::FuelExhausted { fuel, tail });
                    }
                    steps += 1;
                    if tail.len() == 8 {
                        tail.remove(0);
                    }
                    tail.push(*rules.last().expect("nonempty rule chain"));
                    cur = term;
                }
            }
        }
    }
}

pub fn whnf_step(names: &NameCtx, t: &Term) -> Step {
    Kernel::new(names.clone()).step(t)
}

pub fn whnf(names: &NameCtx, t: &Term, fuel: u64) -> Result<Term, KernelError> {
    Kernel::new(names.clone()).whnf(t, fuel).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    fn ctx(ns: &[&str]) -> NameCtx {
        NameCtx::from_names(ns.iter().map(|s| Name::new(s)))
    }

    fn stepped(s: Step) -> (Term, RuleId) {
        match s {
            Step::Stepped { term, rules } => (term, rules[0]),
            other => panic!("expected a step, got {other:?}"),
        }
    }

    fn s_case() -> Term {
        let x = Name::new("x");
        let y = Name::new("y");
        Term::lam(
            x,
            Term::nat(),
            Term::lam(y.clone(), Term::nat(), Term::suc(Term::var(y))),
        )
    }

    #[test]
    fn natrec_zero() {
        let t = Term::natrec(
            Name::new("_"),
            Term::nat(),
            Term::zero(),
            Term::numeral(1),
            s_case(),
        );
        let (r, rule) = stepped(whnf_step(&ctx(&[]), &t));
        assert_eq!(rule, RuleId::NatrecZero);
        assert!(alpha_eq(&r, &Term::numeral(1)));
    }

    #[test]
    fn beta() {
        let x = Name::new("x");
        let t = Term::app(
            Term::lam(x.clone(), Term::nat(), Term::var(x)),
            Term::zero(),
        );
        let (r, rule) = stepped(whnf_step(&ctx(&[]), &t));
        assert_eq!(rule, RuleId::Beta);
        assert!(alpha_eq(&r, &Term::zero()));
    }

    #[test]
    fn unglue_of_glue() {
        let i = Name::new("i");
        let f = Face::atom(i, false);
        let w = Term::var(Name::new("w"));
        let t = Term::unglue(
            vec![(f.clone(), w)],
            Term::glue_e(vec![(f, Term::var(Name::new("t")))], Term::zero()),
        );
        let (r, rule) = stepped(whnf_step(&ctx(&["i"]), &t));
        assert_eq!(rule, RuleId::UnglueGlue);
        assert!(alpha_eq(&r, &Term::zero()));
    }

    #[test]
    fn comp_nat_suc() {
        let j = Name::new("j");
        let f = Face::atom(j, false);
        let t = Term::comp(
            Name::new("i"),
            Term::nat(),
            vec![(f.clone(), Term::numeral(1))],
            Term::numeral(1),
        );
        let (r, rule) = stepped(whnf_step(&ctx(&["j"]), &t));
        assert_eq!(rule, RuleId::CompNSuc);
        let expect = Term::suc(Term::comp(
            Name::new("i"),
            Term::nat(),
            vec![(f, Term::app(derived::pred_term(), Term::numeral(1)))],
            Term::zero(),
        ));
        assert!(alpha_eq(&r, &expect));
    }

    #[test]
    fn suc_is_whnf() {
        let t = Term::suc(Term::natrec(
            Name::new("_"),
            Term::nat(),
            Term::zero(),
            Term::zero(),
            s_case(),
        ));
        assert!(matches!(whnf_step(&ctx(&[]), &t), Step::Whnf));
    }

    #[test]
    fn whnf_stops_at_suc() {
        let t = Term::natrec(
            Name::new("_"),
            Term::nat(),
            Term::numeral(1),
            Term::zero(),
            s_case(),
        );
        let r = whnf(&ctx(&[]), &t, 100).unwrap();
        assert!(matches!(r.kind(), TermKind::Suc(_)));
    }

    #[test]
    fn glue_type_collapse_and_fwd_one() {
        let g = Term::glue_t(
            vec![GlueBranch {
                face: Face::one(),
                ty: Term::nat(),
                equiv: derived::id_equiv(&Term::nat()),
            }],
            Term::nat(),
        );
        assert!(alpha_eq(&whnf(&ctx(&[]), &g, 10).unwrap(), &Term::nat()));
        let f = Term::fwd(
            Name::new("i"),
            Term::nat(),
            Interval::one(),
            Term::inc(Term::zero()),
        );
        assert!(alpha_eq(
            &whnf(&ctx(&[]), &f, 10).unwrap(),
            &Term::inc(Term::zero())
        ));
    }

    #[test]
    fn introduced_side_conditions() {
        let i = Name::new("i");
        let ri = Interval::name(i);
        let g = Term::glue_t(
            vec![GlueBranch {
                face: Face::one(),
                ty: Term::nat(),
                equiv: Term::zero(),
            }],
            Term::nat(),
        );
        assert!(!is_introduced(&ctx(&[]), &g));
        assert!(is_introduced(
            &ctx(&["i"]),
            &Term::loop_(ri.meet(&ri.rev()))
        ));
        assert!(is_introduced(&ctx(&[]), &Term::numeral(1)));
    }

    #[test]
    fn loop_endpoints() {
        for e in [false, true] {
            let t = Term::loop_(Interval::endpoint(e));
            assert!(matches!(
                whnf(&ctx(&[]), &t, 10).unwrap().kind(),
                TermKind::Base
            ));
        }
    }

    #[test]
    fn stability_table() {
        assert!(is_subst_stable_rule(RuleId::Beta));
        assert!(!is_subst_stable_rule(RuleId::SystemESelect));
        assert!(!is_subst_stable_rule(RuleId::UnglueCong));
        for r in RuleId::ALL {
            if r.is_congruence() {
                assert!(!is_subst_stable_rule(r), "{r}");
            }
        }
    }
}
