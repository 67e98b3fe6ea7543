//! A bidirectional type checker for definitions over name contexts.
//!
//! Restrictions are never kept in the context: a premise under a face
//! `phi` is checked once for every irreducible `alpha <= phi`, in the
//! context with `alpha`'s names set to their endpoints. The universe is
//! typed by itself. Conversion is weak-head comparison with η for
//! functions, pairs and paths; it is incomplete, and running out of fuel
//! is reported as [`CheckError::Incomplete`].

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::derived::{at_end, equiv_type};
use crate::eval::DEFAULT_FUEL;
use crate::faces::{
    face_subst, irreducibles_under, min_true_index, total_face, Face, IrreducibleFace,
};
use crate::interval::Interval;
use crate::reduce::{Kernel, KernelError, Neutrals, Step};
use crate::subst::{subst_name, subst_names, term_subst};
use crate::syntax::{GlueBranch, Name, NameCtx, Sys, Term, TermKind};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unbound name {0}")]
    UnboundName(String),
    #[error("cannot synthesize a type for {0}")]
    CannotSynthesize(String),
    #[error("type mismatch: expected {expected}, got {got}")]
    Mismatch { expected: String, got: String },
    #[error("restriction {face} fails on {alpha}: {message}")]
    RestrictionUnsatisfied {
        face: String,
        alpha: String,
        message: String,
    },
    #[error("conversion gave up: {0}")]
    Incomplete(String),
}

impl CheckError {
    pub fn class(&self) -> &'static str {
        match self {
            CheckError::UnboundVariable(_) => "UnboundVariable",
            CheckError::UnboundName(_) => "UnboundName",
            CheckError::CannotSynthesize(_) => "CannotSynthesize",
            CheckError::Mismatch { .. } => "Mismatch",
            CheckError::RestrictionUnsatisfied { .. } => "RestrictionUnsatisfied",
            CheckError::Incomplete(_) => "Incomplete",
        }
    }

    pub fn face(&self) -> Option<&str> {
        match self {
            CheckError::RestrictionUnsatisfied { alpha, .. } => Some(alpha),
            _ => None,
        }
    }
}

/// A checker verdict for one definition.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub definition: String,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(definition: &str, err: &CheckError) -> Diagnostic {
        Diagnostic {
            definition: definition.to_string(),
            class: err.class().to_string(),
            face: err.face().map(str::to_string),
            message: err.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, CheckError>;

/// Names in scope and typed term variables, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Ctx {
    names: NameCtx,
    vars: Vec<(Name, Term)>,
}

impl Ctx {
    pub fn new(names: NameCtx) -> Ctx {
        Ctx {
            names,
            vars: Vec::new(),
        }
    }

    pub fn names(&self) -> &NameCtx {
        &self.names
    }

    pub fn with_var(&self, x: Name, ty: Term) -> Ctx {
        let mut c = self.clone();
        c.vars.push((x, ty));
        c
    }

    pub fn with_name(&self, i: Name) -> Ctx {
        Ctx {
            names: self.names.extend(i),
            vars: self.vars.clone(),
        }
    }

    fn lookup(&self, x: &Name) -> Option<&Term> {
        self.vars.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    /// The context under `alpha`, with the substitution to apply to terms.
    fn restrict(&self, alpha: &IrreducibleFace) -> Result<(Ctx, BTreeMap<Name, Interval>)> {
        let (names, sigma) =
            face_subst(alpha, &self.names).map_err(|e| CheckError::UnboundName(e.to_string()))?;
        let map = sigma.map().clone();
        let vars = self
            .vars
            .iter()
            .map(|(x, t)| (x.clone(), subst_names(t, &map)))
            .collect();
        Ok((Ctx { names, vars }, map))
    }
}

fn fresh_var(x: &Name) -> Name {
    x.fresh()
}

fn open_var(body: &Term, x: &Name, y: &Name) -> Term {
    term_subst(body, x, &Term::var(y.clone()))
}

fn open_dim(body: &Term, i: &Name, j: &Name) -> Term {
    subst_name(body, i, &Interval::name(j.clone()))
}

fn open_sys(sys: &Sys, i: &Name, j: &Name) -> Sys {
    sys.iter()
        .map(|(f, u)| (f.clone(), open_dim(u, i, j)))
        .collect()
}

fn show(t: &Term) -> String {
    t.to_string()
}

fn show_alpha(alpha: &IrreducibleFace) -> String {
    alpha.to_face().to_string()
}

struct Hook<'c> {
    checker: &'c Checker,
    ctx: &'c Ctx,
}

impl Neutrals for Hook<'_> {
    fn path_endpoint(&self, p: &Term, one: bool) -> Option<Term> {
        let ty = self.checker.infer(self.ctx, p).ok()?;
        let ty = self.checker.whnf(self.ctx, &ty).ok()?;
        match ty.kind() {
            TermKind::PathT { left, right, .. } => Some(if one { right } else { left }.clone()),
            _ => None,
        }
    }
}

/// The checker, with the fuel allowed for each weak-head normalization.
#[derive(Clone, Copy, Debug)]
pub struct Checker {
    pub fuel: u64,
}

impl Default for Checker {
    fn default() -> Self {
        Checker { fuel: DEFAULT_FUEL }
    }
}

impl Checker {
    /// Weak-head normal form, where terms stuck on variables count as
    /// normal.
    pub fn whnf(&self, ctx: &Ctx, t: &Term) -> Result<Term> {
        let hook = Hook { checker: self, ctx };
        let kernel = Kernel::with_neutrals(ctx.names.clone(), &hook);
        match kernel.whnf(t, self.fuel) {
            Ok((w, _)) => Ok(w),
            Err(KernelError::Stuck { term, .. }) => Ok(term),
            Err(e @ KernelError::FuelExhausted { .. }) => {
                Err(CheckError::Incomplete(e.to_string()))
            }
        }
    }

    fn names_in_scope<'a>(
        &self,
        ctx: &Ctx,
        names: impl IntoIterator<Item = &'a Name>,
    ) -> Result<()> {
        for n in names {
            if !ctx.names.contains(n) {
                return Err(CheckError::UnboundName(n.to_string()));
            }
        }
        Ok(())
    }

    fn interval(&self, ctx: &Ctx, r: &Interval) -> Result<()> {
        self.names_in_scope(ctx, &r.names())
    }

    fn face(&self, ctx: &Ctx, f: &Face) -> Result<()> {
        self.names_in_scope(ctx, &f.names())
    }

    /// Runs `k` once per irreducible face under `face`, in the restricted
    /// context and with the restricting substitution.
    fn under(
        &self,
        ctx: &Ctx,
        face: &Face,
        mut k: impl FnMut(&Ctx, &BTreeMap<Name, Interval>, &IrreducibleFace) -> Result<()>,
    ) -> Result<()> {
        for alpha in irreducibles_under(face) {
            let (c, sigma) = ctx.restrict(&alpha)?;
            k(&c, &sigma, &alpha)?;
        }
        Ok(())
    }

    /// `a = b` on `face`, with the failing irreducible in the error.
    fn agree(&self, ctx: &Ctx, face: &Face, a: &Term, b: &Term, what: &str) -> Result<()> {
        self.under(ctx, face, |c, sigma, alpha| {
            let (a1, b1) = (subst_names(a, sigma), subst_names(b, sigma));
            if self.conv(c, &a1, &b1)? {
                Ok(())
            } else {
                Err(CheckError::RestrictionUnsatisfied {
                    face: face.to_string(),
                    alpha: show_alpha(alpha),
                    message: format!("{what}: {} differs from {}", show(&a1), show(&b1)),
                })
            }
        })
    }

    /// Checks `t = u` on `phi`.
    pub fn check_restriction(&self, ctx: &Ctx, phi: &Face, t: &Term, u: &Term) -> Result<()> {
        self.face(ctx, phi)?;
        self.agree(ctx, phi, t, u, "restriction")
    }

    fn check_under(&self, ctx: &Ctx, face: &Face, t: &Term, ty: &Term) -> Result<()> {
        self.under(ctx, face, |c, sigma, _| {
            self.check(c, &subst_names(t, sigma), &subst_names(ty, sigma))
        })
    }

    /// Every constraint has type `ty` on its face and they agree pairwise.
    fn constraints(&self, ctx: &Ctx, sys: &Sys, ty: &Term) -> Result<()> {
        for (k, (f, u)) in sys.iter().enumerate() {
            self.check_under(ctx, f, u, ty)?;
            for (g, v) in &sys[..k] {
                self.agree(ctx, &f.meet(g), u, v, "overlapping constraints")?;
            }
        }
        Ok(())
    }

    fn covered(&self, sys_face: &Face) -> Result<()> {
        if sys_face.is_one() {
            Ok(())
        } else {
            Err(CheckError::RestrictionUnsatisfied {
                face: sys_face.to_string(),
                alpha: "1F".to_string(),
                message: "system does not cover the context".to_string(),
            })
        }
    }

    pub fn check_type(&self, ctx: &Ctx, t: &Term) -> Result<()> {
        self.check(ctx, t, &Term::universe())
    }

    fn expect_pi(&self, ctx: &Ctx, ty: &Term, at: &Term) -> Result<(Name, Term, Term)> {
        let w = self.whnf(ctx, ty)?;
        match w.kind() {
            TermKind::Pi { var, dom, cod } => Ok((var.clone(), dom.clone(), cod.clone())),
            _ => Err(CheckError::Mismatch {
                expected: "a function type".into(),
                got: format!("{} (for {})", show(&w), show(at)),
            }),
        }
    }

    fn expect_sigma(&self, ctx: &Ctx, ty: &Term, at: &Term) -> Result<(Name, Term, Term)> {
        let w = self.whnf(ctx, ty)?;
        match w.kind() {
            TermKind::Sigma {
                var,
                fst_ty,
                snd_ty,
            } => Ok((var.clone(), fst_ty.clone(), snd_ty.clone())),
            _ => Err(CheckError::Mismatch {
                expected: "a pair type".into(),
                got: format!("{} (for {})", show(&w), show(at)),
            }),
        }
    }

    fn expect_path(&self, ctx: &Ctx, ty: &Term, at: &Term) -> Result<(Name, Term, Term, Term)> {
        let w = self.whnf(ctx, ty)?;
        match w.kind() {
            TermKind::PathT {
                dim,
                ty,
                left,
                right,
            } => Ok((dim.clone(), ty.clone(), left.clone(), right.clone())),
            _ => Err(CheckError::Mismatch {
                expected: "a path type".into(),
                got: format!("{} (for {})", show(&w), show(at)),
            }),
        }
    }

    fn expect_inh(&self, ctx: &Ctx, ty: &Term, at: &Term) -> Result<Term> {
        let w = self.whnf(ctx, ty)?;
        match w.kind() {
            TermKind::Inh(a) => Ok(a.clone()),
            _ => Err(CheckError::Mismatch {
                expected: "a truncation".into(),
                got: format!("{} (for {})", show(&w), show(at)),
            }),
        }
    }

    /// Checks `t : ty`, where `ty` is a type in `ctx`.
    pub fn check(&self, ctx: &Ctx, t: &Term, ty: &Term) -> Result<()> {
        use TermKind::*;
        match t.kind() {
            Lam {
                var,
                ty: dom0,
                body,
            } => {
                let (v, dom, cod) = self.expect_pi(ctx, ty, t)?;
                self.check_type(ctx, dom0)?;
                self.unify(ctx, &dom, dom0, t)?;
                let x = fresh_var(var);
                self.check(
                    &ctx.with_var(x.clone(), dom),
                    &open_var(body, var, &x),
                    &open_var(&cod, &v, &x),
                )
            }
            Pair(a, b) => {
                let (v, fst_ty, snd_ty) = self.expect_sigma(ctx, ty, t)?;
                self.check(ctx, a, &fst_ty)?;
                self.check(ctx, b, &term_subst(&snd_ty, &v, a))
            }
            PAbs { dim, body } => {
                let (j, line, left, right) = self.expect_path(ctx, ty, t)?;
                let i = dim.fresh();
                self.check(
                    &ctx.with_name(i.clone()),
                    &open_dim(body, dim, &i),
                    &open_dim(&line, &j, &i),
                )?;
                self.endpoint(ctx, &at_end(body, dim, false), &left, "left endpoint")?;
                self.endpoint(ctx, &at_end(body, dim, true), &right, "right endpoint")
            }
            SystemE(sys) => {
                for (f, _) in sys {
                    self.face(ctx, f)?;
                }
                self.covered(&total_face(sys))?;
                self.constraints(ctx, sys, ty)
            }
            GlueE { sys, base } => {
                let w = self.whnf(ctx, ty)?;
                match w.kind() {
                    GlueT {
                        branches,
                        base: a_ty,
                    } => self.check_glue_elem(ctx, sys, base, branches, a_ty),
                    _ => self.infer_and_compare(ctx, t, ty),
                }
            }
            Inc(a) => {
                let a_ty = self.expect_inh(ctx, ty, t)?;
                self.check(ctx, a, &a_ty)
            }
            Squash(u, v, r) => {
                self.expect_inh(ctx, ty, t)?;
                self.interval(ctx, r)?;
                self.check(ctx, u, ty)?;
                self.check(ctx, v, ty)
            }
            _ => self.infer_and_compare(ctx, t, ty),
        }
    }

    fn endpoint(&self, ctx: &Ctx, got: &Term, want: &Term, what: &str) -> Result<()> {
        if self.conv(ctx, got, want)? {
            Ok(())
        } else {
            Err(CheckError::Mismatch {
                expected: format!("{what} {}", show(want)),
                got: show(got),
            })
        }
    }

    fn unify(&self, ctx: &Ctx, expected: &Term, got: &Term, at: &Term) -> Result<()> {
        if self.conv(ctx, expected, got)? {
            Ok(())
        } else {
            Err(CheckError::Mismatch {
                expected: show(expected),
                got: format!("{} (for {})", show(got), show(at)),
            })
        }
    }

    fn infer_and_compare(&self, ctx: &Ctx, t: &Term, ty: &Term) -> Result<()> {
        let got = self.infer(ctx, t)?;
        self.unify(ctx, ty, &got, t)
    }

    fn check_glue_elem(
        &self,
        ctx: &Ctx,
        sys: &Sys,
        a: &Term,
        branches: &[GlueBranch],
        a_ty: &Term,
    ) -> Result<()> {
        let phi = branches
            .iter()
            .fold(Face::zero(), |acc, b| acc.join(&b.face));
        let psi = total_face(sys);
        if psi != phi {
            return Err(CheckError::Mismatch {
                expected: format!("glue over {phi}"),
                got: format!("glue over {psi}"),
            });
        }
        self.check(ctx, a, a_ty)?;
        for (k, (f, t)) in sys.iter().enumerate() {
            self.under(ctx, f, |c, sigma, alpha| {
                let faces: Vec<(Face, ())> =
                    branches.iter().map(|b| (b.face.subst(sigma), ())).collect();
                let Some(m) = min_true_index(&faces) else {
                    return Err(CheckError::RestrictionUnsatisfied {
                        face: f.to_string(),
                        alpha: show_alpha(alpha),
                        message: "no Glue branch holds".into(),
                    });
                };
                let fiber = subst_names(&branches[m].ty, sigma);
                let w = subst_names(&branches[m].equiv, sigma);
                let t1 = subst_names(t, sigma);
                self.check(c, &t1, &fiber)?;
                let image = Term::app(Term::fst(w), t1);
                let a1 = subst_names(a, sigma);
                if !self.conv(c, &image, &a1)? {
                    return Err(CheckError::RestrictionUnsatisfied {
                        face: f.to_string(),
                        alpha: show_alpha(alpha),
                        message: format!("{} differs from {}", show(&image), show(&a1)),
                    });
                }
                Ok(())
            })?;
            for (g, u) in &sys[..k] {
                self.agree(ctx, &f.meet(g), t, u, "overlapping glue constraints")?;
            }
        }
        Ok(())
    }

    /// Synthesizes a type for `t`.
    pub fn infer(&self, ctx: &Ctx, t: &Term) -> Result<Term> {
        use TermKind::*;
        let u = Term::universe();
        match t.kind() {
            Var(x) => ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| CheckError::UnboundVariable(x.to_string())),
            Nat | U | S1 => Ok(u),
            Zero => Ok(Term::nat()),
            Suc(n) => {
                self.check(ctx, n, &Term::nat())?;
                Ok(Term::nat())
            }
            Natrec {
                var,
                motive,
                scrut,
                zero,
                succ,
            } => {
                self.check(ctx, scrut, &Term::nat())?;
                let x = fresh_var(var);
                let c = open_var(motive, var, &x);
                self.check_type(&ctx.with_var(x.clone(), Term::nat()), &c)?;
                let at = |n: Term| term_subst(&c, &x, &n);
                self.check(ctx, zero, &at(Term::zero()))?;
                let n = Name::fresh_named("n");
                let step_ty = Term::pi(
                    n.clone(),
                    Term::nat(),
                    Term::arrow(at(Term::var(n.clone())), at(Term::suc(Term::var(n)))),
                );
                self.check(ctx, succ, &step_ty)?;
                Ok(at(scrut.clone()))
            }
            Pi { var, dom, cod }
            | Sigma {
                var,
                fst_ty: dom,
                snd_ty: cod,
            } => {
                self.check_type(ctx, dom)?;
                let x = fresh_var(var);
                self.check_type(
                    &ctx.with_var(x.clone(), dom.clone()),
                    &open_var(cod, var, &x),
                )?;
                Ok(u)
            }
            Lam { var, ty, body } => {
                self.check_type(ctx, ty)?;
                let x = fresh_var(var);
                let b = self.infer(
                    &ctx.with_var(x.clone(), ty.clone()),
                    &open_var(body, var, &x),
                )?;
                Ok(Term::pi(x, ty.clone(), b))
            }
            App(f, a) => match f.kind() {
                Lam { var, ty, body } => {
                    self.check_type(ctx, ty)?;
                    self.check(ctx, a, ty)?;
                    let x = fresh_var(var);
                    let b = self.infer(
                        &ctx.with_var(x.clone(), ty.clone()),
                        &open_var(body, var, &x),
                    )?;
                    Ok(term_subst(&b, &x, a))
                }
                _ => {
                    let fty = self.infer(ctx, f)?;
                    let (v, dom, cod) = self.expect_pi(ctx, &fty, f)?;
                    self.check(ctx, a, &dom)?;
                    Ok(term_subst(&cod, &v, a))
                }
            },
            Pair(a, b) => {
                let at = self.infer(ctx, a)?;
                let bt = self.infer(ctx, b)?;
                Ok(Term::times(at, bt))
            }
            Fst(p) => {
                let pty = self.infer(ctx, p)?;
                let (_, a, _) = self.expect_sigma(ctx, &pty, p)?;
                Ok(a)
            }
            Snd(p) => {
                let pty = self.infer(ctx, p)?;
                let (v, _, b) = self.expect_sigma(ctx, &pty, p)?;
                Ok(term_subst(&b, &v, &Term::fst(p.clone())))
            }
            PathT {
                dim,
                ty,
                left,
                right,
            } => {
                let i = dim.fresh();
                self.check_type(&ctx.with_name(i.clone()), &open_dim(ty, dim, &i))?;
                self.check(ctx, left, &at_end(ty, dim, false))?;
                self.check(ctx, right, &at_end(ty, dim, true))?;
                Ok(u)
            }
            PAbs { dim, body } => {
                let i = dim.fresh();
                let b = open_dim(body, dim, &i);
                let ty = self.infer(&ctx.with_name(i.clone()), &b)?;
                Ok(Term::path_t(
                    i.clone(),
                    ty,
                    at_end(&b, &i, false),
                    at_end(&b, &i, true),
                ))
            }
            PApp(p, r) => {
                self.interval(ctx, r)?;
                let pty = self.infer(ctx, p)?;
                let (j, line, _, _) = self.expect_path(ctx, &pty, p)?;
                Ok(subst_name(&line, &j, r))
            }
            SystemT(sys) => {
                for (f, _) in sys {
                    self.face(ctx, f)?;
                }
                self.covered(&total_face(sys))?;
                self.constraints(ctx, sys, &u)?;
                Ok(u)
            }
            SystemE(sys) => {
                for (f, _) in sys {
                    self.face(ctx, f)?;
                }
                self.covered(&total_face(sys))?;
                let k = min_true_index(sys).ok_or_else(|| CheckError::CannotSynthesize(show(t)))?;
                let ty = self.infer(ctx, &sys[k].1)?;
                self.constraints(ctx, sys, &ty)?;
                Ok(ty)
            }
            GlueT { branches, base } => {
                self.check_type(ctx, base)?;
                for (k, b) in branches.iter().enumerate() {
                    self.face(ctx, &b.face)?;
                    self.check_under(ctx, &b.face, &b.ty, &u)?;
                    self.under(ctx, &b.face, |c, sigma, _| {
                        let ty = subst_names(&b.ty, sigma);
                        let a = subst_names(base, sigma);
                        self.check(c, &subst_names(&b.equiv, sigma), &equiv_type(&ty, &a))
                    })?;
                    for c in &branches[..k] {
                        let both = b.face.meet(&c.face);
                        self.agree(ctx, &both, &b.ty, &c.ty, "overlapping Glue types")?;
                        self.agree(ctx, &both, &b.equiv, &c.equiv, "overlapping equivalences")?;
                    }
                }
                Ok(u)
            }
            GlueE { sys, .. } => match min_true_index(sys) {
                Some(k) => {
                    self.face(ctx, &sys[k].0)?;
                    self.infer(ctx, &sys[k].1)
                }
                None => Err(CheckError::CannotSynthesize(show(t))),
            },
            Unglue { sys, arg } => {
                for (f, _) in sys {
                    self.face(ctx, f)?;
                }
                let aty = self.infer(ctx, arg)?;
                if let Some(k) = min_true_index(sys) {
                    let w = &sys[k].1;
                    let wty = self.infer(ctx, w)?;
                    let (_, f_ty, _) = self.expect_sigma(ctx, &wty, w)?;
                    let (_, dom, cod) = self.expect_pi(ctx, &f_ty, w)?;
                    self.unify(ctx, &dom, &aty, arg)?;
                    return Ok(cod);
                }
                let w = self.whnf(ctx, &aty)?;
                match w.kind() {
                    GlueT { branches, base } => {
                        let phi = branches
                            .iter()
                            .fold(Face::zero(), |acc, b| acc.join(&b.face));
                        if total_face(sys) != phi {
                            return Err(CheckError::Mismatch {
                                expected: format!("unglue over {phi}"),
                                got: format!("unglue over {}", total_face(sys)),
                            });
                        }
                        for (f, e) in sys {
                            self.under(ctx, f, |c, sigma, alpha| {
                                let faces: Vec<(Face, ())> =
                                    branches.iter().map(|b| (b.face.subst(sigma), ())).collect();
                                let m = min_true_index(&faces).ok_or_else(|| {
                                    CheckError::RestrictionUnsatisfied {
                                        face: f.to_string(),
                                        alpha: show_alpha(alpha),
                                        message: "no Glue branch holds".into(),
                                    }
                                })?;
                                let want = subst_names(&branches[m].equiv, sigma);
                                let got = subst_names(e, sigma);
                                if self.conv(c, &want, &got)? {
                                    Ok(())
                                } else {
                                    Err(CheckError::RestrictionUnsatisfied {
                                        face: f.to_string(),
                                        alpha: show_alpha(alpha),
                                        message: "unglue equivalence differs".into(),
                                    })
                                }
                            })?;
                        }
                        Ok(base.clone())
                    }
                    _ => Err(CheckError::Mismatch {
                        expected: "a Glue type".into(),
                        got: show(&w),
                    }),
                }
            }
            Comp {
                dim,
                line,
                sys,
                base,
            } => {
                let i = dim.fresh();
                let ci = ctx.with_name(i.clone());
                let line_i = open_dim(line, dim, &i);
                self.check_type(&ci, &line_i)?;
                for (f, _) in sys {
                    self.face(ctx, f)?;
                }
                let sys_i = open_sys(sys, dim, &i);
                self.constraints(&ci, &sys_i, &line_i)?;
                self.check(ctx, base, &at_end(&line_i, &i, false))?;
                for (f, u) in &sys_i {
                    self.agree(
                        ctx,
                        f,
                        base,
                        &at_end(u, &i, false),
                        "base against constraint",
                    )?;
                }
                Ok(at_end(&line_i, &i, true))
            }
            Base => Ok(Term::s1()),
            Loop(r) => {
                self.interval(ctx, r)?;
                Ok(Term::s1())
            }
            S1Elim {
                var,
                motive,
                scrut,
                base_case,
                loop_case,
            } => {
                self.check(ctx, scrut, &Term::s1())?;
                let x = fresh_var(var);
                let c = open_var(motive, var, &x);
                self.check_type(&ctx.with_var(x.clone(), Term::s1()), &c)?;
                let at = |s: Term| term_subst(&c, &x, &s);
                self.check(ctx, base_case, &at(Term::base()))?;
                let i = Name::fresh_named("i");
                let loop_ty = Term::path_t(
                    i.clone(),
                    at(Term::loop_(Interval::name(i))),
                    base_case.clone(),
                    base_case.clone(),
                );
                self.check(ctx, loop_case, &loop_ty)?;
                Ok(at(scrut.clone()))
            }
            Inh(a) => {
                self.check_type(ctx, a)?;
                Ok(u)
            }
            Inc(a) => Ok(Term::inh(self.infer(ctx, a)?)),
            Squash(a, b, r) => {
                self.interval(ctx, r)?;
                let ty = self.infer(ctx, a)?;
                self.expect_inh(ctx, &ty, a)?;
                self.check(ctx, b, &ty)?;
                Ok(ty)
            }
            Hcomp { ty, dim, sys, base } => {
                self.check_type(ctx, ty)?;
                let whole = Term::inh(ty.clone());
                let i = dim.fresh();
                let ci = ctx.with_name(i.clone());
                for (f, _) in sys {
                    self.face(ctx, f)?;
                }
                let sys_i = open_sys(sys, dim, &i);
                self.constraints(&ci, &sys_i, &whole)?;
                self.check(ctx, base, &whole)?;
                for (f, u) in &sys_i {
                    self.agree(
                        ctx,
                        f,
                        base,
                        &at_end(u, &i, false),
                        "base against constraint",
                    )?;
                }
                Ok(whole)
            }
            Fwd { dim, line, at, arg } => {
                self.interval(ctx, at)?;
                let i = dim.fresh();
                self.check_type(&ctx.with_name(i.clone()), &open_dim(line, dim, &i))?;
                self.check(ctx, arg, &Term::inh(subst_name(line, dim, at)))?;
                Ok(Term::inh(at_end(line, dim, true)))
            }
            InhElim {
                var,
                motive,
                scrut,
                inc_case,
                squash_case,
            } => {
                let sty = self.infer(ctx, scrut)?;
                let a = self.expect_inh(ctx, &sty, scrut)?;
                let ta = Term::inh(a.clone());
                let z = fresh_var(var);
                let c = open_var(motive, var, &z);
                self.check_type(&ctx.with_var(z.clone(), ta.clone()), &c)?;
                let at = |s: Term| term_subst(&c, &z, &s);
                let x = Name::fresh_named("a");
                self.check(
                    ctx,
                    inc_case,
                    &Term::pi(x.clone(), a.clone(), at(Term::inc(Term::var(x)))),
                )?;
                let (p, q) = (Name::fresh_named("u"), Name::fresh_named("v"));
                let (cp, cq) = (Name::fresh_named("x"), Name::fresh_named("y"));
                let i = Name::fresh_named("i");
                let square = Term::path_t(
                    i.clone(),
                    at(Term::squash(
                        Term::var(p.clone()),
                        Term::var(q.clone()),
                        Interval::name(i),
                    )),
                    Term::var(cp.clone()),
                    Term::var(cq.clone()),
                );
                let squash_ty = Term::pi(
                    p.clone(),
                    ta.clone(),
                    Term::pi(
                        q.clone(),
                        ta,
                        Term::pi(cp, at(Term::var(p)), Term::pi(cq, at(Term::var(q)), square)),
                    ),
                );
                self.check(ctx, squash_case, &squash_ty)?;
                Ok(at(scrut.clone()))
            }
        }
    }

    /// Judgmental equality as far as weak-head comparison decides it.
    pub fn convert(&self, ctx: &Ctx, a: &Term, b: &Term) -> bool {
        self.conv(ctx, a, b).unwrap_or(false)
    }

    fn conv(&self, ctx: &Ctx, a: &Term, b: &Term) -> Result<bool> {
        if a.ptr_eq(b) || crate::syntax::alpha_eq(a, b) {
            return Ok(true);
        }
        let a = self.whnf(ctx, a)?;
        let b = self.whnf(ctx, b)?;
        if crate::syntax::alpha_eq(&a, &b) {
            return Ok(true);
        }
        self.conv_whnf(ctx, &a, &b)
    }

    fn conv_sys(&self, ctx: &Ctx, s: &Sys, t: &Sys) -> Result<bool> {
        if s.len() != t.len() {
            return Ok(false);
        }
        for ((f, u), (g, v)) in s.iter().zip(t) {
            if f != g {
                return Ok(false);
            }
            let mut ok = true;
            self.under(ctx, f, |c, sigma, _| {
                ok = ok && self.conv(c, &subst_names(u, sigma), &subst_names(v, sigma))?;
                Ok(())
            })?;
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn conv_glue_branches(&self, ctx: &Ctx, s: &[GlueBranch], t: &[GlueBranch]) -> Result<bool> {
        let as_sys = |bs: &[GlueBranch]| -> (Sys, Sys) {
            (
                bs.iter().map(|b| (b.face.clone(), b.ty.clone())).collect(),
                bs.iter()
                    .map(|b| (b.face.clone(), b.equiv.clone()))
                    .collect(),
            )
        };
        let (s1, s2) = as_sys(s);
        let (t1, t2) = as_sys(t);
        Ok(self.conv_sys(ctx, &s1, &t1)? && self.conv_sys(ctx, &s2, &t2)?)
    }

    fn conv_binder_var(
        &self,
        ctx: &Ctx,
        ty: Option<&Term>,
        (x, a): (&Name, &Term),
        (y, b): (&Name, &Term),
    ) -> Result<bool> {
        let z = x.fresh();
        let c = match ty {
            Some(t) => ctx.with_var(z.clone(), t.clone()),
            None => ctx.clone(),
        };
        self.conv(&c, &open_var(a, x, &z), &open_var(b, y, &z))
    }

    fn conv_binder_dim(
        &self,
        ctx: &Ctx,
        (i, a): (&Name, &Term),
        (j, b): (&Name, &Term),
    ) -> Result<bool> {
        let k = i.fresh();
        self.conv(
            &ctx.with_name(k.clone()),
            &open_dim(a, i, &k),
            &open_dim(b, j, &k),
        )
    }

    fn conv_whnf(&self, ctx: &Ctx, a: &Term, b: &Term) -> Result<bool> {
        use TermKind::*;
        match (a.kind(), b.kind()) {
            (Lam { var, ty, body }, _) => {
                let z = var.fresh();
                let c = ctx.with_var(z.clone(), ty.clone());
                return self.conv(
                    &c,
                    &open_var(body, var, &z),
                    &Term::app(b.clone(), Term::var(z)),
                );
            }
            (_, Lam { .. }) => return self.conv_whnf(ctx, b, a),
            (Pair(x, y), _) => {
                return Ok(self.conv(ctx, x, &Term::fst(b.clone()))?
                    && self.conv(ctx, y, &Term::snd(b.clone()))?)
            }
            (_, Pair(..)) => return self.conv_whnf(ctx, b, a),
            (PAbs { dim, body }, _) => {
                let k = dim.fresh();
                return self.conv(
                    &ctx.with_name(k.clone()),
                    &open_dim(body, dim, &k),
                    &Term::papp(b.clone(), Interval::name(k)),
                );
            }
            (_, PAbs { .. }) => return self.conv_whnf(ctx, b, a),
            _ => {}
        }
        let ok = match (a.kind(), b.kind()) {
            (Var(x), Var(y)) => x == y,
            (Nat, Nat) | (Zero, Zero) | (U, U) | (S1, S1) | (Base, Base) => true,
            (Suc(x), Suc(y))
            | (Inh(x), Inh(y))
            | (Inc(x), Inc(y))
            | (Fst(x), Fst(y))
            | (Snd(x), Snd(y)) => self.conv(ctx, x, y)?,
            (
                Natrec {
                    var: v1,
                    motive: m1,
                    scrut: s1,
                    zero: z1,
                    succ: c1,
                },
                Natrec {
                    var: v2,
                    motive: m2,
                    scrut: s2,
                    zero: z2,
                    succ: c2,
                },
            ) => {
                self.conv(ctx, s1, s2)?
                    && self.conv_binder_var(ctx, Some(&Term::nat()), (v1, m1), (v2, m2))?
                    && self.conv(ctx, z1, z2)?
                    && self.conv(ctx, c1, c2)?
            }
            (
                Pi {
                    var: x,
                    dom: a1,
                    cod: b1,
                },
                Pi {
                    var: y,
                    dom: a2,
                    cod: b2,
                },
            )
            | (
                Sigma {
                    var: x,
                    fst_ty: a1,
                    snd_ty: b1,
                },
                Sigma {
                    var: y,
                    fst_ty: a2,
                    snd_ty: b2,
                },
            ) => {
                self.conv(ctx, a1, a2)? && self.conv_binder_var(ctx, Some(a1), (x, b1), (y, b2))?
            }
            (App(f, x), App(g, y)) => self.conv(ctx, f, g)? && self.conv(ctx, x, y)?,
            (
                PathT {
                    dim: i,
                    ty: t1,
                    left: l1,
                    right: r1,
                },
                PathT {
                    dim: j,
                    ty: t2,
                    left: l2,
                    right: r2,
                },
            ) => {
                self.conv_binder_dim(ctx, (i, t1), (j, t2))?
                    && self.conv(ctx, l1, l2)?
                    && self.conv(ctx, r1, r2)?
            }
            (PApp(p, r), PApp(q, s)) => r == s && self.conv(ctx, p, q)?,
            (SystemT(s), SystemT(t)) | (SystemE(s), SystemE(t)) => self.conv_sys(ctx, s, t)?,
            (
                GlueT {
                    branches: s,
                    base: a1,
                },
                GlueT {
                    branches: t,
                    base: a2,
                },
            ) => self.conv(ctx, a1, a2)? && self.conv_glue_branches(ctx, s, t)?,
            (GlueE { sys: s, base: a1 }, GlueE { sys: t, base: a2 }) => {
                self.conv(ctx, a1, a2)? && self.conv_sys(ctx, s, t)?
            }
            (Unglue { sys: s, arg: x }, Unglue { sys: t, arg: y }) => {
                self.conv(ctx, x, y)? && self.conv_sys(ctx, s, t)?
            }
            (
                Comp {
                    dim: i,
                    line: l1,
                    sys: s,
                    base: b1,
                },
                Comp {
                    dim: j,
                    line: l2,
                    sys: t,
                    base: b2,
                },
            ) => {
                let k = i.fresh();
                self.conv_binder_dim(ctx, (i, l1), (j, l2))?
                    && self.conv_sys(
                        &ctx.with_name(k.clone()),
                        &open_sys(s, i, &k),
                        &open_sys(t, j, &k),
                    )?
                    && self.conv(ctx, b1, b2)?
            }
            (Loop(r), Loop(s)) => r == s,
            (
                S1Elim {
                    var: v1,
                    motive: m1,
                    scrut: s1,
                    base_case: b1,
                    loop_case: l1,
                },
                S1Elim {
                    var: v2,
                    motive: m2,
                    scrut: s2,
                    base_case: b2,
                    loop_case: l2,
                },
            ) => {
                self.conv(ctx, s1, s2)?
                    && self.conv_binder_var(ctx, Some(&Term::s1()), (v1, m1), (v2, m2))?
                    && self.conv(ctx, b1, b2)?
                    && self.conv(ctx, l1, l2)?
            }
            (Squash(u1, v1, r), Squash(u2, v2, s)) => {
                r == s && self.conv(ctx, u1, u2)? && self.conv(ctx, v1, v2)?
            }
            (
                Hcomp {
                    ty: t1,
                    dim: i,
                    sys: s,
                    base: b1,
                },
                Hcomp {
                    ty: t2,
                    dim: j,
                    sys: t,
                    base: b2,
                },
            ) => {
                let k = i.fresh();
                self.conv(ctx, t1, t2)?
                    && self.conv_sys(
                        &ctx.with_name(k.clone()),
                        &open_sys(s, i, &k),
                        &open_sys(t, j, &k),
                    )?
                    && self.conv(ctx, b1, b2)?
            }
            (
                Fwd {
                    dim: i,
                    line: l1,
                    at: r,
                    arg: x,
                },
                Fwd {
                    dim: j,
                    line: l2,
                    at: s,
                    arg: y,
                },
            ) => r == s && self.conv_binder_dim(ctx, (i, l1), (j, l2))? && self.conv(ctx, x, y)?,
            (
                InhElim {
                    var: v1,
                    motive: m1,
                    scrut: s1,
                    inc_case: i1,
                    squash_case: q1,
                },
                InhElim {
                    var: v2,
                    motive: m2,
                    scrut: s2,
                    inc_case: i2,
                    squash_case: q2,
                },
            ) => {
                self.conv(ctx, s1, s2)?
                    && self.conv_binder_var(ctx, None, (v1, m1), (v2, m2))?
                    && self.conv(ctx, i1, i2)?
                    && self.conv(ctx, q1, q2)?
            }
            _ => false,
        };
        Ok(ok)
    }

    /// Checks a definition `term : ty` over `names`.
    pub fn check_definition(&self, names: &NameCtx, ty: &Term, term: &Term) -> Result<()> {
        let ctx = Ctx::new(names.clone());
        self.check_type(&ctx, ty)?;
        self.check(&ctx, term, ty)
    }
}

/// Steps a term once with the checker's neutral hook; exposed for tests.
pub fn step_open(ctx: &Ctx, t: &Term) -> Step {
    let checker = Checker::default();
    let hook = Hook {
        checker: &checker,
        ctx,
    };
    Kernel::with_neutrals(ctx.names.clone(), &hook).step(t)
}

pub fn infer(ctx: &Ctx, t: &Term) -> Result<Term> {
    Checker::default().infer(ctx, t)
}

pub fn check(ctx: &Ctx, t: &Term, ty: &Term) -> Result<()> {
    Checker::default().check(ctx, t, ty)
}

pub fn convert(ctx: &Ctx, a: &Term, b: &Term) -> bool {
    Checker::default().convert(ctx, a, b)
}

pub fn check_restriction(ctx: &Ctx, phi: &Face, t: &Term, u: &Term) -> Result<()> {
    Checker::default().check_restriction(ctx, phi, t, u)
}
