//! Abstract syntax of the calculus.
//!
//! Terms are immutable and reference counted; every node caches its free
//! interval names and free term variables so that substitution can skip
//! untouched subterms. Binders carry explicit names; α-equivalence is
//! decided by [`alpha_eq`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::faces::Face;
use crate::interval::Interval;

static FRESH: AtomicU64 = AtomicU64::new(1);

/// A name: interval dimension or term variable.
///
/// Parsed names have index 0; [`Name::fresh`] draws indices from a global
/// atomic counter, so a fresh name never occurs in any existing term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    base: Arc<str>,
    index: u64,
}

impl Name {
    pub fn new(base: &str) -> Name {
        Name {
            base: Arc::from(base),
            index: 0,
        }
    }

    /// A fresh name sharing this name's base.
    pub fn fresh(&self) -> Name {
        Name {
            base: self.base.clone(),
            index: FRESH.fetch_add(1, Ordering::Relaxed),
        }
    }

    pub fn fresh_named(base: &str) -> Name {
        Name {
            base: Arc::from(base),
            index: FRESH.fetch_add(1, Ordering::Relaxed),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Placeholder used by α-comparison for the binder at depth `level`.
    pub(crate) fn level(level: usize) -> Name {
        Name {
            base: Arc::from("#"),
            index: level as u64,
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}'{}", self.base, self.index)
        }
    }
}

/// An ordered context of distinct interval names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NameCtx {
    names: Vec<Name>,
}

impl NameCtx {
    pub fn empty() -> NameCtx {
        NameCtx::default()
    }

    /// Builds a context, dropping repeated names.
    pub fn from_names(names: impl IntoIterator<Item = Name>) -> NameCtx {
        let mut out: Vec<Name> = Vec::new();
        for n in names {
            if !out.contains(&n) {
                out.push(n);
            }
        }
        NameCtx { names: out }
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.names.contains(name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn extend(&self, name: Name) -> NameCtx {
        let mut names = self.names.clone();
        if !names.contains(&name) {
            names.push(name);
        }
        NameCtx { names }
    }
}

/// A constraint list `[phi_1 -> t_1, ..., phi_n -> t_n]`, in source order.
pub type Sys = Vec<(Face, Term)>;

/// One branch `phi -> (T, w)` of a Glue type.
#[derive(Clone, Debug)]
pub struct GlueBranch {
    pub face: Face,
    pub ty: Term,
    pub equiv: Term,
}

#[derive(Clone, Debug)]
pub enum TermKind {
    Var(Name),
    Nat,
    Zero,
    Suc(Term),
    /// `natrec{x. C} scrut z s`; `var` binds in `motive`.
    Natrec {
        var: Name,
        motive: Term,
        scrut: Term,
        zero: Term,
        succ: Term,
    },
    Pi {
        var: Name,
        dom: Term,
        cod: Term,
    },
    Lam {
        var: Name,
        ty: Term,
        body: Term,
    },
    App(Term, Term),
    Sigma {
        var: Name,
        fst_ty: Term,
        snd_ty: Term,
    },
    Pair(Term, Term),
    Fst(Term),
    Snd(Term),
    /// `Path^dim ty left right`; `dim` binds in `ty` only.
    PathT {
        dim: Name,
        ty: Term,
        left: Term,
        right: Term,
    },
    PAbs {
        dim: Name,
        body: Term,
    },
    PApp(Term, Interval),
    SystemT(Sys),
    SystemE(Sys),
    GlueT {
        branches: Vec<GlueBranch>,
        base: Term,
    },
    GlueE {
        sys: Sys,
        base: Term,
    },
    /// `unglue [phi -> w] arg`, the faces and equivalences stored explicitly.
    Unglue {
        sys: Sys,
        arg: Term,
    },
    U,
    /// `comp^dim line [phi -> u] base`; `dim` binds in `line` and in the
    /// constraint terms, never in the faces.
    Comp {
        dim: Name,
        line: Term,
        sys: Sys,
        base: Term,
    },
    S1,
    Base,
    Loop(Interval),
    S1Elim {
        var: Name,
        motive: Term,
        scrut: Term,
        base_case: Term,
        loop_case: Term,
    },
    Inh(Term),
    Inc(Term),
    Squash(Term, Term, Interval),
    /// `hcomp^dim ty [phi -> u] base : inh ty`; `dim` binds in the
    /// constraint terms only.
    Hcomp {
        ty: Term,
        dim: Name,
        sys: Sys,
        base: Term,
    },
    /// `fwd^dim line at arg`; `dim` binds in `line` only.
    Fwd {
        dim: Name,
        line: Term,
        at: Interval,
        arg: Term,
    },
    InhElim {
        var: Name,
        motive: Term,
        scrut: Term,
        inc_case: Term,
        squash_case: Term,
    },
}

struct Node {
    kind: TermKind,
    names: Box<[Name]>,
    vars: Box<[Name]>,
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::pretty(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::pretty(self))
    }
}

#[derive(Default)]
struct Free {
    names: BTreeSet<Name>,
    vars: BTreeSet<Name>,
}

impl Free {
    fn term(&mut self, t: &Term) {
        self.names.extend(t.0.names.iter().cloned());
        self.vars.extend(t.0.vars.iter().cloned());
    }

    fn term_without_var(&mut self, t: &Term, var: &Name) {
        self.names.extend(t.0.names.iter().cloned());
        self.vars
            .extend(t.0.vars.iter().filter(|v| *v != var).cloned());
    }

    fn term_without_name(&mut self, t: &Term, dim: &Name) {
        self.names
            .extend(t.0.names.iter().filter(|n| *n != dim).cloned());
        self.vars.extend(t.0.vars.iter().cloned());
    }

    fn interval(&mut self, r: &Interval) {
        self.names.extend(r.names());
    }

    fn face(&mut self, f: &Face) {
        self.names.extend(f.names());
    }

    fn sys(&mut self, sys: &Sys) {
        for (f, t) in sys {
            self.face(f);
            self.term(t);
        }
    }

    fn sys_under(&mut self, sys: &Sys, dim: &Name) {
        for (f, t) in sys {
            self.face(f);
            self.term_without_name(t, dim);
        }
    }
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        let mut fr = Free::default();
        use TermKind::*;
        match &kind {
            Var(x) => {
                fr.vars.insert(x.clone());
            }
            Nat | Zero | U | S1 | Base => {}
            Suc(t) | Fst(t) | Snd(t) | Inh(t) | Inc(t) => fr.term(t),
            Natrec {
                var,
                motive,
                scrut,
                zero,
                succ,
            } => {
                fr.term_without_var(motive, var);
                fr.term(scrut);
                fr.term(zero);
                fr.term(succ);
            }
            Pi { var, dom, cod } => {
                fr.term(dom);
                fr.term_without_var(cod, var);
            }
            Lam { var, ty, body } => {
                fr.term(ty);
                fr.term_without_var(body, var);
            }
            Sigma {
                var,
                fst_ty,
                snd_ty,
            } => {
                fr.term(fst_ty);
                fr.term_without_var(snd_ty, var);
            }
            App(a, b) | Pair(a, b) => {
                fr.term(a);
                fr.term(b);
            }
            PathT {
                dim,
                ty,
                left,
                right,
            } => {
                fr.term_without_name(ty, dim);
                fr.term(left);
                fr.term(right);
            }
            PAbs { dim, body } => fr.term_without_name(body, dim),
            PApp(t, r) => {
                fr.term(t);
                fr.interval(r);
            }
            SystemT(sys) | SystemE(sys) => fr.sys(sys),
            GlueT { branches, base } => {
                for b in branches {
                    fr.face(&b.face);
                    fr.term(&b.ty);
                    fr.term(&b.equiv);
                }
                fr.term(base);
            }
            GlueE { sys, base } => {
                fr.sys(sys);
                fr.term(base);
            }
            Unglue { sys, arg } => {
                fr.sys(sys);
                fr.term(arg);
            }
            Comp {
                dim,
                line,
                sys,
                base,
            } => {
                fr.term_without_name(line, dim);
                fr.sys_under(sys, dim);
                fr.term(base);
            }
            Loop(r) => fr.interval(r),
            S1Elim {
                var,
                motive,
                scrut,
                base_case,
                loop_case,
            } => {
                fr.term_without_var(motive, var);
                fr.term(scrut);
                fr.term(base_case);
                fr.term(loop_case);
            }
            Squash(u, v, r) => {
                fr.term(u);
                fr.term(v);
                fr.interval(r);
            }
            Hcomp { ty, dim, sys, base } => {
                fr.term(ty);
                fr.sys_under(sys, dim);
                fr.term(base);
            }
            Fwd { dim, line, at, arg } => {
                fr.term_without_name(line, dim);
                fr.interval(at);
                fr.term(arg);
            }
            InhElim {
                var,
                motive,
                scrut,
                inc_case,
                squash_case,
            } => {
                fr.term_without_var(motive, var);
                fr.term(scrut);
                fr.term(inc_case);
                fr.term(squash_case);
            }
        }
        Term(Arc::new(Node {
            kind,
            names: fr.names.into_iter().collect(),
            vars: fr.vars.into_iter().collect(),
        }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Free interval names, sorted.
    pub fn free_names(&self) -> &[Name] {
        &self.0.names
    }

    /// Free term variables, sorted.
    pub fn free_vars(&self) -> &[Name] {
        &self.0.vars
    }

    pub fn has_free_name(&self, n: &Name) -> bool {
        self.0.names.binary_search(n).is_ok()
    }

    pub fn has_free_var(&self, x: &Name) -> bool {
        self.0.vars.binary_search(x).is_ok()
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Number of nodes, for diagnostics.
    pub fn size(&self) -> usize {
        let mut n = 0;
        crate::syntax::visit_children(self, &mut |c| n += c.size());
        n + 1
    }

    // Constructors.

    pub fn var(x: Name) -> Term {
        Term::new(TermKind::Var(x))
    }
    pub fn nat() -> Term {
        Term::new(TermKind::Nat)
    }
    pub fn zero() -> Term {
        Term::new(TermKind::Zero)
    }
    pub fn suc(t: Term) -> Term {
        Term::new(TermKind::Suc(t))
    }
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::zero(), |t, _| Term::suc(t))
    }
    pub fn natrec(var: Name, motive: Term, scrut: Term, zero: Term, succ: Term) -> Term {
        Term::new(TermKind::Natrec {
            var,
            motive,
            scrut,
            zero,
            succ,
        })
    }
    pub fn pi(var: Name, dom: Term, cod: Term) -> Term {
        Term::new(TermKind::Pi { var, dom, cod })
    }
    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::pi(Name::fresh_named("_"), dom, cod)
    }
    pub fn lam(var: Name, ty: Term, body: Term) -> Term {
        Term::new(TermKind::Lam { var, ty, body })
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::new(TermKind::App(f, a))
    }
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn sigma(var: Name, fst_ty: Term, snd_ty: Term) -> Term {
        Term::new(TermKind::Sigma {
            var,
            fst_ty,
            snd_ty,
        })
    }
    pub fn times(a: Term, b: Term) -> Term {
        Term::sigma(Name::fresh_named("_"), a, b)
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::new(TermKind::Pair(a, b))
    }
    pub fn fst(t: Term) -> Term {
        Term::new(TermKind::Fst(t))
    }
    pub fn snd(t: Term) -> Term {
        Term::new(TermKind::Snd(t))
    }
    pub fn path_t(dim: Name, ty: Term, left: Term, right: Term) -> Term {
        Term::new(TermKind::PathT {
            dim,
            ty,
            left,
            right,
        })
    }
    /// Non-dependent `Path A a b`, a dependent path type with a vacuous binder.
    pub fn path(ty: Term, left: Term, right: Term) -> Term {
        Term::path_t(Name::fresh_named("_i"), ty, left, right)
    }
    pub fn pabs(dim: Name, body: Term) -> Term {
        Term::new(TermKind::PAbs { dim, body })
    }
    pub fn papp(t: Term, r: Interval) -> Term {
        Term::new(TermKind::PApp(t, r))
    }
    pub fn system_t(sys: Sys) -> Term {
        Term::new(TermKind::SystemT(sys))
    }
    pub fn system_e(sys: Sys) -> Term {
        Term::new(TermKind::SystemE(sys))
    }
    pub fn glue_t(branches: Vec<GlueBranch>, base: Term) -> Term {
        Term::new(TermKind::GlueT { branches, base })
    }
    pub fn glue_e(sys: Sys, base: Term) -> Term {
        Term::new(TermKind::GlueE { sys, base })
    }
    pub fn unglue(sys: Sys, arg: Term) -> Term {
        Term::new(TermKind::Unglue { sys, arg })
    }
    pub fn universe() -> Term {
        Term::new(TermKind::U)
    }
    pub fn comp(dim: Name, line: Term, sys: Sys, base: Term) -> Term {
        Term::new(TermKind::Comp {
            dim,
            line,
            sys,
            base,
        })
    }
    pub fn s1() -> Term {
        Term::new(TermKind::S1)
    }
    pub fn base() -> Term {
        Term::new(TermKind::Base)
    }
    pub fn loop_(r: Interval) -> Term {
        Term::new(TermKind::Loop(r))
    }
    pub fn s1_elim(var: Name, motive: Term, scrut: Term, base_case: Term, loop_case: Term) -> Term {
        Term::new(TermKind::S1Elim {
            var,
            motive,
            scrut,
            base_case,
            loop_case,
        })
    }
    pub fn inh(t: Term) -> Term {
        Term::new(TermKind::Inh(t))
    }
    pub fn inc(t: Term) -> Term {
        Term::new(TermKind::Inc(t))
    }
    pub fn squash(u: Term, v: Term, r: Interval) -> Term {
        Term::new(TermKind::Squash(u, v, r))
    }
    pub fn hcomp(ty: Term, dim: Name, sys: Sys, base: Term) -> Term {
        Term::new(TermKind::Hcomp { ty, dim, sys, base })
    }
    pub fn fwd(dim: Name, line: Term, at: Interval, arg: Term) -> Term {
        Term::new(TermKind::Fwd { dim, line, at, arg })
    }
    pub fn inh_elim(
        var: Name,
        motive: Term,
        scrut: Term,
        inc_case: Term,
        squash_case: Term,
    ) -> Term {
        Term::new(TermKind::InhElim {
            var,
            motive,
            scrut,
            inc_case,
            squash_case,
        })
    }

    /// `Some(n)` if this term is literally `suc^n 0`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut t = self;
        let mut n = 0;
        loop {
            match t.kind() {
                TermKind::Zero => return Some(n),
                TermKind::Suc(u) => {
                    n += 1;
                    t = u;
                }
                _ => return None,
            }
        }
    }
}

/// Calls `f` on every immediate subterm.
pub(crate) fn visit_children(t: &Term, f: &mut dyn FnMut(&Term)) {
    use TermKind::*;
    match t.kind() {
        Var(_) | Nat | Zero | U | S1 | Base | Loop(_) => {}
        Suc(a) | Fst(a) | Snd(a) | Inh(a) | Inc(a) | PAbs { body: a, .. } | PApp(a, _) => f(a),
        Natrec {
            motive,
            scrut,
            zero,
            succ,
            ..
        } => {
            f(motive);
            f(scrut);
            f(zero);
            f(succ);
        }
        Pi { dom: a, cod: b, .. }
        | Lam { ty: a, body: b, .. }
        | Sigma {
            fst_ty: a,
            snd_ty: b,
            ..
        }
        | App(a, b)
        | Pair(a, b)
        | Squash(a, b, _) => {
            f(a);
            f(b);
        }
        PathT {
            ty, left, right, ..
        } => {
            f(ty);
            f(left);
            f(right);
        }
        SystemT(sys) | SystemE(sys) => sys.iter().for_each(|(_, t)| f(t)),
        GlueT { branches, base } => {
            for b in branches {
                f(&b.ty);
                f(&b.equiv);
            }
            f(base);
        }
        GlueE { sys, base } | Unglue { sys, arg: base } => {
            sys.iter().for_each(|(_, t)| f(t));
            f(base);
        }
        Comp {
            line, sys, base, ..
        } => {
            f(line);
            sys.iter().for_each(|(_, t)| f(t));
            f(base);
        }
        Hcomp { ty, sys, base, .. } => {
            f(ty);
            sys.iter().for_each(|(_, t)| f(t));
            f(base);
        }
        Fwd { line, arg, .. } => {
            f(line);
            f(arg);
        }
        S1Elim {
            motive,
            scrut,
            base_case,
            loop_case,
            ..
        } => {
            f(motive);
            f(scrut);
            f(base_case);
            f(loop_case);
        }
        InhElim {
            motive,
            scrut,
            inc_case,
            squash_case,
            ..
        } => {
            f(motive);
            f(scrut);
            f(inc_case);
            f(squash_case);
        }
    }
}

/// Free interval names of a term.
pub fn free_names(t: &Term) -> BTreeSet<Name> {
    t.free_names().iter().cloned().collect()
}

/// α-equivalence: equal up to consistent renaming of bound names and
/// bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    Alpha::default().term(a, b)
}

/// Binder environments for both sides, mapping bound names to depths.
#[derive(Default)]
struct Alpha {
    left: HashMap<Name, usize>,
    right: HashMap<Name, usize>,
    depth: usize,
}

impl Alpha {
    fn bind<R>(&mut self, x: &Name, y: &Name, k: impl FnOnce(&mut Alpha) -> R) -> R {
        let d = self.depth;
        self.depth += 1;
        let old_l = self.left.insert(x.clone(), d);
        let old_r = self.right.insert(y.clone(), d);
        let out = k(self);
        restore(&mut self.left, x, old_l);
        restore(&mut self.right, y, old_r);
        self.depth -= 1;
        out
    }

    fn name(&self, x: &Name, y: &Name) -> bool {
        match (self.left.get(x), self.right.get(y)) {
            (Some(a), Some(b)) => a == b,
            (None, None) => x == y,
            _ => false,
        }
    }

    fn rename_map(env: &HashMap<Name, usize>, names: BTreeSet<Name>) -> BTreeMap<Name, Interval> {
        names
            .into_iter()
            .filter_map(|n| env.get(&n).map(|d| (n, Interval::name(Name::level(*d)))))
            .collect()
    }

    fn interval(&self, r: &Interval, s: &Interval) -> bool {
        let r2 = r.subst(&Alpha::rename_map(&self.left, r.names()));
        let s2 = s.subst(&Alpha::rename_map(&self.right, s.names()));
        r2 == s2
    }

    fn face(&self, f: &Face, g: &Face) -> bool {
        let f2 = f.subst(&Alpha::rename_map(&self.left, f.names()));
        let g2 = g.subst(&Alpha::rename_map(&self.right, g.names()));
        f2 == g2
    }

    fn sys(&mut self, a: &Sys, b: &Sys) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|((f, t), (g, u))| self.face(f, g) && self.term(t, u))
    }

    fn sys_dims(&mut self, x: &Name, a: &Sys, y: &Name, b: &Sys) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|((f, t), (g, u))| self.face(f, g) && self.bind(x, y, |s| s.term(t, u)))
    }

    /// Shared subterms are equal when every free name is treated alike.
    fn same_env(&self, t: &Term) -> bool {
        t.free_names()
            .iter()
            .chain(t.free_vars())
            .all(|n| self.left.get(n) == self.right.get(n))
    }

    fn term(&mut self, a: &Term, b: &Term) -> bool {
        if a.ptr_eq(b) && self.same_env(a) {
            return true;
        }
        use TermKind::*;
        match (a.kind(), b.kind()) {
            (Var(x), Var(y)) => self.name(x, y),
            (Nat, Nat) | (Zero, Zero) | (U, U) | (S1, S1) | (Base, Base) => true,
            (Suc(x), Suc(y))
            | (Fst(x), Fst(y))
            | (Snd(x), Snd(y))
            | (Inh(x), Inh(y))
            | (Inc(x), Inc(y)) => self.term(x, y),
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
                self.bind(v1, v2, |s| s.term(m1, m2))
                    && self.term(s1, s2)
                    && self.term(z1, z2)
                    && self.term(c1, c2)
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
                Lam {
                    var: x,
                    ty: a1,
                    body: b1,
                },
                Lam {
                    var: y,
                    ty: a2,
                    body: b2,
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
            ) => self.term(a1, a2) && self.bind(x, y, |s| s.term(b1, b2)),
            (App(f1, a1), App(f2, a2)) | (Pair(f1, a1), Pair(f2, a2)) => {
                self.term(f1, f2) && self.term(a1, a2)
            }
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
            ) => self.bind(i, j, |s| s.term(t1, t2)) && self.term(l1, l2) && self.term(r1, r2),
            (PAbs { dim: i, body: t1 }, PAbs { dim: j, body: t2 }) => {
                self.bind(i, j, |s| s.term(t1, t2))
            }
            (PApp(t1, r1), PApp(t2, r2)) => self.term(t1, t2) && self.interval(r1, r2),
            (SystemT(s1), SystemT(s2)) | (SystemE(s1), SystemE(s2)) => self.sys(s1, s2),
            (
                GlueT {
                    branches: b1,
                    base: a1,
                },
                GlueT {
                    branches: b2,
                    base: a2,
                },
            ) => {
                b1.len() == b2.len()
                    && b1.iter().zip(b2).all(|(x, y)| {
                        self.face(&x.face, &y.face)
                            && self.term(&x.ty, &y.ty)
                            && self.term(&x.equiv, &y.equiv)
                    })
                    && self.term(a1, a2)
            }
            (GlueE { sys: s1, base: a1 }, GlueE { sys: s2, base: a2 })
            | (Unglue { sys: s1, arg: a1 }, Unglue { sys: s2, arg: a2 }) => {
                self.sys(s1, s2) && self.term(a1, a2)
            }
            (
                Comp {
                    dim: i,
                    line: l1,
                    sys: s1,
                    base: b1,
                },
                Comp {
                    dim: j,
                    line: l2,
                    sys: s2,
                    base: b2,
                },
            ) => {
                self.bind(i, j, |s| s.term(l1, l2))
                    && self.sys_dims(i, s1, j, s2)
                    && self.term(b1, b2)
            }
            (Loop(r), Loop(s)) => self.interval(r, s),
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
                self.bind(v1, v2, |s| s.term(m1, m2))
                    && self.term(s1, s2)
                    && self.term(b1, b2)
                    && self.term(l1, l2)
            }
            (Squash(u1, v1, r1), Squash(u2, v2, r2)) => {
                self.term(u1, u2) && self.term(v1, v2) && self.interval(r1, r2)
            }
            (
                Hcomp {
                    ty: t1,
                    dim: i,
                    sys: s1,
                    base: b1,
                },
                Hcomp {
                    ty: t2,
                    dim: j,
                    sys: s2,
                    base: b2,
                },
            ) => self.term(t1, t2) && self.sys_dims(i, s1, j, s2) && self.term(b1, b2),
            (
                Fwd {
                    dim: i,
                    line: l1,
                    at: r1,
                    arg: a1,
                },
                Fwd {
                    dim: j,
                    line: l2,
                    at: r2,
                    arg: a2,
                },
            ) => self.bind(i, j, |s| s.term(l1, l2)) && self.interval(r1, r2) && self.term(a1, a2),
            (
                InhElim {
                    var: v1,
                    motive: m1,
                    scrut: s1,
                    inc_case: t1,
                    squash_case: p1,
                },
                InhElim {
                    var: v2,
                    motive: m2,
                    scrut: s2,
                    inc_case: t2,
                    squash_case: p2,
                },
            ) => {
                self.bind(v1, v2, |s| s.term(m1, m2))
                    && self.term(s1, s2)
                    && self.term(t1, t2)
                    && self.term(p1, p2)
            }
            _ => false,
        }
    }
}

fn restore(env: &mut HashMap<Name, usize>, key: &Name, old: Option<usize>) {
    match old {
        Some(d) => {
            env.insert(key.clone(), d);
        }
        None => {
            env.remove(key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renaming_is_alpha_equal() {
        let x = Name::new("x");
        let y = Name::new("y");
        let lx = Term::lam(x.clone(), Term::nat(), Term::var(x));
        let ly = Term::lam(y.clone(), Term::nat(), Term::var(y));
        assert!(alpha_eq(&lx, &ly));
        assert!(!alpha_eq(&Term::numeral(1), &Term::zero()));

        let i = Name::new("i");
        let j = Name::new("j");
        let pi = Term::pabs(i.clone(), Term::loop_(Interval::name(i.clone())));
        let pj = Term::pabs(j.clone(), Term::loop_(Interval::name(j.clone())));
        assert!(alpha_eq(&pi, &pj));
    }

    #[test]
    fn free_names_respect_binders() {
        let i = Name::new("i");
        let j = Name::new("j");
        let li = Term::loop_(Interval::name(i.clone()));
        assert_eq!(free_names(&li), [i.clone()].into_iter().collect());
        assert!(free_names(&Term::pabs(i.clone(), li)).is_empty());
        let c = Term::comp(
            i.clone(),
            Term::nat(),
            vec![(Face::atom(j.clone(), false), Term::zero())],
            Term::zero(),
        );
        assert_eq!(free_names(&c), [j].into_iter().collect());
    }

    #[test]
    fn bound_names_do_not_match_free_ones() {
        let i = Name::new("i");
        let j = Name::new("j");
        let bound = Term::pabs(i.clone(), Term::loop_(Interval::name(i.clone())));
        let free = Term::pabs(i.clone(), Term::loop_(Interval::name(j.clone())));
        assert!(!alpha_eq(&bound, &free));
        // Interval normal forms are compared after renaming, so meet order
        // induced by the names does not matter.
        let a = Term::pabs(
            i.clone(),
            Term::loop_(Interval::name(i.clone()).meet(&Interval::name(Name::new("k")))),
        );
        let z = Name::new("z");
        let b = Term::pabs(
            z.clone(),
            Term::loop_(Interval::name(Name::new("k")).meet(&Interval::name(z))),
        );
        assert!(alpha_eq(&a, &b));
    }

    #[test]
    fn fresh_names_are_distinct() {
        let i = Name::new("i");
        let a = i.fresh();
        let b = i.fresh();
        assert_ne!(a, b);
        assert_ne!(a, i);
        assert_eq!(a.base(), "i");
    }
}
