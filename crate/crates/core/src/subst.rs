//! Capture-avoiding substitution of interval elements for names and of
//! terms for variables, plus first-class name substitutions `f : J -> I`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::faces::Face;
use crate::interval::Interval;
use crate::syntax::{GlueBranch, Name, NameCtx, Sys, Term, TermKind};

/// A simultaneous substitution on both namespaces.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    names: BTreeMap<Name, Interval>,
    vars: BTreeMap<Name, Term>,
    range_names: BTreeSet<Name>,
    range_vars: BTreeSet<Name>,
}

impl Subst {
    pub fn new(names: BTreeMap<Name, Interval>, vars: BTreeMap<Name, Term>) -> Subst {
        let mut range_names = BTreeSet::new();
        let mut range_vars = BTreeSet::new();
        for r in names.values() {
            range_names.extend(r.names());
        }
        for t in vars.values() {
            range_names.extend(t.free_names().iter().cloned());
            range_vars.extend(t.free_vars().iter().cloned());
        }
        Subst {
            names,
            vars,
            range_names,
            range_vars,
        }
    }

    pub fn names(map: BTreeMap<Name, Interval>) -> Subst {
        Subst::new(map, BTreeMap::new())
    }

    pub fn var(x: Name, u: Term) -> Subst {
        Subst::new(BTreeMap::new(), [(x, u)].into_iter().collect())
    }

    fn is_empty(&self) -> bool {
        self.names.is_empty() && self.vars.is_empty()
    }

    fn touches(&self, t: &Term) -> bool {
        self.names.keys().any(|n| t.has_free_name(n)) || self.vars.keys().any(|x| t.has_free_var(x))
    }

    fn without_name(&self, n: &Name) -> Subst {
        let mut s = self.clone();
        s.names.remove(n);
        s
    }

    fn without_var(&self, x: &Name) -> Subst {
        let mut s = self.clone();
        s.vars.remove(x);
        s
    }

    fn with_name(&self, n: Name, r: Interval) -> Subst {
        let mut s = self.clone();
        s.range_names.extend(r.names());
        s.names.insert(n, r);
        s
    }

    fn with_var(&self, x: Name, t: Term) -> Subst {
        let mut s = self.clone();
        s.range_names.extend(t.free_names().iter().cloned());
        s.range_vars.extend(t.free_vars().iter().cloned());
        s.vars.insert(x, t);
        s
    }

    pub fn interval(&self, r: &Interval) -> Interval {
        if self.names.is_empty() {
            r.clone()
        } else {
            r.subst(&self.names)
        }
    }

    pub fn face(&self, f: &Face) -> Face {
        if self.names.is_empty() {
            f.clone()
        } else {
            f.subst(&self.names)
        }
    }

    /// Enters a dimension binder scoping over `bodies`; returns the
    /// (possibly renamed) binder and the substitution to use beneath it.
    fn under_dim(&self, dim: &Name, bodies: &[&Term]) -> (Name, Subst) {
        let inner = self.without_name(dim);
        let live = bodies.iter().any(|b| inner.touches(b));
        if live && self.range_names.contains(dim) {
            let fresh = dim.fresh();
            let s = inner.with_name(dim.clone(), Interval::name(fresh.clone()));
            (fresh, s)
        } else {
            (dim.clone(), inner)
        }
    }

    fn under_var(&self, var: &Name, body: &Term) -> (Name, Subst) {
        let inner = self.without_var(var);
        if inner.touches(body) && self.range_vars.contains(var) {
            let fresh = var.fresh();
            let s = inner.with_var(var.clone(), Term::var(fresh.clone()));
            (fresh, s)
        } else {
            (var.clone(), inner)
        }
    }

    fn sys(&self, sys: &Sys) -> Sys {
        sys.iter()
            .map(|(f, t)| (self.face(f), self.apply(t)))
            .collect()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.is_empty() || !self.touches(t) {
            return t.clone();
        }
        use TermKind::*;
        match t.kind() {
            Var(x) => self.vars.get(x).cloned().unwrap_or_else(|| t.clone()),
            Nat | Zero | U | S1 | Base => t.clone(),
            Suc(a) => Term::suc(self.apply(a)),
            Fst(a) => Term::fst(self.apply(a)),
            Snd(a) => Term::snd(self.apply(a)),
            Inh(a) => Term::inh(self.apply(a)),
            Inc(a) => Term::inc(self.apply(a)),
            Natrec {
                var,
                motive,
                scrut,
                zero,
                succ,
            } => {
                let (v, s) = self.under_var(var, motive);
                Term::natrec(
                    v,
                    s.apply(motive),
                    self.apply(scrut),
                    self.apply(zero),
                    self.apply(succ),
                )
            }
            Pi { var, dom, cod } => {
                let (v, s) = self.under_var(var, cod);
                Term::pi(v, self.apply(dom), s.apply(cod))
            }
            Lam { var, ty, body } => {
                let (v, s) = self.under_var(var, body);
                Term::lam(v, self.apply(ty), s.apply(body))
            }
            Sigma {
                var,
                fst_ty,
                snd_ty,
            } => {
                let (v, s) = self.under_var(var, snd_ty);
                Term::sigma(v, self.apply(fst_ty), s.apply(snd_ty))
            }
            App(a, b) => Term::app(self.apply(a), self.apply(b)),
            Pair(a, b) => Term::pair(self.apply(a), self.apply(b)),
            PathT {
                dim,
                ty,
                left,
                right,
            } => {
                let (d, s) = self.under_dim(dim, &[ty]);
                Term::path_t(d, s.apply(ty), self.apply(left), self.apply(right))
            }
            PAbs { dim, body } => {
                let (d, s) = self.under_dim(dim, &[body]);
                Term::pabs(d, s.apply(body))
            }
            PApp(a, r) => Term::papp(self.apply(a), self.interval(r)),
            SystemT(sys) => Term::system_t(self.sys(sys)),
            SystemE(sys) => Term::system_e(self.sys(sys)),
            GlueT { branches, base } => Term::glue_t(
                branches
                    .iter()
                    .map(|b| GlueBranch {
                        face: self.face(&b.face),
                        ty: self.apply(&b.ty),
                        equiv: self.apply(&b.equiv),
                    })
                    .collect(),
                self.apply(base),
            ),
            GlueE { sys, base } => Term::glue_e(self.sys(sys), self.apply(base)),
            Unglue { sys, arg } => Term::unglue(self.sys(sys), self.apply(arg)),
            Comp {
                dim,
                line,
                sys,
                base,
            } => {
                let mut bodies: Vec<&Term> = vec![line];
                bodies.extend(sys.iter().map(|(_, u)| u));
                let (d, s) = self.under_dim(dim, &bodies);
                Term::comp(
                    d,
                    s.apply(line),
                    sys.iter()
                        .map(|(f, u)| (self.face(f), s.apply(u)))
                        .collect(),
                    self.apply(base),
                )
            }
            Loop(r) => Term::loop_(self.interval(r)),
            S1Elim {
                var,
                motive,
                scrut,
                base_case,
                loop_case,
            } => {
                let (v, s) = self.under_var(var, motive);
                Term::s1_elim(
                    v,
                    s.apply(motive),
                    self.apply(scrut),
                    self.apply(base_case),
                    self.apply(loop_case),
                )
            }
            Squash(u, v, r) => Term::squash(self.apply(u), self.apply(v), self.interval(r)),
            Hcomp { ty, dim, sys, base } => {
                let bodies: Vec<&Term> = sys.iter().map(|(_, u)| u).collect();
                let (d, s) = self.under_dim(dim, &bodies);
                Term::hcomp(
                    self.apply(ty),
                    d,
                    sys.iter()
                        .map(|(f, u)| (self.face(f), s.apply(u)))
                        .collect(),
                    self.apply(base),
                )
            }
            Fwd { dim, line, at, arg } => {
                let (d, s) = self.under_dim(dim, &[line]);
                Term::fwd(d, s.apply(line), self.interval(at), self.apply(arg))
            }
            InhElim {
                var,
                motive,
                scrut,
                inc_case,
                squash_case,
            } => {
                let (v, s) = self.under_var(var, motive);
                Term::inh_elim(
                    v,
                    s.apply(motive),
                    self.apply(scrut),
                    self.apply(inc_case),
                    self.apply(squash_case),
                )
            }
        }
    }
}

/// `t[x/u]`.
pub fn term_subst(t: &Term, x: &Name, u: &Term) -> Term {
    Subst::var(x.clone(), u.clone()).apply(t)
}

/// `t[i/r]`.
pub fn subst_name(t: &Term, i: &Name, r: &Interval) -> Term {
    Subst::names([(i.clone(), r.clone())].into_iter().collect()).apply(t)
}

/// Simultaneous `t[i1/r1, ..., in/rn]`.
pub fn subst_names(t: &Term, map: &BTreeMap<Name, Interval>) -> Term {
    Subst::names(map.clone()).apply(t)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("substitution does not assign the domain name {0}")]
    NotTotal(Name),
    #[error("image of {0} mentions a name outside the codomain")]
    ImageOutOfCodomain(Name),
    #[error("name {0} is outside the substitution's domain")]
    OutOfDomain(Name),
    #[error("codomain of the first substitution differs from the domain of the second")]
    ContextMismatch,
}

/// A name substitution from the contex `domain` into `codomain`: every
/// domain name is assigned an interval element over the codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NameSubst {
    domain: NameCtx,
    codomain: NameCtx,
    map: BTreeMap<Name, Interval>,
}

impl NameSubst {
    pub fn new(
        domain: NameCtx,
        codomain: NameCtx,
        map: BTreeMap<Name, Interval>,
    ) -> Result<NameSubst, SubstError> {
        for n in domain.names() {
            let img = map.get(n).ok_or_else(|| SubstError::NotTotal(n.clone()))?;
            if img.names().iter().any(|m| !codomain.contains(m)) {
                return Err(SubstError::ImageOutOfCodomain(n.clone()));
            }
        }
        if let Some(extra) = map.keys().find(|k| !domain.contains(k)) {
            return Err(SubstError::OutOfDomain(extra.clone()));
        }
        Ok(NameSubst {
            domain,
            codomain,
            map,
        })
    }

    pub fn identity(ctx: &NameCtx) -> NameSubst {
        NameSubst {
            domain: ctx.clone(),
            codomain: ctx.clone(),
            map: ctx
                .names()
                .iter()
                .map(|n| (n.clone(), Interval::name(n.clone())))
                .collect(),
        }
    }

    pub fn domain(&self) -> &NameCtx {
        &self.domain
    }

    pub fn codomain(&self) -> &NameCtx {
        &self.codomain
    }

    pub fn map(&self) -> &BTreeMap<Name, Interval> {
        &self.map
    }

    pub fn image(&self, name: &Name) -> Option<&Interval> {
        self.map.get(name)
    }

    fn check_names<'a>(&self, names: impl IntoIterator<Item = &'a Name>) -> Result<(), SubstError> {
        for n in names {
            if !self.domain.contains(n) {
                return Err(SubstError::OutOfDomain(n.clone()));
            }
        }
        Ok(())
    }

    pub fn apply(&self, t: &Term) -> Result<Term, SubstError> {
        self.check_names(t.free_names())?;
        Ok(subst_names(t, &self.map))
    }

    pub fn apply_interval(&self, r: &Interval) -> Result<Interval, SubstError> {
        self.check_names(&r.names())?;
        Ok(r.subst(&self.map))
    }

    pub fn apply_face(&self, f: &Face) -> Result<Face, SubstError> {
        self.check_names(&f.names())?;
        Ok(f.subst(&self.map))
    }

    pub fn apply_sys(&self, sys: &Sys) -> Result<Sys, SubstError> {
        sys.iter()
            .map(|(f, t)| Ok((self.apply_face(f)?, self.apply(t)?)))
            .collect()
    }

    /// The composite acting as `self` first and then `g`.
    pub fn compose(&self, g: &NameSubst) -> Result<NameSubst, SubstError> {
        if self.codomain != g.domain {
            return Err(SubstError::ContextMismatch);
        }
        let map = self
            .map
            .iter()
            .map(|(n, r)| (n.clone(), r.subst(&g.map)))
            .collect();
        Ok(NameSubst {
            domain: self.domain.clone(),
            codomain: g.codomain.clone(),
            map,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    fn nm(s: &str) -> Name {
        Name::new(s)
    }

    fn iv(s: &str) -> Interval {
        Interval::name(nm(s))
    }

    #[test]
    fn loop_at_endpoint() {
        let ctx = NameCtx::from_names([nm("i")]);
        let f = NameSubst::new(
            ctx,
            NameCtx::empty(),
            [(nm("i"), Interval::zero())].into_iter().collect(),
        )
        .unwrap();
        let t = Term::loop_(iv("i"));
        assert!(alpha_eq(
            &f.apply(&t).unwrap(),
            &Term::loop_(Interval::zero())
        ));
    }

    #[test]
    fn comp_face_vanishes() {
        let j = nm("j");
        let t = Term::comp(
            nm("i"),
            Term::nat(),
            vec![(Face::atom(j.clone(), false), Term::zero())],
            Term::zero(),
        );
        let out = subst_name(&t, &j, &Interval::one());
        let expect = Term::comp(
            nm("i"),
            Term::nat(),
            vec![(Face::zero(), Term::zero())],
            Term::zero(),
        );
        assert!(alpha_eq(&out, &expect));
    }

    #[test]
    fn bound_name_is_untouched() {
        let i = nm("i");
        let t = Term::pabs(i.clone(), Term::loop_(iv("i")));
        assert!(alpha_eq(&subst_name(&t, &i, &Interval::one()), &t));
    }

    #[test]
    fn binder_is_renamed_to_avoid_capture() {
        // (<i> loop j)[j/i] must not become <i> loop i.
        let i = nm("i");
        let j = nm("j");
        let t = Term::pabs(i.clone(), Term::loop_(iv("j")));
        let out = subst_name(&t, &j, &iv("i"));
        let wrong = Term::pabs(i.clone(), Term::loop_(iv("i")));
        assert!(!alpha_eq(&out, &wrong));
        assert_eq!(out.free_names(), &[i]);

        let x = nm("x");
        let y = nm("y");
        let lam = Term::lam(x.clone(), Term::nat(), Term::var(y.clone()));
        let out = term_subst(&lam, &y, &Term::var(x.clone()));
        assert_eq!(out.free_vars(), &[x]);
    }

    #[test]
    fn term_substitution() {
        let x = nm("x");
        assert!(alpha_eq(
            &term_subst(&Term::var(x.clone()), &x, &Term::zero()),
            &Term::zero()
        ));
        let t = Term::suc(Term::var(x.clone()));
        assert!(alpha_eq(
            &term_subst(&t, &x, &Term::numeral(1)),
            &Term::numeral(2)
        ));
        let lam = Term::lam(x.clone(), Term::nat(), Term::var(x.clone()));
        assert!(alpha_eq(&term_subst(&lam, &x, &Term::zero()), &lam));
    }

    #[test]
    fn composition() {
        let ij = NameCtx::from_names([nm("i")]);
        let jk = NameCtx::from_names([nm("j"), nm("k")]);
        let k = NameCtx::from_names([nm("k")]);
        let f = NameSubst::new(
            ij.clone(),
            jk.clone(),
            [(nm("i"), iv("j").meet(&iv("k")))].into_iter().collect(),
        )
        .unwrap();
        let g = NameSubst::new(
            jk.clone(),
            k.clone(),
            [(nm("j"), Interval::one()), (nm("k"), iv("k"))]
                .into_iter()
                .collect(),
        )
        .unwrap();
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.image(&nm("i")), Some(&iv("k")));
        assert_eq!(NameSubst::identity(&ij).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&NameSubst::identity(&jk)).unwrap(), f);
        assert_eq!(g.compose(&f), Err(SubstError::ContextMismatch));
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let f = NameSubst::identity(&NameCtx::from_names([nm("i")]));
        assert!(f.apply(&Term::loop_(iv("j"))).is_err());
        assert!(NameSubst::new(
            NameCtx::from_names([nm("i")]),
            NameCtx::empty(),
            [(nm("i"), iv("j"))].into_iter().collect()
        )
        .is_err());
    }
}
