//! Term-level constructions used by the reduction rules: filling,
//! predecessor, transport, equivalences and the pieces of composition in
//! Glue types.

use crate::faces::{face_forall, total_face, Face};
use crate::interval::Interval;
use crate::subst::subst_name;
use crate::syntax::{GlueBranch, Name, Sys, Term};

fn iv(n: &Name) -> Interval {
    Interval::name(n.clone())
}

/// `t(i0)` or `t(i1)`.
pub fn at_end(t: &Term, i: &Name, one: bool) -> Term {
    subst_name(t, i, &Interval::endpoint(one))
}

pub(crate) fn end_sys(sys: &Sys, i: &Name, one: bool) -> Sys {
    let r = Interval::endpoint(one);
    sys.iter()
        .map(|(f, t)| (f.subst1(i, &r), subst_name(t, i, &r)))
        .collect()
}

pub(crate) fn map_sys(sys: &Sys, f: impl Fn(&Term) -> Term) -> Sys {
    sys.iter().map(|(p, t)| (p.clone(), f(t))).collect()
}

/// `fill^i A [phi -> u] u0`, with the extra constraint `(i=0) -> u0` last.
pub fn fill(i: &Name, a: &Term, sys: &Sys, u0: &Term) -> Term {
    let j = Name::fresh_named("j");
    let ij = iv(i).meet(&iv(&j));
    let mut constraints: Sys = sys
        .iter()
        .map(|(f, u)| (f.clone(), subst_name(u, i, &ij)))
        .collect();
    constraints.push((Face::atom(i.clone(), false), u0.clone()));
    Term::comp(j, subst_name(a, i, &ij), constraints, u0.clone())
}

/// `\(n : N) -> natrec{_. N} n 0 (\(x : N) (_ : N) -> x)`.
pub fn pred_term() -> Term {
    let n = Name::new("n");
    let x = Name::new("x");
    Term::lam(
        n.clone(),
        Term::nat(),
        Term::natrec(
            Name::new("_"),
            Term::nat(),
            Term::var(n),
            Term::zero(),
            Term::lam(
                x.clone(),
                Term::nat(),
                Term::lam(Name::new("_"), Term::nat(), Term::var(x)),
            ),
        ),
    )
}

/// Composition with no constraints.
pub fn transp(i: &Name, a: &Term, u: &Term) -> Term {
    Term::comp(i.clone(), a.clone(), vec![], u.clone())
}

/// `(c : C) * ((y : C) -> Path C c y)`.
pub fn is_contr(c: &Term) -> Term {
    let x = Name::fresh_named("c");
    let y = Name::fresh_named("y");
    Term::sigma(
        x.clone(),
        c.clone(),
        Term::pi(
            y.clone(),
            c.clone(),
            Term::path(c.clone(), Term::var(x), Term::var(y)),
        ),
    )
}

/// `(x : T) * Path A a (f x)`.
pub fn fiber(t: &Term, a: &Term, f: &Term, point: &Term) -> Term {
    let x = Name::fresh_named("x");
    Term::sigma(
        x.clone(),
        t.clone(),
        Term::path(a.clone(), point.clone(), Term::app(f.clone(), Term::var(x))),
    )
}

/// `Equiv T A`, a function together with contractibility of its fibers.
pub fn equiv_type(t: &Term, a: &Term) -> Term {
    let f = Name::fresh_named("f");
    let y = Name::fresh_named("a");
    Term::sigma(
        f.clone(),
        Term::arrow(t.clone(), a.clone()),
        Term::pi(
            y.clone(),
            a.clone(),
            is_contr(&fiber(t, a, &Term::var(f), &Term::var(y))),
        ),
    )
}

/// The identity equivalence; contractibility of singletons uses the
/// connection `j /\ k`.
pub fn id_equiv(a: &Term) -> Term {
    let x = Name::fresh_named("x");
    let id = Term::lam(x.clone(), a.clone(), Term::var(x));
    let p = Name::fresh_named("a");
    let y = Name::fresh_named("y");
    let j = Name::fresh_named("j");
    let k = Name::fresh_named("k");
    let center = Term::pair(
        Term::var(p.clone()),
        Term::pabs(j.clone(), Term::var(p.clone())),
    );
    let q = Term::snd(Term::var(y.clone()));
    let contraction = Term::lam(
        y,
        fiber(a, a, &id, &Term::var(p.clone())),
        Term::pabs(
            k.clone(),
            Term::pair(
                Term::papp(q.clone(), iv(&k)),
                Term::pabs(j.clone(), Term::papp(q, iv(&j).meet(&iv(&k)))),
            ),
        ),
    );
    Term::pair(id, Term::lam(p, a.clone(), Term::pair(center, contraction)))
}

/// `ptoeq^i A : Equiv A(i0) A(i1)`, transport of the identity equivalence.
pub fn ptoeq(i: &Name, a: &Term) -> Term {
    let a0 = at_end(a, i, false);
    Term::comp(i.clone(), equiv_type(&a0, a), vec![], id_equiv(&a0))
}

/// `pres^i f [psi -> u] u0`: a path from `comp^i A [psi -> f u] (f(i0) u0)`
/// to `f(i1) (comp^i T [psi -> u] u0)`.
pub fn pres(i: &Name, f: &Term, t: &Term, a: &Term, sys: &Sys, u0: &Term) -> Term {
    let j = Name::fresh_named("j");
    let v = fill(i, t, sys, u0);
    let mut constraints = map_sys(sys, |u| Term::app(f.clone(), u.clone()));
    constraints.push((Face::atom(j.clone(), true), Term::app(f.clone(), v)));
    Term::pabs(
        j,
        Term::comp(
            i.clone(),
            a.clone(),
            constraints,
            Term::app(at_end(f, i, false), u0.clone()),
        ),
    )
}

/// A partial fiber element `phi -> (t, alpha)` for [`equiv_extend`].
#[derive(Clone, Debug)]
pub struct FiberBranch {
    pub face: Face,
    pub point: Term,
    pub path: Term,
}

/// Extends partial fiber elements of `w` over `a` to a total one, by
/// composing from the center of contraction. Returns `(t, alpha)`.
pub fn equiv_extend(
    w: &Term,
    t: &Term,
    a: &Term,
    branches: &[FiberBranch],
    point: &Term,
) -> (Term, Term) {
    let j = Name::fresh_named("j");
    let c = fiber(t, a, &Term::fst(w.clone()), point);
    let contr = Term::app(Term::snd(w.clone()), point.clone());
    let constraints: Sys = branches
        .iter()
        .map(|b| {
            (
                b.face.clone(),
                Term::papp(
                    Term::app(
                        Term::snd(contr.clone()),
                        Term::pair(b.point.clone(), b.path.clone()),
                    ),
                    iv(&j),
                ),
            )
        })
        .collect();
    let result = Term::comp(j, c, constraints, Term::fst(contr));
    (Term::fst(result.clone()), Term::snd(result))
}

/// Inputs of composition in a Glue type along `i`.
#[derive(Clone, Debug)]
pub struct GlueCompInputs {
    pub dim: Name,
    pub branches: Vec<GlueBranch>,
    pub base_ty: Term,
    pub sys: Sys,
    pub base: Term,
}

impl GlueCompInputs {
    /// The Glue face, fiber type and equivalence; several branches are
    /// combined into systems.
    fn glue_data(&self) -> (Face, Term, Term) {
        let faces: Vec<(Face, ())> = self.branches.iter().map(|b| (b.face.clone(), ())).collect();
        let phi = total_face(&faces);
        if let [b] = self.branches.as_slice() {
            return (phi, b.ty.clone(), b.equiv.clone());
        }
        let t = Term::system_t(
            self.branches
                .iter()
                .map(|b| (b.face.clone(), b.ty.clone()))
                .collect(),
        );
        let w = Term::system_e(
            self.branches
                .iter()
                .map(|b| (b.face.clone(), b.equiv.clone()))
                .collect(),
        );
        (phi, t, w)
    }

    fn equivs(&self) -> Sys {
        self.branches
            .iter()
            .map(|b| (b.face.clone(), b.equiv.clone()))
            .collect()
    }
}

/// The pair `(t1, a1)` with `comp^i (Glue [phi -> (T,w)] A) [psi -> u] u0`
/// reducing to `glue [phi(i1) -> t1] a1`.
pub fn glue_comp_parts(inp: &GlueCompInputs) -> (Term, Term) {
    let i = &inp.dim;
    let (phi, t, w) = inp.glue_data();
    let wsys = inp.equivs();
    let wsys0 = end_sys(&wsys, i, false);
    let a_ty = &inp.base_ty;

    let a = map_sys(&inp.sys, |u| Term::unglue(wsys.clone(), u.clone()));
    let a0 = Term::unglue(wsys0, inp.base.clone());
    let delta = face_forall(i, &phi);
    let a1p = Term::comp(i.clone(), a_ty.clone(), a.clone(), a0);
    let t1p = Term::comp(i.clone(), t.clone(), inp.sys.clone(), inp.base.clone());
    let omega = pres(i, &Term::fst(w.clone()), &t, a_ty, &inp.sys, &inp.base);

    let mut branches = vec![FiberBranch {
        face: delta,
        point: t1p,
        path: omega,
    }];
    for (psi, u) in &inp.sys {
        branches.push(FiberBranch {
            face: psi.clone(),
            point: at_end(u, i, true),
            path: Term::pabs(Name::fresh_named("j"), a1p.clone()),
        });
    }
    let a_ty1 = at_end(a_ty, i, true);
    let (t1, alpha) = equiv_extend(
        &at_end(&w, i, true),
        &at_end(&t, i, true),
        &a_ty1,
        &branches,
        &a1p,
    );

    let j = Name::fresh_named("j");
    let phi1 = phi.subst1(i, &Interval::one());
    let mut constraints: Sys = vec![(phi1, Term::papp(alpha, iv(&j)))];
    constraints.extend(end_sys(&a, i, true));
    let a1 = Term::comp(j, a_ty1, constraints, a1p);
    (t1, a1)
}

/// The reduct `glue [phi(i1) -> t1] a1`.
pub fn glue_comp(inp: &GlueCompInputs) -> Term {
    let (t1, a1) = glue_comp_parts(inp);
    let faces: Vec<(Face, ())> = inp.branches.iter().map(|b| (b.face.clone(), ())).collect();
    let phi1 = total_face(&faces).subst1(&inp.dim, &Interval::one());
    Term::glue_e(vec![(phi1, t1)], a1)
}
