//! A second, deliberately naive interpreter used to produce expected
//! values. Big-step and directly recursive, it shares only the syntax,
//! substitution and algebra layers with the crate; every derived
//! construction is rebuilt here from the rules.
#![allow(dead_code)]

use cubical::faces::{face_forall, Face};
use cubical::interval::Interval;
use cubical::subst::{subst_name, term_subst};
use cubical::syntax::{GlueBranch, Name, Sys, Term, TermKind};

pub type Res<T> = Result<T, String>;

fn iv(n: &Name) -> Interval {
    Interval::name(n.clone())
}

fn first_true<T: Clone>(xs: &[(Face, T)]) -> Option<T> {
    xs.iter().find(|(f, _)| f.is_one()).map(|(_, t)| t.clone())
}

fn at(t: &Term, i: &Name, one: bool) -> Term {
    subst_name(t, i, &Interval::endpoint(one))
}

fn map_sys(sys: &Sys, f: impl Fn(&Term) -> Term) -> Sys {
    sys.iter().map(|(p, t)| (p.clone(), f(t))).collect()
}

pub fn pred() -> Term {
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
                Term::lam(Name::new("_r"), Term::nat(), Term::var(x)),
            ),
        ),
    )
}

/// fill^i A [phi -> u] u0 = comp^j A[i/i/\j] [phi -> u[i/i/\j], (i=0) -> u0] u0
pub fn fill(i: &Name, a: &Term, sys: &Sys, u0: &Term) -> Term {
    let j = Name::fresh_named("j");
    let ij = iv(i).meet(&iv(&j));
    let mut s: Sys = sys
        .iter()
        .map(|(f, u)| (f.clone(), subst_name(u, i, &ij)))
        .collect();
    s.push((Face::atom(i.clone(), false), u0.clone()));
    Term::comp(j, subst_name(a, i, &ij), s, u0.clone())
}

fn fiber(t: &Term, a: &Term, f: &Term, y: &Term) -> Term {
    let x = Name::fresh_named("x");
    Term::sigma(
        x.clone(),
        t.clone(),
        Term::path(a.clone(), y.clone(), Term::app(f.clone(), Term::var(x))),
    )
}

fn is_contr(c: &Term) -> Term {
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

pub fn equiv(t: &Term, a: &Term) -> Term {
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

pub fn id_equiv(a: &Term) -> Term {
    let x = Name::fresh_named("x");
    let id = Term::lam(x.clone(), a.clone(), Term::var(x));
    let y = Name::fresh_named("a");
    let z = Name::fresh_named("y");
    let j = Name::fresh_named("j");
    let k = Name::fresh_named("k");
    let center = Term::pair(
        Term::var(y.clone()),
        Term::pabs(j.clone(), Term::var(y.clone())),
    );
    let q = Term::snd(Term::var(z.clone()));
    let contr = Term::lam(
        z.clone(),
        fiber(a, a, &id, &Term::var(y.clone())),
        Term::pabs(
            k.clone(),
            Term::pair(
                Term::papp(q.clone(), iv(&k)),
                Term::pabs(j.clone(), Term::papp(q, iv(&j).meet(&iv(&k)))),
            ),
        ),
    );
    Term::pair(id, Term::lam(y, a.clone(), Term::pair(center, contr)))
}

pub fn ptoeq(i: &Name, a: &Term) -> Term {
    let a0 = at(a, i, false);
    Term::comp(i.clone(), equiv(&a0, a), vec![], id_equiv(&a0))
}

/// pres^i f [psi -> u] u0
pub fn pres(i: &Name, f: &Term, t: &Term, a: &Term, sys: &Sys, u0: &Term) -> Term {
    let f0 = at(f, i, false);
    let jj = Name::fresh_named("j");
    let v = fill(i, t, sys, u0);
    let mut om_sys: Sys = map_sys(sys, |u| Term::app(f.clone(), u.clone()));
    om_sys.push((Face::atom(jj.clone(), true), Term::app(f.clone(), v)));
    Term::pabs(
        jj,
        Term::comp(i.clone(), a.clone(), om_sys, Term::app(f0, u0.clone())),
    )
}

/// Total fiber element of `w` over `point` extending the given partial ones.
pub fn extend(
    w: &Term,
    t: &Term,
    a: &Term,
    branches: &[(Face, Term, Term)],
    point: &Term,
) -> (Term, Term) {
    let jk = Name::fresh_named("j");
    let c = fiber(t, a, &Term::fst(w.clone()), point);
    let contr = Term::app(Term::snd(w.clone()), point.clone());
    let ext_sys: Sys = branches
        .iter()
        .map(|(face, t, al)| {
            (
                face.clone(),
                Term::papp(
                    Term::app(Term::snd(contr.clone()), Term::pair(t.clone(), al.clone())),
                    iv(&jk),
                ),
            )
        })
        .collect();
    let ext = Term::comp(jk, c, ext_sys, Term::fst(contr));
    (Term::fst(ext.clone()), Term::snd(ext))
}

fn glue_comp(i: &Name, br: &[GlueBranch], a: &Term, sys: &Sys, u0: &Term) -> Term {
    let phi = br.iter().fold(Face::zero(), |acc, b| acc.join(&b.face));
    let (tt, w) = if br.len() == 1 {
        (br[0].ty.clone(), br[0].equiv.clone())
    } else {
        (
            Term::system_t(br.iter().map(|b| (b.face.clone(), b.ty.clone())).collect()),
            Term::system_e(
                br.iter()
                    .map(|b| (b.face.clone(), b.equiv.clone()))
                    .collect(),
            ),
        )
    };
    let wsys: Sys = br
        .iter()
        .map(|b| (b.face.clone(), b.equiv.clone()))
        .collect();
    let wsys0: Sys = wsys
        .iter()
        .map(|(f, w)| (f.subst1(i, &Interval::zero()), at(w, i, false)))
        .collect();
    let phi1 = phi.subst1(i, &Interval::one());
    let a_sys: Sys = map_sys(sys, |u| Term::unglue(wsys.clone(), u.clone()));
    let a0 = Term::unglue(wsys0, u0.clone());
    let delta = face_forall(i, &phi);
    let a1p = Term::comp(i.clone(), a.clone(), a_sys.clone(), a0);
    let t1p = Term::comp(i.clone(), tt.clone(), sys.clone(), u0.clone());
    let omega = pres(i, &Term::fst(w.clone()), &tt, a, sys, u0);
    let mut branches: Vec<(Face, Term, Term)> = vec![(delta, t1p, omega)];
    for (psi, u) in sys {
        branches.push((
            psi.clone(),
            at(u, i, true),
            Term::pabs(Name::fresh_named("j"), a1p.clone()),
        ));
    }
    let (t1, alpha) = extend(
        &at(&w, i, true),
        &at(&tt, i, true),
        &at(a, i, true),
        &branches,
        &a1p,
    );
    let a1ty = at(a, i, true);
    let j2 = Name::fresh_named("j");
    let mut a1_sys: Sys = vec![(phi1.clone(), Term::papp(alpha, iv(&j2)))];
    for (psi, ak) in &a_sys {
        a1_sys.push((psi.clone(), at(ak, i, true)));
    }
    let a1 = Term::comp(j2, a1ty, a1_sys, a1p);
    Term::glue_e(vec![(phi1, t1)], a1)
}

/// Renames the bound direction of a composition-like node.
fn fresh_dim(i: &Name, line: &Term, sys: &Sys) -> (Name, Term, Sys) {
    let k = i.fresh();
    let r = iv(&k);
    (
        k.clone(),
        subst_name(line, i, &r),
        map_sys(sys, |u| subst_name(u, i, &r)),
    )
}

pub fn whnf(t: &Term) -> Res<Term> {
    use TermKind::*;
    match t.kind() {
        Var(x) => Err(format!("open variable {x}")),
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
        | Inc(_) => Ok(t.clone()),
        Natrec {
            var,
            motive,
            scrut,
            zero,
            succ,
        } => match whnf(scrut)?.kind() {
            Zero => whnf(zero),
            Suc(k) => whnf(&Term::app(
                Term::app(succ.clone(), k.clone()),
                Term::natrec(
                    var.clone(),
                    motive.clone(),
                    k.clone(),
                    zero.clone(),
                    succ.clone(),
                ),
            )),
            _ => Err("natrec on a non-numeral".into()),
        },
        App(f, a) => match whnf(f)?.kind() {
            Lam { var, body, .. } => whnf(&term_subst(body, var, a)),
            _ => Err("application of a non-function".into()),
        },
        Fst(p) => match whnf(p)?.kind() {
            Pair(a, _) => whnf(a),
            _ => Err("projection of a non-pair".into()),
        },
        Snd(p) => match whnf(p)?.kind() {
            Pair(_, b) => whnf(b),
            _ => Err("projection of a non-pair".into()),
        },
        PApp(p, r) => match whnf(p)?.kind() {
            PAbs { dim, body } => whnf(&subst_name(body, dim, r)),
            _ => Err("path application of a non-abstraction".into()),
        },
        SystemT(sys) | SystemE(sys) => match first_true(sys) {
            Some(u) => whnf(&u),
            None => Err("system without a true face".into()),
        },
        GlueT { branches, .. } => match branches.iter().find(|b| b.face.is_one()) {
            Some(b) => whnf(&b.ty),
            None => Ok(t.clone()),
        },
        GlueE { sys, .. } => match first_true(sys) {
            Some(u) => whnf(&u),
            None => Ok(t.clone()),
        },
        Unglue { sys, arg } => match first_true(sys) {
            Some(w) => whnf(&Term::app(Term::fst(w), arg.clone())),
            None => match whnf(arg)?.kind() {
                GlueE { base, .. } => whnf(base),
                _ => Err("unglue of a non-glue".into()),
            },
        },
        Comp {
            dim,
            line,
            sys,
            base,
        } => comp(t, dim, line, sys, base),
        Loop(r) => {
            if r.is_zero() || r.is_one() {
                Ok(Term::base())
            } else {
                Ok(t.clone())
            }
        }
        S1Elim {
            var,
            motive,
            scrut,
            base_case,
            loop_case,
        } => {
            let s = whnf(scrut)?;
            match s.kind() {
                Base => whnf(base_case),
                Loop(r) => whnf(&Term::papp(loop_case.clone(), r.clone())),
                Comp {
                    dim,
                    line,
                    sys,
                    base,
                } => {
                    let (i, _, sys) = fresh_dim(dim, line, sys);
                    let v = fill(&i, &Term::s1(), &sys, base);
                    let el = |u: &Term| {
                        Term::s1_elim(
                            var.clone(),
                            motive.clone(),
                            u.clone(),
                            base_case.clone(),
                            loop_case.clone(),
                        )
                    };
                    whnf(&Term::comp(
                        i,
                        term_subst(motive, var, &v),
                        map_sys(&sys, el),
                        el(base),
                    ))
                }
                _ => Err("circle elimination of a non-point".into()),
            }
        }
        Squash(u, v, r) => {
            if r.is_zero() {
                whnf(u)
            } else if r.is_one() {
                whnf(v)
            } else {
                Ok(t.clone())
            }
        }
        Hcomp { dim, sys, .. } => match first_true(sys) {
            Some(u) => whnf(&at(&u, dim, true)),
            None => Ok(t.clone()),
        },
        Fwd {
            dim,
            line,
            at: r,
            arg,
        } => {
            if r.is_one() {
                return whnf(arg);
            }
            let a = whnf(arg)?;
            let fw = |u: &Term| Term::fwd(dim.clone(), line.clone(), r.clone(), u.clone());
            match a.kind() {
                Inc(x) => {
                    let k = dim.fresh();
                    let ty = subst_name(line, dim, &iv(&k).join(r));
                    Ok(Term::inc(Term::comp(
                        k,
                        ty,
                        vec![(cubical::faces::face_of_eq1(r), x.clone())],
                        x.clone(),
                    )))
                }
                Squash(u, v, s) => Ok(Term::squash(fw(u), fw(v), s.clone())),
                Hcomp {
                    dim: j, sys, base, ..
                } => {
                    let (j, _, sys) = fresh_dim(j, &Term::nat(), sys);
                    whnf(&Term::hcomp(
                        at(line, dim, true),
                        j,
                        map_sys(&sys, fw),
                        fw(base),
                    ))
                }
                _ => Err("fwd of a non-truncation element".into()),
            }
        }
        InhElim {
            var,
            motive,
            scrut,
            inc_case,
            squash_case,
        } => {
            let el = |u: &Term| {
                Term::inh_elim(
                    var.clone(),
                    motive.clone(),
                    u.clone(),
                    inc_case.clone(),
                    squash_case.clone(),
                )
            };
            let s = whnf(scrut)?;
            match s.kind() {
                Inc(a) => whnf(&Term::app(inc_case.clone(), a.clone())),
                Squash(u, v, r) => whnf(&Term::papp(
                    Term::apps(squash_case.clone(), [u.clone(), v.clone(), el(u), el(v)]),
                    r.clone(),
                )),
                Hcomp { ty, dim, sys, base } => {
                    let (i, _, sys) = fresh_dim(dim, &Term::nat(), sys);
                    let j = Name::fresh_named("j");
                    let ij = iv(&i).meet(&iv(&j));
                    let mut wsys: Sys = map_sys(&sys, |u| subst_name(u, &i, &ij));
                    wsys.push((Face::atom(i.clone(), false), base.clone()));
                    let w = Term::hcomp(ty.clone(), j, wsys, base.clone());
                    whnf(&Term::comp(
                        i,
                        term_subst(motive, var, &w),
                        map_sys(&sys, el),
                        el(base),
                    ))
                }
                _ => Err("truncation elimination of a non-element".into()),
            }
        }
    }
}

fn comp(t: &Term, dim: &Name, line: &Term, sys: &Sys, base: &Term) -> Res<Term> {
    use TermKind::*;
    let (i, line, sys) = fresh_dim(dim, line, sys);
    let l = whnf(&line)?;
    match l.kind() {
        Nat => match whnf(base)?.kind() {
            Zero => Ok(Term::zero()),
            Suc(b) => Ok(Term::suc(Term::comp(
                i,
                l.clone(),
                map_sys(&sys, |u| Term::app(pred(), u.clone())),
                b.clone(),
            ))),
            _ => Err("composition at N of a non-numeral".into()),
        },
        Pi { var, dom, cod } => {
            let y = Name::fresh_named("y");
            let rev = iv(&i).rev();
            let yp = fill(
                &i,
                &subst_name(dom, &i, &rev),
                &vec![],
                &Term::var(y.clone()),
            );
            let ybar = subst_name(&yp, &i, &rev);
            let ybar0 = at(&ybar, &i, false);
            whnf(&Term::lam(
                y,
                at(dom, &i, true),
                Term::comp(
                    i.clone(),
                    term_subst(cod, var, &ybar),
                    map_sys(&sys, |u| Term::app(u.clone(), ybar.clone())),
                    Term::app(base.clone(), ybar0),
                ),
            ))
        }
        Sigma {
            var,
            fst_ty,
            snd_ty,
        } => {
            let v = fill(
                &i,
                fst_ty,
                &map_sys(&sys, |u| Term::fst(u.clone())),
                &Term::fst(base.clone()),
            );
            Ok(Term::pair(
                at(&v, &i, true),
                Term::comp(
                    i.clone(),
                    term_subst(snd_ty, var, &v),
                    map_sys(&sys, |u| Term::snd(u.clone())),
                    Term::snd(base.clone()),
                ),
            ))
        }
        PathT {
            dim: j,
            ty,
            left,
            right,
        } => {
            let k = Name::fresh_named("j");
            let mut s: Sys = vec![
                (Face::atom(k.clone(), false), left.clone()),
                (Face::atom(k.clone(), true), right.clone()),
            ];
            s.extend(map_sys(&sys, |u| Term::papp(u.clone(), iv(&k))));
            Ok(Term::pabs(
                k.clone(),
                Term::comp(
                    i,
                    subst_name(ty, j, &iv(&k)),
                    s,
                    Term::papp(base.clone(), iv(&k)),
                ),
            ))
        }
        GlueT { branches, base: a } => whnf(&glue_comp(&i, branches, a, &sys, base)),
        U => Ok(Term::glue_t(
            sys.iter()
                .map(|(f, u)| GlueBranch {
                    face: f.clone(),
                    ty: at(u, &i, true),
                    equiv: ptoeq(&i, &subst_name(u, &i, &iv(&i).rev())),
                })
                .collect(),
            base.clone(),
        )),
        S1 => match first_true(&sys) {
            Some(u) => whnf(&at(&u, &i, true)),
            None => Ok(t.clone()),
        },
        Inh(a) => {
            let j = Name::fresh_named("j");
            let hs: Sys = map_sys(&sys, |u| {
                Term::fwd(j.clone(), subst_name(a, &i, &iv(&j)), iv(&i), u.clone())
            });
            whnf(&Term::hcomp(
                at(a, &i, true),
                i.clone(),
                hs,
                Term::fwd(i.clone(), a.clone(), Interval::zero(), base.clone()),
            ))
        }
        _ => Err("composition at a non-type".into()),
    }
}

pub fn nat(t: &Term) -> Res<u64> {
    let mut n = 0;
    let mut cur = t.clone();
    loop {
        let v = whnf(&cur)?;
        match v.kind() {
            TermKind::Zero => return Ok(n),
            TermKind::Suc(k) => {
                n += 1;
                cur = k.clone();
            }
            _ => return Err("not a numeral".into()),
        }
    }
}

/// Left branch of squashes, base of homogeneous compositions.
pub fn witness(t: &Term) -> Res<Term> {
    let v = whnf(t)?;
    match v.kind() {
        TermKind::Inc(a) => Ok(a.clone()),
        TermKind::Squash(u, _, _) => witness(u),
        TermKind::Hcomp { base, .. } => witness(base),
        _ => Err("not a truncation element".into()),
    }
}

/// Runs `f` on a thread with a large stack; the oracle recurses deeply.
pub fn with_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(1 << 28)
        .spawn(f)
        .expect("spawn oracle thread")
        .join()
        .expect("oracle thread panicked")
}
