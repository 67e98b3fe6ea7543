//! Printing terms in the surface syntax accepted by [`crate::parse`].
//!
//! Bound names are printed under a display name chosen to avoid clashes
//! with every name free in the binder's scope, so the output re-parses to
//! an α-equal term.

use std::collections::{BTreeSet, HashMap};

use crate::faces::Face;
use crate::interval::{Interval, Lit};
use crate::syntax::{Name, Sys, Term, TermKind};

pub fn pretty(t: &Term) -> String {
    let mut p = Printer::default();
    let mut out = String::new();
    p.term(t, Prec::Top, &mut out);
    out
}

pub fn interval_to_string(r: &Interval, show: &dyn Fn(&Name) -> String) -> String {
    interval_prec(r, show, false)
}

pub fn face_to_string(f: &Face, show: &dyn Fn(&Name) -> String) -> String {
    if f.is_zero() {
        return "0F".into();
    }
    if f.is_one() {
        return "1F".into();
    }
    f.conjs()
        .map(|c| {
            c.iter()
                .map(|(n, &e)| format!("({}={})", show(n), if e { 1 } else { 0 }))
                .collect::<Vec<_>>()
                .join(" /\\ ")
        })
        .collect::<Vec<_>>()
        .join(" \\/ ")
}

/// With `atom` set, compound elements are parenthesized.
fn interval_prec(r: &Interval, show: &dyn Fn(&Name) -> String, atom: bool) -> String {
    if r.is_zero() {
        return "0".into();
    }
    if r.is_one() {
        return "1".into();
    }
    let lit = |l: &Lit| {
        if l.reversed {
            format!("~{}", show(&l.name))
        } else {
            show(&l.name)
        }
    };
    let meets: Vec<String> = r
        .meets()
        .map(|m| m.iter().map(lit).collect::<Vec<_>>().join(" /\\ "))
        .collect();
    let compound = meets.len() > 1 || r.meets().any(|m| m.len() > 1);
    let s = meets.join(" \\/ ");
    if atom && compound {
        format!("({s})")
    } else {
        s
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Arrow,
    Times,
    At,
    App,
    Atom,
}

const RESERVED: &[&str] = &[
    "N", "Z", "U", "S1", "base", "suc", "natrec", "comp", "fill", "transp", "hcomp", "fwd", "Glue",
    "glue", "unglue", "loop", "S1elim", "inh", "inc", "squash", "inhelim", "Path", "Sys", "Equiv",
    "isContr", "idEquiv", "pred", "forall", "names",
];

pub(crate) fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

#[derive(Default)]
struct Printer {
    vars: HashMap<Name, String>,
    names: HashMap<Name, String>,
}

impl Printer {
    fn show_var(&self, x: &Name) -> String {
        self.vars.get(x).cloned().unwrap_or_else(|| x.to_string())
    }

    fn show_name(&self, n: &Name) -> String {
        self.names.get(n).cloned().unwrap_or_else(|| n.to_string())
    }

    fn interval(&self, r: &Interval, atom: bool) -> String {
        interval_prec(r, &|n| self.show_name(n), atom)
    }

    fn face(&self, f: &Face) -> String {
        face_to_string(f, &|n| self.show_name(n))
    }

    fn pick(base: &str, used: &BTreeSet<String>) -> String {
        let base = if base.is_empty() { "x" } else { base };
        if !used.contains(base) && !is_reserved(base) {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|s| !used.contains(s))
            .expect("unbounded supply of names")
    }

    /// Binds a term variable over `scope`, returning the display name and
    /// the previous binding to restore.
    fn bind_var(&mut self, x: &Name, scope: &[&Term]) -> (String, Option<String>) {
        let used: BTreeSet<String> = scope
            .iter()
            .flat_map(|t| t.free_vars().iter())
            .filter(|v| *v != x)
            .map(|v| self.show_var(v))
            .collect();
        let shown = Printer::pick(x.base(), &used);
        let old = self.vars.insert(x.clone(), shown.clone());
        (shown, old)
    }

    fn unbind_var(&mut self, x: &Name, old: Option<String>) {
        match old {
            Some(s) => self.vars.insert(x.clone(), s),
            None => self.vars.remove(x),
        };
    }

    fn bind_name(&mut self, n: &Name, scope: &[&Term]) -> (String, Option<String>) {
        let used: BTreeSet<String> = scope
            .iter()
            .flat_map(|t| t.free_names().iter())
            .filter(|m| *m != n)
            .map(|m| self.show_name(m))
            .collect();
        let shown = Printer::pick(n.base(), &used);
        let old = self.names.insert(n.clone(), shown.clone());
        (shown, old)
    }

    fn unbind_name(&mut self, n: &Name, old: Option<String>) {
        match old {
            Some(s) => self.names.insert(n.clone(), s),
            None => self.names.remove(n),
        };
    }

    fn sys(&mut self, sys: &Sys, out: &mut String) {
        out.push('[');
        for (k, (f, t)) in sys.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            out.push_str(&self.face(f));
            out.push_str(" -> ");
            self.term(t, Prec::Top, out);
        }
        out.push(']');
    }

    /// A constraint list whose faces were printed outside the binder.
    fn bound_sys(&mut self, sys: &Sys, faces: Vec<String>, out: &mut String) {
        out.push('[');
        for (k, ((_, u), f)) in sys.iter().zip(faces).enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            out.push_str(&f);
            out.push_str(" -> ");
            self.term(u, Prec::Top, out);
        }
        out.push(']');
    }

    fn motive(&mut self, kw: &str, var: &Name, motive: &Term, out: &mut String) {
        let (shown, old) = self.bind_var(var, &[motive]);
        out.push_str(&format!("{kw}{{{shown}. "));
        self.term(motive, Prec::Top, out);
        out.push('}');
        self.unbind_var(var, old);
    }

    fn term(&mut self, t: &Term, prec: Prec, out: &mut String) {
        use TermKind::*;
        let need = match t.kind() {
            Lam { .. } | PAbs { .. } => Prec::Top,
            Pi { .. } => Prec::Arrow,
            Sigma { .. } => Prec::Times,
            PApp(..) => Prec::At,
            Var(_) | Nat | U | S1 | Base | Zero | Pair(..) | SystemE(_) | Fst(_) | Snd(_) => {
                Prec::Atom
            }
            _ => Prec::App,
        };
        if need < prec {
            out.push('(');
            self.term(t, Prec::Top, out);
            out.push(')');
            return;
        }
        match t.kind() {
            Var(x) => out.push_str(&self.show_var(x)),
            Nat => out.push('N'),
            Zero => out.push('0'),
            U => out.push('U'),
            S1 => out.push_str("S1"),
            Base => out.push_str("base"),
            Suc(a) => {
                out.push_str("suc ");
                self.term(a, Prec::Atom, out);
            }
            Natrec {
                var,
                motive,
                scrut,
                zero,
                succ,
            } => {
                self.motive("natrec", var, motive, out);
                for a in [scrut, zero, succ] {
                    out.push(' ');
                    self.term(a, Prec::Atom, out);
                }
            }
            Lam { .. } => {
                out.push('\\');
                let mut cur = t.clone();
                let mut restore = Vec::new();
                while let Lam { var, ty, body } = cur.kind() {
                    let mut ty_s = String::new();
                    self.term(ty, Prec::Top, &mut ty_s);
                    let (shown, old) = self.bind_var(var, &[body]);
                    out.push_str(&format!("({shown} : {ty_s}) "));
                    restore.push((var.clone(), old));
                    let next = body.clone();
                    cur = next;
                }
                out.push_str("-> ");
                self.term(&cur, Prec::Top, out);
                for (v, old) in restore.into_iter().rev() {
                    self.unbind_var(&v, old);
                }
            }
            Pi { var, dom, cod } => {
                if cod.has_free_var(var) {
                    out.push('(');
                    let shown = {
                        let used: BTreeSet<String> = cod
                            .free_vars()
                            .iter()
                            .filter(|v| *v != var)
                            .map(|v| self.show_var(v))
                            .collect();
                        Printer::pick(var.base(), &used)
                    };
                    out.push_str(&shown);
                    out.push_str(" : ");
                    self.term(dom, Prec::Top, out);
                    out.push_str(") -> ");
                    let old = self.vars.insert(var.clone(), shown);
                    self.term(cod, Prec::Arrow, out);
                    self.unbind_var(var, old);
                } else {
                    self.term(dom, Prec::Times, out);
                    out.push_str(" -> ");
                    self.term(cod, Prec::Arrow, out);
                }
            }
            Sigma {
                var,
                fst_ty,
                snd_ty,
            } => {
                if snd_ty.has_free_var(var) {
                    out.push('(');
                    let used: BTreeSet<String> = snd_ty
                        .free_vars()
                        .iter()
                        .filter(|v| *v != var)
                        .map(|v| self.show_var(v))
                        .collect();
                    let shown = Printer::pick(var.base(), &used);
                    out.push_str(&shown);
                    out.push_str(" : ");
                    self.term(fst_ty, Prec::Top, out);
                    out.push_str(") * ");
                    let old = self.vars.insert(var.clone(), shown);
                    self.term(snd_ty, Prec::Times, out);
                    self.unbind_var(var, old);
                } else {
                    self.term(fst_ty, Prec::At, out);
                    out.push_str(" * ");
                    self.term(snd_ty, Prec::Times, out);
                }
            }
            App(f, a) => {
                self.term(f, Prec::App, out);
                out.push(' ');
                self.term(a, Prec::Atom, out);
            }
            Pair(a, b) => {
                out.push('(');
                self.term(a, Prec::Top, out);
                out.push_str(", ");
                self.term(b, Prec::Top, out);
                out.push(')');
            }
            Fst(a) => {
                self.term(a, Prec::Atom, out);
                out.push_str(".1");
            }
            Snd(a) => {
                self.term(a, Prec::Atom, out);
                out.push_str(".2");
            }
            PathT {
                dim,
                ty,
                left,
                right,
            } => {
                if ty.has_free_name(dim) {
                    let (shown, old) = self.bind_name(dim, &[ty]);
                    out.push_str(&format!("Path^{shown} "));
                    self.term(ty, Prec::Atom, out);
                    self.unbind_name(dim, old);
                } else {
                    out.push_str("Path ");
                    self.term(ty, Prec::Atom, out);
                }
                out.push(' ');
                self.term(left, Prec::Atom, out);
                out.push(' ');
                self.term(right, Prec::Atom, out);
            }
            PAbs { dim, body } => {
                let (shown, old) = self.bind_name(dim, &[body]);
                out.push_str(&format!("<{shown}> "));
                self.term(body, Prec::Top, out);
                self.unbind_name(dim, old);
            }
            PApp(a, r) => {
                self.term(a, Prec::At, out);
                out.push_str(" @ ");
                out.push_str(&self.interval(r, true));
            }
            SystemT(sys) => {
                out.push_str("Sys ");
                self.sys(sys, out);
            }
            SystemE(sys) => self.sys(sys, out),
            GlueT { branches, base } => {
                out.push_str("Glue [");
                for (k, b) in branches.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&self.face(&b.face));
                    out.push_str(" -> (");
                    self.term(&b.ty, Prec::Top, out);
                    out.push_str(", ");
                    self.term(&b.equiv, Prec::Top, out);
                    out.push(')');
                }
                out.push_str("] ");
                self.term(base, Prec::Atom, out);
            }
            GlueE { sys, base } => {
                out.push_str("glue ");
                self.sys(sys, out);
                out.push(' ');
                self.term(base, Prec::Atom, out);
            }
            Unglue { sys, arg } => {
                out.push_str("unglue ");
                self.sys(sys, out);
                out.push(' ');
                self.term(arg, Prec::Atom, out);
            }
            Comp {
                dim,
                line,
                sys,
                base,
            } => {
                let faces: Vec<String> = sys.iter().map(|(f, _)| self.face(f)).collect();
                let mut scope: Vec<&Term> = vec![line];
                scope.extend(sys.iter().map(|(_, u)| u));
                let (shown, old) = self.bind_name(dim, &scope);
                out.push_str(&format!("comp^{shown} "));
                self.term(line, Prec::Atom, out);
                out.push(' ');
                self.bound_sys(sys, faces, out);
                self.unbind_name(dim, old);
                out.push(' ');
                self.term(base, Prec::Atom, out);
            }
            Loop(r) => {
                out.push_str("loop ");
                out.push_str(&self.interval(r, true));
            }
            S1Elim {
                var,
                motive,
                scrut,
                base_case,
                loop_case,
            } => {
                self.motive("S1elim", var, motive, out);
                for a in [scrut, base_case, loop_case] {
                    out.push(' ');
                    self.term(a, Prec::Atom, out);
                }
            }
            Inh(a) => {
                out.push_str("inh ");
                self.term(a, Prec::Atom, out);
            }
            Inc(a) => {
                out.push_str("inc ");
                self.term(a, Prec::Atom, out);
            }
            Squash(u, v, r) => {
                out.push_str("squash ");
                self.term(u, Prec::Atom, out);
                out.push(' ');
                self.term(v, Prec::Atom, out);
                out.push(' ');
                out.push_str(&self.interval(r, true));
            }
            Hcomp { ty, dim, sys, base } => {
                let faces: Vec<String> = sys.iter().map(|(f, _)| self.face(f)).collect();
                let mut ty_s = String::new();
                self.term(ty, Prec::Atom, &mut ty_s);
                let scope: Vec<&Term> = sys.iter().map(|(_, u)| u).collect();
                let (shown, old) = self.bind_name(dim, &scope);
                out.push_str(&format!("hcomp^{shown} {ty_s} "));
                self.bound_sys(sys, faces, out);
                self.unbind_name(dim, old);
                out.push(' ');
                self.term(base, Prec::Atom, out);
            }
            Fwd { dim, line, at, arg } => {
                let (shown, old) = self.bind_name(dim, &[line]);
                out.push_str(&format!("fwd^{shown} "));
                self.term(line, Prec::Atom, out);
                self.unbind_name(dim, old);
                out.push(' ');
                out.push_str(&self.interval(at, true));
                out.push(' ');
                self.term(arg, Prec::Atom, out);
            }
            InhElim {
                var,
                motive,
                scrut,
                inc_case,
                squash_case,
            } => {
                self.motive("inhelim", var, motive, out);
                for a in [scrut, inc_case, squash_case] {
                    out.push(' ');
                    self.term(a, Prec::Atom, out);
                }
            }
        }
    }
}
