//! Surface syntax: lexer, parser and the file loader.
//!
//! A file is a sequence of items starting in the first column; indented
//! lines continue the previous item. Items are `names i j ...` and
//! definitions `name (x : A) ... : T = t`. Later definitions may refer to
//! earlier ones; a reference unfolds to the referenced body, annotated
//! with its type as `(\(x : T) -> x) body`.
//!
//! Binders get fresh names, so unfolding a definition under a binder can
//! never capture.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::derived;
use crate::faces::{face_of_eq, Face};
use crate::interval::Interval;
use crate::pretty::is_reserved;
use crate::syntax::{GlueBranch, Name, NameCtx, Sys, Term};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    FaceConst(bool),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::FaceConst(b) => write!(f, "`{}F`", u8::from(*b)),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMS: &[&str] = &[
    "->", "/\\", "\\/", ".1", ".2", "\\", "(", ")", "[", "]", "{", "}", "<", ">", ",", ":", "=",
    "*", "@", "~", "^", ".",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            let col = k + 1;
            let at = |tok| Token {
                tok,
                line: ln + 1,
                col,
            };
            if c.is_whitespace() {
                k += 1;
            } else if c == '-' && chars.get(k + 1) == Some(&'-') {
                break;
            } else if c.is_ascii_digit() {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                if chars.get(k) == Some(&'F') && (digits == "0" || digits == "1") {
                    k += 1;
                    out.push(at(Tok::FaceConst(digits == "1")));
                } else {
                    let n = digits.parse().map_err(|_| ParseError {
                        line: ln + 1,
                        col,
                        message: "numeral too large".into(),
                    })?;
                    out.push(at(Tok::Num(n)));
                }
            } else if c.is_alphabetic() || c == '_' {
                let start = k;
                while k < chars.len()
                    && (chars[k].is_alphanumeric() || chars[k] == '_' || chars[k] == '\'')
                {
                    k += 1;
                }
                out.push(at(Tok::Ident(chars[start..k].iter().collect())));
            } else {
                let rest: String = chars[k..].iter().collect();
                let Some(sym) = SYMS.iter().find(|s| rest.starts_with(**s)) else {
                    return Err(ParseError {
                        line: ln + 1,
                        col,
                        message: format!("unexpected character `{c}`"),
                    });
                };
                k += sym.chars().count();
                out.push(at(Tok::Sym(sym)));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub name: String,
    pub ty: Term,
    pub body: Term,
    pub line: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub names: NameCtx,
    pub defs: Vec<Definition>,
}

impl SourceFile {
    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|d| d.name == name)
    }
}

#[derive(Clone, Copy)]
enum Scope {
    Var,
    Dim,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    end: usize,
    /// Bound identifiers, innermost last.
    scope: Vec<(String, Scope, Name)>,
    defs: &'a HashMap<String, (Term, Term)>,
    eof: (usize, usize),
    /// Fresh names of the binder groups just read, for [`Parser::rebind`].
    pending: Vec<Name>,
}

type PResult<T> = Result<T, ParseError>;

/// Binder groups `(x y : A)` flattened to one entry per variable.
type Binders = Vec<(String, Term)>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        (self.pos < self.end).then(|| &self.toks[self.pos].tok)
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, col) = if self.pos < self.end {
            (self.toks[self.pos].line, self.toks[self.pos].col)
        } else {
            self.eof
        };
        Err(ParseError {
            line,
            col,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {t}")),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !is_reserved(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn with_bound<T>(
        &mut self,
        binds: Vec<(String, Scope, Name)>,
        f: impl FnOnce(&mut Self) -> PResult<T>,
    ) -> PResult<T> {
        let n = binds.len();
        self.scope.extend(binds);
        let r = f(self);
        self.scope.truncate(self.scope.len() - n);
        r
    }

    fn bind_dim<T>(
        &mut self,
        s: &str,
        f: impl FnOnce(&mut Self, &Name) -> PResult<T>,
    ) -> PResult<T> {
        let n = Name::fresh_named(s);
        self.with_bound(vec![(s.to_string(), Scope::Dim, n.clone())], |p| f(p, &n))
    }

    fn bind_var<T>(
        &mut self,
        s: &str,
        f: impl FnOnce(&mut Self, &Name) -> PResult<T>,
    ) -> PResult<T> {
        let n = Name::fresh_named(s);
        self.with_bound(vec![(s.to_string(), Scope::Var, n.clone())], |p| f(p, &n))
    }

    fn lookup(&self, s: &str, kind: Scope) -> Option<Name> {
        self.scope
            .iter()
            .rev()
            .find(|(t, k, _)| {
                t == s
                    && matches!(
                        (k, kind),
                        (Scope::Var, Scope::Var) | (Scope::Dim, Scope::Dim)
                    )
            })
            .map(|(_, _, n)| n.clone())
    }

    fn resolve_name(&self, s: &str) -> Name {
        self.lookup(s, Scope::Dim).unwrap_or_else(|| Name::new(s))
    }

    fn resolve_var(&self, s: &str) -> Term {
        if let Some(n) = self.lookup(s, Scope::Var) {
            return Term::var(n);
        }
        if let Some((ty, body)) = self.defs.get(s) {
            return annotate(body.clone(), ty.clone());
        }
        Term::var(Name::new(s))
    }

    // Intervals.

    fn interval(&mut self) -> PResult<Interval> {
        let mut r = self.interval_meet()?;
        while self.eat_sym("\\/") {
            r = r.join(&self.interval_meet()?);
        }
        Ok(r)
    }

    fn interval_meet(&mut self) -> PResult<Interval> {
        let mut r = self.interval_atom()?;
        while self.eat_sym("/\\") {
            r = r.meet(&self.interval_atom()?);
        }
        Ok(r)
    }

    fn interval_atom(&mut self) -> PResult<Interval> {
        match self.peek().cloned() {
            Some(Tok::Num(0)) => {
                self.pos += 1;
                Ok(Interval::zero())
            }
            Some(Tok::Num(1)) => {
                self.pos += 1;
                Ok(Interval::one())
            }
            Some(Tok::Sym("~")) => {
                self.pos += 1;
                Ok(self.interval_atom()?.rev())
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let r = self.interval()?;
                self.expect_sym(")")?;
                Ok(r)
            }
            Some(Tok::Ident(_)) => {
                let s = self.ident()?;
                Ok(Interval::name(self.resolve_name(&s)))
            }
            _ => self.unexpected("an interval element"),
        }
    }

    // Faces.

    fn face(&mut self) -> PResult<Face> {
        if self.is_kw("forall") {
            self.pos += 1;
            let s = self.ident()?;
            let n = self.resolve_name(&s);
            self.expect_sym(".")?;
            return Ok(self.face()?.forall(&n));
        }
        let mut f = self.face_meet()?;
        while self.eat_sym("\\/") {
            f = f.join(&self.face_meet()?);
        }
        Ok(f)
    }

    fn face_meet(&mut self) -> PResult<Face> {
        let mut f = self.face_atom()?;
        while self.eat_sym("/\\") {
            f = f.meet(&self.face_atom()?);
        }
        Ok(f)
    }

    fn face_atom(&mut self) -> PResult<Face> {
        match self.peek().cloned() {
            Some(Tok::FaceConst(b)) => {
                self.pos += 1;
                Ok(if b { Face::one() } else { Face::zero() })
            }
            Some(Tok::Sym("(")) => {
                let save = self.pos;
                self.pos += 1;
                if let Ok(r) = self.interval() {
                    if self.eat_sym("=") {
                        let end = match self.peek() {
                            Some(Tok::Num(0)) => false,
                            Some(Tok::Num(1)) => true,
                            _ => return self.unexpected("`0` or `1`"),
                        };
                        self.pos += 1;
                        self.expect_sym(")")?;
                        return Ok(face_of_eq(&r, end));
                    }
                }
                self.pos = save + 1;
                let f = self.face()?;
                self.expect_sym(")")?;
                Ok(f)
            }
            _ => self.unexpected("a face"),
        }
    }

    // Terms.

    pub fn term(&mut self) -> PResult<Term> {
        if self.eat_sym("\\") {
            let binders = self.binder_groups()?;
            if binders.is_empty() {
                return self.unexpected("a binder `(x : A)`");
            }
            self.expect_sym("->")?;
            return self.lambda(binders);
        }
        if self.eat_sym("<") {
            let mut dims = vec![self.ident()?];
            while !self.is_sym(">") {
                dims.push(self.ident()?);
            }
            self.expect_sym(">")?;
            return self.path_abs(&dims);
        }
        self.arrow()
    }

    fn path_abs(&mut self, dims: &[String]) -> PResult<Term> {
        match dims.split_first() {
            None => self.term(),
            Some((d, rest)) => self.bind_dim(d, |p, n| {
                let body = p.path_abs(rest)?;
                Ok(Term::pabs(n.clone(), body))
            }),
        }
    }

    /// Zero or more groups `(x y : A)`, each type parsed in the scope of
    /// the earlier binders. The scope is restored before returning; the
    /// caller rebinds.
    fn binder_groups(&mut self) -> PResult<Binders> {
        let mut out: Binders = Vec::new();
        let base = self.scope.len();
        let result = (|| {
            while self.is_sym("(") {
                let save = self.pos;
                self.pos += 1;
                let mut xs = Vec::new();
                while let Some(Tok::Ident(s)) = self.peek() {
                    if is_reserved(s) {
                        break;
                    }
                    xs.push(s.clone());
                    self.pos += 1;
                }
                if xs.is_empty() || !self.eat_sym(":") {
                    self.pos = save;
                    break;
                }
                let ty = self.term()?;
                self.expect_sym(")")?;
                for x in xs {
                    let n = Name::fresh_named(&x);
                    self.scope.push((x.clone(), Scope::Var, n));
                    out.push((x, ty.clone()));
                }
            }
            Ok(())
        })();
        // Types were parsed with earlier binders in scope under their
        // fresh names; reuse those names when rebinding.
        let names: Vec<Name> = self.scope[base..]
            .iter()
            .map(|(_, _, n)| n.clone())
            .collect();
        self.scope.truncate(base);
        result?;
        self.pending = names;
        Ok(out)
    }

    fn rebind(&mut self, binders: &[(String, Term)]) -> Vec<(String, Scope, Name)> {
        let names = std::mem::take(&mut self.pending);
        binders
            .iter()
            .zip(names)
            .map(|((s, _), n)| (s.clone(), Scope::Var, n))
            .collect()
    }

    fn lambda(&mut self, binders: Binders) -> PResult<Term> {
        let binds = self.rebind(&binders);
        let names: Vec<Name> = binds.iter().map(|(_, _, n)| n.clone()).collect();
        let body = self.with_bound(binds, |p| p.term())?;
        Ok(names
            .into_iter()
            .zip(binders)
            .rev()
            .fold(body, |acc, (n, (_, ty))| Term::lam(n, ty, acc)))
    }

    /// A dependent binder group followed by `->` or `*`, if one is next.
    fn try_dependent(&mut self) -> PResult<Option<(Binders, &'static str)>> {
        if !self.is_sym("(") {
            return Ok(None);
        }
        let save = self.pos;
        let groups = match self.binder_groups() {
            Ok(g) => g,
            Err(_) => {
                self.pos = save;
                self.pending.clear();
                return Ok(None);
            }
        };
        if !groups.is_empty() {
            if self.eat_sym("->") {
                return Ok(Some((groups, "->")));
            }
            if self.eat_sym("*") {
                return Ok(Some((groups, "*")));
            }
        }
        self.pos = save;
        self.pending.clear();
        Ok(None)
    }

    fn arrow(&mut self) -> PResult<Term> {
        if let Some((groups, sep)) = self.try_dependent()? {
            let t = self.dependent(groups, sep)?;
            if sep == "*" && self.eat_sym("->") {
                let cod = self.arrow()?;
                return Ok(Term::arrow(t, cod));
            }
            return Ok(t);
        }
        let dom = self.times()?;
        if self.eat_sym("->") {
            let cod = self.arrow()?;
            return Ok(Term::arrow(dom, cod));
        }
        Ok(dom)
    }

    fn dependent(&mut self, groups: Binders, sep: &str) -> PResult<Term> {
        let binds = self.rebind(&groups);
        let names: Vec<Name> = binds.iter().map(|(_, _, n)| n.clone()).collect();
        let body = self.with_bound(binds, |p| if sep == "->" { p.arrow() } else { p.times() })?;
        Ok(names
            .into_iter()
            .zip(groups)
            .rev()
            .fold(body, |acc, (n, (_, ty))| {
                if sep == "->" {
                    Term::pi(n, ty, acc)
                } else {
                    Term::sigma(n, ty, acc)
                }
            }))
    }

    fn times(&mut self) -> PResult<Term> {
        if let Some((groups, sep)) = self.try_dependent()? {
            if sep == "*" {
                return self.dependent(groups, sep);
            }
            return self.err("dependent function type needs parentheses here");
        }
        let a = self.at()?;
        if self.eat_sym("*") {
            let b = self.times()?;
            return Ok(Term::times(a, b));
        }
        Ok(a)
    }

    fn at(&mut self) -> PResult<Term> {
        let mut t = self.app()?;
        while self.eat_sym("@") {
            let r = self.interval_atom()?;
            t = Term::papp(t, r);
        }
        Ok(t)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                !is_reserved(s) || matches!(s.as_str(), "N" | "Z" | "U" | "S1" | "base" | "pred")
            }
            Some(Tok::Num(_)) => true,
            Some(Tok::Sym(s)) => matches!(*s, "(" | "["),
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<Term> {
        let mut t = match self.keyword_form()? {
            Some(t) => t,
            None => self.atom()?,
        };
        while self.starts_atom() {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn dim_superscript(&mut self) -> PResult<String> {
        self.expect_sym("^")?;
        self.ident()
    }

    fn motive(&mut self) -> PResult<(Name, Term)> {
        if self.eat_sym("{") {
            let s = self.ident()?;
            self.expect_sym(".")?;
            let (n, c) = self.bind_var(&s, |p, n| Ok((n.clone(), p.term()?)))?;
            self.expect_sym("}")?;
            Ok((n, c))
        } else {
            Ok((Name::fresh_named("_"), Term::nat()))
        }
    }

    /// `[phi -> t, ...]`, with the terms parsed by `term`.
    fn sys_with(&mut self, mut term: impl FnMut(&mut Self) -> PResult<Term>) -> PResult<Sys> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if self.eat_sym("]") {
            return Ok(out);
        }
        loop {
            let f = self.face()?;
            self.expect_sym("->")?;
            let t = term(self)?;
            out.push((f, t));
            if self.eat_sym("]") {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn sys(&mut self) -> PResult<Sys> {
        self.sys_with(|p| p.term())
    }

    fn keyword_form(&mut self) -> PResult<Option<Term>> {
        let Some(Tok::Ident(kw)) = self.peek().cloned() else {
            return Ok(None);
        };
        let t = match kw.as_str() {
            "suc" => {
                self.pos += 1;
                Term::suc(self.atom()?)
            }
            "natrec" => {
                self.pos += 1;
                let (x, c) = self.motive()?;
                let (n, z, s) = (self.atom()?, self.atom()?, self.atom()?);
                Term::natrec(x, c, n, z, s)
            }
            "Path" => {
                self.pos += 1;
                if self.is_sym("^") {
                    let d = self.dim_superscript()?;
                    let (i, a) = self.bind_dim(&d, |p, n| Ok((n.clone(), p.atom()?)))?;
                    let (l, r) = (self.atom()?, self.atom()?);
                    Term::path_t(i, a, l, r)
                } else {
                    let (a, l, r) = (self.atom()?, self.atom()?, self.atom()?);
                    Term::path(a, l, r)
                }
            }
            "Sys" => {
                self.pos += 1;
                Term::system_t(self.sys()?)
            }
            "Glue" => {
                self.pos += 1;
                self.expect_sym("[")?;
                let mut branches = Vec::new();
                if !self.eat_sym("]") {
                    loop {
                        let face = self.face()?;
                        self.expect_sym("->")?;
                        self.expect_sym("(")?;
                        let ty = self.term()?;
                        self.expect_sym(",")?;
                        let equiv = self.term()?;
                        self.expect_sym(")")?;
                        branches.push(GlueBranch { face, ty, equiv });
                        if self.eat_sym("]") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                Term::glue_t(branches, self.atom()?)
            }
            "glue" => {
                self.pos += 1;
                let sys = self.sys()?;
                Term::glue_e(sys, self.atom()?)
            }
            "unglue" => {
                self.pos += 1;
                let sys = self.sys()?;
                Term::unglue(sys, self.atom()?)
            }
            "comp" | "hcomp" => {
                self.pos += 1;
                let d = self.dim_superscript()?;
                let hom = kw == "hcomp";
                let outer_ty = if hom { Some(self.atom()?) } else { None };
                // Faces live outside the binder, terms inside.
                let binder = Name::fresh_named(&d);
                let mut line = None;
                let sys = {
                    self.scope.push((d.clone(), Scope::Dim, binder.clone()));
                    let r = (|| {
                        if !hom {
                            line = Some(self.atom()?);
                        }
                        self.bound_sys(&d)
                    })();
                    self.scope.pop();
                    r?
                };
                let base = self.atom()?;
                match outer_ty {
                    Some(a) => Term::hcomp(a, binder, sys, base),
                    None => Term::comp(binder, line.expect("parsed above"), sys, base),
                }
            }
            "fill" => {
                self.pos += 1;
                let d = self.dim_superscript()?;
                let i = self.resolve_name(&d);
                let a = self.atom()?;
                let sys = self.sys()?;
                let u0 = self.atom()?;
                derived::fill(&i, &a, &sys, &u0)
            }
            "transp" => {
                self.pos += 1;
                let d = self.dim_superscript()?;
                let (i, a) = self.bind_dim(&d, |p, n| Ok((n.clone(), p.atom()?)))?;
                let u = self.atom()?;
                derived::transp(&i, &a, &u)
            }
            "loop" => {
                self.pos += 1;
                Term::loop_(self.interval_atom()?)
            }
            "S1elim" | "inhelim" => {
                self.pos += 1;
                let (x, c) = self.motive()?;
                let (s, a, b) = (self.atom()?, self.atom()?, self.atom()?);
                if kw == "S1elim" {
                    Term::s1_elim(x, c, s, a, b)
                } else {
                    Term::inh_elim(x, c, s, a, b)
                }
            }
            "inh" => {
                self.pos += 1;
                Term::inh(self.atom()?)
            }
            "inc" => {
                self.pos += 1;
                Term::inc(self.atom()?)
            }
            "squash" => {
                self.pos += 1;
                let (u, v) = (self.atom()?, self.atom()?);
                Term::squash(u, v, self.interval_atom()?)
            }
            "fwd" => {
                self.pos += 1;
                let d = self.dim_superscript()?;
                let (i, a) = self.bind_dim(&d, |p, n| Ok((n.clone(), p.atom()?)))?;
                let r = self.interval_atom()?;
                Term::fwd(i, a, r, self.atom()?)
            }
            "Equiv" => {
                self.pos += 1;
                let (t, a) = (self.atom()?, self.atom()?);
                derived::equiv_type(&t, &a)
            }
            "isContr" => {
                self.pos += 1;
                derived::is_contr(&self.atom()?)
            }
            "idEquiv" => {
                self.pos += 1;
                derived::id_equiv(&self.atom()?)
            }
            _ => return Ok(None),
        };
        Ok(Some(t))
    }

    /// A constraint list under the binder `d`, whose faces are read with
    /// `d` out of scope.
    fn bound_sys(&mut self, d: &str) -> PResult<Sys> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if self.eat_sym("]") {
            return Ok(out);
        }
        loop {
            let hidden = self.scope.pop().expect("binder pushed by caller");
            debug_assert_eq!(hidden.0, d);
            let f = self.face();
            self.scope.push(hidden);
            let f = f?;
            self.expect_sym("->")?;
            let t = self.term()?;
            out.push((f, t));
            if self.eat_sym("]") {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        let mut t = self.atom_base()?;
        loop {
            if self.eat_sym(".1") {
                t = Term::fst(t);
            } else if self.eat_sym(".2") {
                t = Term::snd(t);
            } else {
                return Ok(t);
            }
        }
    }

    fn atom_base(&mut self) -> PResult<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Term::numeral(n))
            }
            Some(Tok::Ident(s)) => {
                let t = match s.as_str() {
                    "N" => Term::nat(),
                    "Z" => Term::zero(),
                    "U" => Term::universe(),
                    "S1" => Term::s1(),
                    "base" => Term::base(),
                    "pred" => derived::pred_term(),
                    _ if is_reserved(&s) => {
                        return self.err(format!("`{s}` needs its arguments; parenthesize it"))
                    }
                    _ => self.resolve_var(&s),
                };
                self.pos += 1;
                Ok(t)
            }
            Some(Tok::Sym("[")) => Ok(Term::system_e(self.sys()?)),
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let a = self.term()?;
                if self.eat_sym(",") {
                    let b = self.term()?;
                    self.expect_sym(")")?;
                    return Ok(Term::pair(a, b));
                }
                if self.eat_sym(":") {
                    let ty = self.term()?;
                    self.expect_sym(")")?;
                    return Ok(annotate(a, ty));
                }
                self.expect_sym(")")?;
                Ok(a)
            }
            _ => self.unexpected("a term"),
        }
    }
}

/// `(t : A)` as `(\(x : A) -> x) t`.
pub fn annotate(t: Term, ty: Term) -> Term {
    let x = Name::fresh_named("x");
    Term::app(Term::lam(x.clone(), ty, Term::var(x)), t)
}

fn parser<'a>(
    toks: &'a [Token],
    end: usize,
    defs: &'a HashMap<String, (Term, Term)>,
) -> Parser<'a> {
    let eof = toks
        .get(end.saturating_sub(1))
        .map_or((1, 1), |t| (t.line, t.col + 1));
    Parser {
        toks,
        pos: 0,
        end,
        scope: Vec::new(),
        defs,
        eof,
        pending: Vec::new(),
    }
}

/// Parses a single term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_with(src, &HashMap::new())
}

fn parse_term_with(src: &str, defs: &HashMap<String, (Term, Term)>) -> Result<Term, ParseError> {
    let toks = lex(src)?;
    let mut p = parser(&toks, toks.len(), defs);
    let t = p.term()?;
    if p.pos < p.end {
        return p.unexpected("end of input");
    }
    Ok(t)
}

/// Parses a face expression; `forall i.` is accepted at the top.
pub fn parse_face(src: &str) -> Result<Face, ParseError> {
    let toks = lex(src)?;
    let defs = HashMap::new();
    let mut p = parser(&toks, toks.len(), &defs);
    let f = p.face()?;
    if p.pos < p.end {
        return p.unexpected("end of input");
    }
    Ok(f)
}

/// Parses a whole file.
pub fn parse(src: &str) -> Result<SourceFile, ParseError> {
    let toks = lex(src)?;
    let starts: Vec<usize> = (0..toks.len()).filter(|&k| toks[k].col == 1).collect();
    if let Some(first) = toks.first() {
        if first.col != 1 {
            return Err(ParseError {
                line: first.line,
                col: first.col,
                message: "items must start in the first column".into(),
            });
        }
    }
    let mut file = SourceFile::default();
    let mut defs: HashMap<String, (Term, Term)> = HashMap::new();
    let mut names = Vec::new();
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(toks.len());
        let mut p = parser(&toks[..end], end, &defs);
        p.pos = start;
        if p.is_kw("names") {
            p.pos += 1;
            while p.pos < p.end {
                let s = p.ident()?;
                let n = Name::new(&s);
                if names.contains(&n) {
                    return p.err(format!("name {s} declared twice"));
                }
                names.push(n);
            }
            continue;
        }
        let line = toks[start].line;
        let name = p.ident()?;
        if defs.contains_key(&name) {
            return Err(ParseError {
                line,
                col: 1,
                message: format!("duplicate definition {name}"),
            });
        }
        let params = p.binder_groups()?;
        let binds = p.rebind(&params);
        let pnames: Vec<Name> = binds.iter().map(|(_, _, n)| n.clone()).collect();
        let (ty, body) = p.with_bound(binds, |p| {
            p.expect_sym(":")?;
            let ty = p.term()?;
            p.expect_sym("=")?;
            let body = p.term()?;
            if p.pos < p.end {
                return p.unexpected("the end of the definition");
            }
            Ok((ty, body))
        })?;
        let (ty, body) = pnames
            .into_iter()
            .zip(params)
            .rev()
            .fold((ty, body), |(ty, body), (n, (_, a))| {
                (Term::pi(n.clone(), a.clone(), ty), Term::lam(n, a, body))
            });
        defs.insert(name.clone(), (ty.clone(), body.clone()));
        file.defs.push(Definition {
            name,
            ty,
            body,
            line,
        });
    }
    file.names = NameCtx::from_names(names);
    Ok(file)
}

/// A term in the scope of an already parsed file's definitions.
pub fn parse_term_in(file: &SourceFile, src: &str) -> Result<Term, ParseError> {
    let defs = file
        .defs
        .iter()
        .map(|d| (d.name.clone(), (d.ty.clone(), d.body.clone())))
        .collect();
    parse_term_with(src, &defs)
}
