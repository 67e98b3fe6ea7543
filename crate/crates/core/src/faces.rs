//! The face lattice: finite joins of consistent conjunctions of atoms
//! `(i = 0)` and `(i = 1)`.
//!
//! A conjunction containing both `(i = 0)` and `(i = 1)` is `0` and is
//! dropped during normalization. The normal form is the antichain of
//! minimal conjunctions (as atom sets), ordered canonically.
//!
//! Deciding `<=`: map each conjunction `c` to the up-set of partial
//! endpoint assignments extending `c`. This is a lattice homomorphism into
//! the up-sets of the poset of partial assignments, and principal up-sets
//! are join-prime there. Hence `c <= d_1 \/ ... \/ d_n` iff `c <= d_k` for
//! some `k`, iff `atoms(d_k)` is a subset of `atoms(c)`. The same argument
//! gives the disjunction property: `phi \/ psi = 1` forces the empty
//! conjunction into one of the two normal forms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::interval::Interval;
use crate::subst::NameSubst;
use crate::syntax::{Name, NameCtx};

/// A consistent conjunction of atoms, `name -> true` meaning `(name = 1)`.
pub type Conj = BTreeMap<Name, bool>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    conjs: BTreeSet<Conj>,
}

/// A single nonzero conjunction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IrreducibleFace {
    atoms: Conj,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Left,
    Right,
    Neither,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FaceError {
    #[error("name {0} of the face is not declared in the context")]
    NameNotInContext(Name),
}

impl Face {
    pub fn zero() -> Face {
        Face {
            conjs: BTreeSet::new(),
        }
    }

    pub fn one() -> Face {
        let mut conjs = BTreeSet::new();
        conjs.insert(Conj::new());
        Face { conjs }
    }

    /// The atom `(name = end)`.
    pub fn atom(name: Name, end: bool) -> Face {
        let mut c = Conj::new();
        c.insert(name, end);
        Face::from_conj(c)
    }

    pub fn from_conj(c: Conj) -> Face {
        let mut conjs = BTreeSet::new();
        conjs.insert(c);
        Face { conjs }
    }

    pub fn from_conjs(conjs: impl IntoIterator<Item = Conj>) -> Face {
        Face {
            conjs: reduce(conjs.into_iter().collect()),
        }
    }

    pub fn conjs(&self) -> impl Iterator<Item = &Conj> {
        self.conjs.iter()
    }

    pub fn is_one(&self) -> bool {
        self.conjs.len() == 1 && self.conjs.iter().next().is_some_and(|c| c.is_empty())
    }

    pub fn is_zero(&self) -> bool {
        self.conjs.is_empty()
    }

    pub fn meet(&self, other: &Face) -> Face {
        let mut out = BTreeSet::new();
        for a in &self.conjs {
            for b in &other.conjs {
                if let Some(c) = conj_meet(a, b) {
                    out.insert(c);
                }
            }
        }
        Face { conjs: reduce(out) }
    }

    pub fn join(&self, other: &Face) -> Face {
        Face {
            conjs: reduce(self.conjs.union(&other.conjs).cloned().collect()),
        }
    }

    pub fn leq(&self, other: &Face) -> bool {
        self.conjs
            .iter()
            .all(|c| other.conjs.iter().any(|d| conj_leq(c, d)))
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.conjs.iter().flat_map(|c| c.keys().cloned()).collect()
    }

    pub fn mentions(&self, name: &Name) -> bool {
        self.conjs.iter().any(|c| c.contains_key(name))
    }

    /// `forall name. self`: the join of the conjunctions not mentioning
    /// `name`. Right adjoint to weakening along `name`.
    pub fn forall(&self, name: &Name) -> Face {
        Face {
            conjs: self
                .conjs
                .iter()
                .filter(|c| !c.contains_key(name))
                .cloned()
                .collect(),
        }
    }

    /// Simultaneous substitution of interval elements for names.
    pub fn subst(&self, map: &BTreeMap<Name, Interval>) -> Face {
        if !self
            .conjs
            .iter()
            .any(|c| c.keys().any(|k| map.contains_key(k)))
        {
            return self.clone();
        }
        let mut acc = Face::zero();
        for c in &self.conjs {
            let mut f = Face::one();
            for (name, &end) in c {
                let img = match map.get(name) {
                    Some(r) => face_of_eq(r, end),
                    None => Face::atom(name.clone(), end),
                };
                f = f.meet(&img);
                if f.is_zero() {
                    break;
                }
            }
            acc = acc.join(&f);
        }
        acc
    }

    pub fn subst1(&self, name: &Name, r: &Interval) -> Face {
        let mut map = BTreeMap::new();
        map.insert(name.clone(), r.clone());
        self.subst(&map)
    }
}

impl IrreducibleFace {
    pub fn new(atoms: Conj) -> Option<IrreducibleFace> {
        (!atoms.is_empty()).then_some(IrreducibleFace { atoms })
    }

    pub fn atoms(&self) -> &Conj {
        &self.atoms
    }

    pub fn to_face(&self) -> Face {
        Face::from_conj(self.atoms.clone())
    }

    /// The endpoint assignment as an interval map.
    pub fn assignment(&self) -> BTreeMap<Name, Interval> {
        self.atoms
            .iter()
            .map(|(n, &e)| (n.clone(), Interval::endpoint(e)))
            .collect()
    }
}

fn conj_meet(a: &Conj, b: &Conj) -> Option<Conj> {
    let mut out = a.clone();
    for (name, &end) in b {
        match out.get(name) {
            Some(&e) if e != end => return None,
            _ => {
                out.insert(name.clone(), end);
            }
        }
    }
    Some(out)
}

/// `c <= d` iff every atom of `d` occurs in `c`.
fn conj_leq(c: &Conj, d: &Conj) -> bool {
    d.iter().all(|(n, e)| c.get(n) == Some(e))
}

fn reduce(conjs: BTreeSet<Conj>) -> BTreeSet<Conj> {
    let mut sorted: Vec<Conj> = conjs.into_iter().collect();
    sorted.sort_by_key(|c| c.len());
    let mut kept: Vec<Conj> = Vec::new();
    for c in sorted {
        if !kept.iter().any(|k| conj_leq(&c, k)) {
            kept.push(c);
        }
    }
    kept.into_iter().collect()
}

pub fn face_meet(a: &Face, b: &Face) -> Face {
    a.meet(b)
}

pub fn face_join(a: &Face, b: &Face) -> Face {
    a.join(b)
}

pub fn face_leq(a: &Face, b: &Face) -> bool {
    a.leq(b)
}

pub fn face_eq(a: &Face, b: &Face) -> bool {
    a == b
}

pub fn face_is_one(a: &Face) -> bool {
    a.is_one()
}

pub fn face_forall(name: &Name, face: &Face) -> Face {
    face.forall(name)
}

/// The least position of a constraint whose face is `1`.
pub fn min_true_index<T>(constraints: &[(Face, T)]) -> Option<usize> {
    constraints.iter().position(|(f, _)| f.is_one())
}

/// The join of all faces of a constraint list.
pub fn total_face<T>(constraints: &[(Face, T)]) -> Face {
    constraints
        .iter()
        .fold(Face::zero(), |acc, (f, _)| acc.join(f))
}

pub fn disjunction_split(a: &Face, b: &Face) -> Split {
    if !a.join(b).is_one() {
        Split::Neither
    } else if a.is_one() {
        Split::Left
    } else {
        debug_assert!(b.is_one(), "disjunction property");
        Split::Right
    }
}

/// The conjunctions of the normal form, as irreducible faces.
pub fn irreducibles_under(face: &Face) -> Vec<IrreducibleFace> {
    face.conjs
        .iter()
        .map(|c| IrreducibleFace { atoms: c.clone() })
        .collect()
}

/// The context with the names of `alpha` deleted, together with the
/// substitution sending those names to their endpoints.
pub fn face_subst(
    alpha: &IrreducibleFace,
    ctx: &NameCtx,
) -> Result<(NameCtx, NameSubst), FaceError> {
    for name in alpha.atoms.keys() {
        if !ctx.contains(name) {
            return Err(FaceError::NameNotInContext(name.clone()));
        }
    }
    let remaining = NameCtx::from_names(
        ctx.names()
            .iter()
            .filter(|n| !alpha.atoms.contains_key(*n))
            .cloned(),
    );
    let map = ctx
        .names()
        .iter()
        .map(|n| {
            let img = match alpha.atoms.get(n) {
                Some(&e) => Interval::endpoint(e),
                None => Interval::name(n.clone()),
            };
            (n.clone(), img)
        })
        .collect();
    let subst = NameSubst::new(ctx.clone(), remaining.clone(), map)
        .expect("face substitution is total by construction");
    Ok((remaining, subst))
}

/// The face `(r = 1)` (for `end = true`) or `(r = 0)`.
pub fn face_of_eq(r: &Interval, end: bool) -> Face {
    let r = if end { r.clone() } else { r.rev() };
    let mut acc = Face::zero();
    for meet in r.meets() {
        let mut conj = Some(Conj::new());
        for lit in meet {
            let want = !lit.reversed;
            conj = conj.and_then(|mut c| match c.insert(lit.name.clone(), want) {
                Some(prev) if prev != want => None,
                _ => Some(c),
            });
        }
        if let Some(c) = conj {
            acc = acc.join(&Face::from_conj(c));
        }
    }
    acc
}

pub fn face_of_eq1(r: &Interval) -> Face {
    face_of_eq(r, true)
}

pub fn face_of_eq0(r: &Interval) -> Face {
    face_of_eq(r, false)
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            crate::pretty::face_to_string(self, &|n: &Name| n.to_string())
        )
    }
}
