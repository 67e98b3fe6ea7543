//! Interval and face generators with brute-force semantic oracles:
//! the four-element De Morgan algebra for intervals, partial endpoint
//! assignments for faces.
#![allow(dead_code)]
use std::collections::BTreeMap;

use cubical::faces::{
    disjunction_split, face_forall, face_of_eq0, face_of_eq1, min_true_index, Conj, Face, Split,
};
use cubical::interval::{End, Interval};
use cubical::syntax::Name;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

const NAMES: [&str; 3] = ["i", "j", "k"];

pub fn name(k: usize) -> Name {
    Name::new(NAMES[k])
}

pub fn interval() -> impl Strategy<Value = Interval> {
    let leaf = prop_oneof![
        Just(Interval::zero()),
        Just(Interval::one()),
        (0..3usize).prop_map(|k| Interval::name(name(k))),
        (0..3usize).prop_map(|k| Interval::name(name(k)).rev()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.meet(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.join(&b)),
            inner.prop_map(|a| a.rev()),
        ]
    })
}

pub fn face() -> impl Strategy<Value = Face> {
    let leaf = prop_oneof![
        Just(Face::zero()),
        Just(Face::one()),
        (0..3usize, any::<bool>()).prop_map(|(k, e)| Face::atom(name(k), e)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.meet(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.join(&b)),
        ]
    })
}

/// The four-element De Morgan algebra: the diamond 0 < a, b < 1 with
/// a and b fixed by the involution. Encoded as bit pairs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Dm4(bool, bool);

impl Dm4 {
    const ALL: [Dm4; 4] = [
        Dm4(false, false),
        Dm4(true, false),
        Dm4(false, true),
        Dm4(true, true),
    ];
    fn meet(self, o: Dm4) -> Dm4 {
        Dm4(self.0 && o.0, self.1 && o.1)
    }
    fn join(self, o: Dm4) -> Dm4 {
        Dm4(self.0 || o.0, self.1 || o.1)
    }
    fn neg(self) -> Dm4 {
        Dm4(!self.1, !self.0)
    }
}

fn eval_dm4(r: &Interval, rho: &BTreeMap<Name, Dm4>) -> Dm4 {
    r.meets().fold(Dm4(false, false), |acc, m| {
        let v = m.iter().fold(Dm4(true, true), |acc, l| {
            let x = rho[&l.name];
            acc.meet(if l.reversed { x.neg() } else { x })
        });
        acc.join(v)
    })
}

fn dm4_assignments() -> Vec<BTreeMap<Name, Dm4>> {
    let mut out = vec![BTreeMap::new()];
    for k in 0..3 {
        out = out
            .into_iter()
            .flat_map(|m| {
                Dm4::ALL.iter().map(move |&v| {
                    let mut m = m.clone();
                    m.insert(name(k), v);
                    m
                })
            })
            .collect();
    }
    out
}

/// Partial endpoint assignments: each name is 0, 1 or undetermined.
fn partial_assignments() -> Vec<Conj> {
    let mut out = vec![Conj::new()];
    for k in 0..3 {
        out = out
            .into_iter()
            .flat_map(|m| {
                [None, Some(false), Some(true)].into_iter().map(move |v| {
                    let mut m = m.clone();
                    if let Some(v) = v {
                        m.insert(name(k), v);
                    }
                    m
                })
            })
            .collect();
    }
    out
}

fn holds(f: &Face, rho: &Conj) -> bool {
    f.conjs()
        .any(|c| c.iter().all(|(n, e)| rho.get(n) == Some(e)))
}

fn sem_leq(a: &Face, b: &Face) -> bool {
    partial_assignments()
        .iter()
        .all(|rho| !holds(a, rho) || holds(b, rho))
}

pub fn interval_lattice_laws(
    a: &Interval,
    b: &Interval,
    c: &Interval,
) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.meet(b), b.meet(a));
    prop_assert_eq!(a.join(b), b.join(a));
    prop_assert_eq!(a.meet(&b.meet(c)), a.meet(b).meet(c));
    prop_assert_eq!(a.join(&b.join(c)), a.join(b).join(c));
    prop_assert_eq!(&a.join(&a.meet(b)), a);
    prop_assert_eq!(&a.meet(&a.join(b)), a);
    prop_assert_eq!(a.meet(&b.join(c)), a.meet(b).join(&a.meet(c)));
    prop_assert_eq!(&a.meet(&Interval::one()), a);
    prop_assert_eq!(&a.join(&Interval::zero()), a);
    prop_assert_eq!(a.meet(&Interval::zero()), Interval::zero());
    Ok(())
}

pub fn interval_de_morgan_laws(a: &Interval, b: &Interval) -> Result<(), TestCaseError> {
    prop_assert_eq!(&a.rev().rev(), a);
    prop_assert_eq!(a.meet(b).rev(), a.rev().join(&b.rev()));
    prop_assert_eq!(a.join(b).rev(), a.rev().meet(&b.rev()));
    prop_assert_eq!(Interval::zero().rev(), Interval::one());
    Ok(())
}

pub fn interval_equality_agrees_with_dm4(a: &Interval, b: &Interval) -> Result<(), TestCaseError> {
    let rhos = dm4_assignments();
    let sem = rhos.iter().all(|rho| eval_dm4(a, rho) == eval_dm4(b, rho));
    prop_assert_eq!(a == b, sem);
    let ends: Vec<Dm4> = rhos.iter().map(|rho| eval_dm4(a, rho)).collect();
    let expected = if ends.iter().all(|v| *v == Dm4(false, false)) {
        End::Is0
    } else if ends.iter().all(|v| *v == Dm4(true, true)) {
        End::Is1
    } else {
        End::Neither
    };
    prop_assert_eq!(a.is_end(), expected);
    Ok(())
}

pub fn interval_substitution_is_evaluation(
    a: &Interval,
    s: &Interval,
    k: usize,
) -> Result<(), TestCaseError> {
    let n = name(k);
    let substituted = a.subst1(&n, s);
    for rho in dm4_assignments() {
        let mut rho2 = rho.clone();
        rho2.insert(n.clone(), eval_dm4(s, &rho));
        prop_assert_eq!(eval_dm4(&substituted, &rho), eval_dm4(a, &rho2));
    }
    Ok(())
}

pub fn face_lattice_laws(a: &Face, b: &Face, c: &Face) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.meet(b), b.meet(a));
    prop_assert_eq!(a.join(b), b.join(a));
    prop_assert_eq!(a.meet(&b.meet(c)), a.meet(b).meet(c));
    prop_assert_eq!(a.join(&b.join(c)), a.join(b).join(c));
    prop_assert_eq!(&a.join(&a.meet(b)), a);
    prop_assert_eq!(&a.meet(&a.join(b)), a);
    prop_assert_eq!(a.meet(&b.join(c)), a.meet(b).join(&a.meet(c)));
    prop_assert!(a.meet(b).leq(a));
    prop_assert!(a.leq(&a.join(b)));
    Ok(())
}

pub fn face_order_agrees_with_partial_assignments(a: &Face, b: &Face) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.leq(b), sem_leq(a, b));
    prop_assert_eq!(a == b, sem_leq(a, b) && sem_leq(b, a));
    Ok(())
}

pub fn disjunction_property(a: &Face, b: &Face) -> Result<(), TestCaseError> {
    if a.join(b).is_one() {
        prop_assert!(a.is_one() || b.is_one());
    }
    let expected = if a.is_one() {
        Split::Left
    } else if b.is_one() {
        Split::Right
    } else {
        Split::Neither
    };
    prop_assert_eq!(disjunction_split(a, b), expected);
    Ok(())
}

pub fn forall_is_right_adjoint_to_weakening(a: &Face, k: usize) -> Result<(), TestCaseError> {
    let n = name(k);
    let all = face_forall(&n, a);
    prop_assert!(!all.mentions(&n));
    prop_assert!(all.leq(a));
    for c in partial_assignments()
        .into_iter()
        .filter(|c| !c.contains_key(&n))
    {
        let c = Face::from_conj(c);
        prop_assert_eq!(c.leq(&all), c.leq(a));
    }
    Ok(())
}

pub fn face_of_eq_is_pointwise(r: &Interval) -> Result<(), TestCaseError> {
    let one = face_of_eq1(r);
    let zero = face_of_eq0(r);
    for rho in partial_assignments().into_iter().filter(|c| c.len() == 3) {
        let map: BTreeMap<Name, Interval> = rho
            .iter()
            .map(|(n, e)| (n.clone(), Interval::endpoint(*e)))
            .collect();
        let v = r.subst(&map);
        prop_assert_eq!(holds(&one, &rho), v.is_one());
        prop_assert_eq!(holds(&zero, &rho), v.is_zero());
    }
    Ok(())
}

pub fn min_true_index_finds_the_first_true_face(fs: &[Face]) -> Result<(), TestCaseError> {
    let constraints: Vec<(Face, usize)> = fs
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, f)| (f, k))
        .collect();
    let expected = constraints.iter().position(|(f, _)| f.is_one());
    prop_assert_eq!(min_true_index(&constraints), expected);
    Ok(())
}
