//! The free De Morgan algebra on a set of names.
//!
//! Elements are kept in an irredundant disjunctive normal form over
//! literals `i` and `1-i`. The free De Morgan algebra on `X` is the free
//! bounded distributive lattice on `X + X'` with the involution swapping
//! the two copies, so two elements are equal exactly when their normal
//! forms coincide. There is no complement law: `i /\ ~i` is not `0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::Name;

/// A literal: a name or its reversal `1 - name`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub name: Name,
    pub reversed: bool,
}

impl Lit {
    pub fn flip(&self) -> Lit {
        Lit {
            name: self.name.clone(),
            reversed: !self.reversed,
        }
    }
}

pub type Meet = BTreeSet<Lit>;

/// An element of the interval in normal form.
///
/// `0` is the empty join and `1` the join of the empty meet; irredundancy
/// makes both representations unique.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    meets: BTreeSet<Meet>,
}

/// Endpoint classification of an interval element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Is0,
    Is1,
    Neither,
}

impl Interval {
    pub fn zero() -> Interval {
        Interval {
            meets: BTreeSet::new(),
        }
    }

    pub fn one() -> Interval {
        let mut meets = BTreeSet::new();
        meets.insert(Meet::new());
        Interval { meets }
    }

    pub fn endpoint(one: bool) -> Interval {
        if one {
            Interval::one()
        } else {
            Interval::zero()
        }
    }

    pub fn name(name: Name) -> Interval {
        Interval::lit(Lit {
            name,
            reversed: false,
        })
    }

    pub fn lit(lit: Lit) -> Interval {
        let mut meet = Meet::new();
        meet.insert(lit);
        let mut meets = BTreeSet::new();
        meets.insert(meet);
        Interval { meets }
    }

    /// Builds an element from arbitrary meets, normalizing.
    pub fn from_meets(meets: impl IntoIterator<Item = Meet>) -> Interval {
        Interval {
            meets: reduce(meets.into_iter().collect()),
        }
    }

    pub fn meets(&self) -> impl Iterator<Item = &Meet> {
        self.meets.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.meets.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.meets.len() == 1 && self.meets.iter().next().is_some_and(|m| m.is_empty())
    }

    pub fn is_end(&self) -> End {
        if self.is_zero() {
            End::Is0
        } else if self.is_one() {
            End::Is1
        } else {
            End::Neither
        }
    }

    /// The single name this element is, if it is a bare name.
    pub fn as_name(&self) -> Option<&Name> {
        let mut it = self.meets.iter();
        let meet = it.next()?;
        if it.next().is_some() || meet.len() != 1 {
            return None;
        }
        let lit = meet.iter().next()?;
        (!lit.reversed).then_some(&lit.name)
    }

    pub fn meet(&self, other: &Interval) -> Interval {
        let mut out = BTreeSet::new();
        for a in &self.meets {
            for b in &other.meets {
                out.insert(a.union(b).cloned().collect::<Meet>());
            }
        }
        Interval { meets: reduce(out) }
    }

    pub fn join(&self, other: &Interval) -> Interval {
        let out = self.meets.union(&other.meets).cloned().collect();
        Interval { meets: reduce(out) }
    }

    /// The De Morgan involution `1 - r`.
    pub fn rev(&self) -> Interval {
        // ~(\/_k /\_l x) = /\_k \/_l ~x
        let mut acc = Interval::one();
        for meet in &self.meets {
            let flipped = Interval {
                meets: meet
                    .iter()
                    .map(|l| std::iter::once(l.flip()).collect::<Meet>())
                    .collect(),
            };
            acc = acc.meet(&flipped);
        }
        acc
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.meets
            .iter()
            .flat_map(|m| m.iter().map(|l| l.name.clone()))
            .collect()
    }

    pub fn mentions(&self, name: &Name) -> bool {
        self.meets.iter().any(|m| m.iter().any(|l| &l.name == name))
    }

    /// Simultaneous substitution of interval elements for names; names not
    /// in the map are left alone.
    pub fn subst(&self, map: &BTreeMap<Name, Interval>) -> Interval {
        if !self
            .meets
            .iter()
            .any(|m| m.iter().any(|l| map.contains_key(&l.name)))
        {
            return self.clone();
        }
        let mut acc = Interval::zero();
        for meet in &self.meets {
            let mut m = Interval::one();
            for lit in meet {
                let img = match map.get(&lit.name) {
                    Some(r) if lit.reversed => r.rev(),
                    Some(r) => r.clone(),
                    None => Interval::lit(lit.clone()),
                };
                m = m.meet(&img);
            }
            acc = acc.join(&m);
        }
        acc
    }

    pub fn subst1(&self, name: &Name, r: &Interval) -> Interval {
        let mut map = BTreeMap::new();
        map.insert(name.clone(), r.clone());
        self.subst(&map)
    }
}

/// Removes meets that are supersets of other meets (absorption).
fn reduce(meets: BTreeSet<Meet>) -> BTreeSet<Meet> {
    let mut sorted: Vec<Meet> = meets.into_iter().collect();
    sorted.sort_by_key(|m| m.len());
    let mut kept: Vec<Meet> = Vec::new();
    for m in sorted {
        if !kept.iter().any(|k| k.is_subset(&m)) {
            kept.push(m);
        }
    }
    kept.into_iter().collect()
}

pub fn iv_meet(a: &Interval, b: &Interval) -> Interval {
    a.meet(b)
}

pub fn iv_join(a: &Interval, b: &Interval) -> Interval {
    a.join(b)
}

pub fn iv_rev(a: &Interval) -> Interval {
    a.rev()
}

pub fn iv_eq(a: &Interval, b: &Interval) -> bool {
    a == b
}

pub fn iv_is_end(a: &Interval) -> End {
    a.is_end()
}

impl fmt::Display for Interval {
    /// Surface syntax: `0`, `1`, `i`, `~i`, `/\`, `\/`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            crate::pretty::interval_to_string(self, &|n: &Name| n.to_string())
        )
    }
}
