//! Shared generators and corpus loading for the integration tests.
#![allow(dead_code)]

use cubical::derived::id_equiv;
use cubical::faces::Face;
use cubical::interval::Interval;
use cubical::parse::{self, SourceFile};
use cubical::reduce::{dispatch, guard, is_introduced, Kernel, RuleId, Step};
use cubical::syntax::{alpha_eq, GlueBranch, Name, NameCtx, Term};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub mod algebra;

pub fn load(file: &str) -> SourceFile {
    let path = format!("{}/corpus/{file}", env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse::parse(&src).unwrap_or_else(|e| panic!("{path}:{e}"))
}

pub fn nm(s: &str) -> Name {
    Name::new(s)
}

/// Names free in generated terms.
pub fn ctx() -> NameCtx {
    NameCtx::from_names([nm("i"), nm("j")])
}

pub fn interval() -> impl Strategy<Value = Interval> {
    let leaf = prop_oneof![
        Just(Interval::zero()),
        Just(Interval::one()),
        prop_oneof![Just("i"), Just("j")].prop_map(|s| Interval::name(nm(s))),
        prop_oneof![Just("i"), Just("j")].prop_map(|s| Interval::name(nm(s)).rev()),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.meet(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.join(&b)),
        ]
    })
}

pub fn face() -> impl Strategy<Value = Face> {
    let leaf = prop_oneof![
        Just(Face::zero()),
        Just(Face::one()),
        (prop_oneof![Just("i"), Just("j")], any::<bool>()).prop_map(|(s, e)| Face::atom(nm(s), e)),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.meet(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.join(&b)),
        ]
    })
}

fn id_nat() -> Term {
    let x = Name::fresh_named("x");
    Term::lam(x.clone(), Term::nat(), Term::var(x))
}

fn step_fn() -> Term {
    let x = Name::fresh_named("x");
    let y = Name::fresh_named("y");
    Term::lam(
        x,
        Term::nat(),
        Term::lam(y.clone(), Term::nat(), Term::suc(Term::var(y))),
    )
}

fn line() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(Term::nat()),
        Just(Term::arrow(Term::nat(), Term::nat())),
        Just(Term::times(Term::nat(), Term::nat())),
        Just(Term::path(Term::nat(), Term::zero(), Term::zero())),
        Just(Term::s1()),
        Just(Term::inh(Term::nat())),
        Just(Term::universe()),
        face().prop_map(|f| Term::glue_t(
            vec![GlueBranch {
                face: f,
                ty: Term::nat(),
                equiv: id_equiv(&Term::nat())
            }],
            Term::nat()
        )),
        interval().prop_map(|r| {
            let l = Name::fresh_named("l");
            Term::path_t(l.clone(), Term::s1(), Term::base(), Term::loop_(r))
        }),
    ]
}

/// Scoped, closed-under-term-variables terms over the names `i, j`.
/// They need not be well typed.
pub fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..3u64).prop_map(Term::numeral),
        Just(Term::base()),
        Just(Term::nat()),
        Just(Term::universe()),
        Just(Term::s1()),
        Just(id_nat()),
        interval().prop_map(Term::loop_),
        (0..3u64).prop_map(|n| Term::inc(Term::numeral(n))),
        (0..3u64, 0..3u64, interval()).prop_map(|(a, b, r)| Term::squash(
            Term::inc(Term::numeral(a)),
            Term::inc(Term::numeral(b)),
            r
        )),
    ];
    leaf.prop_recursive(4, 40, 3, |t| {
        let l = || Name::fresh_named("l");
        prop_oneof![
            t.clone().prop_map(Term::suc),
            t.clone().prop_map(|n| Term::natrec(
                Name::fresh_named("_"),
                Term::nat(),
                n,
                Term::zero(),
                step_fn()
            )),
            t.clone().prop_map(|u| Term::app(id_nat(), u)),
            (t.clone(), t.clone()).prop_map(|(f, u)| Term::app(f, u)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            t.clone().prop_map(Term::fst),
            t.clone().prop_map(Term::snd),
            (t.clone(), interval()).prop_map(|(p, r)| Term::papp(p, r)),
            t.clone().prop_map(move |u| Term::pabs(l(), u)),
            (line(), face(), t.clone(), t.clone()).prop_map(|(a, f, u, b)| Term::comp(
                Name::fresh_named("l"),
                a,
                vec![(f, u)],
                b
            )),
            (line(), t.clone()).prop_map(|(a, b)| Term::comp(Name::fresh_named("l"), a, vec![], b)),
            (face(), t.clone(), face(), t.clone())
                .prop_map(|(f, u, g, v)| Term::system_e(vec![(f, u), (g, v)])),
            (face(), face())
                .prop_map(|(f, g)| Term::system_t(vec![(f, Term::nat()), (g, Term::s1())])),
            (face(), t.clone()).prop_map(|(f, u)| Term::comp(
                Name::fresh_named("l"),
                Term::nat(),
                vec![(f, u)],
                Term::zero()
            )),
            (face(), interval()).prop_map(|(f, r)| Term::s1_elim(
                Name::fresh_named("_"),
                Term::nat(),
                Term::comp(
                    Name::fresh_named("l"),
                    Term::s1(),
                    vec![(f, Term::loop_(r))],
                    Term::base()
                ),
                Term::zero(),
                Term::pabs(Name::fresh_named("l"), Term::numeral(1))
            )),
            (face(), t.clone(), t.clone()).prop_map(|(f, u, a)| Term::glue_e(vec![(f, u)], a)),
            (face(), t.clone())
                .prop_map(|(f, u)| Term::unglue(vec![(f, id_equiv(&Term::nat()))], u)),
            (face(), t.clone()).prop_map(|(f, a)| Term::glue_t(
                vec![GlueBranch {
                    face: f,
                    ty: Term::nat(),
                    equiv: id_equiv(&Term::nat())
                }],
                a
            )),
            t.clone().prop_map(|s| Term::s1_elim(
                Name::fresh_named("_"),
                Term::nat(),
                s,
                Term::zero(),
                Term::pabs(Name::fresh_named("l"), Term::numeral(1))
            )),
            (face(), t.clone(), t.clone()).prop_map(|(f, u, b)| Term::hcomp(
                Term::nat(),
                Name::fresh_named("l"),
                vec![(f, u)],
                b
            )),
            (interval(), t.clone()).prop_map(|(r, u)| Term::fwd(
                Name::fresh_named("l"),
                Term::nat(),
                r,
                u
            )),
            t.clone().prop_map(|s| {
                let a = Name::fresh_named("a");
                Term::inh_elim(
                    Name::fresh_named("_"),
                    Term::inh(Term::nat()),
                    s,
                    Term::lam(a.clone(), Term::nat(), Term::inc(Term::var(a))),
                    id_nat(),
                )
            }),
        ]
    })
}

/// Values of the N-typed definitions in corpus.ctt, as computed by the
/// oracle interpreter.
pub const CORPUS: &[(&str, u64)] = &[
    ("two", 2),
    ("four", 4),
    ("five", 5),
    ("natrec_dep", 8),
    ("pred_three", 2),
    ("pred_open", 0),
    ("beta", 5),
    ("beta_higher", 4),
    ("fst_pair", 3),
    ("snd_pair", 6),
    ("dep_pair", 2),
    ("path_beta", 7),
    ("path_beta_open", 2),
    ("path_app_def", 3),
    ("system_select", 1),
    ("system_type", 2),
    ("glue_collapse", 3),
    ("glue_type_line", 3),
    ("unglue_collapse", 4),
    ("unglue_glue", 2),
    ("comp_nat_suc", 1),
    ("comp_nat_zero", 0),
    ("comp_nat_cong", 2),
    ("comp_pi", 3),
    ("comp_pi_dep", 5),
    ("comp_sigma", 2),
    ("comp_path", 3),
    ("transport_ua_id", 2),
    ("comp_glue_open", 3),
    ("comp_u", 3),
    ("s1_base", 5),
    ("s1_loop", 0),
    ("s1_loop_end", 4),
    ("s1_comp", 0),
    ("s1_comp_loop", 3),
    ("s1_comp_collapse", 2),
    ("trunc_inc", 3),
    ("trunc_squash", 3),
    ("trunc_hcomp", 3),
    ("trunc_fwd", 3),
    ("trunc_comp", 3),
    ("trunc_squash_path", 3),
];

/// Numerals of the witnesses extracted from truncation.ctt: left branch of
/// a squash, base of an hcomp.
pub const WITNESSES: &[(&str, u64)] = &[
    ("w_inc", 2),
    ("w_squash", 0),
    ("w_squash_end", 1),
    ("w_hcomp", 1),
    ("w_hcomp_collapse", 3),
    ("w_fwd", 1),
    ("w_fwd_one", 8),
    ("w_fwd_squash", 4),
    ("w_fwd_hcomp", 3),
    ("w_comp", 2),
    ("w_elim", 7),
];

fn reduct(step: &Step) -> Option<&Term> {
    match step {
        Step::Stepped { term, .. } => Some(term),
        _ => None,
    }
}

/// The independently written guards fire for at most one rule, and that
/// rule is the one dispatch selects.
pub fn guards_agree_with_dispatch(t: &Term) -> Result<(), TestCaseError> {
    let fired: Vec<RuleId> = RuleId::ALL
        .iter()
        .copied()
        .filter(|r| guard(*r, t))
        .collect();
    prop_assert!(fired.len() <= 1, "{} fires {:?}", t, fired);
    prop_assert_eq!(fired.first().copied(), dispatch(t), "{}", t);
    Ok(())
}

pub fn one_step_is_deterministic(t: &Term) -> Result<(), TestCaseError> {
    let a = Kernel::new(ctx()).step(t);
    let b = Kernel::new(ctx()).step(t);
    if a.rule().is_some() {
        prop_assert_eq!(a.rule(), dispatch(t));
    }
    if dispatch(t).is_none() {
        prop_assert!(reduct(&a).is_none());
    }
    match (reduct(&a), reduct(&b)) {
        (Some(x), Some(y)) => {
            prop_assert!(alpha_eq(x, y), "{} vs {}", x, y);
            prop_assert_eq!(a.rule(), b.rule());
        }
        (None, None) => prop_assert_eq!(format!("{a:?}"), format!("{b:?}")),
        _ => prop_assert!(false, "passes disagree on {}", t),
    }
    Ok(())
}

pub fn introduced_terms_never_step(t: &Term) -> Result<(), TestCaseError> {
    if is_introduced(&ctx(), t) {
        prop_assert!(matches!(Kernel::new(ctx()).step(t), Step::Whnf), "{}", t);
        prop_assert_eq!(dispatch(t), None);
    }
    Ok(())
}
