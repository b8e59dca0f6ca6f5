use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use relcheck_core::proglang::{agreement_check, interpret, parse_program, NoOutcome, Outcome};
use relcheck_core::relcore::{parse_relation, serialize_relation};
use relcheck_core::speclang::parse_spec;
use relcheck_core::{Limits, Relation, StateSpace, VarDecl};

type Pairs = BTreeSet<(usize, usize)>;

fn space(widths: &[i64]) -> Arc<StateSpace> {
    let vars = widths
        .iter()
        .enumerate()
        .map(|(k, &w)| VarDecl::new(format!("v{k}"), 0, w - 1))
        .collect();
    StateSpace::new("t", vars).unwrap().shared()
}

/// A space of one to three variables together with a relation on it.
fn space_and_relation() -> impl Strategy<Value = (Arc<StateSpace>, Pairs)> {
    proptest::collection::vec(1i64..4, 1..4).prop_flat_map(|widths| {
        let sp = space(&widths);
        let n = sp.len().unwrap();
        (Just(sp), proptest::collection::btree_set((0..n, 0..n), 0..=n * n))
    })
}

fn two_relations() -> impl Strategy<Value = (Arc<StateSpace>, Pairs, Pairs)> {
    (1usize..=5).prop_flat_map(|n| {
        let set = || proptest::collection::btree_set((0..n, 0..n), 0..=n * n);
        (Just(space(&[n as i64])), set(), set())
    })
}

fn rel(sp: &Arc<StateSpace>, p: &Pairs) -> Relation {
    Relation::from_pairs(sp.clone(), p.iter().copied().collect::<Vec<_>>()).unwrap()
}

fn pairs(r: &Relation) -> Pairs {
    r.pairs().collect()
}

fn compose_oracle(a: &Pairs, b: &Pairs) -> Pairs {
    a.iter()
        .flat_map(|&(s, m)| b.iter().filter(move |&&(m2, _)| m2 == m).map(move |&(_, t)| (s, t)))
        .collect()
}

fn closure_oracle(n: usize, a: &Pairs) -> Pairs {
    let mut acc: Pairs = (0..n).map(|i| (i, i)).collect();
    loop {
        let next: Pairs = acc.union(&compose_oracle(&acc, a)).copied().collect();
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn literal_round_trip((sp, p) in space_and_relation()) {
        let r = rel(&sp, &p);
        let text = serialize_relation(&r);
        let back = parse_relation(&text, Some(&sp)).unwrap();
        prop_assert_eq!(pairs(&back), p);
        prop_assert_eq!(serialize_relation(&back), text);
    }

    #[test]
    fn state_indexing_is_a_bijection((sp, _) in space_and_relation()) {
        for (i, s) in sp.states().enumerate() {
            prop_assert_eq!(sp.index_of(&s).unwrap(), i);
            prop_assert_eq!(sp.state_at(i), s);
        }
    }

    #[test]
    fn operations_match_set_oracles((sp, a, b) in two_relations()) {
        let n = sp.len().unwrap();
        let (ra, rb) = (rel(&sp, &a), rel(&sp, &b));
        prop_assert_eq!(pairs(&ra.union(&rb).unwrap()), a.union(&b).copied().collect::<Pairs>());
        prop_assert_eq!(pairs(&ra.intersection(&rb).unwrap()), a.intersection(&b).copied().collect::<Pairs>());
        prop_assert_eq!(pairs(&ra.difference(&rb).unwrap()), a.difference(&b).copied().collect::<Pairs>());
        prop_assert_eq!(pairs(&ra.compose(&rb).unwrap()), compose_oracle(&a, &b));
        prop_assert_eq!(pairs(&ra.converse()), a.iter().map(|&(s, t)| (t, s)).collect::<Pairs>());
        prop_assert_eq!(pairs(&ra.rt_closure()), closure_oracle(n, &a));
        let all: Pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        prop_assert_eq!(pairs(&ra.complement()), all.difference(&a).copied().collect::<Pairs>());
        prop_assert_eq!(ra.is_subset(&rb).unwrap(), a.is_subset(&b));
        prop_assert_eq!(ra.domain().indices().collect::<BTreeSet<_>>(), a.iter().map(|p| p.0).collect());
    }

    #[test]
    fn dense_and_sparse_forms_agree((sp, a, b) in two_relations()) {
        let (ra, rb) = (rel(&sp, &a), rel(&sp, &b));
        for (x, y) in [(ra.to_dense(), rb.to_sparse()), (ra.to_sparse(), rb.to_dense())] {
            prop_assert_eq!(pairs(&x.union(&y).unwrap()), pairs(&ra.union(&rb).unwrap()));
            prop_assert_eq!(pairs(&x.intersection(&y).unwrap()), pairs(&ra.intersection(&rb).unwrap()));
            prop_assert_eq!(pairs(&x.compose(&y).unwrap()), pairs(&ra.compose(&rb).unwrap()));
            prop_assert_eq!(pairs(&x.converse()), pairs(&ra.converse()));
            prop_assert_eq!(pairs(&x.rt_closure()), pairs(&ra.rt_closure()));
            prop_assert!(x == ra);
        }
    }

    #[test]
    fn materialize_agrees_with_holds(a in -3i64..4, b in 0i64..5, m in 1i64..5, c in 0i64..5, op in 0usize..3) {
        let rel_op = ["<", "==", ">="][op];
        let src = format!(
            "space t: nat x : 0..4; nat y : 0..3;\nspec: x' == (x * {a} + {b}) % {m} || (y' {rel_op} y && x + y' != {c});"
        );
        let spec = parse_spec(&src).unwrap();
        let r = spec.materialize(&Limits::default()).unwrap();
        let sp = spec.space.clone();
        for (i, s) in sp.states().enumerate() {
            for (j, t) in sp.states().enumerate() {
                prop_assert_eq!(r.contains(i, j), spec.spec.holds(&s, &t), "{:?} -> {:?}", s, t);
            }
        }
    }

    #[test]
    fn interpreter_agrees_with_denotation(body in program_body()) {
        let src = format!("program q over t {{\n{body}\n}}");
        let sp = StateSpace::new("t", vec![VarDecl::new("x", 0, 4), VarDecl::new("y", 0, 4)]).unwrap().shared();
        let p = parse_program(&src).and_then(|p| p.bind(&sp)).unwrap();
        let report = agreement_check(&p, 500, &Limits::default()).unwrap();
        prop_assert!(report.agrees(), "{}\n{}", src, report.mismatches[0]);
        prop_assert!(report.inconclusive.is_empty(), "{}", src);
        for s in &report.diverging {
            prop_assert_eq!(interpret(&p, s, 500).unwrap(), Outcome::NoOutcome(NoOutcome::FuelExhausted));
        }
    }
}

fn expr() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (0i64..4).prop_map(|c| c.to_string())
    ];
    (
        atom.clone(),
        prop_oneof![Just("+"), Just("-"), Just("*"), Just("/"), Just("%")],
        atom,
    )
        .prop_map(|(a, op, b)| format!("{a} {op} {b}"))
}

fn test() -> impl Strategy<Value = String> {
    (
        prop_oneof![Just("x"), Just("y")],
        prop_oneof![Just("<"), Just("!="), Just("==")],
        0i64..5,
    )
        .prop_map(|(v, op, c)| format!("{v} {op} {c}"))
}

/// Straight-line code, conditionals, blocks with a local, and loops, some of
/// which do not terminate.
fn program_body() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        6 => (prop_oneof![Just("x"), Just("y")], expr()).prop_map(|(v, e)| format!("{v} = {e};")),
        1 => Just("skip;".to_string()),
        1 => Just("abort;".to_string()),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..3).prop_map(|v| v.join("\n")),
            (test(), inner.clone(), inner.clone()).prop_map(|(t, a, b)| format!("if ({t}) {{ {a} }} else {{ {b} }}")),
            (test(), inner.clone()).prop_map(|(t, a)| format!("if ({t}) {{ {a} }}")),
            // Locals may not shadow, so each nested block gets a fresh name.
            inner.clone().prop_map(|a| {
                let t = format!("t{}", a.matches("nat t").count());
                format!("{{ nat {t} : 0..4; {t} = x; {a} y = {t}; }}")
            }),
            (test(), inner).prop_map(|(t, a)| format!("while ({t}) {{ {a} }}")),
        ]
    })
}
