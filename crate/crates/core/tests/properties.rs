use std::collections::BTreeSet;

use proptest::prelude::*;
use streamcheck_core::abstraction::{
    check_finv_in_g, eval_relation, fold_verdicts, verify_galois, AbstractionFn, AbstractionMap, CheckerRef, ConcretizerSpec, FinvOutcome,
    GaloisOptions, GaloisOutcome, GaloisSpec, Level, MemberClause, PairRef, ParamBinding, RelationForm, RelationSpec, Side, Universe,
};
use streamcheck_core::component::{
    check_causality, compose_check, run, CausalityOptions, CompositionViolation, Connector, Endpoint, SimError, Subcomponent, Transition,
};
use streamcheck_core::expr::BinaryOp;
use streamcheck_core::{
    AutomatonSpec, Causality, Channel, ChannelHistory, ComponentSpec, CompositeSpec, DataType, Expr, SimOptions, SyntacticInterface,
    TestInput, TimedStream, Value,
};

fn int(lo: i64, hi: i64) -> DataType {
    DataType::int(lo, hi).unwrap()
}

fn hist(ch: &str, ty: DataType, vals: Vec<Value>) -> ChannelHistory {
    ChannelHistory::from_streams([(ch, TimedStream::new(ty, vals).unwrap())]).unwrap()
}

fn ints(v: &[i64]) -> Vec<Value> {
    v.iter().map(|i| Value::Int(*i)).collect()
}

/// `y := x + k`, strict or weak.
fn adder(name: &str, causality: Causality, k: i64) -> ComponentSpec {
    let mut a = AutomatonSpec::new(name)
        .input("x", int(-1000, 1000))
        .output("y", int(-1000, 1000), Some(Value::Int(0)))
        .causality(causality)
        .state("S")
        .transition(Transition::new("S", "S").assign("y", Expr::bin(BinaryOp::Add, Expr::name("x"), Expr::lit(k))));
    a.resolve(&BTreeSet::new()).unwrap();
    a.into()
}

fn port(i: &str, c: &str) -> Endpoint {
    Endpoint::Port {
        instance: i.into(),
        channel: c.into(),
    }
}

fn chain(first: Causality, second: Causality) -> CompositeSpec {
    CompositeSpec {
        name: "Chain".into(),
        interface: SyntacticInterface::new(vec![Channel::new("x", int(-1000, 1000))], vec![Channel::new("y", int(-1000, 1000))]),
        subcomponents: vec![
            Subcomponent {
                instance: "p".into(),
                spec: adder("P", first, 1),
            },
            Subcomponent {
                instance: "q".into(),
                spec: adder("Q", second, 10),
            },
        ],
        connectors: vec![
            Connector {
                from: Endpoint::Boundary("x".into()),
                to: port("p", "x"),
            },
            Connector {
                from: port("p", "y"),
                to: port("q", "x"),
            },
            Connector {
                from: port("q", "y"),
                to: Endpoint::Boundary("y".into()),
            },
        ],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn strict_output_lags_input_by_one_tick(xs in proptest::collection::vec(-500i64..500, 0..30)) {
        let spec = adder("A", Causality::Strict, 0);
        let out = run(&spec, &hist("x", int(-1000, 1000), ints(&xs)), xs.len(), SimOptions::default()).unwrap();
        let ys = out.get("y").unwrap().values();
        for t in 0..xs.len() {
            let want = if t == 0 { 0 } else { xs[t - 1] };
            prop_assert_eq!(&ys[t], &Value::Int(want));
        }
    }

    #[test]
    fn weak_output_tracks_input(xs in proptest::collection::vec(-500i64..500, 0..30)) {
        let spec = adder("A", Causality::Weak, 3);
        let out = run(&spec, &hist("x", int(-1000, 1000), ints(&xs)), xs.len(), SimOptions::default()).unwrap();
        let want: Vec<Value> = xs.iter().map(|x| Value::Int(x + 3)).collect();
        prop_assert_eq!(out.get("y").unwrap().values(), &want[..]);
    }

    #[test]
    fn chain_delay_is_the_number_of_strict_stages(xs in proptest::collection::vec(-400i64..400, 1..20), s1: bool, s2: bool) {
        let mode = |s: bool| if s { Causality::Strict } else { Causality::Weak };
        let c = chain(mode(s1), mode(s2));
        compose_check(&c).unwrap();
        let spec: ComponentSpec = c.into();
        let out = run(&spec, &hist("x", int(-1000, 1000), ints(&xs)), xs.len(), SimOptions::default()).unwrap();
        let ys = out.get("y").unwrap().values();
        let delay = s1 as usize + s2 as usize;
        for t in delay..xs.len() {
            prop_assert_eq!(&ys[t], &Value::Int(xs[t - delay] + 11));
        }
    }

    #[test]
    fn verdict_fold_is_conjunction(v in proptest::collection::vec(any::<bool>(), 0..64)) {
        prop_assert_eq!(fold_verdicts(&v), !v.contains(&false));
    }

    #[test]
    fn predicate_and_checker_relations_agree(a in proptest::collection::vec(any::<bool>(), 0..12), flips in proptest::collection::vec(any::<bool>(), 12)) {
        let c: Vec<bool> = a.iter().zip(&flips).map(|(x, f)| x ^ f).collect();
        let ha = hist("x", DataType::Bool, a.iter().map(|b| Value::Bool(*b)).collect());
        let hc = hist("y", DataType::Bool, c.iter().map(|b| Value::Bool(*b)).collect());
        let pred = relation(RelationForm::Predicate(Expr::bin(BinaryOp::Eq, Expr::name("a.x"), Expr::name("c.y"))));
        let chk = relation(RelationForm::Checker(Box::new(equal_checker())));
        let p = eval_relation(&pred, &ha, &hc, SimOptions::default()).unwrap();
        let k = eval_relation(&chk, &ha, &hc, SimOptions::default()).unwrap();
        prop_assert_eq!(&p, &k);
        let expect: Vec<bool> = flips.iter().take(a.len()).map(|f| !f).collect();
        prop_assert_eq!(&p.per_tick, &expect);
        prop_assert_eq!(p.holds, fold_verdicts(&expect));
    }
}

fn relation(form: RelationForm) -> RelationSpec {
    let mut r = RelationSpec {
        name: "R".into(),
        side: Side::Output,
        abstract_channels: vec![Channel::new("x", DataType::Bool)],
        concrete_channels: vec![Channel::new("y", DataType::Bool)],
        form,
    };
    r.resolve(&BTreeSet::new()).unwrap();
    r
}

fn equal_checker() -> CheckerRef {
    let comp = AutomatonSpec::new("Eq")
        .input("l", DataType::Bool)
        .input("r", DataType::Bool)
        .output("ok", DataType::Bool, Some(Value::Bool(true)))
        .causality(Causality::Weak)
        .state("S")
        .transition(Transition::new("S", "S").assign("ok", Expr::bin(BinaryOp::Eq, Expr::name("l"), Expr::name("r"))));
    CheckerRef {
        component: comp.into(),
        bindings: vec![
            (
                "l".into(),
                PairRef {
                    level: Level::Abstract,
                    channel: "x".into(),
                },
            ),
            (
                "r".into(),
                PairRef {
                    level: Level::Concrete,
                    channel: "y".into(),
                },
            ),
        ],
        verdict: "ok".into(),
    }
}

#[test]
fn weak_feedback_loop_is_rejected() {
    let mut c = chain(Causality::Weak, Causality::Weak);
    c.interface.inputs.clear();
    c.connectors[0] = Connector {
        from: port("q", "y"),
        to: port("p", "x"),
    };
    c.connectors.pop();
    c.interface.outputs.clear();
    let errs = compose_check(&c).unwrap_err();
    assert!(
        errs.iter().any(|e| matches!(e, CompositionViolation::ZeroDelayCycle { .. })),
        "{errs:?}"
    );

    let mut ok = c.clone();
    ok.subcomponents[1].spec = adder("Q", Causality::Strict, 10);
    compose_check(&ok).unwrap();
}

#[test]
fn overlapping_guards_are_caught_unless_permissive() {
    let mut a = AutomatonSpec::new("Overlap")
        .input("x", DataType::Bool)
        .output("y", int(0, 2), Some(Value::Int(0)))
        .causality(Causality::Weak)
        .state("S")
        .transition(
            Transition::new("S", "S")
                .named("one")
                .when(Expr::name("x"))
                .assign("y", Expr::lit(1i64)),
        )
        .transition(Transition::new("S", "S").named("two").assign("y", Expr::lit(2i64)));
    a.resolve(&BTreeSet::new()).unwrap();
    let spec: ComponentSpec = a.into();
    let h = hist("x", DataType::Bool, vec![Value::Bool(false), Value::Bool(true)]);
    let e = run(&spec, &h, 2, SimOptions::default()).unwrap_err();
    assert!(matches!(e, SimError::Nondeterministic { tick: 2, .. }), "{e}");
    let out = run(&spec, &h, 2, SimOptions::permissive()).unwrap();
    assert_eq!(out.get("y").unwrap().values(), &ints(&[2, 1])[..]);
}

#[test]
fn causality_search_separates_strict_from_weak() {
    let opts = CausalityOptions {
        mode: Some(Causality::Strict),
        ..Default::default()
    };
    assert!(check_causality(&adder("A", Causality::Strict, 0), &opts).unwrap().is_ok());
    assert!(!check_causality(&adder("A", Causality::Weak, 0), &opts).unwrap().is_ok());
    let weak = CausalityOptions {
        mode: Some(Causality::Weak),
        ..Default::default()
    };
    assert!(check_causality(&adder("A", Causality::Weak, 0), &weak).unwrap().is_ok());
}

/// `f(c) = c >= t` on a small integer universe, with `g` given by `a.i == (c.i >= u)`.
fn threshold_galois(t: i64, u: i64, values: &[i64]) -> GaloisSpec {
    let ge = |k: i64| Expr::bin(BinaryOp::Ge, Expr::name("c.i"), Expr::lit(k));
    let mut g = GaloisSpec {
        name: "T".into(),
        abstract_channels: vec![Channel::new("i", DataType::Bool)],
        concrete_channels: vec![Channel::new("i", int(-5, 5))],
        f: AbstractionFn::ElementWise(vec![AbstractionMap {
            side: Side::Input,
            target: Channel::new("i", DataType::Bool),
            expr: ge(t),
        }]),
        members: vec![MemberClause {
            side: Side::Input,
            target: "i".into(),
            pred: Expr::bin(BinaryOp::Eq, Expr::name("a.i"), ge(u)),
        }],
        universe: Some(Universe {
            horizon: 1,
            concrete: vec![(Channel::new("i", int(-5, 5)), ints(values))],
            abstract_values: vec![(Channel::new("i", DataType::Bool), vec![Value::Bool(false), Value::Bool(true)])],
        }),
    };
    g.resolve(&BTreeSet::new()).unwrap();
    g
}

/// Brute force over all subset pairs with plain integers and booleans.
fn threshold_oracle(t: i64, u: i64, values: &[i64]) -> bool {
    let n = values.len();
    for tc in 0u32..(1 << n) {
        for ta in 0u32..4 {
            let has = |b: bool| ta & (1 << b as u32) != 0;
            let f_side = (0..n).filter(|k| tc & (1 << k) != 0).all(|k| has(values[k] >= t));
            let g_side = (0..n).filter(|k| tc & (1 << k) != 0).all(|k| has(values[k] >= u));
            if f_side != g_side {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn galois_check_matches_brute_force(t in -3i64..3, u in -3i64..3, mut values in proptest::collection::btree_set(-5i64..=5, 1..6)) {
        let values: Vec<i64> = std::mem::take(&mut values).into_iter().collect();
        let g = threshold_galois(t, u, &values);
        let got = verify_galois(&g, &GaloisOptions::default()).unwrap();
        prop_assert_eq!(got.is_ok(), threshold_oracle(t, u, &values));
        if let GaloisOutcome::Ok { pairs_checked, .. } = got {
            prop_assert_eq!(pairs_checked, (1u64 << values.len()) * 4);
        }
    }
}

#[test]
fn identity_concretizer_lands_in_g() {
    let g = threshold_galois(0, 0, &[-1, 0, 1]);
    let mut copy = AutomatonSpec::new("Lift")
        .input("i", DataType::Bool)
        .output("ci", int(-5, 5), None)
        .causality(Causality::Weak)
        .state("S")
        .transition(Transition::new("S", "S").assign(
            "ci",
            Expr::call(
                streamcheck_core::expr::Func::Ite,
                vec![Expr::name("i"), Expr::lit(1i64), Expr::lit(-1i64)],
            ),
        ));
    copy.resolve(&BTreeSet::new()).unwrap();
    let conc = ConcretizerSpec {
        name: "K".into(),
        component: copy.into(),
        params: vec![],
        abstract_inputs: vec![Channel::new("i", DataType::Bool)],
        concrete_inputs: vec![Channel::new("ci", int(-5, 5))],
    };
    conc.check().unwrap();
    // `g` reads `c.i`, so rename the concretizer's output to match.
    let mut g2 = g.clone();
    g2.concrete_channels = vec![Channel::new("ci", int(-5, 5))];
    g2.members[0].pred = g2.members[0].pred.rename(&|n| (n == "c.i").then(|| "c.ci".to_string()));
    let samples: Vec<(ParamBinding, TestInput)> = [[true, false, true], [false, false, false]]
        .iter()
        .map(|bs| {
            let h = hist("i", DataType::Bool, bs.iter().map(|b| Value::Bool(*b)).collect());
            (ParamBinding::new(), TestInput::new(h))
        })
        .collect();
    assert_eq!(
        check_finv_in_g(&g2, &conc, &samples, SimOptions::default()).unwrap(),
        FinvOutcome::Ok { checked: 2 }
    );
}
