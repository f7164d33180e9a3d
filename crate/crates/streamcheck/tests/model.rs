mod support;

use streamcheck::model::{parse_model, parse_model_bytes};
use streamcheck_core::ComponentSpec;
use support::{fixture, model};

#[test]
fn brake_override_shape() {
    let doc = model("brake_override.scm.txt");
    assert_eq!(doc.components.len(), 1);
    let ComponentSpec::Automaton(a) = &doc.components[0] else {
        panic!("expected an automaton")
    };
    assert_eq!(a.states, ["Active", "Standby"]);
    assert_eq!(a.initial, "Active");
    let names: Vec<&str> = a.transitions.iter().filter_map(|t| t.name.as_deref()).collect();
    assert_eq!(names, ["override", "AccOff", "AccOn", "Brake"]);
}

#[test]
fn unresolved_channel_in_guard() {
    let text = fixture("brake_override.scm.txt").replace("when DriverBrake > AccBrake", "when DriverBrak > AccBrake");
    let d = parse_model(&text).unwrap_err();
    assert_eq!(d.len(), 1);
    assert!(d[0].message.contains("unresolved channel `DriverBrak`"), "{}", d[0]);
    assert_eq!(d[0].pos.line, 13);
}

#[test]
fn syntax_error_has_position() {
    let d = parse_model("component X {\n    input a bool;\n}").unwrap_err();
    assert_eq!((d[0].pos.line, d[0].pos.col), (2, 13));
    assert!(d[0].message.contains("expected `:`"), "{}", d[0]);
}

#[test]
fn duplicate_and_unknown_names() {
    let d = parse_model("type T = bool;\ntype T = real;\n").unwrap_err();
    assert!(d[0].message.contains("duplicate name `T`"));
    let d = parse_model("composite C { sub x : Nope; }").unwrap_err();
    assert!(d[0].message.contains("unknown component `Nope`"));
    let d = parse_model("type A = B;\ntype B = A;\n").unwrap_err();
    assert!(d.iter().any(|e| e.message.contains("refers to itself")), "{d:?}");
}

#[test]
fn bad_literal_gets_suggestion() {
    let text = fixture("brake_override.scm.txt").replace("AccStateT = Active", "AccStateT = Actve");
    let d = parse_model(&text).unwrap_err();
    assert!(d[0].message.contains("did you mean `Active`"), "{}", d[0]);
}

#[test]
fn zero_delay_cycle_is_a_diagnostic() {
    let text = "
component W { causality weak; input x : bool; output y : bool; states { S } transitions { S -> S do y := x; } }
composite Loop {
    sub p : W;
    sub q : W;
    connect p.y -> q.x;
    connect q.y -> p.x;
}";
    let d = parse_model(text).unwrap_err();
    assert!(d.iter().any(|e| e.message.contains("zero-delay cycle")), "{d:?}");
}

#[test]
fn refinement_checks_relation_sides() {
    let text = fixture("encoder.scm.txt").replace(
        "    ri RI;\n    ro RO;\n    galois G;\n    concretizer K;",
        "    ri RO;\n    ro RO;",
    );
    let d = parse_model(&text).unwrap_err();
    assert!(d.iter().any(|e| e.message.contains("`ri` needs inputs")), "{d:?}");
}

#[test]
fn non_utf8_input() {
    let d = parse_model_bytes(b"type T = bool;\n\xff").unwrap_err();
    assert_eq!(d[0].pos.line, 2);
    assert!(d[0].message.contains("UTF-8"));
}

#[test]
fn every_fixture_resolves() {
    for p in support::model_fixtures() {
        let text = std::fs::read_to_string(&p).unwrap();
        if let Err(d) = parse_model(&text) {
            panic!("{}: {d:?}", p.display());
        }
    }
    let acc = model("acc.scm.txt");
    assert!(matches!(acc.component("AccSystem"), Some(ComponentSpec::Composite(_))));
    assert_eq!(acc.refinement("Acc").unwrap().concretizer.as_deref(), Some("AccConcretizer"));
}
