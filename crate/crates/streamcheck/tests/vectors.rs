mod support;

use streamcheck::vectors::{parse_tables, parse_testcases, parse_vector_file, serialize_testcases};
use streamcheck_core::testing::suite_run;
use streamcheck_core::{SimOptions, Value};
use support::{fixture, model};

#[test]
fn brake_vectors_load() {
    let doc = model("brake_override.scm.txt");
    let spec = doc.component("BrakeOverride").unwrap();
    let cases = parse_testcases(&fixture("brake_override.tv.csv"), spec.interface()).unwrap();
    assert_eq!(cases.len(), 3);
    let first = &cases[0];
    assert_eq!(first.name, "driver_takes_over");
    assert_eq!(first.input.horizon(), 5);
    let drv: Vec<Value> = first.input.bindings.get("DriverBrake").unwrap().values().to_vec();
    assert_eq!(drv, [21, 51, 78, 100, 91].map(Value::Int));
    let exp = first.expected.alternatives[0].get("AccState").unwrap().values();
    assert_eq!(exp[4], Value::label("Standby"));
    assert!(exp[..4].iter().all(|v| *v == Value::label("Active")));
    assert!(suite_run(spec, &cases, 1e-9, SimOptions::default()).all_passed());
}

#[test]
fn unknown_channel_is_rejected() {
    let doc = model("brake_override.scm.txt");
    let iface = doc.component("BrakeOverride").unwrap().interface();
    let text = "#inputs\nDriverBrake,AccBrake,Foo\n1,2,3\n";
    let e = parse_testcases(text, iface).unwrap_err();
    assert!(e[0].message.contains("unknown channel `Foo`"), "{}", e[0]);
    assert_eq!(e[0].line, 2);
}

#[test]
fn misspelled_label_suggests() {
    let doc = model("brake_override.scm.txt");
    let iface = doc.component("BrakeOverride").unwrap().interface();
    let text = "#inputs\nDriverBrake,AccBrake\n1,2\n#expected\nAccState\nActve\n";
    let e = parse_testcases(text, iface).unwrap_err();
    assert!(e[0].message.contains("Active"), "{}", e[0]);
    assert_eq!((e[0].line, e[0].col), (6, Some(1)));
}

#[test]
fn out_of_range_and_ragged_rows() {
    let doc = model("brake_override.scm.txt");
    let iface = doc.component("BrakeOverride").unwrap().interface();
    let e = parse_testcases("#inputs\nDriverBrake,AccBrake\n1,256\n", iface).unwrap_err();
    assert_eq!((e[0].line, e[0].col), (3, Some(2)));
    let e = parse_tables("#inputs\na,b\n1\n").unwrap_err();
    assert_eq!(e[0].line, 3);
}

#[test]
fn vector_files_round_trip() {
    for (m, comp, v) in [
        ("brake_override.scm.txt", "BrakeOverride", "brake_override.tv.csv"),
        ("min.scm.txt", "Min", "min.tv.csv"),
        ("encoder.scm.txt", "EncoderConc", "encoder_concrete.tv.csv"),
    ] {
        let doc = model(m);
        let iface = doc.component(comp).unwrap().interface();
        let cases = parse_testcases(&fixture(v), iface).unwrap();
        let again = parse_testcases(&serialize_testcases(&cases), iface).unwrap();
        assert_eq!(cases, again, "{v}");
    }
}

#[test]
fn params_table_is_kept() {
    let doc = model("encoder.scm.txt");
    let iface = doc.component("EncoderAbs").unwrap().interface();
    let cases = parse_vector_file(&fixture("encoder_abstract.tv.csv"), iface).unwrap();
    let p = cases[0].params.as_ref().unwrap();
    assert_eq!(p.header, ["mag"]);
    assert_eq!(p.rows.len(), 3);
}
