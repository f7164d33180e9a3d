use std::fs;
use std::path::{Path, PathBuf};

use streamcheck::model::{parse_model, serialize_model};

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".scm.txt"))
        .collect();
    v.sort();
    v
}

#[test]
fn every_fixture_parses_and_round_trips() {
    let all = fixtures();
    assert!(all.len() >= 5);
    for p in all {
        let text = fs::read_to_string(&p).unwrap();
        let doc = parse_model(&text).unwrap_or_else(|d| panic!("{}: {:?}", p.display(), d));
        let out = serialize_model(&doc);
        let back = parse_model(&out).unwrap_or_else(|d| panic!("{}: reparse {:?}\n{out}", p.display(), d));
        assert_eq!(back, doc, "{}", p.display());
    }
}
