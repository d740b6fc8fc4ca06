use motive_periods::galois::{dim_galois, MotiveShape};
use motive_periods::motive::full_period_matrix;
use motive_periods::schema::{
    parse_curve, parse_motive, parse_motive_with_profile, parse_rational,
};
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn curve_seeds() {
    for (name, text) in seeds("parse_curve") {
        let r = parse_curve(&text);
        assert_eq!(r.is_ok(), name != "singular.json", "{name}: {r:?}");
    }
}

#[test]
fn motive_seeds() {
    for (name, text) in seeds("parse_motive") {
        let m = parse_motive(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        full_period_matrix(&m).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn combined_seeds() {
    for (name, text) in seeds("parse_combined") {
        let (m, p) = parse_motive_with_profile(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        dim_galois(&MotiveShape::of(&m), &p).unwrap();
    }
}

#[test]
fn rational_seeds() {
    for (name, text) in seeds("parse_rational") {
        let r = parse_rational(&text);
        assert_eq!(r.is_ok(), name != "zero_den.txt", "{name}: {r:?}");
    }
}
