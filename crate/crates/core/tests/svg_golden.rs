//! Byte-for-byte comparison of a rendered allotaxonograph against a stored
//! copy. Set `LEXDIV_UPDATE_GOLDEN=1` to rewrite the stored file after an
//! intended rendering change.

use std::path::PathBuf;

use lexdiv::{build_allotax, render_svg, AllotaxOptions, FrequencyTable, Style};

fn fixture() -> (FrequencyTable, FrequencyTable) {
    let words = |i: usize| format!("t{i:03}");
    let a = FrequencyTable::from_counts(
        1,
        "forum <a>",
        (0..120).map(|i| (words(i), 2000 / (i as u64 + 1))),
    )
    .unwrap();
    let b = FrequencyTable::from_counts(
        1,
        "baseline & co",
        (10..150).map(|i| (words(i), 1500 / (((i * 7) % 140) as u64 + 1))),
    )
    .unwrap();
    (a, b)
}

#[test]
fn allotaxonograph_matches_golden_file() {
    let (a, b) = fixture();
    let opts = AllotaxOptions {
        min_label_rank: 10.0,
        shift_len: 25,
        seed: 42,
        ..Default::default()
    };
    let (spec, _) = build_allotax(&a, &b, &opts).unwrap();
    let svg = render_svg(&spec, &Style::default(), &["fixture: golden".to_owned()]);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/allotax.svg");
    if std::env::var_os("LEXDIV_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let expected = std::fs::read_to_string(&path)
        .expect("golden file; run with LEXDIV_UPDATE_GOLDEN=1 to create it");
    assert!(
        svg == expected,
        "rendered SVG differs from {}",
        path.display()
    );
}
