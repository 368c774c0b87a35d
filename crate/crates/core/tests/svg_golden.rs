//! The histogram renderer's output is pinned byte-for-byte. Regenerate the
//! golden file with `NODEPRUNE_BLESS=1 cargo test --test svg_golden`.

use std::collections::BTreeMap;

use nodeprune::svg::{render_histogram, CountsByMethod};

#[test]
fn histogram_matches_golden_file() {
    let mut counts = CountsByMethod::new();
    counts.insert("AGL".into(), BTreeMap::from([(2, 3), (3, 14), (4, 3)]));
    counts.insert("GL".into(), BTreeMap::from([(3, 6), (4, 8), (5, 4), (8, 2)]));
    let svg = render_histogram(&counts, "Selected hidden nodes (n = 2000)").unwrap();

    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/histogram.svg");
    if std::env::var("NODEPRUNE_BLESS").is_ok() {
        std::fs::write(&path, &svg).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg, golden);
    assert_eq!(svg.matches("<rect").count(), 7);
}
