//! Expected outputs for the bundled fixtures live in `fixtures/expected/`.
//! Run with `UPDATE_SNAPSHOTS=1` to rewrite them.

use std::path::PathBuf;

use farsight::cli::run_with;

const CASES: &[(&str, &[&str], u8)] = &[
    (
        "example1-analyze.json",
        &["analyze", "@example1", "--format", "json"],
        0,
    ),
    (
        "example2-analyze.json",
        &["analyze", "@example2", "--format", "json"],
        0,
    ),
    (
        "example4-analyze.json",
        &["analyze", "@example4", "--format", "json"],
        0,
    ),
    (
        "example1-mu4-dominates-mu1.json",
        &["dominates", "@example1", "mu4", "mu1", "--format", "json"],
        0,
    ),
    (
        "example1-mu1-dominates-mu3.json",
        &["dominates", "@example1", "mu1", "mu3", "--format", "json"],
        1,
    ),
    (
        "example4-mu3-directly-dominates-mu2.json",
        &[
            "dominates",
            "@example4",
            "mu3",
            "mu2",
            "--relation",
            "direct",
            "--format",
            "json",
        ],
        0,
    ),
    (
        "example1-fss-mu4.json",
        &["fss", "@example1", "--verify", "[mu4]", "--format", "json"],
        0,
    ),
    (
        "example1-fss-mu1-mu2.json",
        &["fss", "@example1", "--verify", "[mu1, mu2]", "--format", "json"],
        1,
    ),
    (
        "example2-fss-v.json",
        &["fss", "@example2", "--verify", "[mu1, mu2, mu3]", "--format", "json"],
        0,
    ),
    (
        "example4-fss-search.json",
        &["fss", "@example4", "--search", "--pool", "all", "--format", "json"],
        0,
    ),
    (
        "example4-dem-search.json",
        &["dem", "@example4", "--search", "--max-size", "2", "--format", "json"],
        0,
    ),
    (
        "example4-dem-mu1-mu2.json",
        &["dem", "@example4", "--verify", "[mu1, mu2]", "--format", "json"],
        0,
    ),
    (
        "example4-direct.dot",
        &["graph", "@example4", "--relation", "direct"],
        0,
    ),
];

fn expected_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/expected")
}

#[test]
fn outputs_match_snapshots() {
    let update = std::env::var_os("UPDATE_SNAPSHOTS").is_some();
    let mut mismatched = Vec::new();
    for (file, args, code) in CASES {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("farsight").chain(args.iter().copied()).map(Into::into);
        let got = run_with(argv, &mut out, &mut err);
        assert_eq!(got, *code, "{file}: {}", String::from_utf8_lossy(&err));
        let path = expected_dir().join(file);
        if update {
            std::fs::create_dir_all(expected_dir()).unwrap();
            std::fs::write(&path, &out).unwrap();
        } else if std::fs::read(&path).ok().as_deref() != Some(&out[..]) {
            mismatched.push(*file);
        }
    }
    assert!(mismatched.is_empty(), "outputs differ from snapshots: {mismatched:?}");
}
