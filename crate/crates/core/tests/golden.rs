//! Byte-for-byte comparison of generated files against the checked-in copies
//! under `tests/golden/<case>/expected`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};

use statetest_core::codegen::GeneratedArtifact;
use statetest_core::doubles::{generate_shims, parse_double_specs};
use statetest_core::{
    bind, generate_machine, generate_test, load_model, parse_scenario, run_scenario, SourceText,
    TestFlavor, Verdict,
};

const CASES: [&str; 5] = ["sm", "door", "thermostat", "single", "limits"];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn artifacts_for(case: &str) -> Vec<GeneratedArtifact> {
    let dir = golden_dir().join(case);
    let model = load_model(&SourceText::read(&dir.join("model.sct.txt")).unwrap()).unwrap();
    let scenario = parse_scenario(&SourceText::read(&dir.join("scenario.json")).unwrap()).unwrap();
    let bound = bind(&scenario, &model).unwrap();
    let mut out = generate_machine(&model).unwrap();
    out.push(generate_test(&model, &bound, TestFlavor::Gtest).unwrap());
    out.push(generate_test(&model, &bound, TestFlavor::Minimal).unwrap());
    let report = run_scenario(&bound);
    assert_eq!(
        report.verdict,
        Verdict::Pass,
        "{case}: {}",
        report.render_text()
    );
    out
}

fn check(expected_root: &Path, artifacts: &[GeneratedArtifact]) {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for a in artifacts {
        let path = expected_root.join(&a.path);
        if update {
            a.write_under(expected_root).unwrap();
            continue;
        }
        let expected = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; run with UPDATE_GOLDEN=1", path.display()));
        assert!(
            expected == a.content,
            "{} differs from the generated output",
            path.display()
        );
    }
}

#[test]
fn machines_and_tests_match_goldens() {
    for case in CASES {
        let first = artifacts_for(case);
        assert_eq!(
            first,
            artifacts_for(case),
            "{case}: generation is not repeatable"
        );
        check(&golden_dir().join(case).join("expected"), &first);
    }
}

#[test]
fn doubles_match_goldens() {
    let dir = golden_dir().join("doubles");
    let specs =
        parse_double_specs(&SourceText::read(&dir.join("alloc.doubles.json")).unwrap()).unwrap();
    let artifacts = generate_shims("alloc", &specs).unwrap();
    check(&dir.join("expected"), &artifacts);
}

#[test]
fn goldens_use_unix_line_endings() {
    for case in CASES {
        let root = golden_dir().join(case).join("expected");
        for a in artifacts_for(case) {
            let bytes = fs::read(root.join(&a.path)).unwrap();
            assert!(!bytes.contains(&b'\r'), "{case}/{}", a.path);
        }
    }
}
