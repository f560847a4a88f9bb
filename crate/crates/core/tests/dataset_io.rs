use std::fs;
use std::path::Path;

use scoot_core::dataset::{load_image, load_ranked_manifest, load_triplet_manifest, save_pgm};
use scoot_core::report::{
    read_report, write_report, ProtocolKnobs, ReportFormat, ReportRow, ScoreReport,
};
use scoot_core::{GrayImage, MetaResult, ScootConfig, ScootError};

fn write_images(dir: &Path, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let p = dir.join(name);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        save_pgm(&GrayImage::filled(8, 8, (i * 30) as u8).unwrap(), &p).unwrap();
    }
}

#[test]
fn empty_manifests_are_valid() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    fs::write(&p, r#"{"entries": []}"#).unwrap();
    assert!(load_ranked_manifest(&p).unwrap().entries.is_empty());
    assert!(load_triplet_manifest(&p)
        .unwrap()
        .load_triplets()
        .unwrap()
        .is_empty());
}

#[test]
fn triplet_q_must_be_binary() {
    let dir = tempfile::tempdir().unwrap();
    write_images(dir.path(), &["r.pgm", "a.pgm", "b.pgm"]);
    let p = dir.path().join("t.json");
    fs::write(
        &p,
        r#"{"entries": [{"reference_path": "r.pgm", "s0_path": "a.pgm", "s1_path": "b.pgm", "q": 2}]}"#,
    )
    .unwrap();
    match load_triplet_manifest(&p) {
        Err(ScootError::Validation { message, .. }) => assert!(message.contains("entry 0")),
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn triplets_preserve_order_and_q() {
    let dir = tempfile::tempdir().unwrap();
    write_images(dir.path(), &["refs/r.pgm", "a.pgm", "b.pgm"]);
    let p = dir.path().join("t.json");
    fs::write(
        &p,
        r#"{"entries": [
            {"reference_path": "refs/r.pgm", "s0_path": "a.pgm", "s1_path": "b.pgm", "q": 0},
            {"reference_path": "refs/r.pgm", "s0_path": "b.pgm", "s1_path": "a.pgm", "q": 1},
            {"reference_path": "a.pgm", "s0_path": "refs/r.pgm", "s1_path": "b.pgm", "q": 1}
        ]}"#,
    )
    .unwrap();
    let m = load_triplet_manifest(&p).unwrap();
    assert_eq!(m, load_triplet_manifest(&p).unwrap());
    let ts = m.load_triplets().unwrap();
    assert_eq!(ts.iter().map(|t| t.q()).collect::<Vec<_>>(), vec![0, 1, 1]);
    assert_eq!(ts[1].s0, load_image(dir.path().join("b.pgm")).unwrap());
    assert_eq!(ts[2].reference.pixels()[0], 30);
}

#[test]
fn ranked_manifest_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    write_images(
        dir.path(),
        &[
            "reference/1.pgm",
            "synthetic/mrf/1.pgm",
            "synthetic/gan/1.pgm",
        ],
    );
    let p = dir.path().join("ranked.json");
    fs::write(
        &p,
        r#"{"entries": [{"reference_path": "reference/1.pgm", "candidates": [
            {"algorithm": "mrf", "path": "synthetic/mrf/1.pgm"},
            {"algorithm": "gan", "path": "synthetic/gan/1.pgm"}]}]}"#,
    )
    .unwrap();
    let sets = load_ranked_manifest(&p).unwrap().load_sets().unwrap();
    assert_eq!(sets.len(), 1);
    assert_eq!(sets[0].id, "reference/1.pgm");
    let names: Vec<_> = sets[0].candidates.iter().map(|(a, _)| a.as_str()).collect();
    assert_eq!(names, vec!["mrf", "gan"]);
    assert_eq!(sets[0].candidates[1].1.pixels()[0], 60);
}

#[test]
fn manifest_errors_identify_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    write_images(dir.path(), &["r.pgm", "a.pgm"]);
    let p = dir.path().join("bad.json");

    fs::write(&p, "{\"entries\": [\n  {\"reference_path\": 3}\n]}").unwrap();
    match load_ranked_manifest(&p) {
        Err(ScootError::Parse { message, .. }) => assert!(message.contains("line 2"), "{message}"),
        other => panic!("{other:?}"),
    }

    fs::write(
        &p,
        r#"{"entries": [{"reference_path": "r.pgm", "candidates": [
            {"algorithm": "x", "path": "a.pgm"}, {"algorithm": "x", "path": "a.pgm"}]}]}"#,
    )
    .unwrap();
    assert!(matches!(
        load_ranked_manifest(&p),
        Err(ScootError::Validation { .. })
    ));

    fs::write(
        &p,
        r#"{"entries": [{"reference_path": "r.pgm", "candidates": [{"algorithm": "x", "path": "gone.pgm"}]}]}"#,
    )
    .unwrap();
    match load_ranked_manifest(&p) {
        Err(e @ ScootError::Validation { .. }) => assert!(e.to_string().contains("gone.pgm")),
        other => panic!("{other:?}"),
    }

    assert!(matches!(
        load_ranked_manifest(dir.path().join("missing.json")),
        Err(ScootError::NotFound(_))
    ));
}

fn sample_report() -> ScoreReport {
    let mut report = ScoreReport::new("mm1", ScootConfig::default(), ProtocolKnobs::default());
    report
        .rows
        .push(ReportRow::new("reference/0.pgm").with("theta", 0.0372916));
    report
        .rows
        .push(ReportRow::new("reference/1.pgm").with_note("degenerate ranking"));
    report.set_aggregate(MetaResult {
        mm1_theta: Some(0.0372916),
        ..MetaResult::default()
    });
    report
}

#[test]
fn report_write_then_read_is_equal() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let report = sample_report();
    write_report(&report, &p, ReportFormat::Json).unwrap();
    assert_eq!(read_report(&p).unwrap(), report);

    let empty = ScoreReport::new("judge", ScootConfig::default(), ProtocolKnobs::default());
    write_report(&empty, &p, ReportFormat::Json).unwrap();
    assert_eq!(read_report(&p).unwrap(), empty);
}

#[test]
fn csv_report_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_report(&sample_report(), &a, ReportFormat::Csv).unwrap();
    write_report(&sample_report(), &b, ReportFormat::Csv).unwrap();
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(
        text,
        "item,theta,note\nreference/0.pgm,0.0372916,\nreference/1.pgm,,degenerate ranking\n"
    );
    // no stray temp files next to the report
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn unwritable_destination_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("no/such/dir/r.json");
    match write_report(&sample_report(), &p, ReportFormat::Json) {
        Err(e @ ScootError::Io { .. }) => assert!(e.to_string().contains("r.json")),
        other => panic!("{other:?}"),
    }
}
