//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use schreier_growth::experiment::{
    self, cd_growth_suite, faithfulness_suite, free_product_probe_suite, gluing_growth_suite,
    grigorchuk_displacement_sweep, grigorchuk_structure_suite, houghton_pair_suite,
    houghton_vol_suite, lamplighter_growth, lamplighter_suite, partition_condition_suite,
    run_experiment, CheckResult, ExperimentConfig, ExperimentKind,
};
use schreier_growth::growth::fit_exponent;

fn report(criterion: &str, started: Instant, checks: &[CheckResult]) {
    let passed = checks.iter().all(|c| c.passed);
    let line = format!(
        "{} {criterion} [{:.1}s]",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    println!("{line}");
    for c in checks {
        if !c.passed {
            println!("    {}: {}", c.name, c.detail);
        }
    }
    assert!(passed, "{criterion} failed: {checks:?}");
}

/// Criterion 1: level graph structure for all n <= 12, exact.
#[test]
fn criterion_1_grigorchuk_structure() {
    let started = Instant::now();
    let checks = grigorchuk_structure_suite(12);
    report("1 grigorchuk-structure", started, &checks);
}

/// Criterion 2: displacement witnesses for every nontrivial word of length
/// at most 6, at the 1/8 constant, within 12 levels.
#[test]
fn criterion_2_grigorchuk_displacement() {
    let started = Instant::now();
    let (rows, checks) = grigorchuk_displacement_sweep(6, 12);
    assert!(rows.iter().all(|r| 8 * r.displacement >= r.diameter));
    assert!(rows.iter().all(|r| r.level <= 12));
    report("2 grigorchuk-displacement", started, &checks);
}

/// Criterion 3: 200 seeded gluings of finite pieces respect the
/// `(2n+1)·f(n)` ball bound exactly up to radius 64.
#[test]
fn criterion_3_gluing_growth_bound() {
    let started = Instant::now();
    let checks = gluing_growth_suite(42, 200, 6, 256, 64).unwrap();
    report("3 gluing-growth-bound", started, &checks);
}

/// Criterion 4: diametrally marked gluings of linear pieces have fitted
/// exponent at most 1.25 over radii [16, 256].
#[test]
fn criterion_4_cd_gluing_growth() {
    let started = Instant::now();
    let checks = cd_growth_suite(43, 20, 24, 256, 256).unwrap();
    report("4 cd-gluing-growth", started, &checks);
}

/// Criterion 5: 500 seeded nontrivial graph-product words move `e_1` on
/// their witness gluing, exactly.
#[test]
fn criterion_5_faithfulness() {
    let started = Instant::now();
    let checks = faithfulness_suite(44, 500).unwrap();
    report("5 faithfulness", started, &checks);
}

/// Criterion 6: coset space sizes and structure, plus the frozen
/// controlled-diameter ratio over all elements of word length at most 8.
#[test]
fn criterion_6_lamplighter() {
    let started = Instant::now();
    let mut checks = Vec::new();
    let (_, suite) = lamplighter_suite(2, 1, 8, &[2, 3, 4, 5, 6, 8]).unwrap();
    checks.extend(suite);
    let (_, suite) = lamplighter_suite(3, 1, 8, &[2, 3, 4]).unwrap();
    checks.extend(suite);
    report("6 lamplighter", started, &checks);
}

/// Criterion 7: Houghton linear growth (exact, n <= 1000) and the quadratic
/// pair-action counts with slope at least 1.8.
#[test]
fn criterion_7_houghton() {
    let started = Instant::now();
    let mut checks = Vec::new();
    let (table, suite) = houghton_vol_suite(1000).unwrap();
    assert!((0..=1000).all(|n| table.get(n).unwrap() <= 2 * n as u64 + 1));
    checks.extend(suite);
    let (counts, suite) = houghton_pair_suite(64).unwrap();
    assert!(counts
        .iter()
        .all(|(n, c)| *c >= ((*n as usize + 1) * (*n as usize + 1))));
    checks.extend(suite);
    report("7 houghton", started, &checks);
}

/// Criterion 8: sparse-support certificates for H_2 * Z over
/// R in {16, 24, 32, 48, 64}: slope at least 1.7 and every certificate
/// bounded by the direct BFS count.
#[test]
fn criterion_8_quadratic_mechanism() {
    let started = Instant::now();
    let (reports, checks) = free_product_probe_suite(&[16, 24, 32, 48, 64], 2_000_000).unwrap();
    for rep in &reports {
        let direct = rep.certificate.direct_count.expect("direct count affordable");
        assert!(rep.certificate.certified_count <= direct);
    }
    report("8 quadratic-mechanism", started, &checks);
}

/// Criterion 9: condition (1) holds for n^alpha, alpha in {1, 1.5, 2}, and
/// fails with a witness tuple for sqrt under candidates up to 64.
#[test]
fn criterion_9_partition_condition() {
    let started = Instant::now();
    let checks = partition_condition_suite(45).unwrap();
    report("9 partition-condition", started, &checks);
}

/// Criterion 10: identical (config, seed) re-runs produce byte-identical
/// artifacts, CSVs carry headers, and JSON artifacts embed the digest.
#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    let temp = tempfile::tempdir().unwrap();
    let kinds = vec![
        ExperimentKind::VerifyGrigorchuk { max_level: 6, max_word: 4 },
        ExperimentKind::GrowthLamplighter { p: 2, d: 1, m_max: 32, n_max: 32 },
        ExperimentKind::ProbeFreeProduct {
            left: "houghton2".into(),
            right: "Z".into(),
            r_list: vec![8, 16],
        },
    ];
    let mut checks = Vec::new();
    for (idx, kind) in kinds.into_iter().enumerate() {
        let mut artifacts: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
        let mut digest = String::new();
        for run in 0..2 {
            let out_dir = temp.path().join(format!("k{idx}-run{run}"));
            let config = ExperimentConfig {
                kind: kind.clone(),
                seed: 7,
                jobs: 1,
                out_dir: out_dir.clone(),
            };
            digest = config.digest();
            let outcome = run_experiment(&config).unwrap();
            let mut files: Vec<(String, Vec<u8>)> = outcome
                .artifacts
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(p).unwrap(),
                    )
                })
                .collect();
            files.sort();
            artifacts.push(files);
        }
        let identical = artifacts[0] == artifacts[1];
        checks.push(CheckResult::of(
            &format!("byte-identical-{idx}"),
            identical,
            "same (config, seed) twice".into(),
        ));
        for (name, bytes) in &artifacts[0] {
            if name.ends_with(".csv") {
                let text = String::from_utf8_lossy(bytes);
                let has_header = text
                    .lines()
                    .next()
                    .is_some_and(|h| h.chars().any(|c| c.is_ascii_alphabetic()));
                checks.push(CheckResult::of(
                    &format!("csv-header-{name}"),
                    has_header,
                    "header row present".into(),
                ));
            }
            if name.ends_with(".json") {
                let value: serde_json::Value = serde_json::from_slice(bytes).unwrap();
                let embedded = value.get("config_digest").and_then(|v| v.as_str());
                checks.push(CheckResult::of(
                    &format!("json-digest-{name}"),
                    embedded == Some(digest.as_str()),
                    "config digest embedded".into(),
                ));
            }
        }
    }
    report("10 determinism", started, &checks);
}

/// The growth tables behind criterion 6's family: measured exponent within
/// 0.15 of d for p = 2, d in {1, 2}.
#[test]
fn lamplighter_family_exponents() {
    let started = Instant::now();
    let mut checks = Vec::new();
    for (d, m_max) in [(1u8, 128u64), (2, 128)] {
        let table = lamplighter_growth(2, d, m_max, 64).unwrap();
        let fit = fit_exponent(&table, 8, 64).unwrap();
        checks.push(experiment::CheckResult::of(
            &format!("exponent-d{d}"),
            (fit.slope - d as f64).abs() <= 0.15,
            format!("slope {:.3}", fit.slope),
        ));
    }
    report("aux lamplighter-exponents", started, &checks);
}
