//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Every tolerance is pinned here; run with `cargo test --test acceptance`
//! (add `-- --nocapture` to see the per-criterion lines on success).

use spingeo::constructions::candidate_by_name;
use spingeo::dims;
use spingeo::report::Verdict;
use spingeo::suite::{run_suite, SuiteConfig};

fn criterion(n: usize, what: &str, ok: bool) {
    println!(
        "criterion {n} [{}]: {what}",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {what}");
}

/// Assert that every row with one of the given ids passed, and that the
/// tolerance recorded for it is at most `max_tol`.
fn rows_pass(report: &spingeo::report::CheckReport, ids: &[&str], max_tol: f64) -> bool {
    let mut seen = false;
    for row in &report.checks {
        if ids.contains(&row.id) && row.verdict != Verdict::Inapplicable {
            seen = true;
            if row.verdict != Verdict::Pass || row.tolerance > max_tol {
                eprintln!(
                    "row {} ({}) verdict {:?} residual {:.3e} tol {:.1e}",
                    row.id, row.subject, row.verdict, row.max_residual, row.tolerance
                );
                return false;
            }
        }
    }
    seen
}

#[test]
fn acceptance_1_clifford_foundation() {
    let mut cfg = SuiteConfig::new("clifford");
    cfg.samples = 1000;
    let report = run_suite(&cfg).expect("clifford suite runs");
    // Clifford relation, skew-adjointness of vectors and the 2-form product
    // rule hold to 1e-12 on 1000 random inputs in every dimension 2..=8.
    let ok = rows_pass(
        &report,
        &["clifford-relation", "vector-skew", "two-form-action"],
        1e-12,
    ) && report
        .checks
        .iter()
        .filter(|c| c.id == "clifford-relation")
        .count()
        == 7
        && report
            .checks
            .iter()
            .filter(|c| ["clifford-relation", "vector-skew", "two-form-action"].contains(&c.id))
            .all(|c| c.points == 1000);
    criterion(
        1,
        "Clifford relation, skew-adjointness and 2-form product to 1e-12, n = 2..8, 1000 inputs",
        ok,
    );
}

#[test]
fn acceptance_2_s3_construction() {
    let mut cfg = SuiteConfig::new("s3");
    cfg.samples = 200;
    cfg.seed = 7;
    let report = run_suite(&cfg).expect("s3 suite runs");
    let residual_row = report
        .checks
        .iter()
        .find(|c| c.id == "s3-gks-residual")
        .expect("residual row present");
    let ok = residual_row.points == 200
        && residual_row.verdict == Verdict::Pass
        && residual_row.tolerance <= 1e-8
        && rows_pass(&report, &["s3-eigenvalues"], 1e-10)
        // codazzi row records the fraction of points with defect <= 0.1;
        // at most 5% may fall below the threshold
        && rows_pass(&report, &["codazzi-defect"], 0.05);
    criterion(2, "S³ candidate: residual < 1e-8 at 200 points, eigenvalues {1/2, -3/2, -3/2}, Codazzi defect > 0.1", ok);
}

#[test]
fn acceptance_3_identity_suite() {
    let mut cfg = SuiteConfig::new("identities");
    cfg.samples = 100;
    let report = run_suite(&cfg).expect("identities suite runs");
    let ids = ["two", "three1", "three2", "curv2", "two2"];
    let mut ok = rows_pass(&report, &ids, 1e-6);
    // six shipped candidates, five identity rows each, 100 points each
    for id in ids {
        let rows: Vec<_> = report.checks.iter().filter(|c| c.id == id).collect();
        ok &= rows.len() == 6 && rows.iter().all(|r| r.points == 100);
    }
    // the trace relation reproduces the round scalar curvatures exactly
    for (name, scal) in [
        ("s3-gks", 6.0),
        ("killing:s4:+", 12.0),
        ("killing:s5:+", 20.0),
    ] {
        let c = candidate_by_name(name).expect("candidate builds");
        let pts = c.sample(99, 10).expect("sampling");
        for p in &pts {
            let t = c.derived_tensors(&p.coords).expect("tensors");
            let tr_a2 = t.a.matmul(&t.a).trace();
            let value = 4.0 * t.a_trace * t.a_trace - 4.0 * tr_a2;
            ok &= (value - scal).abs() < 1e-7;
        }
    }
    criterion(3, "relations two/three1/three2/curv2/two2 < 1e-6 on all shipped candidates; 4a²-4trA² = 6, 12, 20", ok);
}

#[test]
fn acceptance_4_lichnerowicz() {
    let mut cfg = SuiteConfig::new("identities");
    cfg.samples = 100;
    let report = run_suite(&cfg).expect("identities suite runs");
    let rows: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.id == "lichnerowicz")
        .collect();
    let ok = rows.len() == 6
        && rows
            .iter()
            .all(|r| r.verdict == Verdict::Pass && r.tolerance <= 1e-4);
    criterion(
        4,
        "Lichnerowicz relation residual < 1e-4 on all shipped candidates",
        ok,
    );
}

#[test]
fn acceptance_5_dim2_determinant() {
    let mut cfg = SuiteConfig::new("dim2");
    cfg.samples = 60;
    let report = run_suite(&cfg).expect("dim2 suite runs");
    let mut ok = rows_pass(&report, &["dim2-det"], 1e-5);
    // the unit sphere value is exactly 1/4
    let c = candidate_by_name("restrict:s2").expect("sphere restriction builds");
    for p in c.sample(5, 20).expect("sampling") {
        let a = c.a_at::<f64>(&p.coords);
        let det_a = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        ok &= (4.0 * det_a - 1.0).abs() < 1e-8;
    }
    criterion(
        5,
        "4·det A equals the Gauss curvature to 1e-5 (unit sphere exactly 1) and on the ellipsoid",
        ok,
    );
}

#[test]
fn acceptance_6_dim4_suite() {
    let mut cfg = SuiteConfig::new("dim4");
    cfg.model = Some("killing:s4:+".into());
    cfg.samples = 100;
    let report = run_suite(&cfg).expect("dim4 suite runs");
    let mut ok = rows_pass(&report, &["dh-i", "dh-ii", "dh-iii", "b-xi"], 1e-6)
        && rows_pass(&report, &["delta-h"], 1e-4)
        && rows_pass(&report, &["c-constant"], 1e-6)
        && rows_pass(&report, &["selfdual-blocks"], 1e-8);
    // C vanishes pointwise for the round candidate and the Laplace
    // eigenvalue is 4 = 4(a² - λ) with a = 2, λ = 3
    let c = candidate_by_name("killing:s4:+").expect("candidate builds");
    for p in dims::sample_dim4(&c, 11, 20).expect("sampling") {
        let rec = dims::dim4_invariants(&c, &p.coords).expect("record");
        ok &= rec.c_value.unwrap().abs() < 1e-6;
        ok &= dims::dim4_laplace_eigen_residual(&c, &p.coords).expect("laplace") < 1e-4;
    }
    criterion(6, "dim-4 battery on the round candidate: first-derivative relations 1e-6, Laplace eigenvalue 4 to 1e-4, C = 0, curvature blocks 1e-8", ok);
}

#[test]
fn acceptance_7_dim5_suite() {
    let mut cfg = SuiteConfig::new("dim5");
    cfg.samples = 100;
    let report = run_suite(&cfg).expect("dim5 suite runs");
    let ok = rows_pass(&report, &["deco"], 1e-8)
        && rows_pass(&report, &["t1"], 1e-7)
        && rows_pass(&report, &["nxi"], 1e-6)
        && rows_pass(&report, &["a-squared", "alpha-product"], 1e-8);
    criterion(7, "dim-5 battery on the round candidate: decomposition 1e-8, L² relation 1e-7, ∇ξ = 2LAX 1e-6, 4A²|_D = id and αα₁ = 1/4 to 1e-8", ok);
}

#[test]
fn acceptance_8_negative_control() {
    // Perturbing A of any valid candidate by 0.05·id moves the defining
    // residual to 0.05 ± 1e-6 and at least one identity check fails.
    let mut ok = true;
    for name in ["s3-gks", "killing:s4:+", "restrict:ellipsoid3"] {
        let c = candidate_by_name(name).expect("candidate builds");
        let p = c.with_perturbed_a(0.05);
        let pts = c.sample(13, 20).expect("sampling");
        let mut any_identity_failed = false;
        for pt in &pts {
            let r = p.gks_residual(&pt.coords).expect("residual");
            ok &= (r - 0.05).abs() < 1e-6;
            let l = p.lemma_residuals(&pt.coords).expect("lemma");
            if l.three2 > 1e-6 || l.two > 1e-6 {
                any_identity_failed = true;
            }
        }
        ok &= any_identity_failed;
    }
    criterion(
        8,
        "perturbing A by 0.05·id yields residual 0.05 ± 1e-6 and breaks at least one identity",
        ok,
    );
}

#[test]
fn acceptance_9_determinism() {
    // Two CLI runs of `verify all` with one seed produce byte-identical
    // reports; the library route must agree as well.
    let mut cfg = SuiteConfig::new("all");
    cfg.samples = 25;
    cfg.seed = 7;
    let a = run_suite(&cfg).expect("all suite runs").to_json();
    let b = run_suite(&cfg).expect("all suite runs").to_json();
    let mut ok = a == b && !a.is_empty();

    let exe = env!("CARGO_BIN_EXE_verify");
    let dir = std::env::temp_dir();
    let (p1, p2) = (
        dir.join("spingeo-acc-det-1.json"),
        dir.join("spingeo-acc-det-2.json"),
    );
    for p in [&p1, &p2] {
        let status = std::process::Command::new(exe)
            .args([
                "all",
                "--samples",
                "25",
                "--seed",
                "7",
                "--report",
                p.to_str().unwrap(),
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .expect("verify binary runs");
        ok &= status.success();
    }
    let f1 = std::fs::read(&p1).expect("report 1 written");
    let f2 = std::fs::read(&p2).expect("report 2 written");
    ok &= f1 == f2 && f1 == a.as_bytes();
    let _ = std::fs::remove_file(&p1);
    let _ = std::fs::remove_file(&p2);
    criterion(
        9,
        "two runs of `verify all` with the same seed produce byte-identical reports",
        ok,
    );
}
