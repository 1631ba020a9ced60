//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line with the measured detail. Criteria 1–11 call the
//! library's verification checks directly; criterion 12 runs the installed
//! `catcmc verify` binary twice and compares artifacts byte for byte.

use catcmc::verify;

fn assert_check(n: usize, result: catcmc::Result<verify::CheckResult>) {
    let check = result.unwrap_or_else(|e| panic!("criterion {n}: errored: {e}"));
    println!(
        "criterion {:>2} [{}]: {} — {}",
        n,
        check.name,
        if check.passed { "PASS" } else { "FAIL" },
        check.detail
    );
    assert!(check.passed, "criterion {n} failed: {}", check.detail);
}

#[test]
fn acceptance_01_catenoid_minimality() {
    assert_check(1, verify::check_minimality());
}

#[test]
fn acceptance_02_jacobi_field_kernel() {
    assert_check(2, verify::check_jacobi_kernel());
}

#[test]
fn acceptance_03_linearization_consistency() {
    assert_check(3, verify::check_linearization());
}

#[test]
fn acceptance_04_mode_preservation() {
    assert_check(4, verify::check_mode_preservation());
}

#[test]
fn acceptance_05_singular_length() {
    assert_check(5, verify::check_singular_length());
}

#[test]
fn acceptance_06_uniform_invertibility() {
    assert_check(6, verify::check_uniform_invertibility());
}

#[test]
fn acceptance_07_nonlinear_solve() {
    assert_check(7, verify::check_nonlinear_solve());
}

#[test]
fn acceptance_08_disk_oracle() {
    assert_check(8, verify::check_disk_oracle());
}

#[test]
fn acceptance_09_improved_decay() {
    assert_check(9, verify::check_improved_decay());
}

#[test]
fn acceptance_10_tau_continuity() {
    assert_check(10, verify::check_continuity());
}

#[test]
fn acceptance_11_derivative_limit() {
    assert_check(11, verify::check_derivative_limit());
}

#[test]
fn acceptance_12_deterministic_reports() {
    let bin = env!("CARGO_BIN_EXE_catcmc");
    let base = std::env::temp_dir().join(format!("catcmc-acceptance-{}", std::process::id()));
    let run = |dir: &std::path::Path| {
        let out = std::process::Command::new(bin)
            .args(["verify", "--suite", "all", "--out-dir"])
            .arg(dir)
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "verify run failed (status {:?}):\n{}{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        (
            std::fs::read(dir.join("report.json")).expect("report written"),
            std::fs::read(dir.join("verify.csv")).expect("table written"),
        )
    };
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    let (report_a, csv_a) = run(&dir_a);
    let (report_b, csv_b) = run(&dir_b);
    let identical = report_a == report_b && csv_a == csv_b;
    println!(
        "criterion 12 [determinism]: {} — two `verify --suite all` runs, report.json {} bytes, \
         verify.csv {} bytes, byte-identical = {}",
        if identical { "PASS" } else { "FAIL" },
        report_a.len(),
        csv_a.len(),
        identical
    );
    std::fs::remove_dir_all(&base).ok();
    assert!(identical, "verify artifacts differ between identical runs");
}
