use std::process::{Command, Output};

use coefring::charspace::GroupContext;
use coefring::phi::{verify_phi, PhiReport};
use coefring::rograde::LocalizationReport;
use coefring::series::HilbertSeries;

fn coefring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coefring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn series_prints_coefficients() {
    let out = coefring(&["series", "--p", "3", "--n", "2", "--cutoff", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1,4,7,10,13,16\n");
}

#[test]
fn rank_one_verifies() {
    let out = coefring(&["phi-verify", "--p", "3", "--n", "1", "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("source,0,1,2,3,4,5,6,7,8\n"));
    assert!(text.contains("agree,1,1,1,1,1,1,1,1,1\n"));
    assert!(stderr(&out).is_empty());
}

#[test]
fn verbatim_fails_with_named_weight() {
    let out = coefring(&[
        "phi-verify",
        "--p",
        "3",
        "--n",
        "2",
        "--verbatim",
        "--cutoff",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("mismatch at weight 1: closed-form 4, presentation 8, oracle 4"));
}

#[test]
fn usage_errors_exit_2() {
    for (args, field) in [
        (&["series", "--p", "9", "--n", "2"][..], "--p"),
        (&["series", "--p", "3", "--n", "17"][..], "--n"),
        (
            &["localize", "--p", "3", "--n", "2", "--line", "1,x"][..],
            "--line",
        ),
        (
            &["localize", "--p", "3", "--n", "2", "--line", "0,0"][..],
            "--line",
        ),
        (
            &[
                "ro-dim", "--p", "3", "--n", "2", "--irrep", "1,0", "--k", "1",
            ][..],
            "--irrep",
        ),
        (&["localize", "--p", "3", "--n", "2"][..], "--line"),
    ] {
        let out = coefring(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(field), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn budget_is_configurable() {
    let out = Command::new(env!("CARGO_BIN_EXE_coefring"))
        .args(["phi-verify", "--p", "3", "--n", "3", "--cutoff", "6"])
        .env("COEFRING_MAX_COLUMNS", "500")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("estimated") && err.contains("budget of 500"),
        "{err}"
    );
}

#[test]
fn phi_report_round_trips() {
    let out = coefring(&[
        "phi-verify",
        "--p",
        "5",
        "--n",
        "2",
        "--cutoff",
        "4",
        "--format",
        "json",
    ]);
    let parsed: PhiReport = serde_json::from_str(&stdout(&out)).unwrap();
    let direct = verify_phi(&GroupContext::new(5, 2).unwrap(), 4, false).unwrap();
    assert_eq!(parsed, direct);
    assert_eq!(
        serde_json::to_string_pretty(&parsed).unwrap() + "\n",
        stdout(&out)
    );
}

#[test]
fn series_json_round_trips() {
    let out = coefring(&[
        "series", "--p", "3", "--n", "3", "--cutoff", "3", "--format", "json",
    ]);
    let parsed: HilbertSeries = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.coeffs, [1, 13, 52, 118]);
}

#[test]
fn localize_with_lines() {
    let out = coefring(&[
        "localize", "--p", "3", "--n", "2", "--line", "1,0", "--line", "0,2", "--cutoff", "4",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<LocalizationReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].oracle.coeffs, [1, 2, 3, 4, 5]);
    assert!(reports[0].all_equal());
}

#[test]
fn localize_reports_circuit_mismatch() {
    // Four lines of F_3^3 with every three independent.
    let out = coefring(&[
        "localize", "--p", "3", "--n", "3", "--line", "1,0,0", "--line", "0,1,0", "--line",
        "0,0,1", "--line", "1,1,1", "--cutoff", "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("weight 3"), "{}", stderr(&out));
}

#[test]
fn relation_check_passes() {
    let out = coefring(&["relation-check", "--p", "5", "--n", "2", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 100 + 50);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1")));
}

#[test]
fn seeds_change_random_output() {
    let a = coefring(&[
        "localize", "--p", "3", "--n", "3", "--random", "5", "--seed", "1", "--cutoff", "2",
    ]);
    let b = coefring(&[
        "localize", "--p", "3", "--n", "3", "--random", "5", "--seed", "2", "--cutoff", "2",
    ]);
    let a2 = coefring(&[
        "localize", "--p", "3", "--n", "3", "--random", "5", "--seed", "1", "--cutoff", "2",
    ]);
    assert_eq!(a.stdout, a2.stdout);
    assert_ne!(a.stdout, b.stdout);
}
