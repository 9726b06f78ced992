//! Black-box tests of the binary: exit codes, output shapes, frozen CSV
//! columns.

use std::process::{Command, Output};

fn seqwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqwit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn state_info_reports_the_boundary_state() {
    let out = seqwit(&[
        "state-info",
        "--theta",
        "0.7853981633974483",
        "--alpha",
        "1.0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("entangled: yes"), "{text}");
    assert!(text.contains("local: yes"), "{text}");
    assert!(text.contains("psd: yes"), "{text}");
}

#[test]
fn state_info_json_is_machine_readable() {
    let out = seqwit(&[
        "state-info",
        "--theta",
        "0.1",
        "--alpha",
        "1.0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for key in [
        "\"theta\"",
        "\"ppt_min\"",
        "\"chsh_value\"",
        "\"is_local\"",
        "\"is_psd\"",
        "\"t_diag\"",
    ] {
        assert!(text.contains(key), "missing {key} in {text}");
    }
    assert_eq!(text.matches('{').count(), text.matches('}').count());
}

#[test]
fn parameter_violations_exit_2_and_name_the_window() {
    // alpha below the entanglement bound (1 - cos 0.1)/(2 sin 0.1) ~ 0.025.
    let out = seqwit(&["state-info", "--theta", "0.1", "--alpha", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("entanglement window"), "{err}");

    // theta = 0 sits outside the open interval.
    let out = seqwit(&["state-info", "--theta", "0", "--alpha", "1.0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = seqwit(&[
        "sequence",
        "--theta",
        "0.9",
        "--alpha",
        "1.0",
        "--epsilon",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn asymmetric_state_rejects_non_positive_spectra() {
    // (theta, alpha, beta) = (0.1, 1, 0.9) has min eigenvalue ~ -1.2e-3.
    let out = seqwit(&[
        "state-info",
        "--theta",
        "0.1",
        "--alpha",
        "1.0",
        "--beta",
        "0.9",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("positive semidefinite"), "{err}");

    // A nearby PSD point reports normally.
    let out = seqwit(&[
        "state-info",
        "--theta",
        "0.1",
        "--alpha",
        "1.0",
        "--beta",
        "0.96",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("psd: yes"));
}

#[test]
fn sequence_rows_and_summary() {
    let out = seqwit(&[
        "sequence",
        "--theta",
        "0.1",
        "--alpha",
        "1",
        "--epsilon",
        "0.01",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n_bobs = 5"), "{text}");
    assert!(text.contains("escaped_unit_interval"), "{text}");
    // Larger theta never yields more Bobs.
    let wide = seqwit(&[
        "sequence",
        "--theta",
        "0.7853981633974483",
        "--alpha",
        "1",
        "--epsilon",
        "0.01",
    ]);
    assert!(stdout(&wide).contains("n_bobs = 3"));
}

#[test]
fn sweep_csv_header_is_frozen() {
    let out = seqwit(&["sweep", "--theta-steps", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "theta,alpha,epsilon,n_bobs,lambda_first,lambda_last,chsh_initial,ppt_min_initial,status"
    );
    // 3 thetas x 3 default epsilons.
    assert_eq!(text.lines().count(), 1 + 9);
    assert!(text.ends_with('\n'));
}

#[test]
fn sweep_marks_out_of_window_points_instead_of_aborting() {
    // alpha = 0.023 is inside the window for theta = 0.05 but below the
    // bound for larger thetas; those rows carry status=invalid_params.
    let out = seqwit(&[
        "sweep",
        "--theta-min",
        "0.05",
        "--theta-max",
        "0.7",
        "--theta-steps",
        "4",
        "--alpha",
        "0.023",
        "--epsilons",
        "0.01",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains(",ok\n"), "{text}");
    assert!(text.contains(",invalid_params\n"), "{text}");
    for line in text.lines().skip(1) {
        if line.contains("invalid_params") {
            assert!(line.contains(",0,NaN,NaN,"), "{line}");
        }
    }
}

#[test]
fn sweep_rows_are_ordered_by_epsilon_then_theta() {
    let out = seqwit(&[
        "sweep",
        "--theta-steps",
        "3",
        "--epsilons",
        "0.1,0.001,0.01",
    ]);
    let text = stdout(&out);
    let mut keys = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let theta: f64 = fields[0].parse().unwrap();
        let epsilon: f64 = fields[2].parse().unwrap();
        keys.push((epsilon, theta));
    }
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn verify_passes_with_default_seed_and_small_samples() {
    let out = seqwit(&["verify", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches(" pass ").count(), 5, "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn verify_with_zero_samples_warns_and_passes() {
    let out = seqwit(&["verify", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("warning"), "{text}");
    assert!(text.contains("vacuous"), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    let out = seqwit(&["sweep", "--theta-steps", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown flags go through clap, which also exits 2.
    let out = seqwit(&["sweep", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}
