//! End-to-end command tests: exit codes, file round trips, and the
//! reference-example and experiment commands.

use std::path::Path;
use std::process::{Command, Output};

use eindrazin::io::{read_tensor, render_tensor, write_tensor, AnyTensor};
use eindrazin::modified::{generate_instance, Formula, InstanceKind};
use eindrazin::reference;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eindrazin"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn write_reference_files(dir: &Path) -> [String; 4] {
    let p = reference::problem();
    let paths = ["a", "b", "c", "d"].map(|n| dir.join(format!("{n}.tensor")));
    write_tensor(&paths[0], &AnyTensor::Rational(p.a().clone())).unwrap();
    write_tensor(&paths[1], &AnyTensor::Rational(p.b().clone())).unwrap();
    write_tensor(&paths[2], &AnyTensor::Rational(p.c().clone())).unwrap();
    write_tensor(&paths[3], &AnyTensor::Rational(p.d().clone())).unwrap();
    paths.map(|p| p.display().to_string())
}

#[test]
fn example_command_verifies_and_exits_zero() {
    let out = run(&["example"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("0 mismatches"), "{stdout}");
    assert!(stdout.contains("perturbation bound"), "{stdout}");
}

#[test]
fn drazin_command_writes_reparseable_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.tensor");
    write_tensor(&input, &AnyTensor::Rational(reference::tensor_a())).unwrap();
    let output = dir.path().join("ad.tensor");
    let out = run(&[
        "drazin",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("index: 1"), "{stdout}");
    let written = read_tensor(&output).unwrap();
    assert_eq!(written, AnyTensor::Rational(reference::expected_a_drazin()));
    // bit-identical round trip of what the command wrote
    let again = render_tensor(&written);
    assert_eq!(read_tensor(&output).unwrap(), eindrazin::io::parse_tensor(&again).unwrap());
}

#[test]
fn drazin_command_on_identity_and_nilpotent() {
    let dir = tempfile::tempdir().unwrap();
    let ident = dir.path().join("i.tensor");
    std::fs::write(
        &ident,
        r#"{"row_dims":[2],"col_dims":[2],"domain":"rational","entries":["1","0","0","1"]}"#,
    )
    .unwrap();
    let out = run(&["drazin", ident.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("index: 0"));

    let nilp = dir.path().join("n.tensor");
    std::fs::write(
        &nilp,
        r#"{"row_dims":[2],"col_dims":[2],"domain":"rational","entries":["0","1","0","0"]}"#,
    )
    .unwrap();
    let outfile = dir.path().join("nd.tensor");
    let out = run(&["drazin", nilp.to_str().unwrap(), "--out", outfile.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("index: 2"));
    match read_tensor(&outfile).unwrap() {
        AnyTensor::Rational(t) => assert!(t.is_zero()),
        other => panic!("unexpected domain {other:?}"),
    }
}

#[test]
fn modified_command_reproduces_the_reference_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b, c, d] = write_reference_files(dir.path());
    let outfile = dir.path().join("sd.tensor");
    let out = run(&[
        "modified", "--a", &a, "--b", &b, "--c", &c, "--d", &d,
        "--formula", "thm33a", "--out", outfile.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let written = read_tensor(&outfile).unwrap();
    assert_eq!(written, AnyTensor::Rational(reference::expected_s_drazin()));
}

#[test]
fn modified_command_exit_2_on_hypothesis_violation() {
    let dir = tempfile::tempdir().unwrap();
    // a dense random quadruple violating the nilpotent-family hypotheses
    let p = generate_instance(InstanceKind::Violating(Formula::Thm31a), &[2, 2], &[2], 3).unwrap();
    let paths = ["a", "b", "c", "d"].map(|n| dir.path().join(format!("{n}.tensor")));
    write_tensor(&paths[0], &AnyTensor::Rational(p.a().clone())).unwrap();
    write_tensor(&paths[1], &AnyTensor::Rational(p.b().clone())).unwrap();
    write_tensor(&paths[2], &AnyTensor::Rational(p.c().clone())).unwrap();
    write_tensor(&paths[3], &AnyTensor::Rational(p.d().clone())).unwrap();
    let out = run(&[
        "modified",
        "--a", paths[0].to_str().unwrap(),
        "--b", paths[1].to_str().unwrap(),
        "--c", paths[2].to_str().unwrap(),
        "--d", paths[3].to_str().unwrap(),
        "--formula", "thm31a",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("hypothesis"), "{stderr}");
}

#[test]
fn modified_command_auto_falls_back_to_direct() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate_instance(InstanceKind::Violating(Formula::Thm31a), &[2, 2], &[2], 5).unwrap();
    let paths = ["a", "b", "c", "d"].map(|n| dir.path().join(format!("{n}.tensor")));
    write_tensor(&paths[0], &AnyTensor::Rational(p.a().clone())).unwrap();
    write_tensor(&paths[1], &AnyTensor::Rational(p.b().clone())).unwrap();
    write_tensor(&paths[2], &AnyTensor::Rational(p.c().clone())).unwrap();
    write_tensor(&paths[3], &AnyTensor::Rational(p.d().clone())).unwrap();
    let outfile = dir.path().join("sd.tensor");
    let out = run(&[
        "modified",
        "--a", paths[0].to_str().unwrap(),
        "--b", paths[1].to_str().unwrap(),
        "--c", paths[2].to_str().unwrap(),
        "--d", paths[3].to_str().unwrap(),
        "--out", outfile.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    // dense instances may still admit some formula; assert the command
    // succeeds and verifies whatever path it took
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("auto:"), "{stdout}");
    assert!(stdout.contains("computed S^D via"), "{stdout}");
}

#[test]
fn check_command_reports_applicability() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b, c, d] = write_reference_files(dir.path());
    let out = run(&["check", "--a", &a, "--b", &b, "--c", &c, "--d", &d]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("thm33a"), "{stdout}");
    assert!(stdout.contains("ind(A)"), "{stdout}");
    assert!(stdout.contains("auto would select"), "{stdout}");
}

#[test]
fn check_command_with_zero_b_reports_dual_side() {
    let dir = tempfile::tempdir().unwrap();
    let [a, _, c, d] = write_reference_files(dir.path());
    let b0 = dir.path().join("b0.tensor");
    std::fs::write(
        &b0,
        r#"{"row_dims":[3,2],"col_dims":[2,3],"domain":"rational","entries":[]}"#,
    )
    .unwrap();
    let out = run(&["check", "--a", &a, "--b", b0.to_str().unwrap(), "--c", &c, "--d", &d]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    // with B = 0 every dual condition holds (R = 0)
    assert!(stdout.contains("dual21a"), "{stdout}");
    assert!(stdout.contains("dual24"), "{stdout}");
}

#[test]
fn parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tensor");
    std::fs::write(&bad, "not json").unwrap();
    let out = run(&["drazin", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("nope.tensor");
    let out = run(&["drazin", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // shape error: non-square input to drazin
    let rect = dir.path().join("rect.tensor");
    std::fs::write(
        &rect,
        r#"{"row_dims":[2],"col_dims":[3],"domain":"rational","entries":["1","0","0","0","1","0"]}"#,
    )
    .unwrap();
    let out = run(&["drazin", rect.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_formula_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b, c, d] = write_reference_files(dir.path());
    let out = run(&[
        "modified", "--a", &a, "--b", &b, "--c", &c, "--d", &d, "--formula", "thm99x",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn perturb_structured_output_is_csv() {
    let out = run(&["perturb", "--trials", "2", "--seed", "7", "--epsilons", "10,0.001", "--report", "structured"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,method,r1,r2,r3,trials,skipped");
    let data: Vec<&str> = lines.collect();
    assert_eq!(data.len(), 4, "{stdout}"); // 2 epsilons x 2 methods
    for line in &data {
        assert_eq!(line.split(',').count(), 7, "{line}");
    }
}

#[test]
fn perturb_is_deterministic_in_seed() {
    let one = run(&["perturb", "--trials", "3", "--seed", "11", "--epsilons", "0.1"]);
    let two = run(&["perturb", "--trials", "3", "--seed", "11", "--epsilons", "0.1"]);
    assert_eq!(one.stdout, two.stdout);
    let other = run(&["perturb", "--trials", "3", "--seed", "12", "--epsilons", "0.1"]);
    assert_ne!(one.stdout, other.stdout);
}

#[test]
fn float64_domain_flag_runs_the_same_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b, c, d] = write_reference_files(dir.path());
    let outfile = dir.path().join("sd_f64.tensor");
    let out = run(&[
        "modified", "--a", &a, "--b", &b, "--c", &c, "--d", &d,
        "--domain", "float64", "--formula", "thm33a", "--out", outfile.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    match read_tensor(&outfile).unwrap() {
        AnyTensor::Float64(t) => {
            let expected = reference::expected_s_drazin().to_float64();
            for (got, want) in t.entries().iter().zip(expected.entries()) {
                assert!((got - want).abs() <= 1e-13, "{got} vs {want}");
            }
        }
        other => panic!("expected float64 output, got {other:?}"),
    }
}
