//! End-to-end checks against the built `casimir` binary: deterministic
//! output, complete validation reports, and exit-code contracts.

use std::path::Path;
use std::process::{Command, Output};

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .output()
        .expect("failed to launch casimir")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const COMPARE_SPEC: &str = "\
[sweep]
route = compare
tol = 1e-8
format = csv

[grid]
gap_m = range(1e-7, 1e-5, 3, log)
temperature_K = 0

[material.left]
model = mirror

[material.right]
model = mirror

[toy]
n_sites = 64
spacing_m = 1e-8
separations = 8, 16, 32
";

#[test]
fn criterion_8_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "compare.cfg", COMPARE_SPEC);

    // Repeated runs of the same spec must agree byte for byte, despite the
    // parallel worker pool.
    let first = casimir(&["compare", "--config", &spec]);
    assert!(first.status.success(), "{first:?}");
    let mut deterministic = true;
    for _ in 0..2 {
        let again = casimir(&["compare", "--config", &spec]);
        deterministic &= again.status.success() && again.stdout == first.stdout;
    }

    // A spec with several independent mistakes: validate must report every
    // one of them, not just the first, and exit with the config code.
    let broken = write_spec(
        dir.path(),
        "broken.cfg",
        "\
[sweep]
tol = -3
format = yaml

[grid]
gap_m = -1e-6
temperature_K = -10

[material.left]
model = unobtainium

[material.right]
model = mirror
glossy = very

[typo]
x = 1
",
    );
    let v = casimir(&["validate", "--config", &broken]);
    let stderr = String::from_utf8_lossy(&v.stderr);
    let mut all_reported = v.status.code() == Some(2);
    for needle in [
        "tol must be > 0",
        "expected csv or json",
        "gaps must be positive",
        "temperatures must be >= 0",
        "unknown model \"unobtainium\"",
        "unknown key \"glossy\"",
        "unknown section [typo]",
    ] {
        all_reported &= stderr.contains(needle);
    }

    let pass = deterministic && all_reported;
    println!(
        "criterion 8 (CLI determinism and validation): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(deterministic, "outputs differed between runs");
    assert!(all_reported, "validate missed a seeded error:\n{stderr}");
}

#[test]
fn lifshitz_csv_has_the_contracted_columns_and_value() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "mirror.cfg",
        "\
[sweep]
tol = 1e-8

[grid]
gap_m = 1e-6

[material.left]
model = mirror

[material.right]
model = mirror
",
    );
    let out = casimir(&["lifshitz", "--config", &spec]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "route,d_m,T_K,model_left,model_right,pressure_Pa,energy_Jm2,err_est,matsubara_n_used"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "lifshitz");
    assert_eq!(fields[3], "perfect_mirror");
    let pressure: f64 = fields[5].parse().unwrap();
    assert!((pressure + 1.300e-3).abs() / 1.300e-3 < 1e-3, "{pressure}");
    // 17 significant digits in scientific notation.
    assert!(fields[1].contains("e-"), "{}", fields[1]);
    assert_eq!(fields[1].split('e').next().unwrap().len(), "1.0000000000000000".len());
}

#[test]
fn overrides_and_output_file_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "toy.cfg",
        "\
[toy]
n_sites = 64
spacing_m = 1e-9
separations = 4, 8
",
    );
    let out_path = dir.path().join("rows.json");
    let out = casimir(&[
        "toy",
        "--config",
        &spec,
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
        "--set",
        "toy.separations=6",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["separation_sites"], 6);
    assert!(rows[0]["force_N"].as_f64().unwrap() < 0.0);
}

#[test]
fn missing_config_file_exits_with_config_code() {
    let out = casimir(&["lifshitz", "--config", "/no/such/spec.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn valid_spec_validates_quietly() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "good.cfg", COMPARE_SPEC);
    let out = casimir(&["validate", "--config", &spec]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("ok: compare route, 3 grid points"), "{stdout}");
}
