//! Golden-file tests for the binary. Set `LIESYM_UPDATE_GOLDEN=1` to rewrite
//! the expected files after an intended output change.

use std::path::PathBuf;
use std::process::Command;

const SUBCOMMANDS: [&str; 8] = [
    "symmetries",
    "bracket-table",
    "algebra-structure",
    "adjoint",
    "optimal-system",
    "verify-solution",
    "reduce",
    "reproduce-paper",
];

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn liesym(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_liesym")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

/// Compares `exit code + stdout` with the stored file.
fn check(name: &str, args: &[&str], expect_code: i32) {
    let run = liesym(args);
    assert_eq!(run.code, expect_code, "{name}: exit code, stderr:\n{}", run.stderr);
    let actual = format!("$ liesym {}\n[exit {}]\n{}", args.join(" "), run.code, run.stdout);
    let path = golden_path(name);
    if std::env::var_os("LIESYM_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(actual, expected, "{name} differs from {}", path.display());
}

#[test]
fn help_texts() {
    check("help", &["--help"], 0);
    for sub in SUBCOMMANDS {
        check(&format!("help-{sub}"), &[sub, "--help"], 0);
    }
}

#[test]
fn symmetries_golden() {
    check("symmetries-table", &["symmetries", "--format", "table"], 0);
    check("symmetries-determining", &["symmetries", "--emit", "determining", "--format", "table"], 0);
    check("symmetries-degree-1-all", &["symmetries", "--ansatz-degree", "1", "--emit", "all"], 0);
}

#[test]
fn symmetries_of_pde_file() {
    let pde = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/borninfeld.pde");
    let run = liesym(&["symmetries", "--pde", pde, "--strict"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["dimension"], 7);
}

#[test]
fn algebra_golden() {
    check("bracket-table", &["bracket-table", "--format", "table"], 0);
    check("bracket-table-json", &["bracket-table"], 0);
    check("algebra-structure", &["algebra-structure", "--format", "table"], 0);
    check("algebra-structure-json", &["algebra-structure"], 0);
}

#[test]
fn adjoint_golden() {
    check("adjoint-identity", &["adjoint", "--generator", "7", "--epsilon", "0", "--format", "table"], 0);
    check("adjoint-m6", &["adjoint", "--generator", "6", "--epsilon", "0.3", "--format", "table"], 0);
    check("adjoint-m1-json", &["adjoint", "--generator", "1", "--epsilon", "-1.1"], 0);
}

#[test]
fn adjoint_identity_at_zero() {
    let run = liesym(&["adjoint", "--generator", "7", "--epsilon", "0"]);
    let v: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    for (i, row) in v["rows"].as_array().unwrap().iter().enumerate() {
        for (j, e) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(e.as_f64().unwrap(), if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn optimal_system_golden() {
    check("optimal-system", &["optimal-system", "--format", "table"], 0);
    check("optimal-system-vet", &["optimal-system", "--vet", "--format", "table", "--seed", "3"], 0);
    // the list has conjugate members, so strict vetting fails
    assert_eq!(liesym(&["optimal-system", "--vet", "--strict"]).code, 1);
}

#[test]
fn verify_solution_golden() {
    check(
        "verify-solution-cone",
        &["verify-solution", "--solution", "sqrt(t^2 - x^2)", "--format", "table"],
        0,
    );
    check(
        "verify-solution-params",
        &["verify-solution", "--solution", "c1*x + c2*t", "--param", "c1=0.3", "--param", "c2=-0.2", "--format", "table"],
        0,
    );
    check(
        "verify-solution-not-a-solution",
        &["verify-solution", "--solution", "x^2", "--strict", "--grid", "x=-1:1:5,t=0:1:5", "--format", "table"],
        1,
    );
}

#[test]
fn reduce_golden() {
    check("reduce-v7", &["reduce", "--generator", "v7", "--format", "table"], 0);
    check("reduce-v5-json", &["reduce", "--generator", "v5"], 0);
}

#[test]
fn reproduce_paper_golden() {
    check("reproduce-paper", &["reproduce-paper", "--format", "table", "--seed", "1"], 0);
}

#[test]
fn reproduce_paper_out_file_and_strict() {
    let dir = std::env::temp_dir().join(format!("liesym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let run = liesym(&["reproduce-paper", "--out", path.to_str().unwrap(), "--strict"]);
    // two published claims are refuted, so strict mode reports them
    assert_eq!(run.code, 1, "{}", run.stderr);
    assert!(run.stdout.is_empty());
    assert!(run.stderr.contains("claims"));
    let claims: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(claims.as_array().unwrap().len() >= 20);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["adjoint", "--generator", "9", "--epsilon", "1"],
        vec!["adjoint", "--epsilon", "1"],
        vec!["verify-solution", "--solution", "u_x"],
        vec!["verify-solution", "--solution", "x", "--grid", "x=0:1"],
        vec!["reduce", "--generator", "v3"],
        vec!["symmetries", "--pde", "/nonexistent.pde"],
        vec!["bracket-table", "--format", "yaml"],
    ] {
        let run = liesym(&args);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stderr);
        assert!(run.stdout.is_empty(), "{args:?}");
    }
}
