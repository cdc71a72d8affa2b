use std::path::PathBuf;
use std::process::{Command, Output};

fn latcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latcov"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("spawn latcov")
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("latcov-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn square_np2_ratio_is_two() {
    let o = latcov(&[
        "inscribe",
        "--mode",
        "np2",
        "--k",
        "1",
        "fixtures/square.poly",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).lines().any(|l| l.starts_with("ratio=2/1")),
        "{}",
        stdout(&o)
    );
}

#[test]
fn remark1_fixture_degrees() {
    let o = latcov(&["fixtures", "--name", "remark1-Q"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("dim 4\n"));
    assert!(out.contains("vertices=6 degrees=5,5,5,5,5,5"));
}

#[test]
fn billion_dimensions_row() {
    let o = latcov(&["bounds", "--n", "1000000000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("n=1000000000 k=9"));
    assert!(out.lines().any(|l| l.starts_with("1000000000,9,")));
}

#[test]
fn bounds_table_to_csv() {
    let path = temp("bounds.csv");
    let o = latcov(&[
        "bounds",
        "--table",
        "10:1000:3",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("n,k,"));
    // not-applicable cells stay empty
    assert!(lines[1].starts_with("10,6,,,,"));
    assert!(lines[3].starts_with("1000,7,3.79740448950e4,"));
}

#[test]
fn gen_volume_roundtrip_is_deterministic() {
    let a = latcov(&["gen", "--type", "ab", "--dim", "3", "--seed", "4"]);
    let b = latcov(&["gen", "--type", "ab", "--dim", "3", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let path = temp("ab.poly");
    std::fs::write(&path, &a.stdout).unwrap();
    let v = latcov(&["volume", path.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stderr(&v));
    assert!(stdout(&v).starts_with("dim=3 affine_dim=3 "));
}

#[test]
fn downclose_of_square_is_square() {
    let o = latcov(&["downclose", "fixtures/square.poly"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let local = latcov(&["downclose", "--local", "fixtures/square.poly"]);
    assert!(local.status.success());
    // [0,1]^2 is already closed either way
    assert_eq!(stdout(&o).lines().count(), 5);
    assert_eq!(stdout(&local), stdout(&o));
}

#[test]
fn local_closure_adds_zeroed_vertices() {
    let path = temp("tri.poly");
    std::fs::write(&path, "dim 2\n1 -2\n-1 -2\n1 1\n").unwrap();
    let local = latcov(&["downclose", "--local", path.to_str().unwrap()]);
    assert!(local.status.success(), "{}", stderr(&local));
    // (-1,-2) zeroed in its second coordinate and (1,1) in its first
    let out = stdout(&local);
    assert!(out.lines().any(|l| l == "-1 0"));
    assert!(out.lines().any(|l| l == "0 1"));
    let plain = latcov(&["downclose", path.to_str().unwrap()]);
    assert_eq!(plain.status.code(), Some(1));
}

#[test]
fn cover_verify_reports_csv() {
    let lattice = temp("id.lat");
    std::fs::write(&lattice, "dim 2\n1 0\n0 1\n").unwrap();
    let o = latcov(&[
        "cover",
        "verify",
        "--body",
        "fixtures/square.poly",
        "--lattice",
        lattice.to_str().unwrap(),
        "--delta",
        "1/4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o)
        .lines()
        .any(|l| l == "certified_covered,1/1,1/4,16"));

    std::fs::write(&lattice, "dim 2\n11/10 0\n0 1\n").unwrap();
    let o = latcov(&[
        "cover",
        "verify",
        "--body",
        "fixtures/square.poly",
        "--lattice",
        lattice.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("counterexample,10/11,")));
}

#[test]
fn cover_chain_on_simplex() {
    let body = temp("s3.poly");
    let o = latcov(&[
        "fixtures",
        "--name",
        "simplex",
        "--dim",
        "3",
        "--out",
        body.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = latcov(&[
        "cover",
        "chain",
        "--body",
        body.to_str().unwrap(),
        "--k",
        "3",
        "--mode",
        "ab",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("certified_covered,9/2,")));
}

#[test]
fn cover_search_is_reproducible() {
    let run = || {
        latcov(&[
            "cover",
            "search",
            "--body",
            "fixtures/square.poly",
            "--budget",
            "50",
            "--seed",
            "2",
        ])
    };
    let (a, b) = (run(), run());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("certified_covered,"));
}

#[test]
fn exit_codes() {
    let o = latcov(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = latcov(&["volume", "no/such/file.poly"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: read no/such/file.poly"));
    let o = latcov(&[
        "inscribe",
        "--mode",
        "np2",
        "--k",
        "2",
        "fixtures/square.poly",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kfold_chain_np2"), "{}", stderr(&o));
    let o = latcov(&["fixtures", "--name", "dodecahedron"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(latcov(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_input_reports_line() {
    let path = temp("bad.poly");
    std::fs::write(&path, "dim 2\n0 0\n1 x\n").unwrap();
    let o = latcov(&["volume", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}
