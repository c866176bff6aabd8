use skew_bollobas::cli::{
    self, EXIT_FAILURE, EXIT_IO, EXIT_LIMIT, EXIT_OK, EXIT_PARSE, EXIT_USAGE,
};
use skew_bollobas::{parse_certificate, SystemFile};
use std::fs;
use std::path::Path;
use std::process::Command;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("skew-bollobas").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_verify_peel_check_round_trip() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("sys.txt");
    let cert = dir.path().join("cert.txt");

    let r = run(&["construct", "--a", "2", "--b", "2", "-o", path_str(&sys)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.out);
    assert!(r.out.contains("m=6 (m_max=6) OK"));
    assert!(r.out.contains("union_a=9 (S1=9) OK"));
    assert!(r.out.contains("ground=13 (n_skew=13) OK"));

    let r = run(&["verify", path_str(&sys)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("skew: HOLDS"));

    let r = run(&["peel", path_str(&sys), "--pad", "-o", path_str(&cert)]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    assert!(r.out.contains("certificate OK"));
    assert!(parse_certificate(&fs::read_to_string(&cert).unwrap()).is_ok());

    let r = run(&["check-cert", path_str(&cert)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.lines().any(|l| l == "PASS nesting"));
    assert!(r.out.ends_with("certificate OK\n"));
}

#[test]
fn stdout_bodies_still_parse() {
    let r = run(&["construct", "--a", "1", "--b", "2"]);
    assert_eq!(r.code, EXIT_OK);
    let file = SystemFile::parse(&r.out).unwrap();
    assert_eq!(file.system.m(), 3);

    let r = run(&[
        "search",
        "--a",
        "1",
        "--b",
        "1",
        "--n",
        "3",
        "--objective",
        "ground",
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("# optimum 3 (proven)"));
    assert_eq!(SystemFile::parse(&r.out).unwrap().system.ground().len(), 3);
    assert!(r.err.contains("nodes="));
}

#[test]
fn verify_reports_violations_one_based() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("bad.txt");
    fs::write(
        &sys,
        "system 1 1 2 3\n1: A = {0}; B = {1}\n2: A = {2}; B = {1}\n",
    )
    .unwrap();
    let r = run(&["verify", path_str(&sys)]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.out.contains("violation (1,2)"));
    assert!(r.out.contains("skew: FAILS"));

    let r = run(&["verify", path_str(&sys), "--mode", "symmetric"]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.out.contains("violation (2,1)"));
}

#[test]
fn strict_sizes_flag() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("s.txt");
    fs::write(
        &sys,
        "system 2 1 2 3\n1: A = {0}; B = {1}\n2: A = {1,2}; B = {0}\n",
    )
    .unwrap();
    assert_eq!(run(&["verify", path_str(&sys)]).code, EXIT_OK);
    let r = run(&["verify", path_str(&sys), "--strict-sizes", "2", "1"]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.out.contains("sizes exactly (2,1): FAIL"));
}

#[test]
fn peel_without_pad_needs_exact_sizes() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("s.txt");
    fs::write(
        &sys,
        "system 2 1 2 3\n1: A = {0}; B = {1}\n2: A = {1,2}; B = {0}\n",
    )
    .unwrap();
    let r = run(&["peel", path_str(&sys)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("--pad"));
    assert_eq!(run(&["peel", path_str(&sys), "--pad"]).code, EXIT_OK);
}

#[test]
fn tampered_certificate_fails() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("s.txt");
    let cert = dir.path().join("c.txt");
    run(&["construct", "--a", "2", "--b", "1", "-o", path_str(&sys)]);
    assert_eq!(
        run(&["peel", path_str(&sys), "-o", path_str(&cert)]).code,
        EXIT_OK
    );
    let text = fs::read_to_string(&cert).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("level 1 : M = "))
        .unwrap();
    let tampered = text.replace(line, "level 1 : M = {1}");
    fs::write(&cert, tampered).unwrap();
    let r = run(&["check-cert", path_str(&cert)]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.out.contains("certificate FAILED"));
}

#[test]
fn search_node_limit_exits_two() {
    let r = run(&[
        "search",
        "--a",
        "2",
        "--b",
        "2",
        "--n",
        "8",
        "--objective",
        "ground",
        "--node-limit",
        "50",
    ]);
    assert_eq!(r.code, EXIT_LIMIT);
    assert!(r.out.contains("not proven: node limit reached"));
}

#[test]
fn search_rejects_oversized_ground() {
    let r = run(&[
        "search",
        "--a",
        "1",
        "--b",
        "1",
        "--n",
        "65",
        "--objective",
        "pairs",
    ]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn search_jobs_agree() {
    let base = [
        "search",
        "--a",
        "2",
        "--b",
        "1",
        "--n",
        "6",
        "--objective",
        "union-a",
    ];
    let one = run(&base);
    let four = run(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one.code, EXIT_OK);
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("# nodes"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&one.out), body(&four.out));
}

#[test]
fn bounds_output() {
    let r = run(&["bounds", "--a", "1", "--b", "1"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "s1=2 s2=2 n_skew=3 m_max=2 identity=OK\n");
    let r = run(&["bounds", "--a", "20", "--b", "20"]);
    assert!(r.out.starts_with("s1=269128937219 "));
    assert!(r.out.contains("m_max=137846528820"));
}

#[test]
fn dual_twice_is_identity() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("s.txt");
    let d1 = dir.path().join("d1.txt");
    let d2 = dir.path().join("d2.txt");
    run(&["construct", "--a", "3", "--b", "1", "-o", path_str(&sys)]);
    assert_eq!(
        run(&["dual", path_str(&sys), "-o", path_str(&d1)]).code,
        EXIT_OK
    );
    assert_eq!(run(&["verify", path_str(&d1)]).code, EXIT_OK);
    run(&["dual", path_str(&d1), "-o", path_str(&d2)]);
    assert_eq!(fs::read(&sys).unwrap(), fs::read(&d2).unwrap());
    assert!(fs::read_to_string(&d1).unwrap().starts_with("system 1 3 "));
}

#[test]
fn trace_output_and_limit() {
    let r = run(&["trace", "--a", "1", "--b", "1"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("leaves=2 internal=1"));
    let r = run(&["trace", "--a", "9", "--b", "9", "--node-limit", "100"]);
    assert_eq!(r.code, EXIT_LIMIT);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "system 1 1 1 2\n1: A = {0}; B = {0,1}\n").unwrap();
    let r = run(&["verify", path_str(&bad)]);
    assert_eq!(r.code, EXIT_PARSE);
    assert!(r.err.contains("line 2"), "{}", r.err);

    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["verify", path_str(&missing)]).code, EXIT_IO);
    assert_eq!(run(&["bounds", "--a", "-1", "--b", "1"]).code, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(
        run(&[
            "search",
            "--a",
            "1",
            "--b",
            "1",
            "--n",
            "3",
            "--objective",
            "size"
        ])
        .code,
        EXIT_USAGE
    );
    assert_eq!(run(&["--help"]).code, EXIT_OK);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_skew-bollobas");
    let out = Command::new(bin)
        .args(["bounds", "--a", "2", "--b", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "s1=5 s2=3 n_skew=6 m_max=3 identity=OK\n"
    );
    let out = Command::new(bin).arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
