use std::path::Path as FsPath;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use qfrac::cert::parse_lines;
use qfrac::tables::TABLE1_FIXTURE;

fn qfrac(dir: &FsPath, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfrac"))
        .current_dir(dir)
        .env_remove("QFRAC_STORE")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sorted_identities(path: &FsPath) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut ids: Vec<String> = parse_lines(&text).unwrap().iter().map(|c| c.identity()).collect();
    ids.sort();
    ids
}

#[test]
fn verify_fixture_tampered_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.jsonl");
    std::fs::write(&good, TABLE1_FIXTURE).unwrap();
    let o = qfrac(dir.path(), &["verify", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("20 certificate(s), 0 failed"));

    let tampered = dir.path().join("tampered.jsonl");
    let first = TABLE1_FIXTURE.lines().next().unwrap();
    std::fs::write(&tampered, first.replace("\"weight_sq_den\":2", "\"weight_sq_den\":3")).unwrap();
    let o = qfrac(dir.path(), &["verify", tampered.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    assert!(stdout(&o).contains("\"weight_sq_den\":3"), "identity printed");

    let malformed = dir.path().join("malformed.jsonl");
    std::fs::write(&malformed, first.replace("[1,-2]", "[1,\"x\"]")).unwrap();
    let o = qfrac(dir.path(), &["verify", malformed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = qfrac(dir.path(), &["search", "--a", "2", "--b", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("method 1"), "{s}");
    assert!(s.contains("(3, 1, -1) weight^2 9/1"), "{s}");

    let o = qfrac(dir.path(), &["search", "--a", "1", "--b", "7"]);
    assert!(stdout(&o).contains("(7, -1) weight^2 7/1 weight sqrt(7)"));

    let o = qfrac(
        dir.path(),
        &["search", "--a", "7", "--b", "2", "--method", "3", "--max-length", "6"],
    );
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("open"), "{s}");
    assert!(s.contains("no weight≠1 loop, lengths ≤ 6, exhaustive"), "{s}");
    let ledger = std::fs::read_to_string(dir.path().join("certificates.ledger.json")).unwrap();
    assert!(
        ledger.contains("\"exhaustive_upto\": 6") || ledger.contains("\"exhaustive_upto\":6"),
        "{ledger}"
    );

    // Both stored certificates re-verify.
    let o = qfrac(dir.path(), &["verify", "certificates.jsonl"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_arguments_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = qfrac(dir.path(), &["search", "--a", "2", "--b", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qfrac(dir.path(), &["search", "--a", "0", "--b", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn store_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qfrac"))
        .current_dir(dir.path())
        .env("QFRAC_STORE", "elsewhere.jsonl")
        .args(["search", "--a", "1", "--b", "2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("elsewhere.jsonl").exists());
    assert!(!dir.path().join("certificates.jsonl").exists());
}

#[test]
fn tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = qfrac(dir.path(), &["table", "1"]);
    assert_eq!(stdout(&o).matches("OPEN").count(), 20);

    let s = stdout(&qfrac(dir.path(), &["table", "1", "--fixtures"]));
    assert!(!s.contains("OPEN"));
    let row = |q: &str| s.lines().find(|l| l.starts_with(&format!("{q} "))).unwrap().to_string();
    assert!(row("9/4").contains("1/64"));
    assert!(row("9/4").contains("(-1, 1, -1, 2, 2)"));
    assert!(row("13/4").contains("1/4096"));
    assert!(row("1/2").contains("sqrt(1/2)"));

    let s = stdout(&qfrac(dir.path(), &["table", "2", "--fixtures"]));
    assert_eq!(s.lines().count(), 6, "{s}");
    assert!(s
        .lines()
        .any(|l| l.split_whitespace().take(4).collect::<Vec<_>>() == ["5", "2", "10", "2"]));
    assert!(s
        .lines()
        .any(|l| l.split_whitespace().take(4).collect::<Vec<_>>() == ["5", "3", "10", "none"]));
}

#[test]
fn eval_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let s = stdout(&qfrac(dir.path(), &["eval", "--q", "2", "--path", "1,-1,1"]));
    assert!(s.contains("= 0"), "{s}");
    assert!(s.contains("w^2 = 1"), "{s}");
    assert!(s.contains("loop: true"), "{s}");
    let s = stdout(&qfrac(dir.path(), &["eval", "--q", "1/2", "--path", "(0,1)"]));
    assert!(s.contains("not a path"), "{s}");
}

const SCAN: [&str; 8] = [
    "scan",
    "--a-max",
    "4",
    "--b-max",
    "12",
    "--beam",
    "2000",
    "--max-length=5",
];

#[test]
fn scan_derives_integer_family() {
    let dir = tempfile::tempdir().unwrap();
    let o = qfrac(dir.path(), &SCAN);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("28 certified, 3 open"), "{s}");
    let t = stdout(&qfrac(dir.path(), &["table", "2"]));
    assert!(
        t.lines()
            .any(|l| l.split_whitespace().take(4).collect::<Vec<_>>() == ["3", "1", "3", "1"]),
        "{t}"
    );
}

#[test]
fn killed_scan_resumes_to_the_same_state() {
    let fresh = tempfile::tempdir().unwrap();
    assert!(qfrac(fresh.path(), &SCAN).status.success());

    let dir = tempfile::tempdir().unwrap();
    for delay in [150, 400] {
        let mut child = Command::new(env!("CARGO_BIN_EXE_qfrac"))
            .current_dir(dir.path())
            .env_remove("QFRAC_STORE")
            .env("SOURCE_DATE_EPOCH", "1700000000")
            .args(SCAN)
            .arg("--resume")
            .stdout(Stdio::null())
            .spawn()
            .unwrap();
        std::thread::sleep(Duration::from_millis(delay));
        let _ = child.kill();
        child.wait().unwrap();
    }
    let mut args = SCAN.to_vec();
    args.push("--resume");
    assert!(qfrac(dir.path(), &args).status.success());

    let ledger = |d: &FsPath| std::fs::read_to_string(d.join("certificates.ledger.json")).unwrap();
    assert_eq!(ledger(fresh.path()), ledger(dir.path()));
    assert_eq!(
        sorted_identities(&fresh.path().join("certificates.jsonl")),
        sorted_identities(&dir.path().join("certificates.jsonl"))
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["search", "--a", "7", "--b", "2", "--method", "3", "--max-length", "5"];
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        let s = stdout(&qfrac(dir.path(), &a));
        (
            s,
            std::fs::read_to_string(dir.path().join("certificates.ledger.json")).unwrap(),
        )
    };
    assert_eq!(run("1"), run("4"));
    let run2 = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let a = [
            "search",
            "--a",
            "5",
            "--b",
            "3",
            "--method",
            "3",
            "--max-length",
            "4",
            "--threads",
            threads,
        ];
        stdout(&qfrac(dir.path(), &a))
    };
    assert_eq!(run2("1"), run2("3"));
}
