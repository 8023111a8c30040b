use std::process::{Command, Output};

use serde_json::Value;
use simplicial_codes::optimality::classify;

fn sccodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sccodes"))
        .args(args)
        .output()
        .expect("spawn sccodes")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const FAMILY_EXAMPLE: [&str; 8] = ["-q", "2", "-m", "6", "-A", "1,2,3,5", "-B", "1,2,3,4"];

fn family_job(cmd: &str, family: &str) -> Vec<String> {
    let mut v = vec![cmd.to_string()];
    v.extend(FAMILY_EXAMPLE.iter().map(|s| s.to_string()));
    v.extend(["--Bp", "2", "--family", family].map(String::from));
    v
}

fn run_owned(args: &[String]) -> Output {
    sccodes(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn construct_reports_length() {
    let o = run_owned(&family_job("construct", "1"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("n=224\n"), "{}", stdout(&o));

    let o = sccodes(&[
        "construct",
        "-q",
        "3",
        "-m",
        "4",
        "-A",
        "1",
        "-B",
        "1,2,3",
        "--Bp",
        "2",
        "--family",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n=72\n|L1|=3\n|L2|=24\n");
}

#[test]
fn empty_component_is_rejected() {
    let o = sccodes(&[
        "construct",
        "-q",
        "2",
        "-m",
        "3",
        "-A",
        "1,2,3",
        "-B",
        "1",
        "--family",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A ⊂ [m]"), "{}", stderr(&o));
}

#[test]
fn conflicting_family_and_theorem() {
    let o = sccodes(&[
        "verify",
        "-q",
        "2",
        "-m",
        "4",
        "-A",
        "1,2",
        "--family",
        "1",
        "--theorem",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_matches_and_injected_mismatch_fails() {
    let mut args = family_job("spectrum", "1");
    args.extend(["--format", "json"].map(String::from));
    let o = run_owned(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mut predicted = v["predicted"].clone();

    // Move one codeword from weight 112 to weight 113.
    let table = predicted["table"].as_array_mut().unwrap();
    let row = table.iter_mut().find(|r| r[0] == 112).unwrap();
    row[1] = Value::from(1);
    table.push(Value::from(vec![113, 1]));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, predicted.to_string()).unwrap();
    let mut args = family_job("spectrum", "1");
    args.extend(["--inject".to_string(), path.display().to_string()]);
    let o = run_owned(&args);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("diff: weight 112"), "{}", stdout(&o));
}

#[test]
fn verify_passes_on_published_examples() {
    for f in ["1", "2", "3", "4"] {
        let o = run_owned(&family_job("verify", f));
        assert_eq!(
            o.status.code(),
            Some(0),
            "family {f}: {}{}",
            stdout(&o),
            stderr(&o)
        );
    }
    let gray: [&[&str]; 5] = [
        &[
            "-q",
            "3",
            "-m",
            "4",
            "-A",
            "1",
            "-B",
            "1,2,3",
            "--Bp",
            "2",
            "--theorem",
            "5",
        ],
        &[
            "-q",
            "2",
            "-m",
            "4",
            "-A",
            "2",
            "-B",
            "1,2,3,4",
            "--theorem",
            "6",
        ],
        &[
            "-q",
            "2",
            "-m",
            "4",
            "-A",
            "1,2,3",
            "-B",
            "1,2,3,4",
            "--Bp",
            "1,2,3",
            "--theorem",
            "7",
        ],
        &[
            "-q",
            "2",
            "-m",
            "6",
            "-A",
            "4",
            "-B",
            "1,2,3,5",
            "--theorem",
            "8",
        ],
        &["-q", "2", "-m", "4", "-A", "1,2", "--theorem", "9"],
    ];
    for g in gray {
        let mut args = vec!["verify", "--format", "json"];
        args.extend_from_slice(g);
        let o = sccodes(&args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{g:?}: {}{}",
            stdout(&o),
            stderr(&o)
        );
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["pass"], true);
        assert!(!v["gray"]["claims_checked"].as_array().unwrap().is_empty());
    }
}

#[test]
fn optimal_reports_griesmer() {
    let o = sccodes(&[
        "optimal",
        "-q",
        "2",
        "-m",
        "4",
        "-A",
        "1,2,3",
        "-B",
        "1,2,3,4",
        "--Bp",
        "1,2,3",
        "--theorem",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("Griesmer"), "{}", stdout(&o));
}

#[test]
fn sweep_rows_are_classified_consistently() {
    let o = sccodes(&["sweep", "-q", "2", "-m", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let num = |i: usize| rec[i].parse::<u64>().unwrap();
        let v = classify(2, num(8), num(9) as u32, num(10));
        assert_eq!(&rec[11], v.label(), "{rec:?}");
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn matrix_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let o = sccodes(&[
        "construct",
        "-q",
        "2",
        "-m",
        "4",
        "-A",
        "1,2,3",
        "-B",
        "1,2,3,4",
        "--Bp",
        "1,2,3",
        "--family",
        "2",
        "--matrix",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(header[..3], ["2", "4", "2"]);
    let n: usize = header[6].parse().unwrap();
    let k: usize = header[7].parse().unwrap();
    assert_eq!((n, k), (64, 8));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), k);
    assert!(rows.iter().all(|r| r.split(' ').count() == 2 * n));
}

#[test]
fn budget_exceeded_exit_code() {
    let o = sccodes(&[
        "spectrum", "-q", "2", "-m", "8", "-A", "1", "-B", "1,2", "--family", "3", "--budget",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
