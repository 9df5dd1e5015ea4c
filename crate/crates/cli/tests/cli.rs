use std::path::Path;
use std::process::{Command, Output};

use abssep::measure::{measure, MeasureKind, SeparationReport};
use abssep::parse_poly;
use serde_json::Value;

fn abssep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abssep"))
        .args(args)
        .env_remove("ABSSEP_PRECISION_CEILING")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn compute_example() {
    let o = abssep(&["compute", "--poly", "10X^3-3X^2-2X+3", "--measure", "abssep"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"].as_str().unwrap().starts_with("5.3935"));
    let q: f64 = v["quality"].as_str().unwrap().parse().unwrap();
    assert!((q - 3.27).abs() < 0.005);
}

#[test]
fn json_round_trip() {
    let o = abssep(&["compute", "--poly", "X^4-X^2-2X-3", "--measure", "re_gap"]);
    assert_eq!(o.status.code(), Some(0));
    let parsed: SeparationReport = serde_json::from_slice(&o.stdout).unwrap();
    let direct = measure(&parse_poly("X^4-X^2-2X-3").unwrap(), MeasureKind::ReGap).unwrap().report();
    assert_eq!(parsed, direct);
}

#[test]
fn family_row() {
    let o = abssep(&["family", "--name", "deg4", "--param", "10", "--measure", "abssep", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "d,height,abssep,quality\n4,10,3.716e-5,4.43\n");
    let o = abssep(&["family", "--name", "deg3_sqrt3", "--param", "2,5,10", "--format", "md"]);
    let text = stdout(&o);
    assert!(text.starts_with("| n | height | abssep | quality |"));
    assert!(text.contains("| 10 | 2340 | 4.643e-12 | 3.36 |"), "{text}");
}

#[test]
fn exit_codes() {
    let o = abssep(&["compute", "--poly", "1,0,-1", "--measure", "abssep"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no qualifying pair"));
    assert!(o.stdout.is_empty());

    assert_eq!(abssep(&["compute", "--poly", "X^2-2", "--bogus"]).status.code(), Some(2));
    assert_eq!(abssep(&["launch"]).status.code(), Some(2));
    assert_eq!(abssep(&["compute", "--poly", "X^^2"]).status.code(), Some(2));
    assert_eq!(abssep(&["compute", "--poly", "X^2-2", "--measure", "width"]).status.code(), Some(2));
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["compute", "search", "family", "aux", "perturb", "verify"] {
        let o = abssep(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage: abssep"), "{sub}");
    }
}

#[test]
fn precision_ceiling_from_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_abssep"));
        c.args(["family", "--name", "deg5", "--param", "1e10", "--format", "csv"]);
        match env {
            Some(v) => c.env("ABSSEP_PRECISION_CEILING", v),
            None => c.env_remove("ABSSEP_PRECISION_CEILING"),
        };
        c.output().unwrap()
    };
    let ok = run(None);
    assert_eq!(stdout(&ok), "height,abssep,quality\n9999978768,7.165e-39,3.81\n");
    let low = run(Some("64"));
    assert_eq!(low.status.code(), Some(1));
    assert!(stderr(&low).contains("precision ceiling"));
    assert_eq!(run(Some("lots")).status.code(), Some(2));
}

fn lines(p: &Path) -> Vec<String> {
    std::fs::read_to_string(p).unwrap().lines().map(String::from).collect()
}

#[test]
fn search_out_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("records.jsonl");
    let ckpt = dir.path().join("run.ckpt");
    let base = ["search", "--degree", "3", "--height", "6", "--measure", "abssep", "--measure", "sep"];
    let full = abssep(&[&base[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(full.status.code(), Some(0), "{}", stderr(&full));
    let complete = lines(&out);
    assert_eq!(complete.len(), 2);

    let resumed = dir.path().join("resumed.jsonl");
    let args = [&base[..], &["--out", resumed.to_str().unwrap(), "--resume", ckpt.to_str().unwrap()]].concat();
    let part = abssep(&[&args[..], &["--max-slices", "3"]].concat());
    assert_eq!(part.status.code(), Some(0), "{}", stderr(&part));
    assert!(ckpt.exists());
    let rest = abssep(&args);
    assert_eq!(rest.status.code(), Some(0), "{}", stderr(&rest));
    assert_eq!(lines(&resumed).last(), complete.last());
    assert_eq!(lines(&resumed)[lines(&resumed).len() - 2..], complete[..]);
}

#[test]
fn search_table_output() {
    let o = abssep(&["search", "--degree", "3", "--height", "10", "--measure", "abssep", "--table", "table1", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = stdout(&o);
    assert!(t.starts_with("| d,H | measure | polynomial | value |"), "{t}");
    assert!(t.contains("| 5.394e-4 |"), "{t}");
}

#[test]
fn perturb_series_and_pair() {
    let o = abssep(&["perturb", "--family", "deg4", "--root", "1", "--order", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "k,coefficient\n0,1\n1,-1\n2,-2\n3,-11/2\n4,-71/4\n");
    let o = abssep(&["perturb", "--family", "deg4", "--pair", "1;i"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["first_difference"], "5");
}

#[test]
fn verify_quick() {
    let o = abssep(&["verify", "--quick", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(!stdout(&o).contains("false"));
}
