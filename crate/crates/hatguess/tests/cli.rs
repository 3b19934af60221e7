use std::fs;
use std::path::{Path, PathBuf};

use hatguess::cli::run;
use hatguess::formats::{read_json, StrategyFile};
use hatguess_core::{evaluate, Coloring, Graph, Guesser, StrategyProfile};
use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn hg(args: &[&str]) -> i32 {
    run(std::iter::once("hatguess").chain(args.iter().copied()))
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_winning_k2() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"n":2,"edges":[[0,1]]}"#);
    let st = write(
        &dir,
        "s.json",
        r#"{"q":2,"guessers":[{"kind":"table","table":[0,1]},{"kind":"table","table":[1,0]}]}"#,
    );
    let out = dir.path().join("r.json");
    assert_eq!(
        hg(&["verify", "--graph", s(&g), "--strategy", s(&st), "--out", s(&out)]),
        0
    );
    let r = report(&out);
    assert_eq!(r["command"], "verify");
    assert_eq!(r["result"]["winning"], true);
    // a generated seed is recorded so the run can be replayed
    let argv = r["config"]["argv"].as_array().unwrap();
    assert_eq!(argv[argv.len() - 2], "--seed");
    assert_eq!(argv[argv.len() - 1], r["config"]["seed"].as_u64().unwrap().to_string());
}

#[test]
fn losing_profile_yields_counterexample() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"n":2,"edges":[[0,1]]}"#);
    let st = write(
        &dir,
        "s.json",
        r#"{"q":2,"guessers":[{"kind":"constant","value":0},{"kind":"constant","value":0}]}"#,
    );
    let out = dir.path().join("r.json");
    assert_eq!(
        hg(&[
            "verify",
            "--graph",
            s(&g),
            "--strategy",
            s(&st),
            "--seed",
            "1",
            "--out",
            s(&out)
        ]),
        2
    );
    assert_eq!(report(&out)["result"]["counterexample"], serde_json::json!([1, 1]));
}

#[test]
fn planar_attack_defeats_random_profile() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(
        hg(&[
            "planar",
            "attack",
            "--m",
            "5",
            "--strategy",
            "random",
            "--seed",
            "7",
            "--out",
            s(&out)
        ]),
        2
    );
    let r = report(&out);
    let values: Vec<u32> = serde_json::from_value(r["result"]["coloring"].clone()).unwrap();
    let graph = Graph::planar_construction(13, 5);
    let profile = StrategyProfile::hashed(13, graph.n(), 7);
    let c = Coloring::new(13, values).unwrap();
    assert!(evaluate(&graph, &profile, &c).unwrap().is_empty());
}

#[test]
fn linear_defeat_of_constant_guess() {
    let dir = TempDir::new().unwrap();
    let st = write(
        &dir,
        "guess0.json",
        r#"{"n":1,"m":1,"p":2,"vertices":[{"coefficients":[],"bias":0}]}"#,
    );
    let out = dir.path().join("r.json");
    let code = hg(&[
        "linear",
        "defeat",
        "--n",
        "1",
        "--m",
        "1",
        "--p",
        "2",
        "--strategy",
        s(&st),
        "--seed",
        "0",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 2);
    assert_eq!(report(&out)["result"]["coloring"], serde_json::json!([1]));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", "{\"n\":2,\n\"edges\":[[0,1]\n");
    let st = write(&dir, "s.json", r#"{"q":2,"guessers":[]}"#);
    assert_eq!(hg(&["verify", "--graph", s(&g), "--strategy", s(&st)]), 1);
    assert_eq!(hg(&["verify", "--graph", s(&g)]), 1);
    assert_eq!(hg(&["no-such-command"]), 1);
}

#[test]
fn unwinnable_and_infeasible_exit_three() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"n":2,"edges":[[0,1]]}"#);
    let out = dir.path().join("r.json");
    assert_eq!(
        hg(&["solve", "--graph", s(&g), "--q", "3", "--seed", "1", "--out", s(&out)]),
        3
    );
    assert_eq!(report(&out)["result"]["winnable"], false);
    let set = write(
        &dir,
        "ks.json",
        r#"{"d":2,"q":13,"colorings":[[0,0],[0,1],[0,2],[1,0],[1,1],[1,2]]}"#,
    );
    assert_eq!(
        hg(&["handle-set", "--set", s(&set), "--seed", "1", "--out", s(&out)]),
        3
    );
    assert_eq!(report(&out)["result"]["replay_ok"], true);
}

#[test]
fn replaying_a_report_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(hg(&["planar", "build", "--q", "4", "--out", s(&out)]), 0);
    let first = fs::read(&out).unwrap();
    let argv: Vec<String> = serde_json::from_value(report(&out)["config"]["argv"].clone()).unwrap();
    let args: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert_eq!(hg(&args), 0);
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn built_families_feed_verification() {
    let dir = TempDir::new().unwrap();
    let fam = dir.path().join("fam.json");
    assert_eq!(
        hg(&[
            "book",
            "build",
            "--d",
            "2",
            "--q",
            "3",
            "--m",
            "6",
            "--s",
            "6",
            "--seed",
            "4",
            "--out",
            s(&fam)
        ]),
        0
    );
    let out = dir.path().join("r.json");
    assert_eq!(
        hg(&["book", "verify", "--family", s(&fam), "--seed", "4", "--out", s(&out)]),
        0
    );
    let r = report(&out);
    assert_eq!(r["result"]["onto"]["exact"], true);
    assert_eq!(r["result"]["game"]["winning"], true);
}

#[test]
fn experiment_csv_has_row_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.csv");
    let code = hg(&[
        "randgraph",
        "experiment",
        "--sizes",
        "128",
        "--seeds",
        "2",
        "--seed",
        "3",
        "--no-timing",
        "--format",
        "csv",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "n,seed,d,m_found,q_certified,wall_ms");
    assert_eq!(body.len(), 3);
    assert!(body[1].starts_with("128,3,") && body[1].ends_with(",0"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strategy_files_round_trip(q in 2u32..5, tables in prop::collection::vec(prop::collection::vec(0u32..64, 1..9), 1..5)) {
        let guessers: Vec<Guesser> = tables
            .iter()
            .map(|t| Guesser::Table(t.iter().map(|&c| c % q).collect()))
            .collect();
        let profile = StrategyProfile::new(q, guessers).unwrap();
        let file = StrategyFile::from_profile(&profile).unwrap();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("s.json");
        fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let back: StrategyFile = read_json(&path, "strategy").unwrap();
        prop_assert_eq!(&back, &file);
        let again = back.to_profile().unwrap();
        for (v, t) in tables.iter().enumerate() {
            prop_assert!(matches!(again.guesser(v), Guesser::Table(x) if x.len() == t.len()));
        }
    }
}
