use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use trischmidt::{BipartiteReport, Report, StateFile};

const BIN: &str = env!("CARGO_BIN_EXE_trischmidt");

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn gen(args: &[&str]) -> String {
    let o = run(args, None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    stdout(&o)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn gen_named_states() {
    let h = 1.0 / 2f64.sqrt();
    let ghz = StateFile::parse(&gen(&["gen", "ghz", "--dims", "2,2,2"]), "ghz").unwrap();
    assert_eq!(ghz.dims, vec![2, 2, 2]);
    for (i, [re, im]) in ghz.amplitudes.iter().enumerate() {
        let want = if i == 0 || i == 7 { h } else { 0.0 };
        assert!((re.0 - want).abs() < 1e-15 && im.0 == 0.0);
    }
    let t = 1.0 / 3f64.sqrt();
    let w = StateFile::parse(&gen(&["gen", "w", "--dims", "2,2,2"]), "w").unwrap();
    for (i, [re, _]) in w.amplitudes.iter().enumerate() {
        // (0,0,1), (0,1,0), (1,0,0) in row-major order.
        let want = if [1, 2, 4].contains(&i) { t } else { 0.0 };
        assert!((re.0 - want).abs() < 1e-15);
    }
}

#[test]
fn check_exit_codes() {
    let ghz = gen(&["gen", "ghz", "--dims", "2,2,2"]);
    let o = run(&["check", "-"], Some(&ghz));
    assert_eq!(code(&o), 0);
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let weights: Vec<f64> = r.weights.unwrap().iter().map(|x| x.0).collect();
    assert!(weights.iter().all(|w| (w - 0.5).abs() < 1e-10));

    let w = gen(&["gen", "w", "--dims", "2,2,2"]);
    let o = run(&["check", "-"], Some(&w));
    assert_eq!(code(&o), 1);
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let v = r.verdict.unwrap();
    assert!(!v.decomposable && r.weights.is_none());
    assert!((v.max_residual.0 - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    assert_eq!(v.slice_ranks, vec![2, 1]);
}

#[test]
fn unresolved_degenerate_block_exits_2() {
    let v = 1.0 / 6f64.sqrt();
    let mut amps = vec![[0.0, 0.0]; 27];
    for (i, j, k, s) in
        [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)]
    {
        amps[(i * 3 + j) * 3 + k] = [s * v, 0.0];
    }
    let text = serde_json::json!({ "dims": [3, 3, 3], "amplitudes": amps }).to_string();
    let o = run(&["check", "-"], Some(&text));
    assert_eq!(code(&o), 2);
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let verdict = r.verdict.unwrap();
    assert!(verdict.indeterminate && !verdict.decomposable);
    assert_eq!(verdict.refinement, "inconclusive");
}

#[test]
fn generated_schmidt_state_is_recovered() {
    let text = gen(&["--seed", "42", "gen", "schmidt", "--dims", "3,4,5", "--weights", "0.5,0.3,0.2"]);
    let o = run(&["check", "-"], Some(&text));
    assert_eq!(code(&o), 0);
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    for (got, want) in r.weights.unwrap().iter().zip([0.5, 0.3, 0.2]) {
        assert!((got.0 - want).abs() < 1e-8);
    }
    let src = r.source.unwrap();
    assert_eq!((src.kind.as_str(), src.seed), ("schmidt", Some(42)));
}

#[test]
fn data_errors_exit_65() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = write(dir.path(), "t.json", r#"{"dims": [2, 2, 2], "amplitudes": [[1, 0], [0, 0], [0, 0]]}"#);
    let o = run(&["check", &truncated], None);
    assert_eq!(code(&o), 65);
    assert!(stderr(&o).contains("dimension mismatch"), "{}", stderr(&o));

    let cut = write(dir.path(), "c.json", r#"{"dims": [2, 2, 2], "amplitudes": [[1, 0], [0,"#);
    assert_eq!(code(&run(&["check", &cut], None)), 65);

    let unnormalized =
        write(dir.path(), "u.json", r#"{"dims": [2, 2], "amplitudes": [[1, 0], [1, 0], [0, 0], [0, 0]]}"#);
    let o = run(&["decompose-bipartite", &unnormalized], None);
    assert_eq!(code(&o), 65);
    assert!(stderr(&o).contains("not normalized"));

    let bell = gen(&["gen", "ghz", "--dims", "2,2"]);
    assert_eq!(code(&run(&["check", "-"], Some(&bell))), 65);
    let ghz = gen(&["gen", "ghz", "--dims", "2,2,2"]);
    assert_eq!(code(&run(&["decompose-bipartite", "-"], Some(&ghz))), 65);

    let missing = dir.path().join("missing.json");
    assert!(code(&run(&["check", missing.to_str().unwrap()], None)) > 2);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["gen", "haar", "--dims", "2,2,2"][..],
        &["gen", "schmidt", "--dims", "2,2,2", "--seed", "1"],
        &["--seed", "1", "gen", "schmidt", "--dims", "2,2,2", "--weights", "0.2,0.3,0.5"],
        &["--seed", "1", "gen", "schmidt", "--dims", "2,2,2", "--weights", "1,-1"],
        &["gen", "w", "--dims", "1,2,2"],
        &["gen", "ghz", "--dims", "2"],
        &["gen", "ghz", "--dims", "2,2,2", "--weights", "1"],
        &["--tol-rank", "2", "gen", "ghz", "--dims", "2,2"],
        &["frobnicate"],
        &["check"],
    ] {
        assert_eq!(code(&run(args, None)), 64, "{args:?}");
    }
    let ghz = gen(&["gen", "ghz", "--dims", "2,2,3"]);
    assert_eq!(code(&run(&["--all-pivots", "check", "-"], Some(&ghz))), 64);
    assert_eq!(code(&run(&["--help"], None)), 0);
    assert_eq!(code(&run(&["--version"], None)), 0);
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "7", "gen", "haar", "--dims", "3,3,3"];
    let first = gen(&args);
    assert_eq!(first, gen(&args));
    let path = write(dir.path(), "h.json", &first);
    let a = run(&["--all-pivots", "check", &path], None);
    let b = run(&["--all-pivots", "check", &path], None);
    assert_eq!(code(&a), 1);
    assert_eq!(a.stdout, b.stdout);
    let s1 = run(&["spectra", &path], None);
    assert_eq!(s1.stdout, run(&["spectra", &path], None).stdout);
    assert_ne!(gen(&["--seed", "8", "gen", "haar", "--dims", "3,3,3"]), first);
}

#[test]
fn seeded_generator_matches_golden_file() {
    let golden = include_str!("golden/schmidt_2x3x3_seed42.json");
    assert_eq!(gen(&["--seed", "42", "gen", "schmidt", "--dims", "2,3,3", "--weights", "0.6,0.4"]), golden);
}

#[test]
fn spectra_command() {
    let o = run(&["spectra", "-"], Some(&gen(&["gen", "w", "--dims", "2,2,2"])));
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["rho_a", "rho_b", "rho_c"] {
        let s = floats(&v["spectra"][key]);
        assert!((s[0] - 2.0 / 3.0).abs() < 1e-10 && (s[1] - 1.0 / 3.0).abs() < 1e-10);
    }
    assert_eq!(v["spectrum_equal"]["a_bc"], Value::Bool(true));
    assert!(v.get("verdict").is_none());

    let o = run(&["spectra", "-"], Some(&gen(&["gen", "product", "--dims", "2,2,2"])));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["rho_a", "rho_b", "rho_c"] {
        assert_eq!(floats(&v["spectra"][key])[0], 1.0);
    }
}

#[test]
fn bipartite_command() {
    let o = run(&["decompose-bipartite", "-"], Some(&gen(&["gen", "ghz", "--dims", "2,2"])));
    assert_eq!(code(&o), 0);
    let r: BipartiteReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.coefficients.iter().all(|c| (c.0 - 0.5f64.sqrt()).abs() < 1e-12));
    assert!((r.entropy_bits.0 - 1.0).abs() < 1e-12);

    let o = run(&["decompose-bipartite", "-"], Some(&gen(&["gen", "product", "--dims", "3,2"])));
    let r: BipartiteReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.entropy_bits.0, 0.0);

    let (a, b) = (0.9f64.sqrt(), 0.1f64.sqrt());
    let text = format!(r#"{{"dims": [2, 2], "amplitudes": [[{a}, 0], [0, 0], [0, 0], [{b}, 0]]}}"#);
    let r: BipartiteReport = serde_json::from_str(&stdout(&run(&["decompose-bipartite", "-"], Some(&text)))).unwrap();
    // -0.9 log2 0.9 - 0.1 log2 0.1 evaluated independently.
    assert!((r.entropy_bits.0 - 0.4689955935892812).abs() < 1e-4);
}

#[test]
fn batch_mode_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let ghz = write(dir.path(), "ghz.json", &gen(&["gen", "ghz", "--dims", "2,2,2"]));
    let w = write(dir.path(), "w.json", &gen(&["gen", "w", "--dims", "2,2,2"]));
    let bad = write(dir.path(), "bad.json", "{}");
    let o = run(&["check", &w, &ghz, &bad, &ghz], None);
    assert_eq!(code(&o), 65);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let codes: Vec<u64> = v.as_array().unwrap().iter().map(|e| e["exit_code"].as_u64().unwrap()).collect();
    assert_eq!(codes, vec![1, 0, 65, 0]);
    assert_eq!(v[0]["file"], Value::String(w.clone()));
    assert!(v[2]["error"].as_str().unwrap().contains("malformed"));
    assert_eq!(code(&run(&["check", &w, &ghz], None)), 1);
}

#[test]
fn all_pivots_and_tolerance_echo() {
    let ghz = gen(&["gen", "ghz", "--dims", "3,3,3"]);
    let o = run(&["--all-pivots", "--tol-degen", "1e-6", "check", "-"], Some(&ghz));
    assert_eq!(code(&o), 0);
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let per = r.per_pivot.unwrap();
    assert_eq!(per.iter().map(|p| p.pivot.as_str()).collect::<Vec<_>>(), ["A", "B", "C"]);
    assert!(per.iter().all(|p| p.outcome == "decomposable"));
    assert_eq!(r.tolerances.degen_rel.0, 1e-6);
    assert_eq!(r.tolerances.rank_rel.0, 1e-10);
}

#[test]
fn report_round_trips() {
    let text = stdout(&run(&["check", "-"], Some(&gen(&["--seed", "3", "gen", "haar", "--dims", "2,3,4"]))));
    let r: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(trischmidt::format::to_json(&r), text);
}
