use std::fs;
use std::path::Path;

use oph::cli::run;

fn oph(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["oph".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = oph(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const SETS: &str = "a: 2 4 7 13\nb: 0 6 13\nc: 0 1 10 12\n";

#[test]
fn theory_prints_worked_value() {
    let out = ok(&["theory", "--quantity", "e_nemp", "--D", "16", "--k", "4", "--f", "6", "--exact"]);
    assert!(out.contains("exact 6/13"), "{out}");
    let out = ok(&["theory", "--quantity", "e_nmat", "--D", "16", "--k", "4", "--f1", "4", "--f2", "3", "--a", "1", "--exact"]);
    assert!(out.contains("exact 23/39"), "{out}");
}

#[test]
fn usage_and_missing_files() {
    assert_eq!(oph(&["bogus"]).0, 2);
    assert_eq!(oph(&["sketch", "--k", "4"]).0, 2);
    assert_eq!(oph(&["estimate", "--sketches", "/nonexistent/s.bin"]).0, 1);
    let (code, out, _) = oph(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("lsh-build"));
}

#[test]
fn sketch_estimate_expand_export() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sets.txt"), SETS).unwrap();
    let sets = p(dir.path(), "sets.txt");
    let s1 = p(dir.path(), "s1.bin");
    let s2 = p(dir.path(), "s2.bin");
    for s in [&s1, &s2] {
        ok(&["sketch", "--input", &sets, "--format", "set", "--D", "16", "--k", "4", "--seed", "1", "--output", s]);
    }
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());

    let est = ok(&["estimate", "--sketches", &s1, "--pair", "0,1", "--pair", "1,1"]);
    let lines: Vec<&str> = est.lines().collect();
    assert_eq!(lines[0], "i,j,n_emp,n_mat,r_mat,r_zero");
    assert_eq!(lines.len(), 3);
    let self_row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(self_row[4], "1");

    let bb = p(dir.path(), "b.bin");
    ok(&["expand", "--sketches", &s1, "--b", "2", "--output", &bb]);
    let text = ok(&["export-libsvm", "--sketches", &bb]);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let feats: Vec<&str> = line.split(' ').skip(1).collect();
        // one feature per non-empty bin, each at the unit-norm weight
        let w = 1.0 / (feats.len() as f64).sqrt();
        for f in feats {
            let (idx, val) = f.split_once(':').unwrap();
            assert!(idx.parse::<u64>().unwrap() >= 1);
            assert_eq!(val.parse::<f64>().unwrap(), w);
        }
    }
    assert!(oph(&["expand", "--sketches", &s1, "--b", "0", "--output", &bb]).0 != 0);
}

#[test]
fn lsh_finds_each_stored_set() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sets.txt"), SETS).unwrap();
    let sets = p(dir.path(), "sets.txt");
    let idx = p(dir.path(), "i.bin");
    ok(&["lsh-build", "--input", &sets, "--format", "set", "--D", "16", "--b", "2", "--k", "2", "--L", "3", "--seed", "4", "--output", &idx]);
    let out = ok(&["lsh-query", "--index", &idx, "--input", &sets, "--format", "set"]);
    for (i, line) in out.lines().enumerate() {
        let (_, hits) = line.split_once(':').unwrap();
        let hits: Vec<usize> = hits.split_whitespace().map(|h| h.parse().unwrap()).collect();
        assert!(hits.contains(&i), "{line}");
    }
}

#[test]
fn train_predict_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let mut data = String::new();
    for i in 0..40 {
        let (label, base) = if i % 2 == 0 { ("+1", 1) } else { ("-1", 50) };
        let feats: Vec<String> = (0..10).map(|j| format!("{}:1", base + j + (i % 3))).collect();
        data.push_str(&format!("{label} {}\n", feats.join(" ")));
    }
    fs::write(dir.path().join("d.svm"), data).unwrap();
    let svm = p(dir.path(), "d.svm");
    for (name, extra) in [("m1.bin", vec!["--k", "16", "--b", "4"]), ("m2.bin", vec!["--raw"])] {
        let model = p(dir.path(), name);
        let mut args = vec!["train", "--input", &svm, "--seed", "3", "--output", &model];
        args.extend(extra);
        ok(&args);
        let (code, out, err) = oph(&["predict", "--model", &model, "--input", &svm]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().count(), 40);
        assert!(err.contains("accuracy 1"), "{err}");
    }
}

#[test]
fn validate_writes_csv_and_script() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pairs.csv"), "name,f1,f2,a\nsmall,30,20,10\n").unwrap();
    let csv = p(dir.path(), "mc.csv");
    let py = p(dir.path(), "plot.py");
    let pairs = p(dir.path(), "pairs.csv");
    let args = ["validate", "--pairs", &pairs, "--D", "1024", "--k", "8,64", "--reps", "200", "--seed", "5", "--output", &csv, "--plot-script", &py];
    ok(&args);
    let first = fs::read_to_string(&csv).unwrap();
    assert_eq!(first.lines().count(), 1 + 2 * 7);
    assert!(fs::read_to_string(&py).unwrap().contains("mc.csv"));
    ok(&args);
    assert_eq!(first, fs::read_to_string(&csv).unwrap());
}
