use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rmconv::report::ReportRecord;
use tempfile::TempDir;

const GI: &str = "4 6\n101000\n011000\n000110\n000011\n";
const GF: &str = "4 5\n10001\n01001\n00101\n00011\n";
// columns e0, e1, e3, e4, e2 + e5
const Y: &str = "6 5\n10000\n01000\n00001\n00100\n00010\n00001\n#blocks 3,3\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        let f = Files {
            dir: TempDir::new().unwrap(),
        };
        f.write("gi.txt", GI);
        f.write("gf.txt", GF);
        f.write("y.txt", Y);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        s(&p)
    }
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn rm_plain_and_transformed() {
    let o = run(&["rm", "--r", "2", "--m", "3"]);
    assert_eq!(code(&o), 0);
    let expected = "7 8\n11111111\n00001111\n00110011\n01010101\n00000011\n00000101\n00010001\n";
    assert_eq!(stdout(&o), expected);

    let o = run(&["rm", "--r", "1", "--m", "2", "--transformed"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "3 4\n1100\n0101\n0011\n#blocks 1 1 1\n");

    assert_eq!(code(&run(&["rm", "--r", "5", "--m", "3"])), 2);
    assert_eq!(code(&run(&["rm", "--r", "2"])), 2);
}

#[test]
fn rm_to_file() {
    let f = Files::new();
    let out = f.path("g.txt");
    assert_eq!(
        code(&run(&["rm", "--r", "1", "--m", "3", "--out", &s(&out)])),
        0
    );
    let o = run(&["info", "--g", &s(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "n=8 k=4 d=4 d_dual=4");
}

#[test]
fn verify_example_files() {
    let f = Files::new();
    let o = run(&[
        "verify",
        "--gi",
        &s(&f.path("gi.txt")),
        "--blocks",
        "3,3",
        "--gf",
        &s(&f.path("gf.txt")),
        "--y",
        &s(&f.path("y.txt")),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("valid=true"));
    assert!(out.contains("access_cost=3"));
    assert!(out.contains("W=1"));

    // blocks from the #blocks line
    let o = run(&[
        "verify",
        "--gi",
        &s(&f.path("gi.txt")),
        "--gf",
        &s(&f.path("gf.txt")),
        "--y",
        &s(&f.path("y.txt")),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_rejects_zero_matrix_and_bad_files() {
    let f = Files::new();
    let zero = f.write(
        "zero.txt",
        "6 5\n00000\n00000\n00000\n00000\n00000\n00000\n",
    );
    let gi = s(&f.path("gi.txt"));
    let gf = s(&f.path("gf.txt"));
    let o = run(&[
        "verify", "--gi", &gi, "--blocks", "3,3", "--gf", &gf, "--y", &zero,
    ]);
    assert_eq!(code(&o), 1);

    let bad = f.write("bad.txt", "6 5\n10000\n01x00\n");
    assert_eq!(
        code(&run(&[
            "verify", "--gi", &gi, "--blocks", "3,3", "--gf", &gf, "--y", &bad
        ])),
        2
    );
    let missing = s(&f.path("missing.txt"));
    assert_eq!(
        code(&run(&[
            "verify", "--gi", &gi, "--blocks", "3,3", "--gf", &gf, "--y", &missing
        ])),
        2
    );
    let wrong_shape = f.write("shape.txt", "5 5\n10000\n01000\n00100\n00010\n00001\n");
    assert_eq!(
        code(&run(&[
            "verify",
            "--gi",
            &gi,
            "--blocks",
            "3,3",
            "--gf",
            &gf,
            "--y",
            &wrong_shape
        ])),
        2
    );
    let y = s(&f.path("y.txt"));
    assert_eq!(
        code(&run(&[
            "verify", "--gi", &gi, "--blocks", "2,4", "--gf", &gf, "--y", &y
        ])),
        2
    );
}

#[test]
fn merge_text_json_and_emitted_y_verifies() {
    let f = Files::new();
    let o = run(&["merge", "--r", "1", "--m", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("access=4"));

    let y = f.path("y24.txt");
    let o = run(&[
        "merge",
        "--r",
        "2",
        "--m",
        "4",
        "--format",
        "json",
        "--emit-y",
        &s(&y),
    ]);
    assert_eq!(code(&o), 0);
    let rec: ReportRecord = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rec.costs.unchanged, vec![8, 4]);
    assert_eq!(rec.costs.read[1], 4);
    assert_eq!(rec.costs.written, 4);
    let tight: Vec<_> = rec
        .bounds
        .iter()
        .filter(|b| b.tight == Some(true) && b.name.starts_with("unchanged_upper"))
        .map(|b| (b.name.as_str(), b.i))
        .collect();
    assert!(tight.contains(&("unchanged_upper_singleton", Some(1))));
    assert!(tight.contains(&("unchanged_upper_dual", Some(2))));
    // round trip through the serialized form
    let again: ReportRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(again, rec);

    // merge then verify
    let gi_text = {
        let g1 = stdout(&run(&["rm", "--r", "2", "--m", "3"]));
        let g2 = stdout(&run(&["rm", "--r", "1", "--m", "3"]));
        let rows1: Vec<&str> = g1.lines().skip(1).collect();
        let rows2: Vec<&str> = g2.lines().skip(1).collect();
        let mut t = format!("{} 16\n", rows1.len() + rows2.len());
        for r in rows1 {
            t.push_str(&format!("{r}00000000\n"));
        }
        for r in rows2 {
            t.push_str(&format!("00000000{r}\n"));
        }
        t
    };
    let gi = f.write("gi24.txt", &gi_text);
    let gf = f.path("gf24.txt");
    assert_eq!(
        code(&run(&["rm", "--r", "2", "--m", "4", "--out", &s(&gf)])),
        0
    );
    let o = run(&["verify", "--gi", &gi, "--gf", &s(&gf), "--y", &s(&y)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("access_cost=15"));

    assert_eq!(code(&run(&["merge", "--r", "3", "--m", "3"])), 2);
}

#[test]
fn report_rows_and_warnings() {
    let o = run(&["report", "--m-range", "3-5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipping m=3"));
    let rows: Vec<ReportRecord> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].params.d_f, rows[0].params.d_f_dual), (4, 8));
    assert_eq!(rows[1].params.k_i, vec![15, 11]);

    let o = run(&["report", "--m-range", "5-4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    assert_eq!(code(&run(&["report", "--m-range", "x-4"])), 2);
}

#[test]
fn bounds_from_flags_and_record() {
    let o = run(&[
        "bounds", "--lambda", "2", "--nI", "8,8", "--kI", "7,4", "--nF", "16", "--kF", "11",
        "--dF", "4", "--dFdual", "8",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("unchanged_upper_dual          1 upper  every       7  no"));
    assert!(text.contains("unchanged_upper_dual          2 upper  every       4  yes"));
    assert!(text.contains("read_lower_delta              1 lower  every       2  yes"));
    assert!(text.contains("read_lower_delta              2 lower  every       3  yes"));
    assert!(text.contains("unchanged_total_lower         - lower  best       11  yes"));

    let f = Files::new();
    let rec = f.write(
        "p.txt",
        "lambda=2\nnI=8,8\nkI=7,4\nnF=16\nkF=11\ndF=4\ndFdual=8\n",
    );
    let o = run(&["bounds", "--params", &rec, "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["params"]["kF"], 11);
    assert!(v["bounds"].as_array().unwrap().len() >= 12);

    assert_eq!(code(&run(&["bounds", "--nI", "8,8", "--kI", "7,4"])), 2);
    assert_eq!(
        code(&run(&[
            "bounds", "--lambda", "3", "--nI", "8,8", "--kI", "7,4", "--nF", "16", "--kF", "11",
            "--dF", "4", "--dFdual", "8"
        ])),
        2
    );
    let bad = f.write(
        "bad.txt",
        "lambda=2\nnI=8,8\nkI=7,3\nnF=16\nkF=11\ndF=4\ndFdual=8\n",
    );
    assert_eq!(code(&run(&["bounds", "--params", &bad])), 2);
}

#[test]
fn oracle_on_example_files() {
    let f = Files::new();
    let ypath = f.path("best.txt");
    let gi = s(&f.path("gi.txt"));
    let gf = s(&f.path("gf.txt"));
    let o = run(&[
        "oracle",
        "--gi",
        &gi,
        "--blocks",
        "3,3",
        "--gf",
        &gf,
        "--emit-y",
        &s(&ypath),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("optimum_access_cost=3"));
    let o = run(&["verify", "--gi", &gi, "--gf", &gf, "--y", &s(&ypath)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("access_cost=3"));

    let o = run(&[
        "oracle", "--gi", &gi, "--blocks", "3,3", "--gf", &gf, "--format", "json",
    ]);
    let rec: ReportRecord = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rec.costs.access, 3);
    assert!(rec.violations().is_empty());

    assert_ne!(
        code(&run(&[
            "oracle", "--gi", &gi, "--blocks", "3,3", "--gf", &gf, "--max-kf", "3"
        ])),
        0
    );
}

#[test]
fn apply_zero_and_example_inputs() {
    let f = Files::new();
    let y = s(&f.path("y.txt"));
    let z1 = f.write("z1.txt", "1 3\n000\n");
    let z2 = f.write("z2.txt", "1 3\n000\n");
    let o = run(&[
        "apply",
        "--y",
        &y,
        "--blocks",
        "3,3",
        "--inputs",
        &format!("{z1},{z2}"),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "1 5\n00000\n");

    let c1 = f.write("c1.txt", "1 3\n101\n");
    let c2 = f.write("c2.txt", "1 3\n110\n");
    let out = f.path("out.txt");
    let o = run(&[
        "apply",
        "--y",
        &y,
        "--inputs",
        &format!("{c1},{c2}"),
        "--out",
        &s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), "1 5\n10111\n");

    assert_eq!(code(&run(&["apply", "--y", &y, "--inputs", &z1])), 2);
}

#[test]
fn info_reports_distances() {
    let f = Files::new();
    let o = run(&["info", "--g", &s(&f.path("gf.txt"))]);
    assert_eq!(stdout(&o).trim(), "n=5 k=4 d=2 d_dual=5");
    let full = f.write("full.txt", "2 2\n10\n01\n");
    let o = run(&["info", "--g", &full]);
    assert_eq!(stdout(&o).trim(), "n=2 k=2 d=1 d_dual=none");
    let o = run(&["info", "--g", &s(&f.path("gf.txt")), "--k-limit", "0"]);
    assert_eq!(stdout(&o).trim(), "n=5 k=4 d=unknown d_dual=unknown");
    let dep = f.write("dep.txt", "2 2\n11\n11\n");
    assert_eq!(code(&run(&["info", "--g", &dep])), 2);
}
