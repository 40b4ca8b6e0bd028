//! End-to-end runs of the `te-lab` binary: exit codes, error reports and
//! byte-for-byte determinism of the written artefacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CUBIC_311: &str = "kind = cubic\nparams.tau = 3\nparams.mu = 1\nparams.lambda = 1\ngamma = 1\nkappa = 1\n";
const CUBIC_310: &str = "kind = cubic\nparams.tau = 3\nparams.mu = 1\nparams.lambda = 0\ngamma = 1\nkappa = 1\n";

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("te-lab-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn out(&self, name: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::create_dir_all(&p).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str], medium: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_te-lab"));
    if let Some(m) = medium {
        cmd.arg("--medium").arg(m);
    }
    cmd.arg("--out").arg(out).args(args).output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn predict_reports_half_for_decoupled_cubic() {
    let s = Scratch::new("predict");
    let m = s.write("m.txt", CUBIC_311);
    let out = s.out("o");
    let r = run(&["predict"], Some(&m), &out);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&out, "predict.json")).unwrap();
    let text = v.to_string();
    assert!(text.contains("0.5"), "{text}");
}

#[test]
fn classify_writes_atlas_with_eight_hyperbolic_rows() {
    let s = Scratch::new("classify");
    let m = s.write("m.txt", CUBIC_310);
    let out = s.out("o");
    let r = run(&["classify"], Some(&m), &out);
    assert_eq!(r.status.code(), Some(0));
    let atlas = read(&out, "atlas.csv");
    let mut rows = csv::Reader::from_reader(atlas.as_bytes());
    let headers = rows.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["phi", "tag", "j0", "ell", "a4_ok"]);
    let hyp = rows.records().filter(|r| &r.as_ref().unwrap()[1] == "hyperbolic").count();
    assert_eq!(hyp, 8);
    assert!(out.join("census.txt").exists());
}

#[test]
fn malformed_medium_names_the_violated_constraint() {
    let s = Scratch::new("bad-medium");
    let m = s.write("m.txt", &CUBIC_311.replace("params.lambda = 1", "params.lambda = 5"));
    let out = s.out("o");
    let r = run(&["predict"], Some(&m), &out);
    assert_eq!(r.status.code(), Some(1));
    let err = read(&out, "error.txt");
    assert!(err.contains("exit = 1"), "{err}");
    assert!(err.contains("lambda < tau"), "{err}");
}

#[test]
fn usage_errors_exit_one_with_report() {
    let s = Scratch::new("usage");
    let out = s.out("o");
    let r = run(&["frobnicate"], None, &out);
    assert_eq!(r.status.code(), Some(1));
    assert!(read(&out, "error.txt").contains("kind = usage"));

    let out2 = s.out("o2");
    let r = run(&["predict"], None, &out2);
    assert_eq!(r.status.code(), Some(1));
    assert!(read(&out2, "error.txt").contains("--medium"));

    let help = Command::new(env!("CARGO_BIN_EXE_te-lab")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn unknown_run_key_is_rejected() {
    let s = Scratch::new("run-key");
    let m = s.write("m.txt", CUBIC_311);
    let run_doc = s.write("run.txt", "n = 32\nbogus = 4\n");
    let out = s.out("o");
    let r = run(&["simulate", "--run", run_doc.to_str().unwrap()], Some(&m), &out);
    assert_eq!(r.status.code(), Some(1));
    assert!(read(&out, "error.txt").contains("bogus"));
}

#[test]
fn seeded_spectrum_is_deterministic() {
    let s = Scratch::new("spectrum");
    let m = s.write("m.txt", CUBIC_310);
    let (a, b, c) = (s.out("a"), s.out("b"), s.out("c"));
    for (dir, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let r = run(&["--seed", seed, "spectrum", "--samples", "20"], Some(&m), dir);
        assert_eq!(r.status.code(), Some(0));
    }
    let (ta, tb, tc) = (read(&a, "spectrum.csv"), read(&b, "spectrum.csv"), read(&c, "spectrum.csv"));
    assert_eq!(ta, tb);
    assert_ne!(ta, tc);
    assert_eq!(ta.lines().count(), 1 + 20 * 5);
}

#[test]
fn simulate_is_byte_identical_across_runs_and_thread_counts() {
    let s = Scratch::new("simulate");
    let m = s.write("m.txt", CUBIC_310);
    let args = ["simulate", "--n", "64", "--L", "40", "--tmin", "1", "--tmax", "8", "--times", "5", "--filter", "par"];
    let mut outputs = Vec::new();
    for (k, threads) in ["4", "4", "1"].iter().enumerate() {
        let out = s.out(&format!("o{k}"));
        let r = Command::new(env!("CARGO_BIN_EXE_te-lab"))
            .env("TE_LAB_THREADS", threads)
            .arg("--medium")
            .arg(&m)
            .arg("--out")
            .arg(&out)
            .args(args)
            .output()
            .unwrap();
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
        outputs.push((read(&out, "decay.csv"), read(&out, "fit.txt")));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    // the last time wraps around the 40-unit box and is dropped
    assert_eq!(outputs[0].0.lines().count(), 1 + 4);
    assert!(outputs[0].1.contains("wrapped_at = 7.99"));
}

#[test]
fn expand_agrees_on_a_generic_ray() {
    let s = Scratch::new("expand");
    let m = s.write("m.txt", CUBIC_310);
    let out = s.out("o");
    let r = run(&["expand", "--direction", "0.3", "--kmax", "2", "--regime", "large"], Some(&m), &out);
    assert_eq!(r.status.code(), Some(0), "{}", read(&out, "error.txt"));
    assert!(read(&out, "expand.csv").lines().count() > 1);
    assert!(read(&out, "regimes.csv").lines().count() > 1);
}
