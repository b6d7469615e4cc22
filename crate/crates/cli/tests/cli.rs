use std::path::Path;
use std::process::{Command, Output};

fn sparsedom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsedom")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const F: &str = "DGF1 n=1 depth=3 origin=0 side=1\n0 0 4 0 1 0 0 2\n";
const W: &str = "DGF1 n=1 depth=3 origin=0 side=1 weight\n1 2 1 0.5 3 1 1 2\n";

const PLAN: &str = "[corpus]
seed = 5
grids = 1x2-5, 2x1-3
weights = cascade:4, power
functions = spike, random
count = 8

[endpoint]
eps = 0.25, 1

[lemma41]
";

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&sparsedom(&["--help"])), 0);
    assert_eq!(code(&sparsedom(&["verify", "--help"])), 0);
    assert_eq!(code(&sparsedom(&["frobnicate"])), 1);
    assert_eq!(code(&sparsedom(&["sparse", "--in", "x.dgf"])), 1);
}

#[test]
fn malformed_dgf_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.dgf", "# comment\nDGF1 n=1 depth=oops origin=0 side=1\n1 2\n");
    let o = sparsedom(&["maximal", "--in", &bad]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn sparse_then_verify_lemma41() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.dgf", F);
    let w = write(dir.path(), "w.dgf", W);
    let fam = dir.path().join("fam.json");
    let o = sparsedom(&["sparse", "--in", &f, "--lambda", "0.5", "--out", fam.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    assert_eq!(json["cell_order"], "morton");
    assert!(!json["cubes"].as_array().unwrap().is_empty());

    let o = sparsedom(&["verify", "lemma41", "--f", &f, "--w", &w, "--family", fam.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["id"], "lemma41");
    assert_eq!(report["bound"], 8.0);
    assert_eq!(report["pass"], true);
    for key in ["lhs", "rhs", "ratio", "params", "instance"] {
        assert!(report.get(key).is_some(), "{key}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.dgf", F);
    let w = write(dir.path(), "w.dgf", W);
    let o = sparsedom(&["verify", "endpoint", "--f", &f, "--w", &w, "--eps", "0.5"]);
    assert_eq!(code(&o), 0);
    let ratio = serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["ratio"].as_f64().unwrap();
    let tight = format!("{}", ratio / 2.0);
    assert_eq!(code(&sparsedom(&["verify", "endpoint", "--f", &f, "--w", &w, "--eps", "0.5", "--bound", &tight])), 2);
    assert_eq!(code(&sparsedom(&["verify", "endpoint", "--f", &f, "--w", &w, "--eps", "3"])), 1);
    assert_eq!(code(&sparsedom(&["verify", "nosuch", "--f", &f, "--w", &w])), 1);
    assert_eq!(code(&sparsedom(&["verify", "two_weight_max", "--f", &f, "--w", &w, "--p", "2", "--delta", "1"])), 1);
    let o = sparsedom(&["verify", "two_weight_max", "--f", &f, "--w", &w, "--sigma", &w, "--p", "2", "--delta", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn other_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.dgf", F);
    let w = write(dir.path(), "w.dgf", W);
    let one = write(dir.path(), "one.dgf", "DGF1 n=1 depth=3 origin=0 side=1\n1 1 1 1 1 1 1 1\n");

    let o = sparsedom(&["norm", "--in", &f, "--p", "2", "--w", &w, "--young", "logbump:p=2,a=1", "--cube", "1:0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["weak"].as_f64().unwrap() <= v["lp"].as_f64().unwrap());
    assert!(v["luxemburg"]["value"].as_f64().unwrap() > 0.0);

    let m = dir.path().join("m.dgf");
    assert_eq!(code(&sparsedom(&["maximal", "--in", &f, "--out", m.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&m).unwrap();
    assert!(text.starts_with("DGF1 n=1 depth=3"));
    assert_eq!(code(&sparsedom(&["maximal", "--in", &f, "--young", "epsbump:eps=0.5"])), 0);

    let o = sparsedom(&["constants", "--in", &w, "--p", "2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["constants"]["ainfty"]["value"].as_f64().unwrap() >= 1.0);
    assert_eq!(v["reverse_holder"]["passes"], true);

    let r = dir.path().join("r.dgf");
    let o = sparsedom(&["rdf", "--h", &one, "--v", &one, "--s", "2", "--r-out", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["property_a"], true);
    assert_eq!(v["property_b"], true);
    assert!(std::fs::read_to_string(&r).unwrap().contains("1.3333333333"));
    assert_eq!(code(&sparsedom(&["rdf", "--h", &one, "--v", &f, "--s", "2"])), 1);
    // inputs untouched
    assert_eq!(std::fs::read_to_string(&f).unwrap(), F);
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let spec = "grids=1x3,2x2;weights=cascade:2;functions=spike,random;count=4";
    for d in [&a, &b] {
        assert_eq!(code(&sparsedom(&["gen", "--seed", "9", "--spec", spec, "--out", d.path().to_str().unwrap()])), 0);
    }
    let manifest = std::fs::read_to_string(a.path().join("manifest.json")).unwrap();
    assert_eq!(manifest, std::fs::read_to_string(b.path().join("manifest.json")).unwrap());
    for name in ["0000_f.dgf", "0003_w.dgf", "0002_sigma.dgf"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let o = sparsedom(&["gen", "--seed", "9", "--spec", "weights=nope", "--out", a.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn sweep_determinism_and_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let plan = write(dir.path(), "plan.txt", PLAN);
    let out1 = dir.path().join("r1.csv");
    let out2 = dir.path().join("r2.csv");
    let base = dir.path().join("baselines.json");
    let base_s = base.to_str().unwrap();
    let o = sparsedom(&["sweep", "--plan", &plan, "--out", out1.to_str().unwrap(), "--baselines", base_s, "--update-baselines"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = sparsedom(&["sweep", "--plan", &plan, "--out", out2.to_str().unwrap(), "--baselines", base_s]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv1 = std::fs::read_to_string(&out1).unwrap();
    let csv2 = std::fs::read_to_string(&out2).unwrap();
    assert_eq!(csv1.lines().count(), 1 + 8 * 2 + 8);
    assert!(csv1.starts_with("verifier,instance_index,instance,p,delta,eps,tau,lhs,rhs,ratio,bound,pass,checks"));
    let out3 = dir.path().join("r3.csv");
    sparsedom(&["sweep", "--plan", &plan, "--out", out3.to_str().unwrap(), "--baselines", base_s]);
    assert_eq!(csv2, std::fs::read_to_string(&out3).unwrap());

    let mut frozen: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&base).unwrap()).unwrap();
    let e = frozen["endpoint"].as_f64().unwrap();
    frozen["endpoint"] = (e / 2.0).into();
    std::fs::write(&base, frozen.to_string()).unwrap();
    let o = sparsedom(&["sweep", "--plan", &plan, "--out", out2.to_str().unwrap(), "--baselines", base_s]);
    assert_eq!(code(&o), 2);

    let bad = write(dir.path(), "bad.txt", "[corpus]\nseed = 1\n[nosuch]\n");
    assert_eq!(code(&sparsedom(&["sweep", "--plan", &bad, "--out", out2.to_str().unwrap()])), 1);
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.dgf", F);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_sparsedom"))
            .env("SPARSEDOM_THREADS", threads)
            .args(["maximal", "--in", &f])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("zero")), 1);
}
