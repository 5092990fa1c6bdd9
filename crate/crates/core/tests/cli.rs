use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ramsey_noise::scenario::{reproduce, ScenarioConfig, ScenarioKind, Target};
use ramsey_noise::RamseyProtocol;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ramsey-noise"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(str::to_owned).collect()
}

#[test]
fn same_seed_gives_byte_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"scenario":"compare","noise":{"kind":"tls","tls":[{"v":0.3,"w01":0.05,"w10":0.02}]},"run":{"cycles":3000,"repetitions":4,"seed":9},"analysis":{"k_max":8}}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let out = run(&["compare", &cfg, "--out-dir", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["compare.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = tmp.path().join("c");
    run(&["compare", &cfg, "--out-dir", c.to_str().unwrap(), "--seed", "10"]);
    assert_ne!(fs::read(a.join("compare.csv")).unwrap(), fs::read(c.join("compare.csv")).unwrap());
}

#[test]
fn outputs_carry_config_and_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.json", r#"{"scenario":"simulate","run":{"cycles":50,"repetitions":2,"seed":4}}"#);
    let out = run(&["simulate", &cfg, "--out-dir", tmp.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("outcomes.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# ramsey-noise"));
    assert_eq!(lines.next().unwrap(), "# seed: 4");
    let conf = lines.next().unwrap().strip_prefix("# config: ").unwrap();
    let parsed = ScenarioConfig::from_json(conf).unwrap();
    assert_eq!(parsed.run.seed, 4);
}

#[test]
fn empty_noise_analytic_is_a_single_r1_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "a.json", r#"{"scenario":"analytic"}"#);
    let out = run(&["analytic", &cfg, "--out-dir", tmp.path().to_str().unwrap()]);
    assert!(out.status.success());
    let lines = data_lines(&tmp.path().join("analytic.csv"));
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "quantity,k,l,value");
    let v: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!(lines[1].starts_with("r1,"));
    let p = RamseyProtocol::default();
    assert!((v - ramsey_noise::model::ramsey_probability(0.0, &p)).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_key = write(tmp.path(), "k.json", r#"{"scenario":"analytic","bogus":1}"#);
    assert_eq!(run(&["analytic", &bad_key]).status.code(), Some(2));
    let bad_phys = write(tmp.path(), "p.json", r#"{"scenario":"analytic","protocol":{"t_r":1.0,"t_cyc":0.5}}"#);
    assert_eq!(run(&["analytic", &bad_phys]).status.code(), Some(2));
    let wrong_kind = write(tmp.path(), "w.json", r#"{"scenario":"simulate"}"#);
    assert_eq!(run(&["analytic", &wrong_kind]).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "fig99"]).status.code(), Some(2));
    let huge = write(
        tmp.path(),
        "h.json",
        r#"{"scenario":"simulate","noise":{"kind":"tls","tls":[{"v":0.2,"w01":0.1,"w10":0.1}]},"run":{"cycles":100000000,"repetitions":1000}}"#,
    );
    let out = run(&["simulate", &huge]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn reproduce_fig4_has_two_datasets_at_the_working_point() {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Reproduce, RamseyProtocol::default(), Default::default());
    cfg.run.cycles = 2000;
    cfg.run.repetitions = 4;
    cfg.analysis.k_max = 5;
    let art = reproduce(Target::Fig4, &cfg).unwrap();
    for name in ["fig4_wmin1e-3", "fig4_wmin1e-5"] {
        assert!(art.table(name).is_some());
        let f0 = art.summary[format!("{name}_f0")].as_f64().unwrap();
        assert!((f0 - 0.16).abs() < 0.005, "{name}: f0 = {f0}");
    }
}

#[test]
fn reproduce_table_d1_has_six_rows() {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Reproduce, RamseyProtocol::default(), Default::default());
    cfg.run.cycles = 20_000;
    cfg.run.repetitions = 2;
    let art = reproduce(Target::TableD1, &cfg).unwrap();
    let t = art.table("tableD1").unwrap();
    assert_eq!(t.rows.len(), 6);
    for b in t.column("scaled_std_binomial").unwrap() {
        assert!((b - 0.379).abs() < 0.379 * 0.01);
    }
}

#[test]
fn every_target_name_parses() {
    for t in Target::ALL {
        assert_eq!(t.name().parse::<Target>().unwrap(), t);
    }
}

#[test]
fn example_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap();
            n += 1;
        }
    }
    assert!(n >= 5);
}
