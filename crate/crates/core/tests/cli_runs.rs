use std::fs;
use std::process::Command as Proc;

use schurcat::cli::{cache_key, exit_code, run, CacheEventKind, Command, RunConfig};
use schurcat::gbasis::DegreeCap;
use schurcat::presentation::{instantiate_window_with, FSpec, Gen, Params};
use schurcat::rootdata::build_cartan;

fn cfg(json: &str) -> RunConfig {
    RunConfig::from_json(json).unwrap()
}

#[test]
fn hilbert_a2_confirms_pbw() {
    let r = run(Command::Hilbert, &cfg(r#"{"type": "A2", "hilbert_cap": 8}"#)).unwrap();
    assert_eq!(r.result["pbw"], "confirmed");
    for row in r.result["table"].as_array().unwrap() {
        assert_eq!(row["dim"], row["kostant"]);
    }
}

#[test]
fn schur_check_a1_reports_match() {
    let r = run(Command::SchurCheck, &cfg(r#"{"type": "A1", "f": "classical", "window": 8, "homcap": 4}"#)).unwrap();
    assert_eq!(r.result["verdict"], "match");
    assert_eq!(r.result["betti"], serde_json::json!([1, 0, 1, 0, 0]));
    assert_eq!(r.result["euler"]["euler_ext"], 2);
    assert_eq!(r.schema, "schurcat.report/v1");
}

#[test]
fn repeated_runs_are_bit_identical() {
    let c = cfg(r#"{"type": "A1", "modules": ["trivial:0", "verma:-1:3"], "window": 7, "margin": 3, "homcap": 2}"#);
    let a = run(Command::KoszulCheck, &c).unwrap();
    let b = run(Command::KoszulCheck, &c).unwrap();
    assert_eq!(a.deterministic_json(), b.deterministic_json());
    assert_eq!(a.config_hash, b.config_hash);
}

#[test]
fn cache_hot_and_cold_agree_and_corruption_is_quarantined() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(r#"{"type": "A2", "hilbert_cap": 6}"#);
    c.cache = Some(dir.path().to_path_buf());
    let cold = run(Command::Hilbert, &c).unwrap();
    assert_eq!(cold.run_meta.cache_events[0].kind, CacheEventKind::Miss);
    let hot = run(Command::Hilbert, &c).unwrap();
    assert_eq!(hot.run_meta.cache_events[0].kind, CacheEventKind::Hit);
    assert_eq!(cold.deterministic_json(), hot.deterministic_json());

    let path = &hot.run_meta.cache_events[0].path;
    let mut bytes = fs::read(path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x04;
    fs::write(path, bytes).unwrap();
    let healed = run(Command::Hilbert, &c).unwrap();
    let ev = &healed.run_meta.cache_events[0];
    assert_eq!(ev.kind, CacheEventKind::Quarantined);
    assert!(ev.reason.is_some());
    assert!(ev.path.contains("quarantine"));
    assert_eq!(healed.deterministic_json(), cold.deterministic_json());
    let again = run(Command::Hilbert, &c).unwrap();
    assert_eq!(again.run_meta.cache_events[0].kind, CacheEventKind::Hit);
}

#[test]
fn unreadable_cache_is_a_hard_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let mut c = cfg(r#"{"type": "A1"}"#);
    c.cache = Some(blocker.clone());
    let r = run(Command::Hilbert, &c);
    assert_eq!(exit_code(&r), 3);
    let msg = r.unwrap_err().to_string();
    assert!(msg.contains(&blocker.display().to_string()), "{msg}");
}

#[test]
fn distinct_orders_give_distinct_keys() {
    let p = Params::new(build_cartan('A', 1).unwrap(), FSpec::ClassicalLinear);
    let a = instantiate_window_with(&p, 3, 1, &[Gen::X(0), Gen::Y(0)]).unwrap();
    let b = instantiate_window_with(&p, 3, 1, &[Gen::Y(0), Gen::X(0)]).unwrap();
    assert_ne!(cache_key(&a, DegreeCap::len(8)), cache_key(&b, DegreeCap::len(8)));
    assert_ne!(cache_key(&a, DegreeCap::len(8)), cache_key(&a, DegreeCap::len(9)));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_schurcat");
    let bad = Proc::new(bin).args(["ext", "--f", "nonsense"]).output().unwrap();
    assert_ne!(bad.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`f`"));
    let bad_q = Proc::new(bin).args(["schur-check", "--f", "qinteger", "--q=-1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&bad_q.stderr).contains("`q`"));

    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.json");
    fs::write(&conf, r#"{"type": "A1", "window": 5, "homcap": 4}"#).unwrap();
    let out = dir.path().join("report.json");
    let ok = Proc::new(bin)
        .args(["schur-check", "--config", conf.to_str().unwrap(), "--window", "6", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["ext"]["radius"], 6);
    assert_eq!(report["result"]["verdict"], "match");

    // an inconclusive verdict is still a completed run
    let inc = Proc::new(bin).args(["schur-check", "--type", "A1", "--homcap", "1", "--margin", "2"]).output().unwrap();
    assert_eq!(inc.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&inc.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "inconclusive");
}

#[test]
fn other_commands_complete() {
    let r = run(Command::RootData, &cfg(r#"{"type": "B2"}"#)).unwrap();
    assert_eq!(r.result["weyl"]["order"], 8);
    let r = run(Command::BuildModule, &cfg(r#"{"modules": ["simple:1"]}"#)).unwrap();
    assert_eq!(r.result["checks"][0]["total_dim"], 3);
    assert_eq!(r.result["checks"][0]["relations"]["status"], "pass");
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.json");
    fs::write(&f, serde_json::to_string(&r.result["modules"][0]).unwrap()).unwrap();
    let c = RunConfig {
        modules: Some(vec![format!("file:{}", f.display())]),
        ..RunConfig::default()
    };
    let r = run(Command::CheckModule, &c).unwrap();
    assert_eq!(r.result["checks"][0]["simple"]["verdict"], "simple");
    let r = run(Command::Ext, &cfg(r#"{"modules": ["trivial:0", "simple:1"], "homcap": 2, "margin": 3}"#)).unwrap();
    assert_eq!(r.result["ext_full_probe"]["status"], "disabled");
    assert_eq!(r.result["table"]["entries"].as_array().unwrap().len(), 4);
}
