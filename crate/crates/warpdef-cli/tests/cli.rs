use std::process::{Command, Output};

fn warpdef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpdef")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn commutator_of_the_canonical_pair() {
    let out = warpdef(&["commutator", "X1", "P1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["commutator"], "i");
}

#[test]
fn deform_landau_reports_the_reference_form() {
    let out = warpdef(&["deform", "--model", "landau"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["model"], "landau");
    assert!(v["deformed"].as_str().unwrap().contains("B"));
}

#[test]
fn exit_codes() {
    assert_eq!(warpdef(&["deform", "--model", "nonsense"]).status.code(), Some(2));
    assert_eq!(warpdef(&["deform", "--model", "landau", "--operator", "P1^3"]).status.code(), Some(3));
    assert_eq!(warpdef(&["spectrum", "--model", "landau", "--grid", "1,4", "--constants", "e=1,m=1,B=1"]).status.code(), Some(2));
    assert_eq!(warpdef(&["spectrum", "--model", "landau", "--k", "65", "--constants", "e=1,m=1,B=1"]).status.code(), Some(2));
    assert_eq!(warpdef(&["verify", "--only", "ring", "--inject-sign-flip"]).status.code(), Some(0));
    assert_eq!(warpdef(&["verify", "--only", "lemmas,gauge", "--inject-sign-flip"]).status.code(), Some(1));
    assert_eq!(warpdef(&["gauge", "--model", "landau", "--inject-sign-flip"]).status.code(), Some(1));
    assert_eq!(warpdef(&["--bogus"]).status.code(), Some(2));
}

#[test]
fn coarse_grid_warns_but_succeeds() {
    let out = warpdef(&["spectrum", "--model", "landau", "--grid", "8,12", "--k", "4", "--constants", "e=1,m=1,B=1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["too_coarse"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("warpdef-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# landau on a small grid\nmodel = landau\ngrid = 24,4\nk = 4\nconstants = e=1, m=1, B=1\n").unwrap();
    let path = cfg.to_str().unwrap();
    let out = warpdef(&["spectrum", "--config", path, "--k", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["k"], 6);
    assert_eq!(v["grid"]["points"], 24);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(warpdef(&["spectrum", "--config", path]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_spectrum() {
    let out = warpdef(&["spectrum", "--model", "free", "--grid", "20,4", "--k", "3", "--format", "csv", "--constants", "m=1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue,residual");
    assert_eq!(lines.len(), 4);
}

#[test]
fn inline_specification_matches_the_preset() {
    let preset = json(&warpdef(&["deform", "--model", "landau"]));
    let inline = json(&warpdef(&["deform", "--B", "-e*B/2,0,0", "--coupling", "e"]));
    assert_eq!(preset["deformed"], inline["deformed"]);
}

#[test]
fn holonomy_of_the_flux_line() {
    let out = warpdef(&["holonomy", "--model", "aharonov_bohm", "--constants", "e=1,phi_M=0.8", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let h = json(&out)["loops"][0]["holonomy"].as_f64().unwrap();
    assert!((h - 0.8).abs() < 1e-6);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["spectrum", "--model", "landau", "--grid", "64,12", "--k", "8", "--constants", "e=1,m=1,B=1", "--seed", "3"];
    assert_eq!(warpdef(&args).stdout, warpdef(&args).stdout);
}

#[test]
fn out_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join(format!("warpdef-out-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = warpdef(&["commutator", "X2", "P2", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["commutator"], "i");
    std::fs::remove_file(&path).ok();
}
