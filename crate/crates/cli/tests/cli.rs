use std::path::Path;
use std::process::{Command, Output};

fn jrcat(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jrcat"));
    cmd.args(args).env_remove("JRCAT_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("JRCAT_OUT_DIR", d);
    }
    cmd.output().expect("run jrcat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn laws_of_partial_functions_pass() {
    let o = jrcat(&["check-laws", "finset_p_2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("PASS\n"));
}

#[test]
fn nojoin_fails_naming_the_pair() {
    let o = jrcat(&["check-laws", "nojoin"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("join: JOIN") && l.contains("hom(A, B)")));
}

#[test]
fn isomorphisms_alone_are_not_geometric() {
    let o = jrcat(&["geometric", "finset_iso_2"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("GEO2 -- empty family"));
    assert_eq!(jrcat(&["geometric", "finset_inj_2"], None).status.code(), Some(0));
}

#[test]
fn roundtrip_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rt.json");
    let o = jrcat(&["roundtrip", "finset_inj_2", "yD", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = read_json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["report"]["witness"]["forward"].is_array());
    assert!(v["report"]["witness"]["backward"].is_array());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = jrcat(&["sheaf-check", "finset_inj_2", "const2"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
    let v = read_json(&dir.path().join("sheaf-check.json"));
    assert_eq!(v["passed"], false);
    assert_eq!(v["violations"][0], "sheaf: SHEAF-UNIQUE -- family [] at 0");
}

#[test]
fn unreadable_bundles_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"objects\": [").unwrap();
    let o = jrcat(&["check-laws", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(jrcat(&["check-laws", "no_such_bundle"], None).status.code(), Some(2));
    assert_eq!(jrcat(&["sheaf-check", "finset_inj_2", "nope"], None).status.code(), Some(2));
}

#[test]
fn transfer_output_feeds_back_in() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("to-jrp.json");
    let o = jrcat(&["transfer", "finset_inj_2", "sigma", "--direction", "to-jrp", "--out", first.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let bundle = dir.path().join("bundle.json");
    std::fs::write(&bundle, serde_json::to_string(&read_json(&first)["bundle"]).unwrap()).unwrap();
    let o = jrcat(&["transfer", bundle.to_str().unwrap(), "sigma~", "--direction", "to-sheaf"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = jrcat(&["roundtrip", bundle.to_str().unwrap(), "sigma~", "--direction", "to-sheaf"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn non_sheaf_transfer_is_a_law_failure() {
    let o = jrcat(&["transfer", "finset_inj_2", "const2", "--direction", "to-jrp"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(jrcat(&["build-par", "finset_inj_2", "--out", p.to_str().unwrap()], None).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // the par bundle loads back and passes its laws
    let par = dir.path().join("par.json");
    std::fs::write(&par, serde_json::to_string(&read_json(&a)["bundle"]).unwrap()).unwrap();
    assert_eq!(jrcat(&["check-laws", par.to_str().unwrap()], None).status.code(), Some(0));
}

#[test]
fn unit_and_karoubi_pass_on_partial_functions() {
    assert_eq!(jrcat(&["unit", "finset_p_2"], None).status.code(), Some(0));
    assert_eq!(jrcat(&["karoubi", "finset_p_2"], None).status.code(), Some(0));
    assert_eq!(jrcat(&["sheafify", "finset_inj_2", "const2"], None).status.code(), Some(0));
    assert_eq!(jrcat(&["topology", "finset_iso_2"], None).status.code(), Some(1));
}
