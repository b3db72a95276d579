mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixture_path, hash_fixtures};

fn layerctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layerctx"))
        .args(args)
        .output()
        .expect("spawn layerctx")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn demo_trace() {
    let out = layerctx(&["demo"]);
    assert!(out.status.success());
    assert_eq!(
        text(&out.stdout),
        "Search\nRequest!\nSearch\nSearch\nRequest!\nCache...\nSearch\n"
    );
}

#[test]
fn check_exit_codes() {
    let person = fixture_path("person");
    let out = layerctx(&["check", path_arg(&person)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());

    let bad = fixture_path("duplicate_partial");
    let out = layerctx(&["check", path_arg(&person), path_arg(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("duplicate_partial.lctx:11: duplicate-partial: "), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(layerctx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(layerctx(&["generate", "x.lctx"]).status.code(), Some(2));
    assert_eq!(layerctx(&["bench", "--calls", "0"]).status.code(), Some(2));
    assert_eq!(
        layerctx(&["bench", "--k-max", "6", "--calls", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn generate_writes_and_lists_files() {
    let before = hash_fixtures();
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("gen");
    let out = layerctx(&[
        "generate",
        path_arg(&fixture_path("person")),
        "--out-dir",
        path_arg(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let listed: Vec<String> = text(&out.stdout).lines().map(String::from).collect();
    assert_eq!(listed.len(), 4);
    for path in &listed {
        assert!(Path::new(path).is_file(), "{path}");
    }
    let leftovers: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(leftovers.len(), 2, "staging directory left behind: {leftovers:?}");
    assert_eq!(hash_fixtures(), before);
}

#[test]
fn generate_with_no_inputs_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = layerctx(&["generate", "--out-dir", path_arg(tmp.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn failing_input_blocks_all_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("gen");
    let out = layerctx(&[
        "generate",
        path_arg(&fixture_path("person")),
        path_arg(&fixture_path("signature_mismatch")),
        "--out-dir",
        path_arg(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out_dir.exists());
}

#[test]
fn duplicate_class_across_files() {
    let tmp = tempfile::tempdir().unwrap();
    let person = fixture_path("person");
    let out = layerctx(&[
        "generate",
        path_arg(&person),
        path_arg(&person),
        "--out-dir",
        path_arg(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("duplicate-class"));
}

#[test]
fn custom_templates_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let templates = tmp.path().join("tmpl");
    fs::create_dir(&templates).unwrap();
    fs::write(templates.join("layer-decl.tmpl"), "L {{qualified_name}}\n").unwrap();
    fs::write(
        templates.join("registration-shim.tmpl"),
        "{{class_name}}:{{#each partials}} {{method_name}}{{/each}}\n",
    )
    .unwrap();
    let out_dir = tmp.path().join("gen");
    let manifest = tmp.path().join("m.json");
    let out = layerctx(&[
        "generate",
        path_arg(&fixture_path("person")),
        "--out-dir",
        path_arg(&out_dir),
        "--templates",
        path_arg(&templates),
        "--manifest",
        path_arg(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(
        fs::read_to_string(out_dir.join("shims/Person.shim")).unwrap(),
        "Person: printALayer printBLayer printCLayer\n"
    );
    assert_eq!(
        fs::read_to_string(out_dir.join("layers/myprj.layers.A.lctx")).unwrap(),
        "L myprj.layers.A\n"
    );
    let m = layerctx::codegen::Manifest::from_json(&fs::read_to_string(manifest).unwrap()).unwrap();
    assert_eq!(m.classes[0].partials.len(), 3);
}

#[test]
fn bench_csv_to_file() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("b.csv");
    let out = layerctx(&[
        "bench",
        "--calls",
        "10",
        "--repeats",
        "1",
        "--k-max",
        "1",
        "--csv",
        path_arg(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("cop ns/call"));
    let csv = fs::read_to_string(csv).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("k,mode,median_ns,calls,repeats\n0,cop,"));
}

#[test]
fn rerun_produces_identical_bytes() {
    use sha2::{Digest, Sha256};
    let tmp = tempfile::tempdir().unwrap();
    let digest_of = |dir: &Path| {
        let out = layerctx(&["generate", path_arg(&fixture_path("person")), "--out-dir", path_arg(dir)]);
        assert_eq!(out.status.code(), Some(0));
        let mut hasher = Sha256::new();
        for path in text(&out.stdout).lines() {
            hasher.update(path.strip_prefix(path_arg(dir)).unwrap());
            hasher.update(fs::read(path).unwrap());
        }
        hasher.finalize()
    };
    let first = digest_of(&tmp.path().join("a"));
    assert_eq!(digest_of(&tmp.path().join("a")), first);
    assert_eq!(digest_of(&tmp.path().join("b")), first);
}
