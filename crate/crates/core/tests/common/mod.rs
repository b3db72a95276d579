//! Golden-file harness shared by the codegen and acceptance targets.
//!
//! Each fixture `fixtures/NAME.lctx` has a directory `golden/NAME/` holding
//! `check.txt` (diagnostics and exit status), and for clean inputs
//! `files.txt`, `manifest.json` and the generated tree under `out/`.
//! Run with `UPDATE_GOLDEN=1` to rewrite them.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use layerctx::cli::{cmd_check, cmd_generate, GenerateOptions, EXIT_OK};
use sha2::{Digest, Sha256};

pub mod oracle;

pub const FIXTURES: [&str; 6] = [
    "person",
    "signature_mismatch",
    "duplicate_partial",
    "ambiguous_suffix",
    "unmarked_class",
    "empty_unit",
];

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.lctx"))
}

pub fn hash_fixtures() -> BTreeMap<String, String> {
    FIXTURES
        .iter()
        .map(|name| {
            let bytes = fs::read(fixture_path(name)).expect("fixture readable");
            let digest = Sha256::digest(&bytes);
            (name.to_string(), digest.iter().map(|b| format!("{b:02x}")).collect())
        })
        .collect()
}

fn utf8(bytes: Vec<u8>) -> String {
    String::from_utf8(bytes).expect("utf-8 output")
}

fn read_tree(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) {
    let Ok(entries) = fs::read_dir(dir) else { return };
    for entry in entries {
        let path = entry.expect("dir entry").path();
        if path.is_dir() {
            read_tree(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).expect("under root");
            let rel = rel.to_string_lossy().replace('\\', "/");
            out.insert(rel, fs::read_to_string(&path).expect("utf-8 file"));
        }
    }
}

/// Runs `check` and `generate` on one fixture and returns the golden file set.
/// Panics if a failing input leaves anything in the output directory.
pub fn render_case(name: &str) -> BTreeMap<String, String> {
    let input = fixture_path(name);
    let prefix = format!("{}/", fixtures_dir().display());
    let inputs = [input];
    let mut files = BTreeMap::new();

    let mut err = Vec::new();
    let status = cmd_check(&inputs, &mut err).expect("write to Vec");
    let diagnostics = utf8(err).replace(&prefix, "");
    files.insert("check.txt".to_string(), format!("{diagnostics}exit: {status}\n"));

    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let manifest = tmp.path().join("manifest.json");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let gen_status = cmd_generate(
        &GenerateOptions {
            inputs: &inputs,
            out_dir: &out_dir,
            template_dir: None,
            manifest: Some(&manifest),
        },
        &mut out,
        &mut err,
    )
    .expect("write to Vec");
    assert_eq!(gen_status, status, "{name}: check and generate disagree");

    if status == EXIT_OK {
        let listing = utf8(out).replace(&format!("{}/", out_dir.display()), "");
        files.insert("files.txt".to_string(), listing);
        files.insert(
            "manifest.json".to_string(),
            fs::read_to_string(&manifest).expect("manifest written"),
        );
        let mut tree = BTreeMap::new();
        read_tree(&out_dir, &out_dir, &mut tree);
        for (rel, text) in tree {
            files.insert(format!("out/{rel}"), text);
        }
    } else {
        assert!(out.is_empty(), "{name}: generate reported written files");
        let mut tree = BTreeMap::new();
        read_tree(&out_dir, &out_dir, &mut tree);
        assert!(tree.is_empty(), "{name}: generate wrote {:?}", tree.keys());
        assert!(!manifest.exists(), "{name}: manifest written on failure");
    }
    files
}

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

/// Compares the rendered files with the stored goldens, or rewrites them when
/// `UPDATE_GOLDEN` is set. Returns a description of every difference.
pub fn check_golden(name: &str) -> Result<(), String> {
    let rendered = render_case(name);
    let dir = golden_dir().join(name);
    if updating() {
        let _ = fs::remove_dir_all(&dir);
        for (rel, text) in &rendered {
            let path = dir.join(rel);
            fs::create_dir_all(path.parent().expect("has parent")).expect("create golden dir");
            fs::write(path, text).expect("write golden");
        }
        return Ok(());
    }
    let mut stored = BTreeMap::new();
    read_tree(&dir, &dir, &mut stored);
    let mut problems = Vec::new();
    for (rel, text) in &rendered {
        match stored.get(rel) {
            None => problems.push(format!("{name}/{rel}: missing golden")),
            Some(g) if g != text => problems.push(format!("{name}/{rel}: differs\n--- golden\n{g}--- actual\n{text}")),
            Some(_) => {}
        }
    }
    for rel in stored.keys().filter(|rel| !rendered.contains_key(*rel)) {
        problems.push(format!("{name}/{rel}: golden file not produced"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("\n"))
    }
}
