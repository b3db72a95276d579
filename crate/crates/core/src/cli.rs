//! Command implementations behind the `layerctx` binary.
//!
//! Each command writes data to `out`, diagnostics to `err` and returns the
//! process exit status: 0 on success, 1 on violations or errors, 2 on usage
//! errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::bench::{self, BenchConfig, Mode};
use crate::codegen::{generate, scan, Manifest, TemplateSet};
use crate::demo;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn scan_file(path: &Path, err: &mut dyn Write) -> io::Result<Option<Manifest>> {
    let src = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "{}: io-error: {e}", path.display())?;
            return Ok(None);
        }
    };
    match scan(&src) {
        Ok(m) => Ok(Some(m)),
        Err(e) => {
            for d in e.0 {
                writeln!(err, "{}:{d}", path.display())?;
            }
            Ok(None)
        }
    }
}

/// Scans every input and merges the manifests. `None` if anything was
/// reported.
fn scan_all(inputs: &[PathBuf], err: &mut dyn Write) -> io::Result<Option<Manifest>> {
    let mut merged = Some(Manifest::default());
    for path in inputs {
        let Some(m) = scan_file(path, err)? else {
            merged = None;
            continue;
        };
        if let Some(acc) = merged.take() {
            match Manifest::merge([acc, m]) {
                Ok(next) => merged = Some(next),
                Err(d) => writeln!(err, "{}: {}: {}", path.display(), d.code, d.message)?,
            }
        }
    }
    Ok(merged)
}

pub fn cmd_check(inputs: &[PathBuf], err: &mut dyn Write) -> io::Result<i32> {
    Ok(match scan_all(inputs, err)? {
        Some(_) => EXIT_OK,
        None => EXIT_FAILURE,
    })
}

pub struct GenerateOptions<'a> {
    pub inputs: &'a [PathBuf],
    pub out_dir: &'a Path,
    /// Built-in templates when `None`.
    pub template_dir: Option<&'a Path>,
    /// Also write the merged manifest as JSON here.
    pub manifest: Option<&'a Path>,
}

/// Writes `files` under `out_dir` through a staging directory, so that a
/// failure leaves no partial shim set behind. Returns the final paths.
fn write_staged(out_dir: &Path, files: &BTreeMap<String, String>) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let staging = tempfile::Builder::new()
        .prefix(".layerctx-staging")
        .tempdir_in(out_dir)?;
    for (rel, text) in files {
        let path = staging.path().join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, text)?;
    }
    let mut written = Vec::with_capacity(files.len());
    for rel in files.keys() {
        let target = out_dir.join(rel);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::rename(staging.path().join(rel), &target)?;
        written.push(target);
    }
    Ok(written)
}

pub fn cmd_generate(opts: &GenerateOptions<'_>, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let templates = match opts.template_dir {
        Some(dir) => TemplateSet::from_dir(dir),
        None => Ok(TemplateSet::builtin()),
    };
    let templates = match templates {
        Ok(t) => t,
        Err(e) => {
            writeln!(err, "layerctx: template-error: {e}")?;
            return Ok(EXIT_FAILURE);
        }
    };
    let Some(manifest) = scan_all(opts.inputs, err)? else {
        return Ok(EXIT_FAILURE);
    };
    let files = match generate(&manifest, &templates) {
        Ok(f) => f,
        Err(e) => {
            writeln!(err, "layerctx: template-error: {e}")?;
            return Ok(EXIT_FAILURE);
        }
    };
    let written = match write_staged(opts.out_dir, &files) {
        Ok(w) => w,
        Err(e) => {
            writeln!(err, "{}: io-error: {e}", opts.out_dir.display())?;
            return Ok(EXIT_FAILURE);
        }
    };
    for path in written {
        writeln!(out, "{}", path.display())?;
    }
    if let Some(path) = opts.manifest {
        if let Err(e) = fs::write(path, manifest.to_json()) {
            writeln!(err, "{}: io-error: {e}", path.display())?;
            return Ok(EXIT_FAILURE);
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_demo(out: &mut dyn Write) -> io::Result<i32> {
    for line in demo::run() {
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchOptions {
    pub calls: u64,
    pub k_max: usize,
    pub repeats: usize,
    pub csv: Option<PathBuf>,
    pub no_warmup: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        let d = BenchConfig::default();
        BenchOptions {
            calls: d.calls,
            k_max: bench::MAX_LAYERS,
            repeats: d.repeats,
            csv: None,
            no_warmup: false,
        }
    }
}

/// Runs both sweeps. The CSV goes to `--csv` or `out`; the median table goes
/// to `out` when the CSV has its own file, otherwise to `err`.
pub fn cmd_bench(opts: &BenchOptions, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let config = BenchConfig {
        calls: opts.calls,
        k_values: (0..=opts.k_max).collect(),
        repeats: opts.repeats,
        warmup: !opts.no_warmup,
    };
    if let Err(e) = config.validate() {
        writeln!(err, "layerctx bench: {e}")?;
        return Ok(EXIT_USAGE);
    }
    let fixture = bench::setup_fixture();
    let mut results = bench::run_cop_bench(&fixture, &config).expect("validated");
    results.extend(bench::run_baseline_bench(&config).expect("validated"));

    let mut status = EXIT_OK;
    for r in results.iter().filter(|r| !r.counters_exact()) {
        writeln!(
            err,
            "layerctx bench: counter mismatch at k={} mode={}: expected {} per repeat, got {:?}",
            r.k,
            r.mode.as_str(),
            r.expected_delta(),
            r.counter_deltas
        )?;
        status = EXIT_FAILURE;
    }

    let csv = bench::emit_csv(&results);
    let table: &mut dyn Write = match &opts.csv {
        Some(path) => {
            if let Err(e) = fs::write(path, &csv) {
                writeln!(err, "{}: io-error: {e}", path.display())?;
                return Ok(EXIT_FAILURE);
            }
            out
        }
        None => {
            out.write_all(csv.as_bytes())?;
            err
        }
    };
    writeln!(
        table,
        "{:>2}  {:>14}  {:>14}  {:>7}",
        "k", "cop ns/call", "base ns/call", "ratio"
    )?;
    for k in 0..=opts.k_max {
        let per_call = |mode: Mode| {
            results
                .iter()
                .find(|r| r.k == k && r.mode == mode)
                .map_or(0.0, |r| r.median_ns as f64 / r.calls as f64)
        };
        let (cop, base) = (per_call(Mode::Cop), per_call(Mode::Baseline));
        let ratio = if base > 0.0 { cop / base } else { f64::NAN };
        writeln!(table, "{k:>2}  {cop:>14.3}  {base:>14.3}  {ratio:>7.2}")?;
    }
    Ok(status)
}
