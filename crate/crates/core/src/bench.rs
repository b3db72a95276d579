//! Dispatch overhead measurement.
//!
//! One layered method has five partials in five layers, each bumping a counter
//! and proceeding once. For each `k` the first `k` layers are activated and the
//! method is called `calls` times. The baseline calls `f_k`, a plain function
//! that calls `f_{k-1}` and so on down to `f_0`, so both modes run `k + 1`
//! bodies per call.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use thiserror::Error;

use crate::ctx;
use crate::dispatch::{Method, Proceed};
use crate::layer::{register_layer, LayerId};
use crate::table::{DispatchTable, MethodKey, TableBuilder};

pub const MAX_LAYERS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub calls: u64,
    pub k_values: Vec<usize>,
    pub repeats: usize,
    pub warmup: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            calls: 10_000_000,
            k_values: (0..=MAX_LAYERS).collect(),
            repeats: 5,
            warmup: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.calls < 1 {
            return Err(BenchError::InvalidConfig("calls must be at least 1".into()));
        }
        if self.repeats < 1 {
            return Err(BenchError::InvalidConfig("repeats must be at least 1".into()));
        }
        if let Some(k) = self.k_values.iter().find(|k| **k > MAX_LAYERS) {
            return Err(BenchError::InvalidConfig(format!(
                "k = {k} exceeds the {MAX_LAYERS} available layers"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Cop,
    Baseline,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cop => "cop",
            Mode::Baseline => "baseline",
        }
    }
}

/// Measurements for one `(k, mode)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchResult {
    pub k: usize,
    pub mode: Mode,
    pub calls: u64,
    pub repeats: usize,
    pub samples_ns: Vec<u64>,
    pub median_ns: u64,
    /// Counter increase during each timed repeat.
    pub counter_deltas: Vec<u64>,
}

impl BenchResult {
    pub fn expected_delta(&self) -> u64 {
        self.calls * (self.k as u64 + 1)
    }

    pub fn counters_exact(&self) -> bool {
        self.counter_deltas.iter().all(|d| *d == self.expected_delta())
    }
}

pub fn median(samples: &[u64]) -> u64 {
    let mut s = samples.to_vec();
    s.sort_unstable();
    match s.len() {
        0 => 0,
        n if n % 2 == 1 => s[n / 2],
        n => (s[n / 2 - 1] + s[n / 2]) / 2,
    }
}

#[derive(Debug, Default)]
pub struct Counter {
    pub hits: u64,
}

pub struct BenchFixture {
    pub table: DispatchTable,
    pub layers: [LayerId; MAX_LAYERS],
    pub method: Method<Counter, u64, u64>,
}

pub fn bench_key() -> MethodKey {
    MethodKey::new("Bench", "call")
}

pub fn setup_fixture() -> BenchFixture {
    let layers: [LayerId; MAX_LAYERS] =
        std::array::from_fn(|i| register_layer(&format!("bench.layers.L{}", i + 1)).expect("valid layer name"));
    let mut t = TableBuilder::new();
    t.register_base(bench_key(), |c: &mut Counter, x: u64| {
        c.hits += 1;
        x
    })
    .expect("fresh table");
    for layer in layers {
        t.register_partial(
            bench_key(),
            layer,
            |c: &mut Counter, x: u64, p: Proceed<'_, Counter, u64, u64>| {
                c.hits += 1;
                p.call(c, x)
            },
        )
        .expect("fresh table");
    }
    let table = t.finalize().expect("every partial has a base");
    let method = table.method(&bench_key()).expect("registered above");
    BenchFixture { table, layers, method }
}

#[inline(never)]
fn f0(c: &mut Counter, x: u64) -> u64 {
    c.hits += 1;
    x
}

#[inline(never)]
fn f1(c: &mut Counter, x: u64) -> u64 {
    c.hits += 1;
    f0(c, x)
}

#[inline(never)]
fn f2(c: &mut Counter, x: u64) -> u64 {
    c.hits += 1;
    f1(c, x)
}

#[inline(never)]
fn f3(c: &mut Counter, x: u64) -> u64 {
    c.hits += 1;
    f2(c, x)
}

#[inline(never)]
fn f4(c: &mut Counter, x: u64) -> u64 {
    c.hits += 1;
    f3(c, x)
}

#[inline(never)]
fn f5(c: &mut Counter, x: u64) -> u64 {
    c.hits += 1;
    f4(c, x)
}

/// `BASELINE[k]` runs `k + 1` bodies.
pub const BASELINE: [fn(&mut Counter, u64) -> u64; MAX_LAYERS + 1] = [f0, f1, f2, f3, f4, f5];

fn run_loop(calls: u64, counter: &mut Counter, mut f: impl FnMut(&mut Counter, u64) -> u64) {
    for i in 0..calls {
        black_box(f(counter, black_box(i)));
    }
}

fn measure(config: &BenchConfig, k: usize, mode: Mode, mut f: impl FnMut(&mut Counter, u64) -> u64) -> BenchResult {
    let mut counter = Counter::default();
    if config.warmup {
        run_loop(config.calls, &mut counter, &mut f);
    }
    let mut samples_ns = Vec::with_capacity(config.repeats);
    let mut counter_deltas = Vec::with_capacity(config.repeats);
    for _ in 0..config.repeats {
        let before = counter.hits;
        let start = Instant::now();
        run_loop(config.calls, &mut counter, &mut f);
        let elapsed = start.elapsed();
        samples_ns.push(u64::try_from(elapsed.as_nanos()).unwrap_or(u64::MAX));
        counter_deltas.push(counter.hits - before);
    }
    BenchResult {
        k,
        mode,
        calls: config.calls,
        repeats: config.repeats,
        median_ns: median(&samples_ns),
        samples_ns,
        counter_deltas,
    }
}

/// Times the layered method with `k` layers active, for each configured `k`.
pub fn run_cop_bench(fixture: &BenchFixture, config: &BenchConfig) -> Result<Vec<BenchResult>, BenchError> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.k_values.len());
    for &k in &config.k_values {
        let active = &fixture.layers[..k];
        if k > 0 {
            ctx::with_active_layers(active.iter().copied()).expect("k > 0");
        }
        let method = &fixture.method;
        out.push(measure(config, k, Mode::Cop, |c, x| method.call(c, x)));
        if k > 0 {
            ctx::end().expect("pushed above");
        }
    }
    Ok(out)
}

pub fn run_baseline_bench(config: &BenchConfig) -> Result<Vec<BenchResult>, BenchError> {
    config.validate()?;
    Ok(config
        .k_values
        .iter()
        .map(|&k| measure(config, k, Mode::Baseline, BASELINE[k]))
        .collect())
}

pub const CSV_HEADER: &str = "k,mode,median_ns,calls,repeats";

/// One row per `(k, mode)`, `k` ascending and `cop` before `baseline`.
pub fn emit_csv(results: &[BenchResult]) -> String {
    let mut rows: Vec<&BenchResult> = results.iter().collect();
    rows.sort_by(|a, b| a.k.cmp(&b.k).then(a.mode.cmp(&b.mode)));
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            r.mode.as_str(),
            r.median_ns,
            r.calls,
            r.repeats
        )
        .expect("writing to a String");
    }
    out
}

/// Adjacent `(k, k')` pairs of one mode where the median drops by more than
/// `tolerance` (a fraction, e.g. 0.05).
pub fn monotonicity_violations(results: &[BenchResult], mode: Mode, tolerance: f64) -> Vec<(usize, usize)> {
    let mut rows: Vec<&BenchResult> = results.iter().filter(|r| r.mode == mode).collect();
    rows.sort_by_key(|r| r.k);
    rows.windows(2)
        .filter(|w| {
            let (lo, hi) = (w[0].median_ns as f64, w[1].median_ns as f64);
            hi.partial_cmp(&(lo * (1.0 - tolerance))) == Some(Ordering::Less)
        })
        .map(|w| (w[0].k, w[1].k))
        .collect()
}
