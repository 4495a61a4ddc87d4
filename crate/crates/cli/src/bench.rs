//! Ordering selection and benchmark sweeps.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use walkprep::ordering::{
    order_combined, order_greedy_insertion, order_mhs_linear, order_mhs_nonlinear, order_mst, order_random, order_shp,
    order_sorted,
};
use walkprep::synth::synthesized_cx_count;
use walkprep::{synthesize_lowered, Circuit, SparseState, SynthOptions, WalkOrder};

use crate::random::random_sparse_state;
use crate::verify::{verify, MAX_VERIFY_QUBITS};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum)]
pub enum OrderKind {
    Sorted,
    Random,
    Mst,
    Shp,
    MhsLinear,
    MhsNonlinear,
    /// Greedy insertion starting from the sorted order.
    GreedySorted,
    /// Greedy insertion starting from MHS Linear.
    GreedyMhs,
    /// The cheaper of Greedy(MHS Linear) and MHS Linear.
    Combined,
}

impl OrderKind {
    pub fn name(&self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Number of nonzero amplitudes as a function of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MSpec {
    N,
    NSquared,
    HalfDense,
    Fixed(usize),
}

impl MSpec {
    /// `n²` and `2^(n-1)` are capped at `2^n`.
    pub fn eval(&self, n: usize) -> usize {
        let dim = 1usize << n;
        match self {
            MSpec::N => n,
            MSpec::NSquared => (n * n).min(dim),
            MSpec::HalfDense => dim / 2,
            MSpec::Fixed(m) => *m,
        }
    }
}

impl FromStr for MSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" => Ok(MSpec::N),
            "n2" => Ok(MSpec::NSquared),
            "half-dense" => Ok(MSpec::HalfDense),
            other => other
                .parse()
                .map(MSpec::Fixed)
                .map_err(|_| format!("expected n, n2, half-dense or an integer, got `{other}`")),
        }
    }
}

/// Walk order of the given kind; `seed` only matters for `Random`.
pub fn order_for(kind: OrderKind, s: &SparseState, seed: u64, opts: SynthOptions) -> walkprep::Result<WalkOrder> {
    let cost = move |st: &SparseState, o: &WalkOrder| synthesized_cx_count(st, o, opts);
    Ok(match kind {
        OrderKind::Sorted => order_sorted(s),
        OrderKind::Random => order_random(s, seed),
        OrderKind::Mst => order_mst(s),
        OrderKind::Shp => order_shp(s),
        OrderKind::MhsLinear => order_mhs_linear(s),
        OrderKind::MhsNonlinear => order_mhs_nonlinear(s),
        OrderKind::GreedySorted => order_greedy_insertion(s, &order_sorted(s), &cost)?,
        OrderKind::GreedyMhs => order_greedy_insertion(s, &order_mhs_linear(s), &cost)?,
        OrderKind::Combined => {
            let initial = order_mhs_linear(s);
            let greedy = order_greedy_insertion(s, &initial, &cost)?;
            order_combined(s, greedy, initial, &cost)?
        }
    })
}

/// Order selection, synthesis and lowering in one call.
pub fn prepare(
    s: &SparseState,
    kind: OrderKind,
    seed: u64,
    opts: SynthOptions,
) -> walkprep::Result<(WalkOrder, Circuit)> {
    let order = order_for(kind, s, seed, opts)?;
    let circuit = synthesize_lowered(s, &order, opts)?;
    Ok((order, circuit))
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub m: MSpec,
    pub orders: Vec<OrderKind>,
    pub count: usize,
    pub seed: u64,
    pub opts: SynthOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub m: usize,
    pub order: String,
    pub seed: u64,
    pub cx: usize,
    pub time_ms: f64,
    /// `None` above the verification limit.
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub order: String,
    pub count: usize,
    pub mean_cx: f64,
    pub stddev: f64,
    /// `1.96 · stddev / √count`.
    pub ci95: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

fn run_one(n: usize, m: usize, kind: OrderKind, seed: u64, opts: SynthOptions) -> Result<BenchRecord, CliError> {
    let s = random_sparse_state(n, m, seed)?;
    let start = Instant::now();
    let (_, circuit) = prepare(&s, kind, seed, opts)?;
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    let fidelity = if n <= MAX_VERIFY_QUBITS {
        let report = verify(&s, &circuit)?;
        if !report.pass {
            return Err(CliError::Verification {
                n,
                m,
                order: kind.name(),
                seed,
                fidelity: report.fidelity,
            });
        }
        Some(report.fidelity)
    } else {
        None
    };
    Ok(BenchRecord {
        n,
        m,
        order: kind.name(),
        seed,
        cx: circuit.cx_count()?,
        time_ms,
        fidelity,
    })
}

/// Sample mean, sample standard deviation (0 for a single value) and the
/// 95% confidence half-width.
pub fn mean_ci(values: &[f64]) -> (f64, f64, f64) {
    let k = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, 0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / k;
    if values.len() == 1 {
        return (mean, 0.0, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let sd = var.sqrt();
    (mean, sd, 1.96 * sd / k.sqrt())
}

/// Runs every `(n, order, instance)` combination. Instance `i` uses seed
/// `config.seed + i` and the same random state for every ordering. Any
/// failed verification aborts the run.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, CliError> {
    if config.count == 0 {
        return Err(CliError::Range("count must be at least 1".into()));
    }
    for &n in &config.ns {
        if n > MAX_VERIFY_QUBITS {
            log::warn!("n = {n}: skipping fidelity verification above {MAX_VERIFY_QUBITS} qubits");
        }
    }
    let jobs: Vec<(usize, OrderKind, u64)> = config
        .ns
        .iter()
        .flat_map(|&n| {
            config
                .orders
                .iter()
                .flat_map(move |&o| (0..config.count as u64).map(move |i| (n, o, i)))
        })
        .collect();
    let records: Vec<BenchRecord> = jobs
        .par_iter()
        .map(|&(n, kind, i)| run_one(n, config.m.eval(n), kind, config.seed + i, config.opts))
        .collect::<Result<_, _>>()?;
    let summary = records
        .chunks(config.count)
        .map(|chunk| {
            let cx: Vec<f64> = chunk.iter().map(|r| r.cx as f64).collect();
            let (mean_cx, stddev, ci95) = mean_ci(&cx);
            SummaryRow {
                n: chunk[0].n,
                m: chunk[0].m,
                order: chunk[0].order.clone(),
                count: chunk.len(),
                mean_cx,
                stddev,
                ci95,
            }
        })
        .collect();
    Ok(BenchReport { records, summary })
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["n", "m", "order", "seed", "cx", "time_ms", "fidelity"])?;
    }
    w.flush()?;
    Ok(())
}
