use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use walkprep::{SparseState, SynthOptions};
use walkprep_cli::{
    emit_qasm, parse_qasm, prepare, random_sparse_state, run_bench, verify, write_csv, BenchConfig, MSpec, OrderKind,
};

#[derive(Parser)]
#[command(name = "walkprep", version, about = "Sparse state preparation with quantum walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SynthFlags {
    /// Keep every multi-controlled gate fully controlled.
    #[arg(long)]
    no_control_reduction: bool,
    /// Undo each conjugation immediately instead of relabeling later states.
    #[arg(long)]
    no_frame_propagation: bool,
}

impl SynthFlags {
    fn options(self) -> SynthOptions {
        SynthOptions {
            control_reduction: !self.no_control_reduction,
            frame_propagation: !self.no_frame_propagation,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a state file into an OpenQASM 2.0 circuit.
    Synthesize {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderKind::MhsNonlinear)]
        order: OrderKind,
        /// Seed for the random ordering.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, visible_alias = "qasm")]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SynthFlags,
    },
    /// Benchmark orderings on seeded random states.
    Bench {
        /// Qubit counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Nonzero amplitudes: n, n2, half-dense or an integer.
        #[arg(long, default_value = "n")]
        m: MSpec,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [OrderKind::Sorted, OrderKind::MhsNonlinear])]
        order: Vec<OrderKind>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        flags: SynthFlags,
    },
    /// Check that a circuit prepares a state.
    Verify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        qasm: PathBuf,
    },
    /// Write a seeded random sparse state as JSON.
    RandomState {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "n")]
        m: MSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_state(path: &PathBuf) -> Result<SparseState> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SparseState::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synthesize {
            state,
            order,
            seed,
            out,
            flags,
        } => {
            let s = read_state(&state)?;
            let (_, circuit) = prepare(&s, order, seed, flags.options())?;
            let text = emit_qasm(&circuit)?;
            match out {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            eprintln!("n={} m={} order={} cx={}", s.n(), s.m(), order, circuit.cx_count()?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            n,
            m,
            count,
            seed,
            order,
            csv,
            flags,
        } => {
            let config = BenchConfig {
                ns: n,
                m,
                orders: order,
                count,
                seed,
                opts: flags.options(),
            };
            let report = run_bench(&config)?;
            if let Some(p) = csv {
                let f = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                write_csv(&report.records, f)?;
            }
            println!(
                "{:>3} {:>6} {:<14} {:>6} {:>10} {:>8}",
                "n", "m", "order", "count", "mean_cx", "ci95"
            );
            for r in &report.summary {
                println!(
                    "{:>3} {:>6} {:<14} {:>6} {:>10.2} {:>8.2}",
                    r.n, r.m, r.order, r.count, r.mean_cx, r.ci95
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { state, qasm } => {
            let s = read_state(&state)?;
            let text = fs::read_to_string(&qasm).with_context(|| format!("reading {}", qasm.display()))?;
            let circuit = parse_qasm(&text).with_context(|| format!("parsing {}", qasm.display()))?;
            let report = verify(&s, &circuit)?;
            println!(
                "fidelity {:.15} {}",
                report.fidelity,
                if report.pass { "PASS" } else { "FAIL" }
            );
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::RandomState { n, m, seed, out } => {
            if n == 0 || n > walkprep::MAX_QUBITS {
                bail!("n must be in 1..={}", walkprep::MAX_QUBITS);
            }
            let s = random_sparse_state(n, m.eval(n), seed)?;
            let text = s.to_json();
            match out {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
