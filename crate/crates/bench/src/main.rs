use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bipsym_bench::{
    bench_with, check_equivalence, gen_bus_with, gen_random, gen_tasks, state_names, write_csv, write_trace,
    BenchOptions, BusCycle, EngineKind, Example, RandomBounds,
};
use bipsym_core::{parse_bytes, run, serialize, EnumEngine, SymbolicEngine, SystemEncoding, SystemModel, Trace};

const EXIT_DIAGNOSTICS: u8 = 1;
const EXIT_DEADLOCK: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "bipsym",
    version,
    about = "Enumerative and symbolic execution of BIP-style component systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a model and report where it ends up.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Enum)]
        engine: EngineArg,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the executed steps as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Symbolic engine only: prefer maximal extensions when choosing.
        #[arg(long)]
        greedy: bool,
    },
    /// Compare both engines at every reachable state.
    Check {
        file: PathBuf,
        /// Maximum number of states to explore.
        #[arg(long, default_value_t = 100_000)]
        bound: usize,
    },
    /// Time an engine on a generated benchmark model.
    Bench {
        #[arg(value_enum)]
        example: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, value_enum, default_value_t = BenchEngineArg::Both)]
        engine: BenchEngineArg,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long, default_value_t = 1000)]
        warmup: usize,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the node counts of the symbolic encoding.
    Stats { file: PathBuf },
    /// Write a generated model in the textual format.
    Gen {
        #[command(subcommand)]
        family: GenCommand,
        /// Destination file; standard output when absent.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    Bus {
        #[arg(long)]
        n: usize,
        /// Start each atom's cycle with the bus port instead of the private one.
        #[arg(long)]
        communicate_first: bool,
    },
    Tasks {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        ports: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Enum,
    Symbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchEngineArg {
    Enum,
    Symbolic,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Bus,
    Tasks,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_DIAGNOSTICS)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_DIAGNOSTICS)
        }
    }
}

fn load(path: &Path) -> Result<SystemModel, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_bytes(&bytes).map_err(|diagnostics| {
        let lines: Vec<String> = diagnostics.iter().map(|d| format!("{}:{d}", path.display())).collect();
        lines.join("\n")
    })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(f) as Box<dyn Write>)
            .map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn execute(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Run {
            file,
            engine,
            steps,
            seed,
            trace,
            greedy,
        } => {
            let system = load(&file)?;
            let result: Trace = match engine {
                EngineArg::Enum => {
                    let mut e = EnumEngine::new(&system, seed).map_err(|e| e.to_string())?;
                    run(&mut e, steps)
                }
                EngineArg::Symbolic => {
                    let mut e = SymbolicEngine::new(&system, seed)
                        .map_err(|e| e.to_string())?
                        .with_greedy(greedy);
                    run(&mut e, steps)
                }
            }
            .map_err(|e| e.to_string())?;
            if let Some(path) = trace {
                write_trace(output(Some(&path))?, &system, &result).map_err(|e| e.to_string())?;
            }
            let last = result
                .steps
                .last()
                .map_or_else(|| system.initial_state(), |s| s.state.clone());
            println!(
                "{} steps, mean {} ns/step, final state ({})",
                result.len(),
                result.mean_step().as_nanos(),
                state_names(&system, &last)
            );
            if result.deadlocked && result.len() < steps {
                println!("deadlock after {} of {steps} steps", result.len());
                return Ok(ExitCode::from(EXIT_DEADLOCK));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, bound } => {
            let system = load(&file)?;
            let report = check_equivalence(&system, bound).map_err(|e| e.to_string())?;
            println!("{report}");
            for d in &report.divergences {
                let e: Vec<String> = d.enumerative.iter().map(|a| format!("{{{a}}}")).collect();
                let s: Vec<String> = d.symbolic.iter().map(|a| format!("{{{a}}}")).collect();
                println!(
                    "  at ({}): enum [{}] symbolic [{}]",
                    state_names(&system, &d.state),
                    e.join(" "),
                    s.join(" ")
                );
            }
            Ok(if report.is_equivalent() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_DIVERGENCE)
            })
        }
        Command::Bench {
            example,
            n,
            m,
            engine,
            steps,
            seed,
            repetitions,
            warmup,
            out,
        } => {
            let example = match example {
                FamilyArg::Bus => Example::Bus { n },
                FamilyArg::Tasks => Example::Tasks { n, m },
            };
            let engines = match engine {
                BenchEngineArg::Enum => vec![EngineKind::Enum],
                BenchEngineArg::Symbolic => vec![EngineKind::Symbolic],
                BenchEngineArg::Both => vec![EngineKind::Enum, EngineKind::Symbolic],
            };
            let options = BenchOptions {
                repetitions,
                warmup_steps: warmup,
            };
            let records = engines
                .into_iter()
                .map(|kind| bench_with(example, kind, steps, seed, options))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            write_csv(output(out.as_deref())?, &records).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { file } => {
            let system = load(&file)?;
            let stats = SystemEncoding::build(&system).map_err(|e| e.to_string())?.stats();
            println!("variables {}", stats.variables);
            println!("f_B {}", stats.fb_nodes);
            println!("f_C {}", stats.fc_nodes);
            println!("f_S {}", stats.fs_nodes);
            println!("f_P {}", stats.fp_nodes);
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { family, out } => {
            let system = match family {
                GenCommand::Bus { n, communicate_first } => {
                    let cycle = if communicate_first {
                        BusCycle::CommunicateFirst
                    } else {
                        BusCycle::ComputeFirst
                    };
                    gen_bus_with(n, cycle).map_err(|e| e.to_string())?
                }
                GenCommand::Tasks { n, m } => gen_tasks(n, m).map_err(|e| e.to_string())?,
                GenCommand::Random {
                    seed,
                    atoms,
                    states,
                    ports,
                    depth,
                } => gen_random(seed, RandomBounds::new(atoms, states, ports, depth)),
            };
            output(out.as_deref())?
                .write_all(serialize(&system).as_bytes())
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
