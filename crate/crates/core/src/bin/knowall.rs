use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use knowall::dynet::{domination, information_flow_graph, Digraph, DynamicGraph};
use knowall::harness::{
    check_approx_theorem, check_connectivity_theorem, check_kset_theorem, check_scissor_lemmas, enumerate_digraphs,
    ExperimentReport, Sampling,
};
use knowall::homology::{betti_reduced, first_shelling_violation, ShellingOrder};
use knowall::protocol::{flood_trace, protocol_complex};
use knowall::simplicial::{parse_facet_lines, pseudosphere, ChromaticComplex, Label};
use knowall::solver::{solve, SolveStatus};
use knowall::tasks::TaskDescriptor;
use knowall::{Error, Result};

#[derive(Parser)]
#[command(name = "knowall", version, about = "Agreement tasks over known dynamic networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the information-flow graph comes from.
#[derive(Args)]
struct Instance {
    /// Dynamic graph JSON file `{"n": .., "rounds": [[[from, to], ..], ..]}` with 1-based names.
    #[arg(long, conflicts_with = "mask")]
    instance: Option<PathBuf>,
    /// Process count for `--mask`.
    #[arg(long)]
    n: Option<usize>,
    /// Digraph bitmask used directly as the information-flow graph.
    #[arg(long, requires = "n")]
    mask: Option<u64>,
}

impl Instance {
    fn ifg(&self) -> Result<Digraph> {
        match (&self.instance, self.mask, self.n) {
            (Some(path), _, _) => Ok(information_flow_graph(&DynamicGraph::from_json(&read(path)?)?)),
            (None, Some(mask), Some(n)) => Digraph::from_bitmask(n, mask),
            _ => Err(Error::InvalidParameter("give --instance FILE or --n N --mask M".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Kset,
    Connectivity,
    Scissor,
    Approx,
}

#[derive(Subcommand)]
enum Command {
    /// Print the information-flow graph.
    Ifg {
        #[command(flatten)]
        instance: Instance,
        /// Graphviz output instead of an arc list.
        #[arg(long)]
        dot: bool,
    },
    /// Domination number and a minimum dominating set of the information-flow graph.
    Gamma {
        #[command(flatten)]
        instance: Instance,
    },
    /// Write the protocol complex over a task's input complex as a facet list.
    Build {
        #[command(flatten)]
        instance: Instance,
        /// Task JSON file or inline JSON.
        #[arg(long)]
        task: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced GF(2) Betti numbers of a facet-list complex or of a protocol complex.
    Homology {
        #[arg(long, conflicts_with_all = ["instance", "mask"])]
        complex: Option<PathBuf>,
        #[command(flatten)]
        instance: Instance,
        /// Input values of the pseudosphere when building a protocol complex.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        values: Vec<String>,
        #[arg(long)]
        up_to: usize,
    },
    /// Decide solvability; exit status 0 solvable, 1 unsolvable, 2 input error.
    Solve {
        #[command(flatten)]
        instance: Instance,
        /// Task JSON file or inline JSON.
        #[arg(long)]
        task: String,
        /// Print the decision map when one exists.
        #[arg(long)]
        witness: bool,
    },
    /// Flood inputs through each round and print every knowledge set.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
    },
    /// Check a facet order for shellability.
    ShellCheck {
        #[arg(long)]
        complex: PathBuf,
        /// Facet list in the proposed order.
        #[arg(long)]
        order: PathBuf,
    },
    /// List every digraph on n nodes with its domination number.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Run an experiment; exit status 0 iff it records no disagreement.
    Check {
        experiment: Experiment,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        values: Vec<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Sample size for connectivity; all qualifying digraphs when absent.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn task_source(arg: &str) -> Result<TaskDescriptor> {
    if arg.trim_start().starts_with('{') {
        TaskDescriptor::from_json(arg)
    } else {
        TaskDescriptor::from_json(&read(Path::new(arg))?)
    }
}

fn labels(values: &[String]) -> Vec<Label> {
    values.iter().map(|v| Label::new(v.trim())).collect()
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ifg { instance, dot } => {
            let g = instance.ifg()?;
            if dot {
                print!("{}", g.to_dot());
            } else {
                for (p, q) in g.arcs() {
                    println!("{}->{}", p + 1, q + 1);
                }
            }
        }
        Command::Gamma { instance } => {
            let report = domination(&instance.ifg()?);
            let witness: Vec<String> = report.witness.iter().map(|p| (p + 1).to_string()).collect();
            println!("gamma={} witness={}", report.gamma, witness.join(","));
        }
        Command::Build { instance, task, out } => {
            let task = task_source(&task)?.build()?;
            let (complex, _) = protocol_complex(&instance.ifg()?, task.input_complex())?;
            emit(&complex.to_facet_list(), out.as_deref())?;
        }
        Command::Homology { complex, instance, values, up_to } => {
            let k = match complex {
                Some(path) => ChromaticComplex::from_facet_list(&read(&path)?)?,
                None => {
                    let ifg = instance.ifg()?;
                    protocol_complex(&ifg, &pseudosphere(ifg.n(), &labels(&values))?)?.0
                }
            };
            println!("{}", betti_reduced(&k, up_to)?);
        }
        Command::Solve { instance, task, witness } => {
            let task = task_source(&task)?.build()?;
            let verdict = solve(&task, &instance.ifg()?)?;
            let stats = verdict.stats;
            match &verdict.status {
                SolveStatus::Solvable(dm) => {
                    println!("SOLVABLE nodes={} backtracks={}", stats.nodes, stats.backtracks);
                    if witness {
                        print!("{dm}");
                    }
                    return Ok(ExitCode::SUCCESS);
                }
                SolveStatus::Unsolvable => {
                    println!("UNSOLVABLE nodes={} backtracks={}", stats.nodes, stats.backtracks);
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Simulate { instance, inputs } => {
            let g = DynamicGraph::from_json(&read(&instance)?)?;
            for (r, views) in flood_trace(&g, &labels(&inputs))?.iter().enumerate() {
                for v in views {
                    println!("round {r} process {}: {v}", v.owner + 1);
                }
            }
        }
        Command::ShellCheck { complex, order } => {
            let k = ChromaticComplex::from_facet_list(&read(&complex)?)?;
            let ord = ShellingOrder(parse_facet_lines(&read(&order)?)?);
            match first_shelling_violation(&k, &ord)? {
                None => println!("VALID"),
                Some(t) => {
                    println!("INVALID t={t}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Enumerate { n } => {
            for g in enumerate_digraphs(n)? {
                println!("{} gamma={}", g.bitmask().unwrap_or_default(), domination(&g).gamma);
            }
        }
        Command::Check { experiment, n, values, k, sample, trials, seed, out } => {
            let report: ExperimentReport = match experiment {
                Experiment::Kset => check_kset_theorem(n, &labels(&values), k)?,
                Experiment::Connectivity => {
                    let sampling = match sample {
                        Some(count) => Sampling::Sampled { count, seed },
                        None => Sampling::Exhaustive,
                    };
                    check_connectivity_theorem(n, k, sampling)?
                }
                Experiment::Scissor => check_scissor_lemmas(n, &labels(&values), trials, seed)?,
                Experiment::Approx => check_approx_theorem(n)?,
            };
            emit(&report.render(), out.as_deref())?;
            eprintln!("elapsed {:.3}s", report.elapsed.as_secs_f64());
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
