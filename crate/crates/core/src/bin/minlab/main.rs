use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use minlab::citest::{ci_test, TestConfig};
use minlab::distributions::{CausalState, CptNetwork};
use minlab::experiments::{run_config, RunConfig};
use minlab::graphs::{check_cap, enumerate_dags, CiStatement, HypothesisSpace};
use minlab::learner::{LearnedHypothesis, LearnerConfig, OrderSpec};
use minlab::sampling::{draw, Sample};
use minlab::states::{fixture, fixtures, DistributionProfile, StateClass};

/// Causal-state classification and minimality-based structure learning over
/// small categorical variable sets.
#[derive(Parser)]
#[command(name = "minlab", version)]
struct Cli {
    /// Worker threads for Monte-Carlo trials; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all DAGs over k variables and their Markov-equivalence classes.
    Enumerate {
        #[arg(long)]
        k: usize,
        /// Write the DAG list and class partition as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Markov/faithful/minimal/u-minimal/quasi-faithful flags of a state.
    Classify(SourceArgs),
    /// Run the L1 independence test for one statement on CSV data.
    CiTest {
        #[arg(long)]
        data: PathBuf,
        /// `u|v||w` with comma-separated indices, e.g. `0|2||1`.
        #[arg(long)]
        statement: String,
        /// Comma-separated cardinalities; inferred from the data if omitted.
        #[arg(long, value_delimiter = ',')]
        cards: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1.0)]
        threshold_constant: f64,
    },
    /// Learn a Markov-equivalence class from CSV data.
    Learn {
        #[arg(long)]
        data: PathBuf,
        /// Learner config JSON; overrides the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "default")]
        order: OrderSpec,
        #[arg(long, default_value_t = 1.0)]
        threshold_constant: f64,
        #[arg(long, value_delimiter = ',')]
        cards: Option<Vec<usize>>,
    },
    /// Run an experiment config, writing report.json and curves.csv.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the named fixture states.
    Fixtures,
    /// Draw a seeded sample from a state and write it as CSV.
    Sample {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// A named fixture (see `minlab fixtures`).
    #[arg(long)]
    fixture: Option<String>,
    /// A CPT network JSON file.
    #[arg(long)]
    network: Option<PathBuf>,
    /// A state JSON file: `{"dag": …, "table": …}`.
    #[arg(long)]
    state: Option<PathBuf>,
}

impl SourceArgs {
    fn load(&self) -> anyhow::Result<CausalState> {
        if let Some(name) = &self.fixture {
            return Ok(fixture(name)?.state());
        }
        if let Some(path) = &self.network {
            let net: CptNetwork = read_json(path)?;
            return Ok(CausalState::from_network(&net));
        }
        if let Some(path) = &self.state {
            return read_json(path);
        }
        bail!("one of --fixture, --network or --state is required")
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("cannot parse {}", path.display()))
}

fn read_sample(path: &Path, cards: Option<Vec<usize>>) -> anyhow::Result<Sample> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Sample::read_csv(BufReader::new(file), cards)
        .with_context(|| format!("cannot read {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn plural(n: usize, word: &str, many: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {many}")
    }
}

#[derive(Serialize)]
struct Classification {
    #[serde(flatten)]
    flags: StateClass,
    witness: Option<minlab::graphs::Dag>,
}

/// Returns whether every verdict passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Enumerate { k, out } => {
            check_cap(k)?;
            let dags = enumerate_dags(k)?;
            let space = HypothesisSpace::shared(k)?;
            println!(
                "{}, {}",
                plural(dags.len(), "DAG", "DAGs"),
                plural(space.classes().len(), "class", "classes")
            );
            if let Some(path) = out {
                let doc = json!({ "k": k, "dags": dags, "classes": space.classes() });
                fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        Command::Classify(source) => {
            let state = source.load()?;
            let profile = DistributionProfile::new(state.table())?;
            let flags = profile.classify(state.graph())?;
            let witness = profile.minimality_witness(state.graph())?;
            print_json(&Classification { flags, witness })?;
        }
        Command::CiTest {
            data,
            statement,
            cards,
            threshold_constant,
        } => {
            let sample = read_sample(&data, cards)?;
            let s: CiStatement = statement.parse()?;
            let verdict = ci_test(&sample, &s, &TestConfig::new(threshold_constant)?)?;
            print_json(&verdict)?;
        }
        Command::Learn {
            data,
            config,
            order,
            threshold_constant,
            cards,
        } => {
            let sample = read_sample(&data, cards)?;
            let cfg = match config {
                Some(path) => read_json::<LearnerConfig>(&path)?,
                None => LearnerConfig {
                    k: sample.vars().len(),
                    order,
                    threshold_constant,
                },
            };
            let learner = cfg.build()?;
            let h = learner.learn(&sample)?;
            print_json(&LearnedHypothesis::from(h))?;
        }
        Command::Run { config, out } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("cannot open {}", config.display()))?;
            let cfg = RunConfig::from_json(&text)
                .with_context(|| format!("invalid config {}", config.display()))?;
            let output = run_config(&cfg)?;
            output.write_to(&out)?;
            println!(
                "{}: {}",
                out.display(),
                if output.consistent {
                    "all verdicts consistent"
                } else {
                    "verdict failure"
                }
            );
            return Ok(output.consistent);
        }
        Command::Fixtures => {
            for f in fixtures() {
                println!("{:<32} k={}  {}", f.name, f.k(), f.description);
            }
        }
        Command::Sample {
            source,
            n,
            seed,
            out,
        } => {
            let state = source.load()?;
            let sample = draw(state.table(), n, seed);
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    sample.write_csv(file)?;
                }
                None => sample.write_csv(io::stdout().lock())?,
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
