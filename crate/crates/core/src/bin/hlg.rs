use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hardlabel_graph::attack::{AttackConfig, AttackMode, LearningRate};
use hardlabel_graph::harness::{
    defense_sweep, evaluate_report, parse_range, run_experiment, write_defense_sweep_csv,
    DatasetSpec, ExperimentConfig, ExperimentReport, Method, OracleSpec,
};
use hardlabel_graph::partition::Strategy;
use hardlabel_graph::{Error, Result};

#[derive(Parser)]
#[command(
    name = "hlg",
    version,
    about = "Hard-label structural attacks on graph classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attack every correctly classified graph and write a report.
    Attack(AttackArgs),
    /// Clean accuracy of the low-rank defense over a grid of gamma.
    Defend(DefendArgs),
    /// Recompute and print the aggregates of a stored report.
    Eval {
        #[arg(long)]
        report: PathBuf,
    },
    /// Random-flip baseline with a fixed query budget per graph.
    BaselineRandom(BaselineArgs),
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct TargetArgs {
    /// TUDataset directory, or a generator spec such as `er:20:0.2`,
    /// `barbell:4` or `sbm:10,10:0.5:0.05`.
    #[arg(long)]
    dataset: String,
    /// Dataset name inside the directory (defaults to the directory name).
    #[arg(long)]
    name: Option<String>,
    /// Graphs to generate for a synthetic dataset.
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    /// Oracle spec that labels synthetic graphs (defaults to the attacked model).
    #[arg(long)]
    labeler: Option<String>,
    /// `gin:weights.json`, `gin-random:FEATURES:H1,H2:CLASSES:SEED` or
    /// `structural:FEATURE:THRESHOLD`.
    #[arg(long)]
    oracle: String,
    #[arg(long)]
    max_targets: Option<usize>,
    /// Attack the low-rank defended model with this gamma.
    #[arg(long)]
    defense_gamma: Option<f64>,
}

impl TargetArgs {
    fn dataset_spec(&self) -> Result<DatasetSpec> {
        let path = Path::new(&self.dataset);
        if path.is_dir() {
            let name = match &self.name {
                Some(n) => n.clone(),
                None => path
                    .file_name()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| {
                        Error::Config(format!("cannot infer dataset name from {path:?}"))
                    })?
                    .to_string(),
            };
            return Ok(DatasetSpec::TuDataset {
                dir: path.to_path_buf(),
                name,
            });
        }
        Ok(DatasetSpec::Synthetic {
            generator: self.dataset.parse()?,
            count: self.count,
            seed: self.data_seed,
            labeler: self
                .labeler
                .as_deref()
                .map(str::parse)
                .transpose()?
                .map(Box::new),
        })
    }

    fn config(
        &self,
        method: Method,
        attack: AttackConfig,
        n_trials: usize,
    ) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            dataset: self.dataset_spec()?,
            oracle: self.oracle.parse::<OracleSpec>()?,
            method,
            attack,
            n_trials,
            max_targets: self.max_targets,
            defense: self
                .defense_gamma
                .map(hardlabel_graph::defense::LowRankConfig::new)
                .transpose()?,
        })
    }
}

#[derive(Args)]
struct OutputArgs {
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-graph CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Directory for per-graph gradient-norm traces.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, default_value_t = 0.2)]
    budget: f64,
    #[arg(long, default_value_t = Strategy::I)]
    strategy: Strategy,
    #[arg(long = "Q", default_value_t = 100)]
    q: usize,
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    #[arg(long = "T", default_value_t = 200)]
    t: usize,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Constant learning rate; defaults to 0.1 / sqrt(d).
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    max_queries: Option<u64>,
    /// Targeted attack towards this class.
    #[arg(long)]
    target_class: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DefendArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// `START:END:STEP`, inclusive.
    #[arg(long, default_value = "0.05:1.0:0.05")]
    gamma_sweep: String,
    /// Also attack the defended model at each gamma.
    #[arg(long)]
    with_attacks: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "defense_sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long)]
    query_budget: u64,
    #[arg(long, default_value_t = 0.2)]
    budget: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn emit(report: &ExperimentReport, output: &OutputArgs) -> Result<()> {
    if let Some(p) = &output.out {
        report.write_json(p)?;
    }
    if let Some(p) = &output.csv {
        report.write_csv(p)?;
    }
    if let Some(dir) = &output.trace_dir {
        report.write_traces(dir)?;
    }
    print_aggregates(report);
    Ok(())
}

fn print_aggregates(report: &ExperimentReport) {
    let a = &report.aggregates;
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    println!(
        "targets {}  SR {:.3}  AP {}  AQ {:.1}  AT {:.4}s  added {}  removed {}",
        a.targets,
        a.sr,
        opt(a.ap),
        a.aq,
        a.at,
        opt(a.avg_added),
        opt(a.avg_removed)
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Attack(args) => {
            let attack = AttackConfig {
                budget: args.budget,
                iterations: args.t,
                directions: args.q,
                mu: args.mu,
                learning_rate: args
                    .eta
                    .map_or(LearningRate::default(), LearningRate::Constant),
                epsilon: args.epsilon,
                max_queries: args.max_queries,
                mode: args
                    .target_class
                    .map_or(AttackMode::Untargeted, AttackMode::Targeted),
                strategy: args.strategy,
                seed: args.seed,
                ..AttackConfig::default()
            };
            let cfg = args.target.config(Method::SignSgd, attack, args.trials)?;
            emit(&run_experiment(&cfg)?, &args.output)
        }
        Command::Defend(args) => {
            let attack = AttackConfig {
                seed: args.seed,
                ..AttackConfig::default()
            };
            let cfg = args.target.config(Method::SignSgd, attack, 1)?;
            let points = defense_sweep(&cfg, &parse_range(&args.gamma_sweep)?, args.with_attacks)?;
            write_defense_sweep_csv(&points, &args.out)?;
            for p in &points {
                let sr = p.sr.map_or(String::new(), |s| format!("  SR {s:.3}"));
                println!(
                    "gamma {:.2}  clean accuracy {:.4}{sr}",
                    p.gamma, p.clean_accuracy
                );
            }
            Ok(())
        }
        Command::Eval { report } => {
            let stored = ExperimentReport::read_json(&report)?;
            let fresh = evaluate_report(&stored);
            print_aggregates(&ExperimentReport {
                aggregates: fresh,
                ..stored.clone()
            });
            if fresh != stored.aggregates {
                return Err(Error::Config(
                    "stored aggregates differ from the per-graph records".into(),
                ));
            }
            Ok(())
        }
        Command::BaselineRandom(args) => {
            let attack = AttackConfig {
                budget: args.budget,
                seed: args.seed,
                ..AttackConfig::default()
            };
            let method = Method::Random {
                query_budget: args.query_budget,
            };
            let cfg = args.target.config(method, attack, 1)?;
            emit(&run_experiment(&cfg)?, &args.output)
        }
        Command::Run { config, output } => emit(
            &run_experiment(&ExperimentConfig::from_json_file(config)?)?,
            &output,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
