//! Pipeline entry point: simulate | train | evaluate | trace.
//!
//! One TOML config file drives every stage; command-line flags override the
//! file. Every command honors `--seed` and writes byte-reproducible
//! artifacts into the output directory.

mod artifacts;
mod config;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use schedrl_core::baselines::{HeuristicKind, HeuristicPolicy};
use schedrl_core::dataset;
use schedrl_core::dqn::train;
use schedrl_core::env::Policy;
use schedrl_core::eval::{evaluate, trace_policy};
use schedrl_core::oracle::Oracle;
use schedrl_core::sim::{generate_dataset, Trajectory};

use crate::artifacts::{
    load_checkpoint, policy_from_checkpoint, save_checkpoint, save_curve_csv, save_report_json,
    save_table_csv, save_trace_jsonl,
};
use crate::config::{parse_f64_list, RunConfig, CONFIG_ENV_VAR};

#[derive(Parser)]
#[command(
    name = "schedrl",
    about = "Cost-aware measurement scheduling: simulator, DQN training, and evaluation pipeline",
    version
)]
struct Cli {
    /// Config file (TOML). Falls back to $SCHEDRL_CONFIG, then defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Global seed; overrides the config file and all per-section seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (overrides the config's out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Caps the thread pool used for generation and evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Discount factor override (training target and report metadata).
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Gain weight override.
    #[arg(long, global = true)]
    lambda: Option<f64>,

    #[arg(long, global = true)]
    epsilon_start: Option<f64>,

    #[arg(long, global = true)]
    epsilon_end: Option<f64>,

    #[arg(long, global = true)]
    epsilon_decay_steps: Option<usize>,

    /// Total gradient steps override.
    #[arg(long, global = true)]
    train_steps: Option<usize>,

    /// Oracle importance vector override: v1,..,vK.
    #[arg(long, global = true)]
    importance: Option<String>,

    /// Per-channel cost vector override: c1,..,cK.
    #[arg(long, global = true)]
    cost: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a trajectory dataset and print its summary statistics.
    Simulate {
        /// Number of trajectories to generate (>= 1).
        #[arg(short, long)]
        n: usize,
    },
    /// Train the DQN scheduler on a dataset file.
    Train {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Score policies on a dataset: baseline names, checkpoint paths, or
    /// the keyword `baselines` for the standard set. Defaults to `baselines`.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        policies: Vec<String>,
    },
    /// Dump a per-step trace of one policy over one trajectory.
    Trace {
        #[arg(long)]
        dataset: PathBuf,
        /// Trajectory index within the dataset.
        #[arg(long)]
        index: usize,
        /// Baseline name or checkpoint path.
        policy: String,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut cfg = load_config(&cli)?;
    apply_overrides(&cli, &mut cfg)?;
    cfg.validate()?;
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    let out_dir = cli.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    match &cli.command {
        Command::Simulate { n } => cmd_simulate(&cfg, *n, &out_dir),
        Command::Train { dataset } => cmd_train(&cfg, dataset, &out_dir),
        Command::Evaluate { dataset, policies } => cmd_evaluate(&cfg, dataset, policies, &out_dir),
        Command::Trace {
            dataset,
            index,
            policy,
        } => cmd_trace(&cfg, dataset, *index, policy, &out_dir),
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from));
    match path {
        Some(p) => RunConfig::load(&p),
        None => Ok(RunConfig::default()),
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) -> anyhow::Result<()> {
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    if let Some(gamma) = cli.gamma {
        cfg.dqn.gamma = gamma;
        cfg.environment.gamma = gamma;
    }
    if let Some(lambda) = cli.lambda {
        cfg.environment.lambda = lambda;
    }
    if let Some(e) = cli.epsilon_start {
        cfg.dqn.epsilon_start = e;
    }
    if let Some(e) = cli.epsilon_end {
        cfg.dqn.epsilon_end = e;
    }
    if let Some(e) = cli.epsilon_decay_steps {
        cfg.dqn.epsilon_decay_steps = e;
    }
    if let Some(s) = cli.train_steps {
        cfg.dqn.train_steps = s;
    }
    let k = cfg.simulator.n_channels;
    if let Some(imp) = &cli.importance {
        cfg.oracle.importance = parse_f64_list(imp, k, "importance")?;
    }
    if let Some(cost) = &cli.cost {
        cfg.environment.cost = parse_f64_list(cost, k, "cost")?;
    }
    Ok(())
}

fn load_dataset_checked(cfg: &RunConfig, path: &Path) -> anyhow::Result<Vec<Trajectory>> {
    let (header, trajectories) = dataset::load_dataset(path)
        .with_context(|| format!("loading dataset {}", path.display()))?;
    if header.n_channels != cfg.simulator.n_channels {
        bail!(
            "dataset has {} channels but the config expects {}",
            header.n_channels,
            cfg.simulator.n_channels
        );
    }
    if trajectories.is_empty() {
        bail!("dataset {} is empty", path.display());
    }
    Ok(trajectories)
}

fn cmd_simulate(cfg: &RunConfig, n: usize, out_dir: &Path) -> anyhow::Result<()> {
    if n == 0 {
        bail!("n must be >= 1");
    }
    let data = generate_dataset(&cfg.simulator, n, cfg.simulator.seed);
    let path = out_dir.join("dataset.jsonl");
    dataset::save_dataset(&path, &cfg.simulator, cfg.simulator.seed, &data)?;

    let steps: usize = data.iter().map(|t| t.len()).sum();
    let mean_len = steps as f64 / n as f64;
    let event_rate = data.iter().filter(|t| t.terminal_step.is_some()).count() as f64 / n as f64;
    let masked: usize = data
        .iter()
        .map(|t| t.mask.iter().filter(|&&m| m == 0).count())
        .sum();
    let missingness = masked as f64 / (steps * cfg.simulator.n_channels) as f64;
    println!(
        "wrote {} trajectories to {} (seed {})",
        n,
        path.display(),
        cfg.simulator.seed
    );
    println!(
        "mean length {mean_len:.2}, event rate {event_rate:.3}, missingness {missingness:.3}"
    );
    Ok(())
}

fn cmd_train(cfg: &RunConfig, dataset_path: &Path, out_dir: &Path) -> anyhow::Result<()> {
    let trajectories = load_dataset_checked(cfg, dataset_path)?;
    let oracle = Oracle::new(cfg.oracle.clone(), cfg.simulator.n_channels)?;
    let started = Instant::now();
    let (agent, log) = train(&trajectories, &oracle, &cfg.environment, &cfg.dqn)?;
    let ckpt_path = out_dir.join("checkpoint.json");
    save_checkpoint(&ckpt_path, cfg, agent.online_params())?;
    let curve_path = out_dir.join("curve.csv");
    save_curve_csv(&curve_path, cfg, &log.curve)?;
    println!(
        "trained {} steps over {} episodes in {:.1}s",
        agent.steps_done(),
        log.episode_returns.len(),
        started.elapsed().as_secs_f64()
    );
    println!("checkpoint: {}", ckpt_path.display());
    println!("learning curve: {}", curve_path.display());
    Ok(())
}

/// Expands policy arguments into live policies: the keyword `baselines`,
/// individual baseline names, or checkpoint paths.
fn resolve_policies(cfg: &RunConfig, specs: &[String]) -> anyhow::Result<Vec<Box<dyn Policy>>> {
    let k = cfg.simulator.n_channels;
    let seed = cfg.policy_seed();
    let mut policies: Vec<Box<dyn Policy>> = Vec::new();
    let mut checkpoints = 0usize;
    let specs: Vec<String> = if specs.is_empty() {
        vec!["baselines".to_string()]
    } else {
        specs.to_vec()
    };
    for spec in &specs {
        if spec == "baselines" {
            for kind in HeuristicKind::standard_set() {
                policies.push(Box::new(HeuristicPolicy::new(kind, k, seed)?));
            }
        } else if let Some(kind) = HeuristicKind::parse(spec) {
            policies.push(Box::new(HeuristicPolicy::new(kind, k, seed)?));
        } else {
            let path = PathBuf::from(spec);
            let file = load_checkpoint(&path)?;
            if file.config.simulator.n_channels != k {
                bail!(
                    "checkpoint {} was trained with {} channels, config expects {k}",
                    path.display(),
                    file.config.simulator.n_channels
                );
            }
            checkpoints += 1;
            let name = if checkpoints == 1 {
                "dqn".to_string()
            } else {
                format!("dqn_{checkpoints}")
            };
            policies.push(Box::new(policy_from_checkpoint(&file, &name)?));
        }
    }
    Ok(policies)
}

fn cmd_evaluate(
    cfg: &RunConfig,
    dataset_path: &Path,
    specs: &[String],
    out_dir: &Path,
) -> anyhow::Result<()> {
    let trajectories = load_dataset_checked(cfg, dataset_path)?;
    let oracle = Oracle::new(cfg.oracle.clone(), cfg.simulator.n_channels)?;
    let policies = resolve_policies(cfg, specs)?;
    let refs: Vec<&dyn Policy> = policies.iter().map(|p| p.as_ref()).collect();
    let report = evaluate(
        &refs,
        &trajectories,
        &oracle,
        &cfg.environment,
        cfg.policy_seed(),
    )?;
    let table_path = out_dir.join("table.csv");
    save_table_csv(&table_path, cfg, &report)?;
    let report_path = out_dir.join("report.json");
    save_report_json(&report_path, cfg, &report)?;
    println!(
        "{:<16} {:>10} {:>8}  ({} episodes)",
        "policy", "mean", "stderr", report.episodes
    );
    for p in &report.policies {
        println!(
            "{:<16} {:>10.3} {:>8.3}",
            p.policy, p.mean_reward, p.stderr
        );
    }
    println!("table: {}", table_path.display());
    println!("report: {}", report_path.display());
    Ok(())
}

fn cmd_trace(
    cfg: &RunConfig,
    dataset_path: &Path,
    index: usize,
    policy_spec: &str,
    out_dir: &Path,
) -> anyhow::Result<()> {
    let trajectories = load_dataset_checked(cfg, dataset_path)?;
    if index >= trajectories.len() {
        bail!(
            "trajectory index {index} out of range (dataset has {})",
            trajectories.len()
        );
    }
    let oracle = Oracle::new(cfg.oracle.clone(), cfg.simulator.n_channels)?;
    let policies = resolve_policies(cfg, std::slice::from_ref(&policy_spec.to_string()))?;
    if policies.len() != 1 {
        bail!("trace takes exactly one policy");
    }
    let rows = trace_policy(
        policies[0].as_ref(),
        &trajectories[index],
        &oracle,
        &cfg.environment,
        index as u64,
    )?;
    let path = out_dir.join("trace.jsonl");
    save_trace_jsonl(&path, cfg, &policies[0].name(), index, &rows)?;
    println!("traced {} steps to {}", rows.len(), path.display());
    Ok(())
}
