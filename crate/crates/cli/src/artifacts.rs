//! Output artifact formats.
//!
//! Every artifact embeds the resolved run configuration so no result file
//! is orphaned from the settings that produced it. CSV artifacts carry the
//! echo as a leading `# config = {...}` comment line; JSON artifacts carry
//! it as a `config` field. All writers are deterministic.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use schedrl_core::dqn::{CurveRow, GreedyPolicy};
use schedrl_core::eval::{EvalReport, TraceRow};
use schedrl_core::nn::NetParams;

use crate::config::RunConfig;

pub const CHECKPOINT_FORMAT: &str = "schedrl-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Agent checkpoint: trained network parameters plus the full config echo
/// (replay contents are deliberately excluded).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointFile {
    pub format: String,
    pub version: u32,
    pub config: RunConfig,
    pub net: NetParams,
}

pub fn save_checkpoint(path: &Path, config: &RunConfig, net: &NetParams) -> anyhow::Result<()> {
    let file = CheckpointFile {
        format: CHECKPOINT_FORMAT.to_string(),
        version: CHECKPOINT_VERSION,
        config: config.clone(),
        net: net.clone(),
    };
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    serde_json::to_writer(&mut w, &file)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> anyhow::Result<CheckpointFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading checkpoint {}", path.display()))?;
    let file: CheckpointFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if file.format != CHECKPOINT_FORMAT {
        bail!("{} is not a checkpoint file", path.display());
    }
    if file.version != CHECKPOINT_VERSION {
        bail!("unsupported checkpoint version {}", file.version);
    }
    file.net.validate()?;
    Ok(file)
}

/// Rebuilds the greedy policy a checkpoint describes.
pub fn policy_from_checkpoint(file: &CheckpointFile, name: &str) -> anyhow::Result<GreedyPolicy> {
    let k = file.config.simulator.n_channels;
    Ok(GreedyPolicy::new(
        file.net.clone(),
        k,
        name.to_string(),
        file.config.policy_seed(),
    )?)
}

/// Learning curve CSV: config comment, header, one row per curve sample.
pub fn save_curve_csv(path: &Path, config: &RunConfig, rows: &[CurveRow]) -> anyhow::Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(w, "# config = {}", config.echo_json()?)?;
    writeln!(w, "step,loss,epsilon,mean_return")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.step, r.loss, r.epsilon, r.mean_return)?;
    }
    w.flush()?;
    Ok(())
}

/// Comparison table CSV: one row per policy in evaluation order.
pub fn save_table_csv(path: &Path, config: &RunConfig, report: &EvalReport) -> anyhow::Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(w, "# config = {}", config.echo_json()?)?;
    writeln!(w, "policy,episodes,mean_reward,stderr")?;
    for p in &report.policies {
        writeln!(w, "{},{},{},{}", p.policy, p.episodes, p.mean_reward, p.stderr)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    config: &'a RunConfig,
    report: &'a EvalReport,
}

pub fn save_report_json(path: &Path, config: &RunConfig, report: &EvalReport) -> anyhow::Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    serde_json::to_writer(&mut w, &ReportFile { config, report })?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub version: u32,
    pub policy: String,
    pub trajectory_index: usize,
    pub config: RunConfig,
}

/// Trace JSON-lines: a header line, then one line per step.
pub fn save_trace_jsonl(
    path: &Path,
    config: &RunConfig,
    policy: &str,
    trajectory_index: usize,
    rows: &[TraceRow],
) -> anyhow::Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    let header = TraceHeader {
        format: "schedrl-trace".to_string(),
        version: 1,
        policy: policy.to_string(),
        trajectory_index,
        config: config.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

