//! Dataset file format.
//!
//! JSON-lines, versioned: the first line is a header echoing the simulator
//! config, seed, trajectory count and channel count; each following line is
//! one trajectory record (states, values row-major, mask row-major, labels,
//! terminal step). Writing is deterministic, so identical seeds produce
//! byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{SimConfig, Trajectory};

pub const DATASET_FORMAT: &str = "schedrl-dataset";
pub const DATASET_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub n: usize,
    pub n_channels: usize,
    pub config: SimConfig,
}

/// Per-line trajectory record; the channel count lives in the header.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryRecord {
    states: Vec<u8>,
    values: Vec<f64>,
    mask: Vec<u8>,
    labels: Vec<u8>,
    terminal_step: Option<usize>,
}

pub fn write_dataset<W: Write>(
    mut w: W,
    cfg: &SimConfig,
    seed: u64,
    trajectories: &[Trajectory],
) -> Result<()> {
    let header = DatasetHeader {
        format: DATASET_FORMAT.to_string(),
        version: DATASET_VERSION,
        seed,
        n: trajectories.len(),
        n_channels: cfg.n_channels,
        config: cfg.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for traj in trajectories {
        let record = TrajectoryRecord {
            states: traj.states.clone(),
            values: traj.values.clone(),
            mask: traj.mask.clone(),
            labels: traj.labels.clone(),
            terminal_step: traj.terminal_step,
        };
        serde_json::to_writer(&mut w, &record)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_dataset(path: &Path, cfg: &SimConfig, seed: u64, trajectories: &[Trajectory]) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_dataset(&mut w, cfg, seed, trajectories)?;
    w.flush()?;
    Ok(())
}

pub fn read_dataset<R: BufRead>(r: R) -> Result<(DatasetHeader, Vec<Trajectory>)> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Format("dataset file is empty".into()))??;
    let header: DatasetHeader = serde_json::from_str(&header_line)?;
    if header.format != DATASET_FORMAT {
        return Err(Error::Format(format!(
            "not a dataset file (format {:?})",
            header.format
        )));
    }
    if header.version != DATASET_VERSION {
        return Err(Error::Format(format!(
            "unsupported dataset version {}",
            header.version
        )));
    }
    let mut trajectories = Vec::with_capacity(header.n);
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let rec: TrajectoryRecord = serde_json::from_str(&line)?;
        let t = rec.states.len();
        if rec.values.len() != t * header.n_channels
            || rec.mask.len() != t * header.n_channels
            || rec.labels.len() != t
        {
            return Err(Error::Format(format!(
                "trajectory {} has inconsistent shapes",
                trajectories.len()
            )));
        }
        trajectories.push(Trajectory {
            states: rec.states,
            values: rec.values,
            mask: rec.mask,
            labels: rec.labels,
            terminal_step: rec.terminal_step,
            n_channels: header.n_channels,
        });
    }
    if trajectories.len() != header.n {
        return Err(Error::Format(format!(
            "header promises {} trajectories, file has {}",
            header.n,
            trajectories.len()
        )));
    }
    Ok((header, trajectories))
}

pub fn load_dataset(path: &Path) -> Result<(DatasetHeader, Vec<Trajectory>)> {
    let file = File::open(path)?;
    read_dataset(BufReader::new(file))
}
