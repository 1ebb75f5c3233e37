//! Policy scoring and inspection.
//!
//! Scores policies on held-out trajectories (mean accumulated reward with
//! standard errors), reports per-channel selection frequencies overall and
//! conditioned on the hidden patient state, ranks channels by selection
//! frequency, and produces per-step policy traces. Hidden states are read
//! from the simulator for analysis only; policies see windows exclusively.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{rollout, EnvConfig, Environment, Policy};
use crate::error::Result;
use crate::oracle::{Oracle, OracleConfig};
use crate::sim::Trajectory;

/// Scores for one policy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyEval {
    pub policy: String,
    pub episodes: usize,
    pub mean_reward: f64,
    pub stderr: f64,
    /// Fraction of steps on which each channel was measured.
    pub channel_freq: Vec<f64>,
    /// Selection frequency over steps whose revealed timepoint is healthy.
    pub channel_freq_healthy: Vec<f64>,
    /// Selection frequency over steps whose revealed timepoint is critical.
    pub channel_freq_critical: Vec<f64>,
    /// Channels ordered by overall selection frequency (ties by index).
    pub feature_ranking: Vec<usize>,
}

/// Full evaluation report: one entry per policy plus the config echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub episodes: usize,
    pub seed: u64,
    pub environment: EnvConfig,
    pub oracle: OracleConfig,
    pub policies: Vec<PolicyEval>,
}

/// Per-episode RNG stream: `seed` selects the generator, the trajectory
/// index selects the stream, so parallel evaluation is order-independent.
fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates one policy over the whole dataset.
///
/// Returns the mean undiscounted accumulated reward with its standard
/// error, and selection frequencies conditioned on the hidden state of each
/// step's revealed timepoint.
pub fn evaluate_policy(
    policy: &dyn Policy,
    dataset: &[Trajectory],
    oracle: &Oracle,
    env_cfg: &EnvConfig,
) -> Result<PolicyEval> {
    struct EpisodeStats {
        ret: f64,
        selected: Vec<[usize; 2]>,
        steps: [usize; 2],
    }

    let k_n = oracle.n_channels();
    let per_episode: Vec<EpisodeStats> = dataset
        .par_iter()
        .enumerate()
        .map(|(i, traj)| -> Result<EpisodeStats> {
            let mut rng = episode_rng(policy.seed(), i as u64);
            let (records, ret) = rollout(policy, traj, oracle, env_cfg, &mut rng)?;
            let mut selected = vec![[0usize; 2]; k_n];
            let mut steps = [0usize; 2];
            for (t, rec) in records.iter().enumerate() {
                let hidden = traj.states[t] as usize;
                steps[hidden] += 1;
                for (k, sel) in selected.iter_mut().enumerate() {
                    sel[hidden] += rec.action.bits[k] as usize;
                }
            }
            Ok(EpisodeStats {
                ret,
                selected,
                steps,
            })
        })
        .collect::<Result<_>>()?;

    let n = per_episode.len();
    let returns: Vec<f64> = per_episode.iter().map(|e| e.ret).collect();
    let mean = returns.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };

    let mut steps = [0usize; 2];
    let mut selected = vec![[0usize; 2]; k_n];
    for e in &per_episode {
        steps[0] += e.steps[0];
        steps[1] += e.steps[1];
        for (acc, s) in selected.iter_mut().zip(&e.selected) {
            acc[0] += s[0];
            acc[1] += s[1];
        }
    }
    let freq_of = |sel: &[usize; 2], which: Option<usize>| -> f64 {
        let (num, den) = match which {
            None => (sel[0] + sel[1], steps[0] + steps[1]),
            Some(h) => (sel[h], steps[h]),
        };
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let channel_freq: Vec<f64> = selected.iter().map(|s| freq_of(s, None)).collect();
    let channel_freq_healthy = selected.iter().map(|s| freq_of(s, Some(0))).collect();
    let channel_freq_critical = selected.iter().map(|s| freq_of(s, Some(1))).collect();
    let mut eval = PolicyEval {
        policy: policy.name(),
        episodes: n,
        mean_reward: mean,
        stderr,
        channel_freq,
        channel_freq_healthy,
        channel_freq_critical,
        feature_ranking: Vec::new(),
    };
    eval.feature_ranking = rank_features(&eval);
    Ok(eval)
}

/// Evaluates several policies into one report.
pub fn evaluate(
    policies: &[&dyn Policy],
    dataset: &[Trajectory],
    oracle: &Oracle,
    env_cfg: &EnvConfig,
    seed: u64,
) -> Result<EvalReport> {
    let evals = policies
        .iter()
        .map(|p| evaluate_policy(*p, dataset, oracle, env_cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport {
        episodes: dataset.len(),
        seed,
        environment: env_cfg.clone(),
        oracle: oracle.config().clone(),
        policies: evals,
    })
}

/// Channels sorted by overall selection frequency, descending; ties break
/// toward the lower channel index.
pub fn rank_features(eval: &PolicyEval) -> Vec<usize> {
    let mut order: Vec<usize> = (0..eval.channel_freq.len()).collect();
    order.sort_by(|&a, &b| {
        eval.channel_freq[b]
            .partial_cmp(&eval.channel_freq[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

/// One step of a policy trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    /// Hidden state of the revealed timepoint (analysis only).
    pub hidden_state: u8,
    pub action: Vec<u8>,
    pub rewards: Vec<f64>,
    /// Oracle probability of the agent's window after the step.
    pub oracle_prob: f64,
}

/// Runs one episode and records state, action, rewards and the oracle's
/// probability at every step.
pub fn trace_policy(
    policy: &dyn Policy,
    traj: &Trajectory,
    oracle: &Oracle,
    env_cfg: &EnvConfig,
    episode_index: u64,
) -> Result<Vec<TraceRow>> {
    let mut rng = episode_rng(policy.seed(), episode_index);
    let mut env = Environment::new(traj, oracle, env_cfg)?;
    let mut rows = Vec::with_capacity(traj.len());
    let mut state = env.state();
    let window_elems = oracle.window_len() * oracle.n_channels();
    while !env.is_done() {
        let t = env.clock();
        let hidden_state = env.upcoming_hidden_state();
        let action = policy.act(&state, &mut rng);
        let out = env.step(&action)?;
        let window = crate::oracle::Window::from_rows(
            oracle.window_len(),
            oracle.n_channels(),
            out.next_state[..window_elems].to_vec(),
        )?;
        rows.push(TraceRow {
            t,
            hidden_state,
            action: action.bits.clone(),
            rewards: out.rewards.clone(),
            oracle_prob: oracle.predict(&window)?,
        });
        state = out.next_state;
    }
    Ok(rows)
}
