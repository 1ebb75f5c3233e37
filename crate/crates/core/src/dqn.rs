//! Factored dueling DQN scheduler.
//!
//! One trunk network feeds per-channel dueling heads: K state values and
//! K advantage pairs, mean-centered into 2K Q-values
//! `{Q(s, a_k=0), Q(s, a_k=1)}`. The joint Q of a multi-hot action is the
//! sum of the per-channel values, so action selection reduces to K
//! independent argmaxes. Training minimizes the sum of K per-channel
//! Bellman square errors against a periodically synced target network,
//! sampling uniformly from an experience replay ring.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Action, EnvConfig, Environment, Policy, TransitionRecord};
use crate::error::{Error, Result};
use crate::nn::{Activation, Adam, Grads, LayerSpec, NetParams};
use crate::oracle::Oracle;
use crate::sim::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqnConfig {
    /// Hidden trunk layer widths (relu).
    pub hidden: Vec<usize>,
    /// Discount factor for the Bellman target.
    pub gamma: f64,
    /// Linear exploration schedule: `epsilon_start -> epsilon_end` over
    /// `epsilon_decay_steps`, then flat.
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: usize,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Sync the target network every this many gradient steps.
    pub target_sync: usize,
    /// Total gradient steps (one per environment step).
    pub train_steps: usize,
    pub learning_rate: f64,
    /// Optimistic initialization of the measure/skip gap: the advantage
    /// head biases start at `+optimism` for "measure" and `-optimism` for
    /// "skip", so untried measurements look worth taking until the data
    /// says otherwise. Counters the collapse into never measuring.
    pub optimism: f64,
    /// Emit a learning-curve row every this many steps.
    pub curve_every: usize,
    pub seed: u64,
}

impl Default for DqnConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 75_000,
            replay_capacity: 100_000,
            batch_size: 64,
            target_sync: 1_000,
            train_steps: 150_000,
            learning_rate: 1e-3,
            optimism: 2.0,
            curve_every: 100,
            seed: 42,
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma must be in [0,1], got {}",
                self.gamma
            )));
        }
        for (name, e) in [
            ("epsilon_start", self.epsilon_start),
            ("epsilon_end", self.epsilon_end),
        ] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {e}")));
            }
        }
        if self.replay_capacity < self.batch_size || self.batch_size == 0 {
            return Err(Error::Config(format!(
                "need replay_capacity >= batch_size >= 1, got {} / {}",
                self.replay_capacity, self.batch_size
            )));
        }
        if self.hidden.is_empty() || self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::Config("hidden layers must be nonempty".into()));
        }
        if self.target_sync == 0 || self.curve_every == 0 {
            return Err(Error::Config(
                "target_sync and curve_every must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Exploration rate after `step` gradient steps.
    pub fn epsilon_at(&self, step: usize) -> f64 {
        if self.epsilon_decay_steps == 0 {
            return self.epsilon_end;
        }
        let frac = (step as f64 / self.epsilon_decay_steps as f64).min(1.0);
        self.epsilon_start * (1.0 - frac) + self.epsilon_end * frac
    }
}

/// Per-channel Q-value pairs for "don't measure" (q0) and "measure" (q1).
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredQ {
    pub q0: Vec<f64>,
    pub q1: Vec<f64>,
}

impl FactoredQ {
    /// The joint Q of a multi-hot action under the factored assumption:
    /// the sum of the chosen per-channel values. Evaluation code must never
    /// combine channel values any other way.
    pub fn joint(&self, action: &Action) -> f64 {
        action
            .bits
            .iter()
            .enumerate()
            .map(|(k, &b)| if b == 1 { self.q1[k] } else { self.q0[k] })
            .sum()
    }

    /// Greedy action: per channel, measure iff q1 > q0 (ties break to the
    /// cheaper "don't measure").
    pub fn greedy(&self) -> Action {
        Action {
            bits: self
                .q0
                .iter()
                .zip(&self.q1)
                .map(|(q0, q1)| u8::from(q1 > q0))
                .collect(),
        }
    }
}

/// Raw dueling head outputs: K state values and a K x 2 advantage table.
#[derive(Debug, Clone, PartialEq)]
pub struct DuelingHeads {
    pub value: Vec<f64>,
    /// `advantage[k * 2 + a]` for action bit `a`.
    pub advantage: Vec<f64>,
}

impl DuelingHeads {
    /// Splits the network output `[V_0..V_K, A_0(0), A_0(1), ...]`.
    pub fn from_output(output: &[f64], n_channels: usize) -> Self {
        debug_assert_eq!(output.len(), 3 * n_channels);
        Self {
            value: output[..n_channels].to_vec(),
            advantage: output[n_channels..].to_vec(),
        }
    }
}

/// Mean-centered dueling aggregation:
/// `Q_k(a) = V_k + A_k(a) - (A_k(0) + A_k(1)) / 2`.
///
/// Invariant to adding a per-channel constant to both advantages, which
/// makes the V/A split identifiable.
pub fn dueling_aggregate(heads: &DuelingHeads) -> FactoredQ {
    let k_n = heads.value.len();
    let mut q0 = Vec::with_capacity(k_n);
    let mut q1 = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let a0 = heads.advantage[k * 2];
        let a1 = heads.advantage[k * 2 + 1];
        let center = (a0 + a1) / 2.0;
        q0.push(heads.value[k] + (a0 - center));
        q1.push(heads.value[k] + (a1 - center));
    }
    FactoredQ { q0, q1 }
}

/// Epsilon-greedy multi-hot selection: each channel independently keeps its
/// greedy bit with probability `1 - epsilon` or draws a fair random bit.
pub fn select_action(q: &FactoredQ, epsilon: f64, rng: &mut dyn RngCore) -> Action {
    let bits = q
        .q0
        .iter()
        .zip(&q.q1)
        .map(|(q0, q1)| {
            if rng.gen_range(0.0..1.0) < epsilon {
                rng.gen_range(0u8..2)
            } else {
                u8::from(q1 > q0)
            }
        })
        .collect();
    Action { bits }
}

/// Fixed-capacity ring of transitions with uniform batch sampling
/// (without replacement within a batch).
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    data: Vec<TransitionRecord>,
    capacity: usize,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            data: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            next: 0,
        }
    }

    pub fn push(&mut self, record: TransitionRecord) {
        if self.data.len() < self.capacity {
            self.data.push(record);
        } else {
            self.data[self.next] = record;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, index: usize) -> &TransitionRecord {
        &self.data[index]
    }

    pub fn sample_indices(&self, batch: usize, rng: &mut dyn RngCore) -> Vec<usize> {
        rand::seq::index::sample(rng, self.data.len(), batch).into_vec()
    }
}

/// One learning-curve row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveRow {
    pub step: usize,
    pub loss: f64,
    pub epsilon: f64,
    pub mean_return: f64,
}

/// The scheduler agent: online and target networks, optimizer, replay, and
/// seeded RNG streams (0 init, 1 actions, 2 replay sampling, 3 shuffling).
pub struct DqnAgent {
    cfg: DqnConfig,
    n_channels: usize,
    online: NetParams,
    target: NetParams,
    optimizer: Adam,
    replay: ReplayBuffer,
    action_rng: ChaCha8Rng,
    replay_rng: ChaCha8Rng,
    shuffle_rng: ChaCha8Rng,
    steps_done: usize,
}

fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl DqnAgent {
    pub fn new(input_dim: usize, n_channels: usize, cfg: DqnConfig) -> Result<Self> {
        cfg.validate()?;
        let mut specs = Vec::with_capacity(cfg.hidden.len() + 1);
        let mut prev = input_dim;
        for &h in &cfg.hidden {
            specs.push(LayerSpec::new(prev, h, Activation::Relu));
            prev = h;
        }
        // Linear head layer: K values then K advantage pairs.
        specs.push(LayerSpec::new(prev, 3 * n_channels, Activation::Identity));
        let mut init_rng = seeded_stream(cfg.seed, 0);
        let mut online = NetParams::init(specs, &mut init_rng)?;
        let head = online.biases.len() - 1;
        for k in 0..n_channels {
            online.biases[head][n_channels + k * 2] -= cfg.optimism;
            online.biases[head][n_channels + k * 2 + 1] += cfg.optimism;
        }
        let target = online.clone();
        let optimizer = Adam::new(&online, cfg.learning_rate);
        let replay = ReplayBuffer::new(cfg.replay_capacity);
        Ok(Self {
            action_rng: seeded_stream(cfg.seed, 1),
            replay_rng: seeded_stream(cfg.seed, 2),
            shuffle_rng: seeded_stream(cfg.seed, 3),
            cfg,
            n_channels,
            online,
            target,
            optimizer,
            replay,
            steps_done: 0,
        })
    }

    pub fn config(&self) -> &DqnConfig {
        &self.cfg
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn steps_done(&self) -> usize {
        self.steps_done
    }

    pub fn online_params(&self) -> &NetParams {
        &self.online
    }

    pub fn target_params(&self) -> &NetParams {
        &self.target
    }

    pub fn replay(&self) -> &ReplayBuffer {
        &self.replay
    }

    /// Factored Q-values of the online network.
    pub fn q_values(&self, state: &[f64]) -> Result<FactoredQ> {
        let out = self.online.infer(state)?;
        Ok(dueling_aggregate(&DuelingHeads::from_output(
            &out,
            self.n_channels,
        )))
    }

    pub fn sync_target(&mut self) {
        self.target = self.online.clone();
    }

    /// Per-channel Bellman targets computed with the target network only:
    /// `y_k = r_k + gamma * max(Qbar_k(s', 0), Qbar_k(s', 1))`, or `r_k` at
    /// episode end.
    pub fn bellman_targets(&self, batch: &[&TransitionRecord]) -> Result<Vec<Vec<f64>>> {
        batch
            .iter()
            .map(|rec| {
                if rec.done {
                    return Ok(rec.rewards.clone());
                }
                let out = self.target.infer(&rec.next_state)?;
                let q = dueling_aggregate(&DuelingHeads::from_output(&out, self.n_channels));
                Ok(rec
                    .rewards
                    .iter()
                    .enumerate()
                    .map(|(k, r)| r + self.cfg.gamma * q.q0[k].max(q.q1[k]))
                    .collect())
            })
            .collect()
    }

    /// One gradient step on a batch: the mean over items of the sum of K
    /// squared Bellman errors for the taken bits, backpropagated through the
    /// online network only.
    pub fn train_step(&mut self, batch: &[&TransitionRecord]) -> Result<f64> {
        let targets = self.bellman_targets(batch)?;
        let batch_len = batch.len() as f64;
        let mut total = Grads::zeros_like(&self.online);
        let mut loss = 0.0;
        for (rec, target) in batch.iter().zip(&targets) {
            loss += accumulate_record_grads(
                &self.online,
                self.n_channels,
                rec,
                target,
                batch_len,
                &mut total,
            )?;
        }
        self.apply_update(loss / batch_len, &total)
    }

    /// Samples a batch from replay and trains on it.
    fn train_step_from_replay(&mut self) -> Result<f64> {
        let indices = self
            .replay
            .sample_indices(self.cfg.batch_size, &mut self.replay_rng);
        let targets = {
            let batch: Vec<&TransitionRecord> =
                indices.iter().map(|&i| self.replay.get(i)).collect();
            self.bellman_targets(&batch)?
        };
        let batch_len = indices.len() as f64;
        let mut total = Grads::zeros_like(&self.online);
        let mut loss = 0.0;
        for (&i, target) in indices.iter().zip(&targets) {
            loss += accumulate_record_grads(
                &self.online,
                self.n_channels,
                self.replay.get(i),
                target,
                batch_len,
                &mut total,
            )?;
        }
        self.apply_update(loss / batch_len, &total)
    }

    fn apply_update(&mut self, loss: f64, grads: &Grads) -> Result<f64> {
        if !loss.is_finite() {
            return Err(Error::Training(format!(
                "non-finite loss {loss} at step {}",
                self.steps_done
            )));
        }
        self.optimizer.step(&mut self.online, grads)?;
        Ok(loss)
    }

    /// Frozen greedy policy snapshot for evaluation.
    pub fn greedy_policy(&self, name: &str) -> GreedyPolicy {
        GreedyPolicy {
            net: self.online.clone(),
            n_channels: self.n_channels,
            name: name.to_string(),
            seed: self.cfg.seed,
        }
    }
}

/// Accumulates one record's contribution to the batch gradient and returns
/// its summed squared Bellman error.
///
/// d(loss)/d(head outputs) for `Q_k(a) = V_k + A_k(a) - mean_a A_k`:
/// 1 on the value, +1/2 on the taken advantage, -1/2 on the other.
fn accumulate_record_grads(
    online: &NetParams,
    n_channels: usize,
    rec: &TransitionRecord,
    target: &[f64],
    batch_len: f64,
    total: &mut Grads,
) -> Result<f64> {
    let (out, cache) = online.forward(&rec.state)?;
    let q = dueling_aggregate(&DuelingHeads::from_output(&out, n_channels));
    let mut out_grad = vec![0.0; out.len()];
    let mut loss = 0.0;
    for k in 0..n_channels {
        let taken = rec.action.bits[k];
        let q_taken = if taken == 1 { q.q1[k] } else { q.q0[k] };
        let diff = q_taken - target[k];
        loss += diff * diff;
        let g = 2.0 * diff / batch_len;
        out_grad[k] += g;
        let a_base = n_channels + k * 2;
        out_grad[a_base + taken as usize] += 0.5 * g;
        out_grad[a_base + (1 - taken) as usize] -= 0.5 * g;
    }
    total.accumulate(&online.backward(&cache, &out_grad)?);
    Ok(loss)
}

/// Greedy (epsilon = 0) policy over a frozen parameter snapshot.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    net: NetParams,
    n_channels: usize,
    name: String,
    seed: u64,
}

impl GreedyPolicy {
    pub fn new(net: NetParams, n_channels: usize, name: String, seed: u64) -> Result<Self> {
        if net.output_dim() != 3 * n_channels {
            return Err(Error::Config(format!(
                "network output {} does not match 3 * {n_channels} head values",
                net.output_dim()
            )));
        }
        Ok(Self {
            net,
            n_channels,
            name,
            seed,
        })
    }

    pub fn params(&self) -> &NetParams {
        &self.net
    }

    pub fn q_values(&self, state: &[f64]) -> Result<FactoredQ> {
        let out = self.net.infer(state)?;
        Ok(dueling_aggregate(&DuelingHeads::from_output(
            &out,
            self.n_channels,
        )))
    }
}

impl Policy for GreedyPolicy {
    fn act(&self, state: &[f64], _rng: &mut dyn RngCore) -> Action {
        self.q_values(state)
            .expect("state dimension fixed at construction")
            .greedy()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

/// Training output: the learning curve and per-episode returns.
#[derive(Debug, Clone, Default)]
pub struct TrainLog {
    pub curve: Vec<CurveRow>,
    pub episode_returns: Vec<f64>,
}

const RECENT_RETURN_WINDOW: usize = 20;

/// Trains an agent over the dataset: episodes are shuffled each epoch,
/// actions are epsilon-greedy, one gradient step runs per environment step
/// once the replay holds a full batch, and the target network syncs every
/// `target_sync` steps.
pub fn train(
    dataset: &[Trajectory],
    oracle: &Oracle,
    env_cfg: &EnvConfig,
    cfg: &DqnConfig,
) -> Result<(DqnAgent, TrainLog)> {
    if dataset.is_empty() {
        return Err(Error::Config("training dataset is empty".into()));
    }
    let probe = Environment::new(&dataset[0], oracle, env_cfg)?;
    let input_dim = probe.state_dim();
    let n_channels = probe.n_channels();
    drop(probe);
    let mut agent = DqnAgent::new(input_dim, n_channels, cfg.clone())?;
    let mut log = TrainLog::default();
    let mut last_loss = f64::NAN;

    'training: loop {
        if agent.steps_done >= cfg.train_steps {
            break;
        }
        let mut order: Vec<usize> = (0..dataset.len()).collect();
        order.shuffle(&mut agent.shuffle_rng);
        for idx in order {
            let mut env = Environment::new(&dataset[idx], oracle, env_cfg)?;
            let mut state = env.state();
            let mut episode_return = 0.0;
            while !env.is_done() {
                if agent.steps_done >= cfg.train_steps {
                    break 'training;
                }
                let epsilon = cfg.epsilon_at(agent.steps_done);
                let q = agent.q_values(&state)?;
                let action = select_action(&q, epsilon, &mut agent.action_rng);
                let out = env.step(&action)?;
                episode_return += out.rewards.iter().sum::<f64>();
                agent.replay.push(TransitionRecord {
                    state,
                    action,
                    rewards: out.rewards,
                    next_state: out.next_state.clone(),
                    done: out.done,
                });
                if agent.replay.len() >= cfg.batch_size {
                    last_loss = agent.train_step_from_replay()?;
                }
                agent.steps_done += 1;
                if agent.steps_done % cfg.target_sync == 0 {
                    agent.sync_target();
                }
                if agent.steps_done % cfg.curve_every == 0 {
                    let recent = &log.episode_returns
                        [log.episode_returns.len().saturating_sub(RECENT_RETURN_WINDOW)..];
                    let mean_return = if recent.is_empty() {
                        f64::NAN
                    } else {
                        recent.iter().sum::<f64>() / recent.len() as f64
                    };
                    log.curve.push(CurveRow {
                        step: agent.steps_done,
                        loss: last_loss,
                        epsilon,
                        mean_return,
                    });
                }
                state = out.next_state;
            }
            log.episode_returns.push(episode_return);
        }
    }
    Ok((agent, log))
}
