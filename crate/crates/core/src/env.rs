//! Sequential decision process over simulated trajectories.
//!
//! Wraps a trajectory and the oracle: the agent holds an observation window,
//! picks a multi-hot action each step to reveal the next timepoint's
//! measurements, and receives per-channel rewards `r_k = lambda * g_k - c_k`
//! for measured channels (0 for unmeasured ones). The predictive gain `g_k`
//! counts only when the revealed timepoint's event label is positive.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{Oracle, Window};
use crate::sim::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Weight trading predictive gain against measurement cost.
    pub lambda: f64,
    /// Discount factor shared with the agent's learning target. Accumulated
    /// rewards are reported undiscounted.
    pub gamma: f64,
    /// Per-channel measurement cost.
    pub cost: Vec<f64>,
    /// Appends the observation mask window to the agent state.
    pub include_mask_channel: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            lambda: 105.0,
            gamma: 0.99,
            cost: vec![1.0; 6],
            include_mask_channel: false,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self, n_channels: usize) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::Config(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma must be in [0,1], got {}",
                self.gamma
            )));
        }
        if self.cost.len() != n_channels {
            return Err(Error::Config(format!(
                "cost vector length {} does not match {} channels",
                self.cost.len(),
                n_channels
            )));
        }
        if self.cost.iter().any(|c| *c < 0.0 || !c.is_finite()) {
            return Err(Error::Config("costs must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Multi-hot measurement action: bit `k` orders channel `k` for the next
/// timepoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub bits: Vec<u8>,
}

impl Action {
    pub fn none(k: usize) -> Self {
        Self { bits: vec![0; k] }
    }

    pub fn from_channels(k: usize, channels: &[usize]) -> Self {
        let mut bits = vec![0; k];
        for &c in channels {
            bits[c] = 1;
        }
        Self { bits }
    }

    pub fn is_set(&self, k: usize) -> bool {
        self.bits[k] == 1
    }
}

/// One replay entry: flattened window state, action, per-channel rewards,
/// next state, terminal flag. `rewards[k]` is 0 whenever bit `k` is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub state: Vec<f64>,
    pub action: Action,
    pub rewards: Vec<f64>,
    pub next_state: Vec<f64>,
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: Vec<f64>,
    pub rewards: Vec<f64>,
    pub done: bool,
}

/// Maps an agent state to an action. Policies see observation windows only;
/// hidden simulator state never reaches them.
pub trait Policy: Sync + Send {
    fn act(&self, state: &[f64], rng: &mut dyn RngCore) -> Action;
    fn name(&self) -> String;
    /// Base seed for the policy's random draws; rollout harnesses derive
    /// per-episode streams from it.
    fn seed(&self) -> u64 {
        0
    }
}

/// One episode over one trajectory. Instances are independent and safe to
/// run in parallel; a single instance is single-threaded.
pub struct Environment<'a> {
    traj: &'a Trajectory,
    oracle: &'a Oracle,
    cfg: &'a EnvConfig,
    window: Window,
    mask_window: Window,
    clock: usize,
    done: bool,
}

impl<'a> Environment<'a> {
    /// Builds the environment with a zeroed observation window and the clock
    /// at 0 (nothing measured yet).
    pub fn new(traj: &'a Trajectory, oracle: &'a Oracle, cfg: &'a EnvConfig) -> Result<Self> {
        let k = traj.n_channels;
        if oracle.n_channels() != k {
            return Err(Error::Config(format!(
                "oracle expects {} channels, trajectory has {k}",
                oracle.n_channels()
            )));
        }
        cfg.validate(k)?;
        if traj.is_empty() {
            return Err(Error::Config("trajectory must be nonempty".into()));
        }
        let window_len = oracle.window_len();
        Ok(Self {
            traj,
            oracle,
            cfg,
            window: Window::zeroed(window_len, k),
            mask_window: Window::zeroed(window_len, k),
            clock: 0,
            done: false,
        })
    }

    /// Rewinds to the start of the episode.
    pub fn reset(&mut self) {
        self.window = Window::zeroed(self.oracle.window_len(), self.traj.n_channels);
        self.mask_window = Window::zeroed(self.oracle.window_len(), self.traj.n_channels);
        self.clock = 0;
        self.done = false;
    }

    pub fn n_channels(&self) -> usize {
        self.traj.n_channels
    }

    /// Flattened agent state: the observation window, plus the mask window
    /// when `include_mask_channel` is on.
    pub fn state(&self) -> Vec<f64> {
        let mut s = self.window.as_slice().to_vec();
        if self.cfg.include_mask_channel {
            s.extend_from_slice(self.mask_window.as_slice());
        }
        s
    }

    pub fn state_dim(&self) -> usize {
        let base = self.oracle.window_len() * self.traj.n_channels;
        if self.cfg.include_mask_channel {
            base * 2
        } else {
            base
        }
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn clock(&self) -> usize {
        self.clock
    }

    /// Hidden state of the timepoint the next step will reveal. Analysis
    /// only; never part of the agent state.
    pub fn upcoming_hidden_state(&self) -> u8 {
        self.traj.states[self.clock]
    }

    /// Applies a multi-hot action: reveals ordered channels of the next
    /// timepoint (0 where the simulator masked the value), pays their costs,
    /// credits `lambda * gain` when the revealed timepoint is labeled, and
    /// shifts the window.
    pub fn step(&mut self, action: &Action) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::Usage("step called after episode end".into()));
        }
        let k_n = self.traj.n_channels;
        if action.bits.len() != k_n {
            return Err(Error::Argument(format!(
                "action length {} does not match {k_n} channels",
                action.bits.len()
            )));
        }
        let t = self.clock;
        let labeled = self.traj.labels[t] == 1;
        let revealed: Vec<f64> = (0..k_n)
            .map(|k| {
                if self.traj.is_observed(t, k) {
                    self.traj.value(t, k)
                } else {
                    0.0
                }
            })
            .collect();

        let pending = self.window.shifted_pending();
        let mut rewards = vec![0.0; k_n];
        let mut new_row = vec![0.0; k_n];
        let mut new_mask_row = vec![0.0; k_n];
        for k in 0..k_n {
            if !action.is_set(k) {
                continue;
            }
            let gain = if labeled {
                self.oracle.predictive_gain(&pending, &revealed, k)?
            } else {
                0.0
            };
            rewards[k] = self.cfg.lambda * gain - self.cfg.cost[k];
            new_row[k] = revealed[k];
            new_mask_row[k] = 1.0;
        }
        self.window.shift_push(&new_row);
        self.mask_window.shift_push(&new_mask_row);
        self.clock += 1;
        self.done = self.clock >= self.traj.len();
        Ok(StepOutcome {
            next_state: self.state(),
            rewards,
            done: self.done,
        })
    }
}

/// Executes `policy` to episode end. Returns the transition records and the
/// undiscounted accumulated reward (sum over steps and channels).
pub fn rollout(
    policy: &dyn Policy,
    traj: &Trajectory,
    oracle: &Oracle,
    cfg: &EnvConfig,
    rng: &mut dyn RngCore,
) -> Result<(Vec<TransitionRecord>, f64)> {
    let mut env = Environment::new(traj, oracle, cfg)?;
    let mut records = Vec::with_capacity(traj.len());
    let mut total = 0.0;
    let mut state = env.state();
    while !env.is_done() {
        let action = policy.act(&state, rng);
        let out = env.step(&action)?;
        total += out.rewards.iter().sum::<f64>();
        records.push(TransitionRecord {
            state,
            action,
            rewards: out.rewards,
            next_state: out.next_state.clone(),
            done: out.done,
        });
        state = out.next_state;
    }
    Ok((records, total))
}
