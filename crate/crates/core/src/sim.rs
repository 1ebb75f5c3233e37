//! Two-state Markov patient simulator.
//!
//! Generates synthetic trajectories: a hidden healthy/critical status chain,
//! per-channel measurement values with Gaussian noise, random missingness,
//! and terminal-event labels. A terminal event is the first completion of
//! `terminal_run` consecutive critical steps; the trajectory ends there.
//!
//! Generation is a pure function of `(config, seed, index)`: every trajectory
//! draws from its own ChaCha stream, so dataset generation order (or
//! parallelism) never changes content.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of informative channels (F1..F3); the rest carry noise.
pub const INFORMATIVE_CHANNELS: usize = 3;
/// 0-based index of the Bernoulli noise channel (spec channel 5).
pub const BERNOULLI_CHANNEL: usize = 4;

/// Simulator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Per-step healthy -> critical transition probability.
    pub p_h2c: f64,
    /// Per-step critical -> healthy transition probability.
    pub p_c2h: f64,
    /// Consecutive critical steps that define a terminal event.
    pub terminal_run: usize,
    /// Label lookahead: a step is positive when a terminal event onsets
    /// within this many future steps.
    pub horizon: usize,
    /// Number of measurement channels K.
    pub n_channels: usize,
    /// Maximum trajectory length is drawn uniformly from `[len_min, len_max]`.
    pub len_min: usize,
    pub len_max: usize,
    /// Probability that a generated value is removed (mask 0, value 0).
    pub missing_rate: f64,
    /// Success probability of the Bernoulli channel's `c_t` draw.
    pub bernoulli_p: f64,
    /// Disables the Gaussian noise term for deterministic tests.
    pub noise_enabled: bool,
    /// Test hook: start the chain in the critical state instead of healthy.
    pub start_critical: bool,
    /// Base seed for dataset generation.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            p_h2c: 0.1,
            p_c2h: 0.3,
            terminal_run: 5,
            horizon: 5,
            n_channels: 6,
            len_min: 20,
            len_max: 40,
            missing_rate: 0.2,
            bernoulli_p: 0.5,
            noise_enabled: true,
            start_critical: false,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_h2c", self.p_h2c),
            ("p_c2h", self.p_c2h),
            ("missing_rate", self.missing_rate),
            ("bernoulli_p", self.bernoulli_p),
        ] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::Config(format!("{name} must be in [0,1], got {p}")));
            }
        }
        if self.len_min == 0 || self.len_min > self.len_max {
            return Err(Error::Config(format!(
                "need 1 <= len_min <= len_max, got [{}, {}]",
                self.len_min, self.len_max
            )));
        }
        if self.terminal_run == 0 {
            return Err(Error::Config("terminal_run must be >= 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.n_channels < 4 {
            return Err(Error::Config(format!(
                "n_channels must be >= 4, got {}",
                self.n_channels
            )));
        }
        Ok(())
    }
}

/// One simulated patient.
///
/// `values` and `mask` are `T x K` row-major; masked entries are exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<u8>,
    pub values: Vec<f64>,
    pub mask: Vec<u8>,
    pub labels: Vec<u8>,
    pub terminal_step: Option<usize>,
    pub n_channels: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn value(&self, t: usize, k: usize) -> f64 {
        self.values[t * self.n_channels + k]
    }

    pub fn is_observed(&self, t: usize, k: usize) -> bool {
        self.mask[t * self.n_channels + k] == 1
    }
}

/// Walks the two-state Markov chain until the first completed critical run
/// or the drawn maximum length, whichever comes first.
pub fn simulate_states(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let max_len = rng.gen_range(cfg.len_min..=cfg.len_max);
    let mut states = Vec::with_capacity(max_len);
    let mut state: u8 = cfg.start_critical as u8;
    let mut run = 0usize;
    for t in 0..max_len {
        if t > 0 {
            let flip = match state {
                0 => rng.gen_bool(cfg.p_h2c),
                _ => rng.gen_bool(cfg.p_c2h),
            };
            if flip {
                state ^= 1;
            }
        }
        states.push(state);
        run = if state == 1 { run + 1 } else { 0 };
        if run >= cfg.terminal_run {
            break;
        }
    }
    states
}

/// Emits the `T x K` measurement matrix and missingness mask for a state
/// sequence.
///
/// Channels 0..3 read `(+/-1 + eps)` from the hidden state; channel
/// [`BERNOULLI_CHANNEL`] reads `c_t + eps`; all remaining channels read pure
/// noise. Draw order per timepoint is fixed: `c_t`, then per channel `eps`
/// followed by the missingness flag.
pub fn emit_measurements(
    states: &[u8],
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<u8>) {
    let k_n = cfg.n_channels;
    let mut values = vec![0.0; states.len() * k_n];
    let mut mask = vec![0u8; states.len() * k_n];
    for (t, &s) in states.iter().enumerate() {
        let c_t = if k_n > BERNOULLI_CHANNEL && rng.gen_bool(cfg.bernoulli_p) {
            1.0
        } else {
            0.0
        };
        for k in 0..k_n {
            let eps: f64 = if cfg.noise_enabled {
                rng.sample(StandardNormal)
            } else {
                0.0
            };
            let base = if k < INFORMATIVE_CHANNELS {
                if s == 1 {
                    1.0 + eps
                } else {
                    -1.0 + eps
                }
            } else if k == BERNOULLI_CHANNEL {
                c_t + eps
            } else {
                eps
            };
            if rng.gen_bool(cfg.missing_rate) {
                // removed: value stays 0, mask stays 0
            } else {
                values[t * k_n + k] = base;
                mask[t * k_n + k] = 1;
            }
        }
    }
    (values, mask)
}

/// Labels each step positive when a terminal event completes within
/// `cfg.horizon` future steps, and returns the terminal step if any.
pub fn label_events(states: &[u8], cfg: &SimConfig) -> (Vec<u8>, Option<usize>) {
    let mut terminal_step = None;
    let mut run = 0usize;
    for (t, &s) in states.iter().enumerate() {
        run = if s == 1 { run + 1 } else { 0 };
        if run >= cfg.terminal_run {
            terminal_step = Some(t);
            break;
        }
    }
    let labels = states
        .iter()
        .enumerate()
        .map(|(t, _)| match terminal_step {
            Some(ts) => u8::from(t <= ts && ts - t <= cfg.horizon),
            None => 0,
        })
        .collect();
    (labels, terminal_step)
}

/// Generates trajectory `index` of the dataset seeded by `seed`.
///
/// Each trajectory owns ChaCha stream `index` of the seed, so results do not
/// depend on generation order.
pub fn generate_trajectory(cfg: &SimConfig, seed: u64, index: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let states = simulate_states(cfg, &mut rng);
    let (values, mask) = emit_measurements(&states, cfg, &mut rng);
    let (labels, terminal_step) = label_events(&states, cfg);
    Trajectory {
        states,
        values,
        mask,
        labels,
        terminal_step,
        n_channels: cfg.n_channels,
    }
}

/// Generates `n` independent trajectories (in parallel; content is a pure
/// function of `(cfg, seed, index)`).
pub fn generate_dataset(cfg: &SimConfig, n: usize, seed: u64) -> Vec<Trajectory> {
    assert!(n >= 1, "dataset size must be >= 1");
    (0..n as u64)
        .into_par_iter()
        .map(|i| generate_trajectory(cfg, seed, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig::default()
    }

    fn rng_for(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Independent oracle: first index completing `run` consecutive 1s.
    fn brute_force_first_run(states: &[u8], run: usize) -> Option<usize> {
        (0..states.len()).find(|&t| t + 1 >= run && states[t + 1 - run..=t].iter().all(|&s| s == 1))
    }

    #[test]
    fn absorbing_healthy_state_never_terminates() {
        let c = SimConfig {
            p_h2c: 0.0,
            ..cfg()
        };
        let states = simulate_states(&c, &mut rng_for(1));
        assert!(states.iter().all(|&s| s == 0));
        let (labels, terminal) = label_events(&states, &c);
        assert!(terminal.is_none());
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn forced_critical_start_terminates_at_run_length() {
        let c = SimConfig {
            p_c2h: 0.0,
            start_critical: true,
            ..cfg()
        };
        let states = simulate_states(&c, &mut rng_for(2));
        assert_eq!(states, vec![1, 1, 1, 1, 1]);
        let (labels, terminal) = label_events(&states, &c);
        assert_eq!(terminal, Some(4));
        assert_eq!(labels, vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn transition_frequency_matches_config_within_3_sigma() {
        let c = SimConfig {
            len_min: 10_000,
            len_max: 10_000,
            terminal_run: usize::MAX,
            ..cfg()
        };
        let states = simulate_states(&c, &mut rng_for(3));
        assert_eq!(states.len(), 10_000);
        let mut n0 = 0usize;
        let mut n01 = 0usize;
        let mut n1 = 0usize;
        let mut n10 = 0usize;
        for w in states.windows(2) {
            match (w[0], w[1]) {
                (0, 1) => {
                    n0 += 1;
                    n01 += 1;
                }
                (0, 0) => n0 += 1,
                (1, 0) => {
                    n1 += 1;
                    n10 += 1;
                }
                _ => n1 += 1,
            }
        }
        let f01 = n01 as f64 / n0 as f64;
        let sd01 = (c.p_h2c * (1.0 - c.p_h2c) / n0 as f64).sqrt();
        assert!(
            (f01 - c.p_h2c).abs() <= 3.0 * sd01,
            "0->1 frequency {f01} vs {} (3sd {sd01})",
            c.p_h2c
        );
        let f10 = n10 as f64 / n1 as f64;
        let sd10 = (c.p_c2h * (1.0 - c.p_c2h) / n1 as f64).sqrt();
        assert!(
            (f10 - c.p_c2h).abs() <= 3.0 * sd10,
            "1->0 frequency {f10} vs {} (3sd {sd10})",
            c.p_c2h
        );
    }

    #[test]
    fn noise_free_measurement_rows_follow_generative_law() {
        // Critical row with c_t forced to 1: (1, 1, 1, 0, 1, 0).
        let c = SimConfig {
            noise_enabled: false,
            missing_rate: 0.0,
            bernoulli_p: 1.0,
            ..cfg()
        };
        let (values, mask) = emit_measurements(&[1], &c, &mut rng_for(4));
        assert_eq!(values, vec![1.0, 1.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(mask.iter().all(|&m| m == 1));

        // Healthy row with c_t forced to 0: (-1, -1, -1, 0, 0, 0).
        let c = SimConfig {
            bernoulli_p: 0.0,
            ..c
        };
        let (values, _) = emit_measurements(&[0], &c, &mut rng_for(5));
        assert_eq!(values, vec![-1.0, -1.0, -1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn masked_fraction_matches_missing_rate_within_3_sigma() {
        let c = SimConfig {
            missing_rate: 0.3,
            ..cfg()
        };
        let states = vec![0u8; 2_000];
        let (values, mask) = emit_measurements(&states, &c, &mut rng_for(6));
        let n = mask.len();
        assert!(n >= 10_000);
        let masked = mask.iter().filter(|&&m| m == 0).count() as f64 / n as f64;
        let sd = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!(
            (masked - 0.3).abs() <= 3.0 * sd,
            "masked fraction {masked} vs 0.3 (3sd {sd})"
        );
        for (i, &m) in mask.iter().enumerate() {
            if m == 0 {
                assert_eq!(values[i], 0.0, "masked entry {i} must be exactly 0");
            }
        }
    }

    #[test]
    fn bernoulli_channel_mean_within_3_sigma() {
        let c = SimConfig {
            noise_enabled: false,
            missing_rate: 0.0,
            ..cfg()
        };
        let n = 10_000;
        let states = vec![0u8; n];
        let (values, _) = emit_measurements(&states, &c, &mut rng_for(7));
        let mean = (0..n)
            .map(|t| values[t * c.n_channels + BERNOULLI_CHANNEL])
            .sum::<f64>()
            / n as f64;
        let sd = (0.5f64 * 0.5 / n as f64).sqrt();
        assert!(
            (mean - 0.5).abs() <= 3.0 * sd,
            "bernoulli mean {mean} vs 0.5 (3sd {sd})"
        );
    }

    #[test]
    fn label_window_covers_horizon_before_terminal() {
        let c = cfg();
        let (labels, terminal) = label_events(&[0, 1, 1, 1, 1, 1], &c);
        assert_eq!(terminal, Some(5));
        assert_eq!(labels, vec![1, 1, 1, 1, 1, 1]);

        // Broken run never completes.
        let mut states = vec![1, 1, 1, 0];
        states.extend(std::iter::repeat(0).take(20));
        let (labels, terminal) = label_events(&states, &c);
        assert_eq!(terminal, None);
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn terminal_rule_matches_brute_force_on_all_length_10_strings() {
        let c = SimConfig {
            terminal_run: 5,
            ..cfg()
        };
        for bits in 0u32..1024 {
            let states: Vec<u8> = (0..10).map(|i| ((bits >> i) & 1) as u8).collect();
            let (labels, terminal) = label_events(&states, &c);
            let expected = brute_force_first_run(&states, c.terminal_run);
            assert_eq!(terminal, expected, "states {states:?}");
            for (t, &l) in labels.iter().enumerate() {
                let want = match expected {
                    Some(ts) => u8::from(t <= ts && ts - t <= c.horizon),
                    None => 0,
                };
                assert_eq!(l, want, "label at {t} for {states:?}");
            }
        }
    }

    #[test]
    fn dataset_is_deterministic_and_order_independent() {
        let c = cfg();
        let a = generate_dataset(&c, 50, 123);
        let b = generate_dataset(&c, 50, 123);
        assert_eq!(a, b);
        // Per-index substreams: trajectory content does not depend on n.
        let wider = generate_dataset(&c, 60, 123);
        assert_eq!(a[..], wider[..50]);
        assert_eq!(generate_dataset(&c, 1, 9).len(), 1);
    }

    #[test]
    fn generated_trajectories_satisfy_invariants() {
        let c = cfg();
        for traj in generate_dataset(&c, 200, 7) {
            assert!(traj.len() >= 1 && traj.len() <= c.len_max);
            assert_eq!(
                traj.terminal_step,
                brute_force_first_run(&traj.states, c.terminal_run)
            );
            if let Some(ts) = traj.terminal_step {
                assert_eq!(ts, traj.len() - 1, "trajectory must end at terminal step");
                assert!(traj.states[ts + 1 - c.terminal_run..=ts]
                    .iter()
                    .all(|&s| s == 1));
            }
            for t in 0..traj.len() {
                for k in 0..c.n_channels {
                    if !traj.is_observed(t, k) {
                        assert_eq!(traj.value(t, k), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn config_validation_rejects_bad_parameters() {
        assert!(SimConfig::default().validate().is_ok());
        let bad = SimConfig {
            p_h2c: 1.5,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = SimConfig {
            len_min: 10,
            len_max: 5,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = SimConfig {
            n_channels: 3,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = SimConfig {
            terminal_run: 0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }
}
