//! Heuristic scheduling baselines.
//!
//! Seven fixed policies over the informative channels plus a never-measure
//! control, all behind the same [`Policy`] interface as the learned agent.
//! Every heuristic ignores the state, so their action distributions are
//! identical at every step.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::env::{Action, Policy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    /// Measure F1 every step.
    F1Alone,
    F2Alone,
    F3Alone,
    /// Measure exactly one of F1..F3, uniformly at random, every step.
    F13Random,
    /// Measure F1, F2 and F3 every step.
    F13All,
    /// Measure the fixed pair F1+F2 every step.
    F12Alone,
    /// Measure the fixed pair F2+F3 every step.
    F23Alone,
    /// Zero-reward control anchoring the reward scale.
    NeverMeasure,
    /// Alternative reading of the pair baselines: one of F1/F2 at random.
    F12Random,
    /// Alternative reading of the pair baselines: one of F2/F3 at random.
    F23Random,
}

impl HeuristicKind {
    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::F1Alone => "f1_alone",
            HeuristicKind::F2Alone => "f2_alone",
            HeuristicKind::F3Alone => "f3_alone",
            HeuristicKind::F13Random => "f1-3_random",
            HeuristicKind::F13All => "f1-3_all",
            HeuristicKind::F12Alone => "f1-2_alone",
            HeuristicKind::F23Alone => "f2-3_alone",
            HeuristicKind::NeverMeasure => "never_measure",
            HeuristicKind::F12Random => "f1-2_random",
            HeuristicKind::F23Random => "f2-3_random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::all().into_iter().find(|k| k.name() == s)
    }

    pub fn all() -> Vec<Self> {
        vec![
            HeuristicKind::F1Alone,
            HeuristicKind::F2Alone,
            HeuristicKind::F3Alone,
            HeuristicKind::F13Random,
            HeuristicKind::F13All,
            HeuristicKind::F12Alone,
            HeuristicKind::F23Alone,
            HeuristicKind::NeverMeasure,
            HeuristicKind::F12Random,
            HeuristicKind::F23Random,
        ]
    }

    /// The comparison set: the seven heuristics plus the never-measure
    /// control, in report order.
    pub fn standard_set() -> Vec<Self> {
        vec![
            HeuristicKind::F1Alone,
            HeuristicKind::F2Alone,
            HeuristicKind::F3Alone,
            HeuristicKind::F13Random,
            HeuristicKind::F13All,
            HeuristicKind::F12Alone,
            HeuristicKind::F23Alone,
            HeuristicKind::NeverMeasure,
        ]
    }

    /// The seven heuristics the learned policy is compared against
    /// (excludes the never-measure control).
    pub fn heuristic_set() -> Vec<Self> {
        Self::standard_set()
            .into_iter()
            .filter(|k| *k != HeuristicKind::NeverMeasure)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct HeuristicPolicy {
    pub kind: HeuristicKind,
    pub seed: u64,
    n_channels: usize,
}

impl HeuristicPolicy {
    pub fn new(kind: HeuristicKind, n_channels: usize, seed: u64) -> Result<Self> {
        if n_channels < 3 {
            return Err(Error::Config(format!(
                "heuristics need at least 3 channels, got {n_channels}"
            )));
        }
        Ok(Self {
            kind,
            seed,
            n_channels,
        })
    }
}

impl Policy for HeuristicPolicy {
    fn act(&self, _state: &[f64], rng: &mut dyn RngCore) -> Action {
        let k = self.n_channels;
        match self.kind {
            HeuristicKind::F1Alone => Action::from_channels(k, &[0]),
            HeuristicKind::F2Alone => Action::from_channels(k, &[1]),
            HeuristicKind::F3Alone => Action::from_channels(k, &[2]),
            HeuristicKind::F13All => Action::from_channels(k, &[0, 1, 2]),
            HeuristicKind::F12Alone => Action::from_channels(k, &[0, 1]),
            HeuristicKind::F23Alone => Action::from_channels(k, &[1, 2]),
            HeuristicKind::NeverMeasure => Action::none(k),
            HeuristicKind::F13Random => Action::from_channels(k, &[rng.gen_range(0..3)]),
            HeuristicKind::F12Random => Action::from_channels(k, &[rng.gen_range(0..2)]),
            HeuristicKind::F23Random => Action::from_channels(k, &[rng.gen_range(1..3)]),
        }
    }

    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn act(kind: HeuristicKind, rng: &mut ChaCha8Rng) -> Action {
        HeuristicPolicy::new(kind, 6, 0)
            .unwrap()
            .act(&[0.0; 30], rng)
    }

    #[test]
    fn fixed_kinds_produce_their_documented_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            act(HeuristicKind::F13All, &mut rng).bits,
            vec![1, 1, 1, 0, 0, 0]
        );
        assert_eq!(
            act(HeuristicKind::F1Alone, &mut rng).bits,
            vec![1, 0, 0, 0, 0, 0]
        );
        assert_eq!(
            act(HeuristicKind::F12Alone, &mut rng).bits,
            vec![1, 1, 0, 0, 0, 0]
        );
        assert_eq!(
            act(HeuristicKind::F23Alone, &mut rng).bits,
            vec![0, 1, 1, 0, 0, 0]
        );
        assert_eq!(
            act(HeuristicKind::NeverMeasure, &mut rng).bits,
            vec![0, 0, 0, 0, 0, 0]
        );
    }

    #[test]
    fn random_variant_is_uniform_over_the_informative_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 30_000;
        let mut counts = [0usize; 6];
        for _ in 0..n {
            let a = act(HeuristicKind::F13Random, &mut rng);
            assert_eq!(
                a.bits.iter().map(|&b| b as usize).sum::<usize>(),
                1,
                "exactly one channel per step"
            );
            for (c, b) in counts.iter_mut().zip(&a.bits) {
                *c += *b as usize;
            }
        }
        let sd = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for k in 0..3 {
            assert!(
                (counts[k] as f64 - n as f64 / 3.0).abs() <= 3.0 * sd,
                "channel {k} drawn {} times",
                counts[k]
            );
        }
        assert_eq!(counts[3..], [0, 0, 0], "noise channels never selected");
    }

    #[test]
    fn heuristics_ignore_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in HeuristicKind::standard_set() {
            if kind == HeuristicKind::F13Random {
                continue;
            }
            let p = HeuristicPolicy::new(kind, 6, 0).unwrap();
            let a = p.act(&[0.0; 30], &mut rng);
            let b = p.act(&[9.0; 30], &mut rng);
            assert_eq!(a, b, "{kind:?} must not react to the state");
        }
    }

    #[test]
    fn no_heuristic_ever_selects_noise_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in HeuristicKind::all() {
            let p = HeuristicPolicy::new(kind, 6, 0).unwrap();
            for _ in 0..50 {
                let a = p.act(&[0.0; 30], &mut rng);
                assert_eq!(&a.bits[3..], &[0, 0, 0], "{kind:?} touched a noise channel");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in HeuristicKind::all() {
            assert_eq!(HeuristicKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(HeuristicKind::parse("nope"), None);
        assert_eq!(HeuristicKind::standard_set().len(), 8);
        assert_eq!(HeuristicKind::heuristic_set().len(), 7);
    }
}
