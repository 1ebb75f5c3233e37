//! Scratch probe: compare hand-coded scheduling policies across simulator
//! regimes to find where the target pattern (top channel always, second
//! channel conditionally) strictly dominates its perturbations.

use rand::RngCore;
use schedrl_core::env::{Action, EnvConfig, Policy};
use schedrl_core::eval::evaluate_policy;
use schedrl_core::oracle::{Oracle, OracleConfig};
use schedrl_core::sim::{generate_dataset, SimConfig};

/// F3 measured on a duty cycle / conditionally; F2/F1 added when the
/// window's F3 evidence looks critical.
struct Handmade {
    name: &'static str,
    /// measure F3: 0 never, 1 always, 2 every 2nd step (by window parity),
    /// 3 unless confidently healthy, 4 only when critical-looking
    f3_mode: u8,
    f2_critical: bool,
    f2_always: bool,
    f1_critical: bool,
}

impl Handmade {
    fn evidence(state: &[f64]) -> (f64, f64, bool) {
        // Window is 5 rows x 6 channels; F3 column index 2.
        let mut sum = 0.0;
        let mut newest = 0.0;
        let mut any = false;
        for t in 0..5 {
            let v = state[t * 6 + 2];
            if v != 0.0 {
                sum += v;
                newest = v;
                any = true;
            }
        }
        (sum, newest, any)
    }
}

impl Policy for Handmade {
    fn act(&self, state: &[f64], _rng: &mut dyn RngCore) -> Action {
        let (sum, newest, any) = Self::evidence(state);
        let critical = any && (newest > 0.0 || sum > 1.0);
        let healthy_confident = any && sum < -2.0 && newest < 0.0;
        let f3 = match self.f3_mode {
            0 => false,
            1 => true,
            2 => state.iter().filter(|v| **v != 0.0).count() % 2 == 0,
            3 => !healthy_confident,
            _ => critical || !any,
        };
        let mut ch = Vec::new();
        if f3 {
            ch.push(2);
        }
        if self.f2_always || (self.f2_critical && critical) {
            ch.push(1);
        }
        if self.f1_critical && critical {
            ch.push(0);
        }
        Action::from_channels(6, &ch)
    }
    fn name(&self) -> String {
        self.name.into()
    }
    fn seed(&self) -> u64 {
        5
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let p_h2c: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let missing: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let p_c2h: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.3);

    let sim = SimConfig {
        p_h2c,
        p_c2h,
        missing_rate: missing,
        ..SimConfig::default()
    };
    let test = generate_dataset(&sim, 2_000, 43);
    let oracle = Oracle::new(OracleConfig::default(), 6).unwrap();
    let env_cfg = EnvConfig::default();

    let policies = [
        Handmade { name: "fig2(f3+f2crit)", f3_mode: 1, f2_critical: true, f2_always: false, f1_critical: false },
        Handmade { name: "fig2+f1crit", f3_mode: 1, f2_critical: true, f2_always: false, f1_critical: true },
        Handmade { name: "f3_always", f3_mode: 1, f2_critical: false, f2_always: false, f1_critical: false },
        Handmade { name: "f3_thrifty", f3_mode: 3, f2_critical: false, f2_always: false, f1_critical: false },
        Handmade { name: "f3_thrifty+f2c", f3_mode: 3, f2_critical: true, f2_always: false, f1_critical: false },
        Handmade { name: "f3_when_crit", f3_mode: 4, f2_critical: true, f2_always: false, f1_critical: false },
        Handmade { name: "f3+f2_always", f3_mode: 1, f2_critical: false, f2_always: true, f1_critical: false },
        Handmade { name: "never", f3_mode: 0, f2_critical: false, f2_always: false, f1_critical: false },
    ];

    let mean_len = test.iter().map(|t| t.len()).sum::<usize>() as f64 / test.len() as f64;
    let events = test.iter().filter(|t| t.terminal_step.is_some()).count() as f64
        / test.len() as f64;
    println!("== p_h2c={p_h2c} p_c2h={p_c2h} missing={missing} len={mean_len:.1} events={events:.2}");
    for p in &policies {
        let e = evaluate_policy(p, &test, &oracle, &env_cfg).unwrap();
        println!(
            "  {:<16} {:>8.2} +-{:>5.2} | f3 {:.2} f2 {:.2} f1 {:.2} | f2 crit-heal {:+.2}",
            e.policy,
            e.mean_reward,
            2.0 * e.stderr,
            e.channel_freq[2],
            e.channel_freq[1],
            e.channel_freq[0],
            e.channel_freq_critical[1] - e.channel_freq_healthy[1],
        );
    }
}
