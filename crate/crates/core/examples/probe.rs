//! Scratch probe: baseline returns under default parameters.

use schedrl_core::baselines::{HeuristicKind, HeuristicPolicy};
use schedrl_core::env::EnvConfig;
use schedrl_core::eval::evaluate_policy;
use schedrl_core::oracle::{Oracle, OracleConfig};
use schedrl_core::sim::{generate_dataset, SimConfig};

fn main() {
    let sim = SimConfig::default();
    let test = generate_dataset(&sim, 500, 43);
    let oracle = Oracle::new(OracleConfig::default(), 6).unwrap();
    let env_cfg = EnvConfig::default();

    let mean_len = test.iter().map(|t| t.len()).sum::<usize>() as f64 / test.len() as f64;
    let event_rate = test.iter().filter(|t| t.terminal_step.is_some()).count() as f64
        / test.len() as f64;
    let labeled: usize = test
        .iter()
        .map(|t| t.labels.iter().filter(|&&l| l == 1).count())
        .sum();
    let steps: usize = test.iter().map(|t| t.len()).sum();
    let critical: usize = test
        .iter()
        .map(|t| t.states.iter().filter(|&&s| s == 1).count())
        .sum();
    println!(
        "mean_len {mean_len:.2}  event_rate {event_rate:.3}  labeled_frac {:.3}  critical_frac {:.3}",
        labeled as f64 / steps as f64,
        critical as f64 / steps as f64
    );

    for kind in HeuristicKind::standard_set() {
        let p = HeuristicPolicy::new(kind, 6, 42).unwrap();
        let e = evaluate_policy(&p, &test, &oracle, &env_cfg).unwrap();
        println!(
            "{:<16} mean {:>9.3}  stderr {:>7.3}",
            e.policy, e.mean_reward, e.stderr
        );
    }
}
