//! Scratch probe: sweep simulator parameters and check the acceptance-
//! relevant behavior (baseline ordering, learned policy pattern, gamma=0
//! ablation flatness).

use schedrl_core::baselines::{HeuristicKind, HeuristicPolicy};
use schedrl_core::dqn::{train, DqnConfig};
use schedrl_core::env::EnvConfig;
use schedrl_core::eval::evaluate_policy;
use schedrl_core::oracle::{Oracle, OracleConfig};
use schedrl_core::sim::{generate_dataset, SimConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let p_h2c: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let p_c2h: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.3);
    let train_steps: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(100_000);
    let n_train: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(2_000);
    let skip_gamma0: bool = args.get(5).map(|s| s == "nog0").unwrap_or(false);
    let missing: f64 = std::env::var("MISSING").map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let seed_var: u64 = std::env::var("SEED").map(|s| s.parse().unwrap()).unwrap_or(42);

    let sim = SimConfig {
        p_h2c,
        p_c2h,
        missing_rate: missing,
        ..SimConfig::default()
    };
    let train_set = generate_dataset(&sim, n_train, 42);
    let test_set = generate_dataset(&sim, 500, 43);
    let oracle = Oracle::new(OracleConfig::default(), 6).unwrap();
    let env_cfg = EnvConfig::default();

    let mean_len =
        test_set.iter().map(|t| t.len()).sum::<usize>() as f64 / test_set.len() as f64;
    let event_rate = test_set.iter().filter(|t| t.terminal_step.is_some()).count() as f64 / 500.0;
    let steps: usize = test_set.iter().map(|t| t.len()).sum();
    let labeled: usize = test_set
        .iter()
        .map(|t| t.labels.iter().filter(|&&l| l == 1).count())
        .sum();
    let critical: usize = test_set
        .iter()
        .map(|t| t.states.iter().filter(|&&s| s == 1).count())
        .sum();
    println!(
        "== p_h2c={p_h2c} p_c2h={p_c2h}: len {mean_len:.1} events {event_rate:.2} labeled {:.2} critical {:.2}",
        labeled as f64 / steps as f64,
        critical as f64 / steps as f64
    );

    let mut means = Vec::new();
    for kind in HeuristicKind::standard_set() {
        let p = HeuristicPolicy::new(kind, 6, 42).unwrap();
        let e = evaluate_policy(&p, &test_set, &oracle, &env_cfg).unwrap();
        println!(
            "  {:<14} {:>8.2} +-{:.2}",
            e.policy,
            e.mean_reward,
            2.0 * e.stderr
        );
        if kind != HeuristicKind::NeverMeasure {
            means.push((e.policy.clone(), e.mean_reward, e.stderr));
        }
    }
    means.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let worst_ok = means[0].0 == "f1-3_all"
        && means[0].1 + 2.0 * means[0].2 < means[1].1 - 2.0 * means[1].2;
    println!(
        "  worst={} second={} separated={}",
        means[0].0, means[1].0, worst_ok
    );

    let lr: f64 = std::env::var("LR").map(|s| s.parse().unwrap()).unwrap_or(1e-3);
    let replay: usize = std::env::var("REPLAY")
        .map(|s| s.parse().unwrap())
        .unwrap_or(100_000);
    let eps_end: f64 = std::env::var("EPS_END")
        .map(|s| s.parse().unwrap())
        .unwrap_or(0.05);
    let decay: usize = std::env::var("DECAY")
        .map(|s| s.parse().unwrap())
        .unwrap_or(train_steps / 2);
    let dqn_cfg = DqnConfig {
        train_steps,
        epsilon_decay_steps: decay,
        learning_rate: lr,
        replay_capacity: replay,
        epsilon_end: eps_end,
        seed: seed_var,
        optimism: std::env::var("OPTIMISM")
            .map(|s| s.parse().unwrap())
            .unwrap_or(2.0),
        ..DqnConfig::default()
    };
    println!(
        "  [lr={lr} replay={replay} eps_end={eps_end} decay={decay} optimism={} seed={seed_var} missing={missing}]",
        dqn_cfg.optimism
    );
    let t0 = std::time::Instant::now();
    let (agent, _) = train(&train_set, &oracle, &env_cfg, &dqn_cfg).unwrap();
    let e = evaluate_policy(&agent.greedy_policy("dqn"), &test_set, &oracle, &env_cfg).unwrap();
    let best = means.last().unwrap();
    println!(
        "  dqn {:.2} +-{:.2} ({:.0}s) | beats_best={} sep={}",
        e.mean_reward,
        2.0 * e.stderr,
        t0.elapsed().as_secs_f64(),
        e.mean_reward > best.1,
        e.mean_reward - 2.0 * e.stderr > best.1 + 2.0 * best.2,
    );
    println!(
        "  freq {:?} | f3>=0.9: {} | f2 crit-heal {:+.2} (>=0.20: {}) | noise<0.05: {}",
        e.channel_freq
            .iter()
            .map(|f| (f * 100.0).round() / 100.0)
            .collect::<Vec<_>>(),
        e.channel_freq[2] >= 0.9,
        e.channel_freq_critical[1] - e.channel_freq_healthy[1],
        e.channel_freq_critical[1] - e.channel_freq_healthy[1] >= 0.2,
        e.channel_freq[3..].iter().all(|&f| f < 0.05),
    );

    let empty = vec![0.0; 30];
    let mut healthy = vec![0.0; 30];
    let mut critical = vec![0.0; 30];
    for t in 0..5 {
        healthy[t * 6 + 2] = -1.0;
        critical[t * 6 + 2] = 1.0;
    }
    for (name, s) in [("empty", &empty), ("healthy", &healthy), ("critical", &critical)] {
        let q = agent.q_values(s).unwrap();
        println!(
            "  {name:>8}: F3 adv {:+.3} | F2 adv {:+.3} | F1 adv {:+.3} | N4 adv {:+.3}",
            q.q1[2] - q.q0[2],
            q.q1[1] - q.q0[1],
            q.q1[0] - q.q0[0],
            q.q1[3] - q.q0[3],
        );
    }

    if !skip_gamma0 {
        let g0_cfg = DqnConfig {
            gamma: 0.0,
            ..dqn_cfg
        };
        let (agent0, _) = train(&train_set, &oracle, &env_cfg, &g0_cfg).unwrap();
        let e0 =
            evaluate_policy(&agent0.greedy_policy("dqn_g0"), &test_set, &oracle, &env_cfg).unwrap();
        let max_gap = (0..6)
            .map(|k| (e0.channel_freq_critical[k] - e0.channel_freq_healthy[k]).abs())
            .fold(0.0f64, f64::max);
        println!(
            "  g0 mean {:.2} freq {:?} | max crit-heal gap {:.3} (<0.05: {})",
            e0.mean_reward,
            e0.channel_freq
                .iter()
                .map(|f| (f * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
            max_gap,
            max_gap < 0.05
        );
    }
}
