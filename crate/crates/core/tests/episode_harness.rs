use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use searchtrack_core::harness::{run_episode, run_monte_carlo, write_csv};
use searchtrack_core::prior::{Cluster, SpatialDensity};
use searchtrack_core::sim::{desk_scenario, generate_scenario, spawn_truth, Scenario, ScenarioKind};

fn quick_desk() -> Scenario {
    let mut s = desk_scenario(0);
    s.duration = 30;
    s.filter_caps.particles = 200;
    s
}

#[test]
fn degenerate_episode_has_one_quiet_record() {
    let mut s = quick_desk();
    s.duration = 1;
    s.sensor.clutter_rate = 0.0;
    s.clusters = vec![Cluster {
        spatial: SpatialDensity::Gaussian {
            mean: [150.0, 150.0],
            cov: [[25.0, 0.0], [0.0, 25.0]],
        },
        cardinality: vec![1.0],
    }];
    let log = run_episode(&s, 4).unwrap();
    assert_eq!(log.records.len(), 1);
    assert_eq!(log.records[0].measurements, 0);
    assert!(log.records[0].truth.is_empty());
}

#[test]
fn same_seed_gives_identical_logs_and_files() {
    let s = quick_desk();
    let a = run_episode(&s, 21).unwrap();
    let b = run_episode(&s, 21).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.records.len(), s.duration);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    write_csv(&a, &mut x).unwrap();
    write_csv(&b, &mut y).unwrap();
    assert_eq!(x, y);
    assert_eq!(
        serde_json::to_vec(&a).unwrap(),
        serde_json::to_vec(&b).unwrap()
    );
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), s.duration + 1);
    assert_ne!(a, run_episode(&s, 22).unwrap());
}

#[test]
fn monte_carlo_ignores_worker_count() {
    let s = quick_desk();
    let (one, _) = run_monte_carlo(&s, 4, 7, 1).unwrap();
    let (three, _) = run_monte_carlo(&s, 4, 7, 3).unwrap();
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&three).unwrap()
    );
    assert_eq!(one.runs, 4);
    assert_eq!(one.per_step_mean.len(), s.duration);
}

#[test]
fn single_run_summary_has_zero_margin() {
    let s = quick_desk();
    let (sum, logs) = run_monte_carlo(&s, 1, 3, 1).unwrap();
    assert_eq!(sum.margin_final_ospa2, 0.0);
    assert_eq!(sum.mean_final_ospa2, logs[0].final_ospa2());
}

#[test]
fn desk_belief_cardinality_tracks_truth() {
    let s = desk_scenario(0);
    let mut close = 0;
    for seed in 0..20 {
        let log = run_episode(&s, 500 + seed).unwrap();
        let last = log.records.last().unwrap();
        if (last.cardinality - last.truth.len() as f64).abs() <= 2.0 {
            close += 1;
        }
    }
    assert!(close >= 16, "{close}/20");
}

#[test]
fn spawned_counts_follow_the_prior() {
    let s = generate_scenario(ScenarioKind::BaseConfig, 0);
    let n = 10_000usize;
    let mut counts = vec![vec![0usize; 4]; 5];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..n {
        let w = spawn_truth(&s, &mut rng);
        // targets are spawned cluster by cluster; recover the cluster from
        // the nearest center
        let mut per = [0usize; 5];
        for t in &w.targets {
            let p = t.position();
            let c = s
                .clusters
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1.spatial.mean() - p)
                        .norm()
                        .total_cmp(&(b.1.spatial.mean() - p).norm())
                })
                .unwrap()
                .0;
            per[c] += 1;
        }
        for (c, k) in per.iter().enumerate() {
            counts[c][*k] += 1;
        }
    }
    for (c, cluster) in s.clusters.iter().enumerate() {
        for (k, p) in cluster.cardinality.iter().enumerate() {
            let f = counts[c][k] as f64 / n as f64;
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() <= 3.0 * sd + 1e-12, "cluster {c} count {k}: {f} vs {p}");
        }
    }
}
