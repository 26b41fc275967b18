//! Oracle tests for the simulation harness: frozen layout values, the
//! distributional null check, naive counting oracles, and the determinism
//! contract.

use straw_cli::harness::{mean_and_se, run_scenario, RunConfig};
use straw_cli::replicate::{compute_fdp, compute_tp, simulate_replication, METHODS};
use straw_cli::scenario::{ScenarioKind, SweepAxis};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn layout_block_values_1d() {
    let cfg = ScenarioKind::S1.config(2.0, 0.6);
    assert_eq!(cfg.lattice.num_sites(), 5000);
    // sites are 1-based; linear index = coordinate - 1
    assert_eq!(cfg.signal_prob[1100 - 1], 0.6);
    assert_eq!(cfg.signal_prob[500 - 1], 0.01);
    assert_eq!(cfg.signal_prob[1001 - 1], 0.6);
    assert_eq!(cfg.signal_prob[1200 - 1], 0.6);
    assert_eq!(cfg.signal_prob[1201 - 1], 0.01);
    assert_eq!(cfg.signal_prob[4001 - 1], 0.6);
    let total: f64 = cfg.signal_prob.iter().sum();
    // 800 block sites at 0.6 plus 4200 background at 0.01
    assert!((total - (800.0 * 0.6 + 4200.0 * 0.01)).abs() < 1e-9);
}

#[test]
fn layout_square_and_disk_2d() {
    let cfg = ScenarioKind::S3.config(2.0, 0.55);
    assert_eq!(cfg.lattice.num_sites(), 6400);
    assert_eq!(cfg.lattice.extents(), &[80, 80]);
    let at = |x: i64, y: i64| -> f64 {
        let site = cfg.lattice.site(&[x, y]).unwrap();
        cfg.signal_prob[cfg.lattice.linear_index(&site).unwrap()]
    };
    assert_eq!(at(20, 20), 0.55); // disk center
    assert_eq!(at(1, 1), 0.01);
    assert_eq!(at(51, 51), 0.55); // square corner
    assert_eq!(at(65, 65), 0.55);
    assert_eq!(at(66, 65), 0.01);
    assert_eq!(at(30, 20), 0.55); // distance exactly 10: disk is closed
    assert_eq!(at(31, 20), 0.01); // distance 11
}

#[test]
fn layout_block_3d() {
    let cfg = ScenarioKind::S5.config(2.0, 0.6);
    assert_eq!(cfg.lattice.num_sites(), 10000);
    assert_eq!(cfg.lattice.extents(), &[20, 20, 25]);
    let at = |x: i64, y: i64, z: i64| -> f64 {
        let site = cfg.lattice.site(&[x, y, z]).unwrap();
        cfg.signal_prob[cfg.lattice.linear_index(&site).unwrap()]
    };
    assert_eq!(at(10, 15, 15), 0.6);
    assert_eq!(at(1, 1, 1), 0.01);
    assert_eq!(at(6, 11, 11), 0.6);
    assert_eq!(at(15, 20, 20), 0.6);
    assert_eq!(at(16, 20, 20), 0.01);
    assert_eq!(at(5, 11, 11), 0.01);
    let signal_count = cfg.signal_prob.iter().filter(|&&v| v > 0.01).count();
    assert_eq!(signal_count, 1000); // 10 x 10 x 10 block
}

#[test]
fn null_layout_has_no_signals() {
    let cfg = ScenarioKind::Null.config(0.0, 0.6);
    assert_eq!(cfg.lattice.num_sites(), 5000);
    assert!(cfg.signal_prob.iter().all(|&v| v == 0.0));
    let data = simulate_replication(&cfg, 99);
    assert!(data.theta.iter().all(|&t| !t));
}

#[test]
fn sweep_axes_and_defaults() {
    assert_eq!(ScenarioKind::S1.sweep_axis(), SweepAxis::Mu);
    assert_eq!(ScenarioKind::S2.sweep_axis(), SweepAxis::Pi);
    assert_eq!(ScenarioKind::S5.sweep_axis(), SweepAxis::Mu);
    assert_eq!(ScenarioKind::S6.sweep_axis(), SweepAxis::Pi);
    assert_eq!(ScenarioKind::Null.sweep_axis(), SweepAxis::Fixed);

    let mus = ScenarioKind::S1.default_sweep();
    assert_eq!(mus.len(), 6);
    assert!((mus[0] - 1.5).abs() < 1e-12 && (mus[5] - 2.0).abs() < 1e-12);
    let pis = ScenarioKind::S2.default_sweep();
    assert_eq!(pis.len(), 5);
    assert!((pis[0] - 0.4).abs() < 1e-12 && (pis[4] - 0.6).abs() < 1e-12);

    assert_eq!(ScenarioKind::parse("S3"), Some(ScenarioKind::S3));
    assert_eq!(ScenarioKind::parse("null"), Some(ScenarioKind::Null));
    assert_eq!(ScenarioKind::parse("s9"), None);
}

#[test]
fn null_pvalues_look_uniform_ks() {
    // Kolmogorov-Smirnov statistic below the 1% critical value 1.628/sqrt(m)
    let cfg = ScenarioKind::Null.config(0.0, 0.6);
    let data = simulate_replication(&cfg, 4);
    let mut p = data.pvalues.values().to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = p.len() as f64;
    let mut d = 0.0f64;
    for (i, &v) in p.iter().enumerate() {
        let hi = (i + 1) as f64 / m - v;
        let lo = v - i as f64 / m;
        d = d.max(hi).max(lo);
    }
    let critical = 1.628 / m.sqrt();
    assert!(d < critical, "KS statistic {d} exceeds {critical}");
}

#[test]
fn signal_draws_shift_the_statistic() {
    // with mu large, block sites should carry overwhelmingly small p-values
    let cfg = ScenarioKind::S1.config(6.0, 1.0); // every block site is a signal
    let data = simulate_replication(&cfg, 11);
    let block_small = (1000..1200)
        .filter(|&i| data.pvalues.values()[i] < 0.01)
        .count();
    assert!(block_small > 190, "only {block_small} of 200 block sites small");
    assert!(data.theta[1000..1200].iter().all(|&t| t));
}

#[test]
fn fdp_and_tp_frozen_examples() {
    let theta = [true, false, true];
    let delta = [true, true, false];
    assert_eq!(compute_fdp(&theta, &delta), 0.5);
    assert_eq!(compute_tp(&theta, &delta), 1);

    // no rejections -> FDP 0 via the denominator guard
    assert_eq!(compute_fdp(&theta, &[false; 3]), 0.0);
    // perfect recovery
    assert_eq!(compute_fdp(&theta, &theta), 0.0);
    assert_eq!(compute_tp(&theta, &theta), 2);
}

#[test]
fn fdp_matches_naive_counting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let m = 1 + rng.random_range(0..30);
        let theta: Vec<bool> = (0..m).map(|_| rng.random::<bool>()).collect();
        let delta: Vec<bool> = (0..m).map(|_| rng.random::<bool>()).collect();
        let mut fp = 0usize;
        let mut tp = 0usize;
        let mut r = 0usize;
        for i in 0..m {
            if delta[i] {
                r += 1;
                if theta[i] {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let expect = fp as f64 / r.max(1) as f64;
        assert_eq!(compute_fdp(&theta, &delta), expect);
        assert_eq!(compute_tp(&theta, &delta), tp);
    }
}

#[test]
fn nested_coupling_across_signal_levels() {
    // same seed, higher signal frequency -> superset of signal sites
    let lo = simulate_replication(&ScenarioKind::S2.config(2.0, 0.4), 123);
    let hi = simulate_replication(&ScenarioKind::S2.config(2.0, 0.6), 123);
    for (a, b) in lo.theta.iter().zip(&hi.theta) {
        assert!(!a || *b, "signal at low level missing at high level");
    }
}

#[test]
fn mean_and_se_basics() {
    let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
    assert!((m - 2.5).abs() < 1e-15);
    // sample sd = sqrt(5/3), se = sd/2
    assert!((se - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
    let (m1, se1) = mean_and_se(&[7.0]);
    assert_eq!((m1, se1), (7.0, 0.0));
}

#[test]
fn run_scenario_is_deterministic_and_thread_invariant() {
    let cfg = ScenarioKind::S1.config(2.0, 0.6);
    let rc = RunConfig {
        reps: 4,
        threads: 1,
        ..RunConfig::default()
    };
    let a = run_scenario(&cfg, &rc).unwrap();
    let b = run_scenario(&cfg, &rc).unwrap();
    let rc_par = RunConfig {
        reps: 4,
        threads: 3,
        ..RunConfig::default()
    };
    let c = run_scenario(&cfg, &rc_par).unwrap();

    assert_eq!(a.summaries.len(), METHODS.len());
    for ((sa, sb), sc) in a.summaries.iter().zip(&b.summaries).zip(&c.summaries) {
        assert_eq!(sa.method, sb.method);
        assert_eq!(sa.fdr.to_bits(), sb.fdr.to_bits());
        assert_eq!(sa.atp.to_bits(), sb.atp.to_bits());
        assert_eq!(sa.fdr.to_bits(), sc.fdr.to_bits());
        assert_eq!(sa.atp.to_bits(), sc.atp.to_bits());
        assert_eq!(sa.fdr_se.to_bits(), sc.fdr_se.to_bits());
        assert_eq!(sa.atp_se.to_bits(), sc.atp_se.to_bits());
    }
    // every method consumed the same draw: per-rep seeds line up
    for (ra, rc2) in a.replications.iter().zip(&c.replications) {
        assert_eq!(ra.seed, rc2.seed);
        assert_eq!(ra.methods.len(), METHODS.len());
        for (ma, mc) in ra.methods.iter().zip(&rc2.methods) {
            assert_eq!(ma.method, mc.method);
            assert_eq!(ma.rejections, mc.rejections);
            assert_eq!(ma.fdp.to_bits(), mc.fdp.to_bits());
        }
    }
}

#[test]
fn replication_metrics_are_coherent() {
    let cfg = ScenarioKind::S1.config(2.0, 0.6);
    let rc = RunConfig {
        reps: 2,
        ..RunConfig::default()
    };
    let run = run_scenario(&cfg, &rc).unwrap();
    for rep in &run.replications {
        for m in &rep.methods {
            assert!((0.0..=1.0).contains(&m.fdp), "{} fdp {}", m.method, m.fdp);
            assert!(m.tp <= rep.signals);
            assert!(m.tp + m.false_positives == m.rejections);
            if m.method == "BH" {
                assert_eq!(m.k_selected, None);
            } else {
                assert!(m.k_selected.is_some());
            }
        }
    }
}
