use semcom_core::engine::{self, derive_seed};
use semcom_core::oracle;
use semcom_core::{PolicyKind, SimConfig};

const SOURCES: [(f64, f64); 2] = [(0.95, 0.9), (0.8, 0.3)];
const CHANNELS: [f64; 2] = [0.4, 0.9];
const POLICIES: [PolicyKind; 4] = [
    PolicyKind::Uniform { period: 3 },
    PolicyKind::AgeAware { threshold: 3 },
    PolicyKind::ChangeAware,
    PolicyKind::EndToEnd,
];

/// Exact E2E reconstruction error for p = 0.95, q = 0.9, ps = 0.4.
/// Cross-checked against an independent 4×10⁷-slot brute-force simulation
/// (0.081607).
const E2E_SLOW_POOR_RECON: f64 = 4.0 / 49.0;

#[test]
fn e2e_regression_constant() {
    let c = SimConfig::two_state(0.95, 0.9, 0.4, PolicyKind::EndToEnd).unwrap();
    let exact = oracle::analyze(&c).unwrap();
    assert!((exact.recon_error - E2E_SLOW_POOR_RECON).abs() < 1e-12);
    assert_eq!(exact.uninformative_frac, 0.0);
}

#[test]
fn simulation_converges_to_exact_metrics() {
    for (p, q) in SOURCES {
        for ps in CHANNELS {
            for policy in POLICIES {
                let c = SimConfig::two_state(p, q, ps, policy).unwrap();
                let sim = engine::run(&c).unwrap().summary.metrics;
                let exact = oracle::analyze(&c).unwrap();
                let tag = format!("{policy} p={p} q={q} ps={ps}");
                assert!((sim.recon_error - exact.recon_error).abs() <= 0.005, "{tag}: recon");
                assert!(
                    (sim.uninformative_frac - exact.uninformative_frac).abs() <= 0.005,
                    "{tag}: uninformative"
                );
                assert!(
                    (sim.actuation_cost - exact.actuation_cost).abs() <= 0.01 * exact.actuation_cost,
                    "{tag}: cost"
                );
                assert!(
                    (sim.tx_rate - exact.tx_rate).abs() <= 0.01 * exact.tx_rate,
                    "{tag}: tx rate"
                );
            }
        }
    }
}

#[test]
fn replication_mean_within_three_stderr() {
    let c = SimConfig::two_state(0.95, 0.9, 0.4, PolicyKind::EndToEnd)
        .unwrap()
        .with_slots(100_000);
    let agg = engine::replicate(&c, 20).unwrap();
    let exact = oracle::analyze(&c).unwrap();
    assert!((agg.mean.recon_error - exact.recon_error).abs() <= 3.0 * agg.stderr.recon_error);
    for (i, run) in agg.runs.iter().enumerate() {
        assert_eq!(run.seed, derive_seed(c.seed, i as u64));
        assert_eq!(run.metrics.uninformative_frac, 0.0);
    }
}

#[test]
fn e2e_never_wastes_a_transmission() {
    for (p, q) in [(0.95, 0.9), (0.8, 0.3), (0.5, 0.5), (0.1, 0.2)] {
        for ps in [0.0, 0.1, 0.4, 0.9, 1.0] {
            let c = SimConfig::two_state(p, q, ps, PolicyKind::EndToEnd)
                .unwrap()
                .with_slots(50_000);
            assert_eq!(engine::run(&c).unwrap().summary.metrics.uninformative_frac, 0.0);
            assert_eq!(oracle::analyze(&c).unwrap().uninformative_frac, 0.0);
        }
    }
}

#[test]
fn erased_channel_matches_no_communication_oracle() {
    for (p, q) in SOURCES {
        for policy in POLICIES {
            let c = SimConfig::two_state(p, q, 0.0, policy).unwrap();
            let sim = engine::run(&c).unwrap().summary.metrics;
            let silent = oracle::no_communication(&c).unwrap();
            assert!((sim.recon_error - silent.recon_error).abs() <= 0.005, "{policy} p={p}");
        }
    }
}
