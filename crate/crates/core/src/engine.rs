//! Slotted-time simulation loop and seeded replication.
//!
//! Slot 0 starts synchronized: `X̂₀ = X₀ = initial_state`, age 0, nothing
//! recorded. Every slot `t ≥ 1` then runs, in order:
//!
//! 1. the source steps (one uniform draw);
//! 2. the receiver's age grows by one;
//! 3. the transmitter observes `X_t` and decides;
//! 4. on `Transmit`, one channel draw. Success delivers the sample and acks
//!    it; failure nacks it, and under the age-aware policy the receiver falls
//!    back to its one-step prediction;
//! 5. metrics are recorded on the updated pair `(X_t, X̂_t)`.
//!
//! A transmission is uninformative when its value equals the estimate the
//! receiver held just before the attempt.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CostMatrix, ErasureChannel, MarkovSource};
use crate::protocol::{self, Decision, PolicyKind, ReceiverState, TransmitterState};
pub use crate::rng::derive_seed;
use crate::rng::{RandomStream, SplitMix64};

pub const DEFAULT_SLOTS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub source: MarkovSource,
    pub channel: ErasureChannel,
    pub policy: PolicyKind,
    pub cost: CostMatrix,
    pub slots: u64,
    pub seed: u64,
    pub trace: bool,
}

impl SimConfig {
    /// Two-state scenario with the default cost matrix, horizon and seed.
    pub fn two_state(p: f64, q: f64, ps: f64, policy: PolicyKind) -> Result<Self> {
        let config = Self {
            source: MarkovSource::two_state(p, q)?,
            channel: ErasureChannel::new(ps)?,
            policy,
            cost: CostMatrix::default_two_state(),
            slots: DEFAULT_SLOTS,
            seed: DEFAULT_SEED,
            trace: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_slots(mut self, slots: u64) -> Self {
        self.slots = slots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_cost(mut self, cost: CostMatrix) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots == 0 {
            return Err(Error::ZeroParameter { name: "slots" });
        }
        self.policy.validate()?;
        let n = self.source.n_states();
        if self.cost.n_states() != n {
            return Err(Error::LengthMismatch {
                left: self.cost.n_states(),
                right: n,
            });
        }
        Ok(())
    }
}

/// Long-run performance figures shared by simulation and exact analysis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    /// Fraction of slots with `X_t ≠ X̂_t`.
    pub recon_error: f64,
    /// Average `cost[X_t][X̂_t]` per slot.
    pub actuation_cost: f64,
    /// Transmission attempts per slot.
    pub tx_rate: f64,
    /// Uninformative attempts over all attempts; 0 when nothing was sent.
    pub uninformative_frac: f64,
}

impl Metrics {
    fn map2(self, other: Metrics, f: impl Fn(f64, f64) -> f64) -> Metrics {
        Metrics {
            recon_error: f(self.recon_error, other.recon_error),
            actuation_cost: f(self.actuation_cost, other.actuation_cost),
            tx_rate: f(self.tx_rate, other.tx_rate),
            uninformative_frac: f(self.uninformative_frac, other.uninformative_frac),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.recon_error,
            self.actuation_cost,
            self.tx_rate,
            self.uninformative_frac,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub metrics: Metrics,
    pub slots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotTrace {
    pub slot: u64,
    pub source_state: usize,
    pub estimate: usize,
    pub aoi: u64,
    pub decision: Decision,
    pub delivered: bool,
    pub uninformative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    /// Present when the configuration asked for a trace.
    pub trace: Option<Vec<SlotTrace>>,
}

/// Runs one simulation with a SplitMix64 stream seeded from `config.seed`.
pub fn run(config: &SimConfig) -> Result<RunOutput> {
    run_with_stream(config, &mut SplitMix64::new(config.seed))
}

/// Runs one simulation drawing from `rng`.
pub fn run_with_stream<R: RandomStream + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<RunOutput> {
    config.validate()?;
    let n = config.source.n_states();
    let x0 = config.source.initial_state();

    let mut x = x0;
    let mut rx = ReceiverState::synchronized(x0);
    let mut tx = TransmitterState::new(config.policy, x0);
    let predicts = matches!(config.policy, PolicyKind::AgeAware { .. });

    // Occupancy of (true, estimated) pairs; costs are applied at the end.
    let mut pair_counts = vec![0u64; n * n];
    let mut transmissions = 0u64;
    let mut uninformative = 0u64;
    let mut trace = config
        .trace
        .then(|| Vec::with_capacity(config.slots.min(1 << 24) as usize));

    for slot in 1..=config.slots {
        x = config.source.sample_transition(x, rng);
        rx = rx.advance_slot();
        let (decision, next_tx) = protocol::decide(&tx, x, slot, &rx);
        tx = next_tx;

        let mut delivered = false;
        let mut wasted = false;
        if let Decision::Transmit(sample) = decision {
            transmissions += 1;
            wasted = sample.value == rx.estimate;
            uninformative += u64::from(wasted);
            delivered = config.channel.attempt_transmission(rng);
            if delivered {
                rx = rx.apply_delivery(sample.value, sample.gen_slot, slot)?;
            } else if predicts {
                rx = rx.apply_prediction_on_failure(&config.source);
            }
            tx = protocol::apply_ack(&tx, delivered);
        }

        pair_counts[x * n + rx.estimate] += 1;
        if let Some(trace) = trace.as_mut() {
            trace.push(SlotTrace {
                slot,
                source_state: x,
                estimate: rx.estimate,
                aoi: rx.aoi,
                decision,
                delivered,
                uninformative: wasted,
            });
        }
    }

    let slots = config.slots as f64;
    let mut mismatches = 0u64;
    let mut cost = 0.0;
    for truth in 0..n {
        for est in 0..n {
            let count = pair_counts[truth * n + est];
            if truth != est {
                mismatches += count;
            }
            cost += count as f64 * config.cost.cost(truth, est);
        }
    }
    let metrics = Metrics {
        recon_error: mismatches as f64 / slots,
        actuation_cost: cost / slots,
        tx_rate: transmissions as f64 / slots,
        uninformative_frac: if transmissions == 0 {
            0.0
        } else {
            uninformative as f64 / transmissions as f64
        },
    };
    Ok(RunOutput {
        summary: RunSummary {
            metrics,
            slots: config.slots,
            seed: config.seed,
        },
        trace,
    })
}

/// Mean and standard error over independent replications.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub runs: Vec<RunSummary>,
    pub mean: Metrics,
    pub stderr: Metrics,
}

/// Runs `n_runs` replications with seeds `derive_seed(config.seed, i)`.
///
/// Replications run in parallel; sums are taken in index order so the result
/// does not depend on scheduling.
pub fn replicate(config: &SimConfig, n_runs: usize) -> Result<Aggregate> {
    if n_runs == 0 {
        return Err(Error::ZeroParameter { name: "runs" });
    }
    config.validate()?;
    let runs = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut cfg = config.clone();
            cfg.seed = derive_seed(config.seed, i as u64);
            cfg.trace = false;
            run(&cfg).map(|out| out.summary)
        })
        .collect::<Result<Vec<_>>>()?;

    let k = n_runs as f64;
    let sum = runs
        .iter()
        .fold(Metrics::default(), |acc, r| acc.map2(r.metrics, |a, b| a + b));
    let mean = sum.map2(Metrics::default(), |s, _| s / k);
    let stderr = if n_runs == 1 {
        Metrics::default()
    } else {
        let ss = runs.iter().fold(Metrics::default(), |acc, r| {
            acc.map2(r.metrics.map2(mean, |x, m| (x - m) * (x - m)), |a, b| a + b)
        });
        ss.map2(Metrics::default(), |s, _| (s / (k - 1.0)).sqrt() / k.sqrt())
    };
    Ok(Aggregate { runs, mean, stderr })
}
