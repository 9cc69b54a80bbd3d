//! Exact long-run metrics from the stationary distribution of the joint
//! (source, estimate, policy memory) Markov chain.
//!
//! The per-slot dynamics are re-derived here from the policy definitions
//! rather than by calling into [`crate::protocol`], so that agreement with
//! the simulator is an independent check of both.
//!
//! Each joint state is a post-update snapshot at the end of a slot. Mismatch
//! is a property of the state itself; the transmit and uninformative labels
//! are the probabilities that the *next* slot attempts a transmission (and
//! that the attempt is uninformative), so that `Σ π(s)·label(s)` gives the
//! per-slot rates directly.

use std::collections::{HashMap, VecDeque};

use crate::engine::{Metrics, SimConfig};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{CostMatrix, MarkovSource};
use crate::protocol::PolicyKind;

pub const DEFAULT_TOL: f64 = 1e-12;

/// Policy memory carried between slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Memory {
    Stateless,
    Pending(bool),
    /// Age of information, capped.
    Age(u32),
    Uniform {
        counter: u32,
        stored: usize,
        acked: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointState {
    pub source: usize,
    pub estimate: usize,
    pub memory: Memory,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateLabels {
    pub mismatch: f64,
    pub cost: f64,
    pub transmit: f64,
    pub uninformative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointChain {
    pub states: Vec<JointState>,
    pub matrix: Vec<Vec<f64>>,
    pub labels: Vec<StateLabels>,
    source: MarkovSource,
}

impl JointChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn source(&self) -> &MarkovSource {
        &self.source
    }
}

/// One probabilistic outcome of a slot.
struct Branch {
    prob: f64,
    next: JointState,
    transmit: bool,
    uninformative: bool,
}

fn most_likely_next(source: &MarkovSource, from: usize) -> usize {
    let row = source.row(from);
    (0..row.len()).fold(from, |best, j| if row[j] > row[best] { j } else { best })
}

struct Stepper<'a> {
    source: &'a MarkovSource,
    policy: PolicyKind,
    ps: f64,
    age_cap: u32,
}

impl Stepper<'_> {
    fn initial(&self) -> JointState {
        let x0 = self.source.initial_state();
        let memory = match self.policy {
            PolicyKind::EndToEnd => Memory::Stateless,
            PolicyKind::ChangeAware => Memory::Pending(false),
            PolicyKind::AgeAware { .. } => Memory::Age(0),
            // No sample yet behaves like an acknowledged one: nothing to send
            // until the first sampling instant overwrites it.
            PolicyKind::Uniform { .. } => Memory::Uniform {
                counter: 0,
                stored: x0,
                acked: true,
            },
        };
        JointState {
            source: x0,
            estimate: x0,
            memory,
        }
    }

    /// Outcomes of a transmission attempt of `value`, given the next source
    /// state and the memory to keep on success and failure.
    #[allow(clippy::too_many_arguments)]
    fn attempt(
        &self,
        out: &mut Vec<Branch>,
        weight: f64,
        y: usize,
        estimate: usize,
        value: usize,
        on_success: Memory,
        on_failure: (usize, Memory),
    ) {
        let uninformative = value == estimate;
        let success = JointState {
            source: y,
            estimate: value,
            memory: on_success,
        };
        let failure = JointState {
            source: y,
            estimate: on_failure.0,
            memory: on_failure.1,
        };
        out.push(Branch {
            prob: weight * self.ps,
            next: success,
            transmit: true,
            uninformative,
        });
        out.push(Branch {
            prob: weight * (1.0 - self.ps),
            next: failure,
            transmit: true,
            uninformative,
        });
    }

    fn branches(&self, s: JointState) -> Vec<Branch> {
        let mut out = Vec::new();
        let xh = s.estimate;
        for (y, &py) in self.source.row(s.source).iter().enumerate() {
            if py == 0.0 {
                continue;
            }
            let idle = |memory| Branch {
                prob: py,
                next: JointState {
                    source: y,
                    estimate: xh,
                    memory,
                },
                transmit: false,
                uninformative: false,
            };
            match (self.policy, s.memory) {
                (PolicyKind::EndToEnd, Memory::Stateless) => {
                    if y != xh {
                        self.attempt(&mut out, py, y, xh, y, Memory::Stateless, (xh, Memory::Stateless));
                    } else {
                        out.push(idle(Memory::Stateless));
                    }
                }
                (PolicyKind::ChangeAware, Memory::Pending(pending)) => {
                    if pending || y != s.source {
                        self.attempt(
                            &mut out,
                            py,
                            y,
                            xh,
                            y,
                            Memory::Pending(false),
                            (xh, Memory::Pending(true)),
                        );
                    } else {
                        out.push(idle(Memory::Pending(false)));
                    }
                }
                (PolicyKind::AgeAware { threshold }, Memory::Age(age)) => {
                    let aged = (age + 1).min(self.age_cap);
                    if age + 1 >= threshold {
                        let predicted = most_likely_next(self.source, xh);
                        self.attempt(&mut out, py, y, xh, y, Memory::Age(0), (predicted, Memory::Age(aged)));
                    } else {
                        out.push(idle(Memory::Age(aged)));
                    }
                }
                (PolicyKind::Uniform { period }, Memory::Uniform { counter, stored, acked }) => {
                    let (stored, acked) = if counter == 0 { (y, false) } else { (stored, acked) };
                    let counter = (counter + 1) % period;
                    if !acked {
                        self.attempt(
                            &mut out,
                            py,
                            y,
                            xh,
                            stored,
                            Memory::Uniform {
                                counter,
                                stored,
                                acked: true,
                            },
                            (
                                xh,
                                Memory::Uniform {
                                    counter,
                                    stored,
                                    acked: false,
                                },
                            ),
                        );
                    } else {
                        out.push(idle(Memory::Uniform { counter, stored, acked }));
                    }
                }
                _ => unreachable!("memory does not match policy"),
            }
        }
        out
    }
}

/// Enumerates the joint states reachable from the synchronized start and
/// their one-slot transition matrix.
pub fn build_joint_chain(config: &SimConfig) -> Result<JointChain> {
    let cap = match config.policy {
        PolicyKind::AgeAware { threshold } => threshold,
        _ => 0,
    };
    build_joint_chain_with_age_cap(config, cap)
}

/// As [`build_joint_chain`], with the age-aware policy's age capped at
/// `age_cap` (at least the threshold). Every age at or above the threshold
/// behaves identically, so any such cap yields the same metrics.
pub fn build_joint_chain_with_age_cap(config: &SimConfig, age_cap: u32) -> Result<JointChain> {
    config.validate()?;
    let age_cap = match config.policy {
        PolicyKind::AgeAware { threshold } => age_cap.max(threshold),
        _ => 0,
    };
    let stepper = Stepper {
        source: &config.source,
        policy: config.policy,
        ps: config.channel.success_probability(),
        age_cap,
    };

    let mut index: HashMap<JointState, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut queue = VecDeque::new();

    let start = stepper.initial();
    index.insert(start, 0);
    states.push(start);
    queue.push_back(0usize);

    while let Some(i) = queue.pop_front() {
        let s = states[i];
        let mut row = Vec::new();
        let mut label = StateLabels {
            mismatch: f64::from(u8::from(s.source != s.estimate)),
            cost: config.cost.cost(s.source, s.estimate),
            ..StateLabels::default()
        };
        for b in stepper.branches(s) {
            if b.prob == 0.0 {
                continue;
            }
            if b.transmit {
                label.transmit += b.prob;
                if b.uninformative {
                    label.uninformative += b.prob;
                }
            }
            let j = *index.entry(b.next).or_insert_with(|| {
                states.push(b.next);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            row.push((j, b.prob));
        }
        rows.push(row);
        labels.push(label);
    }

    let n = states.len();
    let matrix = rows
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; n];
            for (j, p) in row {
                dense[j] += p;
            }
            dense
        })
        .collect();
    Ok(JointChain {
        states,
        matrix,
        labels,
        source: config.source.clone(),
    })
}

/// Stationary distribution of the joint chain.
///
/// Requires an irreducible source: a frozen or otherwise reducible source has
/// no unique long-run behaviour even when the reachable set looks ergodic.
pub fn stationary(chain: &JointChain, tol: f64) -> Result<Vec<f64>> {
    if !chain.source.is_irreducible() {
        return Err(Error::NoUniqueStationary);
    }
    let pi = linalg::solve_stationary(&chain.matrix).ok_or(Error::NoUniqueStationary)?;
    if linalg::stationary_residual(&chain.matrix, &pi) >= tol {
        return Err(Error::NoUniqueStationary);
    }
    Ok(pi)
}

/// Long-run metrics as stationary expectations of the state labels.
pub fn exact_summary(chain: &JointChain, pi: &[f64], cost: &CostMatrix) -> Result<Metrics> {
    if pi.len() != chain.len() {
        return Err(Error::LengthMismatch {
            left: pi.len(),
            right: chain.len(),
        });
    }
    let mut m = Metrics::default();
    let mut wasted = 0.0;
    for ((state, label), &p) in chain.states.iter().zip(&chain.labels).zip(pi) {
        m.recon_error += p * label.mismatch;
        m.actuation_cost += p * cost.cost(state.source, state.estimate);
        m.tx_rate += p * label.transmit;
        wasted += p * label.uninformative;
    }
    m.uninformative_frac = if m.tx_rate > 0.0 { wasted / m.tx_rate } else { 0.0 };
    Ok(m)
}

/// Builds, solves and summarises in one call.
pub fn analyze(config: &SimConfig) -> Result<Metrics> {
    let chain = build_joint_chain(config)?;
    let pi = stationary(&chain, DEFAULT_TOL)?;
    exact_summary(&chain, &pi, &config.cost)
}

/// Metrics when nothing ever gets through: the configured policy over a
/// channel that erases every attempt.
pub fn no_communication(config: &SimConfig) -> Result<Metrics> {
    let mut silent = config.clone();
    silent.channel = crate::model::ErasureChannel::new(0.0)?;
    analyze(&silent)
}
