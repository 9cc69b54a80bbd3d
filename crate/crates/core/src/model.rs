//! Stochastic building blocks: Markov sources, the erasure channel and the
//! actuation cost matrix.
//!
//! Two-state sources are parameterised by *stay* probabilities: `p` is the
//! probability of remaining in state 0 and `q` the probability of remaining
//! in state 1, so the transition matrix is `[[p, 1-p], [1-q, q]]`. Large
//! `p, q` give a slowly changing source.

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::RandomStream;

const ROW_SUM_TOL: f64 = 1e-12;

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange { name, value })
    }
}

/// Finite-state discrete-time Markov chain driving the monitored process.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    transitions: Vec<Vec<f64>>,
    initial_state: usize,
}

impl MarkovSource {
    pub fn new(transitions: Vec<Vec<f64>>, initial_state: usize) -> Result<Self> {
        let n = transitions.len();
        if n < 2 {
            return Err(Error::TooFewStates(n));
        }
        for (row, entries) in transitions.iter().enumerate() {
            if entries.len() != n {
                return Err(Error::RaggedMatrix {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            for &v in entries {
                check_probability("transition", v)?;
            }
            let sum: f64 = entries.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowNotStochastic { row, sum });
            }
        }
        if initial_state >= n {
            return Err(Error::StateOutOfRange {
                state: initial_state,
                n,
            });
        }
        Ok(Self {
            transitions,
            initial_state,
        })
    }

    /// Two-state source with stay probabilities `p` (state 0) and `q` (state 1),
    /// started in state 0.
    pub fn two_state(p: f64, q: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("q", q)?;
        Self::new(vec![vec![p, 1.0 - p], vec![1.0 - q, q]], 0)
    }

    pub fn with_initial_state(mut self, state: usize) -> Result<Self> {
        if state >= self.n_states() {
            return Err(Error::StateOutOfRange {
                state,
                n: self.n_states(),
            });
        }
        self.initial_state = state;
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn transitions(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.transitions[state]
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.transitions[from][to]
    }

    /// Draws the successor of `state`. Consumes exactly one uniform draw.
    pub fn sample_transition<R: RandomStream + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let u = rng.next_uniform();
        let row = &self.transitions[state];
        let mut acc = 0.0;
        for (next, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return next;
            }
        }
        // Rounding left `acc` just below 1: fall back to the last reachable state.
        row.iter().rposition(|&p| p > 0.0).unwrap_or(state)
    }

    /// True when every state reaches every other state.
    #[allow(clippy::needless_range_loop)]
    pub fn is_irreducible(&self) -> bool {
        let n = self.n_states();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let w = if forward {
                        self.transitions[i][j]
                    } else {
                        self.transitions[j][i]
                    };
                    if w > 0.0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// Unique stationary distribution `π` with `πP = π`.
    ///
    /// Reducible chains, including the frozen identity source, have no unique
    /// stationary distribution and are rejected.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        if !self.is_irreducible() {
            return Err(Error::NoUniqueStationary);
        }
        linalg::solve_stationary(&self.transitions).ok_or(Error::NoUniqueStationary)
    }
}

/// Memoryless erasure channel: each attempt is delivered with probability `ps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureChannel {
    ps: f64,
}

impl ErasureChannel {
    pub fn new(ps: f64) -> Result<Self> {
        check_probability("ps", ps)?;
        Ok(Self { ps })
    }

    pub fn success_probability(&self) -> f64 {
        self.ps
    }

    /// One transmission attempt. Consumes exactly one uniform draw.
    pub fn attempt_transmission<R: RandomStream + ?Sized>(&self, rng: &mut R) -> bool {
        rng.next_uniform() < self.ps
    }
}

/// Actuation cost indexed `[true state][estimated state]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    costs: Vec<Vec<f64>>,
}

impl CostMatrix {
    pub fn new(costs: Vec<Vec<f64>>) -> Result<Self> {
        let n = costs.len();
        for (row, entries) in costs.iter().enumerate() {
            if entries.len() != n {
                return Err(Error::RaggedMatrix {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                let bad = !value.is_finite() || value < 0.0 || (row == col && value != 0.0);
                if bad {
                    return Err(Error::InvalidCost { row, col, value });
                }
            }
        }
        Ok(Self { costs })
    }

    /// Mistaking state 0 for state 1 costs 1; mistaking state 1 for state 0 costs 5.
    pub fn default_two_state() -> Self {
        Self {
            costs: vec![vec![0.0, 1.0], vec![5.0, 0.0]],
        }
    }

    /// Unit cost for every mismatch.
    pub fn hamming(n: usize) -> Self {
        let costs = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self { costs }
    }

    pub fn n_states(&self) -> usize {
        self.costs.len()
    }

    pub fn cost(&self, truth: usize, estimate: usize) -> f64 {
        self.costs[truth][estimate]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.costs
    }
}

impl Default for CostMatrix {
    fn default() -> Self {
        Self::default_two_state()
    }
}
