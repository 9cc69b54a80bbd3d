//! Information measures for weighing, ageing and comparing what the receiver
//! knows. Logarithms take an explicit base; use `2.0` for bits.

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Non-negative utility attached to each outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {bad} is negative or not finite"
            )));
        }
        Ok(Self { weights })
    }

    pub fn ones(n: usize) -> Self {
        Self { weights: vec![1.0; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Outcome of a divergence computation that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    /// `p` puts mass where `q` has none.
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }
}

fn check_base(base: f64) -> Result<()> {
    if base > 1.0 && base.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidLogBase(base))
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left: a, right: b })
    }
}

/// Context-weighted entropy `−Σ w(y) p(y) log p(y)`, with `0 log 0 = 0`.
pub fn weighted_entropy(p: &Distribution, w: &WeightVector, base: f64) -> Result<f64> {
    check_base(base)?;
    check_len(p.len(), w.weights.len())?;
    let ln_base = base.ln();
    let h = p
        .probs
        .iter()
        .zip(&w.weights)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &wi)| -wi * pi * pi.ln() / ln_base)
        .sum::<f64>();
    Ok(h + 0.0)
}

/// Shannon entropy, i.e. weighted entropy with unit weights.
pub fn shannon_entropy(p: &Distribution, base: f64) -> Result<f64> {
    weighted_entropy(p, &WeightVector::ones(p.len()), base)
}

/// Rényi entropy of order `alpha`: `log Σ p^α / (1 − α)`.
pub fn renyi_entropy(p: &Distribution, alpha: f64, base: f64) -> Result<f64> {
    check_base(base)?;
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidRenyiOrder(alpha));
    }
    if alpha == 1.0 {
        return Err(Error::RenyiOrderOne);
    }
    let power_sum: f64 = p.probs.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
    Ok(power_sum.ln() / base.ln() / (1.0 - alpha) + 0.0)
}

/// Kullback–Leibler divergence `Σ p log(p / q)`.
pub fn kl_divergence(p: &Distribution, q: &Distribution, base: f64) -> Result<Divergence> {
    check_base(base)?;
    check_len(p.len(), q.len())?;
    let ln_base = base.ln();
    let mut d = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(Divergence::Infinite);
        }
        d += pi * (pi / qi).ln();
    }
    // Rounding can leave tiny negatives for p ≈ q.
    Ok(Divergence::Finite((d / ln_base).max(0.0)))
}

/// Total variation distance `½ Σ |p − q|`.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_len(p.len(), q.len())?;
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Exponentially decaying freshness `e^{−γ·aoi}`.
pub fn timeliness(aoi: u64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    (-gamma * aoi as f64).exp()
}

/// Weighted sum of accuracy and timeliness.
pub fn semantic_value(w1: f64, w2: f64, accuracy: f64, aoi: u64, gamma: f64) -> f64 {
    w1 * accuracy + w2 * timeliness(aoi, gamma)
}

/// Time-averaged squared error between a sequence and its reconstruction.
pub fn time_avg_mse(x: &[f64], xhat: &[f64]) -> Result<f64> {
    check_len(x.len(), xhat.len())?;
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let total: f64 = x.iter().zip(xhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(total / x.len() as f64)
}
