//! Random walks on Γ (absorbing at the extreme states) and Γ′ (a Markov
//! chain with transition matrix `½A′_N`).
//!
//! Every replication draws from its own ChaCha8 stream, selected by the
//! replication index, so results do not depend on thread scheduling.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::chebyshev::AngleFraction;
use crate::error::{Error, Result};
use crate::matrix::AdjacencyMatrix;
use crate::spectrum::SpectralKey;
use crate::state::{MemoryState, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkConfig {
    pub n: u32,
    pub variant: Variant,
    pub seed: u64,
    pub max_steps: u64,
    pub replications: u64,
}

impl WalkConfig {
    fn validate(&self, variant: Variant) -> Result<()> {
        if self.variant != variant {
            return Err(Error::Precondition(format!(
                "this walk runs on {variant}, config says {}",
                self.variant
            )));
        }
        if self.n < 1 || self.n > 62 {
            return Err(Error::Precondition(format!("walks need 1 ≤ N ≤ 62, got {}", self.n)));
        }
        if self.replications < 1 || self.max_steps < 1 {
            return Err(Error::Precondition("replications and max_steps must be ≥ 1".into()));
        }
        Ok(())
    }

    fn rng(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        rng
    }
}

/// One move of the walk on packed states; `up` picks the up-successor.
/// Returns `None` when the requested move does not exist.
#[inline]
fn step(v: u64, ones: u64, up: bool) -> Option<u64> {
    if up {
        (v != ones).then(|| v | (v + 1))
    } else {
        (v != 0).then(|| v & (v - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TerminationSample {
    pub replication: u64,
    /// 1-based step at which the walk stopped, or `max_steps` if censored.
    pub termination_step: u64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    /// Over uncensored samples.
    pub mean: f64,
    pub variance: f64,
    pub count: u64,
    pub censored_count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingSamples {
    pub config: WalkConfig,
    pub start: MemoryState,
    pub samples: Vec<TerminationSample>,
}

impl AbsorbingSamples {
    pub fn summary(&self) -> SampleSummary {
        let done: Vec<f64> = self
            .samples
            .iter()
            .filter(|s| !s.censored)
            .map(|s| s.termination_step as f64)
            .collect();
        let count = done.len() as u64;
        let mean = if done.is_empty() {
            f64::NAN
        } else {
            done.iter().sum::<f64>() / done.len() as f64
        };
        let variance = if done.len() < 2 {
            0.0
        } else {
            done.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (done.len() - 1) as f64
        };
        SampleSummary {
            mean,
            variance,
            count,
            censored_count: self.samples.len() as u64 - count,
            seed: self.config.seed,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema: hyspectra.simulate.v1\nreplication,termination_step,censored\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{}", s.replication, s.termination_step, s.censored);
        }
        out
    }
}

/// Walk on Γ: at `0^N` and `1^N` stop with probability ½ or move to the only
/// successor; elsewhere move to either successor with probability ½.
pub fn simulate_absorbing(cfg: &WalkConfig, start: MemoryState) -> Result<AbsorbingSamples> {
    cfg.validate(Variant::Gamma)?;
    if start.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n as usize,
            got: start.len() as usize,
        });
    }
    let ones = (1u64 << cfg.n) - 1;
    let samples = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = cfg.rng(rep);
            let mut v = start.index();
            for t in 1..=cfg.max_steps {
                let coin: bool = rng.gen();
                if v == 0 || v == ones {
                    if coin {
                        return TerminationSample {
                            replication: rep,
                            termination_step: t,
                            censored: false,
                        };
                    }
                    v = step(v, ones, v == 0).expect("extreme state has one successor");
                } else {
                    v = step(v, ones, coin).expect("interior state has both successors");
                }
            }
            TerminationSample {
                replication: rep,
                termination_step: cfg.max_steps,
                censored: true,
            }
        })
        .collect();
    Ok(AbsorbingSamples {
        config: *cfg,
        start,
        samples,
    })
}

/// Default burn-in for [`empirical_stationary`].
pub fn default_burn_in(n: u32) -> u64 {
    10 << n
}

/// Occupancy frequencies of the Γ′ chain started at `0^N`, over
/// `replications × max_steps` post-burn-in steps.
pub fn empirical_stationary(cfg: &WalkConfig, burn_in: Option<u64>) -> Result<Vec<f64>> {
    cfg.validate(Variant::GammaPrime)?;
    let size = 1usize << cfg.n;
    crate::budget::check("N for empirical stationary", u64::from(cfg.n), 24)?;
    let burn_in = burn_in.unwrap_or_else(|| default_burn_in(cfg.n));
    let ones = (size - 1) as u64;
    let counts = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = cfg.rng(rep);
            let mut counts = vec![0u64; size];
            let mut v = 0u64;
            for t in 0..burn_in + cfg.max_steps {
                let up: bool = rng.gen();
                // the missing move at an extreme state is the self-loop
                v = step(v, ones, up).unwrap_or(v);
                if t >= burn_in {
                    counts[v as usize] += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total: u64 = counts.iter().sum();
    Ok(counts.into_iter().map(|c| c as f64 / total as f64).collect())
}

/// Empirical probability of taking the up-move from each state, for
/// sanity-checking the ½ transition law. Entries are `(visits, ups)`.
pub fn transition_counts(cfg: &WalkConfig) -> Result<Vec<(u64, u64)>> {
    cfg.validate(Variant::GammaPrime)?;
    let size = 1usize << cfg.n;
    let ones = (size - 1) as u64;
    let mut rng = cfg.rng(0);
    let mut counts = vec![(0u64, 0u64); size];
    let mut v = 0u64;
    for _ in 0..cfg.max_steps {
        let up: bool = rng.gen();
        counts[v as usize].0 += 1;
        if up {
            counts[v as usize].1 += 1;
        }
        v = step(v, ones, up).unwrap_or(v);
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerIteration {
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `max |v_{t+1} - v_t|` at the last step.
    pub last_change: f64,
}

pub const POWER_TOLERANCE: f64 = 1e-13;
const POWER_MAX_ITERATIONS: usize = 1_000_000;

/// Iterates `v ← ½A′_N v` from the uniform vector.
///
/// The subdominant modulus of `½A′_N` is `ρ = cos(π/(N+1))`, so the error after
/// a step that changed `v` by `δ` is at most about `δρ/(1-ρ)`; iteration stops
/// once that estimate is below the tolerance.
pub fn power_iteration_stationary(n: u32, budget: &Budget) -> Result<PowerIteration> {
    if n < 1 {
        return Err(Error::Precondition("power iteration needs N ≥ 1".into()));
    }
    let a = AdjacencyMatrix::build_recursive(n, Variant::GammaPrime, budget)?;
    let size = a.order();
    let rho = (std::f64::consts::PI / f64::from(n + 1)).cos();
    let factor = if n == 1 { 1.0 } else { rho / (1.0 - rho) };
    let mut v = vec![1.0 / size as f64; size];
    let mut change = f64::INFINITY;
    for it in 1..=POWER_MAX_ITERATIONS {
        let mut w = a.mul_vec(&v)?;
        w.iter_mut().for_each(|x| *x *= 0.5);
        change = w.iter().zip(&v).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        v = w;
        if change * factor <= POWER_TOLERANCE {
            let total: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= total);
            return Ok(PowerIteration {
                vector: v,
                iterations: it,
                last_change: change,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITERATIONS,
        residual: change,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingEigenvalue {
    pub key: SpectralKey,
    /// Eigenvalue of `½A`.
    pub value: f64,
}

/// Γ: `cos(π/(N+2))`, the largest zero of `U_{N+1}`. Γ′: `1`.
pub fn leading_eigenvalue(n: u32, variant: Variant) -> Result<LeadingEigenvalue> {
    if n < 1 {
        return Err(Error::Precondition("leading eigenvalue needs N ≥ 1".into()));
    }
    let key = match variant {
        Variant::Gamma => SpectralKey::Angle(AngleFraction::new(1, u64::from(n) + 2)?),
        Variant::GammaPrime => SpectralKey::Unit,
    };
    Ok(LeadingEigenvalue {
        key,
        value: key.half_eigenvalue(),
    })
}
