//! Scaling environment: a scalar ground-truth signal whose transition rate
//! grows epoch over epoch.
//!
//! The environment is exogenous. Agents see it only through [`Observation`],
//! which carries the current signal and clock and nothing about the schedule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{CounterRng, ENVIRONMENT_STREAM};

/// Upper bound on transitions in one run.
pub const MAX_TRANSITIONS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("epoch {epoch} out of range (schedule has {epochs} epochs)")]
    InvalidEpoch { epoch: u32, epochs: u32 },
    #[error("out-of-order transition: expected index {expected}, got {got}")]
    SequenceError { expected: u64, got: u64 },
    #[error("transition {index} moves time backwards ({from} -> {to})")]
    TimeRegression { index: u64, from: f64, to: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Growth {
    /// `base_rate + increment * epoch`
    Linear { increment: u64 },
    /// `floor(base_rate * factor^epoch)`, `factor >= 1`
    Geometric { factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaDistribution {
    /// Integers in `[low, high]`, optionally never zero.
    UniformInt {
        low: i64,
        high: i64,
        #[serde(default)]
        exclude_zero: bool,
    },
    /// Reals in `[low, high)`.
    UniformReal { low: f64, high: f64 },
    /// The same delta every transition.
    FixedStep { step: f64 },
}

/// Missing fields take the [`Default`] values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransitionSchedule {
    pub base_rate: u64,
    pub growth: Growth,
    pub epochs: u32,
    pub deltas: DeltaDistribution,
    pub initial_signal: f64,
}

impl Default for TransitionSchedule {
    fn default() -> Self {
        Self {
            base_rate: 2,
            growth: Growth::Linear { increment: 1 },
            epochs: 10,
            deltas: DeltaDistribution::UniformInt {
                low: -5,
                high: 5,
                exclude_zero: true,
            },
            initial_signal: 0.0,
        }
    }
}

impl TransitionSchedule {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |msg: String| Err(EnvError::InvalidSchedule(msg));
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if self.base_rate == 0 {
            return bad("base_rate must be positive".into());
        }
        if let Growth::Geometric { factor } = self.growth {
            if !factor.is_finite() || factor < 1.0 {
                return bad(format!(
                    "geometric factor must be finite and >= 1, got {factor}"
                ));
            }
        }
        if !self.initial_signal.is_finite() {
            return bad("initial_signal must be finite".into());
        }
        match self.deltas {
            DeltaDistribution::UniformInt {
                low,
                high,
                exclude_zero,
            } => {
                if low > high {
                    return bad(format!("delta range [{low}, {high}] is empty"));
                }
                if exclude_zero && low == 0 && high == 0 {
                    return bad("delta range contains only zero".into());
                }
                if (high as i128 - low as i128) >= u64::MAX as i128 {
                    return bad("delta range too wide".into());
                }
            }
            DeltaDistribution::UniformReal { low, high } => {
                if !(low.is_finite() && high.is_finite() && low <= high) {
                    return bad(format!("delta range [{low}, {high}) is invalid"));
                }
            }
            DeltaDistribution::FixedStep { step } => {
                if !step.is_finite() {
                    return bad("fixed step must be finite".into());
                }
            }
        }
        let mut total = 0u64;
        for epoch in 0..self.epochs {
            total = total.saturating_add(self.rate_unchecked(epoch));
            if total > MAX_TRANSITIONS {
                return bad(format!("schedule exceeds {MAX_TRANSITIONS} transitions"));
            }
        }
        Ok(())
    }

    fn rate_unchecked(&self, epoch: u32) -> u64 {
        match self.growth {
            Growth::Linear { increment } => self
                .base_rate
                .saturating_add(increment.saturating_mul(epoch as u64)),
            Growth::Geometric { factor } => {
                // Running max keeps the sequence monotone under powf rounding.
                let mut rate = self.base_rate;
                for k in 0..=epoch {
                    let r = (self.base_rate as f64 * factor.powi(k as i32)).floor();
                    let r = if r >= u64::MAX as f64 {
                        u64::MAX
                    } else {
                        r as u64
                    };
                    rate = rate.max(r);
                }
                rate
            }
        }
    }

    pub fn total_transitions(&self) -> u64 {
        (0..self.epochs).map(|e| self.rate_unchecked(e)).sum()
    }
}

/// Number of transitions scheduled in `epoch`.
pub fn transitions_for_epoch(schedule: &TransitionSchedule, epoch: u32) -> Result<u64, EnvError> {
    if epoch >= schedule.epochs {
        return Err(EnvError::InvalidEpoch {
            epoch,
            epochs: schedule.epochs,
        });
    }
    Ok(schedule.rate_unchecked(epoch))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentState {
    pub epoch: u32,
    pub time: f64,
    pub signal: f64,
    pub transitions_applied: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateTransition {
    pub index: u64,
    pub epoch: u32,
    pub delta: f64,
    pub magnitude: f64,
    pub time: f64,
}

impl StateTransition {
    pub fn new(index: u64, epoch: u32, delta: f64) -> Self {
        Self {
            index,
            epoch,
            delta,
            magnitude: delta.abs(),
            // One time unit per transition.
            time: (index + 1) as f64,
        }
    }

    /// Zero-magnitude transitions are applied but never scored.
    pub fn is_degenerate(&self) -> bool {
        self.magnitude == 0.0
    }
}

/// What an agent gets to see.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub signal: f64,
    pub epoch: u32,
    pub time: f64,
}

pub fn init_environment(
    schedule: &TransitionSchedule,
    seed: u64,
) -> Result<EnvironmentState, EnvError> {
    Environment::new(schedule.clone(), seed).map(|env| env.initial_state())
}

pub fn apply_transition(
    state: &EnvironmentState,
    transition: &StateTransition,
) -> Result<EnvironmentState, EnvError> {
    if transition.index != state.transitions_applied {
        return Err(EnvError::SequenceError {
            expected: state.transitions_applied,
            got: transition.index,
        });
    }
    if transition.time < state.time {
        return Err(EnvError::TimeRegression {
            index: transition.index,
            from: state.time,
            to: transition.time,
        });
    }
    Ok(EnvironmentState {
        epoch: transition.epoch,
        time: transition.time,
        signal: state.signal + transition.delta,
        transitions_applied: state.transitions_applied + 1,
    })
}

pub fn observe(state: &EnvironmentState) -> Observation {
    Observation {
        signal: state.signal,
        epoch: state.epoch,
        time: state.time,
    }
}

/// A validated schedule bound to a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    schedule: TransitionSchedule,
    rng: CounterRng,
}

impl Environment {
    pub fn new(schedule: TransitionSchedule, seed: u64) -> Result<Self, EnvError> {
        schedule.validate()?;
        Ok(Self {
            schedule,
            rng: CounterRng::new(seed, ENVIRONMENT_STREAM),
        })
    }

    pub fn schedule(&self) -> &TransitionSchedule {
        &self.schedule
    }

    pub fn initial_state(&self) -> EnvironmentState {
        EnvironmentState {
            epoch: 0,
            time: 0.0,
            signal: self.schedule.initial_signal,
            transitions_applied: 0,
        }
    }

    /// Global index of the first transition in `epoch`.
    pub fn first_index(&self, epoch: u32) -> u64 {
        (0..epoch.min(self.schedule.epochs))
            .map(|e| self.schedule.rate_unchecked(e))
            .sum()
    }

    /// Regenerates one epoch without touching any other.
    pub fn epoch_transitions(&self, epoch: u32) -> Result<Vec<StateTransition>, EnvError> {
        let count = transitions_for_epoch(&self.schedule, epoch)?;
        let first = self.first_index(epoch);
        Ok((first..first + count)
            .map(|index| StateTransition::new(index, epoch, self.draw_delta(epoch, index)))
            .collect())
    }

    pub fn transitions(&self) -> Vec<StateTransition> {
        (0..self.schedule.epochs)
            .flat_map(|epoch| self.epoch_transitions(epoch).expect("epoch in range"))
            .collect()
    }

    fn draw_delta(&self, epoch: u32, index: u64) -> f64 {
        let e = epoch as u64;
        match self.schedule.deltas {
            DeltaDistribution::UniformInt {
                low,
                high,
                exclude_zero,
            } => {
                let span = (high as i128 - low as i128 + 1) as u64;
                let skip_zero = exclude_zero && low <= 0 && high >= 0;
                let bound = if skip_zero { span - 1 } else { span };
                let v = low as i128 + self.rng.below(e, index, bound) as i128;
                let v = if skip_zero && v >= 0 { v + 1 } else { v };
                v as f64
            }
            DeltaDistribution::UniformReal { low, high } => {
                low + (high - low) * self.rng.unit(e, index)
            }
            DeltaDistribution::FixedStep { step } => step,
        }
    }
}
