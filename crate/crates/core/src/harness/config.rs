use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::agents::AgentDescriptor;
use crate::economy::{ResourceLedger, DEFAULT_EPSILON};
use crate::environment::TransitionSchedule;

/// Everything a run depends on. Missing fields in a scenario file take the
/// [`Default`] values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub schedule: TransitionSchedule,
    pub initial_tokens: u64,
    pub initial_funding: f64,
    pub conversion_rate: f64,
    pub inference_cost_rate: f64,
    /// Work credited per prediction is `responsiveness * payout_scale`.
    pub payout_scale: f64,
    pub auto_repurchase: bool,
    pub epsilon: f64,
    pub seed: u64,
    pub agent: AgentDescriptor,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schedule: TransitionSchedule::default(),
            initial_tokens: 1000,
            initial_funding: 100.0,
            conversion_rate: 1.0,
            inference_cost_rate: 1.0,
            payout_scale: 1.0,
            auto_repurchase: false,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
            agent: AgentDescriptor::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.schedule.validate()?;
        self.agent.validate()?;
        for (name, v) in [
            ("conversion_rate", self.conversion_rate),
            ("inference_cost_rate", self.inference_cost_rate),
            ("payout_scale", self.payout_scale),
            ("epsilon", self.epsilon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(HarnessError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        self.initial_ledger().map(|_| ())
    }

    pub fn initial_ledger(&self) -> Result<ResourceLedger, HarnessError> {
        Ok(ResourceLedger::new(
            self.initial_tokens,
            self.initial_funding,
            self.conversion_rate,
            self.inference_cost_rate,
        )?)
    }

    /// Prediction the first transition is scored against.
    pub fn initial_prediction(&self) -> f64 {
        self.agent
            .initial_prediction
            .unwrap_or(self.schedule.initial_signal)
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }
}
