//! Prediction agents.
//!
//! Every agent sees one [`Observation`] per environment transition and
//! answers with a scalar prediction plus the tokens it spent. Built-in agents
//! have closed-form AA values and serve as baselines; [`ExternalAgent`] talks
//! to a model process over a line-delimited JSON protocol.

mod builtin;
mod external;
pub mod protocol;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::Observation;

pub use builtin::{LaggedAgent, NoisyAgent, ProportionalAgent, ScriptedAgent, StaticAgent};
pub use external::{spawn_external, ExternalAgent, DEFAULT_TIMEOUT_MS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("token budget exhausted: need {required}, have {budget}")]
    BudgetExhausted { required: u64, budget: u64 },
    #[error("agent fault: {0}")]
    AgentFault(String),
    #[error("agent unavailable: {0}")]
    AgentUnavailable(String),
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error("invalid agent descriptor: {0}")]
    InvalidDescriptor(String),
    /// A failure recorded in a run log, reproduced during replay.
    #[error("{0}")]
    Recorded(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRequest {
    pub observation: Observation,
    /// Tokens the ledger will honor for this call.
    pub token_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionResponse {
    pub prediction: f64,
    pub tokens_used: u64,
}

pub trait Agent: Send {
    fn name(&self) -> &str;

    /// Called once with the environment before its first transition and the
    /// prediction the first transition will be scored against.
    fn start(&mut self, initial: &Observation, initial_prediction: f64);

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError>;

    /// Minimum tokens a call needs.
    fn token_cost(&self) -> u64 {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Static,
    Proportional,
    Lagged,
    Overcorrector,
    Noisy,
    External,
}

impl AgentKind {
    pub const ALL: [AgentKind; 6] = [
        AgentKind::Static,
        AgentKind::Proportional,
        AgentKind::Lagged,
        AgentKind::Overcorrector,
        AgentKind::Noisy,
        AgentKind::External,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Static => "static",
            AgentKind::Proportional => "proportional",
            AgentKind::Lagged => "lagged",
            AgentKind::Overcorrector => "overcorrector",
            AgentKind::Noisy => "noisy",
            AgentKind::External => "external",
        }
    }

    pub fn is_builtin(self) -> bool {
        self != AgentKind::External
    }

    /// One-line description and the parameters the kind reads.
    pub fn describe(self) -> (&'static str, &'static [&'static str]) {
        match self {
            AgentKind::Static => ("never moves its prediction", &[]),
            AgentKind::Proportional => (
                "moves by gain x observed signal change",
                &["gain (default 1.0)"],
            ),
            AgentKind::Lagged => (
                "predicts the signal observed `lag` steps ago",
                &["lag (default 1, >= 1)"],
            ),
            AgentKind::Overcorrector => (
                "proportional agent with a gain above 1",
                &["gain (default 1.5)"],
            ),
            AgentKind::Noisy => (
                "tracks the observed signal plus seeded uniform noise",
                &["noise_scale (default 0.5, >= 0)"],
            ),
            AgentKind::External => (
                "subprocess speaking the line-delimited JSON agent protocol",
                &["command (required)", "timeout_ms (default 10000)"],
            ),
        }
    }
}

impl std::fmt::Display for AgentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which agent to run and how it is parameterised. Parameters a kind does not
/// read are ignored. Common to all kinds: `name`, `initial_prediction` (default:
/// the initial signal) and `token_cost` (default 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentDescriptor {
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lag: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_prediction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_cost: Option<u64>,
}

impl AgentDescriptor {
    pub fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            name: None,
            gain: None,
            lag: None,
            noise_scale: None,
            command: None,
            timeout_ms: None,
            initial_prediction: None,
            token_cost: None,
        }
    }

    pub fn proportional(gain: f64) -> Self {
        Self {
            gain: Some(gain),
            ..Self::new(AgentKind::Proportional)
        }
    }

    pub fn external<S: Into<String>>(command: impl IntoIterator<Item = S>) -> Self {
        Self {
            command: Some(command.into_iter().map(Into::into).collect()),
            ..Self::new(AgentKind::External)
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain.unwrap_or(match self.kind {
            AgentKind::Overcorrector => 1.5,
            _ => 1.0,
        })
    }

    pub fn lag(&self) -> u32 {
        self.lag.unwrap_or(1)
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale.unwrap_or(0.5)
    }

    pub fn token_cost(&self) -> u64 {
        self.token_cost.unwrap_or(1)
    }

    pub fn timeout_ms(&self) -> u64 {
        self.timeout_ms.unwrap_or(DEFAULT_TIMEOUT_MS)
    }

    pub fn display_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.kind.as_str().to_string())
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |msg: String| Err(AgentError::InvalidDescriptor(msg));
        if !self.gain().is_finite() {
            return bad(format!("gain must be finite, got {}", self.gain()));
        }
        if self.lag() == 0 {
            return bad("lag must be at least 1".into());
        }
        let noise = self.noise_scale();
        if !(noise.is_finite() && noise >= 0.0) {
            return bad(format!("noise_scale must be finite and >= 0, got {noise}"));
        }
        if self.token_cost() == 0 {
            return bad("token_cost must be at least 1".into());
        }
        if let Some(p) = self.initial_prediction {
            if !p.is_finite() {
                return bad("initial_prediction must be finite".into());
            }
        }
        if self.kind == AgentKind::External {
            match &self.command {
                Some(cmd) if !cmd.is_empty() && !cmd[0].is_empty() => {}
                _ => return bad("external agent needs a non-empty command".into()),
            }
            if self.timeout_ms() == 0 {
                return bad("timeout_ms must be positive".into());
            }
        }
        Ok(())
    }

    /// Builds the agent. External agents are spawned and handshaken here.
    pub fn build(&self, seed: u64) -> Result<Box<dyn Agent>, AgentError> {
        self.validate()?;
        let name = self.display_name();
        let cost = self.token_cost();
        Ok(match self.kind {
            AgentKind::Static => Box::new(StaticAgent::new(name, cost)),
            AgentKind::Proportional | AgentKind::Overcorrector => {
                Box::new(ProportionalAgent::new(name, self.gain(), cost))
            }
            AgentKind::Lagged => Box::new(LaggedAgent::new(name, self.lag(), cost)),
            AgentKind::Noisy => Box::new(NoisyAgent::new(name, self.noise_scale(), seed, cost)),
            AgentKind::External => Box::new(spawn_external(self)?),
        })
    }
}

impl Default for AgentDescriptor {
    fn default() -> Self {
        Self::proportional(1.0)
    }
}

pub(crate) fn check_budget(request: &PredictionRequest, cost: u64) -> Result<(), AgentError> {
    if request.token_budget < cost {
        Err(AgentError::BudgetExhausted {
            required: cost,
            budget: request.token_budget,
        })
    } else {
        Ok(())
    }
}
