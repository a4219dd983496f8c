//! Wire messages for external agents: one JSON object per line.
//!
//! ```text
//! -> {"type":"hello","protocol":1}
//! <- {"type":"ready","name":"..."}
//! -> {"type":"predict","signal":1.5,"epoch":0,"time":1.0,"budget":10}
//! <- {"type":"prediction","value":1.5,"tokens_used":1}
//! -> {"type":"bye"}
//! ```
//!
//! Unknown fields are ignored; an unexpected message type is a protocol error.

use serde::{Deserialize, Serialize};

use super::AgentError;

pub const PROTOCOL_VERSION: u32 = 1;

/// Harness to agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outbound {
    Hello {
        protocol: u32,
    },
    Predict {
        signal: f64,
        epoch: u32,
        time: f64,
        budget: u64,
    },
    Bye,
}

/// Agent to harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Inbound {
    Ready { name: String },
    Prediction { value: f64, tokens_used: u64 },
}

impl Outbound {
    pub fn to_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("outbound messages always serialize");
        line.push('\n');
        line
    }
}

impl Inbound {
    pub fn parse(line: &str) -> Result<Self, AgentError> {
        let msg: Inbound = serde_json::from_str(line.trim()).map_err(|e| {
            AgentError::ProtocolError(format!("bad message {:?}: {e}", line.trim()))
        })?;
        if let Inbound::Prediction { value, .. } = msg {
            if !value.is_finite() {
                return Err(AgentError::ProtocolError(format!(
                    "prediction {value} is not finite"
                )));
            }
        }
        Ok(msg)
    }
}
