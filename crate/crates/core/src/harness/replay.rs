use std::fmt;

use thiserror::Error;

use super::episode::{run_episode_with_agent, RunLog, TruncationReason};
use crate::agents::{Agent, PredictionResponse, ScriptedAgent};

/// Where a log stopped agreeing with its own recomputation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Config,
    Transition(usize),
    Snapshot(usize),
    Sample(usize),
    Field(&'static str),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Config => write!(f, "config"),
            Location::Transition(i) => write!(f, "transition {i}"),
            Location::Snapshot(i) => write!(f, "snapshot {i}"),
            Location::Sample(i) => write!(f, "sample {i}"),
            Location::Field(name) => write!(f, "field `{name}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("integrity error at {location}: {detail}")]
pub struct IntegrityError {
    pub location: Location,
    pub detail: String,
}

fn integrity(location: Location, detail: impl Into<String>) -> IntegrityError {
    IntegrityError {
        location,
        detail: detail.into(),
    }
}

fn first_divergence<T: PartialEq>(recorded: &[T], recomputed: &[T]) -> Option<usize> {
    recorded
        .iter()
        .zip(recomputed)
        .position(|(a, b)| a != b)
        .or_else(|| {
            (recorded.len() != recomputed.len()).then(|| recorded.len().min(recomputed.len()))
        })
}

/// Recomputes a log from its config and checks it matches field for field.
///
/// Built-in agents are rerun. External agents cannot be, so their recorded
/// predictions are played back and everything derived from them (samples,
/// ledger, FI, integrals, classifications) is recomputed and compared.
pub fn replay(log: &RunLog) -> Result<RunLog, IntegrityError> {
    log.config
        .validate()
        .map_err(|e| integrity(Location::Config, e.to_string()))?;

    if let Some(i) = log.samples.iter().position(|s| !s.is_consistent()) {
        return Err(integrity(
            Location::Sample(i),
            format!(
                "aa_value {} does not follow from its predictions",
                log.samples[i].aa_value
            ),
        ));
    }

    let mut agent: Box<dyn Agent> = if log.config.agent.kind.is_builtin() {
        log.config
            .agent
            .build(log.config.seed)
            .map_err(|e| integrity(Location::Config, e.to_string()))?
    } else {
        let responses = log
            .snapshots
            .iter()
            .map(|s| PredictionResponse {
                prediction: s.prediction_new,
                tokens_used: s.tokens_used,
            })
            .collect();
        let fault = log
            .truncation
            .as_ref()
            .filter(|t| t.reason == TruncationReason::AgentFault)
            .map(|t| t.detail.clone());
        Box::new(ScriptedAgent::new(
            log.agent_name.clone(),
            log.config.agent.token_cost(),
            responses,
            fault,
        ))
    };

    let fresh = run_episode_with_agent(&log.config, agent.as_mut()).map_err(|e| {
        integrity(
            Location::Config,
            format!("episode could not be recomputed: {e}"),
        )
    })?;
    compare(log, &fresh)?;
    Ok(fresh)
}

fn compare(recorded: &RunLog, fresh: &RunLog) -> Result<(), IntegrityError> {
    if let Some(i) = first_divergence(&recorded.transitions, &fresh.transitions) {
        return Err(integrity(
            Location::Transition(i),
            "transition differs from the schedule",
        ));
    }
    if let Some(i) = first_divergence(&recorded.snapshots, &fresh.snapshots) {
        return Err(integrity(
            Location::Snapshot(i),
            "snapshot differs on recomputation",
        ));
    }
    if let Some(i) = first_divergence(&recorded.samples, &fresh.samples) {
        return Err(integrity(
            Location::Sample(i),
            "sample differs on recomputation",
        ));
    }
    let fields: [(&'static str, bool); 11] = [
        (
            "format_version",
            recorded.format_version == fresh.format_version,
        ),
        ("agent_name", recorded.agent_name == fresh.agent_name),
        (
            "skipped_transitions",
            recorded.skipped_transitions == fresh.skipped_transitions,
        ),
        (
            "unscored_transitions",
            recorded.unscored_transitions == fresh.unscored_transitions,
        ),
        ("summary", recorded.summary == fresh.summary),
        (
            "throughput",
            recorded.throughput.to_bits() == fresh.throughput.to_bits(),
        ),
        ("integrals", recorded.integrals == fresh.integrals),
        ("order", recorded.order == fresh.order),
        ("regime", recorded.regime == fresh.regime),
        ("truncated", recorded.truncated == fresh.truncated),
        ("truncation", recorded.truncation == fresh.truncation),
    ];
    match fields.iter().find(|(_, same)| !same) {
        Some((name, _)) => Err(integrity(Location::Field(name), "differs on recomputation")),
        None => Ok(()),
    }
}
