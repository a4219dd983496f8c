use serde::{Deserialize, Serialize};

use super::{HarnessError, ScenarioConfig};
use crate::agents::{Agent, AgentError, PredictionRequest};
use crate::economy::{
    accumulate_orders, classify_order, classify_regime, throughput, Current, EpochLedger,
    FluidityOrder, FluidityRegime, OrderIntegrals, OrderPoint, ResourceLedger,
};
use crate::environment::{
    apply_transition, observe, Environment, EnvironmentState, StateTransition,
};
use crate::exact::ExactSum;
use crate::metric::{responsiveness_score, summarize, AdaptationSample, FiSummary};

pub const LOG_FORMAT_VERSION: u32 = 1;

/// State of the loop right after one token-spending agent action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub index: u64,
    pub time: f64,
    pub environment: EnvironmentState,
    pub prediction_old: f64,
    pub prediction_new: f64,
    pub tokens_used: u64,
    pub ledger: ResourceLedger,
    /// FI over all samples and changes up to this point; 0 before the first change.
    pub prefix_fi: f64,
}

impl Snapshot {
    pub fn order_point(&self) -> OrderPoint {
        OrderPoint {
            time: self.time,
            tokens_spent_total: self.ledger.tokens_spent_total,
            current_generated_total: self.ledger.current_generated_total,
            prefix_fi: self.prefix_fi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationReason {
    BudgetExhausted,
    CurrentExhausted,
    AgentFault,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub reason: TruncationReason,
    /// First transition the agent did not answer.
    pub at_transition: u64,
    pub detail: String,
}

/// Complete record of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub format_version: u32,
    pub agent_name: String,
    pub config: ScenarioConfig,
    pub transitions: Vec<StateTransition>,
    pub snapshots: Vec<Snapshot>,
    pub samples: Vec<AdaptationSample>,
    /// Zero-magnitude transitions: applied, never scored.
    pub skipped_transitions: u64,
    /// Changes left without a prediction pair after an agent fault.
    pub unscored_transitions: u64,
    pub summary: FiSummary,
    pub throughput: f64,
    pub integrals: OrderIntegrals,
    pub order: FluidityOrder,
    pub regime: FluidityRegime,
    pub truncated: bool,
    pub truncation: Option<Truncation>,
}

impl RunLog {
    /// Pretty JSON; identical runs produce identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run logs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn final_ledger(&self) -> Result<ResourceLedger, HarnessError> {
        match self.snapshots.last() {
            Some(s) => Ok(s.ledger),
            None => self.config.initial_ledger(),
        }
    }
}

/// Runs one episode with the agent the config describes.
pub fn run_episode(config: &ScenarioConfig) -> Result<RunLog, HarnessError> {
    config.validate()?;
    let mut agent = config.agent.build(config.seed)?;
    run_episode_with_agent(config, agent.as_mut())
}

/// Runs one episode with a caller-supplied agent. The config's agent
/// descriptor is recorded but not used to build anything.
pub fn run_episode_with_agent(
    config: &ScenarioConfig,
    agent: &mut dyn Agent,
) -> Result<RunLog, HarnessError> {
    config.validate()?;
    let env = Environment::new(config.schedule.clone(), config.seed)?;
    let mut ledger = config.initial_ledger()?;
    let mut state = env.initial_state();
    let mut prediction = config.initial_prediction();
    agent.start(&observe(&state), prediction);

    let mut transitions = Vec::new();
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut samples = Vec::new();
    let mut history = Vec::new();
    let mut aa_sum = ExactSum::new();
    let mut nc = 0u64;
    let mut skipped = 0u64;
    let mut unscored = 0u64;
    let mut truncation: Option<Truncation> = None;

    'epochs: for epoch in 0..env.schedule().epochs {
        for transition in env.epoch_transitions(epoch)? {
            state = apply_transition(&state, &transition)?;
            transitions.push(transition);
            if transition.is_degenerate() {
                skipped += 1;
            } else {
                nc += 1;
            }

            // A broke agent stays silent; the world keeps moving and every
            // change it misses scores as no response.
            if truncation.is_some() {
                if !transition.is_degenerate() {
                    let s = AdaptationSample::missed(
                        transition.index,
                        prediction,
                        transition.magnitude,
                    )?;
                    aa_sum.add(s.aa_value);
                    samples.push(s);
                }
                continue;
            }

            let budget = ledger.affordable_tokens();
            let cost = agent.token_cost();
            let response = if budget < cost {
                let reason = if ledger.tokens_available < cost {
                    TruncationReason::BudgetExhausted
                } else {
                    TruncationReason::CurrentExhausted
                };
                Err((reason, format!("need {cost} tokens, can afford {budget}")))
            } else {
                let request = PredictionRequest {
                    observation: observe(&state),
                    token_budget: budget,
                };
                match agent.predict(&request) {
                    Ok(r) if !r.prediction.is_finite() => Err((
                        TruncationReason::AgentFault,
                        format!("non-finite prediction {}", r.prediction),
                    )),
                    Ok(r) if r.tokens_used == 0 => Err((
                        TruncationReason::AgentFault,
                        "action reported zero tokens".to_string(),
                    )),
                    Ok(r) => Ok(r),
                    Err(e @ AgentError::BudgetExhausted { .. }) => {
                        Err((TruncationReason::BudgetExhausted, e.to_string()))
                    }
                    Err(e) => Err((TruncationReason::AgentFault, e.to_string())),
                }
            };

            let response = match response {
                Ok(r) => r,
                Err((reason, detail)) => {
                    truncation = Some(Truncation {
                        reason,
                        at_transition: transition.index,
                        detail,
                    });
                    if reason == TruncationReason::AgentFault {
                        // The process is gone: the log ends here, with this
                        // change left unscored.
                        if !transition.is_degenerate() {
                            unscored += 1;
                        }
                        break 'epochs;
                    }
                    if !transition.is_degenerate() {
                        let s = AdaptationSample::missed(
                            transition.index,
                            prediction,
                            transition.magnitude,
                        )?;
                        aa_sum.add(s.aa_value);
                        samples.push(s);
                    }
                    continue;
                }
            };

            // Self-reported usage is clamped to what the ledger honours.
            let tokens_used = response.tokens_used.min(budget);
            ledger = ledger.charge_inference(tokens_used)?;
            let work = if transition.is_degenerate() {
                0.0
            } else {
                let s = AdaptationSample::new(
                    transition.index,
                    prediction,
                    response.prediction,
                    transition.magnitude,
                )?;
                aa_sum.add(s.aa_value);
                samples.push(s);
                responsiveness_score(s.aa_value)? * config.payout_scale
            };
            ledger = ledger.settle_replenishment(work, config.auto_repurchase)?;

            let snapshot = Snapshot {
                index: snapshots.len() as u64,
                time: state.time,
                environment: state,
                prediction_old: prediction,
                prediction_new: response.prediction,
                tokens_used,
                ledger,
                prefix_fi: aa_sum.mean(nc).unwrap_or(0.0),
            };
            snapshots.push(snapshot);
            history.push(EpochLedger { epoch, ledger });
            prediction = response.prediction;
        }
    }

    if nc == 0 {
        return Err(HarnessError::StaticEnvironment);
    }
    let summary = summarize(&samples, nc)?;

    let origin = config.initial_ledger()?;
    let mut points = vec![OrderPoint {
        time: 0.0,
        tokens_spent_total: origin.tokens_spent_total,
        current_generated_total: origin.current_generated_total,
        prefix_fi: 0.0,
    }];
    points.extend(snapshots.iter().map(Snapshot::order_point));
    let integrals = accumulate_orders(&points)?;

    let generated = ledger
        .current_generated_total
        .checked_sub(origin.current_generated_total)
        .unwrap_or(Current::ZERO);
    let throughput = throughput(generated.to_f64(), state.time)?;
    let order = if history.is_empty() {
        FluidityOrder::First
    } else {
        classify_order(&history)?
    };
    let regime = classify_regime(&integrals, throughput, order, config.epsilon)?;

    Ok(RunLog {
        format_version: LOG_FORMAT_VERSION,
        agent_name: agent.name().to_string(),
        config: config.clone(),
        transitions,
        snapshots,
        samples,
        skipped_transitions: skipped,
        unscored_transitions: unscored,
        summary,
        throughput,
        integrals,
        order,
        regime,
        truncated: truncation.is_some(),
        truncation,
    })
}
