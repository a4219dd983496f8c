use std::collections::VecDeque;

use super::{check_budget, Agent, AgentError, PredictionRequest, PredictionResponse};
use crate::environment::Observation;
use crate::rng::{CounterRng, AGENT_STREAM};

/// Keeps its initial prediction forever. AA is 1 on every change.
#[derive(Debug, Clone)]
pub struct StaticAgent {
    name: String,
    cost: u64,
    prediction: f64,
}

impl StaticAgent {
    pub fn new(name: impl Into<String>, cost: u64) -> Self {
        Self {
            name: name.into(),
            cost,
            prediction: 0.0,
        }
    }
}

impl Agent for StaticAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn start(&mut self, _initial: &Observation, initial_prediction: f64) {
        self.prediction = initial_prediction;
    }

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError> {
        check_budget(request, self.cost)?;
        Ok(PredictionResponse {
            prediction: self.prediction,
            tokens_used: self.cost,
        })
    }

    fn token_cost(&self) -> u64 {
        self.cost
    }
}

/// `prediction += gain * (observed - previously observed)`; AA is `1 - |gain|`
/// on every change.
#[derive(Debug, Clone)]
pub struct ProportionalAgent {
    name: String,
    cost: u64,
    gain: f64,
    prediction: f64,
    last_signal: f64,
}

impl ProportionalAgent {
    pub fn new(name: impl Into<String>, gain: f64, cost: u64) -> Self {
        Self {
            name: name.into(),
            cost,
            gain,
            prediction: 0.0,
            last_signal: 0.0,
        }
    }
}

impl Agent for ProportionalAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn start(&mut self, initial: &Observation, initial_prediction: f64) {
        self.prediction = initial_prediction;
        self.last_signal = initial.signal;
    }

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError> {
        check_budget(request, self.cost)?;
        let signal = request.observation.signal;
        self.prediction += self.gain * (signal - self.last_signal);
        self.last_signal = signal;
        Ok(PredictionResponse {
            prediction: self.prediction,
            tokens_used: self.cost,
        })
    }

    fn token_cost(&self) -> u64 {
        self.cost
    }
}

/// Predicts the signal it observed `lag` calls ago (the initial signal until
/// that much history exists). On a constant-delta stream AA is 1 for the first
/// `lag` changes and 0 afterwards.
#[derive(Debug, Clone)]
pub struct LaggedAgent {
    name: String,
    cost: u64,
    lag: usize,
    history: VecDeque<f64>,
}

impl LaggedAgent {
    pub fn new(name: impl Into<String>, lag: u32, cost: u64) -> Self {
        Self {
            name: name.into(),
            cost,
            lag: lag.max(1) as usize,
            history: VecDeque::new(),
        }
    }
}

impl Agent for LaggedAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn start(&mut self, initial: &Observation, _initial_prediction: f64) {
        self.history.clear();
        self.history.push_back(initial.signal);
    }

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError> {
        check_budget(request, self.cost)?;
        self.history.push_back(request.observation.signal);
        while self.history.len() > self.lag + 1 {
            self.history.pop_front();
        }
        // Front is `lag` calls back, or the initial signal while warming up.
        Ok(PredictionResponse {
            prediction: self.history[0],
            tokens_used: self.cost,
        })
    }

    fn token_cost(&self) -> u64 {
        self.cost
    }
}

/// Tracks the observed signal plus uniform noise in `[-scale, scale)`, drawn
/// from the agent stream keyed by call number.
#[derive(Debug, Clone)]
pub struct NoisyAgent {
    name: String,
    cost: u64,
    scale: f64,
    rng: CounterRng,
    calls: u64,
}

impl NoisyAgent {
    pub fn new(name: impl Into<String>, scale: f64, seed: u64, cost: u64) -> Self {
        Self {
            name: name.into(),
            cost,
            scale,
            rng: CounterRng::new(seed, AGENT_STREAM),
            calls: 0,
        }
    }
}

impl Agent for NoisyAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn start(&mut self, _initial: &Observation, _initial_prediction: f64) {
        self.calls = 0;
    }

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError> {
        check_budget(request, self.cost)?;
        let noise = self.scale * (2.0 * self.rng.unit(self.calls, 0) - 1.0);
        self.calls += 1;
        Ok(PredictionResponse {
            prediction: request.observation.signal + noise,
            tokens_used: self.cost,
        })
    }

    fn token_cost(&self) -> u64 {
        self.cost
    }
}

/// Plays back recorded responses; used to re-derive metrics from a log whose
/// agent cannot be rerun.
#[derive(Debug, Clone)]
pub struct ScriptedAgent {
    name: String,
    cost: u64,
    responses: Vec<PredictionResponse>,
    /// Returned once the recorded responses run out.
    final_error: Option<String>,
    next: usize,
}

impl ScriptedAgent {
    pub fn new(
        name: impl Into<String>,
        cost: u64,
        responses: Vec<PredictionResponse>,
        final_error: Option<String>,
    ) -> Self {
        Self {
            name: name.into(),
            cost,
            responses,
            final_error,
            next: 0,
        }
    }
}

impl Agent for ScriptedAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn start(&mut self, _initial: &Observation, _initial_prediction: f64) {
        self.next = 0;
    }

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError> {
        check_budget(request, self.cost)?;
        match self.responses.get(self.next) {
            Some(r) => {
                self.next += 1;
                Ok(*r)
            }
            None => Err(AgentError::Recorded(
                self.final_error
                    .clone()
                    .unwrap_or_else(|| "recorded responses exhausted".into()),
            )),
        }
    }

    fn token_cost(&self) -> u64 {
        self.cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(signal: f64) -> Observation {
        Observation {
            signal,
            epoch: 0,
            time: 0.0,
        }
    }

    fn ask(agent: &mut dyn Agent, signal: f64) -> PredictionResponse {
        agent
            .predict(&PredictionRequest {
                observation: obs(signal),
                token_budget: 10,
            })
            .unwrap()
    }

    #[test]
    fn static_agent_holds_still() {
        let mut a = StaticAgent::new("s", 1);
        a.start(&obs(3.0), 3.0);
        for s in [5.0, -2.0, 100.0] {
            assert_eq!(
                ask(&mut a, s),
                PredictionResponse {
                    prediction: 3.0,
                    tokens_used: 1
                }
            );
        }
    }

    #[test]
    fn proportional_moves_by_gain_times_change() {
        let mut a = ProportionalAgent::new("p", 1.0, 1);
        a.start(&obs(10.0), 10.0);
        assert_eq!(ask(&mut a, 13.0).prediction, 13.0);
        assert_eq!(ask(&mut a, 9.0).prediction, 9.0);

        let mut over = ProportionalAgent::new("o", 1.5, 1);
        over.start(&obs(0.0), 0.0);
        assert_eq!(ask(&mut over, 4.0).prediction, 6.0);
    }

    #[test]
    fn lagged_agent_trails_by_lag() {
        let mut a = LaggedAgent::new("l", 2, 1);
        a.start(&obs(0.0), 0.0);
        let preds: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 5.0]
            .iter()
            .map(|&s| ask(&mut a, s).prediction)
            .collect();
        assert_eq!(preds, vec![0.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn noisy_agent_is_seeded_and_bounded() {
        let run = |seed| {
            let mut a = NoisyAgent::new("n", 0.5, seed, 1);
            a.start(&obs(0.0), 0.0);
            (0..50)
                .map(|i| ask(&mut a, i as f64).prediction)
                .collect::<Vec<_>>()
        };
        let a = run(4);
        assert_eq!(a, run(4));
        assert_ne!(a, run(5));
        for (i, p) in a.iter().enumerate() {
            assert!((p - i as f64).abs() <= 0.5);
        }
    }

    #[test]
    fn budget_is_checked() {
        let mut a = StaticAgent::new("s", 2);
        a.start(&obs(0.0), 0.0);
        let err = a
            .predict(&PredictionRequest {
                observation: obs(1.0),
                token_budget: 1,
            })
            .unwrap_err();
        assert_eq!(
            err,
            AgentError::BudgetExhausted {
                required: 2,
                budget: 1
            }
        );
    }

    #[test]
    fn scripted_agent_plays_back_then_fails() {
        let r = PredictionResponse {
            prediction: 2.0,
            tokens_used: 3,
        };
        let mut a = ScriptedAgent::new("x", 1, vec![r], Some("agent fault: gone".into()));
        a.start(&obs(0.0), 0.0);
        assert_eq!(ask(&mut a, 1.0), r);
        let err = a
            .predict(&PredictionRequest {
                observation: obs(1.0),
                token_budget: 5,
            })
            .unwrap_err();
        assert_eq!(err.to_string(), "agent fault: gone");
    }
}
