use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::protocol::{Inbound, Outbound, PROTOCOL_VERSION};
use super::{Agent, AgentDescriptor, AgentError, PredictionRequest, PredictionResponse};
use crate::environment::Observation;

pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;

/// A model process driven over stdin/stdout, one request in flight at a time.
///
/// Responses are read on a helper thread so every wait can time out.
pub struct ExternalAgent {
    name: String,
    cost: u64,
    timeout: Duration,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
}

/// Spawns the descriptor's command and performs the handshake.
pub fn spawn_external(descriptor: &AgentDescriptor) -> Result<ExternalAgent, AgentError> {
    descriptor.validate()?;
    let command = descriptor
        .command
        .as_ref()
        .ok_or_else(|| AgentError::InvalidDescriptor("missing command".into()))?;
    let mut child = Command::new(&command[0])
        .args(&command[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| AgentError::AgentUnavailable(format!("cannot spawn {:?}: {e}", command[0])))?;

    let stdout = child.stdout.take().expect("stdout is piped");
    let stdin = child.stdin.take().expect("stdin is piped");
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            let failed = line.is_err();
            if tx.send(line).is_err() || failed {
                break;
            }
        }
    });

    let mut agent = ExternalAgent {
        name: descriptor.display_name(),
        cost: descriptor.token_cost(),
        timeout: Duration::from_millis(descriptor.timeout_ms()),
        child,
        stdin: Some(stdin),
        lines: rx,
    };
    agent.handshake(descriptor.name.is_none())?;
    Ok(agent)
}

impl ExternalAgent {
    fn handshake(&mut self, adopt_name: bool) -> Result<(), AgentError> {
        let unavailable = |e: AgentError| match e {
            AgentError::AgentFault(msg) => {
                AgentError::AgentUnavailable(format!("during handshake: {msg}"))
            }
            other => other,
        };
        self.send(&Outbound::Hello {
            protocol: PROTOCOL_VERSION,
        })
        .map_err(unavailable)?;
        match self.receive().map_err(unavailable)? {
            Inbound::Ready { name } => {
                if adopt_name && !name.is_empty() {
                    self.name = name;
                }
                Ok(())
            }
            other => Err(AgentError::ProtocolError(format!(
                "expected ready, got {other:?}"
            ))),
        }
    }

    fn send(&mut self, msg: &Outbound) -> Result<(), AgentError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| AgentError::AgentFault("agent input already closed".into()))?;
        stdin
            .write_all(msg.to_line().as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| AgentError::AgentFault(format!("write failed: {e}")))
    }

    fn receive(&mut self) -> Result<Inbound, AgentError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Inbound::parse(&line),
            Ok(Err(e)) => Err(AgentError::AgentFault(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(AgentError::AgentFault(format!(
                "no response within {} ms",
                self.timeout.as_millis()
            ))),
            Err(RecvTimeoutError::Disconnected) => {
                let status = self
                    .child
                    .try_wait()
                    .ok()
                    .flatten()
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| "output closed".into());
                Err(AgentError::AgentFault(format!("agent exited ({status})")))
            }
        }
    }

    /// OS process id, for supervision and tests.
    pub fn pid(&self) -> u32 {
        self.child.id()
    }

    /// Kills the process immediately.
    pub fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Agent for ExternalAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn start(&mut self, _initial: &Observation, _initial_prediction: f64) {}

    fn predict(&mut self, request: &PredictionRequest) -> Result<PredictionResponse, AgentError> {
        super::check_budget(request, self.cost)?;
        let obs = &request.observation;
        self.send(&Outbound::Predict {
            signal: obs.signal,
            epoch: obs.epoch,
            time: obs.time,
            budget: request.token_budget,
        })?;
        match self.receive()? {
            Inbound::Prediction { value, tokens_used } => {
                if tokens_used == 0 {
                    return Err(AgentError::ProtocolError(
                        "tokens_used must be at least 1".into(),
                    ));
                }
                Ok(PredictionResponse {
                    prediction: value,
                    tokens_used,
                })
            }
            other => Err(AgentError::ProtocolError(format!(
                "expected prediction, got {other:?}"
            ))),
        }
    }

    fn token_cost(&self) -> u64 {
        self.cost
    }
}

impl Drop for ExternalAgent {
    fn drop(&mut self) {
        let _ = self.send(&Outbound::Bye);
        // Closing stdin is the second hint to exit.
        self.stdin.take();
        let deadline = Instant::now() + Duration::from_millis(500);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(10));
        }
        self.kill();
    }
}
