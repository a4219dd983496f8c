use fluidity_core::agents::{
    spawn_external, Agent, AgentDescriptor, AgentError, PredictionRequest,
};
use fluidity_core::environment::{Growth, Observation, TransitionSchedule};
use fluidity_core::harness::{
    replay, run_episode, HarnessError, Location, ScenarioConfig, TruncationReason,
};

fn echo(extra: &[&str]) -> AgentDescriptor {
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/agents/echo_agent.py");
    let mut cmd = vec!["python3".to_string(), script.to_string()];
    cmd.extend(extra.iter().map(|s| s.to_string()));
    AgentDescriptor::external(cmd)
}

fn scenario(agent: AgentDescriptor, transitions: u64) -> ScenarioConfig {
    ScenarioConfig {
        schedule: TransitionSchedule {
            base_rate: transitions,
            growth: Growth::Linear { increment: 0 },
            epochs: 1,
            ..Default::default()
        },
        agent,
        seed: 5,
        ..Default::default()
    }
}

fn request(signal: f64) -> PredictionRequest {
    PredictionRequest {
        observation: Observation {
            signal,
            epoch: 0,
            time: 1.0,
        },
        token_budget: 10,
    }
}

#[test]
fn handshake_and_echo() {
    let mut agent = spawn_external(&echo(&["--name", "parrot"])).unwrap();
    assert_eq!(agent.name(), "parrot");
    let r = agent.predict(&request(4.25)).unwrap();
    assert_eq!((r.prediction, r.tokens_used), (4.25, 1));
}

#[test]
fn descriptor_name_overrides_handshake_name() {
    let mut d = echo(&[]);
    d.name = Some("mine".into());
    assert_eq!(spawn_external(&d).unwrap().name(), "mine");
}

#[test]
fn missing_command_is_unavailable() {
    let d = AgentDescriptor::external(["/nonexistent/agent-binary"]);
    assert!(matches!(
        spawn_external(&d),
        Err(AgentError::AgentUnavailable(_))
    ));
    assert!(matches!(
        run_episode(&scenario(d, 3)),
        Err(HarnessError::Agent(AgentError::AgentUnavailable(_)))
    ));
}

#[test]
fn malformed_handshake_is_protocol_error() {
    assert!(matches!(
        spawn_external(&echo(&["--bad-handshake"])),
        Err(AgentError::ProtocolError(_))
    ));
}

#[test]
fn non_numeric_prediction_is_protocol_error() {
    let mut agent = spawn_external(&echo(&["--garbage-after", "1"])).unwrap();
    assert!(agent.predict(&request(1.0)).is_ok());
    assert!(matches!(
        agent.predict(&request(2.0)),
        Err(AgentError::ProtocolError(_))
    ));
}

#[test]
fn silent_agent_times_out() {
    let mut d = echo(&["--hang-after", "0"]);
    d.timeout_ms = Some(200);
    let mut agent = spawn_external(&d).unwrap();
    let err = agent.predict(&request(1.0)).unwrap_err();
    assert!(
        matches!(err, AgentError::AgentFault(ref m) if m.contains("200 ms")),
        "{err}"
    );
}

#[test]
fn killed_agent_faults() {
    let mut agent = spawn_external(&echo(&[])).unwrap();
    assert!(agent.predict(&request(1.0)).is_ok());
    agent.kill();
    assert!(matches!(
        agent.predict(&request(2.0)),
        Err(AgentError::AgentFault(_))
    ));
}

#[test]
fn echo_episode_tracks_perfectly_and_replays() {
    let log = run_episode(&scenario(echo(&[]), 40)).unwrap();
    assert!(!log.truncated);
    assert_eq!(log.agent_name, "echo");
    assert_eq!(log.snapshots.len(), 40);
    assert_eq!(log.summary.fi_value, 0.0);
    assert_eq!(replay(&log).unwrap(), log);
}

#[test]
fn self_reported_tokens_are_clamped_to_budget() {
    let mut c = scenario(echo(&["--tokens", "7"]), 6);
    c.initial_tokens = 10;
    let log = run_episode(&c).unwrap();
    let used: Vec<u64> = log.snapshots.iter().map(|s| s.tokens_used).collect();
    assert_eq!(used, vec![7, 3]);
    assert_eq!(
        log.truncation.as_ref().unwrap().reason,
        TruncationReason::BudgetExhausted
    );
    assert_eq!(replay(&log).unwrap(), log);
}

#[test]
fn mid_run_death_leaves_a_replayable_prefix() {
    let log = run_episode(&scenario(echo(&["--die-after", "12"]), 30)).unwrap();
    assert!(log.truncated);
    let t = log.truncation.as_ref().unwrap();
    assert_eq!(t.reason, TruncationReason::AgentFault);
    assert_eq!(t.at_transition, 12);
    assert_eq!(log.snapshots.len(), 12);
    assert_eq!(log.transitions.len(), 13);
    assert_eq!(log.samples.len(), 12);
    assert_eq!(log.unscored_transitions, 1);
    assert_eq!(replay(&log).unwrap(), log);

    let mut tampered = log.clone();
    tampered.samples[3].new_prediction += 0.5;
    assert_eq!(replay(&tampered).unwrap_err().location, Location::Sample(3));
}

#[test]
fn protocol_violation_mid_run_truncates() {
    let log = run_episode(&scenario(echo(&["--garbage-after", "4"]), 10)).unwrap();
    let t = log.truncation.as_ref().unwrap();
    assert_eq!(t.reason, TruncationReason::AgentFault);
    assert!(t.detail.contains("protocol error"), "{}", t.detail);
    assert_eq!(log.snapshots.len(), 4);
}
