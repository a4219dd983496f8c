//! Closed-loop evaluation of prediction agents with the Fluidity Index.
//!
//! An [`environment`] moves a scalar signal at an increasing rate; an
//! [`agents`] implementation predicts it; the [`harness`] scores every
//! prediction change against the environment change with [`metric`], runs a
//! token/current ledger from [`economy`], and writes a replayable [`RunLog`].
//! [`report`] turns logs into ranked tables and plot series.

pub mod agents;
pub mod economy;
pub mod environment;
pub mod exact;
pub mod harness;
pub mod metric;
pub mod report;
pub mod rng;

pub use harness::{replay, run_episode, RunLog, ScenarioConfig};
