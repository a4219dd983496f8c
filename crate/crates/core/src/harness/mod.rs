//! The closed loop: schedule transitions, query the agent, charge the ledger,
//! snapshot every token-spending action, score and classify. Logs replay
//! bit-exactly.

mod batch;
mod config;
mod episode;
mod replay;

use thiserror::Error;

use crate::agents::AgentError;
use crate::economy::EconomyError;
use crate::environment::EnvError;
use crate::metric::MetricError;

#[cfg(feature = "parallel")]
pub use batch::batch_parallel;
pub use batch::{batch, batch_sequential, EpisodeResult};
pub use config::ScenarioConfig;
pub use episode::{
    run_episode, run_episode_with_agent, RunLog, Snapshot, Truncation, TruncationReason,
    LOG_FORMAT_VERSION,
};
pub use replay::{replay, IntegrityError, Location};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Environment(#[from] EnvError),
    #[error(transparent)]
    Economy(#[from] EconomyError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("the environment never changed; FI is undefined")]
    StaticEnvironment,
    #[error("parallelism must be at least 1")]
    InvalidParallelism,
}
