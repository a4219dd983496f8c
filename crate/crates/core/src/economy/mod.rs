//! Token/current economy: the ledger, throughput, the discrete order
//! accumulators and the order and regime classifiers.

mod fixed;
mod ledger;
mod orders;

use thiserror::Error;

pub use fixed::{Current, SCALE};
pub use ledger::ResourceLedger;
pub use orders::{
    accumulate_orders, classify_order, classify_regime, second_order_holds, third_order_holds,
    throughput, EpochLedger, FluidityOrder, FluidityRegime, OrderIntegrals, OrderPoint,
    DEFAULT_EPSILON,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EconomyError {
    #[error("token budget exhausted: requested {requested}, available {available}")]
    BudgetExhausted { requested: u64, available: u64 },
    #[error("current exhausted: need {required}, reserve holds {reserve}")]
    CurrentExhausted { required: Current, reserve: Current },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("time interval is zero")]
    ZeroInterval,
    #[error("time interval is negative: {0}")]
    InvalidInterval(f64),
    #[error("sequence error at position {position}: {detail}")]
    SequenceError { position: usize, detail: String },
    #[error("arithmetic overflow in ledger")]
    Overflow,
}
