use serde::{Deserialize, Serialize};

use super::fixed::Current;
use super::ledger::ResourceLedger;
use super::EconomyError;

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Rate of current over time.
pub fn throughput(delta_current: f64, delta_time: f64) -> Result<f64, EconomyError> {
    if !delta_current.is_finite() || !delta_time.is_finite() {
        return Err(EconomyError::InvalidInput(
            "throughput inputs must be finite".into(),
        ));
    }
    if delta_time == 0.0 {
        return Err(EconomyError::ZeroInterval);
    }
    if delta_time < 0.0 {
        return Err(EconomyError::InvalidInterval(delta_time));
    }
    Ok(delta_current / delta_time)
}

/// The parts of a snapshot the order accumulators read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderPoint {
    pub time: f64,
    pub tokens_spent_total: u64,
    pub current_generated_total: Current,
    pub prefix_fi: f64,
}

/// Discrete first, second and third order accumulations of FI.
///
/// Between consecutive points `k-1` and `k`:
///
/// ```text
/// i1 += FI_k * dcurrent
/// i2 += FI_k * dtokens * dcurrent
/// i3 += FI_k * dtokens * dcurrent * dtime
/// ```
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OrderIntegrals {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl OrderIntegrals {
    pub fn select(&self, order: FluidityOrder) -> f64 {
        match order {
            FluidityOrder::First => self.i1,
            FluidityOrder::Second => self.i2,
            FluidityOrder::Third => self.i3,
        }
    }
}

pub fn accumulate_orders(points: &[OrderPoint]) -> Result<OrderIntegrals, EconomyError> {
    let mut acc = OrderIntegrals::default();
    for (k, pair) in points.windows(2).enumerate() {
        let (prev, cur) = (&pair[0], &pair[1]);
        let position = k + 1;
        if cur.time.is_nan() || prev.time.is_nan() || cur.time < prev.time {
            return Err(EconomyError::SequenceError {
                position,
                detail: format!("time {} precedes {}", cur.time, prev.time),
            });
        }
        if cur.tokens_spent_total < prev.tokens_spent_total
            || cur.current_generated_total < prev.current_generated_total
        {
            return Err(EconomyError::SequenceError {
                position,
                detail: "ledger totals decreased".into(),
            });
        }
        let d_current = cur
            .current_generated_total
            .checked_sub(prev.current_generated_total)
            .ok_or(EconomyError::Overflow)?
            .to_f64();
        let d_tokens = (cur.tokens_spent_total - prev.tokens_spent_total) as f64;
        let d_time = cur.time - prev.time;
        let fi = cur.prefix_fi;
        acc.i1 += fi * d_current;
        acc.i2 += fi * d_tokens * d_current;
        acc.i3 += fi * d_tokens * d_current * d_time;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FluidityOrder {
    /// Runs on external funding.
    First,
    /// Generates at least as much current as it consumes.
    Second,
    /// Self-replenishing and growing its reserve across epochs.
    Third,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FluidityRegime {
    SubOptimal,
    Optimal,
    BeyondOptimal,
}

impl std::fmt::Display for FluidityOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FluidityOrder::First => "first",
            FluidityOrder::Second => "second",
            FluidityOrder::Third => "third",
        })
    }
}

impl std::fmt::Display for FluidityRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FluidityRegime::SubOptimal => "sub_optimal",
            FluidityRegime::Optimal => "optimal",
            FluidityRegime::BeyondOptimal => "beyond_optimal",
        })
    }
}

/// Compares the accumulator for `order` against throughput `t`, with an
/// equality band of `epsilon * max(|t|, 1)`.
pub fn classify_regime(
    integrals: &OrderIntegrals,
    t: f64,
    order: FluidityOrder,
    epsilon: f64,
) -> Result<FluidityRegime, EconomyError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(EconomyError::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let v = integrals.select(order);
    if !t.is_finite() || !v.is_finite() {
        return Err(EconomyError::InvalidInput(
            "regime inputs must be finite".into(),
        ));
    }
    let band = epsilon * t.abs().max(1.0);
    Ok(if (v - t).abs() <= band {
        FluidityRegime::Optimal
    } else if v > t {
        FluidityRegime::BeyondOptimal
    } else {
        FluidityRegime::SubOptimal
    })
}

/// A ledger snapshot tagged with the epoch it was taken in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLedger {
    pub epoch: u32,
    pub ledger: ResourceLedger,
}

/// Generated current covers consumed current, and something was generated.
pub fn second_order_holds(history: &[EpochLedger]) -> bool {
    match history.last() {
        Some(last) => {
            let l = &last.ledger;
            l.current_generated_total > Current::ZERO
                && l.current_generated_total >= l.current_consumed_total
        }
        None => false,
    }
}

/// Reserve at the end of each epoch, in epoch order.
fn epoch_end_reserves(history: &[EpochLedger]) -> Vec<Current> {
    let mut ends: Vec<(u32, Current)> = Vec::new();
    for entry in history {
        match ends.last_mut() {
            Some((epoch, reserve)) if *epoch == entry.epoch => *reserve = entry.ledger.reserve,
            _ => ends.push((entry.epoch, entry.ledger.reserve)),
        }
    }
    ends.into_iter().map(|(_, r)| r).collect()
}

/// Second order holds and the reserve rose across two consecutive epoch
/// boundaries.
pub fn third_order_holds(history: &[EpochLedger]) -> bool {
    second_order_holds(history)
        && epoch_end_reserves(history)
            .windows(3)
            .any(|w| w[0] < w[1] && w[1] < w[2])
}

pub fn classify_order(history: &[EpochLedger]) -> Result<FluidityOrder, EconomyError> {
    if history.is_empty() {
        return Err(EconomyError::InvalidInput("ledger history is empty".into()));
    }
    if let Some(pos) = history.windows(2).position(|w| w[1].epoch < w[0].epoch) {
        return Err(EconomyError::SequenceError {
            position: pos + 1,
            detail: "epochs out of order".into(),
        });
    }
    Ok(if third_order_holds(history) {
        FluidityOrder::Third
    } else if second_order_holds(history) {
        FluidityOrder::Second
    } else {
        FluidityOrder::First
    })
}
