use serde::{Deserialize, Serialize};

use super::fixed::Current;
use super::EconomyError;

/// Token and current balances for one episode.
///
/// Every operation returns a new ledger; totals only ever grow and
/// `reserve == external_funding_total + current_generated_total - current_consumed_total`
/// holds exactly after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub tokens_available: u64,
    pub tokens_spent_total: u64,
    pub current_generated_total: Current,
    pub current_consumed_total: Current,
    pub reserve: Current,
    pub external_funding_total: Current,
    /// Current produced per unit of work.
    pub conversion_rate: Current,
    /// Current consumed per inferred token.
    pub inference_cost_rate: Current,
}

fn positive_rate(name: &str, value: f64) -> Result<Current, EconomyError> {
    match Current::from_f64(value) {
        Some(c) if c > Current::ZERO => Ok(c),
        _ => Err(EconomyError::InvalidInput(format!(
            "{name} must be a positive amount of at least one micro-unit, got {value}"
        ))),
    }
}

impl ResourceLedger {
    pub fn new(
        tokens_available: u64,
        initial_funding: f64,
        conversion_rate: f64,
        inference_cost_rate: f64,
    ) -> Result<Self, EconomyError> {
        let funding = match Current::from_f64(initial_funding) {
            Some(c) if !c.is_negative() => c,
            _ => {
                return Err(EconomyError::InvalidInput(format!(
                    "initial funding must be finite and non-negative, got {initial_funding}"
                )))
            }
        };
        Ok(Self {
            tokens_available,
            tokens_spent_total: 0,
            current_generated_total: Current::ZERO,
            current_consumed_total: Current::ZERO,
            reserve: funding,
            external_funding_total: funding,
            conversion_rate: positive_rate("conversion_rate", conversion_rate)?,
            inference_cost_rate: positive_rate("inference_cost_rate", inference_cost_rate)?,
        })
    }

    pub fn is_conserved(&self) -> bool {
        self.external_funding_total
            .checked_add(self.current_generated_total)
            .and_then(|c| c.checked_sub(self.current_consumed_total))
            == Some(self.reserve)
    }

    /// Largest token charge that neither budget nor reserve would refuse.
    pub fn affordable_tokens(&self) -> u64 {
        self.tokens_available
            .min(self.reserve.whole_units_of(self.inference_cost_rate))
    }

    /// Spends `tokens` on inference.
    pub fn charge_inference(&self, tokens: u64) -> Result<Self, EconomyError> {
        if tokens > self.tokens_available {
            return Err(EconomyError::BudgetExhausted {
                requested: tokens,
                available: self.tokens_available,
            });
        }
        let cost = self
            .inference_cost_rate
            .checked_mul_count(tokens)
            .ok_or(EconomyError::Overflow)?;
        if cost > self.reserve {
            return Err(EconomyError::CurrentExhausted {
                required: cost,
                reserve: self.reserve,
            });
        }
        Ok(Self {
            tokens_available: self.tokens_available - tokens,
            tokens_spent_total: self
                .tokens_spent_total
                .checked_add(tokens)
                .ok_or(EconomyError::Overflow)?,
            current_consumed_total: self
                .current_consumed_total
                .checked_add(cost)
                .ok_or(EconomyError::Overflow)?,
            reserve: self
                .reserve
                .checked_sub(cost)
                .ok_or(EconomyError::Overflow)?,
            ..*self
        })
    }

    /// Credits `work_value * conversion_rate` of generated current. With
    /// `auto_repurchase`, the new current also unlocks as many whole tokens as
    /// it would pay for at the inference cost rate.
    pub fn settle_replenishment(
        &self,
        work_value: f64,
        auto_repurchase: bool,
    ) -> Result<Self, EconomyError> {
        if !work_value.is_finite() || work_value < 0.0 {
            return Err(EconomyError::InvalidInput(format!(
                "work value must be finite and non-negative, got {work_value}"
            )));
        }
        let generated = Current::from_f64(work_value * self.conversion_rate.to_f64())
            .ok_or(EconomyError::Overflow)?;
        let tokens_available = if auto_repurchase {
            self.tokens_available
                .checked_add(generated.whole_units_of(self.inference_cost_rate))
                .ok_or(EconomyError::Overflow)?
        } else {
            self.tokens_available
        };
        Ok(Self {
            tokens_available,
            current_generated_total: self
                .current_generated_total
                .checked_add(generated)
                .ok_or(EconomyError::Overflow)?,
            reserve: self
                .reserve
                .checked_add(generated)
                .ok_or(EconomyError::Overflow)?,
            ..*self
        })
    }

    /// Adds outside money to the reserve.
    pub fn fund(&self, amount: Current) -> Result<Self, EconomyError> {
        if amount.is_negative() {
            return Err(EconomyError::InvalidInput(
                "funding must be non-negative".into(),
            ));
        }
        Ok(Self {
            external_funding_total: self
                .external_funding_total
                .checked_add(amount)
                .ok_or(EconomyError::Overflow)?,
            reserve: self
                .reserve
                .checked_add(amount)
                .ok_or(EconomyError::Overflow)?,
            ..*self
        })
    }
}
