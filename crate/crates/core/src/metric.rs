//! Accuracy adaptation (AA) and the Fluidity Index (FI).
//!
//! AA compares how far an agent moved its prediction against how far the
//! environment actually moved:
//!
//! ```text
//! AA = 1 - |new_prediction - old_prediction| / env_delta
//! ```
//!
//! `0` is a prediction change that matches the environment change exactly,
//! `1` is no reaction at all and negative values are overcorrection. FI is the
//! sum of AA values divided by the number of environment changes (NC).
//!
//! Because "lower is better" for FI while `-0.5` is as bad as `0.5`, reports
//! also carry a [`responsiveness_score`] in `[0, 1]` where higher is better.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactSum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    /// A transition with zero magnitude has no AA; the caller must skip it.
    #[error("degenerate transition: environment delta is zero")]
    DegenerateTransition,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// FI is undefined for an environment that never changed.
    #[error("no environment changes recorded")]
    NoChangesRecorded,
}

fn finite(name: &str, value: f64) -> Result<f64, MetricError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(MetricError::InvalidInput(format!(
            "{name} is not finite ({value})"
        )))
    }
}

/// Computes `1 - |new - old| / env_delta`.
pub fn accuracy_adaptation(
    old_prediction: f64,
    new_prediction: f64,
    env_delta: f64,
) -> Result<f64, MetricError> {
    finite("old_prediction", old_prediction)?;
    finite("new_prediction", new_prediction)?;
    finite("env_delta", env_delta)?;
    if env_delta == 0.0 {
        return Err(MetricError::DegenerateTransition);
    }
    if env_delta < 0.0 {
        return Err(MetricError::InvalidInput(format!(
            "env_delta must be a magnitude, got {env_delta}"
        )));
    }
    let change = (new_prediction - old_prediction).abs();
    if !change.is_finite() {
        return Err(MetricError::InvalidInput(
            "prediction change overflows".into(),
        ));
    }
    Ok(1.0 - change / env_delta)
}

/// Maps an AA value onto `[0, 1]`, symmetric in under- and overcorrection.
pub fn responsiveness_score(aa_value: f64) -> Result<f64, MetricError> {
    finite("aa_value", aa_value)?;
    Ok((1.0 - aa_value.abs()).max(0.0))
}

/// One scored (old, new) prediction pair against one environment change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationSample {
    pub transition_index: u64,
    pub old_prediction: f64,
    pub new_prediction: f64,
    pub env_delta: f64,
    pub aa_value: f64,
}

impl AdaptationSample {
    pub fn new(
        transition_index: u64,
        old_prediction: f64,
        new_prediction: f64,
        env_delta: f64,
    ) -> Result<Self, MetricError> {
        let aa_value = accuracy_adaptation(old_prediction, new_prediction, env_delta)?;
        Ok(Self {
            transition_index,
            old_prediction,
            new_prediction,
            env_delta,
            aa_value,
        })
    }

    /// A transition the agent did not answer: the prediction stays put.
    pub fn missed(
        transition_index: u64,
        prediction: f64,
        env_delta: f64,
    ) -> Result<Self, MetricError> {
        Self::new(transition_index, prediction, prediction, env_delta)
    }

    /// True when `aa_value` is exactly what the other fields produce.
    pub fn is_consistent(&self) -> bool {
        matches!(
            accuracy_adaptation(self.old_prediction, self.new_prediction, self.env_delta),
            Ok(aa) if aa.to_bits() == self.aa_value.to_bits()
        )
    }
}

/// `sum(aa_value) / nc`, computed with one correct rounding. An empty sample
/// list over a changing environment is 0.
pub fn fluidity_index(samples: &[AdaptationSample], nc: u64) -> Result<f64, MetricError> {
    if nc == 0 {
        return Err(MetricError::NoChangesRecorded);
    }
    if (samples.len() as u64) > nc {
        return Err(MetricError::InvalidInput(format!(
            "{} samples exceed {nc} recorded changes",
            samples.len()
        )));
    }
    let mut sum = ExactSum::new();
    for s in samples {
        sum.add(finite("aa_value", s.aa_value)?);
    }
    Ok(sum.mean(nc).expect("nc checked non-zero"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiSummary {
    pub fi_value: f64,
    pub nc: u64,
    pub sample_count: u64,
    pub mean_responsiveness: f64,
    /// `None` when there are no samples.
    pub min_aa: Option<f64>,
    pub max_aa: Option<f64>,
}

pub fn summarize(samples: &[AdaptationSample], nc: u64) -> Result<FiSummary, MetricError> {
    let fi_value = fluidity_index(samples, nc)?;
    let mut responsiveness_sum = ExactSum::new();
    let mut min_aa: Option<f64> = None;
    let mut max_aa: Option<f64> = None;
    for s in samples {
        responsiveness_sum.add(responsiveness_score(s.aa_value)?);
        min_aa = Some(min_aa.map_or(s.aa_value, |m| m.min(s.aa_value)));
        max_aa = Some(max_aa.map_or(s.aa_value, |m| m.max(s.aa_value)));
    }
    let mean_responsiveness = responsiveness_sum.mean(samples.len() as u64).unwrap_or(0.0);
    Ok(FiSummary {
        fi_value,
        nc,
        sample_count: samples.len() as u64,
        mean_responsiveness,
        min_aa,
        max_aa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn samples(values: &[f64]) -> Vec<AdaptationSample> {
        values
            .iter()
            .enumerate()
            .map(|(i, &aa)| AdaptationSample {
                transition_index: i as u64,
                old_prediction: 0.0,
                new_prediction: 0.0,
                env_delta: 1.0,
                aa_value: aa,
            })
            .collect()
    }

    #[test]
    fn aa_edge_semantics() {
        assert_eq!(accuracy_adaptation(2.0, 5.0, 3.0), Ok(0.0));
        assert_eq!(accuracy_adaptation(7.0, 7.0, 4.0), Ok(1.0));
        assert_eq!(accuracy_adaptation(10.0, 16.0, 4.0), Ok(-0.5));
    }

    #[test]
    fn aa_rejects_bad_denominators() {
        assert_eq!(
            accuracy_adaptation(1.0, 2.0, 0.0),
            Err(MetricError::DegenerateTransition)
        );
        assert!(matches!(
            accuracy_adaptation(1.0, 2.0, -1.0),
            Err(MetricError::InvalidInput(_))
        ));
        assert!(matches!(
            accuracy_adaptation(f64::NAN, 2.0, 1.0),
            Err(MetricError::InvalidInput(_))
        ));
        assert!(matches!(
            accuracy_adaptation(1.0, f64::INFINITY, 1.0),
            Err(MetricError::InvalidInput(_))
        ));
    }

    #[test]
    fn fi_examples() {
        assert_eq!(fluidity_index(&samples(&[0.0, 0.0, 0.0]), 3), Ok(0.0));
        assert_eq!(fluidity_index(&samples(&[1.0, 1.0]), 2), Ok(1.0));
        assert_eq!(
            fluidity_index(&samples(&[0.5, -0.5, 1.0]), 3),
            Ok(1.0 / 3.0)
        );
        assert_eq!(fluidity_index(&samples(&[0.1, 0.1, 0.1]), 3), Ok(0.1));
        assert_eq!(fluidity_index(&[], 4), Ok(0.0));
        assert_eq!(fluidity_index(&[], 0), Err(MetricError::NoChangesRecorded));
        assert!(fluidity_index(&samples(&[0.0, 0.0]), 1).is_err());
    }

    #[test]
    fn responsiveness_examples() {
        assert_eq!(responsiveness_score(0.0), Ok(1.0));
        assert_eq!(responsiveness_score(1.0), Ok(0.0));
        assert_eq!(responsiveness_score(-0.5), Ok(0.5));
        assert_eq!(responsiveness_score(-3.0), Ok(0.0));
        assert!(responsiveness_score(f64::NAN).is_err());
    }

    #[test]
    fn summarize_examples() {
        let empty = summarize(&[], 5).unwrap();
        assert_eq!(empty.fi_value, 0.0);
        assert_eq!(empty.mean_responsiveness, 0.0);
        assert_eq!(empty.sample_count, 0);
        assert_eq!(empty.min_aa, None);

        let aligned = summarize(&samples(&[0.0, 0.0]), 2).unwrap();
        assert_eq!(aligned.fi_value, 0.0);
        assert_eq!(aligned.mean_responsiveness, 1.0);

        // fi == 0 while tracking is terrible: one static, one doubled response.
        let cancelling = summarize(&samples(&[1.0, -1.0]), 2).unwrap();
        assert_eq!(cancelling.fi_value, 0.0);
        assert_eq!(cancelling.mean_responsiveness, 0.0);
        assert_eq!(cancelling.min_aa, Some(-1.0));
        assert_eq!(cancelling.max_aa, Some(1.0));

        assert_eq!(summarize(&[], 0), Err(MetricError::NoChangesRecorded));
    }

    #[test]
    fn sample_consistency() {
        let mut s = AdaptationSample::new(3, 1.0, 4.0, 2.0).unwrap();
        assert_eq!(s.aa_value, -0.5);
        assert!(s.is_consistent());
        s.aa_value = -0.4999999;
        assert!(!s.is_consistent());
        assert_eq!(AdaptationSample::missed(0, 9.0, 3.0).unwrap().aa_value, 1.0);
    }

    proptest! {
        #[test]
        fn translation_invariance(
            old in -1e3f64..1e3, new in -1e3f64..1e3, delta in 1e-3f64..1e3, c in -1e3f64..1e3
        ) {
            // Exact when the shifted difference is representable; check on integers.
            let (old, new, c) = (old.round(), new.round(), c.round());
            prop_assert_eq!(
                accuracy_adaptation(old + c, new + c, delta).unwrap(),
                accuracy_adaptation(old, new, delta).unwrap()
            );
        }

        #[test]
        fn bounded_above_and_one_iff_unchanged(
            old in -1e6f64..1e6, new in -1e6f64..1e6, delta in 1e-6f64..1e6
        ) {
            let aa = accuracy_adaptation(old, new, delta).unwrap();
            prop_assert!(aa <= 1.0);
            prop_assert_eq!(aa == 1.0, (new - old).abs() / delta == 0.0);
        }

        #[test]
        fn identical_samples_average_exactly(aa in -10.0f64..1.0, n in 1usize..64) {
            let s = samples(&vec![aa; n]);
            prop_assert_eq!(fluidity_index(&s, n as u64).unwrap(), aa);
        }

        #[test]
        fn fi_is_linear_in_samples(
            a in proptest::collection::vec(-2.0f64..1.0, 0..20),
            b in proptest::collection::vec(-2.0f64..1.0, 0..20),
            extra_a in 0u64..5, extra_b in 0u64..5,
        ) {
            let nc_a = a.len() as u64 + extra_a + 1;
            let nc_b = b.len() as u64 + extra_b + 1;
            let sa = samples(&a);
            let sb = samples(&b);
            let joined: Vec<_> = sa.iter().chain(sb.iter()).copied().collect();
            let whole = fluidity_index(&joined, nc_a + nc_b).unwrap();
            let parts = (nc_a as f64 * fluidity_index(&sa, nc_a).unwrap()
                + nc_b as f64 * fluidity_index(&sb, nc_b).unwrap())
                / (nc_a + nc_b) as f64;
            prop_assert!((whole - parts).abs() <= 1e-12);
        }
    }
}
