//! Group-relative advantages over a group of trajectory rewards.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("advantage group is empty")]
pub struct EmptyGroup;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageGroup {
    pub rewards: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub advantages: Vec<f64>,
}

impl AdvantageGroup {
    pub fn compute(rewards: &[f64], sigma_eps: f64) -> Result<Self, EmptyGroup> {
        if rewards.is_empty() {
            return Err(EmptyGroup);
        }
        let n = rewards.len() as f64;
        let mean = rewards.iter().sum::<f64>() / n;
        let std = (rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt();
        let advantages = if std <= sigma_eps {
            vec![0.0; rewards.len()]
        } else {
            rewards.iter().map(|r| (r - mean) / std).collect()
        };
        Ok(AdvantageGroup {
            rewards: rewards.to_vec(),
            mean,
            std,
            advantages,
        })
    }
}

/// (R_i − μ) / σ, or all zeros when σ ≤ `sigma_eps`.
pub fn group_advantages(rewards: &[f64], sigma_eps: f64) -> Result<Vec<f64>, EmptyGroup> {
    AdvantageGroup::compute(rewards, sigma_eps).map(|g| g.advantages)
}
