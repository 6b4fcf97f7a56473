use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use mist_core::reward::{QualityTable, RewardConfig};
use serde::{Deserialize, Serialize};

/// Flat on-disk configuration. Every key is optional; missing keys take the
/// defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: f64,
    pub beta: f64,
    pub rho_base: f64,
    pub gamma: f64,
    pub k_max: u32,
    pub r_fail_suite: f64,
    pub r_fail_method: f64,
    pub pool_scaling: bool,
    pub truncate_on_failure: bool,
    pub quality_cap: f64,
    pub sigma_eps: f64,
    pub quality_strict_equality: f64,
    pub quality_exception: f64,
    pub quality_approximate: f64,
    pub quality_membership: f64,
    pub quality_truth: f64,
    pub timeout_s: f64,
    /// 0 means one worker per logical CPU.
    pub workers: usize,
}

impl Default for FileConfig {
    fn default() -> Self {
        let r = RewardConfig::default();
        FileConfig {
            alpha: r.alpha,
            beta: r.beta,
            rho_base: r.rho_base,
            gamma: r.gamma,
            k_max: r.k_max,
            r_fail_suite: r.r_fail_suite,
            r_fail_method: r.r_fail_method,
            pool_scaling: r.pool_scaling,
            truncate_on_failure: r.truncate_on_failure,
            quality_cap: r.quality_cap,
            sigma_eps: r.sigma_eps,
            quality_strict_equality: r.quality.strict_equality,
            quality_exception: r.quality.exception,
            quality_approximate: r.quality.approximate,
            quality_membership: r.quality.membership,
            quality_truth: r.quality.truth,
            timeout_s: 5.0,
            workers: 0,
        }
    }
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => FileConfig::default(),
        };
        if let Ok(v) = std::env::var("MIST_WORKERS") {
            cfg.workers = v.trim().parse().with_context(|| format!("MIST_WORKERS={v:?}"))?;
        }
        if let Ok(v) = std::env::var("MIST_TIMEOUT_S") {
            cfg.timeout_s = v.trim().parse().with_context(|| format!("MIST_TIMEOUT_S={v:?}"))?;
        }
        cfg.reward().validate()?;
        if !(cfg.timeout_s > 0.0 && cfg.timeout_s.is_finite()) {
            bail!("timeout_s must be positive");
        }
        Ok(cfg)
    }

    pub fn reward(&self) -> RewardConfig {
        RewardConfig {
            alpha: self.alpha,
            beta: self.beta,
            rho_base: self.rho_base,
            gamma: self.gamma,
            k_max: self.k_max,
            r_fail_suite: self.r_fail_suite,
            r_fail_method: self.r_fail_method,
            pool_scaling: self.pool_scaling,
            truncate_on_failure: self.truncate_on_failure,
            sigma_eps: self.sigma_eps,
            quality_cap: self.quality_cap,
            quality: QualityTable {
                strict_equality: self.quality_strict_equality,
                exception: self.quality_exception,
                approximate: self.quality_approximate,
                membership: self.quality_membership,
                truth: self.quality_truth,
            },
        }
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let d = FileConfig::default();
        let back: FileConfig = toml::from_str(&d.to_toml()).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.reward(), RewardConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("alpah = 1.0\n").is_err());
        let c: FileConfig = toml::from_str("beta = 1.0\n").unwrap();
        assert_eq!(c.beta, 1.0);
        assert_eq!(c.alpha, 0.05);
    }
}
