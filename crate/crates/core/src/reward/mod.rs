//! Incremental, history-aware rewards for an ordered test suite.

mod quality;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use quality::{assertion_kinds, classify_method, quality_score, quality_score_with, AssertionKind, QualityTable};

use crate::exec::{self, discover_tests, ExecError, Executor, KillMatrix, Status, Verdict};
use crate::mutation::Mutant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    /// Weight of the quality term.
    pub alpha: f64,
    /// Weight of the marginal utility term.
    pub beta: f64,
    pub rho_base: f64,
    pub gamma: f64,
    pub k_max: u32,
    pub r_fail_suite: f64,
    pub r_fail_method: f64,
    /// Multiply utility by `1 + |M|/100`.
    pub pool_scaling: bool,
    /// Stop scoring at the first method that does not pass on the source.
    pub truncate_on_failure: bool,
    pub sigma_eps: f64,
    pub quality_cap: f64,
    pub quality: QualityTable,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            alpha: 0.05,
            beta: 3.0,
            rho_base: 0.5,
            gamma: 1.0,
            k_max: 10,
            r_fail_suite: -100.0,
            r_fail_method: -10.0,
            pool_scaling: false,
            truncate_on_failure: false,
            sigma_eps: 1e-8,
            quality_cap: 3.0,
            quality: QualityTable::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RewardError {
    #[error("mutant {0:?} has no weight")]
    MissingWeight(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        let bad = |m: &str| Err(RewardError::InvalidConfig(m.to_string()));
        if self.k_max < 1 {
            return bad("k_max must be at least 1");
        }
        if !(self.rho_base >= 0.0) {
            return bad("rho_base must be nonnegative");
        }
        if !(self.gamma >= 0.0) {
            return bad("gamma must be nonnegative");
        }
        if !(self.quality_cap >= 0.0) {
            return bad("quality_cap must be nonnegative");
        }
        if !(self.sigma_eps > 0.0) {
            return bad("sigma_eps must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Case {
    Failure,
    Redundant,
    Effective,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub method: String,
    pub verdict: Verdict,
    pub new_kills: Vec<String>,
    pub delta: f64,
    pub penalty: f64,
    pub quality: f64,
    pub r_t: f64,
    pub case: Case,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardTrace {
    pub steps: Vec<Step>,
    pub history_final: Vec<String>,
    pub k_valid: usize,
    pub r_total: f64,
}

#[derive(Serialize)]
struct StepExport<'a> {
    method: &'a str,
    status: Status,
    case: Case,
    delta: f64,
    r_t: f64,
    new_kills: &'a [String],
}

#[derive(Serialize)]
struct TraceExport<'a> {
    r_total: f64,
    k_valid: usize,
    steps: Vec<StepExport<'a>>,
}

impl RewardTrace {
    pub fn to_json(&self) -> String {
        let export = TraceExport {
            r_total: self.r_total,
            k_valid: self.k_valid,
            steps: self
                .steps
                .iter()
                .map(|s| StepExport {
                    method: &s.method,
                    status: s.verdict.status,
                    case: s.case,
                    delta: s.delta,
                    r_t: s.r_t,
                    new_kills: &s.new_kills,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&export).expect("trace serialises");
        s.push('\n');
        s
    }
}

/// Σ w_m over kills not already in the history.
pub fn marginal_utility(
    kills: &BTreeSet<String>,
    history: &BTreeSet<String>,
    weights: &HashMap<String, f64>,
) -> Result<f64, RewardError> {
    let mut total = 0.0;
    for m in kills {
        let w = *weights.get(m).ok_or_else(|| RewardError::MissingWeight(m.clone()))?;
        if !history.contains(m) {
            total += w;
        }
    }
    Ok(total)
}

/// ρ_base · exp(γ · t / K_max) for 0-based step `t`.
pub fn dynamic_penalty(t: usize, cfg: &RewardConfig) -> f64 {
    cfg.rho_base * (cfg.gamma * t as f64 / f64::from(cfg.k_max)).exp()
}

/// Reward of one step and which case produced it. `pool_size` is the
/// mutant pool size used by pool scaling.
pub fn step_reward(status: Status, delta: f64, t: usize, q: f64, pool_size: usize, cfg: &RewardConfig) -> (f64, Case) {
    if status != Status::Pass {
        return (cfg.r_fail_method, Case::Failure);
    }
    if delta <= 0.0 {
        return (-dynamic_penalty(t, cfg), Case::Redundant);
    }
    let utility = if cfg.pool_scaling {
        delta * (1.0 + pool_size as f64 / 100.0)
    } else {
        delta
    };
    (cfg.alpha * q + cfg.beta * utility, Case::Effective)
}

/// Σ r_t / √k_valid, or the suite failure reward when nothing was evaluated.
pub fn trajectory_reward(step_rewards: &[f64], k_valid: usize, cfg: &RewardConfig) -> f64 {
    if k_valid == 0 {
        return cfg.r_fail_suite;
    }
    let sum: f64 = step_rewards.iter().take(k_valid).sum();
    sum / (k_valid as f64).sqrt()
}

/// Scores methods in order against a matrix whose rows are those methods.
/// `method_sources[i]` is the text of method `i` (for the quality term) and
/// `pool_size` is |M| for pool scaling.
pub fn score_matrix(
    matrix: &KillMatrix,
    method_sources: &[String],
    pool_size: usize,
    cfg: &RewardConfig,
) -> Result<RewardTrace, RewardError> {
    if matrix.tests.is_empty() {
        return Ok(RewardTrace {
            steps: Vec::new(),
            history_final: Vec::new(),
            k_valid: 0,
            r_total: cfg.r_fail_suite,
        });
    }
    let weights = matrix.weight_map();
    let mut history: BTreeSet<String> = BTreeSet::new();
    let mut steps = Vec::with_capacity(matrix.tests.len());
    for (t, test) in matrix.tests.iter().enumerate() {
        let verdict = matrix.source_verdicts[t].clone();
        let q = quality_score_with(&method_sources[t], &cfg.quality, cfg.quality_cap);
        if verdict.status != Status::Pass {
            let (r_t, case) = step_reward(verdict.status, 0.0, t, q, pool_size, cfg);
            steps.push(Step {
                method: test.clone(),
                verdict,
                new_kills: Vec::new(),
                delta: 0.0,
                penalty: 0.0,
                quality: q,
                r_t,
                case,
            });
            if cfg.truncate_on_failure {
                break;
            }
            continue;
        }
        let kills: BTreeSet<String> = matrix.killed_ids(t).into_iter().collect();
        let delta = marginal_utility(&kills, &history, &weights)?;
        let (r_t, case) = step_reward(verdict.status, delta, t, q, pool_size, cfg);
        // report new kills in matrix column order
        let new_kills: Vec<String> = matrix
            .kill_row(t)
            .ones()
            .map(|m| matrix.mutants[m].clone())
            .filter(|id| !history.contains(id))
            .collect();
        history.extend(new_kills.iter().cloned());
        steps.push(Step {
            method: test.clone(),
            verdict,
            new_kills,
            delta,
            penalty: if case == Case::Redundant { -r_t } else { 0.0 },
            quality: q,
            r_t,
            case,
        });
    }
    let k_valid = steps.len();
    let rewards: Vec<f64> = steps.iter().map(|s| s.r_t).collect();
    let order: HashMap<&str, usize> = matrix.mutants.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let mut history_final: Vec<String> = history.into_iter().collect();
    history_final.sort_by_key(|m| order[m.as_str()]);
    Ok(RewardTrace {
        steps,
        history_final,
        k_valid,
        r_total: trajectory_reward(&rewards, k_valid, cfg),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum ScoreError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Reward(#[from] RewardError),
}

/// Discovers the suite's methods, runs them on the source and on the
/// (optionally pre-filtered) mutants, and scores them in source order.
pub fn score_trajectory(
    exec: &Executor,
    source: &str,
    mutants: &[Mutant],
    suite_source: &str,
    cfg: &RewardConfig,
    smoke: Option<&str>,
) -> Result<RewardTrace, ScoreError> {
    let methods = discover_tests(suite_source);
    if methods.is_empty() {
        return Ok(score_matrix(
            &KillMatrix::from_kills(Vec::new(), Vec::new(), Vec::new(), &[]),
            &[],
            mutants.len(),
            cfg,
        )?);
    }
    let pool = exec::prefilter_vulnerable(exec, source, mutants, smoke)?;
    let matrix = exec::build_kill_matrix(exec, source, &pool, suite_source)?;
    let sources: Vec<String> = methods.into_iter().map(|m| m.source).collect();
    Ok(score_matrix(&matrix, &sources, mutants.len(), cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn marginal_utility_examples() {
        let w: HashMap<String, f64> = [("m1", 1.0), ("m2", 1.0), ("m3", 2.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(marginal_utility(&set(&["m1", "m2"]), &set(&[]), &w).unwrap(), 2.0);
        assert_eq!(marginal_utility(&set(&["m1"]), &set(&["m1"]), &w).unwrap(), 0.0);
        assert_eq!(marginal_utility(&set(&["m1", "m2", "m3"]), &set(&["m2"]), &w).unwrap(), 3.0);
        assert_eq!(
            marginal_utility(&set(&["m9"]), &set(&[]), &w),
            Err(RewardError::MissingWeight("m9".into()))
        );
    }

    #[test]
    fn penalty_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(dynamic_penalty(0, &cfg), 0.5);
        assert!((dynamic_penalty(10, &cfg) - 1.359_140_914).abs() < 1e-6);
        assert!((dynamic_penalty(5, &cfg) - 0.824_360_635).abs() < 1e-6);
    }

    #[test]
    fn step_reward_cases() {
        let cfg = RewardConfig::default();
        assert_eq!(step_reward(Status::Fail, 3.0, 0, 1.0, 5, &cfg), (-10.0, Case::Failure));
        let (r, c) = step_reward(Status::Pass, 0.0, 3, 1.0, 5, &cfg);
        assert_eq!(c, Case::Redundant);
        assert!((r + 0.674_929_404).abs() < 1e-6);
        let (r, c) = step_reward(Status::Pass, 2.0, 0, 1.0, 5, &cfg);
        assert_eq!(c, Case::Effective);
        assert!((r - 6.05).abs() < 1e-12);
        let scaled = RewardConfig {
            pool_scaling: true,
            ..cfg
        };
        let (r, _) = step_reward(Status::Pass, 2.0, 0, 0.0, 50, &scaled);
        assert!((r - 9.0).abs() < 1e-12);
    }

    #[test]
    fn trajectory_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(trajectory_reward(&[3.0], 1, &cfg), 3.0);
        assert_eq!(trajectory_reward(&[2.0; 4], 4, &cfg), 4.0);
        assert_eq!(trajectory_reward(&[], 0, &cfg), -100.0);
    }

    #[test]
    fn config_validation() {
        assert!(RewardConfig::default().validate().is_ok());
        let bad = RewardConfig {
            k_max: 0,
            ..RewardConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn truncation_stops_at_first_failure() {
        let mut m = KillMatrix::from_kills(
            vec!["T.a".into(), "T.b".into(), "T.c".into()],
            vec!["m".into()],
            vec![1.0],
            &[vec![false], vec![false], vec![true]],
        );
        m.source_verdicts[1] = Verdict::with_status(Status::Fail);
        let srcs = vec![String::new(); 3];
        let cont = score_matrix(&m, &srcs, 1, &RewardConfig::default()).unwrap();
        assert_eq!(cont.k_valid, 3);
        assert_eq!(cont.history_final, ["m"]);
        let cfg = RewardConfig {
            truncate_on_failure: true,
            ..RewardConfig::default()
        };
        let cut = score_matrix(&m, &srcs, 1, &cfg).unwrap();
        assert_eq!(cut.k_valid, 2);
        assert!(cut.history_final.is_empty());
    }
}
