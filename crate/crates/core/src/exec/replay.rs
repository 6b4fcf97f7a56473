//! In-process runners: closures and recorded verdicts.

use std::collections::HashMap;

use super::{ExecError, Job, JobRunner, KillMatrix, Limits, Verdict};
use crate::mutation::Mutant;

/// Runner backed by a closure; handy for deterministic tests.
pub struct FnRunner<F> {
    f: F,
}

impl<F> FnRunner<F>
where
    F: Fn(&Job) -> Verdict + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnRunner { f }
    }
}

impl<F> JobRunner for FnRunner<F>
where
    F: Fn(&Job) -> Verdict + Send + Sync,
{
    fn run_batch(&self, jobs: &[Job], _limits: &Limits) -> Result<Vec<Verdict>, ExecError> {
        Ok(jobs.iter().map(&self.f).collect())
    }
}

/// Answers from previously recorded verdicts keyed by (code, method).
#[derive(Debug, Default, Clone)]
pub struct ReplayRunner {
    verdicts: HashMap<(String, String), Verdict>,
}

impl ReplayRunner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, code: &str, method: &str, verdict: Verdict) {
        self.verdicts.insert((code.to_string(), method.to_string()), verdict);
    }

    /// Replays a kill matrix: source verdicts answer for `source`, grid
    /// cells for each mutant's `mutated_source`. Mutants are matched to
    /// matrix columns by id.
    pub fn from_matrix(matrix: &KillMatrix, source: &str, mutants: &[Mutant]) -> Self {
        let mut r = Self::new();
        for (t, test) in matrix.tests.iter().enumerate() {
            r.record(source, test, matrix.source_verdicts[t].clone());
            for m in mutants {
                let Some(col) = matrix.mutant_index(&m.id) else { continue };
                if let Some(v) = &matrix.grid[t][col] {
                    r.record(&m.mutated_source, test, v.clone());
                }
            }
        }
        r
    }
}

impl JobRunner for ReplayRunner {
    fn run_batch(&self, jobs: &[Job], _limits: &Limits) -> Result<Vec<Verdict>, ExecError> {
        jobs.iter()
            .map(|j| {
                self.verdicts
                    .get(&(j.code.to_string(), j.method.clone()))
                    .cloned()
                    .ok_or_else(|| ExecError::Unrecorded(j.method.clone()))
            })
            .collect()
    }
}
